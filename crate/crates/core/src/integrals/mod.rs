//! Matrix elements over contracted solid-harmonic Gaussians.
//!
//! Overlap, kinetic, multipole, point-charge and two-electron integrals use
//! Hermite-Gaussian (McMurchie–Davidson) recursions; the semi-local ECP and
//! the core polarization operator use an axial quadrature about each core.

mod axial;
pub mod boys;
mod ecp;
mod eri;
pub mod hermite;
mod one_electron;
mod shell;

pub use axial::{center_integrals, CenterIntegrals, CppParams, QuadratureOptions};
pub use ecp::{EcpSpec, EcpTerm};
pub use eri::{compute_eri, eri_quartet, pair_classes_couple, EriScratch, ShellMap, TwoElectronTensor};
pub use one_electron::{coulomb_block, one_electron_blocks, OneElectronBlocks};
pub use shell::{
    c2s, cartesian_powers, class_m, class_name, radial_norm, shell_labels, AngularLabel, Azimuth, Shell,
    MAX_L, N_CLASSES,
};

use crate::data::{AtomBasisSet, CoreParameters, Element};
use crate::{Error, Result};
use hermite::RScratch;
use nalgebra::DMatrix;

/// Description of one basis function in the global ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionInfo {
    pub center: usize,
    pub shell: usize,
    pub component: usize,
    pub label: AngularLabel,
}

/// Shells of a molecule with functions ordered class-major (all σ, then πc,
/// πs, δc, δs, φc, φs), shell order within a class.
#[derive(Debug, Clone)]
pub struct MolecularBasis {
    pub shells: Vec<ShellMap>,
    pub functions: Vec<FunctionInfo>,
    /// `class_start[k]..class_start[k+1]` are the functions of class k.
    pub class_start: [usize; N_CLASSES + 1],
}

impl MolecularBasis {
    /// Places each atom's basis at its center.
    pub fn new(atoms: &[([f64; 3], &AtomBasisSet)]) -> Result<MolecularBasis> {
        let mut shells = Vec::new();
        for (ci, (pos, basis)) in atoms.iter().enumerate() {
            for rf in basis.radial_functions() {
                shells.push(Shell::from_radial(*pos, ci, &rf)?);
            }
        }
        Ok(MolecularBasis::from_shells(shells))
    }

    pub fn from_shells(shells: Vec<Shell>) -> MolecularBasis {
        let mut funcs = Vec::new();
        for (si, sh) in shells.iter().enumerate() {
            for (comp, label) in sh.labels().into_iter().enumerate() {
                funcs.push(FunctionInfo {
                    center: sh.atom,
                    shell: si,
                    component: comp,
                    label,
                });
            }
        }
        funcs.sort_by_key(|f| (f.label.class(), f.shell));
        let mut class_start = [0; N_CLASSES + 1];
        for f in &funcs {
            class_start[f.label.class() + 1] += 1;
        }
        for k in 0..N_CLASSES {
            class_start[k + 1] += class_start[k];
        }
        let mut maps: Vec<ShellMap> = shells
            .into_iter()
            .map(|s| ShellMap {
                index: vec![0; s.n_functions()],
                shell: s,
            })
            .collect();
        for (g, f) in funcs.iter().enumerate() {
            maps[f.shell].index[f.component] = g;
        }
        MolecularBasis {
            shells: maps,
            functions: funcs,
            class_start,
        }
    }

    pub fn n_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn class_range(&self, class: usize) -> std::ops::Range<usize> {
        self.class_start[class]..self.class_start[class + 1]
    }

    pub fn class_of(&self) -> Vec<usize> {
        self.functions.iter().map(|f| f.label.class()).collect()
    }

    /// Copy of the basis with every shell moved by `shift`.
    pub fn translated(&self, shift: [f64; 3]) -> MolecularBasis {
        let mut out = self.clone();
        for sm in &mut out.shells {
            for k in 0..3 {
                sm.shell.center[k] += shift[k];
            }
        }
        out
    }
}

/// One atomic center of the dimer.
#[derive(Debug, Clone)]
pub struct CenterSpec {
    pub element: Element,
    pub basis: AtomBasisSet,
    pub core: CoreParameters,
    pub ecp: EcpSpec,
}

/// Two centers on the z axis: M at `z0`, M′ at `z0 + R`.
#[derive(Debug, Clone)]
pub struct GeometrySpec {
    pub centers: [CenterSpec; 2],
    pub r: f64,
    /// Common z offset of both centers (zero in production runs).
    pub z0: f64,
}

impl GeometrySpec {
    pub fn new(m: CenterSpec, m_prime: CenterSpec, r: f64) -> Result<GeometrySpec> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("internuclear distance must be positive, got {r}")));
        }
        Ok(GeometrySpec {
            centers: [m, m_prime],
            r,
            z0: 0.0,
        })
    }

    pub fn position(&self, c: usize) -> [f64; 3] {
        [0.0, 0.0, self.z0 + if c == 0 { 0.0 } else { self.r }]
    }

    /// Charge-weighted midpoint of the cores, used as dipole origin.
    pub fn charge_center(&self) -> [f64; 3] {
        let q: Vec<f64> = self.centers.iter().map(|c| c.core.charge).collect();
        let z = (q[0] * self.position(0)[2] + q[1] * self.position(1)[2]) / (q[0] + q[1]);
        [0.0, 0.0, z]
    }

    pub fn basis(&self) -> Result<MolecularBasis> {
        MolecularBasis::new(&[
            (self.position(0), &self.centers[0].basis),
            (self.position(1), &self.centers[1].basis),
        ])
    }
}

/// Integral-evaluation settings.
#[derive(Debug, Clone)]
pub struct IntegralOptions {
    pub quadrature: QuadratureOptions,
    /// Cauchy–Schwarz threshold for skipping shell quartets.
    pub schwarz: f64,
    /// Include the electron–electron core-polarization coupling.
    pub cpp_two_electron: bool,
    /// Include core polarization at all.
    pub cpp: bool,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions {
            quadrature: QuadratureOptions::default(),
            schwarz: 1e-14,
            cpp_two_electron: false,
            cpp: true,
        }
    }
}

/// One-electron operator matrices in the global function order.
#[derive(Debug, Clone)]
pub struct OperatorMatrices {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    /// Point-charge attraction to both cores plus both ECPs.
    pub v_core: DMatrix<f64>,
    /// One-electron core polarization of both cores.
    pub v_cpp: DMatrix<f64>,
    /// Electronic z relative to `dipole_origin`.
    pub dz: DMatrix<f64>,
    pub dipole_origin: [f64; 3],
    /// Per core: polarizability and cut field operators (x, y, z), kept when
    /// the two-electron polarization term is requested.
    pub fields: Vec<(f64, [DMatrix<f64>; 3])>,
}

impl OperatorMatrices {
    /// Core Hamiltonian T + V_core + V_cpp.
    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.v_core + &self.v_cpp
    }
}

fn scatter_block(m: &mut DMatrix<f64>, ia: &[usize], ib: &[usize], block: &[f64]) {
    let nb = ib.len();
    for (fa, &i) in ia.iter().enumerate() {
        for (fb, &j) in ib.iter().enumerate() {
            m[(i, j)] = block[fa * nb + fb];
            m[(j, i)] = block[fa * nb + fb];
        }
    }
}

/// Overlap, kinetic, z, and point-charge attraction matrices.
pub fn analytic_one_electron(
    basis: &MolecularBasis,
    charges: &[([f64; 3], f64)],
    origin: [f64; 3],
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = basis.n_functions();
    let mut s = DMatrix::zeros(n, n);
    let mut t = DMatrix::zeros(n, n);
    let mut z = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut scratch = RScratch::default();
    for (a, sa) in basis.shells.iter().enumerate() {
        for sb in basis.shells.iter().take(a + 1) {
            let b = one_electron_blocks(&sa.shell, &sb.shell, origin);
            scatter_block(&mut s, &sa.index, &sb.index, &b.overlap);
            scatter_block(&mut t, &sa.index, &sb.index, &b.kinetic);
            scatter_block(&mut z, &sa.index, &sb.index, &b.z);
            let neg: Vec<([f64; 3], f64)> = charges.iter().map(|&(p, q)| (p, -q)).collect();
            let vb = coulomb_block(&sa.shell, &sb.shell, &neg, &mut scratch);
            scatter_block(&mut v, &sa.index, &sb.index, &vb);
        }
    }
    (s, t, z, v)
}

/// All one-electron matrices of a dimer geometry.
pub fn build_operators(geom: &GeometrySpec, basis: &MolecularBasis, opts: &IntegralOptions) -> Result<OperatorMatrices> {
    let charges: Vec<([f64; 3], f64)> = (0..2).map(|c| (geom.position(c), geom.centers[c].core.charge)).collect();
    let origin = geom.charge_center();
    let (overlap, kinetic, dz, mut v_core) = analytic_one_electron(basis, &charges, origin);
    let n = basis.n_functions();
    let mut v_cpp = DMatrix::zeros(n, n);
    let mut fields = Vec::new();
    for c in 0..2 {
        let other = 1 - c;
        let spec = &geom.centers[c];
        // field of the other core at this one, along z
        let dzc = geom.position(other)[2] - geom.position(c)[2];
        let q_other = geom.centers[other].core.charge;
        let cpp = opts.cpp.then(|| CppParams {
            alpha: spec.core.alpha_d,
            rho: spec.core.rho,
            other_field_z: -q_other * dzc.signum() / (dzc * dzc),
        });
        let ci = center_integrals(
            basis,
            geom.position(c)[2],
            Some(&spec.ecp),
            cpp.as_ref(),
            opts.cpp && opts.cpp_two_electron,
            &opts.quadrature,
        )?;
        v_core += &ci.ecp;
        v_cpp += &ci.cpp;
        if let Some(f) = ci.field {
            fields.push((spec.core.alpha_d, f));
        }
    }
    Ok(OperatorMatrices {
        overlap,
        kinetic,
        v_core,
        v_cpp,
        dz,
        dipole_origin: origin,
        fields,
    })
}

/// Electron-repulsion tensor, with the electron–electron polarization
/// coupling added when field operators are present.
pub fn build_eri(basis: &MolecularBasis, ops: &OperatorMatrices, opts: &IntegralOptions) -> TwoElectronTensor {
    let mut eri = compute_eri(&basis.shells, basis.class_of(), opts.schwarz);
    if !ops.fields.is_empty() {
        let owned: Vec<(f64, Vec<f64>)> = ops
            .fields
            .iter()
            .flat_map(|(alpha, f)| f.iter().map(move |m| (-alpha, m.transpose().as_slice().to_vec())))
            .collect();
        let terms: Vec<(f64, &[f64])> = owned.iter().map(|(w, m)| (*w, m.as_slice())).collect();
        eri.add_separable(&terms);
    }
    eri
}

//! Full configuration interaction for two electrons in ¹Σ⁺ and ³Σ⁺ symmetry.
//!
//! A two-electron Σ⁺ state pairs orbitals of equal |m|. For |m| > 0 the
//! cosine and sine partners enter with equal weight, so the spatial part is
//! Ψ = Σ_k Σ_pq C^k_pq Σ_{Y∈k} Y_p(1) Y_q(2), with C^k symmetric for the
//! singlet and antisymmetric for the triplet. The Hamiltonian is assembled in
//! the normalized product basis and then projected on the spin-adapted
//! coordinates.

use super::scf::ScfResult;
use crate::integrals::{OperatorMatrices, TwoElectronTensor};
use crate::linalg::{davidson_lowest, sym_eigen};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::fmt;

/// Number of |m| blocks (σ, π, δ, φ).
pub const N_BLOCKS: usize = 4;

fn block_classes(k: usize) -> &'static [usize] {
    [&[0][..], &[1, 2], &[3, 4], &[5, 6]][k]
}

fn block_weight(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Singlet,
    Triplet,
}

impl Spin {
    pub fn state_label(self) -> &'static str {
        match self {
            Spin::Singlet => "X1Sigma+",
            Spin::Triplet => "a3Sigma+",
        }
    }

    pub fn multiplicity(self) -> usize {
        match self {
            Spin::Singlet => 1,
            Spin::Triplet => 3,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.state_label())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CiOptions {
    /// Spin-adapted dimension up to which the matrix is diagonalized densely.
    pub dense_limit: usize,
    pub residual_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CiOptions {
    fn default() -> Self {
        CiOptions {
            dense_limit: 800,
            residual_tolerance: 1e-10,
            max_iterations: 300,
        }
    }
}

/// Lowest CI root of one spin symmetry.
#[derive(Debug, Clone)]
pub struct CiState {
    pub spin: Spin,
    /// Electronic energy (hartree).
    pub energy: f64,
    /// C^k over the MOs of the cosine class of block k; Σ_k w_k |C^k|² = 1.
    pub coefficients: Vec<DMatrix<f64>>,
    pub dimension: usize,
}

/// Σ⁺ Hamiltonian in the product basis of the SCF orbitals.
pub struct CiHamiltonian {
    sizes: [usize; N_BLOCKS],
    offsets: [usize; N_BLOCKS + 1],
    matrix: DMatrix<f64>,
    /// z operator over the MOs of each block.
    z_mo: Vec<DMatrix<f64>>,
}

/// Row-major 4-index array: contract the last index with `c` (d3 × e3) and
/// move the new index to the front.
fn contract_last_rotate(a: &[f64], dims: [usize; 4], c: &DMatrix<f64>) -> (Vec<f64>, [usize; 4]) {
    let rows = dims[0] * dims[1] * dims[2];
    let (d3, e3) = (dims[3], c.ncols());
    let mut tmp = vec![0.0; rows * e3];
    // c is column-major: element (i, j) at i + j*d3
    unsafe {
        matrixmultiply::dgemm(
            rows,
            d3,
            e3,
            1.0,
            a.as_ptr(),
            d3 as isize,
            1,
            c.as_slice().as_ptr(),
            1,
            d3 as isize,
            0.0,
            tmp.as_mut_ptr(),
            e3 as isize,
            1,
        );
    }
    let mut out = vec![0.0; rows * e3];
    for r in 0..rows {
        for s in 0..e3 {
            out[s * rows + r] = tmp[r * e3 + s];
        }
    }
    (out, [e3, dims[0], dims[1], dims[2]])
}

/// G[p][r][q][s] = (X_p Y_r | X_q Y_s) over MOs of classes x and y.
fn mo_pair_block(eri: &TwoElectronTensor, scf: &ScfResult, x: usize, y: usize) -> Vec<f64> {
    let (ox, oy) = (&scf.classes[x], &scf.classes[y]);
    let (nx, ny) = (ox.ao_range.len(), oy.ao_range.len());
    let mut a = vec![0.0; nx * ny * nx * ny];
    let mut idx = 0;
    for i in ox.ao_range.clone() {
        for j in oy.ao_range.clone() {
            for k in ox.ao_range.clone() {
                for l in oy.ao_range.clone() {
                    a[idx] = eri.get(i, j, k, l);
                    idx += 1;
                }
            }
        }
    }
    // dims [i, j, a, b] -> [p, r, q, s]
    let (cx, cy) = (&ox.coefficients, &oy.coefficients);
    let (a, d) = contract_last_rotate(&a, [nx, ny, nx, ny], cy);
    let (a, d) = contract_last_rotate(&a, d, cx);
    let (a, d) = contract_last_rotate(&a, d, cy);
    let (a, _) = contract_last_rotate(&a, d, cx);
    a
}

impl CiHamiltonian {
    pub fn new(ops: &OperatorMatrices, eri: &TwoElectronTensor, scf: &ScfResult) -> CiHamiltonian {
        let h_ao = ops.core_hamiltonian();
        let mut sizes = [0; N_BLOCKS];
        let mut offsets = [0; N_BLOCKS + 1];
        let mut h_mo = Vec::new();
        let mut z_mo = Vec::new();
        for k in 0..N_BLOCKS {
            let orb = &scf.classes[block_classes(k)[0]];
            let r = &orb.ao_range;
            let c = &orb.coefficients;
            sizes[k] = c.ncols();
            offsets[k + 1] = offsets[k] + sizes[k] * sizes[k];
            let hb = h_ao.view((r.start, r.start), (r.len(), r.len()));
            h_mo.push(c.transpose() * hb * c);
            let zb = ops.dz.view((r.start, r.start), (r.len(), r.len()));
            z_mo.push(c.transpose() * zb * c);
        }
        let dim = offsets[N_BLOCKS];
        let mut matrix = DMatrix::zeros(dim, dim);
        for k in 0..N_BLOCKS {
            let n = sizes[k];
            let h = &h_mo[k];
            for p in 0..n {
                for q in 0..n {
                    let row = offsets[k] + p * n + q;
                    for r in 0..n {
                        matrix[(row, offsets[k] + r * n + q)] += h[(p, r)];
                        matrix[(row, offsets[k] + p * n + r)] += h[(q, r)];
                    }
                }
            }
        }
        for k in 0..N_BLOCKS {
            let x = block_classes(k)[0];
            let n = sizes[k];
            for kp in 0..N_BLOCKS {
                let m = sizes[kp];
                if n == 0 || m == 0 {
                    continue;
                }
                let f = block_weight(k) / (block_weight(k) * block_weight(kp)).sqrt();
                for &y in block_classes(kp) {
                    let g = mo_pair_block(eri, scf, x, y);
                    // g laid out [p][r][q][s] with p, q over x and r, s over y
                    for p in 0..n {
                        for q in 0..n {
                            let row = offsets[k] + p * n + q;
                            for r in 0..m {
                                let base = (p * m + r) * n * m + q * m;
                                for s in 0..m {
                                    matrix[(row, offsets[kp] + r * m + s)] += f * g[base + s];
                                }
                            }
                        }
                    }
                }
            }
        }
        CiHamiltonian {
            sizes,
            offsets,
            matrix,
            z_mo,
        }
    }

    pub fn product_dimension(&self) -> usize {
        self.offsets[N_BLOCKS]
    }

    /// Spin-adapted coordinates: (product index, coefficient) lists.
    fn spin_basis(&self, spin: Spin) -> Vec<Vec<(usize, f64)>> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = Vec::new();
        for k in 0..N_BLOCKS {
            let n = self.sizes[k];
            let at = |p: usize, q: usize| self.offsets[k] + p * n + q;
            for p in 0..n {
                match spin {
                    Spin::Singlet => {
                        out.push(vec![(at(p, p), 1.0)]);
                        for q in p + 1..n {
                            out.push(vec![(at(p, q), h), (at(q, p), h)]);
                        }
                    }
                    Spin::Triplet => {
                        for q in p + 1..n {
                            out.push(vec![(at(p, q), h), (at(q, p), -h)]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Hamiltonian projected on the spin-adapted coordinates.
    pub fn spin_matrix(&self, spin: Spin) -> (Vec<Vec<(usize, f64)>>, DMatrix<f64>) {
        let basis = self.spin_basis(spin);
        let d = basis.len();
        let mut m = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..=a {
                let mut v = 0.0;
                for &(u, cu) in &basis[a] {
                    for &(w, cw) in &basis[b] {
                        v += cu * cw * self.matrix[(u, w)];
                    }
                }
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        (basis, m)
    }

    pub fn lowest(&self, spin: Spin, opts: &CiOptions) -> Result<CiState> {
        let (basis, m) = self.spin_matrix(spin);
        let d = basis.len();
        if d == 0 {
            return Err(Error::Eigen(format!("no {spin} configurations")));
        }
        let (energy, x) = if d <= opts.dense_limit {
            let (e, v) = sym_eigen(&m);
            (e[0], v.column(0).into_owned())
        } else {
            let diag: Vec<f64> = m.diagonal().iter().copied().collect();
            davidson_lowest(&diag, |v: &DVector<f64>| &m * v, opts.residual_tolerance, opts.max_iterations)?
        };
        let mut product = vec![0.0; self.product_dimension()];
        for (a, terms) in basis.iter().enumerate() {
            for &(u, c) in terms {
                product[u] += c * x[a];
            }
        }
        let coefficients = (0..N_BLOCKS)
            .map(|k| {
                let n = self.sizes[k];
                let scale = 1.0 / block_weight(k).sqrt();
                DMatrix::from_row_slice(n, n, &product[self.offsets[k]..self.offsets[k + 1]]) * scale
            })
            .collect();
        Ok(CiState {
            spin,
            energy,
            coefficients,
            dimension: d,
        })
    }

    /// ⟨z₁ + z₂⟩ of a CI state, relative to the operator origin.
    pub fn electronic_z(&self, state: &CiState) -> f64 {
        (0..N_BLOCKS)
            .map(|k| {
                let c = &state.coefficients[k];
                let z = &self.z_mo[k];
                let one = (c.transpose() * z * c).trace() + (c * z * c.transpose()).trace();
                block_weight(k) * one
            })
            .sum()
    }
}

impl CiState {
    /// Σ_k w_k |C^k|²; unity for a normalized state.
    pub fn norm_squared(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| block_weight(k) * c.norm_squared())
            .sum()
    }
}

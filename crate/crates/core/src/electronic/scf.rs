//! Closed-shell Hartree-Fock for two valence electrons.

use crate::integrals::{class_m, OperatorMatrices, TwoElectronTensor, N_CLASSES};
use crate::linalg::{canonical_orthogonalizer, generalized_eigen, DEFAULT_LINDEP};
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::ops::Range;

#[derive(Debug, Clone, Copy)]
pub struct ScfOptions {
    pub max_iterations: usize,
    pub energy_tolerance: f64,
    pub density_tolerance: f64,
    pub lindep_threshold: f64,
    /// DIIS subspace size; 0 disables extrapolation.
    pub diis: usize,
    /// Fraction of the previous density mixed into the new one while DIIS
    /// is off.
    pub damping: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        ScfOptions {
            max_iterations: 200,
            energy_tolerance: 1e-10,
            density_tolerance: 1e-8,
            lindep_threshold: DEFAULT_LINDEP,
            diis: 8,
            damping: 0.0,
        }
    }
}

/// Molecular orbitals of one symmetry class.
#[derive(Debug, Clone)]
pub struct ClassOrbitals {
    pub class: usize,
    /// Global AO indices of the class.
    pub ao_range: Range<usize>,
    /// AO × MO coefficients within the class block.
    pub coefficients: DMatrix<f64>,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ScfResult {
    pub classes: Vec<ClassOrbitals>,
    /// Electronic energy of the two valence electrons (hartree).
    pub energy: f64,
    pub iterations: usize,
    pub energy_change: f64,
    pub density_change: f64,
    /// Directions removed by canonical orthogonalization, all classes.
    pub dropped: usize,
    pub n_ao: usize,
}

impl ScfResult {
    /// Full AO × MO coefficient matrix, classes in order.
    pub fn coefficients(&self) -> DMatrix<f64> {
        let n_mo: usize = self.classes.iter().map(|c| c.coefficients.ncols()).sum();
        let mut out = DMatrix::zeros(self.n_ao, n_mo);
        let mut col = 0;
        for c in &self.classes {
            let k = c.coefficients.ncols();
            out.view_mut((c.ao_range.start, col), (c.ao_range.len(), k)).copy_from(&c.coefficients);
            col += k;
        }
        out
    }

    pub fn orbital_energies(&self) -> Vec<f64> {
        self.classes.iter().flat_map(|c| c.energies.iter().copied()).collect()
    }

    /// |m| of every orbital in the order of [`Self::coefficients`].
    pub fn lambdas(&self) -> Vec<usize> {
        self.classes
            .iter()
            .flat_map(|c| std::iter::repeat_n(class_m(c.class), c.coefficients.ncols()))
            .collect()
    }

    /// Closed-shell density P = 2 c cᵀ of the occupied σ orbital.
    pub fn density(&self) -> DMatrix<f64> {
        let sigma = &self.classes[0];
        occupied_density(self.n_ao, &sigma.ao_range, &sigma.coefficients)
    }
}

fn occupied_density(n: usize, range: &Range<usize>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    let occ = c.column(0);
    let block = 2.0 * occ * occ.transpose();
    p.view_mut((range.start, range.start), (range.len(), range.len())).copy_from(&block);
    p
}

fn block(m: &DMatrix<f64>, r: &Range<usize>) -> DMatrix<f64> {
    m.view((r.start, r.start), (r.len(), r.len())).into_owned()
}

fn fock(h: &DMatrix<f64>, eri: &TwoElectronTensor, p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let (j, k) = eri.coulomb_exchange(p.transpose().as_slice());
    let j = DMatrix::from_row_slice(n, n, &j);
    let k = DMatrix::from_row_slice(n, n, &k);
    h + j - k * 0.5
}

/// Direct inversion in the iterative subspace on the σ block.
struct Diis {
    size: usize,
    focks: Vec<DMatrix<f64>>,
    errors: Vec<DMatrix<f64>>,
}

impl Diis {
    fn push(&mut self, f: DMatrix<f64>, e: DMatrix<f64>) {
        if self.focks.len() == self.size {
            self.focks.remove(0);
            self.errors.remove(0);
        }
        self.focks.push(f);
        self.errors.push(e);
    }

    fn extrapolate(&self) -> Option<DMatrix<f64>> {
        let m = self.focks.len();
        if m < 2 {
            return None;
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let v = self.errors[i].dot(&self.errors[j]);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = nalgebra::DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let w = b.lu().solve(&rhs)?;
        if w.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let mut f = self.focks[0].clone() * w[0];
        for i in 1..m {
            f += &self.focks[i] * w[i];
        }
        Some(f)
    }
}

/// Restricted Hartree-Fock with one doubly occupied σ orbital. The Fock
/// operator is block diagonal in the symmetry classes; each class is
/// orthogonalized and diagonalized separately.
pub fn scf(ops: &OperatorMatrices, eri: &TwoElectronTensor, class_ranges: &[Range<usize>], opts: &ScfOptions) -> Result<ScfResult> {
    let n = ops.overlap.nrows();
    let h = ops.core_hamiltonian();
    let mut xs = Vec::new();
    let mut dropped = 0;
    for r in class_ranges {
        let (x, d) = canonical_orthogonalizer(&block(&ops.overlap, r), opts.lindep_threshold);
        dropped += d;
        xs.push(x);
    }
    let sigma = class_ranges[0].clone();
    if xs[0].ncols() == 0 {
        return Err(Error::LinearDependence("σ orbitals".into()));
    }
    let s_sigma = block(&ops.overlap, &sigma);
    let (_, mut c) = generalized_eigen(&block(&h, &sigma), &xs[0]);
    let mut p = occupied_density(n, &sigma, &c);
    let mut energy = f64::NAN;
    let mut trace = Vec::new();
    let mut diis = Diis {
        size: opts.diis,
        focks: Vec::new(),
        errors: Vec::new(),
    };
    let mut f_full;
    let mut iterations = 0;
    let (mut de, mut dp);
    loop {
        iterations += 1;
        f_full = fock(&h, eri, &p);
        let e_new = 0.5 * p.dot(&(&h + &f_full));
        de = (e_new - energy).abs();
        energy = e_new;
        trace.push(energy);
        let f_sigma = block(&f_full, &sigma);
        let p_sigma = block(&p, &sigma);
        let comm = &f_sigma * &p_sigma * &s_sigma - &s_sigma * &p_sigma * &f_sigma;
        let err = xs[0].transpose() * comm * &xs[0];
        let f_use = if opts.diis > 0 {
            diis.push(f_sigma.clone(), err);
            diis.extrapolate().unwrap_or(f_sigma)
        } else {
            f_sigma
        };
        c = generalized_eigen(&f_use, &xs[0]).1;
        let mut p_new = occupied_density(n, &sigma, &c);
        if opts.diis == 0 && opts.damping > 0.0 {
            p_new = &p_new * (1.0 - opts.damping) + &p * opts.damping;
        }
        dp = (&p_new - &p).amax();
        p = p_new;
        if de < opts.energy_tolerance && dp < opts.density_tolerance {
            break;
        }
        if iterations >= opts.max_iterations {
            let keep = trace.len().saturating_sub(10);
            return Err(Error::ScfNotConverged {
                iterations,
                trace: trace[keep..].to_vec(),
            });
        }
    }
    // final orbitals of every class from the converged Fock operator
    let f_full = fock(&h, eri, &p);
    let energy = 0.5 * p.dot(&(&h + &f_full));
    let mut classes: Vec<ClassOrbitals> = Vec::with_capacity(N_CLASSES);
    for (k, r) in class_ranges.iter().enumerate() {
        let is_sin_partner = k > 0 && k % 2 == 0;
        let (energies, coefficients) = if is_sin_partner {
            let twin = &classes[k - 1];
            (twin.energies.clone(), twin.coefficients.clone())
        } else if xs[k].ncols() == 0 {
            (Vec::new(), DMatrix::zeros(r.len(), 0))
        } else {
            let (e, v) = generalized_eigen(&block(&f_full, r), &xs[k]);
            // canonical orbitals are defined up to sign; fix it by the largest component
            (e, fix_signs(v))
        };
        classes.push(ClassOrbitals {
            class: k,
            ao_range: r.clone(),
            coefficients,
            energies,
        });
    }
    Ok(ScfResult {
        classes,
        energy,
        iterations,
        energy_change: de,
        density_change: dp,
        dropped,
        n_ao: n,
    })
}

fn fix_signs(mut v: DMatrix<f64>) -> DMatrix<f64> {
    for mut col in v.column_iter_mut() {
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
    }
    v
}


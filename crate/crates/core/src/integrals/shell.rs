//! Contracted shells of real solid-harmonic Gaussians.
//!
//! A shell holds one radial contraction for a given ℓ and all 2ℓ+1 angular
//! components, ordered m = 0, 1c, 1s, 2c, 2s, 3c, 3s. Every function has a
//! sharp projection |m| about the z axis, so one-electron operators with
//! axial symmetry are block-diagonal in the seven classes σ, πc, πs, δc, δs,
//! φc, φs.

use crate::data::RadialFunction;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const MAX_L: usize = 3;

/// Cosine or sine dependence on the azimuth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Azimuth {
    Cos,
    Sin,
}

/// Angular label of one function in a shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AngularLabel {
    pub l: usize,
    pub m: usize,
    pub azimuth: Azimuth,
}

impl AngularLabel {
    /// Symmetry class 0..7: σ, πc, πs, δc, δs, φc, φs.
    pub fn class(self) -> usize {
        match (self.m, self.azimuth) {
            (0, _) => 0,
            (m, Azimuth::Cos) => 2 * m - 1,
            (m, Azimuth::Sin) => 2 * m,
        }
    }
}

pub const N_CLASSES: usize = 7;

/// |m| of a symmetry class.
pub fn class_m(class: usize) -> usize {
    class.div_ceil(2)
}

pub fn class_name(class: usize) -> &'static str {
    ["sigma", "pi_c", "pi_s", "delta_c", "delta_s", "phi_c", "phi_s"][class]
}

/// Angular labels of the 2ℓ+1 functions of a shell, in storage order.
pub fn shell_labels(l: usize) -> Vec<AngularLabel> {
    let mut v = vec![AngularLabel { l, m: 0, azimuth: Azimuth::Cos }];
    for m in 1..=l {
        v.push(AngularLabel { l, m, azimuth: Azimuth::Cos });
        v.push(AngularLabel { l, m, azimuth: Azimuth::Sin });
    }
    v
}

/// Cartesian exponents (i, j, k) with i + j + k = l in canonical order.
pub fn cartesian_powers(l: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::with_capacity((l + 1) * (l + 2) / 2);
    for i in (0..=l).rev() {
        for j in (0..=l - i).rev() {
            v.push([i, j, l - i - j]);
        }
    }
    v
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Expansion of r^ℓ Y_ℓm (real, unit-normalized on the sphere) in Cartesian
/// monomials: for each function in shell order, `(cartesian index, coefficient)`.
fn build_c2s(l: usize) -> Vec<Vec<(usize, f64)>> {
    let powers = cartesian_powers(l);
    let index = |p: [usize; 3]| powers.iter().position(|q| *q == p).unwrap();
    shell_labels(l)
        .into_iter()
        .map(|lab| {
            let m = lab.m;
            let norm = if m == 0 {
                ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
            } else {
                ((2 * l + 1) as f64 / (2.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt()
            };
            let mut coef = vec![0.0; powers.len()];
            // (x + iy)^m: real part from even j, imaginary part from odd j
            for j in 0..=m {
                let keep = match lab.azimuth {
                    Azimuth::Cos => j % 2 == 0,
                    Azimuth::Sin => j % 2 == 1,
                };
                if !keep {
                    continue;
                }
                let phase = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let cxy = binomial(m, j) * phase;
                for k in 0..=(l - m) / 2 {
                    let a = (if k % 2 == 0 { 1.0 } else { -1.0 }) * factorial(2 * l - 2 * k)
                        / (2f64.powi(l as i32) * factorial(k) * factorial(l - k) * factorial(l - 2 * k - m));
                    // r^{2k} = (x² + y² + z²)^k
                    for p in 0..=k {
                        for q in 0..=k - p {
                            let s = k - p - q;
                            let multi = factorial(k) / (factorial(p) * factorial(q) * factorial(s));
                            let pw = [m - j + 2 * p, j + 2 * q, l - 2 * k - m + 2 * s];
                            coef[index(pw)] += norm * cxy * a * multi;
                        }
                    }
                }
            }
            coef.into_iter()
                .enumerate()
                .filter(|(_, c)| *c != 0.0)
                .collect()
        })
        .collect()
}

/// Cartesian (index, coefficient) terms of one solid harmonic.
pub type C2sRow = Vec<(usize, f64)>;

/// Cached solid-harmonic transformation for ℓ ≤ f.
pub fn c2s(l: usize) -> &'static [Vec<(usize, f64)>] {
    static TABLE: OnceLock<Vec<Vec<C2sRow>>> = OnceLock::new();
    &TABLE.get_or_init(|| (0..=MAX_L).map(build_c2s).collect())[l]
}

/// Normalization of r^ℓ e^{-a r²} times a unit spherical harmonic.
pub fn radial_norm(l: usize, a: f64) -> f64 {
    let g = libm::tgamma(l as f64 + 1.5);
    (2.0 * (2.0 * a).powf(l as f64 + 1.5) / g).sqrt()
}

/// A contracted shell placed at a center.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub center: [f64; 3],
    /// Index of the atom carrying the shell.
    pub atom: usize,
    pub l: usize,
    pub exponents: Vec<f64>,
    /// Coefficients multiplying bare r^ℓ Y_ℓm e^{-a r²}, normalization included.
    pub coefficients: Vec<f64>,
}

impl Shell {
    /// Builds a normalized shell from coefficients over normalized primitives.
    pub fn new(center: [f64; 3], atom: usize, l: usize, primitives: &[(f64, f64)]) -> Result<Shell> {
        if l > MAX_L {
            return Err(Error::Invalid(format!("angular momentum {l} above f is not supported")));
        }
        if primitives.is_empty() || primitives.iter().any(|&(a, _)| !(a > 0.0)) {
            return Err(Error::Invalid("shell needs positive exponents".into()));
        }
        let lf = l as f64 + 1.5;
        let mut s = 0.0;
        for &(a, ca) in primitives {
            for &(b, cb) in primitives {
                s += ca * cb * (2.0 * (a * b).sqrt() / (a + b)).powf(lf);
            }
        }
        if !(s > 0.0) {
            return Err(Error::Invalid("contraction has zero norm".into()));
        }
        let scale = 1.0 / s.sqrt();
        Ok(Shell {
            center,
            atom,
            l,
            exponents: primitives.iter().map(|p| p.0).collect(),
            coefficients: primitives
                .iter()
                .map(|&(a, c)| c * scale * radial_norm(l, a))
                .collect(),
        })
    }

    pub fn from_radial(center: [f64; 3], atom: usize, rf: &RadialFunction) -> Result<Shell> {
        Shell::new(center, atom, rf.l, &rf.primitives)
    }

    pub fn n_functions(&self) -> usize {
        2 * self.l + 1
    }

    pub fn n_cartesian(&self) -> usize {
        (self.l + 1) * (self.l + 2) / 2
    }

    pub fn labels(&self) -> Vec<AngularLabel> {
        shell_labels(self.l)
    }

    pub fn min_exponent(&self) -> f64 {
        self.exponents.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Values of the 2ℓ+1 functions at a point, written into `out`.
    pub fn evaluate(&self, point: [f64; 3], out: &mut [f64]) {
        let d = [
            point[0] - self.center[0],
            point[1] - self.center[1],
            point[2] - self.center[2],
        ];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let radial: f64 = self
            .exponents
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * (-a * r2).exp())
            .sum();
        let powers = cartesian_powers(self.l);
        let cart: Vec<f64> = powers
            .iter()
            .map(|p| d[0].powi(p[0] as i32) * d[1].powi(p[1] as i32) * d[2].powi(p[2] as i32))
            .collect();
        for (f, terms) in c2s(self.l).iter().enumerate() {
            out[f] = radial * terms.iter().map(|&(i, c)| c * cart[i]).sum::<f64>();
        }
    }
}

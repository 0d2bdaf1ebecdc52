//! Physical constants and unit conversions. Internal units are atomic units
//! (Hartree, bohr, electron mass); cm⁻¹, Debye and amu appear only at I/O.

/// 1 Hartree in cm⁻¹.
pub const HARTREE_TO_CM1: f64 = 219474.6313632;

/// 1 atomic unit of electric dipole in Debye.
pub const AU_TO_DEBYE: f64 = 2.54158059;

/// 1 unified atomic mass unit in electron masses.
pub const AMU_TO_ME: f64 = 1822.888486209;

#[inline]
pub fn hartree_to_cm1(e: f64) -> f64 {
    e * HARTREE_TO_CM1
}

#[inline]
pub fn cm1_to_hartree(e: f64) -> f64 {
    e / HARTREE_TO_CM1
}

#[inline]
pub fn au_to_debye(d: f64) -> f64 {
    d * AU_TO_DEBYE
}

/// Fixed 12-significant-digit rendering used in every artifact.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0" leaking into byte comparisons
        return format!("{:.11e}", 0.0);
    }
    format!("{:.11e}", x)
}

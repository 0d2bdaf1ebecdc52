//! Boys function F_n(T) = ∫₀¹ t^{2n} e^{-T t²} dt.
//!
//! Tabulated on a 0.05 grid up to T = 50 with a seven-term Taylor step;
//! larger arguments use the asymptotic F_0 and upward recursion.

use std::sync::OnceLock;

/// Highest order needed: ERI up to (ff|ff) plus headroom for ℓ-shifted operators.
pub const MAX_ORDER: usize = 16;
const TAYLOR_TERMS: usize = 7;
const STEP: f64 = 0.05;
const T_MAX: f64 = 50.0;

struct Table {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cols = MAX_ORDER + TAYLOR_TERMS + 1;
        let rows = (T_MAX / STEP).round() as usize + 2;
        let mut values = vec![0.0; rows * cols];
        for i in 0..rows {
            let t = i as f64 * STEP;
            let row = reference_values(cols - 1, t);
            values[i * cols..(i + 1) * cols].copy_from_slice(&row);
        }
        Table { rows, cols, values }
    })
}

/// F_0..F_nmax at T from the convergent series for the top order and
/// downward recursion. Slow but accurate; used to build the table.
fn reference_values(nmax: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    let et = (-t).exp();
    // F_n(T) = e^{-T} Σ_i (2T)^i / ((2n+1)(2n+3)...(2n+2i+1))
    let mut term = 1.0 / (2 * nmax + 1) as f64;
    let mut sum = term;
    let mut i = 1;
    while term > 1e-17 * sum {
        term *= 2.0 * t / (2 * nmax + 2 * i + 1) as f64;
        sum += term;
        i += 1;
    }
    out[nmax] = et * sum;
    for n in (0..nmax).rev() {
        out[n] = (2.0 * t * out[n + 1] + et) / (2 * n + 1) as f64;
    }
    out
}

/// Fills `out[0..=nmax]` with F_0(T)..F_nmax(T).
pub fn boys(nmax: usize, t: f64, out: &mut [f64]) {
    debug_assert!(nmax <= MAX_ORDER);
    if t < T_MAX {
        let tab = table();
        let i = (t / STEP + 0.5) as usize;
        let dt = i as f64 * STEP - t;
        let row = &tab.values[i * tab.cols..(i + 1) * tab.cols];
        debug_assert!(i < tab.rows);
        for n in 0..=nmax {
            // F_n(T0 - dt) = Σ_k F_{n+k}(T0) dt^k / k!
            let mut acc = 0.0;
            let mut f = 1.0;
            for k in 0..TAYLOR_TERMS {
                acc += row[n + k] * f;
                f *= dt / (k + 1) as f64;
            }
            out[n] = acc;
        }
    } else {
        let et = (-t).exp();
        out[0] = 0.5 * (std::f64::consts::PI / t).sqrt();
        for n in 0..nmax {
            out[n + 1] = ((2 * n + 1) as f64 * out[n] - et) / (2.0 * t);
        }
    }
}

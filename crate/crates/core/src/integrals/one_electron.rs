//! Overlap, kinetic, multipole and point-charge integrals over shell pairs.

use super::hermite::{hermite_r, HermiteE, RScratch, CUBE};
use super::shell::{c2s, cartesian_powers, Shell};
use std::f64::consts::PI;

/// Blocks of one-electron integrals between the functions of two shells,
/// each of size `na × nb`, row-major.
#[derive(Debug, Clone, Default)]
pub struct OneElectronBlocks {
    pub overlap: Vec<f64>,
    pub kinetic: Vec<f64>,
    /// Electronic z relative to the origin.
    pub z: Vec<f64>,
    pub z2: Vec<f64>,
    pub r2: Vec<f64>,
}

fn binom(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Overlap, kinetic energy and the multipoles z, z², r² about `origin`.
pub fn one_electron_blocks(a: &Shell, b: &Shell, origin: [f64; 3]) -> OneElectronBlocks {
    let (la, lb) = (a.l, b.l);
    let pa = cartesian_powers(la);
    let pb = cartesian_powers(lb);
    let nca = pa.len();
    let ncb = pb.len();
    let mut cart = vec![[0.0f64; 5]; nca * ncb];
    for (&ea, &ca) in a.exponents.iter().zip(&a.coefficients) {
        for (&eb, &cb) in b.exponents.iter().zip(&b.coefficients) {
            let p = ea + eb;
            let root = (PI / p).sqrt();
            // 1D overlaps S[d][i][j] with j up to lb + 2
            let mut s1 = [[[0.0; 6]; 4]; 3];
            for d in 0..3 {
                let e = HermiteE::new(la, lb + 2, ea, eb, a.center[d], b.center[d]);
                for i in 0..=la {
                    for j in 0..=lb + 2 {
                        s1[d][i][j] = e.get(i, j, 0) * root;
                    }
                }
            }
            let kin = |d: usize, i: usize, j: usize| {
                let mut t = -2.0 * eb * eb * s1[d][i][j + 2] + eb * (2 * j + 1) as f64 * s1[d][i][j];
                if j >= 2 {
                    t -= 0.5 * (j * (j - 1)) as f64 * s1[d][i][j - 2];
                }
                t
            };
            // ⟨i| x_C^e |j⟩ with x_C = x_B + (B - C)
            let mom = |d: usize, i: usize, j: usize, e: usize| {
                let shift = b.center[d] - origin[d];
                (0..=e)
                    .map(|k| binom(e, k) * shift.powi((e - k) as i32) * s1[d][i][j + k])
                    .sum::<f64>()
            };
            let w = ca * cb;
            for (ia, &[ax, ay, az]) in pa.iter().enumerate() {
                for (ib, &[bx, by, bz]) in pb.iter().enumerate() {
                    let (sx, sy, sz) = (s1[0][ax][bx], s1[1][ay][by], s1[2][az][bz]);
                    let s = sx * sy * sz;
                    let t = kin(0, ax, bx) * sy * sz + sx * kin(1, ay, by) * sz + sx * sy * kin(2, az, bz);
                    let z1 = sx * sy * mom(2, az, bz, 1);
                    let z2 = sx * sy * mom(2, az, bz, 2);
                    let r2 = mom(0, ax, bx, 2) * sy * sz + sx * mom(1, ay, by, 2) * sz + z2;
                    let c = &mut cart[ia * ncb + ib];
                    c[0] += w * s;
                    c[1] += w * t;
                    c[2] += w * z1;
                    c[3] += w * z2;
                    c[4] += w * r2;
                }
            }
        }
    }
    let sph = transform(&cart, la, lb);
    OneElectronBlocks {
        overlap: sph.iter().map(|v| v[0]).collect(),
        kinetic: sph.iter().map(|v| v[1]).collect(),
        z: sph.iter().map(|v| v[2]).collect(),
        z2: sph.iter().map(|v| v[3]).collect(),
        r2: sph.iter().map(|v| v[4]).collect(),
    }
}

fn transform<const K: usize>(cart: &[[f64; K]], la: usize, lb: usize) -> Vec<[f64; K]> {
    let ta = c2s(la);
    let tb = c2s(lb);
    let ncb = (lb + 1) * (lb + 2) / 2;
    let mut out = vec![[0.0; K]; ta.len() * tb.len()];
    for (fa, terms_a) in ta.iter().enumerate() {
        for (fb, terms_b) in tb.iter().enumerate() {
            let o = &mut out[fa * tb.len() + fb];
            for &(ia, ca) in terms_a {
                for &(ib, cb) in terms_b {
                    let v = &cart[ia * ncb + ib];
                    for k in 0..K {
                        o[k] += ca * cb * v[k];
                    }
                }
            }
        }
    }
    out
}

/// Σ_c q_c ⟨a| 1/|r - C_c| |b⟩ for point charges `(position, q)`.
/// Attraction to a positive charge enters with the caller's sign.
pub fn coulomb_block(a: &Shell, b: &Shell, charges: &[([f64; 3], f64)], scratch: &mut RScratch) -> Vec<f64> {
    let pair = super::hermite::ShellPair::new(a, b);
    let mut r = vec![0.0; CUBE];
    let mut out = vec![0.0; pair.na * pair.nb];
    let order = pair.la + pair.lb;
    for prim in &pair.prims {
        let pref = 2.0 * PI / prim.p;
        for &(c, q) in charges {
            let pc = [0, 1, 2].map(|k| prim.center[k] - c[k]);
            hermite_r(order, prim.p, pc, scratch, &mut r);
            for (f, o) in out.iter_mut().enumerate() {
                let s: f64 = prim.entries[prim.start[f]..prim.start[f + 1]]
                    .iter()
                    .map(|&(slot, v)| v * r[prim.slots[slot]])
                    .sum();
                *o += pref * q * s;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_self_overlap() {
        for l in 0..=3 {
            let sh = Shell::new([0.1, -0.2, 0.3], 0, l, &[(1.3, 0.4), (0.2, 0.7)]).unwrap();
            let b = one_electron_blocks(&sh, &sh, [0.0; 3]);
            let n = sh.n_functions();
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((b.overlap[i * n + j] - expect).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn s_function_kinetic_and_parity() {
        let sh = Shell::new([0.0; 3], 0, 0, &[(1.0, 1.0)]).unwrap();
        let b = one_electron_blocks(&sh, &sh, [0.0; 3]);
        assert!((b.kinetic[0] - 1.5).abs() < 1e-14);
        assert!(b.z[0].abs() < 1e-15);
        assert!((b.r2[0] - 0.75).abs() < 1e-14);
        let mut scratch = RScratch::default();
        let v = coulomb_block(&sh, &sh, &[([0.0; 3], 1.0)], &mut scratch);
        assert!((v[0] - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-13);
    }
}

//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here uses the Hermite recursions or the Boys function: Gaussian
//! products are integrated with exact Gauss–Hermite rules and 1/r is
//! written as (2/√π)∫₀^∞ exp(-t² r²) dt with a trapezoid rule in u = ln t.
#![allow(dead_code, clippy::needless_range_loop, clippy::too_many_arguments)]

use alkdimer::integrals::hermite::{RScratch, ShellPair};
use alkdimer::integrals::{c2s, cartesian_powers, coulomb_block, eri_quartet, one_electron_blocks, EriScratch, Shell};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use nalgebra::DMatrix;

pub mod toy;

/// Gauss–Hermite nodes and weights for ∫ f(y) e^{-y²} dy (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    (pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

/// Nodes u and weights for ∫₀^∞ g(t) dt = Σ w g(e^u).
pub fn log_trapezoid() -> Vec<(f64, f64)> {
    let h = 0.05;
    (0..=920)
        .map(|k| {
            let t = (-32.0 + h * k as f64).exp();
            (t, h * t)
        })
        .collect()
}

/// ∫ x_A^i x_B^j x_C^k exp(-a x_A² - b x_B² - g x_C²) dx for all i ≤ li,
/// j ≤ lj, with fixed k; indexed [i][j].
fn gaussian_1d(li: usize, lj: usize, k: usize, a: f64, xa: f64, b: f64, xb: f64, g: f64, xc: f64, gh: &(Vec<f64>, Vec<f64>)) -> Vec<Vec<f64>> {
    let p = a + b + g;
    let xp = (a * xa + b * xb + g * xc) / p;
    let c = (a * b * (xa - xb).powi(2) + a * g * (xa - xc).powi(2) + b * g * (xb - xc).powi(2)) / p;
    let pref = (-c).exp() / p.sqrt();
    let mut out = vec![vec![0.0; lj + 1]; li + 1];
    for (y, w) in gh.0.iter().zip(&gh.1) {
        let x = xp + y / p.sqrt();
        let base = w * pref * (x - xc).powi(k as i32);
        for i in 0..=li {
            for j in 0..=lj {
                out[i][j] += base * (x - xa).powi(i as i32) * (x - xb).powi(j as i32);
            }
        }
    }
    out
}

fn to_spherical(cart: &[f64], la: usize, lb: usize) -> Vec<f64> {
    let nb = cartesian_powers(lb).len();
    let ta = c2s(la);
    let tb = c2s(lb);
    let mut out = vec![0.0; ta.len() * tb.len()];
    for (fa, a) in ta.iter().enumerate() {
        for (fb, b) in tb.iter().enumerate() {
            out[fa * tb.len() + fb] = a
                .iter()
                .flat_map(|&(i, ca)| b.iter().map(move |&(j, cb)| ca * cb * cart[i * nb + j]))
                .sum();
        }
    }
    out
}

fn prim(sh: &Shell) -> (f64, f64) {
    assert_eq!(sh.exponents.len(), 1, "oracle handles primitive shells");
    (sh.exponents[0], sh.coefficients[0])
}

/// Overlap, kinetic and z (about `origin`) blocks between primitive shells.
pub fn one_electron(a: &Shell, b: &Shell, origin: [f64; 3]) -> [Vec<f64>; 3] {
    let gh = gauss_hermite(16);
    let (ea, na) = prim(a);
    let (eb, nb) = prim(b);
    let (la, lb) = (a.l, b.l);
    // tables with j up to lb + 2 for the kinetic operator, and z moment
    let s: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|d| gaussian_1d(la, lb + 2, 0, ea, a.center[d], eb, b.center[d], 0.0, 0.0, &gh))
        .collect();
    let zm = gaussian_1d(la, lb, 1, ea, a.center[2], eb, b.center[2], 0.0, origin[2], &gh);
    let kin = |d: usize, i: usize, j: usize| {
        // -1/2 d²/dx² acting on x_B^j e^{-b x_B²}
        let mut v = -2.0 * eb * eb * s[d][i][j + 2] + eb * (2 * j + 1) as f64 * s[d][i][j];
        if j >= 2 {
            v -= 0.5 * (j * (j - 1)) as f64 * s[d][i][j - 2];
        }
        v
    };
    let pa = cartesian_powers(la);
    let pb = cartesian_powers(lb);
    let mut cs = vec![0.0; pa.len() * pb.len()];
    let mut ct = cs.clone();
    let mut cz = cs.clone();
    for (i, p) in pa.iter().enumerate() {
        for (j, q) in pb.iter().enumerate() {
            let sx = s[0][p[0]][q[0]];
            let sy = s[1][p[1]][q[1]];
            let sz = s[2][p[2]][q[2]];
            let k = i * pb.len() + j;
            cs[k] = na * nb * sx * sy * sz;
            ct[k] = na * nb * (kin(0, p[0], q[0]) * sy * sz + sx * kin(1, p[1], q[1]) * sz + sx * sy * kin(2, p[2], q[2]));
            cz[k] = na * nb * sx * sy * zm[p[2]][q[2]];
        }
    }
    [to_spherical(&cs, la, lb), to_spherical(&ct, la, lb), to_spherical(&cz, la, lb)]
}

/// ⟨a| 1/|r - C| |b⟩ between primitive shells.
pub fn nuclear(a: &Shell, b: &Shell, c: [f64; 3]) -> Vec<f64> {
    let gh = gauss_hermite(16);
    let (ea, na) = prim(a);
    let (eb, nb) = prim(b);
    let pa = cartesian_powers(a.l);
    let pb = cartesian_powers(b.l);
    let mut cart = vec![0.0; pa.len() * pb.len()];
    for (t, wt) in log_trapezoid() {
        let g = t * t;
        let tabs: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|d| gaussian_1d(a.l, b.l, 0, ea, a.center[d], eb, b.center[d], g, c[d], &gh))
            .collect();
        for (i, p) in pa.iter().enumerate() {
            for (j, q) in pb.iter().enumerate() {
                cart[i * pb.len() + j] += wt * tabs[0][p[0]][q[0]] * tabs[1][p[1]][q[1]] * tabs[2][p[2]][q[2]];
            }
        }
    }
    let f = 2.0 / std::f64::consts::PI.sqrt() * na * nb;
    cart.iter_mut().for_each(|v| *v *= f);
    to_spherical(&cart, a.l, b.l)
}

/// ∫∫ x1_A^i x1_B^j x2_C^k x2_D^l exp(-[a,b on x1; c,d on x2] - τ (x1-x2)²)
/// tabulated over i, j, k, l.
#[allow(clippy::too_many_arguments)]
fn coulomb_2d(l: [usize; 4], e: [f64; 4], x: [f64; 4], tau: f64, gh: &(Vec<f64>, Vec<f64>)) -> Vec<f64> {
    let m11 = e[0] + e[1] + tau;
    let m22 = e[2] + e[3] + tau;
    let m12 = -tau;
    let h = [e[0] * x[0] + e[1] * x[1], e[2] * x[2] + e[3] * x[3]];
    let det = (e[0] + e[1]) * (e[2] + e[3]) + tau * (e[0] + e[1] + e[2] + e[3]);
    let v0 = [(m22 * h[0] - m12 * h[1]) / det, (m11 * h[1] - m12 * h[0]) / det];
    let cst = e[0] * x[0] * x[0] + e[1] * x[1] * x[1] + e[2] * x[2] * x[2] + e[3] * x[3] * x[3] - (h[0] * v0[0] + h[1] * v0[1]);
    let m = nalgebra::Matrix2::new(m11, m12, m12, m22);
    let eig = m.symmetric_eigen();
    let u = eig.eigenvectors;
    // the small eigenvalue from the determinant avoids cancellation at large τ
    let (big, small) = if eig.eigenvalues[0] > eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let mut lam = eig.eigenvalues;
    lam[small] = det / lam[big];
    let jac = 1.0 / (lam[0] * lam[1]).sqrt();
    let pref = (-cst).exp() * jac;
    let dims = [l[0] + 1, l[1] + 1, l[2] + 1, l[3] + 1];
    let mut out = vec![0.0; dims.iter().product()];
    for (y1, w1) in gh.0.iter().zip(&gh.1) {
        for (y2, w2) in gh.0.iter().zip(&gh.1) {
            let z1 = y1 / lam[0].sqrt();
            let z2 = y2 / lam[1].sqrt();
            let x1 = v0[0] + u[(0, 0)] * z1 + u[(0, 1)] * z2;
            let x2 = v0[1] + u[(1, 0)] * z1 + u[(1, 1)] * z2;
            let w = w1 * w2 * pref;
            let mut idx = 0;
            for i in 0..dims[0] {
                let fi = (x1 - x[0]).powi(i as i32);
                for j in 0..dims[1] {
                    let fj = fi * (x1 - x[1]).powi(j as i32);
                    for k in 0..dims[2] {
                        let fk = fj * (x2 - x[2]).powi(k as i32);
                        for ll in 0..dims[3] {
                            out[idx] += w * fk * (x2 - x[3]).powi(ll as i32);
                            idx += 1;
                        }
                    }
                }
            }
        }
    }
    out
}

/// (ab|cd) between primitive shells, indexed like the library output.
pub fn eri(a: &Shell, b: &Shell, c: &Shell, d: &Shell) -> Vec<f64> {
    let gh = gauss_hermite(8);
    let sh = [a, b, c, d];
    let pr: Vec<(f64, f64)> = sh.iter().map(|s| prim(s)).collect();
    let ls = [a.l, b.l, c.l, d.l];
    let dims = [ls[0] + 1, ls[1] + 1, ls[2] + 1, ls[3] + 1];
    let flat = |i: usize, j: usize, k: usize, l: usize| ((i * dims[1] + j) * dims[2] + k) * dims[3] + l;
    let pw: Vec<Vec<[usize; 3]>> = ls.iter().map(|&l| cartesian_powers(l)).collect();
    let nc: Vec<usize> = pw.iter().map(|p| p.len()).collect();
    let mut cart = vec![0.0; nc.iter().product()];
    let e = [pr[0].0, pr[1].0, pr[2].0, pr[3].0];
    for (t, wt) in log_trapezoid() {
        let tabs: Vec<Vec<f64>> = (0..3)
            .map(|dd| {
                let x = [a.center[dd], b.center[dd], c.center[dd], d.center[dd]];
                coulomb_2d(ls, e, x, t * t, &gh)
            })
            .collect();
        let mut idx = 0;
        for p in &pw[0] {
            for q in &pw[1] {
                for r in &pw[2] {
                    for s in &pw[3] {
                        let mut v = wt;
                        for dd in 0..3 {
                            v *= tabs[dd][flat(p[dd], q[dd], r[dd], s[dd])];
                        }
                        cart[idx] += v;
                        idx += 1;
                    }
                }
            }
        }
    }
    let norm = 2.0 / std::f64::consts::PI.sqrt() * pr.iter().map(|p| p.1).product::<f64>();
    // spherical transform index by index
    let t: Vec<&[Vec<(usize, f64)>]> = ls.iter().map(|&l| c2s(l)).collect();
    let ns: Vec<usize> = t.iter().map(|x| x.len()).collect();
    let mut out = vec![0.0; ns.iter().product()];
    for fa in 0..ns[0] {
        for fb in 0..ns[1] {
            for fc in 0..ns[2] {
                for fd in 0..ns[3] {
                    let mut acc = 0.0;
                    for &(i, ci) in &t[0][fa] {
                        for &(j, cj) in &t[1][fb] {
                            for &(k, ck) in &t[2][fc] {
                                for &(l, cl) in &t[3][fd] {
                                    acc += ci * cj * ck * cl * cart[((i * nc[1] + j) * nc[2] + k) * nc[3] + l];
                                }
                            }
                        }
                    }
                    out[((fa * ns[1] + fb) * ns[2] + fc) * ns[3] + fd] = acc * norm;
                }
            }
        }
    }
    out
}

/// Largest deviation relative to max(|oracle|, floor · block maximum).
pub fn worst_relative(lib: &[f64], oracle: &[f64], floor: f64) -> f64 {
    let scale = oracle.iter().map(|v| v.abs()).fold(0.0, f64::max);
    lib.iter()
        .zip(oracle)
        .map(|(x, y)| (x - y).abs() / y.abs().max(floor * scale).max(1e-300))
        .fold(0.0, f64::max)
}

fn random_shell(rng: &mut ChaCha8Rng, atom: usize) -> Shell {
    let l = rng.random_range(0..4);
    let a = rng.random_range(0.05..3.0);
    let c = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), rng.random_range(-2.0..2.0)];
    Shell::new(c, atom, l, &[(a, 1.0)]).unwrap()
}

/// Worst deviation over `n` random primitive pairs up to f for overlap,
/// kinetic, z and nuclear attraction.
pub fn check_one_electron(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = RScratch::default();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let a = random_shell(&mut rng, 0);
        let b = random_shell(&mut rng, 1);
        let origin = [0.0, 0.0, rng.random_range(-1.0..1.0)];
        let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let lib = one_electron_blocks(&a, &b, origin);
        let [s, t, z] = one_electron(&a, &b, origin);
        let v = nuclear(&a, &b, c);
        let lv = coulomb_block(&a, &b, &[(c, 1.0)], &mut scratch);
        for (x, y) in [(&lib.overlap, &s), (&lib.kinetic, &t), (&lib.z, &z), (&lv, &v)] {
            worst = worst.max(worst_relative(x, y, 1e-4));
        }
    }
    worst
}

/// Worst deviation over `n` random primitive ERI quartets up to f.
pub fn check_eri(n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = EriScratch::default();
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let sh: Vec<Shell> = (0..4).map(|i| random_shell(&mut rng, i % 2)).collect();
        let bra = ShellPair::new(&sh[0], &sh[1]);
        let ket = ShellPair::new(&sh[2], &sh[3]);
        eri_quartet(&bra, &ket, &mut scratch, &mut out);
        let o = eri(&sh[0], &sh[1], &sh[2], &sh[3]);
        worst = worst.max(worst_relative(&out, &o, 1e-4));
    }
    worst
}


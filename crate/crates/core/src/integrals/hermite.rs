//! Hermite-Gaussian expansion machinery: E coefficients of Gaussian
//! products, Coulomb R integrals, and sparse Hermite representations of
//! solid-harmonic shell pairs.

use super::boys::boys;
use super::shell::{c2s, cartesian_powers, Shell};

/// Stride of the Hermite index cube; supports total order up to 12.
pub const STRIDE: usize = 13;
pub const CUBE: usize = STRIDE * STRIDE * STRIDE;

#[inline]
pub fn herm_offset(t: usize, u: usize, v: usize) -> usize {
    (t * STRIDE + u) * STRIDE + v
}

/// One-dimensional E^{ij}_t coefficients for the product of
/// x_A^i e^{-a x_A²} and x_B^j e^{-b x_B²}.
#[derive(Debug, Clone)]
pub struct HermiteE {
    lb: usize,
    nt: usize,
    data: Vec<f64>,
}

impl HermiteE {
    pub fn new(la: usize, lb: usize, a: f64, b: f64, xa: f64, xb: f64) -> HermiteE {
        let p = a + b;
        let xab = xa - xb;
        let xpa = -b * xab / p;
        let xpb = a * xab / p;
        let nt = la + lb + 1;
        let mut e = HermiteE {
            lb,
            nt,
            data: vec![0.0; (la + 1) * (lb + 1) * nt],
        };
        let idx = |i: usize, j: usize, t: usize| (i * (lb + 1) + j) * nt + t;
        e.data[0] = (-a * b / p * xab * xab).exp();
        let half = 0.5 / p;
        for i in 0..=la {
            if i > 0 {
                for t in 0..=i {
                    let mut v = xpa * e.data[idx(i - 1, 0, t)];
                    if t > 0 {
                        v += half * e.data[idx(i - 1, 0, t - 1)];
                    }
                    if t + 1 < i {
                        v += (t + 1) as f64 * e.data[idx(i - 1, 0, t + 1)];
                    }
                    e.data[idx(i, 0, t)] = v;
                }
            }
            for j in 1..=lb {
                for t in 0..=i + j {
                    let mut v = 0.0;
                    if t < i + j {
                        v += xpb * e.data[idx(i, j - 1, t)];
                    }
                    if t > 0 {
                        v += half * e.data[idx(i, j - 1, t - 1)];
                    }
                    if t + 1 < i + j {
                        v += (t + 1) as f64 * e.data[idx(i, j - 1, t + 1)];
                    }
                    e.data[idx(i, j, t)] = v;
                }
            }
        }
        e
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        if t > i + j {
            return 0.0;
        }
        self.data[(i * (self.lb + 1) + j) * self.nt + t]
    }
}

/// Scratch space for the R recursion.
#[derive(Debug, Clone)]
pub struct RScratch {
    prev: Vec<f64>,
    cur: Vec<f64>,
    boys: Vec<f64>,
}

impl Default for RScratch {
    fn default() -> Self {
        RScratch {
            prev: vec![0.0; CUBE],
            cur: vec![0.0; CUBE],
            boys: vec![0.0; super::boys::MAX_ORDER + 1],
        }
    }
}

/// R^0_{tuv}(α, PC) for t+u+v ≤ `order`, written into `out` on the
/// STRIDE cube (other entries are left untouched).
pub fn hermite_r(order: usize, alpha: f64, pc: [f64; 3], scratch: &mut RScratch, out: &mut [f64]) {
    let t2 = alpha * (pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]);
    boys(order, t2, &mut scratch.boys);
    let RScratch { prev, cur, boys } = scratch;
    let m2a = -2.0 * alpha;
    for n in (0..=order).rev() {
        let top = order - n;
        cur[0] = m2a.powi(n as i32) * boys[n];
        for s in 1..=top {
            for t in 0..=s {
                for u in 0..=s - t {
                    let v = s - t - u;
                    let val = if t > 0 {
                        let mut r = pc[0] * prev[herm_offset(t - 1, u, v)];
                        if t > 1 {
                            r += (t - 1) as f64 * prev[herm_offset(t - 2, u, v)];
                        }
                        r
                    } else if u > 0 {
                        let mut r = pc[1] * prev[herm_offset(t, u - 1, v)];
                        if u > 1 {
                            r += (u - 1) as f64 * prev[herm_offset(t, u - 2, v)];
                        }
                        r
                    } else {
                        let mut r = pc[2] * prev[herm_offset(t, u, v - 1)];
                        if v > 1 {
                            r += (v - 1) as f64 * prev[herm_offset(t, u, v - 2)];
                        }
                        r
                    };
                    cur[herm_offset(t, u, v)] = val;
                }
            }
        }
        if n > 0 {
            std::mem::swap(prev, cur);
        }
    }
    for s in 0..=order {
        for t in 0..=s {
            for u in 0..=s - t {
                let o = herm_offset(t, u, s - t - u);
                out[o] = cur[o];
            }
        }
    }
}

/// Sparse Hermite expansion of one primitive pair over all solid-harmonic
/// function pairs of two shells.
#[derive(Debug, Clone)]
pub struct PrimPair {
    pub p: f64,
    pub center: [f64; 3],
    /// Hermite cube offsets used by any function pair.
    pub slots: Vec<usize>,
    /// (−1)^{t+u+v} for each slot.
    pub parity: Vec<f64>,
    /// CSR layout: entries of function pair f live in `start[f]..start[f+1]`.
    pub start: Vec<usize>,
    pub entries: Vec<(usize, f64)>,
    pub max_abs: f64,
}

/// All primitive pairs of a shell pair; function pairs are ordered
/// `fa * nb + fb`.
#[derive(Debug, Clone)]
pub struct ShellPair {
    pub la: usize,
    pub lb: usize,
    pub na: usize,
    pub nb: usize,
    pub prims: Vec<PrimPair>,
}

impl ShellPair {
    pub fn new(a: &Shell, b: &Shell) -> ShellPair {
        let (la, lb) = (a.l, b.l);
        let pa = cartesian_powers(la);
        let pb = cartesian_powers(lb);
        let ta = c2s(la);
        let tb = c2s(lb);
        let na = ta.len();
        let nb = tb.len();
        let ltot = la + lb;
        let mut prims = Vec::new();
        for (&ea, &ca) in a.exponents.iter().zip(&a.coefficients) {
            for (&eb, &cb) in b.exponents.iter().zip(&b.coefficients) {
                let p = ea + eb;
                let center = [0, 1, 2].map(|k| (ea * a.center[k] + eb * b.center[k]) / p);
                let ex = HermiteE::new(la, lb, ea, eb, a.center[0], b.center[0]);
                let ey = HermiteE::new(la, lb, ea, eb, a.center[1], b.center[1]);
                let ez = HermiteE::new(la, lb, ea, eb, a.center[2], b.center[2]);
                // dense accumulation per function pair over the Hermite cube
                let mut dense = vec![0.0; na * nb * CUBE];
                let mut used = vec![false; CUBE];
                for (fa, terms_a) in ta.iter().enumerate() {
                    for (fb, terms_b) in tb.iter().enumerate() {
                        let base = (fa * nb + fb) * CUBE;
                        for &(ia, cfa) in terms_a {
                            let [ax, ay, az] = pa[ia];
                            for &(ib, cfb) in terms_b {
                                let [bx, by, bz] = pb[ib];
                                let w = ca * cb * cfa * cfb;
                                for t in 0..=ax + bx {
                                    let vx = ex.get(ax, bx, t);
                                    if vx == 0.0 {
                                        continue;
                                    }
                                    for u in 0..=ay + by {
                                        let vy = ey.get(ay, by, u);
                                        if vy == 0.0 {
                                            continue;
                                        }
                                        for v in 0..=az + bz {
                                            let vz = ez.get(az, bz, v);
                                            if vz == 0.0 {
                                                continue;
                                            }
                                            let o = herm_offset(t, u, v);
                                            dense[base + o] += w * vx * vy * vz;
                                            used[o] = true;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                let mut slots = Vec::new();
                let mut slot_of = vec![usize::MAX; CUBE];
                for s in 0..=ltot {
                    for t in 0..=s {
                        for u in 0..=s - t {
                            let o = herm_offset(t, u, s - t - u);
                            if used[o] {
                                slot_of[o] = slots.len();
                                slots.push(o);
                            }
                        }
                    }
                }
                let parity = slots
                    .iter()
                    .map(|&o| {
                        let (t, u, v) = (o / (STRIDE * STRIDE), (o / STRIDE) % STRIDE, o % STRIDE);
                        if (t + u + v) % 2 == 0 { 1.0 } else { -1.0 }
                    })
                    .collect();
                let mut start = Vec::with_capacity(na * nb + 1);
                let mut entries = Vec::new();
                let mut max_abs = 0.0f64;
                for f in 0..na * nb {
                    start.push(entries.len());
                    for &o in &slots {
                        let v = dense[f * CUBE + o];
                        // exact cancellations from the solid-harmonic transform
                        // leave round-off sized residues; drop them
                        if v.abs() > 1e-300 {
                            entries.push((slot_of[o], v));
                            max_abs = max_abs.max(v.abs());
                        }
                    }
                }
                start.push(entries.len());
                prims.push(PrimPair {
                    p,
                    center,
                    slots,
                    parity,
                    start,
                    entries,
                    max_abs,
                });
            }
        }
        ShellPair { la, lb, na, nb, prims }
    }
}

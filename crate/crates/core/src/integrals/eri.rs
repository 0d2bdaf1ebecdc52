//! Electron-repulsion integrals over solid-harmonic shells and their
//! symmetry-blocked storage.
//!
//! With both centers on the z axis every function has a sharp |m| and
//! azimuthal type, so (ab|cd) vanishes unless the products ab and cd share
//! an axial component. Storage keeps one value per permutation class
//! (8-fold symmetry) for the allowed class-pair blocks only.

use super::hermite::{hermite_r, RScratch, ShellPair, CUBE};
use super::shell::{class_m, Shell, N_CLASSES};
use std::f64::consts::PI;

const N_CP: usize = N_CLASSES * (N_CLASSES + 1) / 2;

#[inline]
fn cp_index(x: usize, y: usize) -> usize {
    debug_assert!(x >= y);
    x * (x + 1) / 2 + y
}

fn is_cos(class: usize) -> bool {
    class == 0 || class % 2 == 1
}

/// Axial components (M, cos?) carried by the product of two classes.
fn components(x: usize, y: usize) -> Vec<(usize, bool)> {
    let (mx, my) = (class_m(x), class_m(y));
    let cos = is_cos(x) == is_cos(y);
    let mut v = vec![(mx.abs_diff(my), cos), (mx + my, cos)];
    v.retain(|&(m, c)| m > 0 || c);
    v.dedup();
    v
}

/// True when an axially symmetric two-body operator can couple the class
/// pairs (x, y) and (z, w).
pub fn pair_classes_couple(x: usize, y: usize, z: usize, w: usize) -> bool {
    let a = components(x, y);
    components(z, w).iter().any(|c| a.contains(c))
}

/// Symmetry-blocked two-electron integrals in chemists' notation.
#[derive(Debug, Clone)]
pub struct TwoElectronTensor {
    n: usize,
    class_of: Vec<usize>,
    local: Vec<usize>,
    class_n: [usize; N_CLASSES],
    /// Global function indices of each pair, per class pair.
    pairs: Vec<Vec<(usize, usize)>>,
    block_offset: Vec<Option<usize>>,
    data: Vec<f64>,
}

impl TwoElectronTensor {
    /// Empty tensor for functions with the given symmetry classes.
    pub fn new(class_of: Vec<usize>) -> TwoElectronTensor {
        let n = class_of.len();
        let mut class_n = [0; N_CLASSES];
        let mut local = vec![0; n];
        for (i, &c) in class_of.iter().enumerate() {
            local[i] = class_n[c];
            class_n[c] += 1;
        }
        let mut members = vec![Vec::new(); N_CLASSES];
        for (i, &c) in class_of.iter().enumerate() {
            members[c].push(i);
        }
        let mut pairs = vec![Vec::new(); N_CP];
        for x in 0..N_CLASSES {
            for y in 0..=x {
                let p = &mut pairs[cp_index(x, y)];
                for (li, &i) in members[x].iter().enumerate() {
                    let upper = if x == y { li + 1 } else { members[y].len() };
                    for &j in &members[y][..upper] {
                        p.push((i, j));
                    }
                }
            }
        }
        let mut block_offset = vec![None; N_CP * N_CP];
        let mut size = 0;
        let mut cp_classes = vec![(0, 0); N_CP];
        for x in 0..N_CLASSES {
            for y in 0..=x {
                cp_classes[cp_index(x, y)] = (x, y);
            }
        }
        for c1 in 0..N_CP {
            for c2 in 0..=c1 {
                let (x, y) = cp_classes[c1];
                let (z, w) = cp_classes[c2];
                if pairs[c1].is_empty() || pairs[c2].is_empty() || !pair_classes_couple(x, y, z, w) {
                    continue;
                }
                block_offset[c1 * N_CP + c2] = Some(size);
                let (n1, n2) = (pairs[c1].len(), pairs[c2].len());
                size += if c1 == c2 { n1 * (n1 + 1) / 2 } else { n1 * n2 };
            }
        }
        TwoElectronTensor {
            n,
            class_of,
            local,
            class_n,
            pairs,
            block_offset,
            data: vec![0.0; size],
        }
    }

    pub fn n_functions(&self) -> usize {
        self.n
    }

    /// Number of stored values.
    pub fn stored_len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    fn pair(&self, i: usize, j: usize) -> (usize, usize) {
        let (x, y) = (self.class_of[i], self.class_of[j]);
        let (li, lj) = (self.local[i], self.local[j]);
        if x > y {
            (cp_index(x, y), li * self.class_n[y] + lj)
        } else if y > x {
            (cp_index(y, x), lj * self.class_n[x] + li)
        } else if li >= lj {
            (cp_index(x, x), li * (li + 1) / 2 + lj)
        } else {
            (cp_index(x, x), lj * (lj + 1) / 2 + li)
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize, k: usize, l: usize) -> Option<usize> {
        let mut a = self.pair(i, j);
        let mut b = self.pair(k, l);
        if a < b {
            std::mem::swap(&mut a, &mut b);
        }
        let off = self.block_offset[a.0 * N_CP + b.0]?;
        Some(if a.0 == b.0 {
            off + a.1 * (a.1 + 1) / 2 + b.1
        } else {
            off + a.1 * self.pairs[b.0].len() + b.1
        })
    }

    /// (ij|kl); identical for all eight index permutations.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.slot(i, j, k, l).map_or(0.0, |s| self.data[s])
    }

    /// Whether (ij|kl) has storage (is not forced to zero by symmetry).
    pub fn is_allowed(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        self.slot(i, j, k, l).is_some()
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) -> bool {
        match self.slot(i, j, k, l) {
            Some(s) => {
                self.data[s] = v;
                true
            }
            None => false,
        }
    }

    /// Visits every stored value once as `(i, j, k, l, value)`.
    pub fn for_each_unique(&self, mut f: impl FnMut(usize, usize, usize, usize, f64)) {
        for c1 in 0..N_CP {
            for c2 in 0..=c1 {
                let Some(off) = self.block_offset[c1 * N_CP + c2] else {
                    continue;
                };
                let (p1, p2) = (&self.pairs[c1], &self.pairs[c2]);
                let mut s = off;
                for (a, &(i, j)) in p1.iter().enumerate() {
                    let upper = if c1 == c2 { a + 1 } else { p2.len() };
                    for &(k, l) in &p2[..upper] {
                        f(i, j, k, l, self.data[s]);
                        s += 1;
                    }
                }
            }
        }
    }

    /// Adds Σ_t w_t A_t[ij] A_t[kl] for symmetric one-electron matrices
    /// (row-major n×n), on the stored blocks.
    pub fn add_separable(&mut self, terms: &[(f64, &[f64])]) {
        let n = self.n;
        for c1 in 0..N_CP {
            for c2 in 0..=c1 {
                let Some(off) = self.block_offset[c1 * N_CP + c2] else {
                    continue;
                };
                let mut s = off;
                for a in 0..self.pairs[c1].len() {
                    let (i, j) = self.pairs[c1][a];
                    let upper = if c1 == c2 { a + 1 } else { self.pairs[c2].len() };
                    for b in 0..upper {
                        let (k, l) = self.pairs[c2][b];
                        let mut add = 0.0;
                        for &(w, m) in terms {
                            add += w * m[i * n + j] * m[k * n + l];
                        }
                        self.data[s] += add;
                        s += 1;
                    }
                }
            }
        }
    }

    /// Coulomb and exchange matrices J_ab = Σ (ab|cd) D_cd and
    /// K_ab = Σ (ac|bd) D_cd for a symmetric density (row-major).
    pub fn coulomb_exchange(&self, d: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut j = vec![0.0; n * n];
        let mut k = vec![0.0; n * n];
        self.for_each_unique(|a, b, c, e, v| {
            let mut v = v;
            if a == b {
                v *= 0.5;
            }
            if c == e {
                v *= 0.5;
            }
            if (a == c && b == e) || (a == e && b == c) {
                v *= 0.5;
            }
            j[a * n + b] += 2.0 * d[c * n + e] * v;
            j[c * n + e] += 2.0 * d[a * n + b] * v;
            k[a * n + c] += d[b * n + e] * v;
            k[b * n + e] += d[a * n + c] * v;
            k[a * n + e] += d[b * n + c] * v;
            k[b * n + c] += d[a * n + e] * v;
        });
        for x in 0..n {
            for y in 0..x {
                let s = j[x * n + y] + j[y * n + x];
                j[x * n + y] = s;
                j[y * n + x] = s;
                let s = k[x * n + y] + k[y * n + x];
                k[x * n + y] = s;
                k[y * n + x] = s;
            }
            j[x * n + x] *= 2.0;
            k[x * n + x] *= 2.0;
        }
        (j, k)
    }
}

/// Scratch buffers for quartet evaluation.
#[derive(Debug, Clone)]
pub struct EriScratch {
    r: Vec<f64>,
    rs: RScratch,
    w: Vec<f64>,
}

impl Default for EriScratch {
    fn default() -> Self {
        EriScratch {
            r: vec![0.0; CUBE],
            rs: RScratch::default(),
            w: Vec::new(),
        }
    }
}

/// (ab|cd) for all functions of a shell quartet; `out[(fa*nb+fb)*nket + fc*nd+fd]`.
pub fn eri_quartet(bra: &ShellPair, ket: &ShellPair, scratch: &mut EriScratch, out: &mut Vec<f64>) {
    let nbra = bra.na * bra.nb;
    let nket = ket.na * ket.nb;
    out.clear();
    out.resize(nbra * nket, 0.0);
    let order = bra.la + bra.lb + ket.la + ket.lb;
    let EriScratch { r, rs, w } = scratch;
    for pb in &bra.prims {
        for pk in &ket.prims {
            let (p, q) = (pb.p, pk.p);
            let pref = 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt());
            if pref * pb.max_abs * pk.max_abs < 1e-18 {
                continue;
            }
            let alpha = p * q / (p + q);
            let pq = [0, 1, 2].map(|k| pb.center[k] - pk.center[k]);
            hermite_r(order, alpha, pq, rs, r);
            let ns = pb.slots.len();
            w.clear();
            w.resize(nket * ns, 0.0);
            for f in 0..nket {
                let ents = &pk.entries[pk.start[f]..pk.start[f + 1]];
                if ents.is_empty() {
                    continue;
                }
                let row = &mut w[f * ns..(f + 1) * ns];
                for &(s2, v) in ents {
                    let v = v * pk.parity[s2];
                    let o2 = pk.slots[s2];
                    for (acc, &o1) in row.iter_mut().zip(&pb.slots) {
                        *acc += v * r[o1 + o2];
                    }
                }
            }
            for fb in 0..nbra {
                let ents = &pb.entries[pb.start[fb]..pb.start[fb + 1]];
                if ents.is_empty() {
                    continue;
                }
                let orow = &mut out[fb * nket..(fb + 1) * nket];
                for (fk, o) in orow.iter_mut().enumerate() {
                    let row = &w[fk * ns..(fk + 1) * ns];
                    let mut acc = 0.0;
                    for &(s, v) in ents {
                        acc += v * row[s];
                    }
                    *o += pref * acc;
                }
            }
        }
    }
}

/// Location of a shell's functions in the global ordering.
#[derive(Debug, Clone)]
pub struct ShellMap {
    pub shell: Shell,
    /// Global function index of each component.
    pub index: Vec<usize>,
}

/// Computes all symmetry-allowed integrals with Cauchy–Schwarz screening.
pub fn compute_eri(shells: &[ShellMap], class_of: Vec<usize>, screen: f64) -> TwoElectronTensor {
    let mut tensor = TwoElectronTensor::new(class_of);
    let ns = shells.len();
    let mut pairs = Vec::with_capacity(ns * (ns + 1) / 2);
    for a in 0..ns {
        for b in 0..=a {
            pairs.push((a, b, ShellPair::new(&shells[a].shell, &shells[b].shell)));
        }
    }
    let mut scratch = EriScratch::default();
    let mut buf = Vec::new();
    let bounds: Vec<f64> = pairs
        .iter()
        .map(|(_, _, sp)| {
            eri_quartet(sp, sp, &mut scratch, &mut buf);
            let n = sp.na * sp.nb;
            (0..n).map(|f| buf[f * n + f].abs()).fold(0.0, f64::max).sqrt()
        })
        .collect();
    for (ab, (a, b, bra)) in pairs.iter().enumerate() {
        for (cd, (c, d, ket)) in pairs.iter().enumerate().take(ab + 1) {
            if bounds[ab] * bounds[cd] < screen {
                continue;
            }
            let (ia, ib, ic, id) = (&shells[*a].index, &shells[*b].index, &shells[*c].index, &shells[*d].index);
            // skip quartets with no symmetry-allowed element
            let any = ia.iter().any(|&i| {
                ib.iter()
                    .any(|&j| ic.iter().any(|&k| id.iter().any(|&l| tensor.is_allowed(i, j, k, l))))
            });
            if !any {
                continue;
            }
            eri_quartet(bra, ket, &mut scratch, &mut buf);
            let nket = ket.na * ket.nb;
            for (fa, &i) in ia.iter().enumerate() {
                for (fb, &j) in ib.iter().enumerate() {
                    let row = (fa * bra.nb + fb) * nket;
                    for (fc, &k) in ic.iter().enumerate() {
                        for (fd, &l) in id.iter().enumerate() {
                            tensor.set(i, j, k, l, buf[row + fc * ket.nb + fd]);
                        }
                    }
                }
            }
        }
    }
    tensor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_rules() {
        // σσ couples to πcπc (M=0 component) but not to πcπs (M=0 sine vanishes, M=2 sine)
        assert!(pair_classes_couple(0, 0, 1, 1));
        assert!(!pair_classes_couple(0, 0, 2, 1));
        assert!(pair_classes_couple(2, 1, 4, 0));
        assert!(pair_classes_couple(2, 1, 3, 2) == pair_classes_couple(3, 2, 2, 1));
    }

    #[test]
    fn same_center_ssss() {
        let s = Shell::new([0.0; 3], 0, 0, &[(1.0, 1.0)]).unwrap();
        let sp = ShellPair::new(&s, &s);
        let mut scratch = EriScratch::default();
        let mut out = Vec::new();
        eri_quartet(&sp, &sp, &mut scratch, &mut out);
        // (ss|ss) for unit exponents: 2 sqrt(2/π) / sqrt(2)... = sqrt(2)·(2/sqrt(π))·(1/2)^{1/2}
        let expect = 2.0 / PI.sqrt();
        assert!((out[0] - expect).abs() < 1e-13, "{}", out[0]);
    }
}

//! Quadrature for operators that are local or semi-local about one core:
//! the ECP and the ℓ-projected core-polarization field.
//!
//! Both centers lie on the z axis and every function has a sharp azimuthal
//! dependence cos(mφ) or sin(mφ), so the φ integral is done exactly and
//! only a 2-D (r, cosθ) product grid about the core is needed. Radial
//! panels break at the cutoff radii and around the other center; angular
//! panels are graded toward the poles, where functions on the other center
//! peak. Grids are doubled until the matrices stop changing.

use super::ecp::EcpSpec;
use super::shell::{c2s, cartesian_powers, class_m, Azimuth};
use super::MolecularBasis;
use crate::quadrature::gauss_legendre_on;
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Grid refinement policy.
#[derive(Debug, Clone)]
pub struct QuadratureOptions {
    /// Largest element change accepted between successive grids.
    pub tolerance: f64,
    pub start_level: usize,
    pub max_level: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            tolerance: 1e-8,
            start_level: 0,
            max_level: 4,
        }
    }
}

/// Core polarization parameters of one core.
#[derive(Debug, Clone)]
pub struct CppParams {
    pub alpha: f64,
    /// Cutoff radii for s, p, d; the last entry also serves every ℓ ≥ 3.
    pub rho: [f64; 4],
    /// z component of the field of the other core at this one.
    pub other_field_z: f64,
}

#[derive(Debug, Clone)]
pub struct CenterIntegrals {
    pub ecp: DMatrix<f64>,
    pub cpp: DMatrix<f64>,
    /// Cut field operators (x, y, z) of this core, when requested.
    pub field: Option<[DMatrix<f64>; 3]>,
    /// Refinement level that met the tolerance.
    pub level: usize,
}

/// ∫₀^{2π} t_a(m_a φ) Φ(φ) t_b(m_b φ) dφ with Φ = 1, cos φ or sin φ.
fn azimuthal(ta: Azimuth, ma: usize, phi: usize, tb: Azimuth, mb: usize) -> f64 {
    let n = 64;
    let f = |t: Azimuth, m: usize, x: f64| match t {
        Azimuth::Cos => (m as f64 * x).cos(),
        Azimuth::Sin => (m as f64 * x).sin(),
    };
    let h = 2.0 * PI / n as f64;
    let s: f64 = (0..n)
        .map(|k| {
            let x = k as f64 * h;
            let w = match phi {
                0 => 1.0,
                1 => x.cos(),
                _ => x.sin(),
            };
            f(ta, ma, x) * w * f(tb, mb, x)
        })
        .sum();
    let v = s * h;
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

fn c_m(m: usize) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Normalization of P_ℓ^m(x) t(mφ) on the unit sphere.
fn ylm_norm(l: usize, m: usize) -> f64 {
    1.0 / (c_m(m) * 2.0 * factorial(l + m) / ((2 * l + 1) as f64 * factorial(l - m))).sqrt()
}

/// Associated Legendre P_ℓ^m(x) without the Condon–Shortley phase, ℓ ≤ 3.
fn assoc_legendre(x: f64) -> [[f64; 4]; 4] {
    let mut p = [[0.0; 4]; 4];
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    for m in 0..4 {
        if m > 0 {
            pmm *= (2 * m - 1) as f64 * s;
        }
        p[m][m] = pmm;
        if m + 1 < 4 {
            p[m + 1][m] = x * (2 * m + 1) as f64 * pmm;
        }
        for l in m + 2..4 {
            p[l][m] = ((2 * l - 1) as f64 * x * p[l - 1][m] - (l + m - 1) as f64 * p[l - 2][m]) / (l - m) as f64;
        }
    }
    p
}

/// Evaluates the cosine-type (and σ) functions of every shell on the
/// half plane y = 0.
struct PlaneEvaluator {
    /// Per shell: (center z, exponents, coefficients, per-component terms (i, k, coef), global index of component)
    shells: Vec<PlaneShell>,
}

/// Global function index and its (i, k, coef) terms.
type PlaneComponent = (usize, Vec<(i32, i32, f64)>);

struct PlaneShell {
    cx: f64,
    cz: f64,
    exps: Vec<f64>,
    coefs: Vec<f64>,
    comps: Vec<PlaneComponent>,
    min_exp: f64,
}

impl PlaneEvaluator {
    fn new(basis: &MolecularBasis, rep_slot: &[Option<usize>]) -> PlaneEvaluator {
        let shells = basis
            .shells
            .iter()
            .map(|sm| {
                let sh = &sm.shell;
                let powers = cartesian_powers(sh.l);
                let comps = sm
                    .index
                    .iter()
                    .enumerate()
                    .filter_map(|(comp, &g)| {
                        let slot = rep_slot[g]?;
                        let terms = c2s(sh.l)[comp]
                            .iter()
                            .filter(|&&(i, _)| powers[i][1] == 0)
                            .map(|&(i, c)| (powers[i][0] as i32, powers[i][2] as i32, c))
                            .collect();
                        Some((slot, terms))
                    })
                    .collect();
                PlaneShell {
                    cx: sh.center[0],
                    cz: sh.center[2],
                    exps: sh.exponents.clone(),
                    coefs: sh.coefficients.clone(),
                    comps,
                    min_exp: sh.min_exponent(),
                }
            })
            .collect();
        PlaneEvaluator { shells }
    }

    /// Values at (ρ, 0, z) written into `out[slot * stride + col]`.
    fn eval(&self, rho: f64, z: f64, out: &mut [f64], stride: usize, col: usize) {
        for sh in &self.shells {
            let dx = rho - sh.cx;
            let dz = z - sh.cz;
            let r2 = dx * dx + dz * dz;
            if sh.min_exp * r2 > 60.0 {
                for (slot, _) in &sh.comps {
                    out[slot * stride + col] = 0.0;
                }
                continue;
            }
            let radial: f64 = sh.exps.iter().zip(&sh.coefs).map(|(a, c)| c * (-a * r2).exp()).sum();
            for (slot, terms) in &sh.comps {
                let ang: f64 = terms.iter().map(|&(i, k, c)| c * dx.powi(i) * dz.powi(k)).sum();
                out[slot * stride + col] = radial * ang;
            }
        }
    }
}

fn panels(mut breaks: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    breaks.retain(|&b| b > lo && b < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    breaks
}

fn composite(edges: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut w = Vec::new();
    for p in edges.windows(2) {
        let (xs, ws) = gauss_legendre_on(n, p[0], p[1]);
        x.extend(xs);
        w.extend(ws);
    }
    (x, w)
}

struct Reduced {
    /// Per m: same-class reduced matrices (rep-local indexing).
    ecp: Vec<DMatrix<f64>>,
    cpp: Vec<DMatrix<f64>>,
    fz: Vec<DMatrix<f64>>,
    /// Per m (0..3): reduced x/y field coupling between classes m and m+1.
    fxy: Vec<DMatrix<f64>>,
}

/// Computes the ECP and core-polarization matrices of one core at z = `zc`.
pub fn center_integrals(
    basis: &MolecularBasis,
    zc: f64,
    ecp: Option<&EcpSpec>,
    cpp: Option<&CppParams>,
    want_field: bool,
    opts: &QuadratureOptions,
) -> Result<CenterIntegrals> {
    let mut prev: Option<CenterIntegrals> = None;
    let mut level = opts.start_level;
    loop {
        let cur = evaluate(basis, zc, ecp, cpp, want_field, level);
        if let Some(p) = prev {
            let (diff, before, after) = max_change(&p, &cur);
            if diff < opts.tolerance {
                return Ok(cur);
            }
            if level >= opts.max_level {
                return Err(Error::Quadrature {
                    what: format!("core operators about z = {zc}"),
                    previous: before,
                    last: after,
                });
            }
        }
        prev = Some(cur);
        level += 1;
    }
}

fn max_change(a: &CenterIntegrals, b: &CenterIntegrals) -> (f64, f64, f64) {
    let mut worst = (0.0, 0.0, 0.0);
    let mut visit = |x: &DMatrix<f64>, y: &DMatrix<f64>| {
        for (u, v) in x.iter().zip(y.iter()) {
            let d = (u - v).abs();
            if d > worst.0 {
                worst = (d, *u, *v);
            }
        }
    };
    visit(&a.ecp, &b.ecp);
    visit(&a.cpp, &b.cpp);
    if let (Some(fa), Some(fb)) = (&a.field, &b.field) {
        for k in 0..3 {
            visit(&fa[k], &fb[k]);
        }
    }
    worst
}

fn evaluate(
    basis: &MolecularBasis,
    zc: f64,
    ecp: Option<&EcpSpec>,
    cpp: Option<&CppParams>,
    want_field: bool,
    level: usize,
) -> CenterIntegrals {
    let n = basis.n_functions();
    // representatives: σ and cosine-type functions, grouped by m
    let mut rep_slot = vec![None; n];
    let mut rep_m = Vec::new();
    let mut m_range = [(0usize, 0usize); 4];
    for m in 0..4 {
        let class = if m == 0 { 0 } else { 2 * m - 1 };
        let start = rep_m.len();
        for g in basis.class_range(class) {
            rep_slot[g] = Some(rep_m.len());
            rep_m.push(m);
        }
        m_range[m] = (start, rep_m.len());
    }
    let nrep = rep_m.len();
    let evaluator = PlaneEvaluator::new(basis, &rep_slot);

    let ecp = ecp.filter(|e| !e.is_empty());
    let want_cpp = cpp.is_some_and(|c| c.alpha > 0.0);
    let cpp = cpp.filter(|_| want_cpp);
    let field_needed = cpp.is_some_and(|c| want_field || c.other_field_z != 0.0);

    // radial grid
    let mut breaks = vec![0.1, 0.25, 0.5, 1.0];
    let mut r_max: f64 = 1.0;
    for sm in &basis.shells {
        let d = ((sm.shell.center[0]).powi(2) + (sm.shell.center[2] - zc).powi(2)).sqrt();
        r_max = r_max.max(d + (40.0 / (2.0 * sm.shell.min_exponent())).sqrt());
        if d > 1e-8 {
            for off in [-3.0, -1.5, -0.75, -0.25, 0.25, 0.75, 1.5, 3.0] {
                breaks.push(d + off);
            }
        }
    }
    let ecp_range = ecp.map_or(0.0, |e| e.range());
    let rho_min = cpp.map_or(f64::INFINITY, |c| c.rho.iter().copied().fold(f64::INFINITY, f64::min));
    if let Some(c) = cpp {
        breaks.extend(c.rho.iter().copied());
    }
    if ecp.is_some() {
        breaks.push(ecp_range);
    }
    let mut g = 0.1;
    while g < r_max {
        breaks.push(g);
        g *= 1.6;
    }
    let edges = panels(breaks, 0.0, r_max);
    let (rn, rw) = composite(&edges, 10 << level);
    let xedges = [
        -1.0, -0.9999, -0.999, -0.99, -0.95, -0.8, -0.5, 0.0, 0.5, 0.8, 0.95, 0.99, 0.999, 0.9999, 1.0,
    ];
    let (xn, xw) = composite(&xedges, 6 << level);
    let nx = xn.len();
    let nr = rn.len();
    let leg: Vec<[[f64; 4]; 4]> = xn.iter().map(|&x| assoc_legendre(x)).collect();
    let sx: Vec<f64> = xn.iter().map(|&x| (1.0 - x * x).max(0.0).sqrt()).collect();

    let mdim = |m: usize| m_range[m].1 - m_range[m].0;
    let mut red = Reduced {
        ecp: (0..4).map(|m| DMatrix::zeros(mdim(m), mdim(m))).collect(),
        cpp: (0..4).map(|m| DMatrix::zeros(mdim(m), mdim(m))).collect(),
        fz: (0..4).map(|m| DMatrix::zeros(mdim(m), mdim(m))).collect(),
        fxy: (0..3).map(|m| DMatrix::zeros(mdim(m), mdim(m + 1))).collect(),
    };
    // projections [l][rep][r]: p (kernel 1), q (kernel x), s_to[m'] (kernel sinθ onto m')
    let mut p = vec![0.0; 4 * nrep * nr];
    let mut q = vec![0.0; 4 * nrep * nr];
    let mut s_to = vec![0.0; 4 * 4 * nrep * nr];
    let pidx = |l: usize, f: usize, i: usize| (l * nrep + f) * nr + i;
    let sidx = |l: usize, mp: usize, f: usize, i: usize| ((l * 4 + mp) * nrep + f) * nr + i;

    let mut gvals = vec![0.0; nrep * nx];
    let mut wbuf = vec![0.0; nrep * nx];
    for i in 0..nr {
        let r = rn[i];
        let in_ecp = ecp.is_some() && r < ecp_range;
        let in_cpp = cpp.is_some() && r > rho_min;
        if !in_ecp && !in_cpp {
            continue;
        }
        for j in 0..nx {
            evaluator.eval(r * sx[j], zc + r * xn[j], &mut gvals, nx, j);
        }
        let r2w = rw[i] * r * r;
        if let Some(e) = ecp.filter(|_| in_ecp) {
            let vl = e.local_value(r);
            if vl != 0.0 {
                let wts: Vec<f64> = xw.iter().map(|w| w * vl * r2w).collect();
                accumulate(&mut red.ecp, &m_range, &gvals, &mut wbuf, nx, &wts);
            }
        }
        if let Some(c) = cpp.filter(|_| in_cpp) {
            if r > c.rho[3] {
                let wts: Vec<f64> = xw.iter().map(|w| w * r2w / r.powi(4)).collect();
                accumulate(&mut red.cpp, &m_range, &gvals, &mut wbuf, nx, &wts);
                if field_needed {
                    let wts: Vec<f64> = xw.iter().zip(&xn).map(|(w, x)| w * x * r2w / (r * r)).collect();
                    accumulate(&mut red.fz, &m_range, &gvals, &mut wbuf, nx, &wts);
                }
                if want_field {
                    let wts: Vec<f64> = xw.iter().zip(&sx).map(|(w, s)| w * s * r2w / (r * r)).collect();
                    for m in 0..3 {
                        accumulate_cross(&mut red.fxy[m], m_range[m], m_range[m + 1], &gvals, &mut wbuf, nx, &wts);
                    }
                }
            }
        }
        // projections onto Y_ℓm about the core
        for f in 0..nrep {
            let m = rep_m[f];
            let row = &gvals[f * nx..(f + 1) * nx];
            for l in m..4 {
                let nrm = ylm_norm(l, m) * c_m(m);
                let mut a = 0.0;
                let mut b = 0.0;
                for j in 0..nx {
                    let t = xw[j] * leg[j][l][m] * row[j];
                    a += t;
                    b += t * xn[j];
                }
                p[pidx(l, f, i)] = nrm * a;
                q[pidx(l, f, i)] = nrm * b;
            }
            if want_field {
                for mp in [m.wrapping_sub(1), m + 1] {
                    if mp > 3 {
                        continue;
                    }
                    for l in mp..4 {
                        let mut a = 0.0;
                        for j in 0..nx {
                            a += xw[j] * leg[j][l][mp] * sx[j] * row[j];
                        }
                        s_to[sidx(l, mp, f, i)] = ylm_norm(l, mp) * a;
                    }
                }
            }
        }
    }

    // semi-local sums over the radial grid
    let radial_sum = |fa: &[f64], fb: &[f64], weight: &dyn Fn(f64) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..nr {
            let w = weight(rn[i]);
            if w != 0.0 {
                s += rw[i] * rn[i] * rn[i] * w * fa[i] * fb[i];
            }
        }
        s
    };
    let theta = |r: f64, rho: f64| if r > rho { 1.0 } else { 0.0 };

    let mut ecp_m: Vec<DMatrix<f64>> = Vec::new();
    let mut cpp_m: Vec<DMatrix<f64>> = Vec::new();
    let mut fz_m: Vec<DMatrix<f64>> = Vec::new();
    for m in 0..4 {
        let (lo, hi) = m_range[m];
        let k = hi - lo;
        let mut e = red.ecp[m].clone() * c_m(m);
        let mut cp = red.cpp[m].clone() * c_m(m);
        let mut fz = red.fz[m].clone() * c_m(m);
        for a in 0..k {
            for b in 0..=a {
                let (fa, fb) = (lo + a, lo + b);
                let mut ve = 0.0;
                if let Some(spec) = ecp {
                    for l in m..4 {
                        if spec.channels[l].is_empty() {
                            continue;
                        }
                        let pa = &p[pidx(l, fa, 0)..pidx(l, fa, 0) + nr];
                        let pb = &p[pidx(l, fb, 0)..pidx(l, fb, 0) + nr];
                        ve += radial_sum(pa, pb, &|r| if r < ecp_range { spec.channel(l, r) } else { 0.0 });
                    }
                }
                let mut vc = 0.0;
                let mut vz = 0.0;
                if let Some(c) = cpp {
                    for l in m..3 {
                        let (rl, rf) = (c.rho[l], c.rho[3]);
                        if rl == rf {
                            continue;
                        }
                        let dtheta = move |r: f64| theta(r, rl) - theta(r, rf);
                        let pa = &p[pidx(l, fa, 0)..pidx(l, fa, 0) + nr];
                        let pb = &p[pidx(l, fb, 0)..pidx(l, fb, 0) + nr];
                        let qa = &q[pidx(l, fa, 0)..pidx(l, fa, 0) + nr];
                        let qb = &q[pidx(l, fb, 0)..pidx(l, fb, 0) + nr];
                        vc += radial_sum(pa, pb, &|r| dtheta(r) / r.powi(4));
                        if field_needed {
                            let w = |r: f64| dtheta(r) / (r * r);
                            vz += 0.5 * (radial_sum(pa, qb, &w) + radial_sum(qa, pb, &w));
                        }
                    }
                }
                for (mat, v) in [(&mut e, ve), (&mut cp, vc), (&mut fz, vz)] {
                    mat[(a, b)] += v;
                    if a != b {
                        mat[(b, a)] = mat[(a, b)];
                    }
                }
            }
        }
        // symmetrize accumulated local parts
        for mat in [&mut e, &mut cp, &mut fz] {
            let t = (&*mat + mat.transpose()) * 0.5;
            *mat = t;
        }
        ecp_m.push(e);
        cpp_m.push(cp);
        fz_m.push(fz);
    }

    let mut out_ecp = DMatrix::zeros(n, n);
    let mut out_cpp = DMatrix::zeros(n, n);
    let mut fz_full = DMatrix::zeros(n, n);
    let rep_of = |g: usize| -> (usize, usize) {
        // (m, rep-local index) for any function
        let lab = basis.functions[g].label;
        let class = lab.class();
        let m = class_m(class);
        let local = g - basis.class_start[class];
        (m, local)
    };
    for class in 0..7 {
        let m = class_m(class);
        for a in basis.class_range(class) {
            for b in basis.class_range(class) {
                let (_, la) = rep_of(a);
                let (_, lb) = rep_of(b);
                out_ecp[(a, b)] = ecp_m[m][(la, lb)];
                out_cpp[(a, b)] = cpp_m[m][(la, lb)];
                fz_full[(a, b)] = fz_m[m][(la, lb)];
            }
        }
    }
    if let Some(c) = cpp {
        out_cpp *= -0.5 * c.alpha;
        if c.other_field_z != 0.0 {
            out_cpp -= &fz_full * (c.alpha * c.other_field_z);
        }
    }

    let field = if let (true, Some(c)) = (want_field, cpp) {
        let mut fx = DMatrix::zeros(n, n);
        let mut fy = DMatrix::zeros(n, n);
        for a in 0..n {
            let la = basis.functions[a].label;
            let (ma, ia) = rep_of(a);
            for b in 0..n {
                let lb = basis.functions[b].label;
                let (mb, ib) = rep_of(b);
                if ma.abs_diff(mb) != 1 {
                    continue;
                }
                // reduced value with the lower-m function first
                let (mlo, ilo, ihi) = if ma < mb { (ma, ia, ib) } else { (mb, ib, ia) };
                let mut base_local = red.fxy[mlo][(ilo, ihi)];
                let (fa, fb) = (m_range[ma].0 + ia, m_range[mb].0 + ib);
                let mut proj = 0.0;
                for l in 0..3 {
                    let (rl, rf) = (c.rho[l], c.rho[3]);
                    if rl == rf {
                        continue;
                    }
                    let w = |r: f64| (theta(r, rl) - theta(r, rf)) / (r * r);
                    if l >= ma {
                        let pa = &p[pidx(l, fa, 0)..pidx(l, fa, 0) + nr];
                        let sb = &s_to[sidx(l, ma, fb, 0)..sidx(l, ma, fb, 0) + nr];
                        proj += 0.5 * radial_sum(pa, sb, &w);
                    }
                    if l >= mb {
                        let pb = &p[pidx(l, fb, 0)..pidx(l, fb, 0) + nr];
                        let sa = &s_to[sidx(l, mb, fa, 0)..sidx(l, mb, fa, 0) + nr];
                        proj += 0.5 * radial_sum(pb, sa, &w);
                    }
                }
                base_local += proj;
                fx[(a, b)] = base_local * azimuthal(la.azimuth, ma, 1, lb.azimuth, mb);
                fy[(a, b)] = base_local * azimuthal(la.azimuth, ma, 2, lb.azimuth, mb);
            }
        }
        Some([fx, fy, fz_full])
    } else {
        None
    };

    CenterIntegrals {
        ecp: out_ecp,
        cpp: out_cpp,
        field,
        level,
    }
}

/// M_m += G_m diag(w) G_mᵀ for every m block.
fn accumulate(mats: &mut [DMatrix<f64>], ranges: &[(usize, usize); 4], g: &[f64], wbuf: &mut [f64], nx: usize, w: &[f64]) {
    for (m, mat) in mats.iter_mut().enumerate() {
        let (lo, hi) = ranges[m];
        accumulate_cross(mat, (lo, hi), (lo, hi), g, wbuf, nx, w);
    }
}

/// M += G_a diag(w) G_bᵀ for row ranges a and b of G (nrep × nx, row-major).
fn accumulate_cross(
    mat: &mut DMatrix<f64>,
    ra: (usize, usize),
    rb: (usize, usize),
    g: &[f64],
    wbuf: &mut [f64],
    nx: usize,
    w: &[f64],
) {
    let (ka, kb) = (ra.1 - ra.0, rb.1 - rb.0);
    if ka == 0 || kb == 0 {
        return;
    }
    for f in ra.0..ra.1 {
        for j in 0..nx {
            wbuf[f * nx + j] = g[f * nx + j] * w[j];
        }
    }
    // mat is column-major ka × kb
    unsafe {
        matrixmultiply::dgemm(
            ka,
            nx,
            kb,
            1.0,
            wbuf.as_ptr().add(ra.0 * nx),
            nx as isize,
            1,
            g.as_ptr().add(rb.0 * nx),
            1,
            nx as isize,
            1.0,
            mat.as_mut_ptr(),
            1,
            ka as isize,
        );
    }
}

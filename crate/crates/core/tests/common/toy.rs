//! Small test molecules with uncontracted bases on fitted cores, plus a
//! determinant-space CI used as an oracle for the spin-adapted solver.

use alkdimer::data::{load_core_parameters, AtomBasisSet, AtomShell, BasisVariant, DataDir, Element, Series};
use alkdimer::electronic::ScfResult;
use alkdimer::integrals::{class_m, CenterSpec, EcpSpec, GeometrySpec, OperatorMatrices, TwoElectronTensor};
use nalgebra::DMatrix;

/// Basis of free primitives, one list of exponents per ℓ.
pub fn primitive_basis(atom: Element, per_l: &[&[f64]]) -> AtomBasisSet {
    AtomBasisSet {
        atom,
        series: Series::A,
        variant: BasisVariant::Raw,
        shells: per_l
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_empty())
            .map(|(l, e)| AtomShell {
                l,
                exponents: e.to_vec(),
                contractions: Vec::new(),
            })
            .collect(),
    }
}

pub fn center(atom: Element, basis: AtomBasisSet) -> CenterSpec {
    let dd = DataDir::from_env();
    CenterSpec {
        element: atom,
        basis,
        core: load_core_parameters(&dd.fitted_core_path(atom, Series::A)).unwrap(),
        ecp: EcpSpec::load(&dd.fitted_ecp_path(atom, Series::A)).unwrap(),
    }
}

/// Li and Na with s, p (and d on Na): 17 orbitals.
pub fn small_lina(r: f64) -> GeometrySpec {
    let li = primitive_basis(Element::Li, &[&[0.6, 0.06, 0.02], &[0.08]]);
    let na = primitive_basis(Element::Na, &[&[0.5, 0.05, 0.02], &[0.06], &[0.1]]);
    GeometrySpec::new(center(Element::Li, li), center(Element::Na, na), r).unwrap()
}

/// Determinant-space CI over all M_S = 0 products α_i β_j. Returns the
/// lowest ¹Σ⁺ and ³Σ⁺ energies. Σ⁺ and the spin are selected by adding
/// large multiples of commuting positive operators (L_z², the σ_v
/// reflection, exchange symmetry) instead of building adapted functions.
pub fn determinant_ci(ops: &OperatorMatrices, eri: &TwoElectronTensor, scf: &ScfResult) -> (f64, f64) {
    let c = scf.coefficients();
    let n = c.ncols();
    let nao = c.nrows();
    let h = c.transpose() * ops.core_hamiltonian() * &c;

    // (pq|rs) by four quarter transformations of the dense AO tensor
    let mut t = vec![0.0; nao.pow(4)];
    for i in 0..nao {
        for j in 0..nao {
            for k in 0..nao {
                for l in 0..nao {
                    t[((i * nao + j) * nao + k) * nao + l] = eri.get(i, j, k, l);
                }
            }
        }
    }
    let mut dims = [nao; 4];
    for _ in 0..4 {
        let rows = dims[0] * dims[1] * dims[2];
        let mut out = vec![0.0; rows * n];
        for r in 0..rows {
            for s in 0..n {
                let mut v = 0.0;
                for a in 0..dims[3] {
                    v += t[r * dims[3] + a] * c[(a, s)];
                }
                out[s * rows + r] = v;
            }
        }
        dims = [n, dims[0], dims[1], dims[2]];
        t = out;
    }
    let g = |p: usize, q: usize, r: usize, s: usize| t[((p * n + q) * n + r) * n + s];

    // orbital class bookkeeping
    let mut class = Vec::new();
    let mut index_in_class = Vec::new();
    for orb in &scf.classes {
        for p in 0..orb.coefficients.ncols() {
            class.push(orb.class);
            index_in_class.push(p);
        }
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut refl = vec![1.0; n];
    for u in 0..n {
        if class[u] > 0 && class[u] % 2 == 0 {
            refl[u] = -1.0;
            let v = (0..n).find(|&v| class[v] == class[u] - 1 && index_in_class[v] == index_in_class[u]).unwrap();
            let m = class_m(class[u]) as f64;
            a[(u, v)] = m;
            a[(v, u)] = -m;
        }
    }

    let dim = n * n;
    let idx = |i: usize, j: usize| i * n + j;
    let mut hm = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = g(i, k, j, l);
                    if j == l {
                        v += h[(i, k)];
                    }
                    if i == k {
                        v += h[(j, l)];
                    }
                    hm[(idx(i, j), idx(k, l))] = v;
                }
            }
        }
    }
    // L_z = i(A⊗1 + 1⊗A); L_z² = MᵀM with M real antisymmetric
    let mut lz = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                lz[(idx(i, j), idx(k, j))] += a[(i, k)];
                lz[(idx(i, j), idx(i, k))] += a[(j, k)];
            }
        }
    }
    let penalty = 10.0;
    let mut base = hm + lz.transpose() * &lz * penalty;
    for i in 0..n {
        for j in 0..n {
            let d = idx(i, j);
            base[(d, d)] += penalty * 0.5 * (1.0 - refl[i] * refl[j]);
        }
    }
    let lowest = |sign: f64| {
        // penalize the exchange-symmetry sector with eigenvalue `sign`
        let mut m = base.clone();
        for i in 0..n {
            for j in 0..n {
                m[(idx(i, j), idx(i, j))] += penalty * 0.5;
                m[(idx(i, j), idx(j, i))] += penalty * 0.5 * sign;
            }
        }
        let e = m.symmetric_eigen();
        e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    };
    // singlets have symmetric coefficient matrices: penalize the antisymmetric sector
    (lowest(-1.0), lowest(1.0))
}

//! Representations of the quantized function algebra of SO(2n+1): generator
//! image tables, torus characters, convolution and relation checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qoperators::{
    window_deviation, window_indices, Coeff, CompiledOperator, SparseVector, SpaceKind,
    TensorOperator, WeightedShiftSum,
};
use crate::weylb::{SignedPermutation, Word};

const U: SpaceKind = SpaceKind::Unilateral;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Images of the generators `v_l^k`, stored row-major in `k`.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorImageTable {
    pub n: usize,
    pub signature: Vec<SpaceKind>,
    images: Vec<TensorOperator>,
}

impl GeneratorImageTable {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Image of `v_l^k` (1-based).
    pub fn get(&self, k: usize, l: usize) -> &TensorOperator {
        let d = self.dim();
        &self.images[(k - 1) * d + (l - 1)]
    }

    pub fn from_fn(
        n: usize,
        signature: Vec<SpaceKind>,
        mut f: impl FnMut(usize, usize) -> TensorOperator,
    ) -> Self {
        let d = 2 * n + 1;
        let mut images = Vec::with_capacity(d * d);
        for k in 1..=d {
            for l in 1..=d {
                images.push(f(k, l));
            }
        }
        Self {
            n,
            signature,
            images,
        }
    }

    pub fn compiled(&self) -> Vec<CompiledOperator> {
        self.images.iter().map(|t| t.compile()).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepSpec {
    pub n: usize,
    #[serde(skip)]
    pub t: Vec<Complex64>,
    pub word: Word,
}

impl RepSpec {
    pub fn new(n: usize, word: Word) -> Self {
        Self {
            n,
            t: vec![one(); n],
            word,
        }
    }
}

fn term(degree: i32, c: Coeff) -> TensorOperator {
    TensorOperator::single(WeightedShiftSum::term(U, degree, c))
}

fn terms(ts: Vec<(i32, Coeff)>) -> TensorOperator {
    TensorOperator::single(WeightedShiftSum::from_terms(U, ts))
}

/// Image of `v_l^k` under `π_{s_i}` as a one-factor operator.
pub fn elementary_entry(i: usize, n: usize, k: usize, l: usize) -> TensorOperator {
    let d = 2 * n + 1;
    debug_assert!((1..=n).contains(&i) && (1..=d).contains(&k) && (1..=d).contains(&l));
    let sq = |a, b| Coeff::sqrt_minus(a, b);
    let qp = |a, b| Coeff::qpow(a, b);
    if i < n {
        let (a, b, c, e) = (i, i + 1, 2 * n - i + 1, 2 * n - i + 2);
        match (k, l) {
            _ if (k, l) == (a, a) || (k, l) == (c, c) => term(1, sq(4, 0)),
            _ if (k, l) == (b, b) || (k, l) == (e, e) => term(-1, sq(4, 4)),
            _ if (k, l) == (a, b) => term(0, qp(2, 2).scaled(-one())),
            _ if (k, l) == (b, a) => term(0, qp(2, 0)),
            _ if (k, l) == (e, c) => term(0, qp(2, 0).scaled(-one())),
            _ if (k, l) == (c, e) => term(0, qp(2, 2)),
            _ if k == l => term(0, Coeff::one()),
            _ => TensorOperator::zero(vec![U]),
        }
    } else {
        let r2 = Coeff::sqrt_plus(0, 2);
        let (a, b, c) = (n, n + 1, n + 2);
        match (k, l) {
            _ if (k, l) == (a, a) => term(2, sq(2, -2).mul(&sq(2, 0))),
            _ if (k, l) == (b, b) => terms(vec![
                (0, Coeff::one()),
                (0, qp(2, 0).scaled(-one())),
                (0, qp(2, 2).scaled(-one())),
            ]),
            _ if (k, l) == (c, c) => term(-2, sq(2, 2).mul(&sq(2, 4))),
            _ if (k, l) == (b, a) => term(1, qp(1, -1).mul(&r2).mul(&sq(2, 0))),
            _ if (k, l) == (a, b) => term(1, qp(1, 0).mul(&r2).mul(&sq(2, 0)).scaled(-one())),
            _ if (k, l) == (c, b) => term(-1, qp(1, 0).mul(&r2).mul(&sq(2, 2))),
            _ if (k, l) == (b, c) => term(-1, qp(1, 1).mul(&r2).mul(&sq(2, 2)).scaled(-one())),
            _ if (k, l) == (a, c) => term(0, qp(2, 2)),
            _ if (k, l) == (c, a) => term(0, qp(2, 0)),
            _ if k == l => term(0, Coeff::one()),
            _ => TensorOperator::zero(vec![U]),
        }
    }
}

pub fn elementary_table(i: usize, n: usize) -> Result<GeneratorImageTable> {
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(GeneratorImageTable::from_fn(n, vec![U], |k, l| {
        elementary_entry(i, n, k, l)
    }))
}

/// Scalar value of the torus character on `v_k^k`.
pub fn torus_value(t: &[Complex64], n: usize, k: usize) -> Complex64 {
    match k.cmp(&(n + 1)) {
        std::cmp::Ordering::Less => t[k - 1].conj(),
        std::cmp::Ordering::Equal => one(),
        std::cmp::Ordering::Greater => t[2 * n + 1 - k],
    }
}

pub fn torus_table(t: &[Complex64], n: usize) -> Result<GeneratorImageTable> {
    if t.len() != n {
        return Err(Error::RankMismatch(t.len(), n));
    }
    for (index, z) in t.iter().enumerate() {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitTorus {
                index: index + 1,
                modulus: z.norm(),
            });
        }
    }
    Ok(GeneratorImageTable::from_fn(n, Vec::new(), |k, l| {
        if k == l {
            TensorOperator::scalar(torus_value(t, n, k))
        } else {
            TensorOperator::zero(Vec::new())
        }
    }))
}

/// `(A ∗ B)(k,l) = Σ_j A(k,j) ⊗ B(j,l)`.
pub fn convolve(a: &GeneratorImageTable, b: &GeneratorImageTable) -> Result<GeneratorImageTable> {
    if a.n != b.n {
        return Err(Error::RankMismatch(a.n, b.n));
    }
    let d = a.dim();
    let mut signature = a.signature.clone();
    signature.extend_from_slice(&b.signature);
    let images: Vec<TensorOperator> = (0..d * d)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / d + 1, idx % d + 1);
            let mut acc = TensorOperator::zero(signature.clone());
            for j in 1..=d {
                let x = a.get(k, j);
                let y = b.get(j, l);
                if x.is_structurally_zero() || y.is_structurally_zero() {
                    continue;
                }
                acc = acc.add(&x.tensor(y)).expect("signatures agree");
            }
            acc.canonical()
        })
        .collect();
    Ok(GeneratorImageTable {
        n: a.n,
        signature,
        images,
    })
}

pub fn rep_table(spec: &RepSpec) -> Result<GeneratorImageTable> {
    let mut table = torus_table(&spec.t, spec.n)?;
    for &i in spec.word.letters() {
        table = convolve(&table, &elementary_table(i, spec.n)?)?;
    }
    Ok(table)
}

/// Image of `(v_l^k)^*`.
pub fn star_image(t: &GeneratorImageTable, k: usize, l: usize) -> TensorOperator {
    t.get(k, l).adjoint()
}

/// A matrix with exactly one nonzero entry `vals[a]` in row `a`, at column
/// `perm[a]` (0-based).
#[derive(Debug, Clone)]
pub struct MonomialMatrix {
    pub perm: Vec<usize>,
    pub vals: Vec<f64>,
}

impl MonomialMatrix {
    /// Antidiagonal `C_{a,a'} = ε_a q^{-2ρ_a}` with `ε_{n+1} = -1`.
    pub fn antidiagonal(n: usize, q: f64) -> Self {
        let d = 2 * n + 1;
        let perm = (0..d).map(|a| d - 1 - a).collect();
        let vals = (1..=d)
            .map(|a| {
                let eps = if a == n + 1 { -1.0 } else { 1.0 };
                eps * q.powf(-2.0 * rho_balanced(n, a))
            })
            .collect();
        Self { perm, vals }
    }

    /// Diagonal `D_i^i = q^{-ρ_i}` with `ρ_i = (2n+1)/2 - i` for `i ≤ i'`.
    pub fn diagonal(n: usize, q: f64) -> Self {
        let d = 2 * n + 1;
        Self {
            perm: (0..d).collect(),
            vals: (1..=d).map(|i| q.powf(-rho_literal(n, i))).collect(),
        }
    }
}

/// `ρ_i = n + 1/2 - i` for `i ≤ n`, `0` at `n+1`, `ρ_{i'} = -ρ_i`.
pub fn rho_balanced(n: usize, i: usize) -> f64 {
    let ip = 2 * n + 2 - i;
    if i <= n {
        n as f64 + 0.5 - i as f64
    } else if i == n + 1 {
        0.0
    } else {
        -rho_balanced(n, ip)
    }
}

pub fn rho_literal(n: usize, i: usize) -> f64 {
    let ip = 2 * n + 2 - i;
    if i <= ip {
        (2 * n + 1) as f64 / 2.0 - i as f64
    } else {
        -rho_literal(n, ip)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    /// Max deviation of `V M V^t M^{-1} - I`.
    pub first: f64,
    /// Max deviation of `M V^t M^{-1} V - I`.
    pub second: f64,
    pub max_deviation: f64,
    pub worst_entry: (usize, usize, usize),
    pub passed: bool,
}

/// Evaluates both J-relation matrices against the identity on the window.
pub fn verify_orthogonality_with(
    t: &GeneratorImageTable,
    m: &MonomialMatrix,
    cutoff: i32,
    q: f64,
    tol: f64,
) -> Result<OrthogonalityReport> {
    let d = t.dim();
    let ops = t.compiled();
    let sig = t.signature.clone();
    let betas = window_indices(&sig, cutoff);
    // σ^{-1} for the monomial matrix.
    let mut inv = vec![0; d];
    for (a, &b) in m.perm.iter().enumerate() {
        inv[b] = a;
    }
    let per_beta: Vec<(f64, f64, (usize, usize, usize))> = betas
        .par_iter()
        .map(|beta| -> Result<_> {
            let e = SparseVector::basis(sig.clone(), beta);
            let imgs: Vec<SparseVector> = ops
                .iter()
                .map(|o| o.apply(&e, q))
                .collect::<Result<_>>()?;
            let img = |x: usize, y: usize| &imgs[x * d + y];
            let op = |x: usize, y: usize| &ops[x * d + y];
            let mut worst = (0.0f64, 0.0f64, (0, 0, 0));
            for k in 0..d {
                for l in 0..d {
                    // (V M V^t M^{-1})_{kl} = Σ_a M_{a,σa} / M_{l,σl} V(k,a) V(σl, σa)
                    let mut acc = SparseVector::zero(sig.clone());
                    for a in 0..d {
                        let v = img(m.perm[l], m.perm[a]);
                        if v.is_zero() || op(k, a).is_zero() {
                            continue;
                        }
                        let w = op(k, a).apply(v, q)?;
                        acc.axpy(Complex64::new(m.vals[a] / m.vals[l], 0.0), &w);
                    }
                    if k == l {
                        acc.axpy(-one(), &e);
                    }
                    let dev = acc.max_abs();
                    if dev > worst.0 {
                        worst.0 = dev;
                        worst.2 = (1, k + 1, l + 1);
                    }
                    // (M V^t M^{-1} V)_{kl} = Σ_c M_{k,σk} / M_{c,σc} V(σc, σk) V(c, l)
                    let mut acc = SparseVector::zero(sig.clone());
                    for c in 0..d {
                        let v = img(c, l);
                        let o = op(m.perm[c], m.perm[k]);
                        if v.is_zero() || o.is_zero() {
                            continue;
                        }
                        let w = o.apply(v, q)?;
                        acc.axpy(Complex64::new(m.vals[k] / m.vals[c], 0.0), &w);
                    }
                    if k == l {
                        acc.axpy(-one(), &e);
                    }
                    let dev = acc.max_abs();
                    if dev > worst.1 {
                        worst.1 = dev;
                        if dev > worst.0 {
                            worst.2 = (2, k + 1, l + 1);
                        }
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    let mut worst_entry = (0, 0, 0);
    let mut best = -1.0;
    for (a, b, w) in per_beta {
        first = first.max(a);
        second = second.max(b);
        if a.max(b) > best {
            best = a.max(b);
            worst_entry = w;
        }
    }
    let max_deviation = first.max(second);
    Ok(OrthogonalityReport {
        first,
        second,
        max_deviation,
        worst_entry,
        passed: max_deviation < tol,
    })
}

pub fn verify_orthogonality(
    t: &GeneratorImageTable,
    cutoff: i32,
    q: f64,
    tol: f64,
) -> Result<OrthogonalityReport> {
    verify_orthogonality_with(t, &MonomialMatrix::antidiagonal(t.n, q), cutoff, q, tol)
}

/// `R^{ij}_{mn}` with the two-case formula and the diagonal `D`.
pub fn r_matrix(n: usize, q: f64, i: usize, j: usize, m: usize, nn: usize) -> f64 {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let jp = 2 * n + 2 - j;
    let base = q.powf(d(i, j) - d(i, jp)) * d(i, m) * d(j, nn);
    if i > m {
        let dij = d(i, j) * q.powf(-rho_literal(n, i));
        let dnm = d(nn, m) * q.powf(-rho_literal(n, nn));
        base + (q - 1.0 / q) * (d(j, m) * d(i, nn) - dij * dnm)
    } else {
        base
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrtReport {
    pub max_deviation: f64,
    pub worst_quadruple: (usize, usize, usize, usize),
    pub nonzero_quadruples: usize,
}

/// `Σ_{k,l} R^{ji}_{kl} v_s^k v_t^l - R^{lk}_{st} v_k^i v_l^j` on the window.
pub fn verify_frt(t: &GeneratorImageTable, cutoff: i32, q: f64, tol: f64) -> Result<FrtReport> {
    let d = t.dim();
    let n = t.n;
    let ops = t.compiled();
    let sig = t.signature.clone();
    let betas = window_indices(&sig, cutoff);
    let v = |k: usize, l: usize| &ops[(k - 1) * d + (l - 1)];
    let mut report = FrtReport {
        max_deviation: 0.0,
        worst_quadruple: (0, 0, 0, 0),
        nonzero_quadruples: 0,
    };
    for i in 1..=d {
        for j in 1..=d {
            for s in 1..=d {
                for tt in 1..=d {
                    let mut dev: f64 = 0.0;
                    for beta in &betas {
                        let e = SparseVector::basis(sig.clone(), beta);
                        let mut acc = SparseVector::zero(sig.clone());
                        for k in 1..=d {
                            for l in 1..=d {
                                let r1 = r_matrix(n, q, j, i, k, l);
                                if r1 != 0.0 {
                                    let w = v(k, s).apply(&v(l, tt).apply(&e, q)?, q)?;
                                    acc.axpy(Complex64::new(r1, 0.0), &w);
                                }
                                let r2 = r_matrix(n, q, l, k, s, tt);
                                if r2 != 0.0 {
                                    let w = v(i, k).apply(&v(j, l).apply(&e, q)?, q)?;
                                    acc.axpy(Complex64::new(-r2, 0.0), &w);
                                }
                            }
                        }
                        dev = dev.max(acc.max_abs());
                    }
                    if dev > tol {
                        report.nonzero_quadruples += 1;
                    }
                    if dev > report.max_deviation {
                        report.max_deviation = dev;
                        report.worst_quadruple = (i, j, s, tt);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Max entrywise window deviation between two tables.
pub fn table_deviation(a: &GeneratorImageTable, b: &GeneratorImageTable, cutoff: i32, q: f64) -> Result<f64> {
    if a.signature != b.signature {
        return Err(Error::Signature("tables have different signatures".into()));
    }
    let ca = a.compiled();
    let cb = b.compiled();
    let devs: Vec<f64> = ca
        .par_iter()
        .zip(cb.par_iter())
        .map(|(x, y)| window_deviation(x, y, cutoff, q).map(|(dv, _)| dv))
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct BraidReport {
    pub max_deviation: f64,
    pub equal: bool,
    /// Max difference of `⟨e_0, x y e_0⟩` over pairs of generator images and
    /// their adjoints. Invariant under unitary equivalences fixing the vacuum.
    pub vacuum_moment_deviation: f64,
}

/// Largest difference of second vacuum moments between two tables.
pub fn vacuum_moment_deviation(a: &GeneratorImageTable, b: &GeneratorImageTable, q: f64) -> Result<f64> {
    let ops = |t: &GeneratorImageTable| -> Vec<CompiledOperator> {
        t.compiled().into_iter().flat_map(|c| [c.adjoint(), c]).collect()
    };
    let (oa, ob) = (ops(a), ops(b));
    let moments = |t: &GeneratorImageTable, o: &[CompiledOperator]| -> Result<Vec<Complex64>> {
        let vac = SparseVector::vacuum(t.signature.clone());
        let first: Vec<SparseVector> = o.iter().map(|x| x.apply(&vac, q)).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(o.len() * o.len());
        for v in &first {
            for y in o {
                out.push(vac.inner(&y.apply(v, q)?));
            }
        }
        Ok(out)
    };
    let (ma, mb) = (moments(a, &oa)?, moments(b, &ob)?);
    Ok(ma.iter().zip(&mb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

pub fn verify_braid_independence(
    w1: &Word,
    w2: &Word,
    t: &[Complex64],
    n: usize,
    cutoff: i32,
    q: f64,
    tol: f64,
) -> Result<BraidReport> {
    if SignedPermutation::from_word(n, w1)? != SignedPermutation::from_word(n, w2)? {
        return Err(Error::DifferentElements);
    }
    let a = rep_table(&RepSpec {
        n,
        t: t.to_vec(),
        word: w1.clone(),
    })?;
    let b = rep_table(&RepSpec {
        n,
        t: t.to_vec(),
        word: w2.clone(),
    })?;
    if a.signature != b.signature {
        return Ok(BraidReport {
            max_deviation: f64::INFINITY,
            equal: false,
            vacuum_moment_deviation: f64::INFINITY,
        });
    }
    let dev = table_deviation(&a, &b, cutoff, q)?;
    Ok(BraidReport {
        max_deviation: dev,
        equal: dev < tol,
        vacuum_moment_deviation: vacuum_moment_deviation(&a, &b, q)?,
    })
}

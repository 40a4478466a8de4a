//! Growth of `span ξ^r · vacuum` (modules) and of operator word spans
//! (algebras), exponent estimates, and certificate checks.

pub mod homogeneous;
pub mod span;
pub mod witness;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qoperators::{CompiledOperator, MultiIndex, SparseVector, SpaceKind, TensorOperator};
use crate::repsoq::{rep_table, GeneratorImageTable, RepSpec};
use crate::weylb::{normal_form, SignedPermutation};

pub use homogeneous::*;
pub use span::{Entries, Grading, SpanBasis};
pub use witness::*;

/// Max exponent over the elementary image monomials (`α²`, `(α*)²`).
pub const EXPONENT_M: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GeneratingKind {
    Module,
    Homogeneous,
}

#[derive(Debug, Clone)]
pub struct GeneratingSet {
    pub kind: GeneratingKind,
    pub names: Vec<String>,
    pub ops: Vec<CompiledOperator>,
}

impl GeneratingSet {
    /// Images of all nonzero `v_l^k` plus the identity (first).
    pub fn module(table: &GeneratorImageTable) -> Self {
        let mut names = vec!["1".to_string()];
        let mut ops = vec![TensorOperator::identity(table.signature.clone()).compile()];
        let d = table.dim();
        for k in 1..=d {
            for l in 1..=d {
                let c = table.get(k, l).compile();
                if !c.is_zero() {
                    names.push(format!("v^{k}_{l}"));
                    ops.push(c);
                }
            }
        }
        Self {
            kind: GeneratingKind::Module,
            names,
            ops,
        }
    }

    /// Generators other than the identity.
    pub fn proper(&self) -> &[CompiledOperator] {
        &self.ops[1..]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSeries {
    /// `(r, d(r))`.
    pub values: Vec<(usize, usize)>,
    pub context: String,
    /// Set when the basis cap stopped the computation early.
    pub truncated: bool,
    /// Set when probe windows did not stabilize (values are lower bounds).
    pub unstable: bool,
}

impl GrowthSeries {
    pub fn d(&self, r: usize) -> Option<usize> {
        self.values.iter().find(|(x, _)| *x == r).map(|&(_, d)| d)
    }
}

/// Maintains a basis of the span of all images of `start` under words of
/// length `≤ r`, applying generators only to the vectors added last.
pub struct FrontierGrowth {
    gens: Vec<CompiledOperator>,
    q: f64,
    prefix: usize,
    block_of: Arc<dyn Fn(&MultiIndex) -> Vec<i64> + Send + Sync>,
    basis: SpanBasis,
    frontier: Vec<Entries>,
    pub dims: Vec<usize>,
}

impl FrontierGrowth {
    pub fn new(
        gens: Vec<CompiledOperator>,
        start: Vec<Entries>,
        prefix: usize,
        block_of: Arc<dyn Fn(&MultiIndex) -> Vec<i64> + Send + Sync>,
        q: f64,
        tol: f64,
    ) -> Self {
        let mut basis = SpanBasis::new(tol);
        let mut frontier = Vec::new();
        for v in start {
            if let Some(k) = v.keys().next() {
                if basis.insert(block_of(k), &v) {
                    frontier.push(v);
                }
            }
        }
        let dims = vec![basis.len()];
        Self {
            gens,
            q,
            prefix,
            block_of,
            basis,
            frontier,
            dims,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &Entries) -> bool {
        match v.keys().next() {
            None => true,
            Some(k) => self.basis.contains(&(self.block_of)(k), v),
        }
    }

    /// One more word length; fails if the basis would exceed `cap`.
    pub fn step(&mut self, cap: usize) -> Result<usize> {
        let jobs: Vec<(usize, usize)> = (0..self.frontier.len())
            .flat_map(|f| (0..self.gens.len()).map(move |g| (f, g)))
            .collect();
        let cands: Vec<Entries> = jobs
            .par_iter()
            .map(|&(f, g)| self.gens[g].apply_entries(&self.frontier[f], self.prefix, self.q))
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for c in cands {
            let Some(k) = c.keys().next() else { continue };
            if self.basis.insert((self.block_of)(k), &c) {
                next.push(c);
                if self.basis.len() > cap {
                    return Err(Error::Budget { cap });
                }
            }
        }
        self.frontier = next;
        self.dims.push(self.basis.len());
        Ok(self.basis.len())
    }
}

fn vacuum_entries(slots: usize) -> Entries {
    let mut e = BTreeMap::new();
    e.insert(std::iter::repeat_n(0, slots).collect(), Complex64::new(1.0, 0.0));
    e
}

pub fn module_growth_for_table(
    table: &GeneratorImageTable,
    r_max: usize,
    q: f64,
    tol: f64,
    cap: usize,
) -> Result<(GrowthSeries, FrontierGrowth)> {
    let gens = GeneratingSet::module(table);
    let slots = table.signature.len();
    let grading = Arc::new(Grading::for_operators(gens.proper(), slots));
    let g2 = grading.clone();
    let mut fg = FrontierGrowth::new(
        gens.proper().to_vec(),
        vec![vacuum_entries(slots)],
        0,
        Arc::new(move |k: &MultiIndex| g2.key(k)),
        q,
        tol,
    );
    let mut truncated = false;
    for _ in 0..r_max {
        match fg.step(cap) {
            Ok(_) => {}
            Err(Error::Budget { .. }) => {
                truncated = true;
                fg.dims.pop();
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let series = GrowthSeries {
        values: fg.dims.iter().copied().enumerate().collect(),
        context: String::new(),
        truncated,
        unstable: false,
    };
    Ok((series, fg))
}

pub fn module_growth(spec: &RepSpec, r_max: usize, q: f64, tol: f64, cap: usize) -> Result<GrowthSeries> {
    let table = rep_table(spec)?;
    let (mut s, _) = module_growth_for_table(&table, r_max, q, tol, cap)?;
    s.context = format!("module n={} w={}", spec.n, spec.word);
    Ok(s)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentEstimate {
    pub log_ratio: f64,
    pub slope: f64,
}

/// Log-ratio `ln(d(R)/d(R')) / ln((R+1)/(R'+1))` with `R' = ⌈R/2⌉`, and the
/// least-squares slope of `ln d` against `ln(r+1)` over the upper half.
pub fn exponent_estimate(series: &GrowthSeries) -> Result<ExponentEstimate> {
    let v = &series.values;
    if v.len() < 4 {
        return Err(Error::InsufficientData(format!("{} samples", v.len())));
    }
    let (rmax, dmax) = *v.last().expect("nonempty");
    let half = rmax.div_ceil(2);
    let dhalf = series
        .d(half)
        .ok_or_else(|| Error::InsufficientData(format!("no sample at r = {half}")))?;
    let log_ratio = ((dmax as f64) / (dhalf as f64)).ln() / (((rmax + 1) as f64) / ((half + 1) as f64)).ln();
    let pts: Vec<(f64, f64)> = v
        .iter()
        .filter(|(r, d)| *r >= half && *d > 0)
        .map(|&(r, d)| (((r + 1) as f64).ln(), (d as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(ExponentEstimate { log_ratio, slope })
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundReport {
    pub m: u64,
    pub ell: usize,
    /// `(r, (Mr+1)^ℓ, d(r))`.
    pub rows: Vec<(usize, u128, usize)>,
    pub holds: bool,
}

pub fn upper_bound_rows(ell: u32, base: impl Fn(usize) -> u128, series: &GrowthSeries) -> Vec<(usize, u128, usize)> {
    series
        .values
        .iter()
        .map(|&(r, d)| (r, base(r).saturating_pow(ell), d))
        .collect()
}

pub fn upper_bound_check(ell: usize, series: &GrowthSeries) -> UpperBoundReport {
    let rows = upper_bound_rows(ell as u32, |r| (EXPONENT_M as u128) * r as u128 + 1, series);
    let holds = rows.iter().all(|&(_, b, d)| d as u128 <= b);
    UpperBoundReport {
        m: EXPONENT_M,
        ell,
        rows,
        holds,
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRow {
    pub r: usize,
    pub d: usize,
    pub lower: u128,
    pub achieved: u128,
    pub upper: u128,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthCertificate {
    pub target: usize,
    pub a: usize,
    pub word: String,
    pub rows: Vec<CertificateRow>,
    pub witness_check: bool,
    pub estimate: Option<ExponentEstimate>,
    pub truncated: bool,
    pub pass: bool,
}

/// Sandwich `C(r'+ℓ-1, r') ≤ d(r) ≤ (2r+1)^ℓ` with `r' = ⌊r/A⌋`, using the
/// normal-form word of `spec.word`.
pub fn module_certificate(
    spec: &RepSpec,
    r_max: usize,
    q: f64,
    tol: f64,
    cap: usize,
) -> Result<GrowthCertificate> {
    let w = SignedPermutation::from_word(spec.n, &spec.word)?;
    let nf = normal_form(&w).word();
    let ell = nf.len();
    let spec_nf = RepSpec {
        n: spec.n,
        t: spec.t.clone(),
        word: nf.clone(),
    };
    let table = rep_table(&spec_nf)?;
    let (series, fg) = module_growth_for_table(&table, r_max, q, tol, cap)?;
    let chain = witness_chain_for_table(&w, &table)?;
    let a = chain.max_degree().max(1);
    let mut witness_check = true;
    let mut rows = Vec::new();
    for &(r, d) in &series.values {
        let rp = r / a;
        let lower = if ell == 0 { 1 } else { binomial((rp + ell - 1) as u64, rp as u64) };
        let lb = lower_bound_for_chain(&chain, &table, rp, q)?;
        witness_check &= lb.verified == lb.count;
        let upper = (EXPONENT_M as u128 * r as u128 + 1).saturating_pow(ell as u32);
        // With no slots the vacuum alone is the witness.
        let achieved = if ell == 0 { 1 } else { lb.verified };
        let pass = achieved >= lower && lower <= d as u128 && d as u128 <= upper;
        rows.push(CertificateRow {
            r,
            d,
            lower,
            achieved,
            upper,
            pass,
        });
    }
    // The lattice vectors reached at the top sampled length must lie in the
    // computed span.
    if let Some(&(r, _)) = series.values.last() {
        if !series.truncated && ell > 0 {
            for beta in compositions(ell, r / a) {
                let v = SparseVector::basis(table.signature.clone(), &beta);
                witness_check &= fg.contains(&v.entries);
            }
        }
    }
    let estimate = exponent_estimate(&series).ok();
    let pass = witness_check && !series.truncated && rows.iter().all(|r| r.pass);
    Ok(GrowthCertificate {
        target: ell,
        a,
        word: nf.to_string(),
        rows,
        witness_check,
        estimate,
        truncated: series.truncated,
        pass,
    })
}

/// All `β ∈ N^len` with `Σβ = total`, lexicographic.
pub fn compositions(len: usize, total: usize) -> Vec<Vec<i32>> {
    if len == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(len - 1, total - first) {
            rest.insert(0, first as i32);
            out.push(rest);
        }
    }
    out.sort();
    out
}

/// Convenience for signatures of `k` unilateral slots.
pub fn unilateral(k: usize) -> Vec<SpaceKind> {
    vec![SpaceKind::Unilateral; k]
}

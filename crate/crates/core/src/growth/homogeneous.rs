//! Quantized homogeneous spaces: the representation `η` of the generating
//! set `ζ_m`, its lattice witnesses, and algebra growth via fingerprints.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qoperators::{
    window_indices, CompiledOperator, MultiIndex, SpaceKind, SparseVector, TensorOperator, WeightedShiftSum,
};
use crate::repsoq::{rep_table, GeneratorImageTable, RepSpec};
use crate::weylb::{classical_dimensions, in_quotient, normal_form, ParabolicSubset, SignedPermutation, Word};

use super::{binomial, span::Grading, witness::family_generators, witness::last_family, Entries, FrontierGrowth, GrowthSeries};

#[derive(Debug, Clone)]
pub struct HomogeneousRep {
    pub n: usize,
    pub m: usize,
    /// Number of leading bilateral slots, `n - m + 1`.
    pub nb: usize,
    pub w: SignedPermutation,
    pub word: Word,
    pub table: GeneratorImageTable,
}

impl HomogeneousRep {
    /// Rows of `ζ_m`: `1..=n-m+1` and `n+m..=2n+1`.
    pub fn rows(&self) -> Vec<usize> {
        (1..=self.nb).chain(self.n + self.m..=2 * self.n + 1).collect()
    }
}

/// `η(v_l^k) = η_e(v_l^k) ⊗ π_w(v_l^k)` with bilateral shifts in front.
pub fn homogeneous_rep(n: usize, m: usize, w: &SignedPermutation) -> Result<HomogeneousRep> {
    if w.rank() != n {
        return Err(Error::RankMismatch(w.rank(), n));
    }
    let rm = ParabolicSubset::r_m(n, m)?;
    if !in_quotient(w, &rm) {
        return Err(Error::NotInQuotient);
    }
    let word = normal_form(w).word();
    let pi = rep_table(&RepSpec::new(n, word.clone()))?;
    let nb = n - m + 1;
    let b = SpaceKind::Bilateral;
    let mut signature = vec![b; nb];
    signature.extend_from_slice(&pi.signature);
    let table = GeneratorImageTable::from_fn(n, signature, |k, l| {
        let mut factors: Vec<WeightedShiftSum> = (0..nb).map(|_| WeightedShiftSum::identity(b)).collect();
        if k < n + 1 && k <= nb {
            factors[k - 1] = WeightedShiftSum::shift(b);
        } else if k > n + 1 && 2 * n + 2 - k <= nb {
            factors[2 * n + 1 - k] = WeightedShiftSum::shift_adjoint(b);
        }
        TensorOperator::elementary(Complex64::new(1.0, 0.0), factors).tensor(pi.get(k, l))
    });
    Ok(HomogeneousRep {
        n,
        m,
        nb,
        w: w.clone(),
        word,
        table,
    })
}

/// A word of generator images, listed in application order.
#[derive(Debug, Clone)]
pub struct OpWord(pub Vec<CompiledOperator>);

impl OpWord {
    pub fn apply_entries(&self, v: &Entries, prefix: usize, q: f64) -> Result<Entries> {
        let mut v = v.clone();
        for op in &self.0 {
            v = op.apply_entries(&v, prefix, q)?;
        }
        Ok(v)
    }
}

#[derive(Debug, Clone)]
pub struct HomogeneousPair {
    /// Unilateral slot (0-based, counted after the bilateral slots).
    pub slot: usize,
    /// `h_j = h_0^* F_j`, in application order.
    pub h: OpWord,
    /// `h_{j*} = F_j^* h_0`, in application order.
    pub h_star: OpWord,
}

#[derive(Debug, Clone)]
pub struct HomogeneousWitness {
    /// `(bilateral slot, h_0)` for parts `m..=n`.
    pub h0: Vec<(usize, CompiledOperator)>,
    /// Pair families for parts `m..=n`, each in family order.
    pub families: Vec<Vec<HomogeneousPair>>,
    pub nb: usize,
    pub slots: usize,
}

/// Exponents: `r0` per bilateral slot, `(r_j, p_j)` per pair ordered by slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub r0: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

impl Pattern {
    pub fn total(&self) -> usize {
        self.r0.iter().sum::<usize>() + self.pairs.iter().map(|(a, b)| a + b).sum::<usize>()
    }
}

pub fn homogeneous_witnesses(rep: &HomogeneousRep) -> Result<HomogeneousWitness> {
    let parts = normal_form(&rep.w).parts();
    let n = rep.n;
    let mut h0 = Vec::new();
    let mut families = Vec::new();
    let mut off = rep.nb;
    for i in rep.m..=n {
        let r = parts[i - 1].len();
        let lam = &crate::diagrams::embeddings_to_top(&parts)?[i - 1];
        let t = |l: usize| rep.table.get(n + i + 1, lam.apply(n - i + l)).compile();
        let h = t(if r < i { 2 * i + 1 - r } else { 2 * i - r });
        let hs = h.adjoint();
        h0.push((n - i, h.clone()));
        let mut fam = Vec::new();
        if r > 0 {
            debug_assert_eq!(family_generators(&parts, i)?.len(), r);
            for (l, s) in last_family(r, i) {
                let f = t(l);
                fam.push(HomogeneousPair {
                    slot: off + s - 1,
                    h: OpWord(vec![f.clone(), hs.clone()]),
                    h_star: OpWord(vec![h.clone(), f.adjoint()]),
                });
            }
        }
        families.push(fam);
        off += r;
    }
    Ok(HomogeneousWitness {
        h0,
        families,
        nb: rep.nb,
        slots: off,
    })
}

impl HomogeneousWitness {
    fn sorted_slots(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.families.iter().flatten().map(|p| p.slot).collect();
        s.sort_unstable();
        s
    }

    pub fn pair_count(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    /// Operator word for a pattern, in application order.
    pub fn word(&self, pat: &Pattern) -> OpWord {
        let mut ops = Vec::new();
        for (slot, h) in &self.h0 {
            for _ in 0..pat.r0[*slot] {
                ops.push(h.clone());
            }
        }
        let slots = self.sorted_slots();
        for fam in &self.families {
            for p in fam.iter().rev() {
                let t = slots.iter().position(|&s| s == p.slot).expect("slot");
                let (r, pp) = pat.pairs[t];
                for _ in 0..r {
                    ops.extend(p.h.0.iter().cloned());
                }
                for _ in 0..pp {
                    ops.extend(p.h_star.0.iter().cloned());
                }
            }
        }
        OpWord(ops)
    }

    /// Predicted basis index: `r0` on bilateral slots, `r_j - p_j` on pairs.
    pub fn target(&self, pat: &Pattern) -> Vec<i32> {
        let mut z = vec![0i32; self.slots];
        for (a, &x) in pat.r0.iter().enumerate() {
            z[a] = x as i32;
        }
        for (t, &s) in self.sorted_slots().iter().enumerate() {
            z[s] = pat.pairs[t].0 as i32 - pat.pairs[t].1 as i32;
        }
        z
    }

    /// All patterns with total exponent `≤ total` and `r_j ≥ p_j`.
    pub fn patterns(&self, total: usize) -> Vec<Pattern> {
        let k = self.nb + 2 * self.pair_count();
        let mut out = Vec::new();
        let mut cur = vec![0usize; k];
        fn rec(i: usize, left: usize, cur: &mut Vec<usize>, nb: usize, out: &mut Vec<Pattern>) {
            if i == cur.len() {
                let pairs: Vec<(usize, usize)> = cur[nb..].chunks(2).map(|c| (c[0], c[1])).collect();
                if pairs.iter().all(|(a, b)| a >= b) {
                    out.push(Pattern {
                        r0: cur[..nb].to_vec(),
                        pairs,
                    });
                }
                return;
            }
            for x in 0..=left {
                cur[i] = x;
                rec(i + 1, left - x, cur, nb, out);
            }
            cur[i] = 0;
        }
        rec(0, total, &mut cur, self.nb, &mut out);
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternReport {
    pub checked: usize,
    pub failures: usize,
    pub min_mass: f64,
}

/// Each pattern word maps the vacuum onto its predicted basis vector.
pub fn verify_patterns(rep: &HomogeneousRep, wit: &HomogeneousWitness, total: usize, q: f64) -> Result<PatternReport> {
    let vac = SparseVector::vacuum(rep.table.signature.clone());
    let mut failures = 0;
    let mut min_mass: f64 = 1.0;
    let pats = wit.patterns(total);
    for pat in &pats {
        let v = wit.word(pat).apply_entries(&vac.entries, 0, q)?;
        let v = SparseVector {
            signature: vac.signature.clone(),
            entries: v,
        };
        let (frac, amp) = v.mass_on(&wit.target(pat));
        min_mass = min_mass.min(frac);
        if frac < 1.0 - 1e-8 || amp.norm() == 0.0 {
            failures += 1;
        }
    }
    Ok(PatternReport {
        checked: pats.len(),
        failures,
        min_mass,
    })
}

/// Generators `η(ζ_m) ∪ η(ζ_m)^*`, nonzero only, with names.
pub fn homogeneous_generators(rep: &HomogeneousRep) -> (Vec<String>, Vec<CompiledOperator>) {
    let mut names = Vec::new();
    let mut ops = Vec::new();
    let mut stars = Vec::new();
    for k in rep.rows() {
        for l in 1..=rep.table.dim() {
            let c = rep.table.get(k, l).compile();
            if !c.is_zero() {
                names.push(format!("v^{k}_{l}"));
                stars.push((format!("(v^{k}_{l})*"), c.adjoint()));
                ops.push(c);
            }
        }
    }
    for (nm, c) in stars {
        names.push(nm);
        ops.push(c);
    }
    (names, ops)
}

/// Fingerprint of the identity: every probe index mapped to itself.
fn identity_fingerprint(probes: &[MultiIndex]) -> Entries {
    probes
        .iter()
        .map(|p| {
            let mut k = p.clone();
            k.extend_from_slice(p);
            (k, Complex64::new(1.0, 0.0))
        })
        .collect()
}

fn fingerprint_grading(ops: &[CompiledOperator], signature: &[SpaceKind]) -> Arc<dyn Fn(&MultiIndex) -> Vec<i64> + Send + Sync> {
    let g = Grading::for_operators(ops, signature.len());
    let s = signature.len();
    Arc::new(move |k: &MultiIndex| {
        let a = g.key(&k[..s]);
        let b = g.key(&k[s..]);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    })
}

/// Probe windows tried beyond the initial one before flagging instability.
pub const MAX_WINDOW_STEPS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraGrowth {
    pub series: GrowthSeries,
    pub probe_cutoff: i32,
}

pub fn algebra_growth_window(ops: &[CompiledOperator], signature: &[SpaceKind], r_max: usize, c: i32, q: f64, tol: f64, cap: usize) -> Result<(Vec<usize>, bool)> {
    let probes = window_indices(signature, c);
    let mut fg = FrontierGrowth::new(
        ops.to_vec(),
        vec![identity_fingerprint(&probes)],
        signature.len(),
        fingerprint_grading(ops, signature),
        q,
        tol,
    );
    for _ in 0..r_max {
        match fg.step(cap) {
            Ok(_) => {}
            Err(Error::Budget { .. }) => {
                fg.dims.pop();
                return Ok((fg.dims, true));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((fg.dims, false))
}

/// `d(r)` for the algebra generated by `η(ζ_m)`, `η(ζ_m)^*` and 1, measured
/// by fingerprints on a probe window grown from `probe_cutoff` until two
/// consecutive windows agree.
pub fn algebra_growth(rep: &HomogeneousRep, r_max: usize, probe_cutoff: i32, q: f64, tol: f64, cap: usize) -> Result<AlgebraGrowth> {
    let (_, ops) = homogeneous_generators(rep);
    let sig = rep.table.signature.clone();
    let mut c = probe_cutoff;
    let (mut prev, mut truncated) = algebra_growth_window(&ops, &sig, r_max, c, q, tol, cap)?;
    let mut unstable = true;
    for _ in 0..MAX_WINDOW_STEPS {
        let (next, t) = algebra_growth_window(&ops, &sig, r_max, c + 1, q, tol, cap)?;
        let same = next == prev;
        prev = next;
        truncated = t;
        c += 1;
        if same {
            unstable = false;
            break;
        }
    }
    Ok(AlgebraGrowth {
        series: GrowthSeries {
            values: prev.into_iter().enumerate().collect(),
            context: format!("homogeneous n={} m={} w={}", rep.n, rep.m, rep.word),
            truncated,
            unstable,
        },
        probe_cutoff: c,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneousRow {
    pub r: usize,
    pub patterns: usize,
    pub rank: usize,
    pub lower: u128,
    pub d: Option<usize>,
    pub upper: u128,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HomogeneousCertificate {
    pub n: usize,
    pub m: usize,
    pub word: String,
    pub target: usize,
    pub a: usize,
    pub pattern_check: PatternReport,
    pub rows: Vec<HomogeneousRow>,
    pub growth: AlgebraGrowth,
    pub pass: bool,
}

/// Witness pattern check, fingerprint rank of pattern words against
/// `C(r+2ℓ+n-m, r)/2` for `r ≤ witness_r`, and the container bound
/// `d(r) ≤ (2r+1)^{2ℓ+n-m+1}` for `r ≤ r_max`, for the longest element of
/// `W^{R_m}`.
#[allow(clippy::too_many_arguments)]
pub fn homogeneous_certificate(
    n: usize,
    m: usize,
    r_max: usize,
    witness_r: usize,
    probe_cutoff: i32,
    q: f64,
    tol: f64,
    cap: usize,
) -> Result<HomogeneousCertificate> {
    let w = crate::weylb::longest_quotient_element(n, &ParabolicSubset::r_m(n, m)?);
    let rep = homogeneous_rep(n, m, &w)?;
    let wit = homogeneous_witnesses(&rep)?;
    let ell = w.length();
    let target = classical_dimensions(n, m)?.quotient_dim;
    let pattern_check = verify_patterns(&rep, &wit, 4, q)?;
    let growth = algebra_growth(&rep, r_max, probe_cutoff, q, tol, cap)?;
    let sig = rep.table.signature.clone();
    let probes = window_indices(&sig, growth.probe_cutoff);
    let (_, ops) = homogeneous_generators(&rep);
    let grade = fingerprint_grading(&ops, &sig);
    let id = identity_fingerprint(&probes);
    let a = 2;
    let mut rows = Vec::new();
    for r in 0..=r_max {
        let (patterns, rank, lower) = if r <= witness_r {
            let mut basis = super::SpanBasis::new(tol);
            let pats = wit.patterns(r);
            for p in &pats {
                let fp = wit.word(p).apply_entries(&id, sig.len(), q)?;
                if let Some(k) = fp.keys().next() {
                    basis.insert(grade(k), &fp);
                }
            }
            (pats.len(), basis.len(), binomial((r + 2 * ell + n - m) as u64, r as u64).div_ceil(2))
        } else {
            (0, 0, 0)
        };
        let d = growth.series.d(r);
        let upper = (2 * r as u128 + 1).saturating_pow(target as u32);
        let pass = rank as u128 >= lower && d.is_none_or(|d| d as u128 <= upper && (r > witness_r || rank <= d));
        rows.push(HomogeneousRow {
            r,
            patterns,
            rank,
            lower,
            d,
            upper,
            pass,
        });
    }
    let pass = pattern_check.failures == 0
        && !growth.series.truncated
        && rows.iter().all(|r| r.pass)
        && target == 2 * ell + n - m + 1;
    Ok(HomogeneousCertificate {
        n,
        m,
        word: rep.word.to_string(),
        target,
        a,
        pattern_check,
        rows,
        growth,
        pass,
    })
}

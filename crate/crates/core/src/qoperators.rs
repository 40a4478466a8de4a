//! Weighted shift operators on `c00(N)` (unilateral) and `c00(Z)` (bilateral)
//! and their tensor products.
//!
//! A term of degree `d` with coefficient `c` maps `e_k` to `c(k) e_{k-d}`; the
//! coefficient is evaluated at the input index. `S` has degree `+1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type MultiIndex = SmallVec<[i32; 8]>;

/// Relative drop tolerance on vector entries.
pub const DROP_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpaceKind {
    Unilateral,
    Bilateral,
}

/// `sqrt(1 + sign * q^{aN+b})` with `sign = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Radical {
    pub sign: i8,
    pub a: i32,
    pub b: i32,
}

/// `scale * q^{aN+b} * prod radicals`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coeff {
    #[serde(skip)]
    pub scale: Complex64,
    pub a: i32,
    pub b: i32,
    pub radicals: Vec<Radical>,
}

impl Coeff {
    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            scale: c,
            a: 0,
            b: 0,
            radicals: Vec::new(),
        }
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// `q^{aN+b}`.
    pub fn qpow(a: i32, b: i32) -> Self {
        Self {
            scale: Complex64::new(1.0, 0.0),
            a,
            b,
            radicals: Vec::new(),
        }
    }

    /// `sqrt(1 - q^{aN+b})`.
    pub fn sqrt_minus(a: i32, b: i32) -> Self {
        Self::one().with_radical(Radical { sign: -1, a, b })
    }

    /// `sqrt(1 + q^{aN+b})`.
    pub fn sqrt_plus(a: i32, b: i32) -> Self {
        Self::one().with_radical(Radical { sign: 1, a, b })
    }

    fn with_radical(mut self, r: Radical) -> Self {
        self.radicals.push(r);
        self.radicals.sort();
        self
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        let mut radicals = self.radicals.clone();
        radicals.extend_from_slice(&other.radicals);
        radicals.sort();
        Coeff {
            scale: self.scale * other.scale,
            a: self.a + other.a,
            b: self.b + other.b,
            radicals,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Coeff {
        Coeff {
            scale: self.scale * c,
            ..self.clone()
        }
    }

    /// Substitutes `N -> N + s`.
    pub fn shifted(&self, s: i32) -> Coeff {
        Coeff {
            scale: self.scale,
            a: self.a,
            b: self.b + self.a * s,
            radicals: self
                .radicals
                .iter()
                .map(|r| Radical { b: r.b + r.a * s, ..*r })
                .collect(),
        }
    }

    pub fn conj(&self) -> Coeff {
        Coeff {
            scale: self.scale.conj(),
            ..self.clone()
        }
    }

    pub fn evaluate(&self, k: i64, q: f64) -> Result<Complex64> {
        let mut v = self.scale * q.powi((self.a as i64 * k + self.b as i64) as i32);
        for r in &self.radicals {
            let e = (r.a as i64 * k + r.b as i64) as i32;
            let rad = 1.0 + r.sign as f64 * q.powi(e);
            if rad < -1e-12 {
                return Err(Error::Domain { index: k, value: rad });
            }
            v *= rad.max(0.0).sqrt();
        }
        Ok(v)
    }

    fn key(&self) -> (i32, i32, &[Radical]) {
        (self.a, self.b, &self.radicals)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if (self.scale - Complex64::new(1.0, 0.0)).norm() > 1e-15 {
            parts.push(fmt_scalar(self.scale));
        }
        if self.a != 0 || self.b != 0 {
            parts.push(format!("q^{{{}}}", fmt_affine(self.a, self.b)));
        }
        for r in &self.radicals {
            let s = if r.sign < 0 { '-' } else { '+' };
            parts.push(format!("sqrt(1{s}q^{{{}}})", fmt_affine(r.a, r.b)));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

fn fmt_affine(a: i32, b: i32) -> String {
    match (a, b) {
        (0, b) => b.to_string(),
        (a, 0) => format!("{}N", coef_str(a)),
        (a, b) if b > 0 => format!("{}N+{b}", coef_str(a)),
        (a, b) => format!("{}N{b}", coef_str(a)),
    }
}

fn coef_str(a: i32) -> String {
    match a {
        1 => String::new(),
        -1 => "-".into(),
        a => a.to_string(),
    }
}

pub fn fmt_scalar(c: Complex64) -> String {
    if c.im.abs() < 1e-15 {
        format!("{}", c.re)
    } else if c.re.abs() < 1e-15 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

/// A single weighted shift. `floor` is the least input index on which the
/// term acts (unilateral slots only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Term {
    pub degree: i32,
    pub floor: Option<i32>,
    pub coeff: Coeff,
}

impl Term {
    pub fn new(kind: SpaceKind, degree: i32, coeff: Coeff) -> Self {
        let floor = match kind {
            SpaceKind::Unilateral => Some(degree.max(0)),
            SpaceKind::Bilateral => None,
        };
        Self {
            degree,
            floor,
            coeff,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Term) -> Term {
        let floor = match (self.floor, other.floor) {
            (Some(f1), Some(f2)) => Some(f2.max(f1 + other.degree)),
            (None, None) => None,
            (a, b) => a.or(b),
        };
        Term {
            degree: self.degree + other.degree,
            floor,
            coeff: self.coeff.shifted(-other.degree).mul(&other.coeff),
        }
    }

    pub fn adjoint(&self) -> Term {
        Term {
            degree: -self.degree,
            floor: self.floor.map(|f| f - self.degree),
            coeff: self.coeff.conj().shifted(self.degree),
        }
    }

    pub fn apply(&self, k: i32, q: f64) -> Result<Option<(i32, Complex64)>> {
        if self.floor.is_some_and(|f| k < f) {
            return Ok(None);
        }
        Ok(Some((k - self.degree, self.coeff.evaluate(k as i64, q)?)))
    }

    fn cmp_key(&self, other: &Term) -> Ordering {
        (self.degree, self.floor, self.coeff.key()).cmp(&(other.degree, other.floor, other.coeff.key()))
    }

    fn unit(&self) -> Term {
        Term {
            coeff: Coeff {
                scale: Complex64::new(1.0, 0.0),
                ..self.coeff.clone()
            },
            ..self.clone()
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shift = match self.degree {
            0 => String::new(),
            1 => "S".into(),
            -1 => "S*".into(),
            d if d > 0 => format!("S^{d}"),
            d => format!("S*^{}", -d),
        };
        let c = self.coeff.to_string();
        match (shift.is_empty(), c == "1") {
            (true, _) => write!(f, "{c}"),
            (false, true) => write!(f, "{shift}"),
            (false, false) => write!(f, "{shift}·{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedShiftSum {
    pub kind: SpaceKind,
    pub terms: Vec<Term>,
}

impl WeightedShiftSum {
    pub fn zero(kind: SpaceKind) -> Self {
        Self {
            kind,
            terms: Vec::new(),
        }
    }

    pub fn identity(kind: SpaceKind) -> Self {
        Self::term(kind, 0, Coeff::one())
    }

    pub fn term(kind: SpaceKind, degree: i32, coeff: Coeff) -> Self {
        Self {
            kind,
            terms: vec![Term::new(kind, degree, coeff)],
        }
    }

    pub fn from_terms(kind: SpaceKind, terms: Vec<(i32, Coeff)>) -> Self {
        Self {
            kind,
            terms: terms
                .into_iter()
                .map(|(d, c)| Term::new(kind, d, c))
                .collect(),
        }
    }

    /// The left shift `S`.
    pub fn shift(kind: SpaceKind) -> Self {
        Self::term(kind, 1, Coeff::one())
    }

    pub fn shift_adjoint(kind: SpaceKind) -> Self {
        Self::term(kind, -1, Coeff::one())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::Signature("space kinds differ".into()));
        }
        let terms = self
            .terms
            .iter()
            .flat_map(|a| other.terms.iter().map(move |b| a.compose(b)))
            .collect();
        Ok(Self {
            kind: self.kind,
            terms,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            kind: self.kind,
            terms: self.terms.iter().map(Term::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            kind: self.kind,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.scaled(c),
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.kind != other.kind {
            return Err(Error::Signature("space kinds differ".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            kind: self.kind,
            terms,
        })
    }

    pub fn apply_basis(&self, k: i32, q: f64) -> Result<Vec<(i32, Complex64)>> {
        if self.kind == SpaceKind::Unilateral && k < 0 {
            return Ok(Vec::new());
        }
        let mut out: BTreeMap<i32, Complex64> = BTreeMap::new();
        for t in &self.terms {
            if let Some((j, c)) = t.apply(k, q)? {
                *out.entry(j).or_default() += c;
            }
        }
        Ok(out.into_iter().collect())
    }
}

impl fmt::Display for WeightedShiftSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summand {
    #[serde(skip)]
    pub scalar: Complex64,
    pub factors: Vec<WeightedShiftSum>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorOperator {
    pub signature: Vec<SpaceKind>,
    pub summands: Vec<Summand>,
}

impl TensorOperator {
    pub fn zero(signature: Vec<SpaceKind>) -> Self {
        Self {
            signature,
            summands: Vec::new(),
        }
    }

    pub fn identity(signature: Vec<SpaceKind>) -> Self {
        let factors = signature.iter().map(|&k| WeightedShiftSum::identity(k)).collect();
        Self {
            signature,
            summands: vec![Summand {
                scalar: Complex64::new(1.0, 0.0),
                factors,
            }],
        }
    }

    /// Operator on the zero-factor space.
    pub fn scalar(c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero(Vec::new());
        }
        Self {
            signature: Vec::new(),
            summands: vec![Summand {
                scalar: c,
                factors: Vec::new(),
            }],
        }
    }

    pub fn single(factor: WeightedShiftSum) -> Self {
        Self::elementary(Complex64::new(1.0, 0.0), vec![factor])
    }

    pub fn elementary(scalar: Complex64, factors: Vec<WeightedShiftSum>) -> Self {
        Self {
            signature: factors.iter().map(|f| f.kind).collect(),
            summands: vec![Summand { scalar, factors }],
        }
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut signature = self.signature.clone();
        signature.extend_from_slice(&other.signature);
        let mut summands = Vec::with_capacity(self.summands.len() * other.summands.len());
        for a in &self.summands {
            for b in &other.summands {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                summands.push(Summand {
                    scalar: a.scalar * b.scalar,
                    factors,
                });
            }
        }
        Self {
            signature,
            summands,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::Signature(format!(
                "{:?} vs {:?}",
                self.signature, other.signature
            )));
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut summands = Vec::new();
        for a in &self.summands {
            for b in &other.summands {
                let factors = a
                    .factors
                    .iter()
                    .zip(&b.factors)
                    .map(|(x, y)| x.compose(y))
                    .collect::<Result<Vec<_>>>()?;
                summands.push(Summand {
                    scalar: a.scalar * b.scalar,
                    factors,
                });
            }
        }
        Ok(Self {
            signature: self.signature.clone(),
            summands,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    scalar: s.scalar.conj(),
                    factors: s.factors.iter().map(|f| f.adjoint()).collect(),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        Ok(Self {
            signature: self.signature.clone(),
            summands,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    scalar: s.scalar * c,
                    factors: s.factors.clone(),
                })
                .collect(),
        }
    }

    /// Expands into elementary tensors of single terms, merges equal ones
    /// and drops vanishing summands. Term order is canonical.
    pub fn canonical(&self) -> Self {
        let mut elems: Vec<(Complex64, Vec<Term>)> = Vec::new();
        for s in &self.summands {
            let mut partial: Vec<(Complex64, Vec<Term>)> = vec![(s.scalar, Vec::new())];
            for f in &s.factors {
                let mut next = Vec::with_capacity(partial.len() * f.terms.len());
                for (c, ts) in &partial {
                    for t in &f.terms {
                        let mut ts2 = ts.clone();
                        ts2.push(t.unit());
                        next.push((c * t.coeff.scale, ts2));
                    }
                }
                partial = next;
            }
            elems.extend(partial);
        }
        elems.sort_by(|a, b| cmp_terms(&a.1, &b.1));
        let mut merged: Vec<(Complex64, Vec<Term>)> = Vec::new();
        for (c, ts) in elems {
            match merged.last_mut() {
                Some((c0, ts0)) if cmp_terms(ts0, &ts) == Ordering::Equal => *c0 += c,
                _ => merged.push((c, ts)),
            }
        }
        let max = merged.iter().map(|(c, _)| c.norm()).fold(0.0, f64::max);
        let summands = merged
            .into_iter()
            .filter(|(c, _)| c.norm() > 1e-13 * max.max(1e-300))
            .map(|(scalar, ts)| Summand {
                scalar,
                factors: ts
                    .into_iter()
                    .zip(&self.signature)
                    .map(|(t, &kind)| WeightedShiftSum {
                        kind,
                        terms: vec![t],
                    })
                    .collect(),
            })
            .collect();
        Self {
            signature: self.signature.clone(),
            summands,
        }
    }

    /// True if both canonical forms agree term by term up to `tol` in the
    /// scalars.
    pub fn structurally_equal(&self, other: &Self, tol: f64) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        a.signature == b.signature
            && a.summands.len() == b.summands.len()
            && a.summands.iter().zip(&b.summands).all(|(x, y)| {
                (x.scalar - y.scalar).norm() <= tol
                    && x
                        .factors
                        .iter()
                        .zip(&y.factors)
                        .all(|(f, g)| f.terms[0].cmp_key(&g.terms[0]) == Ordering::Equal)
            })
    }

    pub fn compile(&self) -> CompiledOperator {
        let c = self.canonical();
        CompiledOperator {
            signature: c.signature.clone(),
            terms: c
                .summands
                .into_iter()
                .map(|s| (s.scalar, s.factors.into_iter().map(|f| f.terms[0].clone()).collect()))
                .collect(),
        }
    }

    pub fn apply(&self, v: &SparseVector, q: f64) -> Result<SparseVector> {
        self.compile().apply(v, q)
    }
}

fn cmp_terms(a: &[Term], b: &[Term]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp_key(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

impl fmt::Display for TensorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, s) in self.summands.iter().enumerate() {
            let body = if s.factors.is_empty() {
                String::new()
            } else {
                s.factors
                    .iter()
                    .map(|x| x.to_string())
                    .map(|x| if x == "1" { "I".to_string() } else { x })
                    .collect::<Vec<_>>()
                    .join(" ⊗ ")
            };
            let sc = s.scalar;
            let (sign, mag) = if sc.im.abs() < 1e-15 && sc.re < 0.0 {
                ("-", Complex64::new(-sc.re, 0.0))
            } else {
                ("+", sc)
            };
            if i > 0 || sign == "-" {
                out.push_str(if i > 0 { " " } else { "" });
                out.push_str(sign);
                out.push(' ');
            }
            let unit = (mag - Complex64::new(1.0, 0.0)).norm() < 1e-15;
            match (unit, body.is_empty()) {
                (true, false) => out.push_str(&body),
                (_, true) => out.push_str(&fmt_scalar(mag)),
                (false, false) => out.push_str(&format!("{}·[{}]", fmt_scalar(mag), body)),
            }
        }
        write!(f, "{out}")
    }
}

/// Canonical elementary form ready for repeated application.
#[derive(Debug, Clone)]
pub struct CompiledOperator {
    pub signature: Vec<SpaceKind>,
    pub terms: Vec<(Complex64, Vec<Term>)>,
}

impl CompiledOperator {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> CompiledOperator {
        CompiledOperator {
            signature: self.signature.clone(),
            terms: self
                .terms
                .iter()
                .map(|(c, ts)| (c.conj(), ts.iter().map(Term::adjoint).collect()))
                .collect(),
        }
    }

    /// Adds the image of `x e_beta` into `out`.
    pub fn apply_basis_into(
        &self,
        beta: &[i32],
        x: Complex64,
        q: f64,
        out: &mut BTreeMap<MultiIndex, Complex64>,
    ) -> Result<()> {
        'terms: for (c, ts) in &self.terms {
            let mut acc = x * c;
            let mut idx: MultiIndex = SmallVec::with_capacity(beta.len());
            for (t, &k) in ts.iter().zip(beta) {
                match t.apply(k, q)? {
                    Some((j, v)) => {
                        acc *= v;
                        idx.push(j);
                    }
                    None => continue 'terms,
                }
            }
            if acc.norm() == 0.0 {
                continue;
            }
            *out.entry(idx).or_default() += acc;
        }
        Ok(())
    }

    /// Applies to raw entries whose first `prefix` coordinates are passive
    /// labels.
    pub fn apply_entries(
        &self,
        v: &BTreeMap<MultiIndex, Complex64>,
        prefix: usize,
        q: f64,
    ) -> Result<BTreeMap<MultiIndex, Complex64>> {
        let mut out = BTreeMap::new();
        let mut tmp = BTreeMap::new();
        for (beta, &x) in v {
            tmp.clear();
            self.apply_basis_into(&beta[prefix..], x, q, &mut tmp)?;
            for (k, c) in std::mem::take(&mut tmp) {
                let mut key: MultiIndex = beta[..prefix].iter().copied().collect();
                key.extend_from_slice(&k);
                *out.entry(key).or_default() += c;
            }
        }
        let m = out.values().map(|c: &Complex64| c.norm()).fold(0.0, f64::max);
        out.retain(|_, c| c.norm() > DROP_TOL * m && c.norm() > 0.0);
        Ok(out)
    }

    pub fn apply(&self, v: &SparseVector, q: f64) -> Result<SparseVector> {
        if v.signature != self.signature {
            return Err(Error::Signature(format!(
                "operator {:?} vs vector {:?}",
                self.signature, v.signature
            )));
        }
        let mut out = BTreeMap::new();
        for (beta, &x) in &v.entries {
            self.apply_basis_into(beta, x, q, &mut out)?;
        }
        let mut r = SparseVector {
            signature: v.signature.clone(),
            entries: out,
        };
        r.prune(DROP_TOL);
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub signature: Vec<SpaceKind>,
    pub entries: BTreeMap<MultiIndex, Complex64>,
}

impl SparseVector {
    pub fn zero(signature: Vec<SpaceKind>) -> Self {
        Self {
            signature,
            entries: BTreeMap::new(),
        }
    }

    pub fn basis(signature: Vec<SpaceKind>, beta: &[i32]) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(beta.iter().copied().collect(), Complex64::new(1.0, 0.0));
        Self { signature, entries }
    }

    pub fn vacuum(signature: Vec<SpaceKind>) -> Self {
        let zeros = vec![0; signature.len()];
        Self::basis(signature, &zeros)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Drops entries below `rel * max |entry|`.
    pub fn prune(&mut self, rel: f64) {
        let m = self.max_abs();
        self.entries.retain(|_, c| c.norm() > rel * m && c.norm() > 0.0);
    }

    pub fn axpy(&mut self, a: Complex64, other: &SparseVector) {
        for (k, &v) in &other.entries {
            *self.entries.entry(k.clone()).or_default() += a * v;
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            entries: self.entries.iter().map(|(k, &v)| (k.clone(), v * c)).collect(),
        }
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &SparseVector) -> Complex64 {
        let (small, large, flip) = if self.entries.len() <= other.entries.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut s = Complex64::new(0.0, 0.0);
        for (k, &a) in &small.entries {
            if let Some(&b) = large.entries.get(k) {
                s += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        s
    }

    /// Fraction of squared norm carried by `beta`, and the amplitude there.
    pub fn mass_on(&self, beta: &[i32]) -> (f64, Complex64) {
        let total: f64 = self.entries.values().map(|c| c.norm_sqr()).sum();
        let c = self
            .entries
            .iter()
            .find(|(k, _)| k.as_slice() == beta)
            .map(|(_, &v)| v)
            .unwrap_or_default();
        if total == 0.0 {
            (0.0, c)
        } else {
            (c.norm_sqr() / total, c)
        }
    }
}

/// Basis indices with unilateral entries in `0..=cutoff` and bilateral entries
/// in `-cutoff..=cutoff`, in lexicographic order.
pub fn window_indices(signature: &[SpaceKind], cutoff: i32) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = vec![SmallVec::new()];
    for &k in signature {
        let lo = match k {
            SpaceKind::Unilateral => 0,
            SpaceKind::Bilateral => -cutoff,
        };
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=cutoff).map(move |j| {
                    let mut p2 = p.clone();
                    p2.push(j);
                    p2
                })
            })
            .collect();
    }
    out
}

/// Max entry difference of `T1 e_β − T2 e_β` and max entry magnitude over the
/// window.
pub fn window_deviation(
    t1: &CompiledOperator,
    t2: &CompiledOperator,
    cutoff: i32,
    q: f64,
) -> Result<(f64, f64)> {
    if t1.signature != t2.signature {
        return Err(Error::Signature("window comparison".into()));
    }
    let mut dev: f64 = 0.0;
    let mut mag: f64 = 0.0;
    for beta in window_indices(&t1.signature, cutoff) {
        let mut a = BTreeMap::new();
        t1.apply_basis_into(&beta, Complex64::new(1.0, 0.0), q, &mut a)?;
        for v in a.values() {
            mag = mag.max(v.norm());
        }
        let mut b = BTreeMap::new();
        t2.apply_basis_into(&beta, Complex64::new(1.0, 0.0), q, &mut b)?;
        for (k, v) in &b {
            mag = mag.max(v.norm());
            *a.entry(k.clone()).or_default() -= v;
        }
        for v in a.values() {
            dev = dev.max(v.norm());
        }
    }
    Ok((dev, mag))
}

pub fn equal_on_window(
    t1: &TensorOperator,
    t2: &TensorOperator,
    cutoff: i32,
    q: f64,
    tol: f64,
) -> Result<bool> {
    let (dev, mag) = window_deviation(&t1.compile(), &t2.compile(), cutoff, q)?;
    Ok(dev < tol * (1.0 + mag))
}

/// `[n]_q = (q^n - q^{-n}) / (q - q^{-1})`.
pub fn q_number(n: i32, q: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (q.powi(n) - q.powi(-n)) / (q - 1.0 / q)
}

pub fn q_factorial(n: i32, q: f64) -> f64 {
    (1..=n).map(|k| q_number(k, q)).product()
}

pub fn q_binomial(n: i32, m: i32, q: f64) -> Result<f64> {
    if m < 0 || m > n {
        return Err(Error::Parse(format!("q-binomial needs 0 <= m <= n, got ({n}, {m})")));
    }
    Ok(q_factorial(n, q) / (q_factorial(m, q) * q_factorial(n - m, q)))
}

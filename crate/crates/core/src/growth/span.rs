//! Incremental rank maintenance over sparse complex vectors.
//!
//! Vectors are split into independent blocks by an integer grading; inside
//! a block the basis is kept in reduced row echelon form with the largest
//! entry as pivot (ties broken by the smaller multi-index).

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::qoperators::{CompiledOperator, MultiIndex};

pub type Entries = BTreeMap<MultiIndex, Complex64>;

/// Integer functionals `γ` with `γ·D` constant over the degree vectors `D`
/// of every generator term. Indices with equal `γ·β` form one block.
#[derive(Debug, Clone, Default)]
pub struct Grading {
    pub functionals: Vec<Vec<i64>>,
}

impl Grading {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn for_operators(ops: &[CompiledOperator], slots: usize) -> Self {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for op in ops {
            let degs: Vec<Vec<i64>> = op
                .terms
                .iter()
                .map(|(_, ts)| ts.iter().map(|t| t.degree as i64).collect())
                .collect();
            if let Some(first) = degs.first() {
                for d in &degs[1..] {
                    let diff: Vec<i64> = d.iter().zip(first).map(|(a, b)| a - b).collect();
                    if diff.iter().any(|&x| x != 0) && !rows.contains(&diff) {
                        rows.push(diff);
                    }
                }
            }
        }
        Self {
            functionals: integer_nullspace(&rows, slots),
        }
    }

    pub fn key(&self, beta: &[i32]) -> Vec<i64> {
        self.functionals
            .iter()
            .map(|g| g.iter().zip(beta).map(|(a, &b)| a * b as i64).sum())
            .collect()
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frac(i128, i128);

impl Frac {
    fn new(n: i128, d: i128) -> Self {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Frac(s * n / g, s * d / g)
    }
    fn zero(&self) -> bool {
        self.0 == 0
    }
    fn sub(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
    fn div(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1, self.1 * o.0)
    }
}

/// Integer basis of `{γ : R γ = 0}` for an integer matrix `R` with `cols`
/// columns.
pub fn integer_nullspace(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Frac>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Frac(x as i128, 1)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col];
        for x in m[row].iter_mut() {
            *x = x.div(pv);
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].zero() {
                let f = m[i][col];
                for j in 0..cols {
                    let v = m[row][j];
                    m[i][j] = m[i][j].sub(f.mul(v));
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Frac(0, 1); cols];
        v[free] = Frac(1, 1);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = Frac(0, 1).sub(m[r][free]);
        }
        let l = v.iter().fold(1i128, |acc, f| acc / gcd(acc, f.1) * f.1);
        out.push(v.iter().map(|f| (f.0 * (l / f.1)) as i64).collect());
    }
    out
}

#[derive(Debug, Default, Clone)]
struct Block {
    vecs: Vec<Entries>,
    pivots: HashMap<MultiIndex, usize>,
}

#[derive(Debug, Clone)]
pub struct SpanBasis {
    tol: f64,
    blocks: BTreeMap<Vec<i64>, Block>,
    len: usize,
}

impl SpanBasis {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            blocks: BTreeMap::new(),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn reduce(block: &Block, v: &Entries) -> Entries {
        let mut r = v.clone();
        let hits: Vec<(usize, Complex64)> = v
            .iter()
            .filter_map(|(k, &x)| block.pivots.get(k).map(|&i| (i, x)))
            .collect();
        for (i, x) in hits {
            for (k, &y) in &block.vecs[i] {
                *r.entry(k.clone()).or_default() -= x * y;
            }
        }
        r
    }

    fn residual(&self, block: &[i64], v: &Entries) -> Option<Entries> {
        let m0 = v.values().map(|c| c.norm()).fold(0.0, f64::max);
        if m0 == 0.0 {
            return None;
        }
        let mut r = match self.blocks.get(block) {
            Some(b) => Self::reduce(b, v),
            None => v.clone(),
        };
        r.retain(|_, c| c.norm() > 1e-14 * m0);
        let m1 = r.values().map(|c| c.norm()).fold(0.0, f64::max);
        (m1 > self.tol * m0).then_some(r)
    }

    pub fn contains(&self, block: &[i64], v: &Entries) -> bool {
        self.residual(block, v).is_none()
    }

    /// Adds `v` if independent of the current span; returns whether it was.
    pub fn insert(&mut self, block: Vec<i64>, v: &Entries) -> bool {
        let Some(mut r) = self.residual(&block, v) else {
            return false;
        };
        let m1 = r.values().map(|c| c.norm()).fold(0.0, f64::max);
        let (pk, pv) = r
            .iter()
            .find(|(_, c)| c.norm() >= m1 * (1.0 - 1e-12))
            .map(|(k, &c)| (k.clone(), c))
            .expect("nonzero residual");
        let inv = pv.inv();
        for x in r.values_mut() {
            *x *= inv;
        }
        r.retain(|_, c| c.norm() > 1e-15);
        r.insert(pk.clone(), Complex64::new(1.0, 0.0));
        let b = self.blocks.entry(block).or_default();
        for w in b.vecs.iter_mut() {
            if let Some(&x) = w.get(&pk) {
                for (k, &y) in &r {
                    *w.entry(k.clone()).or_default() -= x * y;
                }
                w.remove(&pk);
                w.retain(|_, c| c.norm() > 1e-15);
            }
        }
        b.pivots.insert(pk, b.vecs.len());
        b.vecs.push(r);
        self.len += 1;
        true
    }
}

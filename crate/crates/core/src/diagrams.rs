//! Layered diagrams: one column of `2n+1` nodes per layer, an edge from left
//! node `a` to right node `b` carrying the image of `v_b^a`. Paths from `l`
//! to `k` enumerate the summands of `π(v_k^l)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qoperators::{Coeff, SparseVector, SpaceKind, TensorOperator, WeightedShiftSum};
use crate::repsoq::{rep_table, torus_value, GeneratorImageTable, RepSpec};
use crate::weylb::Word;

const U: SpaceKind = SpaceKind::Unilateral;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EdgePrimitive {
    Identity,
    /// `sqrt(1-q^{4N+4}) S`
    Alpha,
    /// `S* sqrt(1-q^{4N+4})`
    AlphaStar,
    /// `-q^{2N+2}` on the upper pair
    NegQ2n2,
    /// `q^{2N}` on the upper pair
    Q2n,
    /// `-q^{2N}` on the lower pair
    NegQ2n,
    /// `q^{2N+2}` on the lower pair
    Q2n2,
    /// `sqrt((1-q^{2N+2})(1-q^{2N+4})) S^2`
    BlockAlphaSq,
    /// `I - (1+q^2) q^{2N}`
    BlockMiddle,
    /// `S*^2 sqrt((1-q^{2N+4})(1-q^{2N+2}))`
    BlockAlphaStarSq,
    /// `q^N sqrt((1+q^2)(1-q^{2N+2})) S`
    BlockUpper,
    /// `-q^{N+1} sqrt((1+q^2)(1-q^{2N+2})) S`
    BlockUpperNeg,
    /// `S* sqrt((1+q^2)(1-q^{2N+2})) q^N`
    BlockLower,
    /// `-S* sqrt((1+q^2)(1-q^{2N+2})) q^{N+1}`
    BlockLowerNeg,
    /// `q^{2N+2}` across the block
    BlockQ2n2,
    /// `q^{2N}` across the block
    BlockQ2n,
    /// Torus label `M_t`.
    Scalar { re: f64, im: f64 },
}

impl EdgePrimitive {
    pub fn tag(&self) -> &'static str {
        use EdgePrimitive::*;
        match self {
            Identity => "identity",
            Alpha => "alpha",
            AlphaStar => "alpha_star",
            NegQ2n2 => "neg_q2n2",
            Q2n => "q2n",
            NegQ2n => "neg_q2n",
            Q2n2 => "q2n2",
            BlockAlphaSq => "block_alpha_sq",
            BlockMiddle => "block_middle",
            BlockAlphaStarSq => "block_alpha_star_sq",
            BlockUpper => "block_upper",
            BlockUpperNeg => "block_upper_neg",
            BlockLower => "block_lower",
            BlockLowerNeg => "block_lower_neg",
            BlockQ2n2 => "block_q2n2",
            BlockQ2n => "block_q2n",
            Scalar { .. } => "scalar",
        }
    }

    fn style(&self) -> &'static str {
        use EdgePrimitive::*;
        match self {
            Identity => "solid",
            Alpha | AlphaStar | BlockAlphaSq | BlockAlphaStarSq => "bold",
            NegQ2n2 | NegQ2n | BlockUpperNeg | BlockLowerNeg => "dashed",
            Q2n | Q2n2 | BlockUpper | BlockLower => "dotted",
            BlockMiddle => "tapered",
            BlockQ2n2 | BlockQ2n => "invis",
            Scalar { .. } => "solid",
        }
    }

    /// One-factor operator (or a scalar on the empty signature).
    pub fn realize(&self) -> TensorOperator {
        use EdgePrimitive::*;
        let one = Complex64::new(1.0, 0.0);
        let t = |d: i32, c: Coeff| TensorOperator::single(WeightedShiftSum::term(U, d, c));
        let sq = Coeff::sqrt_minus;
        let qp = Coeff::qpow;
        let r2 = Coeff::sqrt_plus(0, 2);
        match *self {
            Identity => t(0, Coeff::one()),
            Alpha => t(1, sq(4, 0)),
            AlphaStar => t(-1, sq(4, 4)),
            NegQ2n2 => t(0, qp(2, 2).scaled(-one)),
            Q2n => t(0, qp(2, 0)),
            NegQ2n => t(0, qp(2, 0).scaled(-one)),
            Q2n2 => t(0, qp(2, 2)),
            BlockAlphaSq => t(2, sq(2, -2).mul(&sq(2, 0))),
            BlockMiddle => TensorOperator::single(WeightedShiftSum::from_terms(
                U,
                vec![
                    (0, Coeff::one()),
                    (0, qp(2, 0).scaled(-one)),
                    (0, qp(2, 2).scaled(-one)),
                ],
            )),
            BlockAlphaStarSq => t(-2, sq(2, 2).mul(&sq(2, 4))),
            BlockUpper => t(1, qp(1, -1).mul(&r2).mul(&sq(2, 0))),
            BlockUpperNeg => t(1, qp(1, 0).mul(&r2).mul(&sq(2, 0)).scaled(-one)),
            BlockLower => t(-1, qp(1, 0).mul(&r2).mul(&sq(2, 2))),
            BlockLowerNeg => t(-1, qp(1, 1).mul(&r2).mul(&sq(2, 2)).scaled(-one)),
            BlockQ2n2 => t(0, qp(2, 2)),
            BlockQ2n => t(0, qp(2, 0)),
            Scalar { re, im } => TensorOperator::scalar(Complex64::new(re, im)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub prim: EdgePrimitive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LayerKind {
    Elementary(usize),
    Torus(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramLayer {
    pub n: usize,
    pub kind: LayerKind,
    pub edges: Vec<Edge>,
}

impl DiagramLayer {
    pub fn signature(&self) -> Vec<SpaceKind> {
        match self.kind {
            LayerKind::Elementary(_) => vec![U],
            LayerKind::Torus(_) => Vec::new(),
        }
    }
}

pub fn layer(kind: LayerKind, n: usize) -> Result<DiagramLayer> {
    use EdgePrimitive::*;
    if n == 0 {
        return Err(Error::ZeroRank);
    }
    let d = 2 * n + 1;
    let mut edges = Vec::new();
    let mut push = |left, right, prim| edges.push(Edge { left, right, prim });
    match &kind {
        LayerKind::Elementary(i) => {
            let i = *i;
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if i < n {
                let (a, b, c, e) = (i, i + 1, 2 * n - i + 1, 2 * n - i + 2);
                for k in 1..=d {
                    if ![a, b, c, e].contains(&k) {
                        push(k, k, Identity);
                    }
                }
                push(a, a, Alpha);
                push(a, b, NegQ2n2);
                push(b, a, Q2n);
                push(b, b, AlphaStar);
                push(c, c, Alpha);
                push(c, e, Q2n2);
                push(e, c, NegQ2n);
                push(e, e, AlphaStar);
            } else {
                let (a, b, c) = (n, n + 1, n + 2);
                for k in 1..=d {
                    if ![a, b, c].contains(&k) {
                        push(k, k, Identity);
                    }
                }
                push(a, a, BlockAlphaSq);
                push(a, b, BlockUpperNeg);
                push(a, c, BlockQ2n2);
                push(b, a, BlockUpper);
                push(b, b, BlockMiddle);
                push(b, c, BlockLowerNeg);
                push(c, a, BlockQ2n);
                push(c, b, BlockLower);
                push(c, c, BlockAlphaStarSq);
            }
        }
        LayerKind::Torus(t) => {
            if t.len() != n {
                return Err(Error::RankMismatch(t.len(), n));
            }
            let tc: Vec<Complex64> = t.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            for k in 1..=d {
                let v = torus_value(&tc, n, k);
                push(k, k, Scalar { re: v.re, im: v.im });
            }
        }
    }
    edges.sort_by_key(|e| (e.left, e.right));
    Ok(DiagramLayer { n, kind, edges })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagram {
    pub n: usize,
    pub layers: Vec<DiagramLayer>,
}

impl Diagram {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            layers: Vec::new(),
        }
    }

    /// Elementary layers for the letters of `word`.
    pub fn for_word(n: usize, word: &Word) -> Result<Self> {
        let layers = word
            .letters()
            .iter()
            .map(|&i| layer(LayerKind::Elementary(i), n))
            .collect::<Result<_>>()?;
        Ok(Self { n, layers })
    }

    pub fn signature(&self) -> Vec<SpaceKind> {
        self.layers.iter().flat_map(|l| l.signature()).collect()
    }
}

pub fn concatenate(a: &Diagram, b: &Diagram) -> Result<Diagram> {
    if a.n != b.n {
        return Err(Error::RankMismatch(a.n, b.n));
    }
    let mut layers = a.layers.clone();
    layers.extend(b.layers.iter().cloned());
    Ok(Diagram { n: a.n, layers })
}

/// All left-to-right edge sequences from left node `l` to right node `k`.
pub fn paths(d: &Diagram, l: usize, k: usize) -> Result<Vec<Vec<Edge>>> {
    let max = 2 * d.n + 1;
    for node in [l, k] {
        if node == 0 || node > max {
            return Err(Error::NodeOutOfRange { node, max });
        }
    }
    // Nodes from which the target is reachable, layer by layer from the right.
    let nl = d.layers.len();
    let mut reach = vec![vec![false; max + 1]; nl + 1];
    reach[nl][k] = true;
    for j in (0..nl).rev() {
        for e in &d.layers[j].edges {
            if reach[j + 1][e.right] {
                reach[j][e.left] = true;
            }
        }
    }
    let mut out = Vec::new();
    if !reach[0][l] {
        return Ok(out);
    }
    let mut stack: Vec<Edge> = Vec::new();
    fn walk(
        d: &Diagram,
        reach: &[Vec<bool>],
        j: usize,
        node: usize,
        stack: &mut Vec<Edge>,
        out: &mut Vec<Vec<Edge>>,
    ) {
        if j == d.layers.len() {
            out.push(stack.clone());
            return;
        }
        for e in d.layers[j].edges.iter().filter(|e| e.left == node) {
            if reach[j + 1][e.right] {
                stack.push(*e);
                walk(d, reach, j + 1, e.right, stack, out);
                stack.pop();
            }
        }
    }
    walk(d, &reach, 0, l, &mut stack, &mut out);
    Ok(out)
}

/// Sum over paths of the tensor product of realized edges.
pub fn path_sum(d: &Diagram, l: usize, k: usize) -> Result<TensorOperator> {
    let mut acc = TensorOperator::zero(d.signature());
    for p in paths(d, l, k)? {
        let mut t = TensorOperator::scalar(Complex64::new(1.0, 0.0));
        for e in &p {
            t = t.tensor(&e.prim.realize());
        }
        acc = acc.add(&t)?;
    }
    Ok(acc.canonical())
}

pub fn render_dot(d: &Diagram) -> String {
    let mut s = String::from("digraph diagram {\n  rankdir=LR;\n  node [shape=circle];\n");
    let nodes = 2 * d.n + 1;
    let nl = d.layers.len();
    let name = |col: usize, i: usize| -> String {
        if col == 0 {
            format!("L{i}")
        } else if col == nl {
            format!("R{i}")
        } else {
            format!("M{col}_{i}")
        }
    };
    if nl > 0 {
        for col in 0..=nl {
            let _ = write!(s, "  {{ rank=same;");
            for i in (1..=nodes).rev() {
                let _ = write!(s, " {};", name(col, i));
            }
            s.push_str(" }\n");
        }
    }
    for (j, lay) in d.layers.iter().enumerate() {
        for e in &lay.edges {
            let label = match e.prim {
                EdgePrimitive::Scalar { re, im } => {
                    crate::qoperators::fmt_scalar(Complex64::new(re, im))
                }
                _ => e.prim.realize().to_string(),
            };
            let _ = writeln!(
                s,
                "  {} -> {} [style={}, label=\"{}\", tag=\"{}\"];",
                name(j, e.left),
                name(j + 1, e.right),
                e.prim.style(),
                label.replace('"', "'"),
                e.prim.tag()
            );
        }
    }
    s.push_str("}\n");
    s
}

/// Node relabeling `λ_k^{k+l}` from `{n-k+1..n+k+1}` into
/// `{n-k-l+1..n+k+l+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingMap {
    pub n: usize,
    pub from: usize,
    pub to: usize,
    /// `(j, λ(j))` for `j` in the domain, ascending.
    pub mapping: Vec<(usize, usize)>,
}

impl EmbeddingMap {
    pub fn domain(n: usize, k: usize) -> std::ops::RangeInclusive<usize> {
        n + 1 - k..=n + k + 1
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self {
            n,
            from: k,
            to: k,
            mapping: Self::domain(n, k).map(|j| (j, j)).collect(),
        }
    }

    pub fn apply(&self, j: usize) -> usize {
        self.mapping
            .iter()
            .find(|(a, _)| *a == j)
            .map(|&(_, b)| b)
            .expect("argument in domain")
    }
}

/// `λ_i^{i+1}` read off the occurrence counts in part `w_{i+1}`.
pub fn embedding_step(parts: &[Word], i: usize) -> Result<EmbeddingMap> {
    let n = parts.len();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let next = &parts[i];
    let once = |letter: usize| letter >= 1 && letter <= n && next.count(letter) == 1;
    let mapping = EmbeddingMap::domain(n, i)
        .map(|j| {
            let img = if j <= n {
                if once(j - 1) {
                    j - 1
                } else {
                    j
                }
            } else if j == n + 1 {
                j
            } else if once(2 * n + 1 - j) {
                j + 1
            } else {
                j
            };
            (j, img)
        })
        .collect();
    Ok(EmbeddingMap {
        n,
        from: i,
        to: i + 1,
        mapping,
    })
}

/// Composite of consecutive maps, applied first to last.
pub fn compose_embeddings(maps: &[EmbeddingMap]) -> Result<EmbeddingMap> {
    let first = maps.first().ok_or(Error::NonConsecutive)?;
    for w in maps.windows(2) {
        if w[0].to != w[1].from || w[0].n != w[1].n {
            return Err(Error::NonConsecutive);
        }
    }
    let mapping = first
        .mapping
        .iter()
        .map(|&(j, _)| (j, maps.iter().fold(j, |x, m| m.apply(x))))
        .collect();
    Ok(EmbeddingMap {
        n: first.n,
        from: first.from,
        to: maps.last().expect("nonempty").to,
        mapping,
    })
}

/// All `λ_i^n` for `i = 1..n` (identity for `i = n`).
pub fn embeddings_to_top(parts: &[Word]) -> Result<Vec<EmbeddingMap>> {
    let n = parts.len();
    (1..=n)
        .map(|i| {
            if i == n {
                Ok(EmbeddingMap::identity(n, n))
            } else {
                let steps = (i..n).map(|j| embedding_step(parts, j)).collect::<Result<Vec<_>>>()?;
                compose_embeddings(&steps)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub max_violation: f64,
    pub min_constant: f64,
    /// `C` for conditions (i) and (iii), indexed by domain node.
    pub constants: Vec<(usize, f64, f64)>,
    pub passed: bool,
}

/// Checks the four vacuum conditions for the tail `w_{k+1} ... w_{k+l}`.
pub fn verify_embedding(
    parts: &[Word],
    k: usize,
    l: usize,
    map: &EmbeddingMap,
    q: f64,
    tol: f64,
) -> Result<EmbeddingReport> {
    let n = parts.len();
    if map.from != k || map.n != n {
        return Err(Error::NonConsecutive);
    }
    let tail = parts[k..(k + l).min(n)]
        .iter()
        .fold(Word::default(), |acc, w| acc.concat(w));
    let table = rep_table(&RepSpec::new(n, tail))?;
    verify_embedding_table(&table, map, q, tol)
}

pub fn verify_embedding_table(
    table: &GeneratorImageTable,
    map: &EmbeddingMap,
    q: f64,
    tol: f64,
) -> Result<EmbeddingReport> {
    let vac = SparseVector::vacuum(table.signature.clone());
    let zeros = vec![0; table.signature.len()];
    let mut report = EmbeddingReport {
        max_violation: 0.0,
        min_constant: f64::INFINITY,
        constants: Vec::new(),
        passed: true,
    };
    for &(i, li) in &map.mapping {
        let mut consts = [0.0; 2];
        for (slot, adjoint) in [false, true].into_iter().enumerate() {
            for &(j, _) in &map.mapping {
                let op = table.get(j, li);
                let op = if adjoint { op.adjoint() } else { op.clone() };
                let out = op.apply(&vac, q)?;
                if j == i {
                    let (mass, c) = out.mass_on(&zeros);
                    let viol = if out.is_zero() { 1.0 } else { 1.0 - mass };
                    report.max_violation = report.max_violation.max(viol);
                    consts[slot] = c.norm();
                    report.min_constant = report.min_constant.min(c.norm());
                } else {
                    report.max_violation = report.max_violation.max(out.max_abs());
                }
            }
        }
        report.constants.push((i, consts[0], consts[1]));
    }
    report.passed = report.max_violation < tol && report.min_constant > tol;
    Ok(report)
}

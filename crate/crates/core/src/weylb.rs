//! Type-B Weyl group realized as signed permutations.
//!
//! `s_i` for `i < n` swaps positions `i` and `i+1`, `s_n` negates position `n`.
//! A word `s_{i_1} s_{i_2} ... s_{i_k}` denotes the composition of the
//! reflections, the rightmost one acting first.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SignedPermutation {
    n: usize,
    /// `images[i-1]` is the signed image of `e_i`.
    images: Vec<i32>,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            images: (1..=n as i32).collect(),
        }
    }

    pub fn from_images(images: Vec<i32>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        let mut seen = vec![false; n];
        for &x in &images {
            let a = x.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a - 1] {
                return Err(Error::Parse(format!("{images:?} is not a signed permutation")));
            }
            seen[a - 1] = true;
        }
        Ok(Self { n, images })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[i32] {
        &self.images
    }

    /// Signed image of `±e_i` encoded as a signed index.
    fn apply_index(&self, i: i32) -> i32 {
        let img = self.images[i.unsigned_abs() as usize - 1];
        if i < 0 {
            -img
        } else {
            img
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            images: other.images.iter().map(|&i| self.apply_index(i)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n];
        for (i, &x) in self.images.iter().enumerate() {
            let a = x.unsigned_abs() as usize - 1;
            images[a] = if x < 0 { -(i as i32 + 1) } else { i as i32 + 1 };
        }
        Self { n: self.n, images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| x == i as i32 + 1)
    }

    /// Action on a vector of `R^n`.
    pub fn act(&self, v: &[i32]) -> Vec<i32> {
        let mut out = vec![0; self.n];
        for (i, &c) in v.iter().enumerate() {
            let img = self.images[i];
            let j = img.unsigned_abs() as usize - 1;
            out[j] += if img < 0 { -c } else { c };
        }
        out
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self) -> usize {
        positive_roots(self.n)
            .iter()
            .filter(|beta| !is_positive(&self.act(beta)))
            .count()
    }

    pub fn from_word(n: usize, word: &Word) -> Result<Self> {
        let mut w = Self::identity(n);
        for &i in &word.0 {
            w = w.compose(&simple_reflection(i, n)?);
        }
        Ok(w)
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Letters are 1-based generator indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Self(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_reduced(&self, n: usize) -> Result<bool> {
        Ok(SignedPermutation::from_word(n, self)?.length() == self.len())
    }

    pub fn count(&self, letter: usize) -> usize {
        self.0.iter().filter(|&&x| x == letter).count()
    }

    /// Parses `"1,2,3"`; the empty string is the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::default());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad letter {t:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("s{i}")).collect();
        write!(f, "{}", parts.join(""))
    }
}

pub fn simple_reflection(i: usize, n: usize) -> Result<SignedPermutation> {
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let mut w = SignedPermutation::identity(n);
    if i < n {
        w.images.swap(i - 1, i);
    } else {
        w.images[n - 1] = -(n as i32);
    }
    Ok(w)
}

/// Positive roots `e_i ± e_j (i<j)` and `e_i`.
pub fn positive_roots(n: usize) -> Vec<Vec<i32>> {
    let mut roots = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        roots.push(e);
        for j in i + 1..n {
            let mut a = vec![0; n];
            a[i] = 1;
            a[j] = -1;
            roots.push(a);
            let mut b = vec![0; n];
            b[i] = 1;
            b[j] = 1;
            roots.push(b);
        }
    }
    roots
}

/// Simple root `α_i` (`e_i - e_{i+1}` or `e_n`).
pub fn simple_root(i: usize, n: usize) -> Vec<i32> {
    let mut a = vec![0; n];
    a[i - 1] = 1;
    if i < n {
        a[i] = -1;
    }
    a
}

fn is_positive(v: &[i32]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// All `2^n n!` elements, sorted.
pub fn all_elements(n: usize) -> Vec<SignedPermutation> {
    fn perms(rest: &mut Vec<i32>, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for idx in 0..rest.len() {
            let x = rest.remove(idx);
            for s in [x, -x] {
                cur.push(s);
                perms(rest, cur, out);
                cur.pop();
            }
            rest.insert(idx, x);
        }
    }
    let mut out = Vec::new();
    perms(&mut (1..=n as i32).collect(), &mut Vec::new(), &mut out);
    let mut els: Vec<_> = out
        .into_iter()
        .map(|images| SignedPermutation { n, images })
        .collect();
    els.sort();
    els
}

pub fn longest_element(n: usize) -> SignedPermutation {
    SignedPermutation {
        n,
        images: (1..=n as i32).map(|i| -i).collect(),
    }
}

/// One ψ factor `ψ_{r,k}^{(ε)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Psi {
    pub r: usize,
    pub eps: u8,
    pub k: usize,
}

impl Psi {
    /// Expanded letters: `s_r s_{r+1} ... s_{k-1}` for ε = 1 and
    /// `s_r ... s_{n-1} s_n s_{n-1} ... s_k` for ε = 2.
    pub fn word(&self, n: usize) -> Word {
        match self.eps {
            0 => Word::default(),
            1 => Word((self.r..self.k).collect()),
            _ => {
                let mut v: Vec<usize> = (self.r..n).collect();
                v.push(n);
                v.extend((self.k..n).rev());
                Word(v)
            }
        }
    }

    /// All admissible factors with first index `r`.
    pub fn options(r: usize, n: usize) -> Vec<Psi> {
        let mut out = vec![Psi { r, eps: 0, k: r }];
        out.extend((r + 1..=n).map(|k| Psi { r, eps: 1, k }));
        out.extend((r..=n).map(|k| Psi { r, eps: 2, k }));
        out
    }
}

/// `psi[r-1]` is the factor with first index `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub n: usize,
    pub psi: Vec<Psi>,
}

impl NormalForm {
    /// Parts `w_1, ..., w_n`; part `p` is the factor with index `n-p+1`.
    pub fn parts(&self) -> Vec<Word> {
        (1..=self.n).map(|p| self.psi[self.n - p].word(self.n)).collect()
    }

    pub fn word(&self) -> Word {
        Word(self.parts().into_iter().flat_map(|w| w.0).collect())
    }
}

pub fn normal_form(w: &SignedPermutation) -> NormalForm {
    let n = w.n;
    let mut psi = vec![Psi { r: 0, eps: 0, k: 0 }; n];
    let mut rest = w.clone();
    // Peel the rightmost part first: after removing the factor with index r,
    // the remainder must fix e_1, ..., e_r.
    for r in 1..=n {
        let found = Psi::options(r, n).into_iter().find_map(|p| {
            let f = SignedPermutation::from_word(n, &p.word(n)).expect("valid letters");
            let u = rest.compose(&f.inverse());
            (0..r).all(|i| u.images[i] == i as i32 + 1).then_some((p, u))
        });
        let (p, u) = found.expect("every element has a normal form");
        psi[r - 1] = p;
        rest = u;
    }
    debug_assert!(rest.is_identity());
    NormalForm { n, psi }
}

pub fn parts(w: &SignedPermutation) -> Vec<Word> {
    normal_form(w).parts()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParabolicSubset {
    pub n: usize,
    pub indices: BTreeSet<usize>,
}

impl ParabolicSubset {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&i) = indices.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        Ok(Self { n, indices })
    }

    /// `{n-k+1, ..., n}`.
    pub fn r_k(n: usize, k: usize) -> Self {
        Self {
            n,
            indices: (n + 1 - k.min(n)..=n).collect(),
        }
    }

    /// Homogeneous family: empty for `m = 1`, `{n-m+2, ..., n}` otherwise.
    pub fn r_m(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::ParabolicOutOfRange { m, n });
        }
        Ok(Self::r_k(n, m - 1))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }
}

/// `w = w' w''` with `w'` in the parabolic subgroup and `w''` without left
/// descents in `R`.
pub fn parabolic_decompose(
    w: &SignedPermutation,
    r: &ParabolicSubset,
) -> (SignedPermutation, SignedPermutation) {
    let n = w.n;
    let mut left = SignedPermutation::identity(n);
    let mut right = w.clone();
    let mut len = right.length();
    'outer: loop {
        for &j in &r.indices {
            let s = simple_reflection(j, n).expect("index checked");
            let cand = s.compose(&right);
            let l = cand.length();
            if l < len {
                right = cand;
                len = l;
                left = left.compose(&s);
                continue 'outer;
            }
        }
        break;
    }
    (left, right)
}

pub fn in_quotient(w: &SignedPermutation, r: &ParabolicSubset) -> bool {
    let inv = w.inverse();
    r.indices
        .iter()
        .all(|&j| is_positive(&inv.act(&simple_root(j, w.n))))
}

pub fn in_subgroup(w: &SignedPermutation, r: &ParabolicSubset) -> bool {
    normal_form(w)
        .word()
        .0
        .iter()
        .all(|&i| r.contains(i))
}

pub fn longest_quotient_element(n: usize, r: &ParabolicSubset) -> SignedPermutation {
    parabolic_decompose(&longest_element(n), r).1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassicalDimensions {
    pub quotient_dim: usize,
    pub group_dim: usize,
    pub subgroup_dim: usize,
}

pub fn classical_dimensions(n: usize, m: usize) -> Result<ClassicalDimensions> {
    let r = ParabolicSubset::r_m(n, m)?;
    let (w_sub, w_quot) = parabolic_decompose(&longest_element(n), &r);
    Ok(ClassicalDimensions {
        quotient_dim: 2 * w_quot.length() + n - m + 1,
        group_dim: 2 * longest_element(n).length() + n,
        subgroup_dim: 2 * w_sub.length() + m - 1,
    })
}

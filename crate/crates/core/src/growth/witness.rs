//! Lattice-reaching operator chains for `π_w`.
//!
//! For each nonempty part `w_i` of the normal form there is a family of
//! images `T_l = π_w(v^{n+i+1}_{λ(n-i+l)})`; applying the families part by
//! part, each in reversed order, with exponents `z` maps the vacuum to a
//! nonzero multiple of `e_z`.

use serde::Serialize;

use crate::diagrams::embeddings_to_top;
use crate::error::{Error, Result};
use crate::qoperators::{CompiledOperator, SparseVector};
use crate::repsoq::GeneratorImageTable;
use crate::weylb::{normal_form, SignedPermutation};

use super::compositions;

/// `(l_j, σ(j))` for `j = 1..r`, read in rank `i` on row `2i+1`.
pub fn last_family(r: usize, i: usize) -> Vec<(usize, usize)> {
    (1..=r)
        .map(|j| {
            if r >= i {
                let l = if j + r < 2 * i { 2 * i - j + 2 } else { j + 1 };
                let s = if 2 * i <= j + r && j <= r { 2 * i - j } else { j };
                (l, s)
            } else {
                (2 * i - j + 2, j)
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct WitnessStep {
    /// `(k, l)` of the generator `v_l^k` in the full table.
    pub generator: (usize, usize),
    /// 0-based tensor slot whose exponent drives this step.
    pub slot: usize,
    /// Number of generator images in the step.
    pub degree: usize,
    pub op: CompiledOperator,
}

#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub part: usize,
    pub steps: Vec<WitnessStep>,
}

#[derive(Debug, Clone)]
pub struct WitnessChain {
    pub families: Vec<WitnessFamily>,
    pub slots: usize,
}

impl WitnessChain {
    /// Largest exponent needed per unit of `|z|`.
    pub fn max_degree(&self) -> usize {
        self.families
            .iter()
            .flat_map(|f| &f.steps)
            .map(|s| s.degree)
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, z: &[i32], start: SparseVector, q: f64) -> Result<SparseVector> {
        let mut v = start;
        for fam in &self.families {
            for step in fam.steps.iter().rev() {
                for _ in 0..z[step.slot] {
                    v = step.op.apply(&v, q)?;
                }
            }
        }
        Ok(v)
    }
}

/// Row index and lower indices of the chain generators for part `i`, in
/// the top rank.
pub fn family_generators(parts: &[crate::weylb::Word], i: usize) -> Result<Vec<((usize, usize), usize)>> {
    let n = parts.len();
    let lam = &embeddings_to_top(parts)?[i - 1];
    Ok(last_family(parts[i - 1].len(), i)
        .into_iter()
        .map(|(l, s)| ((n + i + 1, lam.apply(n - i + l)), s))
        .collect())
}

/// Chain for `w` over a table built from the normal-form word of `w`.
pub fn witness_chain_for_table(w: &SignedPermutation, table: &GeneratorImageTable) -> Result<WitnessChain> {
    let nf = normal_form(w);
    let parts = nf.parts();
    let n = w.rank();
    if table.n != n || table.signature.len() != nf.word().len() {
        return Err(Error::Witness("table does not match the normal-form word".into()));
    }
    let mut families = Vec::new();
    let mut off = 0;
    for i in 1..=n {
        let r = parts[i - 1].len();
        if r > 0 {
            let steps = family_generators(&parts, i)?
                .into_iter()
                .map(|((k, l), s)| WitnessStep {
                    generator: (k, l),
                    slot: off + s - 1,
                    degree: 1,
                    op: table.get(k, l).compile(),
                })
                .collect();
            families.push(WitnessFamily { part: i, steps });
        }
        off += r;
    }
    Ok(WitnessChain { families, slots: off })
}

/// Family for the last part only.
pub fn witness_last_part(w: &SignedPermutation, table: &GeneratorImageTable) -> Result<WitnessFamily> {
    let n = w.rank();
    let chain = witness_chain_for_table(w, table)?;
    chain
        .families
        .into_iter()
        .find(|f| f.part == n)
        .ok_or(Error::EmptyPart)
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub r_prime: usize,
    pub count: u128,
    pub verified: u128,
    /// Smallest `|⟨e_z, ξ e_0⟩|` over the verified lattice points.
    pub min_amplitude: f64,
}

/// Checks that every `z` with `|z| = r'` is reached as a multiple of `e_z`.
pub fn lower_bound_for_chain(
    chain: &WitnessChain,
    table: &GeneratorImageTable,
    r_prime: usize,
    q: f64,
) -> Result<LowerBound> {
    let mut verified = 0u128;
    let mut count = 0u128;
    let mut min_amplitude = f64::INFINITY;
    for z in compositions(chain.slots, r_prime) {
        count += 1;
        let v = chain.apply(&z, SparseVector::vacuum(table.signature.clone()), q)?;
        let (frac, amp) = v.mass_on(&z);
        if frac > 1.0 - 1e-8 && amp.norm() > 0.0 {
            verified += 1;
            min_amplitude = min_amplitude.min(amp.norm());
        }
    }
    Ok(LowerBound {
        r_prime,
        count,
        verified,
        min_amplitude,
    })
}

//! The combinatorial derived matroid δM, its variant δ′M, and the val_X
//! upper bound on the rank function of any adjoint.
//!
//! Families of circuit sets are bitmasks over circuit indices, with
//! circuits in the integer order used by [`CircuitUniverse`].

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::{enumerate_adjoints, AdjointContext, CircuitUniverse, EnumerationOptions};
use crate::bitset::{self, bit, bits, size};
use crate::error::{Error, Result};
use crate::family::minimal_sets;
use crate::matroid::{weak_order_leq, Matroid};

/// Sets up to this many elements are tested for dependence by looking up
/// all their submasks; larger ones scan the antichain.
const SUBMASK_LOOKUP: usize = 16;

/// Largest circuit universe for which val_X tables are built.
pub const VALX_LIMIT: usize = 22;

/// An up-closed family of circuit sets, stored through its minimal members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependentClosure {
    universe: usize,
    minimal: Vec<u64>,
    lookup: HashSet<u64>,
    /// Every set with more elements than this is dependent.
    size_bound: Option<usize>,
    iterations: usize,
}

impl DependentClosure {
    /// The up-closure of `seeds`. Fails if the empty set is among them.
    pub fn new(universe: usize, seeds: Vec<u64>, size_bound: Option<usize>) -> Result<Self> {
        if seeds.contains(&0) {
            return Err(Error::EmptySetDependent);
        }
        let minimal = minimal_sets(seeds);
        let lookup = minimal.iter().copied().collect();
        Ok(DependentClosure { universe, minimal, lookup, size_bound, iterations: 0 })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Minimal dependent sets, sorted.
    pub fn minimal(&self) -> &[u64] {
        &self.minimal
    }

    /// Number of ε rounds that changed the family.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_dependent(&self, s: u64) -> bool {
        if self.size_bound.is_some_and(|b| size(s) > b) {
            return true;
        }
        if size(s) <= SUBMASK_LOOKUP {
            bitset::submasks(s).any(|t| self.lookup.contains(&t))
        } else {
            self.minimal.iter().any(|&d| d & !s == 0)
        }
    }

    /// The matroid whose dependent sets are this family.
    pub fn to_matroid(&self) -> Result<Matroid> {
        Matroid::from_hereditary(self.universe, |s| !self.is_dependent(s))
    }
}

/// One round of ε followed by ↑, on minimal members only.
///
/// For up-closed 𝔄 it is enough to combine minimal members: if A₁ ⊇ B₁ and
/// A₂ ⊇ B₂ are minimal, B₁ ∩ B₂ ⊆ A₁ ∩ A₂ is independent as well, and for
/// C ∈ A₁ ∩ A₂ either C lies in both Bᵢ, so (B₁ ∪ B₂) ∖ {C} is generated and
/// lies inside (A₁ ∪ A₂) ∖ {C}, or some Bᵢ avoids C and is already a
/// dependent subset of (A₁ ∪ A₂) ∖ {C}.
///
/// Eligibility of every pair is judged against the family as it was at the
/// start of the round.
pub fn eps_step(d: &DependentClosure) -> Result<DependentClosure> {
    Ok(eps_round(d, 0)?.map_or_else(|| d.clone(), |(next, _)| next))
}

/// A round in which only pairs involving a minimal set with index at least
/// `fresh_from` can contribute. Returns the grown family and the index where
/// its fresh members start, or `None` at a fixpoint.
fn eps_round(d: &DependentClosure, fresh_from: usize) -> Result<Option<(DependentClosure, usize)>> {
    if d.minimal.contains(&0) {
        return Err(Error::EmptySetDependent);
    }
    // With every set above the size bound dependent, a pair can only yield
    // something new if its union has at most bound + 1 members, which rules
    // out any member of size bound + 1 or more (the other one would have to
    // lie inside it).
    let cap = d.size_bound.unwrap_or(usize::MAX);
    let min: Vec<(usize, u64)> =
        d.minimal.iter().copied().enumerate().filter(|&(_, s)| size(s) <= cap).collect();
    let first_fresh = min.partition_point(|&(i, _)| i < fresh_from);
    let produced: HashSet<u64> = (first_fresh..min.len())
        .into_par_iter()
        .flat_map_iter(|j| {
            let b = min[j].1;
            min[..j]
                .iter()
                .flat_map(move |&(_, a)| pair_products(d, a, b, cap))
                .collect::<Vec<u64>>()
        })
        .collect();
    if produced.is_empty() {
        return Ok(None);
    }
    let mut next = d.clone();
    let split = next.absorb(produced.into_iter().collect());
    next.iterations += 1;
    Ok(Some((next, split)))
}

/// The sets (A ∪ B) ∖ {C} that the pair contributes beyond `d`.
fn pair_products(d: &DependentClosure, a: u64, b: u64, cap: usize) -> Vec<u64> {
    let inter = a & b;
    let union = a | b;
    if inter == 0 || size(union) > cap.saturating_add(1) || d.is_dependent(inter) {
        return Vec::new();
    }
    bits(inter).map(|c| union & !bit(c)).filter(|&s| !d.is_dependent(s)).collect()
}

impl DependentClosure {
    /// Add sets that are independent in the current family, keeping the
    /// antichain minimal. Surviving old members come first; returns the
    /// index of the first new one.
    fn absorb(&mut self, new: Vec<u64>) -> usize {
        let new = minimal_sets(new);
        let mut all: Vec<u64> =
            self.minimal.iter().copied().filter(|&d| !new.iter().any(|&s| s & !d == 0)).collect();
        let split = all.len();
        all.extend(new);
        self.lookup = all.iter().copied().collect();
        self.minimal = all;
        split
    }

    /// Iterate ε until nothing changes.
    pub fn fixpoint(mut self) -> Result<DependentClosure> {
        let mut fresh_from = 0;
        while let Some((next, split)) = eps_round(&self, fresh_from)? {
            self = next;
            fresh_from = split;
        }
        self.minimal.sort_unstable();
        Ok(self)
    }
}

/// Minimal members of 2^{C(M)} ∖ S(M). Every set with more than
/// rank(M*) circuits lies outside S(M), so sizes stop at rank(M*) + 1.
pub fn minimal_non_s(u: &CircuitUniverse) -> Vec<u64> {
    let k = u.len();
    let mut found: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    for t in 1..=(u.corank() + 1).min(k) {
        for s in bitset::k_subsets(k, t) {
            if u.in_s_family(s) {
                continue;
            }
            if bitset::submasks(s).any(|x| x != s && found.contains(&x)) {
                continue;
            }
            found.insert(s);
            out.push(s);
        }
    }
    out.sort_unstable();
    out
}

/// D(2^{C(M)} ∖ S(M)), the dependent sets of δM.
pub fn derived_dependents(m: &Matroid) -> Result<DependentClosure> {
    let u = CircuitUniverse::new(m);
    derived_dependents_in(&u)
}

fn derived_dependents_in(u: &CircuitUniverse) -> Result<DependentClosure> {
    DependentClosure::new(u.len(), minimal_non_s(u), Some(u.corank()))?.fixpoint()
}

/// The combinatorial derived matroid δM on the circuits of `m`.
pub fn derived_matroid(m: &Matroid) -> Result<Matroid> {
    derived_dependents(m)?.to_matroid()
}

/// D^{(rank(M*))}(2^{C(M)} ∖ S(M)), where each stage restarts the closure
/// from the seeds plus the previous stage's dependents of size at most k.
pub fn delta_prime_dependents(m: &Matroid) -> Result<DependentClosure> {
    let u = CircuitUniverse::new(m);
    let seeds = minimal_non_s(&u);
    let mut stage = DependentClosure::new(u.len(), seeds.clone(), Some(u.corank()))?;
    for k in 0..u.corank() {
        let mut s = seeds.clone();
        s.extend(stage.minimal().iter().copied().filter(|&d| size(d) <= k));
        stage = DependentClosure::new(u.len(), s, Some(u.corank()))?.fixpoint()?;
    }
    Ok(stage)
}

/// The variant δ′M.
pub fn delta_prime(m: &Matroid) -> Result<Matroid> {
    delta_prime_dependents(m)?.to_matroid()
}

/// Reference closure over the full power set: 𝔄₀ = `family` exactly as
/// given (not up-closed), 𝔄ᵢ₊₁ = ↑ε(𝔄ᵢ). Returns the limit as a
/// membership table. Only for tiny universes.
pub fn literal_closure(universe: usize, family: &[u64]) -> Result<Vec<bool>> {
    if universe > 12 {
        return Err(Error::TooLarge(format!("literal closure on {universe} circuits")));
    }
    if family.contains(&0) {
        return Err(Error::EmptySetDependent);
    }
    let total = 1usize << universe;
    let mut cur = vec![false; total];
    for &s in family {
        cur[s as usize] = true;
    }
    loop {
        let members: Vec<u64> = (0..total as u64).filter(|&s| cur[s as usize]).collect();
        let mut next = cur.clone();
        for &a in &members {
            for &b in &members {
                let inter = a & b;
                if cur[inter as usize] {
                    continue;
                }
                for c in bits(inter) {
                    next[((a | b) & !bit(c)) as usize] = true;
                }
            }
        }
        up_close(&mut next, universe);
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

fn up_close(t: &mut [bool], universe: usize) {
    for e in 0..universe {
        for s in 0..t.len() {
            if s & (1 << e) != 0 && t[s ^ (1 << e)] {
                t[s] = true;
            }
        }
    }
}

/// Reference δ′ stages on top of [`literal_closure`].
pub fn literal_delta_prime(universe: usize, family: &[u64], stages: usize) -> Result<Vec<bool>> {
    let mut stage: Vec<bool> = {
        let mut t = vec![false; 1 << universe];
        for &s in family {
            t[s as usize] = true;
        }
        t
    };
    for k in 0..stages {
        let mut seeds = family.to_vec();
        seeds.extend((0..stage.len() as u64).filter(|&s| stage[s as usize] && size(s) <= k));
        seeds.sort_unstable();
        seeds.dedup();
        stage = literal_closure(universe, &seeds)?;
    }
    Ok(stage)
}

/// 2^{C(M)} ∖ S(M) in full.
pub fn non_s_family(u: &CircuitUniverse) -> Vec<u64> {
    (0..1u64 << u.len()).filter(|&s| !u.in_s_family(s)).collect()
}

/// The circuit sets 𝒞_{𝒞_B,C} (C ∉ 𝒞_B) over all bases B: circuits of
/// every adjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XFamily {
    pub universe: usize,
    pub sets: Vec<u64>,
}

impl XFamily {
    pub fn new(u: &CircuitUniverse) -> XFamily {
        XFamily { universe: u.len(), sets: u.lopp_fundamental_circuits() }
    }

    pub fn of(m: &Matroid) -> XFamily {
        XFamily::new(&CircuitUniverse::new(m))
    }

    pub fn contains(&self, x: u64) -> bool {
        self.sets.binary_search(&x).is_ok()
    }
}

/// How a sequence member must relate to the union of its predecessors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum Properness {
    /// Xᵢ ⊄ X₁ ∪ … ∪ Xᵢ₋₁: every member brings a new element.
    #[default]
    NotContained,
    /// Xᵢ ⊊ X₁ ∪ … ∪ Xᵢ₋₁, members pairwise distinct.
    StrictSubset,
}

/// Check that `seq` is a proper X-sequence; the error carries the first bad
/// (0-based) position.
pub fn check_proper(x: &XFamily, seq: &[u64], mode: Properness) -> Result<()> {
    let mut union = 0u64;
    for (i, &s) in seq.iter().enumerate() {
        let ok = x.contains(s)
            && (i == 0
                || match mode {
                    Properness::NotContained => s & !union != 0,
                    Properness::StrictSubset => s & !union == 0 && s != union && !seq[..i].contains(&s),
                });
        if !ok {
            return Err(Error::NotProper(i));
        }
        union |= s;
    }
    Ok(())
}

/// val(F, A) = |F ∪ X₁ ∪ … ∪ X_k| − k for a proper sequence A.
pub fn val(x: &XFamily, f: u64, seq: &[u64], mode: Properness) -> Result<i64> {
    check_proper(x, seq, mode)?;
    let union = seq.iter().fold(f, |a, &s| a | s);
    Ok(size(union) as i64 - seq.len() as i64)
}

/// val_X on every subset of the circuit universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValX {
    universe: usize,
    table: Vec<i8>,
}

impl ValX {
    /// val_X(F) = min over W ⊇ F of |W| − max{g(U) | U ⊆ W}, where g(U) is
    /// the length of the longest proper sequence with union U; the optimum
    /// for F is attained at W = F ∪ U.
    pub fn new(x: &XFamily, mode: Properness) -> Result<ValX> {
        let k = x.universe;
        if k > VALX_LIMIT {
            return Err(Error::TooLarge(format!("val_X on {k} circuits")));
        }
        let total = 1usize << k;
        let mut best = vec![-1i8; total];
        best[0] = 0;
        match mode {
            Properness::NotContained => {
                for u in 0..total {
                    if best[u] < 0 {
                        continue;
                    }
                    for &s in &x.sets {
                        if s & !(u as u64) != 0 {
                            let v = u | s as usize;
                            best[v] = best[v].max(best[u] + 1);
                        }
                    }
                }
            }
            Properness::StrictSubset => {
                // the union never grows after the first member
                for &s in &x.sets {
                    let inside = x.sets.iter().filter(|&&t| t & !s == 0 && t != s).count();
                    let g = i8::try_from(1 + inside).map_err(|_| Error::TooLarge("sequence".into()))?;
                    best[s as usize] = best[s as usize].max(g);
                }
            }
        }
        // subset-max, then |W| − G(W), then superset-min
        for e in 0..k {
            for w in 0..total {
                if w & (1 << e) != 0 {
                    best[w] = best[w].max(best[w ^ (1 << e)]);
                }
            }
        }
        let mut table: Vec<i8> = (0..total).map(|w| w.count_ones() as i8 - best[w]).collect();
        for e in 0..k {
            for w in (0..total).rev() {
                if w & (1 << e) == 0 {
                    table[w] = table[w].min(table[w | (1 << e)]);
                }
            }
        }
        Ok(ValX { universe: k, table })
    }

    pub fn of(m: &Matroid) -> Result<ValX> {
        ValX::new(&XFamily::of(m), Properness::default())
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn get(&self, f: u64) -> i64 {
        self.table[f as usize] as i64
    }

    /// A witness (S, a, b) of f(S+a) + f(S+b) < f(S+a+b) + f(S), if any.
    /// The local inequality for all S, a, b is equivalent to submodularity.
    pub fn submodularity_violation(&self) -> Option<(u64, usize, usize)> {
        table_submodularity_violation(&self.table, self.universe)
    }
}

fn table_submodularity_violation(t: &[i8], k: usize) -> Option<(u64, usize, usize)> {
    (0..t.len()).find_map(|s| {
        let out: Vec<usize> = (0..k).filter(|&e| s & (1 << e) == 0).collect();
        out.iter().enumerate().find_map(|(i, &a)| {
            out[i + 1..].iter().find_map(|&b| {
                let (sa, sb, sab) = (s | 1 << a, s | 1 << b, s | 1 << a | 1 << b);
                let lhs = i32::from(t[sa]) + i32::from(t[sb]);
                (lhs < i32::from(t[sab]) + i32::from(t[s])).then_some((s as u64, a, b))
            })
        })
    })
}

/// val_X(F) for a single set.
pub fn val_x(m: &Matroid, f: u64) -> Result<i64> {
    Ok(ValX::of(m)?.get(f))
}

impl DependentClosure {
    /// Rank of every subset in the matroid with these dependents.
    pub fn rank_table(&self) -> Result<Vec<i8>> {
        let k = self.universe;
        if k > VALX_LIMIT {
            return Err(Error::TooLarge(format!("rank table on {k} circuits")));
        }
        let total = 1usize << k;
        let mut dep = vec![false; total];
        for &d in &self.minimal {
            dep[d as usize] = true;
        }
        for e in 0..k {
            for s in 0..total {
                if s & (1 << e) != 0 && dep[s ^ (1 << e)] {
                    dep[s] = true;
                }
            }
        }
        let mut rank = vec![0i8; total];
        for s in 1..total {
            rank[s] = if dep[s] {
                (0..k).filter(|&e| s & (1 << e) != 0).map(|e| rank[s ^ (1 << e)]).max().unwrap_or(0)
            } else {
                s.count_ones() as i8
            };
        }
        Ok(rank)
    }
}

/// Comparison of val_X with the rank function of δM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValxCheck {
    pub circuits: usize,
    /// First F with val_X(F) ≠ rank_δM(F): (F, val_X, rank).
    pub rank_mismatch: Option<(u64, i64, i64)>,
    pub submodularity_violation: Option<(u64, usize, usize)>,
    /// First D ∈ ↑(2^C ∖ S) with val_X(D) ≥ |D|.
    pub size_bound_violation: Option<u64>,
    pub max_value: i64,
    pub corank: usize,
}

impl ValxCheck {
    pub fn valx_is_rank(&self) -> bool {
        self.rank_mismatch.is_none() && self.submodularity_violation.is_none()
    }
}

pub fn valx_check(m: &Matroid) -> Result<ValxCheck> {
    let u = CircuitUniverse::new(m);
    let vx = ValX::new(&XFamily::new(&u), Properness::default())?;
    let d = derived_dependents_in(&u)?;
    let rank = d.rank_table()?;
    let seeds = DependentClosure::new(u.len(), minimal_non_s(&u), Some(u.corank()))?;
    let total = 1u64 << u.len();
    let rank_mismatch =
        (0..total).find(|&f| vx.get(f) != rank[f as usize] as i64).map(|f| (f, vx.get(f), rank[f as usize] as i64));
    let size_bound_violation = (0..total).find(|&s| seeds.is_dependent(s) && vx.get(s) >= size(s) as i64);
    Ok(ValxCheck {
        circuits: u.len(),
        rank_mismatch,
        submodularity_violation: vx.submodularity_violation(),
        size_bound_violation,
        max_value: vx.table.iter().copied().max().unwrap_or(0) as i64,
        corank: u.corank(),
    })
}

/// Does val_X agree with the rank function of δM on every subset, and is
/// it submodular?
pub fn check_valx_is_rank(m: &Matroid) -> Result<bool> {
    Ok(valx_check(m)?.valx_is_rank())
}

/// Experimental comparison of δM, δ′M, val_X and the maximal adjoints.
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub circuits: usize,
    pub corank: usize,
    pub delta_bases: usize,
    pub delta_is_adjoint: bool,
    pub delta_prime_bases: usize,
    pub delta_prime_is_adjoint: bool,
    pub delta_equals_delta_prime: bool,
    pub adjoints: usize,
    pub enumeration_complete: bool,
    /// Basis counts of the weak-order maximal adjoints.
    pub maximal_adjoint_bases: Vec<usize>,
    /// Whether δ′M equals the unique maximal adjoint, when there is one.
    pub delta_prime_is_maximal_adjoint: Option<bool>,
    /// Adjoints strictly above δ′M in weak order (expected none).
    pub adjoints_above_delta_prime: usize,
    /// Whether val_X is the rank function of δ′M (None above the table limit).
    pub valx_is_rank_of_delta_prime: Option<bool>,
    pub valx_submodular: Option<bool>,
}

pub fn conjecture_report(m: &Matroid, opts: EnumerationOptions) -> Result<ConjectureReport> {
    let u = CircuitUniverse::new(m);
    let ctx = AdjointContext::new(m);
    let delta = derived_dependents_in(&u)?;
    let delta_m = delta.to_matroid()?;
    let prime = delta_prime_dependents(m)?;
    let prime_m = prime.to_matroid()?;
    let report = enumerate_adjoints(m, opts)?;
    let maximal: Vec<&Matroid> = report.maximal.iter().map(|&i| &report.candidates[i].matroid).collect();
    let mut above = 0;
    for c in &report.candidates {
        if c.matroid != prime_m && weak_order_leq(&prime_m, &c.matroid)? {
            above += 1;
        }
    }
    let (valx_rank, valx_sub) = if u.len() <= VALX_LIMIT {
        let vx = ValX::new(&XFamily::new(&u), Properness::default())?;
        let rank = prime.rank_table()?;
        let same = (0..1u64 << u.len()).all(|f| vx.get(f) == rank[f as usize] as i64);
        (Some(same), Some(vx.submodularity_violation().is_none()))
    } else {
        (None, None)
    };
    Ok(ConjectureReport {
        circuits: u.len(),
        corank: u.corank(),
        delta_bases: delta_m.bases().len(),
        delta_is_adjoint: ctx.is_adjoint(&delta_m)?,
        delta_prime_bases: prime_m.bases().len(),
        delta_prime_is_adjoint: ctx.is_adjoint(&prime_m)?,
        delta_equals_delta_prime: delta_m == prime_m,
        adjoints: report.count,
        enumeration_complete: report.complete,
        maximal_adjoint_bases: maximal.iter().map(|n| n.bases().len()).collect(),
        delta_prime_is_maximal_adjoint: (maximal.len() == 1).then(|| *maximal[0] == prime_m),
        adjoints_above_delta_prime: above,
        valx_is_rank_of_delta_prime: valx_rank,
        valx_submodular: valx_sub,
    })
}

//! Adjoint matroids: the lattice (L*)^opp, the ceiling family S(M), the
//! three adjoint characterizations, and exhaustive enumeration.
//!
//! Everything is indexed by the circuits of M in integer order. In
//! (L*)^opp the atoms are the circuits, the join of a circuit set S is the
//! flat E ∖ ∪S of M*, a circuit C lies below it iff C ⊆ ∪S, and its rank is
//! the nullity |∪S| − r_M(∪S).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::{self, bit, bits, size};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::iso::is_isomorphic;
use crate::lattice::{lattice_of_flats, FiniteLattice};
use crate::matroid::Matroid;
use crate::nbb;

/// The circuits of a matroid as the ground set of its adjoints.
#[derive(Clone, Debug)]
pub struct CircuitUniverse {
    m: Matroid,
    circuits: Vec<u64>,
    corank: usize,
}

impl CircuitUniverse {
    pub fn new(m: &Matroid) -> CircuitUniverse {
        CircuitUniverse { m: m.clone(), circuits: m.circuits().to_vec(), corank: m.corank() }
    }

    pub fn matroid(&self) -> &Matroid {
        &self.m
    }

    pub fn circuits(&self) -> &[u64] {
        &self.circuits
    }

    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    /// Rank every adjoint must have.
    pub fn corank(&self) -> usize {
        self.corank
    }

    pub fn index_of(&self, c: u64) -> Option<usize> {
        self.circuits.binary_search(&c).ok()
    }

    /// Union of the circuits in `s` (a set of circuit indices).
    pub fn union(&self, s: u64) -> u64 {
        bits(s).fold(0, |u, i| u | self.circuits[i])
    }

    pub fn lopp_rank(&self, s: u64) -> usize {
        self.m.nullity(self.union(s))
    }

    pub fn in_s_family(&self, s: u64) -> bool {
        size(s) <= self.lopp_rank(s)
    }

    /// Every subset of `s` lies in S(M).
    pub fn is_s_full(&self, s: u64) -> bool {
        bitset::submasks(s).all(|t| self.in_s_family(t))
    }

    /// Independence in (L*)^opp: an order of `a` whose every suffix S
    /// leaves no circuit of `a ∖ S` inside `∪S`.
    pub fn is_lopp_independent(&self, a: u64) -> bool {
        let idx: Vec<usize> = bits(a).collect();
        let k = idx.len();
        if k > self.lopp_rank(a) {
            return false;
        }
        let states = 1usize << k;
        let mut union = vec![0u64; states];
        let mut reach = vec![false; states];
        reach[0] = true;
        for s in 1..states {
            let low = s.trailing_zeros() as usize;
            union[s] = union[s & (s - 1)] | self.circuits[idx[low]];
            let u = union[s];
            let closed = (0..k)
                .filter(|&j| s >> j & 1 == 0)
                .all(|j| !bitset::is_subset(self.circuits[idx[j]], u));
            if closed {
                reach[s] = bits(s as u64).any(|i| reach[s ^ (1 << i)]);
            }
        }
        reach[states - 1]
    }

    /// 𝒞_B = {C_{B,i} | i ∉ B} as circuit indices.
    pub fn fundamental_family(&self, basis: u64) -> Result<u64> {
        if !self.m.is_basis(basis) {
            return Err(Error::NotABasis);
        }
        let mut out = 0;
        for e in bits(self.m.ground() & !basis) {
            let c = self.m.fundamental_circuit(basis, e)?;
            out |= bit(self.index_of(c).expect("fundamental circuit is a circuit"));
        }
        Ok(out)
    }

    /// 𝒞_{𝒞_B,C} = {C_{B,e} | e ∈ C ∖ B} ∪ {C}.
    pub fn lopp_fundamental_circuit(&self, basis: u64, c: usize) -> Result<u64> {
        let cb = self.fundamental_family(basis)?;
        if cb & bit(c) != 0 {
            return Err(Error::CircuitIsFundamental);
        }
        let mut out = bit(c);
        for e in bits(self.circuits[c] & !basis) {
            let f = self.m.fundamental_circuit(basis, e)?;
            out |= bit(self.index_of(f).expect("circuit"));
        }
        Ok(out)
    }

    /// Every 𝒞_{𝒞_B,C}, deduplicated.
    pub fn lopp_fundamental_circuits(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .m
            .bases()
            .iter()
            .flat_map(|&b| {
                let cb = self.fundamental_family(b).expect("basis");
                (0..self.len())
                    .filter(move |&c| cb & bit(c) == 0)
                    .map(move |c| self.lopp_fundamental_circuit(b, c).expect("non-fundamental"))
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// (L*)^opp together with the circuit behind each atom position.
#[derive(Clone, Debug)]
pub struct LoppLattice {
    pub lattice: FiniteLattice,
    pub atom_circuit: Vec<usize>,
}

pub fn lopp_lattice(m: &Matroid) -> LoppLattice {
    let u = CircuitUniverse::new(m);
    let lf = lattice_of_flats(&m.dual());
    let lattice = lf.lattice.dual();
    let ground = m.ground();
    let atom_circuit = lattice
        .atoms()
        .iter()
        .map(|&a| u.index_of(ground & !lf.flats[a]).expect("hyperplane complement is a circuit"))
        .collect();
    LoppLattice { lattice, atom_circuit }
}

/// Which construction of I((L*)^opp) to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoppRoute {
    /// NBB independence on the explicit lattice.
    Lattice,
    /// Downward closure of the outputs of the circuit-replacement process.
    Replacement,
}

pub fn lopp_independents(m: &Matroid, route: LoppRoute) -> SetFamily {
    let u = CircuitUniverse::new(m);
    match route {
        LoppRoute::Lattice => {
            let ll = lopp_lattice(m);
            nbb::independence_family(&ll.lattice).remap(&ll.atom_circuit, u.len())
        }
        LoppRoute::Replacement => {
            SetFamily::new(u.len(), replacement_maximal(&u)).downward_closure()
        }
    }
}

/// Maximal sets produced by starting at 𝒞_B and repeatedly replacing
/// `C_{B,i}` by a circuit `C` with `i ∈ C ∖ (B ∪ earlier replacements)`.
pub fn replacement_maximal(u: &CircuitUniverse) -> Vec<u64> {
    let m = u.matroid();
    let mut out: HashSet<u64> = HashSet::new();
    for &b in m.bases() {
        let outside = m.ground() & !b;
        let fund: Vec<(usize, usize)> = bits(outside)
            .map(|e| (e, u.index_of(m.fundamental_circuit(b, e).expect("basis")).expect("circuit")))
            .collect();
        let start = fund.iter().fold(0u64, |s, &(_, c)| s | bit(c));
        let mut seen: HashSet<(u64, u64, u64)> = HashSet::new();
        let mut stack = vec![(start, 0u64, 0u64)];
        while let Some((set, replaced, used)) = stack.pop() {
            if !seen.insert((set, replaced, used)) {
                continue;
            }
            out.insert(set);
            for &(i, ci) in &fund {
                if replaced & bit(i) != 0 || used & bit(i) != 0 {
                    continue;
                }
                for (c, &circ) in u.circuits().iter().enumerate() {
                    if circ & bit(i) != 0 {
                        let next = (set & !bit(ci)) | bit(c);
                        stack.push((next, replaced | bit(i), used | circ));
                    }
                }
            }
        }
    }
    let mut v: Vec<u64> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Verdicts of the independent adjoint characterizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RouteVerdicts {
    /// Rank n − d and I((L*)^opp) ⊆ I(N) ⊆ S(M).
    pub sandwich: bool,
    /// For every non-coloop i, {C | i ∉ C} is a hyperplane of N.
    pub hyperplane: bool,
    /// Every 𝒞_B is a basis and every 𝒞_{𝒞_B,C} a circuit of N.
    pub fundamental: bool,
}

impl RouteVerdicts {
    pub fn agree(&self) -> bool {
        self.sandwich == self.hyperplane && self.hyperplane == self.fundamental
    }
}

/// Shared per-matroid data for repeated adjoint checks.
#[derive(Clone, Debug)]
pub struct AdjointContext {
    pub universe: CircuitUniverse,
    /// Size-(n−d) members of I((L*)^opp); all of its maximal sets.
    pub mandatory: Vec<u64>,
    /// Size-(n−d) circuit sets all of whose subsets lie in S(M).
    pub allowed: Vec<u64>,
    fundamental_families: Vec<u64>,
    lopp_circuits: Vec<u64>,
}

impl AdjointContext {
    pub fn new(m: &Matroid) -> AdjointContext {
        let universe = CircuitUniverse::new(m);
        let r = universe.corank();
        let k = universe.len();
        let rsets: Vec<u64> = if r <= k { bitset::k_subsets(k, r).collect() } else { Vec::new() };
        let mandatory: Vec<u64> =
            rsets.par_iter().copied().filter(|&s| universe.is_lopp_independent(s)).collect();
        let allowed: Vec<u64> =
            rsets.par_iter().copied().filter(|&s| universe.is_s_full(s)).collect();
        let fundamental_families = m
            .bases()
            .iter()
            .map(|&b| universe.fundamental_family(b).expect("basis"))
            .collect();
        let lopp_circuits = universe.lopp_fundamental_circuits();
        AdjointContext { universe, mandatory, allowed, fundamental_families, lopp_circuits }
    }

    /// Allowed sets that are not mandatory.
    pub fn free(&self) -> Vec<u64> {
        let mand: HashSet<u64> = self.mandatory.iter().copied().collect();
        self.allowed.iter().copied().filter(|s| !mand.contains(s)).collect()
    }

    fn check_ground(&self, n: &Matroid) -> Result<()> {
        if n.n() != self.universe.len() {
            return Err(Error::GroundSetMismatch(n.n(), self.universe.len()));
        }
        Ok(())
    }

    pub fn sandwich(&self, n: &Matroid) -> bool {
        n.rank() == self.universe.corank()
            && self.mandatory.iter().all(|&s| n.is_basis(s))
            && n.bases().iter().all(|&b| self.universe.is_s_full(b))
    }

    pub fn hyperplane(&self, n: &Matroid) -> bool {
        let m = self.universe.matroid();
        let r = self.universe.corank();
        n.rank() == r
            && (0..m.n()).filter(|&i| !m.is_coloop(i)).all(|i| {
                let h = self
                    .universe
                    .circuits()
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c & bit(i) == 0)
                    .fold(0u64, |s, (j, _)| s | bit(j));
                r >= 1 && n.rank_of(h) == r - 1 && n.closure(h) == h
            })
    }

    pub fn fundamental(&self, n: &Matroid) -> bool {
        self.fundamental_families.iter().all(|&cb| n.is_basis(cb))
            && self.lopp_circuits.iter().all(|&c| n.is_circuit(c))
    }

    /// The literal checking loop: every 𝒞_B a basis, and no 𝒞_{𝒞_B,C}
    /// (C ∉ 𝒞_B) contained in a basis. It tests dependence only.
    pub fn literal_containment_check(&self, n: &Matroid) -> bool {
        self.fundamental_families.iter().all(|&cb| n.is_basis(cb))
            && self.lopp_circuits.iter().all(|&c| !n.is_independent(c))
    }

    pub fn routes(&self, n: &Matroid) -> Result<RouteVerdicts> {
        self.check_ground(n)?;
        Ok(RouteVerdicts {
            sandwich: self.sandwich(n),
            hyperplane: self.hyperplane(n),
            fundamental: self.fundamental(n),
        })
    }

    pub fn is_adjoint(&self, n: &Matroid) -> Result<bool> {
        let v = self.routes(n)?;
        if !v.agree() {
            return Err(Error::RouteDisagreement(format!("{v:?}")));
        }
        Ok(v.sandwich)
    }
}

/// Is `n` (a matroid on the circuits of `m`, in integer order) an adjoint?
pub fn is_adjoint(m: &Matroid, n: &Matroid) -> Result<bool> {
    AdjointContext::new(m).is_adjoint(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationOptions {
    /// Abort after this many search nodes (0 = unbounded).
    pub node_budget: u64,
    /// Split the search into this many prefix subproblems per worker.
    pub split_depth: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { node_budget: 0, split_depth: 6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub bases: usize,
    pub class: usize,
    pub minimal: bool,
    pub maximal: bool,
    #[serde(skip)]
    pub matroid: Matroid,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoClass {
    pub id: usize,
    pub bases: usize,
    pub members: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EnumerationStats {
    pub circuits: usize,
    pub mandatory: usize,
    pub free: usize,
    pub nodes: u64,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointReport {
    pub count: usize,
    /// basis count → number of adjoints
    pub histogram: BTreeMap<usize, usize>,
    pub classes: Vec<IsoClass>,
    /// Indices into `candidates` of weak-order minimal / maximal adjoints.
    pub minimal: Vec<usize>,
    pub maximal: Vec<usize>,
    pub candidates: Vec<Candidate>,
    /// False when the node budget ran out before the search finished.
    pub complete: bool,
    pub stats: EnumerationStats,
}

impl AdjointReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Exchange-axiom search over the free sets. Each free set is a variable
/// (IN = basis). Whenever two IN sets B1, B2 and x ∈ B1 ∖ B2 leave exactly
/// one possible target B1 − x + y, that target is forced IN; none is a
/// conflict. Clauses are generated when their second basis turns IN.
struct Search<'a> {
    sets: &'a [u64],
    free_start: usize,
    index: HashMap<u64, u32>,
    budget: u64,
    nodes: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

const UNK: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

#[derive(Clone)]
struct State {
    status: Vec<u8>,
    clauses: Vec<Vec<u32>>,
}

impl Search<'_> {
    /// Clause for the ordered pair (p, q): some `p − x + y` must be IN.
    /// `None` when already satisfied by a mandatory target.
    fn pair_clauses(&self, p: u64, q: u64, out: &mut Vec<Vec<u32>>) {
        for x in bits(p & !q) {
            let mut lits = Vec::new();
            let mut satisfied = false;
            for y in bits(q & !p) {
                let t = (p & !bit(x)) | bit(y);
                if let Some(&i) = self.index.get(&t) {
                    if (i as usize) < self.free_start {
                        satisfied = true;
                        break;
                    }
                    lits.push(i);
                }
            }
            if !satisfied {
                out.push(lits);
            }
        }
    }

    fn set_in(&self, st: &mut State, v: usize) {
        st.status[v] = IN;
        let p = self.sets[v];
        let mut fresh = Vec::new();
        for (w, &s) in st.status.iter().enumerate() {
            if s == IN && w != v {
                self.pair_clauses(p, self.sets[w], &mut fresh);
                self.pair_clauses(self.sets[w], p, &mut fresh);
            }
        }
        st.clauses.extend(fresh);
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&self, st: &mut State) -> bool {
        loop {
            let mut forced = None;
            for c in &st.clauses {
                let mut open = None;
                let mut n_open = 0;
                let mut sat = false;
                for &l in c {
                    match st.status[l as usize] {
                        IN => {
                            sat = true;
                            break;
                        }
                        UNK => {
                            n_open += 1;
                            open = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                match n_open {
                    0 => return false,
                    1 => {
                        forced = open;
                        break;
                    }
                    _ => {}
                }
            }
            match forced {
                Some(v) => self.set_in(st, v as usize),
                None => return true,
            }
        }
    }

    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget > 0 && n > self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn solve(&self, mut st: State, out: &mut Vec<Vec<u8>>) {
        if !self.tick() || !self.propagate(&mut st) {
            return;
        }
        let Some(v) = (self.free_start..self.sets.len()).find(|&v| st.status[v] == UNK) else {
            out.push(st.status);
            return;
        };
        let mut with = st.clone();
        self.set_in(&mut with, v);
        self.solve(with, out);
        st.status[v] = OUT;
        self.solve(st, out);
    }

    /// Partial assignments of the first `depth` open variables that survive
    /// propagation, in search order.
    fn prefixes(&self, st: State, depth: usize, out: &mut Vec<State>) {
        let mut st = st;
        if !self.propagate(&mut st) {
            return;
        }
        let open = (self.free_start..self.sets.len()).find(|&v| st.status[v] == UNK);
        match open {
            Some(v) if depth > 0 => {
                let mut with = st.clone();
                self.set_in(&mut with, v);
                self.prefixes(with, depth - 1, out);
                st.status[v] = OUT;
                self.prefixes(st, depth - 1, out);
            }
            _ => out.push(st),
        }
    }
}

/// All adjoints of `m`, grouped and compared.
pub fn enumerate_adjoints(m: &Matroid, opts: EnumerationOptions) -> Result<AdjointReport> {
    let t0 = Instant::now();
    let ctx = AdjointContext::new(m);
    let u = &ctx.universe;
    if u.is_empty() {
        return Err(Error::NoCircuits);
    }
    let free = ctx.free();
    let mut sets = ctx.mandatory.clone();
    let free_start = sets.len();
    sets.extend(&free);
    let index: HashMap<u64, u32> = sets.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
    let nodes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let search = Search {
        sets: &sets,
        free_start,
        index,
        budget: opts.node_budget,
        nodes: &nodes,
        exhausted: &exhausted,
    };

    // mandatory pairs give the root clauses
    let mut root = State { status: vec![UNK; sets.len()], clauses: Vec::new() };
    root.status[..free_start].fill(IN);
    let mand = &sets[..free_start];
    let mut root_clauses: Vec<Vec<u32>> = (0..free_start)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut local = Vec::new();
            for j in 0..free_start {
                if i != j {
                    search.pair_clauses(mand[i], mand[j], &mut local);
                }
            }
            local
        })
        .collect();
    for c in &mut root_clauses {
        c.sort_unstable();
    }
    root_clauses.sort();
    root_clauses.dedup();
    root.clauses = root_clauses;

    let mut prefixes = Vec::new();
    search.prefixes(root, opts.split_depth, &mut prefixes);
    let leaves: Vec<Vec<Vec<u8>>> = prefixes
        .into_par_iter()
        .map(|st| {
            let mut out = Vec::new();
            search.solve(st, &mut out);
            out
        })
        .collect();

    let mut families: Vec<Vec<u64>> = leaves
        .into_iter()
        .flatten()
        .map(|status| {
            let mut b: Vec<u64> =
                (0..sets.len()).filter(|&i| status[i] == IN).map(|i| sets[i]).collect();
            b.sort_unstable();
            b
        })
        .collect();
    families.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut adjoints = Vec::with_capacity(families.len());
    for bases in families {
        let n = Matroid::from_bases(u.len(), bases)?;
        if ctx.is_adjoint(&n)? {
            adjoints.push(n);
        }
    }
    let mut report = summarize(adjoints);
    report.complete = !exhausted.load(Ordering::Relaxed);
    report.stats = EnumerationStats {
        circuits: u.len(),
        mandatory: free_start,
        free: free.len(),
        nodes: nodes.load(Ordering::Relaxed),
        elapsed_ms: t0.elapsed().as_millis(),
    };
    Ok(report)
}

/// Group adjoints (already in report order) by isomorphism and weak order.
fn summarize(adjoints: Vec<Matroid>) -> AdjointReport {
    let mut classes: Vec<IsoClass> = Vec::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(adjoints.len());
    for (i, n) in adjoints.iter().enumerate() {
        let found = reps.iter().position(|&r| {
            adjoints[r].bases().len() == n.bases().len() && is_isomorphic(&adjoints[r], n).is_some()
        });
        let id = match found {
            Some(c) => c,
            None => {
                reps.push(i);
                classes.push(IsoClass { id: classes.len(), bases: n.bases().len(), members: 0 });
                classes.len() - 1
            }
        };
        classes[id].members += 1;
        class_of.push(id);
    }
    let families: Vec<HashSet<u64>> =
        adjoints.iter().map(|n| n.bases().iter().copied().collect()).collect();
    let below = |a: usize, b: usize| -> bool {
        a != b && families[a].len() < families[b].len() && families[a].is_subset(&families[b])
    };
    let k = adjoints.len();
    let minimal: Vec<usize> = (0..k).filter(|&i| !(0..k).any(|j| below(j, i))).collect();
    let maximal: Vec<usize> = (0..k).filter(|&i| !(0..k).any(|j| below(i, j))).collect();
    let mut histogram = BTreeMap::new();
    for n in &adjoints {
        *histogram.entry(n.bases().len()).or_insert(0) += 1;
    }
    let candidates = adjoints
        .into_iter()
        .enumerate()
        .map(|(i, n)| Candidate {
            bases: n.bases().len(),
            class: class_of[i],
            minimal: minimal.contains(&i),
            maximal: maximal.contains(&i),
            matroid: n,
        })
        .collect();
    AdjointReport {
        count: k,
        histogram,
        classes,
        minimal,
        maximal,
        candidates,
        complete: true,
        stats: EnumerationStats::default(),
    }
}

/// The matroid whose bases are the size-(n−d) members of I((L*)^opp), if
/// that family is a matroid.
pub fn lower_matroid(m: &Matroid) -> Option<Matroid> {
    let ctx = AdjointContext::new(m);
    Matroid::from_bases(ctx.universe.len(), ctx.mandatory).ok()
}

/// The matroid whose bases are the allowed sets, if that family is a matroid.
pub fn upper_matroid(m: &Matroid) -> Option<Matroid> {
    let ctx = AdjointContext::new(m);
    Matroid::from_bases(ctx.universe.len(), ctx.allowed).ok()
}

/// For a modular `m`, the adjoint given by I((L*)^opp). With `confirm`,
/// also enumerate and return `None` unless it is the only adjoint.
pub fn unique_adjoint_if_modular(m: &Matroid, confirm: bool) -> Result<Option<Matroid>> {
    if !lattice_of_flats(m).lattice.is_modular() {
        return Err(Error::NotModular);
    }
    if m.circuits().is_empty() {
        return Ok(Some(Matroid::free(0)));
    }
    let Some(low) = lower_matroid(m) else { return Ok(None) };
    if !is_adjoint(m, &low)? {
        return Ok(None);
    }
    if confirm {
        let report = enumerate_adjoints(m, EnumerationOptions::default())?;
        if !(report.complete && report.count == 1 && report.candidates[0].matroid == low) {
            return Ok(None);
        }
    }
    Ok(Some(low))
}

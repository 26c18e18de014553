//! Matroids on ground sets of at most 64 elements, given by their bases.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::{self, bit, bits, is_subset, size};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::gf::GFMatrix;

/// Ground sets up to this size get a dense independence table.
const DENSE_LIMIT: usize = 22;

#[derive(Clone)]
enum Independents {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl Independents {
    fn contains(&self, s: u64) -> bool {
        match self {
            Independents::Dense(t) => t[(s >> 6) as usize] >> (s & 63) & 1 == 1,
            Independents::Sparse(h) => h.contains(&s),
        }
    }
}

#[derive(Clone)]
pub struct Matroid {
    n: usize,
    rank: usize,
    bases: Vec<u64>,
    indep: OnceLock<Independents>,
    circuits: OnceLock<Vec<u64>>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("n", &self.n)
            .field("rank", &self.rank)
            .field("bases", &self.bases.len())
            .finish()
    }
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bases == other.bases
    }
}

impl Eq for Matroid {}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatroidJson {
    Bases { n: usize, bases: Vec<Vec<usize>> },
    Matrix { field: u32, matrix: Vec<Vec<u32>> },
}

impl Matroid {
    /// Validated construction from a basis family.
    pub fn from_bases(n: usize, bases: Vec<u64>) -> Result<Matroid> {
        let m = Self::checked_shape(n, bases)?;
        if let Some(msg) = exchange_violation(&m.bases) {
            return Err(Error::ExchangeAxiomViolated(msg));
        }
        Ok(m)
    }

    /// Construction without the exchange-axiom check, for families that are
    /// matroids by construction.
    pub fn from_bases_unchecked(n: usize, bases: Vec<u64>) -> Matroid {
        Self::checked_shape(n, bases).expect("well-formed basis family")
    }

    fn checked_shape(n: usize, mut bases: Vec<u64>) -> Result<Matroid> {
        if n > 64 {
            return Err(Error::TooLarge(format!("ground set {n} > 64")));
        }
        bases.sort_unstable();
        bases.dedup();
        let first = *bases.first().ok_or(Error::EmptyFamily)?;
        let rank = size(first);
        if bases.iter().any(|&b| size(b) != rank) {
            return Err(Error::UnequalSizes);
        }
        if bases.iter().any(|&b| !is_subset(b, bitset::full(n))) {
            return Err(Error::Format("basis element outside ground set".into()));
        }
        Ok(Matroid { n, rank, bases, indep: OnceLock::new(), circuits: OnceLock::new() })
    }

    /// The matroid whose independent sets are those accepted by `indep`,
    /// which must be hereditary. Independent sets are grown level by level
    /// and augmentation is checked only for pairs I, J = I − x + y + z.
    /// That suffices: a violating pair (I, J) with k = |I ∖ J| ≥ 2 minimal
    /// gives, for x ∈ I ∖ J, an augmentation K = I − x + e from J (k − 1
    /// < k), then K + f from J, and the local case for I and K + f yields
    /// I + e or I + f independent.
    pub fn from_hereditary(n: usize, indep: impl Fn(u64) -> bool + Sync) -> Result<Matroid> {
        if n > 64 {
            return Err(Error::TooLarge(format!("ground set {n} > 64")));
        }
        if !indep(0) {
            return Err(Error::EmptySetDependent);
        }
        let ground = bitset::full(n);
        // extension masks of the previous and current level
        let mut prev: HashMap<u64, u64> = HashMap::new();
        let mut level: Vec<u64> = vec![0];
        loop {
            let ext: HashMap<u64, u64> = level
                .par_iter()
                .map(|&s| {
                    let e = bits(ground & !s).filter(|&e| indep(s | bit(e))).fold(0, |a, e| a | bit(e));
                    (s, e)
                })
                .collect();
            // I − x must be able to add whatever I − x + y + z adds
            for &s in &level {
                let e = ext[&s];
                for x in bits(s) {
                    let below = *prev.get(&(s & !bit(x))).ok_or(Error::NotDownwardClosed)?;
                    let others = below & !e & !bit(x);
                    for y in bits(others) {
                        let base = (s & !bit(x)) | bit(y);
                        let reach = ext.get(&base).copied().unwrap_or(0);
                        if reach & others & !bit(y) != 0 {
                            return Err(Error::ExchangeAxiomViolated(format!(
                                "{} cannot be augmented from {}",
                                bitset::fmt_set(s),
                                bitset::fmt_set(base | bit((reach & others & !bit(y)).trailing_zeros() as usize))
                            )));
                        }
                    }
                }
            }
            let mut next: Vec<u64> = level
                .iter()
                .flat_map(|&s| {
                    // each set is generated once, from its lower part
                    let above = 64 - s.leading_zeros() as usize;
                    bits(ext[&s]).filter(move |&x| x >= above).map(move |x| s | bit(x))
                })
                .collect();
            if next.is_empty() {
                return Ok(Matroid::from_bases_unchecked(n, level));
            }
            next.sort_unstable();
            prev = ext;
            level = next;
        }
    }

    /// The matroid on `n` elements with no circuits.
    pub fn free(n: usize) -> Matroid {
        Matroid::from_bases_unchecked(n, vec![bitset::full(n)])
    }

    pub fn from_matrix(a: &GFMatrix) -> Matroid {
        let n = a.cols();
        let r = a.rank_of_columns(bitset::full(n));
        let bases: Vec<u64> = bitset::k_subsets(n, r)
            .filter(|&s| a.rank_of_columns(s) == r)
            .collect();
        Matroid::from_bases_unchecked(n, bases)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn corank(&self) -> usize {
        self.n - self.rank
    }

    pub fn ground(&self) -> u64 {
        bitset::full(self.n)
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn basis_family(&self) -> SetFamily {
        SetFamily::new(self.n, self.bases.iter().copied())
    }

    pub fn is_basis(&self, s: u64) -> bool {
        self.bases.binary_search(&s).is_ok()
    }

    fn independents_table(&self) -> &Independents {
        self.indep.get_or_init(|| {
            if self.n <= DENSE_LIMIT {
                let mut t = vec![0u64; (1usize << self.n).div_ceil(64)];
                for &b in &self.bases {
                    for s in bitset::submasks(b) {
                        t[(s >> 6) as usize] |= bit((s & 63) as usize);
                    }
                }
                Independents::Dense(t)
            } else {
                let mut h = HashSet::new();
                for &b in &self.bases {
                    for s in bitset::submasks(b) {
                        h.insert(s);
                    }
                }
                Independents::Sparse(h)
            }
        })
    }

    pub fn is_independent(&self, s: u64) -> bool {
        is_subset(s, self.ground()) && self.independents_table().contains(s)
    }

    pub fn independents(&self) -> SetFamily {
        let mut all = HashSet::new();
        for &b in &self.bases {
            for s in bitset::submasks(b) {
                all.insert(s);
            }
        }
        SetFamily::new(self.n, all)
    }

    /// A maximal independent subset of `s`, found greedily.
    pub fn max_independent_in(&self, s: u64) -> u64 {
        let mut cur = 0u64;
        for e in bits(s) {
            if self.is_independent(cur | bit(e)) {
                cur |= bit(e);
            }
        }
        cur
    }

    pub fn rank_of(&self, s: u64) -> usize {
        size(self.max_independent_in(s))
    }

    pub fn nullity(&self, s: u64) -> usize {
        size(s) - self.rank_of(s)
    }

    pub fn closure(&self, s: u64) -> u64 {
        let base = self.max_independent_in(s);
        let r = size(base);
        let mut cl = s;
        for e in bits(self.ground() & !s) {
            if self.rank_of(base | bit(e)) == r {
                cl |= bit(e);
            }
        }
        cl
    }

    pub fn is_flat(&self, s: u64) -> bool {
        self.closure(s) == s
    }

    pub fn is_loop(&self, e: usize) -> bool {
        !self.is_independent(bit(e))
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        self.bases.iter().all(|&b| b & bit(e) != 0)
    }

    /// Circuits in canonical (integer) order, found as minimal dependent
    /// sets by increasing size.
    pub fn circuits(&self) -> &[u64] {
        self.circuits.get_or_init(|| {
            let mut out = Vec::new();
            for k in 1..=(self.rank + 1).min(self.n) {
                for s in bitset::k_subsets(self.n, k) {
                    if !self.is_independent(s)
                        && bits(s).all(|e| self.is_independent(s & !bit(e)))
                    {
                        out.push(s);
                    }
                }
            }
            out.sort_unstable();
            out
        })
    }

    pub fn circuit_family(&self) -> SetFamily {
        SetFamily::new(self.n, self.circuits().iter().copied())
    }

    pub fn is_circuit(&self, s: u64) -> bool {
        self.circuits().binary_search(&s).is_ok()
    }

    /// All flats, generated from the closure of the empty set by adding
    /// one element at a time.
    pub fn flats(&self) -> Vec<u64> {
        let mut seen: HashSet<u64> = HashSet::new();
        let start = self.closure(0);
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(f) = stack.pop() {
            for e in bits(self.ground() & !f) {
                let g = self.closure(f | bit(e));
                if seen.insert(g) {
                    stack.push(g);
                }
            }
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    pub fn hyperplanes(&self) -> SetFamily {
        if self.rank == 0 {
            return SetFamily::empty(self.n);
        }
        let flats = self.flats();
        SetFamily::new(self.n, flats.into_iter().filter(|&f| self.rank_of(f) + 1 == self.rank))
    }

    pub fn dual(&self) -> Matroid {
        let g = self.ground();
        Matroid::from_bases_unchecked(self.n, self.bases.iter().map(|&b| g & !b).collect())
    }

    /// The unique circuit inside `basis ∪ {e}`.
    pub fn fundamental_circuit(&self, basis: u64, e: usize) -> Result<u64> {
        if !self.is_basis(basis) {
            return Err(Error::NotABasis);
        }
        if basis & bit(e) != 0 {
            return Err(Error::ElementInBasis);
        }
        let s = basis | bit(e);
        // e plus every basis element whose removal restores independence
        let c = bits(basis)
            .filter(|&x| self.is_independent(s & !bit(x)))
            .fold(bit(e), |acc, x| acc | bit(x));
        Ok(c)
    }

    /// Delete element `e`; later elements shift down by one.
    pub fn delete(&self, e: usize) -> Matroid {
        let coloop = self.is_coloop(e);
        let squash = |b: u64| {
            let low = b & (bit(e) - 1);
            let high = (b >> (e + 1)) << e;
            low | high
        };
        let bases: Vec<u64> = self
            .bases
            .iter()
            .filter(|&&b| coloop || b & bit(e) == 0)
            .map(|&b| squash(b & !bit(e)))
            .collect();
        Matroid::from_bases_unchecked(self.n - 1, bases)
    }

    /// Relabel: element `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Matroid {
        Matroid::from_bases_unchecked(
            self.n,
            self.bases.iter().map(|&b| bitset::remap(b, perm)).collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MatroidJson::Bases {
            n: self.n,
            bases: self.bases.iter().map(|&b| bitset::to_indices(b)).collect(),
        })
        .expect("matroid serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Matroid> {
        let raw: MatroidJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Format(e.to_string()))?;
        match raw {
            MatroidJson::Bases { n, bases } => {
                let mut masks = Vec::with_capacity(bases.len());
                for b in bases {
                    if b.iter().any(|&i| i >= n) {
                        return Err(Error::Format("basis index outside ground set".into()));
                    }
                    masks.push(bitset::from_indices(b));
                }
                Matroid::from_bases(n, masks)
            }
            MatroidJson::Matrix { field, matrix } => {
                Ok(Matroid::from_matrix(&GFMatrix::from_rows(field, matrix)?))
            }
        }
    }
}

/// First exchange-axiom violation, if any.
pub fn exchange_violation(bases: &[u64]) -> Option<String> {
    let set: HashSet<u64> = bases.iter().copied().collect();
    let ground = bases.iter().fold(0u64, |a, &b| a | b);
    for &b1 in bases {
        // for each x in b1: the y with b1 - x + y a basis
        let mut ex = [0u64; 64];
        for x in bits(b1) {
            for y in bits(ground & !b1) {
                if set.contains(&((b1 & !bit(x)) | bit(y))) {
                    ex[x] |= bit(y);
                }
            }
        }
        for &b2 in bases {
            let gain = b2 & !b1;
            for x in bits(b1 & !b2) {
                if ex[x] & gain == 0 {
                    return Some(format!(
                        "{} and {}: no exchange for {x}",
                        bitset::fmt_set(b1),
                        bitset::fmt_set(b2)
                    ));
                }
            }
        }
    }
    None
}

/// `bases(m1) ⊆ bases(m2)`.
pub fn weak_order_leq(m1: &Matroid, m2: &Matroid) -> Result<bool> {
    if m1.n() != m2.n() {
        return Err(Error::GroundSetMismatch(m1.n(), m2.n()));
    }
    Ok(m1.bases().iter().all(|&b| m2.is_basis(b)))
}

/// Circuit vector over GF(p): a kernel vector of the columns in `circuit`,
/// with support exactly the circuit and first nonzero coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitVector {
    pub circuit: u64,
    pub coefficients: Vec<u32>,
}

pub fn circuit_vector(a: &GFMatrix, circuit: u64) -> Result<CircuitVector> {
    let k = size(circuit);
    if k == 0
        || a.rank_of_columns(circuit) + 1 != k
        || bits(circuit).any(|e| a.rank_of_columns(circuit & !bit(e)) + 1 != k)
    {
        return Err(Error::NotACircuit);
    }
    let coeffs = a.kernel_vector(circuit).ok_or(Error::NotACircuit)?;
    debug_assert!(bits(circuit).all(|i| coeffs[i] != 0));
    Ok(CircuitVector { circuit, coefficients: coeffs })
}

/// The matroid on the circuits of `M[a]` represented by their circuit vectors.
pub fn linear_derived_matroid(a: &GFMatrix) -> Result<Matroid> {
    let m = Matroid::from_matrix(a);
    let circuits = m.circuits();
    if circuits.is_empty() {
        return Err(Error::NoCircuits);
    }
    let mut cols = Vec::with_capacity(circuits.len());
    for &c in circuits {
        cols.push(circuit_vector(a, c)?.coefficients);
    }
    let derived = GFMatrix::from_columns(a.field(), a.cols(), cols)?;
    Ok(Matroid::from_matrix(&derived))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn uniform_two_three() {
        let m = Matroid::from_bases(3, vec![0b011, 0b101, 0b110]).unwrap();
        assert_eq!(m, catalog::uniform(2, 3));
        assert_eq!(m.circuits(), &[0b111]);
        assert_eq!(m.fundamental_circuit(0b011, 2).unwrap(), 0b111);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Matroid::from_bases(4, vec![0b0011, 0b1100]),
            Err(Error::ExchangeAxiomViolated(_))
        ));
        assert_eq!(Matroid::from_bases(4, vec![]), Err(Error::EmptyFamily));
        assert_eq!(Matroid::from_bases(4, vec![0b1, 0b11]), Err(Error::UnequalSizes));
    }

    #[test]
    fn fano_basics() {
        let f = catalog::fano();
        assert_eq!(f.bases().len(), 28);
        assert!(Matroid::from_bases(7, f.bases().to_vec()).is_ok());
        let lines: Vec<u64> = f.hyperplanes().iter().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines.iter().all(|&l| size(l) == 3));
        assert_eq!(f.circuits().iter().filter(|&&c| size(c) == 3).count(), 7);
    }

    #[test]
    fn fundamental_circuit_on_fano_line() {
        let f = catalog::fano();
        // points 0,1,3 are a line; {0,1,2} is a basis
        assert_eq!(f.fundamental_circuit(0b111, 3).unwrap(), 0b1011);
        assert_eq!(f.fundamental_circuit(0b111, 0), Err(Error::ElementInBasis));
        assert_eq!(f.fundamental_circuit(0b1011, 2), Err(Error::NotABasis));
        for &b in f.bases() {
            for e in bits(f.ground() & !b) {
                let c = f.fundamental_circuit(b, e).unwrap();
                assert!(f.is_circuit(c) && c & bit(e) != 0 && size(c) >= 2);
            }
        }
    }

    #[test]
    fn dual_properties() {
        for name in ["K4", "Fano", "NonFano", "Q6", "R6", "P6", "AG32", "MatrixA", "U(2,5)"] {
            let m = catalog::by_name(name).unwrap();
            let d = m.dual();
            assert_eq!(d.dual(), m);
            assert_eq!(m.rank() + d.rank(), m.n());
            let comps: SetFamily =
                SetFamily::new(m.n(), m.hyperplanes().iter().map(|h| m.ground() & !h));
            assert_eq!(comps, d.circuit_family(), "{name}");
        }
    }

    #[test]
    fn circuits_are_antichain_and_cover_dependents() {
        let m = catalog::by_name("Q6").unwrap();
        let c = m.circuit_family();
        assert_eq!(c.minimal(), c);
        for s in 0..(1u64 << m.n()) {
            let dep = !m.is_independent(s);
            assert_eq!(dep, c.iter().any(|x| is_subset(x, s)));
        }
    }

    #[test]
    fn matrix_examples() {
        let id = GFMatrix::from_rows(2, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(Matroid::from_matrix(&id), catalog::uniform(3, 3));
        let z = GFMatrix::from_rows(3, vec![vec![1, 0, 1], vec![0, 0, 1]]).unwrap();
        let m = Matroid::from_matrix(&z);
        assert!(m.is_loop(1) && !m.is_loop(0));
        let a = catalog::matrix_a();
        let ma = Matroid::from_matrix(&a);
        assert_eq!((ma.rank(), ma.n()), (3, 7));
    }

    #[test]
    fn delete_matches_column_deletion() {
        let a = catalog::matrix_a();
        let m = Matroid::from_matrix(&a);
        for e in 0..7 {
            let keep: Vec<usize> = (0..7).filter(|&i| i != e).collect();
            let sub = a.select_columns(&keep);
            assert_eq!(m.delete(e), Matroid::from_matrix(&sub));
        }
    }

    #[test]
    fn circuit_vectors() {
        let a = catalog::matrix_a();
        for &c in Matroid::from_matrix(&a).circuits() {
            let v = circuit_vector(&a, c).unwrap();
            assert_eq!(bitset::from_indices((0..7).filter(|&i| v.coefficients[i] != 0)), c);
            assert!(v.coefficients.iter().all(|&x| x <= 1));
        }
        // U(2,3) over GF(3): (1,0),(0,1),(1,1) -> (1,1,2)
        let t = GFMatrix::from_rows(3, vec![vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let v = circuit_vector(&t, 0b111).unwrap();
        assert_eq!(v.coefficients, vec![1, 1, 2]);
        assert_eq!(circuit_vector(&t, 0b011), Err(Error::NotACircuit));
    }

    #[test]
    fn derived_of_single_circuit() {
        let t = GFMatrix::from_rows(3, vec![vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let d = linear_derived_matroid(&t).unwrap();
        assert_eq!(d, catalog::uniform(1, 1));
        let id = GFMatrix::from_rows(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(linear_derived_matroid(&id), Err(Error::NoCircuits));
    }

    #[test]
    fn matrix_a_derived_has_304_bases() {
        let d = linear_derived_matroid(&catalog::matrix_a()).unwrap();
        assert_eq!((d.n(), d.rank(), d.bases().len()), (12, 4, 304));
    }

    #[test]
    fn hereditary_construction() {
        for name in ["K4", "Fano", "Q6", "AG32", "MatrixA"] {
            let m = crate::catalog::by_name(name).unwrap();
            assert_eq!(Matroid::from_hereditary(m.n(), |s| m.is_independent(s)).unwrap(), m);
        }
        // two disjoint maximal pairs violate augmentation
        let two_blocks = |s: u64| s & !0b0011 == 0 || s & !0b1100 == 0;
        assert!(matches!(
            Matroid::from_hereditary(4, two_blocks),
            Err(Error::ExchangeAxiomViolated(_))
        ));
        assert_eq!(Matroid::from_hereditary(3, |_| false), Err(Error::EmptySetDependent));
    }

    #[test]
    fn weak_order() {
        let f = catalog::fano();
        let nf = catalog::non_fano();
        assert!(weak_order_leq(&f, &f).unwrap());
        assert!(weak_order_leq(&f, &nf).unwrap());
        assert!(!weak_order_leq(&nf, &f).unwrap());
        let u24 = catalog::uniform(2, 4);
        assert!(!weak_order_leq(&u24, &catalog::uniform(3, 4)).unwrap());
        assert!(weak_order_leq(&u24, &catalog::uniform(2, 5)).is_err());
    }

    #[test]
    fn json_forms() {
        let k4 = catalog::k4();
        assert_eq!(Matroid::from_json(&k4.to_json()).unwrap(), k4);
        let v = serde_json::json!({"field": 2, "matrix": [[1,0,1],[0,1,1]]});
        assert_eq!(Matroid::from_json(&v).unwrap(), catalog::uniform(2, 3));
        let bad = serde_json::json!({"n": 4, "bases": [[0,1],[2,3]]});
        assert!(Matroid::from_json(&bad).is_err());
    }
}

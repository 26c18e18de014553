//! Explicit finite bounded lattices.
//!
//! A [`FiniteLattice`] stores the full order relation as bit rows together
//! with dense join/meet tables, the rank of every element, and the atom
//! support of every element. All lattices handled here are small (at most a
//! few thousand elements), so the quadratic storage buys constant-time
//! comparisons in the independence kernels.

use serde::{Deserialize, Serialize};

use crate::bitset::{self, bit};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    m: usize,
    words: usize,
    up: Vec<u64>,
    down: Vec<u64>,
    join: Vec<u32>,
    meet: Vec<u32>,
    rank: Vec<usize>,
    atoms: Vec<usize>,
    atom_pos: Vec<Option<usize>>,
    support: Vec<u64>,
    bottom: usize,
    top: usize,
    atomic: bool,
    coatomic: bool,
}

/// Per-element image of one lattice inside another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeElementMap {
    pub source_len: usize,
    pub target_len: usize,
    pub image: Vec<usize>,
}

impl LatticeElementMap {
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    elements: usize,
    leq_pairs: Vec<[usize; 2]>,
}

fn row(rows: &[u64], words: usize, x: usize) -> &[u64] {
    &rows[x * words..(x + 1) * words]
}

fn row_bits(r: &[u64]) -> impl Iterator<Item = usize> + '_ {
    r.iter()
        .enumerate()
        .flat_map(|(w, &word)| bitset::bits(word).map(move |b| w * 64 + b))
}

fn row_count(r: &[u64]) -> usize {
    r.iter().map(|w| w.count_ones() as usize).sum()
}

/// Validate a partial order given as a dense `m × m` relation and compute
/// its lattice structure.
pub fn build_lattice(m: usize, leq: &[bool]) -> Result<FiniteLattice> {
    if leq.len() != m * m {
        return Err(Error::Format(format!("relation has {} entries, expected {}", leq.len(), m * m)));
    }
    if m == 0 {
        return Err(Error::NoBounds);
    }
    let at = |x: usize, y: usize| leq[x * m + y];
    for x in 0..m {
        if !at(x, x) {
            return Err(Error::NotALattice(format!("relation not reflexive at {x}")));
        }
        for y in 0..m {
            if x != y && at(x, y) && at(y, x) {
                return Err(Error::NotALattice(format!("relation not antisymmetric on {x},{y}")));
            }
        }
    }
    let words = m.div_ceil(64);
    let mut up = vec![0u64; m * words];
    let mut down = vec![0u64; m * words];
    for x in 0..m {
        for y in 0..m {
            if at(x, y) {
                up[x * words + y / 64] |= bit(y % 64);
                down[y * words + x / 64] |= bit(x % 64);
            }
        }
    }
    // transitivity: everything above an upper bound of x is above x
    for x in 0..m {
        for y in row_bits(row(&up, words, x)).collect::<Vec<_>>() {
            let ry = row(&up, words, y);
            let rx = row(&up, words, x);
            if ry.iter().zip(rx).any(|(a, b)| a & !b != 0) {
                return Err(Error::NotALattice(format!("relation not transitive through {x} <= {y}")));
            }
        }
    }
    from_rows(m, words, up, down)
}

/// Build from a list of `(i, j)` pairs meaning `i <= j`; the reflexive and
/// transitive closure is taken first.
pub fn from_pairs(m: usize, pairs: &[[usize; 2]]) -> Result<FiniteLattice> {
    let mut leq = vec![false; m * m];
    for x in 0..m {
        leq[x * m + x] = true;
    }
    for &[i, j] in pairs {
        if i >= m || j >= m {
            return Err(Error::Format(format!("pair ({i},{j}) out of range")));
        }
        leq[i * m + j] = true;
    }
    // Warshall
    for k in 0..m {
        for i in 0..m {
            if leq[i * m + k] {
                for j in 0..m {
                    if leq[k * m + j] {
                        leq[i * m + j] = true;
                    }
                }
            }
        }
    }
    build_lattice(m, &leq)
}

fn from_rows(m: usize, words: usize, up: Vec<u64>, down: Vec<u64>) -> Result<FiniteLattice> {
    let up_count: Vec<usize> = (0..m).map(|x| row_count(row(&up, words, x))).collect();
    let down_count: Vec<usize> = (0..m).map(|x| row_count(row(&down, words, x))).collect();
    let bottom = (0..m).find(|&x| up_count[x] == m).ok_or(Error::NoBounds)?;
    let top = (0..m).find(|&x| down_count[x] == m).ok_or(Error::NoBounds)?;

    let mut join = vec![0u32; m * m];
    let mut meet = vec![0u32; m * m];
    let mut buf = vec![0u64; words];
    for x in 0..m {
        for y in x..m {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = up[x * words + k] & up[y * words + k];
            }
            let j = least_in(&buf, &up, &up_count, words)
                .ok_or_else(|| Error::NotALattice(format!("no unique join of {x} and {y}")))?;
            for (k, b) in buf.iter_mut().enumerate() {
                *b = down[x * words + k] & down[y * words + k];
            }
            let mt = least_in(&buf, &down, &down_count, words)
                .ok_or_else(|| Error::NotALattice(format!("no unique meet of {x} and {y}")))?;
            join[x * m + y] = j as u32;
            join[y * m + x] = j as u32;
            meet[x * m + y] = mt as u32;
            meet[y * m + x] = mt as u32;
        }
    }

    // rank = longest chain from bottom
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&x| down_count[x]);
    let mut rank = vec![0usize; m];
    for &y in &order {
        rank[y] = row_bits(row(&down, words, y))
            .filter(|&x| x != y)
            .map(|x| rank[x] + 1)
            .max()
            .unwrap_or(0);
    }
    for y in 0..m {
        for x in row_bits(row(&down, words, y)) {
            if x == y {
                continue;
            }
            let between: usize = (0..words)
                .map(|k| (up[x * words + k] & down[y * words + k]).count_ones() as usize)
                .sum();
            if between == 2 && rank[y] != rank[x] + 1 {
                return Err(Error::NotGraded(format!(
                    "cover {x} < {y} jumps rank {} -> {}",
                    rank[x], rank[y]
                )));
            }
        }
    }

    let atoms: Vec<usize> = (0..m).filter(|&x| rank[x] == 1).collect();
    if atoms.len() > 64 {
        return Err(Error::TooLarge(format!("{} atoms (max 64)", atoms.len())));
    }
    let mut atom_pos = vec![None; m];
    for (i, &a) in atoms.iter().enumerate() {
        atom_pos[a] = Some(i);
    }
    let support: Vec<u64> = (0..m)
        .map(|x| {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, &a)| up[a * words + x / 64] >> (x % 64) & 1 == 1)
                .fold(0, |s, (i, _)| s | bit(i))
        })
        .collect();

    let mut lat = FiniteLattice {
        m,
        words,
        up,
        down,
        join,
        meet,
        rank,
        atoms,
        atom_pos,
        support,
        bottom,
        top,
        atomic: false,
        coatomic: false,
    };
    lat.atomic = (0..m).all(|x| lat.join_atoms(lat.support[x]) == x);
    let coatoms = lat.coatoms();
    lat.coatomic = (0..m).all(|x| {
        coatoms
            .iter()
            .filter(|&&c| lat.leq(x, c))
            .fold(lat.top, |acc, &c| lat.meet(acc, c))
            == x
    });
    Ok(lat)
}

fn least_in(cands: &[u64], rows: &[u64], counts: &[usize], words: usize) -> Option<usize> {
    let total = row_count(cands);
    row_bits(cands).find(|&z| counts[z] == total && row(rows, words, z) == cands)
}

impl FiniteLattice {
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.m + y] as usize
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.m + y] as usize
    }

    #[inline]
    pub fn rank(&self, x: usize) -> usize {
        self.rank[x]
    }

    /// Rank of the whole lattice.
    pub fn height(&self) -> usize {
        self.rank[self.top]
    }

    /// Atom elements, in increasing element index.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_position(&self, x: usize) -> Option<usize> {
        self.atom_pos[x]
    }

    pub fn coatoms(&self) -> Vec<usize> {
        let h = self.height();
        (0..self.m)
            .filter(|&x| h > 0 && self.rank[x] + 1 == h)
            .collect()
    }

    /// Atoms below `x`, as positions into [`atoms`](Self::atoms).
    #[inline]
    pub fn support(&self, x: usize) -> u64 {
        self.support[x]
    }

    /// Join of a set of atoms given by positions; the empty join is bottom.
    pub fn join_atoms(&self, atoms: u64) -> usize {
        bitset::bits(atoms).fold(self.bottom, |acc, i| self.join(acc, self.atoms[i]))
    }

    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    pub fn is_coatomic(&self) -> bool {
        self.coatomic
    }

    pub fn covers(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y) && self.rank[y] == self.rank[x] + 1
    }

    /// Graded, atomic and semimodular: `r(x) + r(y) >= r(x∨y) + r(x∧y)`.
    pub fn is_geometric(&self) -> bool {
        self.atomic
            && (0..self.m).all(|x| {
                (x..self.m).all(|y| {
                    self.rank[x] + self.rank[y]
                        >= self.rank[self.join(x, y)] + self.rank[self.meet(x, y)]
                })
            })
    }

    /// Rank equality on all pairs.
    pub fn is_modular(&self) -> bool {
        (0..self.m).all(|x| {
            (x..self.m).all(|y| {
                self.rank[x] + self.rank[y]
                    == self.rank[self.join(x, y)] + self.rank[self.meet(x, y)]
            })
        })
    }

    /// Dense copy of the order relation.
    pub fn relation(&self) -> Vec<bool> {
        let mut out = vec![false; self.m * self.m];
        for x in 0..self.m {
            for y in row_bits(row(&self.up, self.words, x)) {
                out[x * self.m + y] = true;
            }
        }
        out
    }

    /// Induced sub-poset on `keep` (in the given order), re-validated as a
    /// lattice. The returned map sends new indices to old ones.
    pub fn induced(&self, keep: &[usize]) -> Result<(FiniteLattice, LatticeElementMap)> {
        let k = keep.len();
        let mut leq = vec![false; k * k];
        for (i, &x) in keep.iter().enumerate() {
            for (j, &y) in keep.iter().enumerate() {
                leq[i * k + j] = self.leq(x, y);
            }
        }
        let lat = build_lattice(k, &leq)?;
        Ok((
            lat,
            LatticeElementMap { source_len: k, target_len: self.m, image: keep.to_vec() },
        ))
    }

    /// The interval `[0̂, x]`.
    pub fn restrict(&self, x: usize) -> Result<(FiniteLattice, LatticeElementMap)> {
        if self.rank[x] < 1 {
            return Err(Error::RankTooSmall);
        }
        let keep: Vec<usize> = row_bits(row(&self.down, self.words, x)).collect();
        self.induced(&keep)
    }

    /// The interval `[x, 1̂]`.
    pub fn contract(&self, x: usize) -> Result<(FiniteLattice, LatticeElementMap)> {
        if self.rank[x] + 1 > self.height() {
            return Err(Error::RankTooLarge);
        }
        let keep: Vec<usize> = row_bits(row(&self.up, self.words, x)).collect();
        self.induced(&keep)
    }

    /// Elements of rank below `m`, plus the top.
    pub fn truncate(&self, m: usize) -> Result<(FiniteLattice, LatticeElementMap)> {
        if m < 1 || m > self.height() {
            return Err(Error::BadRank(m, self.height()));
        }
        let keep: Vec<usize> = (0..self.m)
            .filter(|&x| self.rank[x] < m || x == self.top)
            .collect();
        self.induced(&keep)
    }

    /// Same elements, reversed order.
    pub fn dual(&self) -> FiniteLattice {
        let h = self.height();
        let m = self.m;
        let mut join = vec![0u32; m * m];
        let mut meet = vec![0u32; m * m];
        join.copy_from_slice(&self.meet);
        meet.copy_from_slice(&self.join);
        let rank: Vec<usize> = self.rank.iter().map(|r| h - r).collect();
        let atoms: Vec<usize> = (0..m).filter(|&x| rank[x] == 1).collect();
        let mut atom_pos = vec![None; m];
        for (i, &a) in atoms.iter().enumerate() {
            atom_pos[a] = Some(i);
        }
        let support = (0..m)
            .map(|x| {
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| self.leq(x, a))
                    .fold(0, |s, (i, _)| s | bit(i))
            })
            .collect();
        FiniteLattice {
            m,
            words: self.words,
            up: self.down.clone(),
            down: self.up.clone(),
            join,
            meet,
            rank,
            atoms,
            atom_pos,
            support,
            bottom: self.top,
            top: self.bottom,
            atomic: self.coatomic,
            coatomic: self.atomic,
        }
    }

    /// Relabel elements by `(rank, sorted atom support)` so serialized
    /// output does not depend on construction order.
    pub fn canonicalize(&self) -> (FiniteLattice, LatticeElementMap) {
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_by_key(|&x| (self.rank[x], bitset::to_indices(self.support[x]), x));
        let (lat, map) = self.induced(&order).expect("relabeling preserves lattice structure");
        (lat, map)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut pairs = Vec::new();
        for x in 0..self.m {
            for y in 0..self.m {
                if self.covers(x, y) {
                    pairs.push([x, y]);
                }
            }
        }
        serde_json::to_value(LatticeJson { elements: self.m, leq_pairs: pairs })
            .expect("lattice serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<FiniteLattice> {
        let raw: LatticeJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Format(e.to_string()))?;
        from_pairs(raw.elements, &raw.leq_pairs)
    }
}

/// Geometric lattice of a matroid together with the flat behind each element.
#[derive(Clone, Debug)]
pub struct LatticeOfFlats {
    pub lattice: FiniteLattice,
    pub flats: Vec<u64>,
}

pub fn lattice_of_flats(m: &Matroid) -> LatticeOfFlats {
    let mut flats = m.flats();
    flats.sort_by_key(|&f| (m.rank_of(f), bitset::to_indices(f)));
    let k = flats.len();
    let mut leq = vec![false; k * k];
    for (i, &a) in flats.iter().enumerate() {
        for (j, &b) in flats.iter().enumerate() {
            leq[i * k + j] = bitset::is_subset(a, b);
        }
    }
    let lattice = build_lattice(k, &leq).expect("flats of a matroid form a lattice");
    LatticeOfFlats { lattice, flats }
}

/// Lattice of a closure system given as explicit member sets ordered by
/// inclusion (must contain the bottom and top it needs).
pub fn lattice_of_sets(sets: &[u64]) -> Result<FiniteLattice> {
    let k = sets.len();
    let mut leq = vec![false; k * k];
    for (i, &a) in sets.iter().enumerate() {
        for (j, &b) in sets.iter().enumerate() {
            leq[i * k + j] = bitset::is_subset(a, b);
        }
    }
    build_lattice(k, &leq)
}

/// The Boolean lattice on `n` atoms.
pub fn boolean_lattice(n: usize) -> FiniteLattice {
    let sets: Vec<u64> = (0..(1u64 << n)).collect();
    lattice_of_sets(&sets).expect("Boolean lattice")
}

//! Named matroids with fixed labelings.
//!
//! | name              | labeling                                                        |
//! |-------------------|-----------------------------------------------------------------|
//! | `K4`              | edges 01,02,03,12,13,23 of K4 as elements 0..5                 |
//! | `Fano`            | points 0..6, lines {i, i+1, i+3} mod 7                          |
//! | `NonFano`         | `Fano` with the line {6,0,2} relaxed                            |
//! | `Q6`              | rank 3 on 0..5, lines {0,1,2}, {2,3,4}                          |
//! | `R6`              | rank 3 on 0..5, lines {0,1,2}, {3,4,5}                          |
//! | `P6`              | rank 3 on 0..5, line {0,1,2}                                    |
//! | `AG32`            | binary columns (1,x) for x in GF(2)^3, x in counting order      |
//! | `MatrixA`         | the 3×7 binary matrix of [`matrix_a`]                           |
//! | `TernaryDowling3` | ternary columns e1,e2,e3, e1∓e2, e1∓e3, e2∓e3                   |
//! | `U(k,n)`          | uniform matroid of rank k on 0..n-1                             |
//!
//! `FanoDual`, `NonFanoDual` and `MatrixADual` are the duals on the same labels.
//!
//! Lattices resolve through [`lattice_by_name`]: `PrunedU46`, `Boolean(n)`,
//! or any matroid name above for its lattice of flats.

use crate::bitset::{self, size};
use crate::error::{Error, Result};
use crate::gf::GFMatrix;
use crate::lattice::{boolean_lattice, lattice_of_flats, lattice_of_sets, FiniteLattice};
use crate::matroid::Matroid;

pub const NAMES: &[&str] = &[
    "K4",
    "Fano",
    "FanoDual",
    "NonFano",
    "NonFanoDual",
    "Q6",
    "R6",
    "P6",
    "AG32",
    "MatrixA",
    "MatrixADual",
    "TernaryDowling3",
];

pub fn uniform(k: usize, n: usize) -> Matroid {
    Matroid::from_bases_unchecked(n, bitset::k_subsets(n, k).collect())
}

/// Simple rank-3 matroid whose only non-trivial lines are `lines`.
pub fn rank3_with_lines(n: usize, lines: &[&[usize]]) -> Matroid {
    let lines: Vec<u64> = lines.iter().map(|l| bitset::from_indices(l.iter().copied())).collect();
    let bases = bitset::k_subsets(n, 3)
        .filter(|&t| !lines.iter().any(|&l| size(t & l) == 3))
        .collect();
    Matroid::from_bases(n, bases).expect("rank-3 line configuration")
}

const FANO_LINES: [[usize; 3]; 7] =
    [[0, 1, 3], [1, 2, 4], [2, 3, 5], [3, 4, 6], [4, 5, 0], [5, 6, 1], [6, 0, 2]];

pub fn fano() -> Matroid {
    let lines: Vec<&[usize]> = FANO_LINES.iter().map(|l| &l[..]).collect();
    rank3_with_lines(7, &lines)
}

pub fn non_fano() -> Matroid {
    let lines: Vec<&[usize]> = FANO_LINES[..6].iter().map(|l| &l[..]).collect();
    rank3_with_lines(7, &lines)
}

pub fn k4() -> Matroid {
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let cols = edges
        .iter()
        .map(|&(a, b)| (0..4).map(|v| u32::from(v == a || v == b)).collect())
        .collect();
    Matroid::from_matrix(&GFMatrix::from_columns(2, 4, cols).expect("incidence matrix"))
}

pub fn q6() -> Matroid {
    rank3_with_lines(6, &[&[0, 1, 2], &[2, 3, 4]])
}

pub fn r6() -> Matroid {
    rank3_with_lines(6, &[&[0, 1, 2], &[3, 4, 5]])
}

pub fn p6() -> Matroid {
    rank3_with_lines(6, &[&[0, 1, 2]])
}

pub fn ag32() -> Matroid {
    let cols = (0..8u32).map(|x| vec![1, x & 1, (x >> 1) & 1, (x >> 2) & 1]).collect();
    Matroid::from_matrix(&GFMatrix::from_columns(2, 4, cols).expect("AG(3,2) matrix"))
}

/// The 3×7 binary matrix of the rank-3, corank-4 worked example (its last
/// two columns are parallel).
pub fn matrix_a() -> GFMatrix {
    GFMatrix::from_rows(
        2,
        vec![
            vec![1, 0, 0, 1, 1, 1, 1],
            vec![0, 1, 1, 1, 0, 1, 1],
            vec![0, 0, 1, 0, 1, 1, 1],
        ],
    )
    .expect("binary matrix")
}

pub fn ternary_dowling3() -> Matroid {
    let e = |i: usize| -> Vec<u32> { (0..3).map(|j| u32::from(i == j)).collect() };
    let comb = |i: usize, j: usize, s: u32| -> Vec<u32> {
        (0..3).map(|k| if k == i { 1 } else if k == j { s } else { 0 }).collect()
    };
    let cols = vec![
        e(0),
        e(1),
        e(2),
        comb(0, 1, 2),
        comb(0, 1, 1),
        comb(0, 2, 2),
        comb(0, 2, 1),
        comb(1, 2, 2),
        comb(1, 2, 1),
    ];
    Matroid::from_matrix(&GFMatrix::from_columns(3, 3, cols).expect("ternary matrix"))
}

fn parse_uniform(name: &str) -> Option<Matroid> {
    let inner = name.strip_prefix("U(")?.strip_suffix(')')?;
    let (k, n) = inner.split_once(',')?;
    let k: usize = k.trim().parse().ok()?;
    let n: usize = n.trim().parse().ok()?;
    (k <= n && n <= 63).then(|| uniform(k, n))
}

/// Resolve a catalog name (case-insensitive for the fixed names).
pub fn by_name(name: &str) -> Result<Matroid> {
    if let Some(u) = parse_uniform(name.trim()) {
        return Ok(u);
    }
    let m = match name.trim().to_ascii_lowercase().as_str() {
        "k4" => k4(),
        "fano" => fano(),
        "fanodual" => fano().dual(),
        "nonfano" => non_fano(),
        "nonfanodual" => non_fano().dual(),
        "q6" => q6(),
        "r6" => r6(),
        "p6" => p6(),
        "ag32" => ag32(),
        "matrixa" => Matroid::from_matrix(&matrix_a()),
        "matrixadual" => Matroid::from_matrix(&matrix_a()).dual(),
        "ternarydowling3" => ternary_dowling3(),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(m)
}

/// Rank-3 flats {012}, {013}, {015}, {023}, {025} of U(4,6).
pub const PRUNED_FLATS: [u64; 5] = [0b000111, 0b001011, 0b100011, 0b001101, 0b100101];

/// Flats of U(4,6) without [`PRUNED_FLATS`], sorted by size, and the atomic,
/// graded, non-geometric lattice they form.
pub fn pruned_uniform_lattice() -> (Vec<u64>, FiniteLattice) {
    let mut sets: Vec<u64> = uniform(4, 6).flats();
    sets.retain(|f| !PRUNED_FLATS.contains(f));
    sets.sort_by_key(|&f| (size(f), f));
    let l = lattice_of_sets(&sets).expect("intersection-closed family");
    (sets, l)
}

/// Resolve a lattice name: `PrunedU46`, `Boolean(n)`, or a matroid name
/// (its lattice of flats).
pub fn lattice_by_name(name: &str) -> Result<FiniteLattice> {
    let t = name.trim();
    if t.eq_ignore_ascii_case("PrunedU46") {
        return Ok(pruned_uniform_lattice().1);
    }
    if let Some(n) = t
        .strip_prefix("Boolean(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|n| n.trim().parse::<usize>().ok())
    {
        if n > 12 {
            return Err(Error::TooLarge(format!("Boolean({n})")));
        }
        return Ok(boolean_lattice(n));
    }
    Ok(lattice_of_flats(&by_name(t)?).lattice)
}

//! Seeded generators of small random matroids for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::{self, size};
use crate::gf::GFMatrix;
use crate::matroid::Matroid;

/// Column matroid of a uniformly random `rows × cols` matrix over GF(p).
/// Zero columns are allowed, so loops and parallel classes occur.
pub fn linear<R: Rng>(rng: &mut R, p: u32, rows: usize, cols: usize) -> Matroid {
    let mut columns: Vec<Vec<u32>> =
        (0..cols).map(|_| (0..rows).map(|_| rng.gen_range(0..p)).collect()).collect();
    // keep every instance non-trivial
    if let Some(first) = columns.first_mut() {
        if first.iter().all(|&x| x == 0) {
            first[0] = 1;
        }
    }
    Matroid::from_matrix(&GFMatrix::from_columns(p, rows, columns).expect("prime field"))
}

/// Rank-3 paving matroid on `n` points: random lines of three or more points
/// that pairwise share at most one point. Needs `n >= 4`.
pub fn paving_rank3<R: Rng>(rng: &mut R, n: usize, attempts: usize) -> Matroid {
    let mut lines: Vec<u64> = Vec::new();
    let points: Vec<usize> = (0..n).collect();
    for _ in 0..attempts {
        let len = rng.gen_range(3..=4.min(n - 1));
        let line = bitset::from_indices(points.choose_multiple(rng, len).copied());
        if lines.iter().all(|&l| size(l & line) <= 1) {
            lines.push(line);
        }
    }
    let bases = bitset::k_subsets(n, 3)
        .filter(|&t| !lines.iter().any(|&l| size(t & l) == 3))
        .collect();
    Matroid::from_bases(n, bases).expect("lines meeting in at most one point")
}

/// A random matroid on at most `max_n` elements, mixing binary, ternary and
/// rank-3 paving instances.
pub fn small<R: Rng>(rng: &mut R, max_n: usize) -> Matroid {
    let n = rng.gen_range(3..=max_n);
    let rows = rng.gen_range(2..=3.min(n));
    match rng.gen_range(0..3) {
        0 => linear(rng, 2, rows, n),
        1 => linear(rng, 3, rows, n),
        _ => paving_rank3(rng, n.max(5), 6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic_and_valid() {
        let a: Vec<Matroid> = {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            (0..20).map(|_| small(&mut rng, 7)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in &a {
            assert_eq!(m, &small(&mut rng, 7));
            assert!(Matroid::from_bases(m.n(), m.bases().to_vec()).is_ok());
        }
    }
}

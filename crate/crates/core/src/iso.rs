//! Matroid isomorphism by invariant-pruned backtracking.

use crate::bitset::{self, bit, bits, size};
use crate::matroid::Matroid;

/// Per-element invariant: number of bases containing it and the sorted
/// sizes of the circuits through it.
fn element_invariants(m: &Matroid) -> Vec<(usize, Vec<usize>)> {
    (0..m.n())
        .map(|e| {
            let deg = m.bases().iter().filter(|&&b| b & bit(e) != 0).count();
            let mut cs: Vec<usize> = m
                .circuits()
                .iter()
                .filter(|&&c| c & bit(e) != 0)
                .map(|&c| size(c))
                .collect();
            cs.sort_unstable();
            (deg, cs)
        })
        .collect()
}

fn global_invariants(m: &Matroid) -> (usize, usize, usize, Vec<usize>) {
    let mut hist = vec![0usize; m.n() + 2];
    for &c in m.circuits() {
        hist[size(c)] += 1;
    }
    (m.n(), m.rank(), m.bases().len(), hist)
}

/// A permutation `perm` of the ground set with `relabel(m1, perm) == m2`,
/// or `None` when the matroids are not isomorphic.
pub fn is_isomorphic(m1: &Matroid, m2: &Matroid) -> Option<Vec<usize>> {
    if global_invariants(m1) != global_invariants(m2) {
        return None;
    }
    let inv1 = element_invariants(m1);
    let inv2 = element_invariants(m2);
    let mut s1 = inv1.clone();
    let mut s2 = inv2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return None;
    }
    let n = m1.n();
    // map rare invariant classes first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&e| (inv1.iter().filter(|v| **v == inv1[e]).count(), e));
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|e| (0..n).filter(|&f| inv2[f] == inv1[e]).collect())
        .collect();

    let mut search = Search {
        m1,
        m2,
        order: &order,
        candidates: &candidates,
        perm: vec![usize::MAX; n],
        used: 0,
        dom: Vec::with_capacity(n),
    };
    if search.extend(0) {
        Some(search.perm)
    } else {
        None
    }
}

struct Search<'a> {
    m1: &'a Matroid,
    m2: &'a Matroid,
    order: &'a [usize],
    candidates: &'a [Vec<usize>],
    perm: Vec<usize>,
    used: u64,
    dom: Vec<usize>,
}

impl Search<'_> {
    fn consistent(&self, x: usize, y: usize) -> bool {
        let r = self.m1.rank();
        let k = self.dom.len();
        for t in 0..r.min(k + 1) {
            for sub in bitset::k_subsets(k, t) {
                let mut a = bit(x);
                let mut b = bit(y);
                for i in bits(sub) {
                    a |= bit(self.dom[i]);
                    b |= bit(self.perm[self.dom[i]]);
                }
                if self.m1.is_independent(a) != self.m2.is_independent(b) {
                    return false;
                }
            }
        }
        true
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        for &y in &self.candidates[x] {
            if self.used & bit(y) != 0 || !self.consistent(x, y) {
                continue;
            }
            self.perm[x] = y;
            self.used |= bit(y);
            self.dom.push(x);
            if self.extend(depth + 1) {
                return true;
            }
            self.dom.pop();
            self.used &= !bit(y);
            self.perm[x] = usize::MAX;
        }
        false
    }
}

//! Small helpers for subsets of `0..64` stored as `u64` masks.

/// Iterator over the indices of the set bits, in increasing order.
#[derive(Clone, Copy, Debug)]
pub struct Bits(u64);

impl Iterator for Bits {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Bits {}

pub fn bits(mask: u64) -> Bits {
    Bits(mask)
}

#[inline]
pub fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub fn size(mask: u64) -> usize {
    mask.count_ones() as usize
}

/// Mask with the lowest `n` bits set.
#[inline]
pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> u64 {
    iter.into_iter().fold(0, |m, i| m | bit(i))
}

pub fn to_indices(mask: u64) -> Vec<usize> {
    bits(mask).collect()
}

#[inline]
pub fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// All submasks of `mask` (including `0` and `mask`), carry-rippler order.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut sub = 0u64;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = sub.wrapping_sub(mask) & mask;
        done = sub == 0;
        Some(cur)
    })
}

/// All `k`-element subsets of `0..n` in increasing integer order (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 63, "k_subsets supports n <= 63");
    let limit = 1u64 << n;
    let mut cur = if k > n { limit } else { full(k) };
    let mut first = true;
    std::iter::from_fn(move || {
        if k == 0 {
            if first {
                first = false;
                return Some(0);
            }
            return None;
        }
        if cur >= limit {
            return None;
        }
        let out = cur;
        let c = cur & cur.wrapping_neg();
        let r = cur + c;
        cur = (((r ^ cur) >> 2) / c) | r;
        Some(out)
    })
}

/// `k`-element submasks of `mask`.
pub fn k_submasks(mask: u64, k: usize) -> impl Iterator<Item = u64> {
    let idx = to_indices(mask);
    k_subsets(idx.len(), k).map(move |s| bits(s).fold(0, |m, j| m | bit(idx[j])))
}

/// Re-index a mask through `map` (bit `i` becomes bit `map[i]`).
pub fn remap(mask: u64, map: &[usize]) -> u64 {
    bits(mask).fold(0, |m, i| m | bit(map[i]))
}

/// Compact, human-facing rendering: `{0,3,5}`.
pub fn fmt_set(mask: u64) -> String {
    let parts: Vec<String> = bits(mask).map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Binomial coefficient, saturating.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

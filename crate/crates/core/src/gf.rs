//! Dense matrices over a prime field GF(p).

use crate::bitset::{bits, size};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFMatrix {
    p: u32,
    rows: usize,
    /// column-major: `cols[c][r]`
    cols: Vec<Vec<u32>>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv(a: u32, p: u32) -> u32 {
    // Fermat
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

impl GFMatrix {
    pub fn from_rows(p: u32, rows: Vec<Vec<u32>>) -> Result<GFMatrix> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Format("ragged matrix".into()));
        }
        if ncols > 64 {
            return Err(Error::TooLarge(format!("{ncols} columns")));
        }
        let cols = (0..ncols)
            .map(|c| rows.iter().map(|r| r[c] % p).collect())
            .collect();
        Ok(GFMatrix { p, rows: rows.len(), cols })
    }

    pub fn from_columns(p: u32, rows: usize, cols: Vec<Vec<u32>>) -> Result<GFMatrix> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Format("column length mismatch".into()));
        }
        if cols.len() > 64 {
            return Err(Error::TooLarge(format!("{} columns", cols.len())));
        }
        let cols = cols.into_iter().map(|c| c.into_iter().map(|x| x % p).collect()).collect();
        Ok(GFMatrix { p, rows, cols })
    }

    pub fn field(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.cols[c]
    }

    pub fn select_columns(&self, keep: &[usize]) -> GFMatrix {
        GFMatrix { p: self.p, rows: self.rows, cols: keep.iter().map(|&c| self.cols[c].clone()).collect() }
    }

    /// Row-reduce the chosen columns (as a `rows × k` matrix); returns the
    /// reduced matrix and the pivot column of each pivot row.
    fn reduce(&self, subset: u64) -> (Vec<Vec<u32>>, Vec<usize>) {
        let p = self.p as u64;
        let idx: Vec<usize> = bits(subset).collect();
        let mut m: Vec<Vec<u32>> = (0..self.rows)
            .map(|r| idx.iter().map(|&c| self.cols[c][r]).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..idx.len() {
            let Some(pr) = (r..self.rows).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, pr);
            let iv = inv(m[r][c], self.p) as u64;
            for x in m[r].iter_mut() {
                *x = (*x as u64 * iv % p) as u32;
            }
            for i in 0..self.rows {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c] as u64;
                    let (pivot_row, row) = if i < r {
                        let (a, b) = m.split_at_mut(r);
                        (&b[0], &mut a[i])
                    } else {
                        let (a, b) = m.split_at_mut(i);
                        (&a[r], &mut b[0])
                    };
                    for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                        *x = ((*x as u64 + p * p - f * y as u64) % p) as u32;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank_of_columns(&self, subset: u64) -> usize {
        self.reduce(subset).1.len()
    }

    /// A kernel vector of the chosen columns when the kernel is
    /// one-dimensional, scattered into a length-`cols` vector and normalized
    /// so its first nonzero entry is 1.
    pub fn kernel_vector(&self, subset: u64) -> Option<Vec<u32>> {
        let k = size(subset);
        let (m, pivots) = self.reduce(subset);
        if pivots.len() + 1 != k {
            return None;
        }
        let free = (0..k).find(|c| !pivots.contains(c))?;
        let p = self.p;
        let mut local = vec![0u32; k];
        local[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            local[pc] = (p - m[row][free]) % p;
        }
        let first = *local.iter().find(|&&x| x != 0)?;
        let s = inv(first, p) as u64;
        let idx: Vec<usize> = bits(subset).collect();
        let mut out = vec![0u32; self.cols()];
        for (j, &c) in idx.iter().enumerate() {
            out[c] = (local[j] as u64 * s % p as u64) as u32;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::full;

    #[test]
    fn prime_check() {
        assert!(GFMatrix::from_rows(4, vec![vec![1]]).is_err());
        assert!(GFMatrix::from_rows(5, vec![vec![1]]).is_ok());
    }

    #[test]
    fn ranks_mod_p() {
        let m = GFMatrix::from_rows(2, vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank_of_columns(full(3)), 2);
        // over GF(2) the columns (1,0),(1,1),(0,1) sum to zero
        let v = m.kernel_vector(full(3)).unwrap();
        assert_eq!(v, vec![1, 1, 1]);
        let m3 = GFMatrix::from_rows(3, vec![vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(m3.rank_of_columns(0b11), 2);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = GFMatrix::from_rows(5, vec![vec![1, 2, 3, 4], vec![0, 1, 4, 2]]).unwrap();
        // columns 1, 2, 3 are pairwise parallel
        assert_eq!(m.kernel_vector(0b1110), None);
        for s in [0b0111u64, 0b1011, 0b1101] {
            let v = m.kernel_vector(s).unwrap();
            for r in 0..2 {
                let sum: u32 = (0..4).map(|c| v[c] * m.column(c)[r]).sum();
                assert_eq!(sum % 5, 0);
            }
        }
    }
}

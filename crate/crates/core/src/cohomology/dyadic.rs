//! Exact rank of integer matrices over `Z[1/2]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Result of eliminating a matrix over `Q`, preferring pivots that are
/// units of `Z[1/2]` (`±2^j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicRank {
    pub rank: usize,
    /// Every pivot was a unit of `Z[1/2]`, so the rank statement holds over
    /// any coefficient ring in which 2 is invertible.
    pub unimodular: bool,
}

fn is_dyadic_unit(x: &BigRational) -> bool {
    if x.is_zero() {
        return false;
    }
    let strip = |v: &BigInt| {
        let mut v = v.abs();
        let two = BigInt::from(2);
        while (&v % &two).is_zero() {
            v /= &two;
        }
        v.is_one()
    };
    strip(x.numer()) && strip(x.denom())
}

/// `rows[i][j]` is the coefficient of target basis vector `i` in the image
/// of source basis vector `j`.
pub fn dyadic_rank(rows: &[Vec<i64>]) -> DyadicRank {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut unimodular = true;
    for c in 0..width {
        if rank == height {
            break;
        }
        let candidates: Vec<usize> = (rank..height).filter(|&i| !m[i][c].is_zero()).collect();
        let Some(&first) = candidates.first() else {
            continue;
        };
        let pr = candidates
            .iter()
            .copied()
            .find(|&i| is_dyadic_unit(&m[i][c]))
            .unwrap_or_else(|| {
                unimodular = false;
                first
            });
        m.swap(rank, pr);
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let factor = &row[c] / &pivot_row[c];
            for (e, pe) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *e -= &factor * pe;
            }
        }
        rank += 1;
    }
    DyadicRank { rank, unimodular }
}

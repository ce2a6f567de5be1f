//! Special-fiber enumerators.
//!
//! Both strategies walk reduced row-echelon matrices pivot pattern by pivot
//! pattern, so every `n`-dimensional subspace is visited at most once, and
//! both re-verify every emitted subspace against the defining conditions.
//!
//! * `pruned` first moves to a basis `(u_1,…,u_n, Ju_1,…,Ju_n)` adapted to
//!   `J`. There `rank(J|F)` is the number of pivots among the first `n`
//!   columns, so only patterns with at most one such pivot are visited, and
//!   `J`-stability of the single remaining row is tested as soon as its
//!   `J`-image is known.
//! * `exhaustive` visits every pattern in the original coordinates and
//!   filters afterwards.

use rayon::prelude::*;

use super::matrix::{in_span, rref, Matrix, Vector};
use super::{check_scale, SpecialFiberAmbient, SubspaceBasis};
use crate::error::{Error, Result};
use crate::ffield::FieldDesc;
use crate::registry::Registry;

/// Largest number of candidate matrices an enumerator may visit.
pub const CANDIDATE_LIMIT: u128 = 100_000_000;

pub trait FiberEnumerator: Send + Sync {
    fn name(&self) -> &'static str;
    /// Number of row-echelon candidates the strategy would visit.
    fn candidates(&self, ambient: &SpecialFiberAmbient) -> u128;
    /// Sorted, canonical special-fiber points.
    fn enumerate(&self, ambient: &SpecialFiberAmbient) -> Result<Vec<SubspaceBasis>>;
}

pub struct PivotPruned;
pub struct Exhaustive;

pub fn fiber_enumerators() -> Registry<dyn FiberEnumerator> {
    let mut reg: Registry<dyn FiberEnumerator> = Registry::new("fiber enumerator");
    reg.register("pruned", || Box::new(PivotPruned))
        .register("exhaustive", || Box::new(Exhaustive));
    reg
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Pivot patterns for `n`-dimensional subspaces of `F^{2n}`.
fn pivot_sets(n: usize, pruned: bool) -> Vec<Vec<usize>> {
    combinations(2 * n, n)
        .into_iter()
        .filter(|p| !pruned || p.iter().filter(|&&c| c < n).count() <= 1)
        .collect()
}

fn free_columns(pivots: &[usize], row: usize, width: usize) -> Vec<usize> {
    (pivots[row] + 1..width)
        .filter(|c| !pivots.contains(c))
        .collect()
}

/// `Σ_P q^{free(P)}` over the visited pivot patterns (saturating).
pub fn candidate_count(n: usize, q: u64, pruned: bool) -> u128 {
    pivot_sets(n, pruned)
        .iter()
        .map(|p| {
            let free: usize = (0..n).map(|r| free_columns(p, r, 2 * n).len()).sum();
            (q as u128).checked_pow(free as u32).unwrap_or(u128::MAX)
        })
        .fold(0u128, u128::saturating_add)
}

fn guard(count: u128) -> Result<()> {
    if count > CANDIDATE_LIMIT {
        return Err(Error::TooLarge {
            what: "special-fiber candidate subspaces",
            size: count,
            limit: CANDIDATE_LIMIT,
        });
    }
    Ok(())
}

/// All `q^len` value tuples, first slot fastest.
fn tuples(len: usize, q: u32) -> impl Iterator<Item = Vec<u32>> {
    let total = (q as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        (0..len)
            .map(|_| {
                let v = (code % q as u64) as u32;
                code /= q as u64;
                v
            })
            .collect()
    })
}

fn skeleton(field: &FieldDesc, pivots: &[usize], width: usize) -> Vec<Vector> {
    pivots
        .iter()
        .map(|&c| {
            let mut r = vec![field.zero(); width];
            r[c] = field.one();
            r
        })
        .collect()
}

fn isotropic(field: &FieldDesc, psi: &Matrix, rows: &[Vector]) -> bool {
    let images: Vec<Vector> = rows.iter().map(|r| psi.apply(field, r)).collect();
    (0..rows.len()).all(|a| {
        (a + 1..rows.len()).all(|b| super::matrix::dot(field, &rows[a], &images[b]).is_zero())
    })
}

fn finish(
    ambient: &SpecialFiberAmbient,
    mut found: Vec<SubspaceBasis>,
) -> Result<Vec<SubspaceBasis>> {
    found.sort();
    let before = found.len();
    found.dedup();
    if found.len() != before {
        return Err(Error::InvariantViolation(
            "enumerator produced a subspace twice".into(),
        ));
    }
    if let Some(bad) = found.iter().find(|f| !ambient.is_special_fiber_point(f)) {
        return Err(Error::InvariantViolation(format!(
            "enumerated subspace {bad:?} fails re-verification"
        )));
    }
    Ok(found)
}

/// Basis `(u_1,…,u_n, Ju_1,…,Ju_n)` as the columns of a matrix, with the
/// `u_i` chosen greedily among standard basis vectors.
fn adapted_basis(ambient: &SpecialFiberAmbient) -> Matrix {
    let field = ambient.field();
    let n = ambient.n();
    let mut spanning: Vec<Vector> = ambient.image_of_j().rows().to_vec();
    let mut complement = Vec::new();
    for i in 0..2 * n {
        if complement.len() == n {
            break;
        }
        let mut e = vec![field.zero(); 2 * n];
        e[i] = field.one();
        let (basis, pivots) = rref(field, spanning.clone());
        if !in_span(field, &basis, &pivots, &e) {
            spanning.push(e.clone());
            complement.push(e);
        }
    }
    let images: Vec<Vector> = complement.iter().map(|u| ambient.apply_j(u)).collect();
    let cols: Vec<Vector> = complement.into_iter().chain(images).collect();
    Matrix::from_columns(&cols)
}

impl FiberEnumerator for PivotPruned {
    fn name(&self) -> &'static str {
        "pruned"
    }

    fn candidates(&self, ambient: &SpecialFiberAmbient) -> u128 {
        candidate_count(ambient.n(), ambient.field().order(), true)
    }

    fn enumerate(&self, ambient: &SpecialFiberAmbient) -> Result<Vec<SubspaceBasis>> {
        let field = ambient.field();
        let n = ambient.n();
        let q = field.order() as u32;
        check_scale(field.p(), n, field.k())?;
        guard(self.candidates(ambient))?;

        let g = adapted_basis(ambient);
        let psi = g.transpose().mul(field, ambient.psi()).mul(field, &g);
        let width = 2 * n;
        let patterns = pivot_sets(n, true);

        let found: Vec<SubspaceBasis> = patterns
            .par_iter()
            .flat_map_iter(|pivots| {
                let mut out = Vec::new();
                let base = skeleton(field, pivots, width);
                if pivots[0] >= n {
                    // All pivots in the kernel block: F = im J.
                    out.push(base);
                } else {
                    let kernel_free: Vec<(usize, usize)> = (1..n)
                        .flat_map(|r| {
                            free_columns(pivots, r, width)
                                .into_iter()
                                .map(move |c| (r, c))
                        })
                        .collect();
                    let lead_free = free_columns(pivots, 0, width);
                    let lead_top: Vec<usize> =
                        lead_free.iter().copied().filter(|&c| c < n).collect();
                    let lead_bottom: Vec<usize> =
                        lead_free.iter().copied().filter(|&c| c >= n).collect();
                    let kernel_pivots = &pivots[1..];
                    for kv in tuples(kernel_free.len(), q) {
                        let mut rows = base.clone();
                        for (&(r, c), &v) in kernel_free.iter().zip(&kv) {
                            rows[r][c] = field.from_index(v);
                        }
                        for tv in tuples(lead_top.len(), q) {
                            for (&c, &v) in lead_top.iter().zip(&tv) {
                                rows[0][c] = field.from_index(v);
                            }
                            // In adapted coordinates J moves the top block down.
                            let mut image = vec![field.zero(); width];
                            image[n..].copy_from_slice(&rows[0][..n]);
                            if !in_span(field, &rows[1..], kernel_pivots, &image) {
                                continue;
                            }
                            for bv in tuples(lead_bottom.len(), q) {
                                for (&c, &v) in lead_bottom.iter().zip(&bv) {
                                    rows[0][c] = field.from_index(v);
                                }
                                if isotropic(field, &psi, &rows) {
                                    out.push(rows.clone());
                                }
                            }
                        }
                    }
                }
                out.into_iter().map(|rows| {
                    let original: Vec<Vector> = rows.iter().map(|c| g.apply(field, c)).collect();
                    SubspaceBasis::span(field, original)
                })
            })
            .collect();
        finish(ambient, found)
    }
}

impl FiberEnumerator for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn candidates(&self, ambient: &SpecialFiberAmbient) -> u128 {
        candidate_count(ambient.n(), ambient.field().order(), false)
    }

    fn enumerate(&self, ambient: &SpecialFiberAmbient) -> Result<Vec<SubspaceBasis>> {
        let field = ambient.field();
        let n = ambient.n();
        let q = field.order() as u32;
        check_scale(field.p(), n, field.k())?;
        guard(self.candidates(ambient))?;
        let width = 2 * n;
        let found: Vec<SubspaceBasis> = pivot_sets(n, false)
            .par_iter()
            .flat_map_iter(|pivots| {
                let free: Vec<(usize, usize)> = (0..n)
                    .flat_map(|r| {
                        free_columns(pivots, r, width)
                            .into_iter()
                            .map(move |c| (r, c))
                    })
                    .collect();
                let base = skeleton(field, pivots, width);
                tuples(free.len(), q).filter_map(move |vals| {
                    let mut rows = base.clone();
                    for (&(r, c), &v) in free.iter().zip(&vals) {
                        rows[r][c] = field.from_index(v);
                    }
                    let f = SubspaceBasis { rows };
                    ambient.is_special_fiber_point(&f).then_some(f)
                })
            })
            .collect();
        finish(ambient, found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;
    use crate::hermitian::HermitianDatum;

    fn gaussian_binomial(n: u32, k: u32, q: u128) -> u128 {
        let num: u128 = (0..k).map(|i| q.pow(n - i) - 1).product();
        let den: u128 = (0..k).map(|i| q.pow(k - i) - 1).product();
        num / den
    }

    #[test]
    fn exhaustive_count_is_gaussian_binomial() {
        for (n, q) in [(2, 3), (2, 5), (3, 3), (4, 3), (3, 9)] {
            assert_eq!(
                candidate_count(n, q, false),
                gaussian_binomial(2 * n as u32, n as u32, q as u128)
            );
        }
    }

    #[test]
    fn pruned_counts_fit_the_envelope() {
        assert!(candidate_count(4, 3, true) < 100_000);
        assert!(candidate_count(3, 9, true) < 1_000_000);
        assert!(candidate_count(3, 49, true) > CANDIDATE_LIMIT);
    }

    #[test]
    fn pruned_matches_exhaustive_for_small_cases() {
        for (p, diag) in [
            (3u64, vec![1i64, -1]),
            (3, vec![1, 1]),
            (5, vec![1, -1]),
            (5, vec![1, 2]),
            (3, vec![1, 1, 1]),
        ] {
            let d = HermitianDatum::from_units(p, &diag).unwrap();
            let a = SpecialFiberAmbient::build(&d, &make_field(p, 1).unwrap()).unwrap();
            let pruned = PivotPruned.enumerate(&a).unwrap();
            let full = Exhaustive.enumerate(&a).unwrap();
            assert_eq!(pruned, full, "p = {p}, diag = {diag:?}");
        }
    }

    #[test]
    fn guard_refuses_huge_exhaustive() {
        let d = HermitianDatum::from_units(3, &[1, 1, 1]).unwrap();
        let a = SpecialFiberAmbient::build(&d, &make_field(3, 2).unwrap()).unwrap();
        assert!(matches!(
            Exhaustive.enumerate(&a),
            Err(Error::TooLarge { .. })
        ));
    }
}

//! Projective point counts of nondegenerate diagonal quadrics
//! `a_1 x_1^2 + … + a_n x_n^2 = 0` in `P^{n-1}(F_q)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsum;
use crate::error::{Error, Result};
use crate::ffield::{FieldDesc, FieldElem};
use crate::registry::Registry;

/// Largest affine enumeration `q^n` accepted by the brute-force counter.
pub const AFFINE_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalQuadraticForm {
    field: FieldDesc,
    entries: Vec<FieldElem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscriminantClass {
    Square,
    Nonsquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormClass {
    /// Hyperbolic (split) vs elliptic; `None` in odd dimension.
    pub split: Option<bool>,
    pub discriminant_class: DiscriminantClass,
}

impl FormClass {
    /// `+1` split, `-1` non-split, `None` for odd `n`.
    pub fn epsilon(&self) -> Option<i8> {
        self.split.map(|s| if s { 1 } else { -1 })
    }
}

impl DiagonalQuadraticForm {
    pub fn new(field: &FieldDesc, entries: Vec<FieldElem>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidForm(format!(
                "need at least 2 variables, got {}",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|e| e.is_zero()) {
            return Err(Error::InvalidForm(format!("entry {i} is zero")));
        }
        if let Some(e) = entries.iter().find(|e| e.index() as u64 >= field.order()) {
            return Err(Error::InvalidForm(format!(
                "entry index {} outside {:?}",
                e.index(),
                field
            )));
        }
        Ok(Self {
            field: field.clone(),
            entries,
        })
    }

    /// Form with integer coefficients reduced into the prime subfield.
    pub fn from_ints(field: &FieldDesc, entries: &[i64]) -> Result<Self> {
        Self::new(field, entries.iter().map(|&a| field.from_int(a)).collect())
    }

    /// `x_1^2 + … + x_m^2 - x_{m+1}^2 - … - x_n^2`, with the last entry
    /// multiplied by `last_scale` (e.g. a non-residue for the non-split form).
    pub fn standard(field: &FieldDesc, n: usize, last_scale: i64) -> Result<Self> {
        let half = n.div_ceil(2);
        let mut entries: Vec<i64> = (0..n).map(|i| if i < half { 1 } else { -1 }).collect();
        if let Some(last) = entries.last_mut() {
            *last *= last_scale;
        }
        Self::from_ints(field, &entries)
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.entries.len()
    }

    pub fn evaluate(&self, x: &[FieldElem]) -> FieldElem {
        let f = &self.field;
        self.entries.iter().zip(x).fold(f.zero(), |acc, (&a, &xi)| {
            f.add(acc, f.mul(a, f.mul(xi, xi)))
        })
    }

    /// Same coefficients viewed over an extension of the base field.
    pub fn base_change(&self, ext: &FieldDesc) -> Result<Self> {
        if ext.p() != self.field.p() || !ext.k().is_multiple_of(self.field.k()) {
            return Err(Error::FieldMismatch(format!(
                "{:?} does not contain {:?}",
                ext, self.field
            )));
        }
        if self.field.k() != 1 {
            return Err(Error::FieldMismatch(
                "base change is only implemented from prime fields".into(),
            ));
        }
        Self::new(
            ext,
            self.entries
                .iter()
                .map(|e| ext.from_int(e.index() as i64))
                .collect(),
        )
    }

    fn discriminant(&self) -> FieldElem {
        let f = &self.field;
        self.entries.iter().fold(f.one(), |acc, &a| f.mul(acc, a))
    }
}

/// Discriminant class of `Π a_i`; for even `n`, split iff
/// `χ((-1)^{n/2} Π a_i) = +1`.
pub fn classify_diagonal_form(form: &DiagonalQuadraticForm) -> FormClass {
    let f = &form.field;
    let disc = form.discriminant();
    let discriminant_class = if f.quad_char(disc) == 1 {
        DiscriminantClass::Square
    } else {
        DiscriminantClass::Nonsquare
    };
    let n = form.dimension();
    let split = n.is_multiple_of(2).then(|| {
        let sign = if (n / 2).is_multiple_of(2) {
            f.one()
        } else {
            f.neg(f.one())
        };
        f.quad_char(f.mul(sign, disc)) == 1
    });
    FormClass {
        split,
        discriminant_class,
    }
}

/// Number of zeros of the form in `F_q^n`, by direct enumeration.
pub fn count_affine_zeros(form: &DiagonalQuadraticForm) -> Result<u64> {
    let f = &form.field;
    let q = f.order();
    let n = form.dimension();
    let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > AFFINE_LIMIT {
        return Err(Error::TooLarge {
            what: "affine quadric enumeration",
            size,
            limit: AFFINE_LIMIT,
        });
    }
    // a_i x^2 for every coordinate value, per variable.
    let terms: Vec<Vec<FieldElem>> = form
        .entries
        .iter()
        .map(|&a| f.elements().map(|x| f.mul(a, f.mul(x, x))).collect())
        .collect();
    // Partition by the leading coordinate.
    let count = (0..q as usize)
        .into_par_iter()
        .map(|lead| {
            let mut idx = vec![0usize; n - 1];
            let mut hits = 0u64;
            'outer: loop {
                let mut s = terms[0][lead];
                for (j, &i) in idx.iter().enumerate() {
                    s = f.add(s, terms[j + 1][i]);
                }
                if s.is_zero() {
                    hits += 1;
                }
                for slot in idx.iter_mut() {
                    *slot += 1;
                    if *slot < q as usize {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            hits
        })
        .sum();
    Ok(count)
}

/// `(N_affine - 1) / (q - 1)`.
pub fn count_projective_points_bruteforce(form: &DiagonalQuadraticForm) -> Result<u64> {
    let affine = count_affine_zeros(form)?;
    let q = form.field.order();
    if (affine - 1) % (q - 1) != 0 {
        return Err(Error::DivisibilityViolation {
            numerator: (affine - 1).to_string(),
            divisor: (q - 1).to_string(),
            context: "projectivization of affine zeros",
        });
    }
    Ok((affine - 1) / (q - 1))
}

/// `Σ_{i=0}^{n-2} q^i`, plus `ε q^{n/2 - 1}` when `n` is even.
pub fn count_points_weil(n: usize, epsilon: Option<i8>, field: &FieldDesc) -> Result<i128> {
    let bad = || Error::EpsilonMismatch { n, epsilon };
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let q = field.order() as i128;
    let base: i128 = (0..=n as u32 - 2).map(|i| q.pow(i)).sum();
    match (n % 2, epsilon) {
        (1, None) => Ok(base),
        (0, Some(e)) if e == 1 || e == -1 => Ok(base + e as i128 * q.pow(n as u32 / 2 - 1)),
        _ => Err(bad()),
    }
}

/// Weil's count with the character sum left unevaluated: the even-dimensional
/// correction is `χ(Π a_i) · j_{n/2}`, with `j_{n/2}` taken from the
/// convolution oracle.
pub fn count_points_jacobi(form: &DiagonalQuadraticForm) -> Result<i128> {
    let f = &form.field;
    let n = form.dimension();
    let q = f.order() as i128;
    let base: i128 = (0..=n as u32 - 2).map(|i| q.pow(i)).sum();
    if n % 2 == 1 {
        return Ok(base);
    }
    let j = charsum::jacobi_sum_bruteforce(f, n / 2)?;
    let correction = BigInt::from(f.quad_char(form.discriminant())) * j;
    Ok(base + correction.to_i128().expect("small correction"))
}

/// A way of counting `#Q(F_q)` for a diagonal quadric.
pub trait PointCounter: Send + Sync {
    fn name(&self) -> &'static str;
    fn count(&self, form: &DiagonalQuadraticForm) -> Result<i128>;
}

pub struct BruteForce;
pub struct Weil;
pub struct JacobiWeil;

impl PointCounter for BruteForce {
    fn name(&self) -> &'static str {
        "bruteforce"
    }
    fn count(&self, form: &DiagonalQuadraticForm) -> Result<i128> {
        count_projective_points_bruteforce(form).map(i128::from)
    }
}

impl PointCounter for Weil {
    fn name(&self) -> &'static str {
        "weil"
    }
    fn count(&self, form: &DiagonalQuadraticForm) -> Result<i128> {
        let class = classify_diagonal_form(form);
        count_points_weil(form.dimension(), class.epsilon(), &form.field)
    }
}

impl PointCounter for JacobiWeil {
    fn name(&self) -> &'static str {
        "jacobi"
    }
    fn count(&self, form: &DiagonalQuadraticForm) -> Result<i128> {
        count_points_jacobi(form)
    }
}

pub fn point_counters() -> Registry<dyn PointCounter> {
    let mut reg: Registry<dyn PointCounter> = Registry::new("point counter");
    reg.register("bruteforce", || Box::new(BruteForce))
        .register("weil", || Box::new(Weil))
        .register("jacobi", || Box::new(JacobiWeil));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn f(p: u64) -> FieldDesc {
        make_field(p, 1).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let f3 = f(3);
        let hyp = DiagonalQuadraticForm::from_ints(&f3, &[1, -1]).unwrap();
        assert_eq!(count_projective_points_bruteforce(&hyp).unwrap(), 2);
        let conic = DiagonalQuadraticForm::from_ints(&f3, &[1, 1, 1]).unwrap();
        assert_eq!(count_projective_points_bruteforce(&conic).unwrap(), 4);
        let split4 = DiagonalQuadraticForm::from_ints(&f3, &[1, 1, -1, -1]).unwrap();
        assert_eq!(count_projective_points_bruteforce(&split4).unwrap(), 16);
        let nonsplit4 = DiagonalQuadraticForm::from_ints(&f3, &[1, 1, 1, 2]).unwrap();
        assert_eq!(count_projective_points_bruteforce(&nonsplit4).unwrap(), 10);
    }

    #[test]
    fn weil_examples() {
        let f3 = f(3);
        assert_eq!(count_points_weil(3, None, &f3).unwrap(), 4);
        assert_eq!(count_points_weil(4, Some(1), &f3).unwrap(), 16);
        assert_eq!(count_points_weil(4, Some(-1), &f3).unwrap(), 10);
        assert!(matches!(
            count_points_weil(3, Some(1), &f3),
            Err(Error::EpsilonMismatch { .. })
        ));
        assert!(matches!(
            count_points_weil(4, None, &f3),
            Err(Error::EpsilonMismatch { .. })
        ));
        assert!(count_points_weil(4, Some(0), &f3).is_err());
    }

    #[test]
    fn classification_examples() {
        let f3 = f(3);
        let c = classify_diagonal_form(&DiagonalQuadraticForm::from_ints(&f3, &[1, -1]).unwrap());
        assert_eq!(c.split, Some(true));
        let c = classify_diagonal_form(&DiagonalQuadraticForm::from_ints(&f3, &[1, 1]).unwrap());
        assert_eq!(c.split, Some(false));
        let f5 = f(5);
        let c = classify_diagonal_form(&DiagonalQuadraticForm::from_ints(&f5, &[1, 1, 1]).unwrap());
        assert_eq!(c.split, None);
        assert_eq!(c.discriminant_class, DiscriminantClass::Square);
    }

    #[test]
    fn invalid_forms() {
        let f3 = f(3);
        assert!(DiagonalQuadraticForm::from_ints(&f3, &[1]).is_err());
        assert!(DiagonalQuadraticForm::from_ints(&f3, &[1, 3]).is_err());
    }

    #[test]
    fn guard_refuses_large_enumeration() {
        let f = make_field(7, 2).unwrap();
        let form = DiagonalQuadraticForm::from_ints(&f, &[1; 5]).unwrap();
        assert!(matches!(
            count_projective_points_bruteforce(&form),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn counters_agree_through_registry() {
        let reg = point_counters();
        let f5 = f(5);
        let form = DiagonalQuadraticForm::standard(&f5, 4, 2).unwrap();
        let counts: Vec<i128> = reg
            .names()
            .iter()
            .map(|n| reg.get(n).unwrap().count(&form).unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }

    #[test]
    fn nonsplit_form_becomes_split_over_quadratic_extension() {
        let f3 = f(3);
        let f9 = make_field(3, 2).unwrap();
        let form = DiagonalQuadraticForm::from_ints(&f3, &[1, 1]).unwrap();
        assert_eq!(classify_diagonal_form(&form).split, Some(false));
        let ext = form.base_change(&f9).unwrap();
        assert_eq!(classify_diagonal_form(&ext).split, Some(true));
        assert_eq!(count_projective_points_bruteforce(&ext).unwrap(), 2);
    }
}

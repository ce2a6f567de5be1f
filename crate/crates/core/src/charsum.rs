//! Quadratic-character sums over constrained tuples and the normalized
//! Jacobi sums
//!
//! ```text
//! j_m = 1/(q-1) · Σ_{u_1 + … + u_{2m} = 0, u_i ≠ 0} χ(u_1)···χ(u_{2m})
//! ```
//!
//! evaluated three ways: by repeated additive convolution of `χ`, by literal
//! enumeration of tuples (small cases only), and by the closed form
//! `χ(-1)^m q^{m-1}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ffield::{FieldDesc, FieldElem};
use crate::registry::Registry;

/// Bound on the number of tuples visited by [`jacobi_sum_literal`].
pub const LITERAL_TUPLE_LIMIT: u128 = 10_000_000;

/// An integer-valued function on `F_q`, indexed by element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedCountVector {
    field: FieldDesc,
    values: Vec<BigInt>,
}

impl SignedCountVector {
    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn get(&self, t: FieldElem) -> &BigInt {
        &self.values[t.index() as usize]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// Sum of all values.
    pub fn total(&self) -> BigInt {
        self.values.iter().sum()
    }
}

fn chi_vector(field: &FieldDesc) -> Vec<i8> {
    field.elements().map(|x| field.quad_char(x)).collect()
}

fn convolve_with_chi(field: &FieldDesc, prev: &[BigInt], chi: &[i8]) -> Vec<BigInt> {
    (0..field.order() as u32)
        .into_par_iter()
        .map(|t| {
            let t = field.from_index(t);
            field.elements().fold(BigInt::zero(), |mut acc, s| {
                let c = &prev[s.index() as usize];
                match chi[field.sub(t, s).index() as usize] {
                    1 => acc += c,
                    -1 => acc -= c,
                    _ => {}
                }
                acc
            })
        })
        .collect()
}

/// `c_k(t) = Σ_{u ∈ (F_q^×)^k, Σu = t} χ(u_1)···χ(u_k)`, built from
/// `c_1 = χ` by `k - 1` additive convolutions.
pub fn char_convolution_power(field: &FieldDesc, k: usize) -> Result<SignedCountVector> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "convolution power must be at least 1".into(),
        ));
    }
    let chi = chi_vector(field);
    let mut values: Vec<BigInt> = chi.iter().map(|&c| BigInt::from(c)).collect();
    for _ in 1..k {
        values = convolve_with_chi(field, &values, &chi);
    }
    Ok(SignedCountVector {
        field: field.clone(),
        values,
    })
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    Ok(())
}

fn exact_div(num: BigInt, den: BigInt, context: &'static str) -> Result<BigInt> {
    if !(&num % &den).is_zero() {
        return Err(Error::DivisibilityViolation {
            numerator: num.to_string(),
            divisor: den.to_string(),
            context,
        });
    }
    Ok(num / den)
}

/// `j_m` from the convolution oracle: `c_{2m}(0) / (q - 1)`.
pub fn jacobi_sum_bruteforce(field: &FieldDesc, m: usize) -> Result<BigInt> {
    check_m(m)?;
    let c = char_convolution_power(field, 2 * m)?;
    exact_div(
        c.get(field.zero()).clone(),
        BigInt::from(field.order() - 1),
        "Jacobi sum normalization",
    )
}

/// `j_m = χ(-1)^m · q^{m-1}`.
pub fn jacobi_sum_closed(field: &FieldDesc, m: usize) -> BigInt {
    assert!(m >= 1, "m must be at least 1");
    let sign = BigInt::from(field.quad_char(field.neg(field.one()))).pow(m as u32);
    sign * BigInt::from(field.order()).pow(m as u32 - 1)
}

/// `j_m` by literal enumeration of all `(q-1)^{2m}` tuples.
pub fn jacobi_sum_literal(field: &FieldDesc, m: usize) -> Result<BigInt> {
    check_m(m)?;
    let nonzero: Vec<FieldElem> = field.nonzero_elements().collect();
    let len = 2 * m;
    let tuples = (nonzero.len() as u128).checked_pow(len as u32);
    match tuples {
        Some(t) if t <= LITERAL_TUPLE_LIMIT => {}
        _ => {
            return Err(Error::TooLarge {
                what: "literal Jacobi tuples",
                size: tuples.unwrap_or(u128::MAX),
                limit: LITERAL_TUPLE_LIMIT,
            })
        }
    }
    let mut idx = vec![0usize; len];
    let mut total: i64 = 0;
    'outer: loop {
        let mut sum = field.zero();
        let mut sign = 1i64;
        for &i in &idx {
            sum = field.add(sum, nonzero[i]);
            sign *= field.quad_char(nonzero[i]) as i64;
        }
        if sum.is_zero() {
            total += sign;
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < nonzero.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    exact_div(
        BigInt::from(total),
        BigInt::from(field.order() - 1),
        "literal Jacobi sum normalization",
    )
}

/// Every quantity appearing in the step `j_{m-1} → j_m`, each evaluated
/// independently by convolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionTerms {
    pub m: usize,
    pub q: u64,
    pub chi_minus_one: i8,
    pub j_m: BigInt,
    pub j_prev: BigInt,
    /// `χ(-1) · Σ_{v_1 + … + v_{2m-1} = 1} χ(v_1)···χ(v_{2m-1})`.
    pub shifted_sum: BigInt,
    /// `Σ_{w ∉ {0,1}} χ(1-w) · Σ_{v_1 + … + v_{2m-2} = w} χ(v_1)···χ(v_{2m-2})`.
    pub inner_sum: BigInt,
}

impl RecursionTerms {
    pub fn shifted_identity_holds(&self) -> bool {
        self.j_m == self.shifted_sum
    }

    /// `j_m = χ(-1)(q-1) j_{m-1} + χ(-1) S`.
    pub fn split_identity_holds(&self) -> bool {
        let chi = BigInt::from(self.chi_minus_one);
        let rhs = &chi * BigInt::from(self.q - 1) * &self.j_prev + &chi * &self.inner_sum;
        self.j_m == rhs
    }

    pub fn inner_sum_holds(&self) -> bool {
        self.inner_sum == self.j_prev
    }

    /// `j_m = χ(-1) q j_{m-1}`.
    pub fn step_holds(&self) -> bool {
        self.j_m == BigInt::from(self.chi_minus_one) * BigInt::from(self.q) * &self.j_prev
    }

    pub fn all_hold(&self) -> bool {
        self.shifted_identity_holds()
            && self.split_identity_holds()
            && self.inner_sum_holds()
            && self.step_holds()
    }
}

pub fn recursion_terms(field: &FieldDesc, m: usize) -> Result<RecursionTerms> {
    if m < 2 {
        return Err(Error::InvalidParameter("recursion needs m >= 2".into()));
    }
    let one = field.one();
    let chi_minus_one = field.quad_char(field.neg(one));
    let odd = char_convolution_power(field, 2 * m - 1)?;
    let shifted_sum = BigInt::from(chi_minus_one) * odd.get(one);
    let even = char_convolution_power(field, 2 * m - 2)?;
    let inner_sum = field
        .elements()
        .filter(|&w| !w.is_zero() && w != one)
        .map(|w| BigInt::from(field.quad_char(field.sub(one, w))) * even.get(w))
        .sum();
    Ok(RecursionTerms {
        m,
        q: field.order(),
        chi_minus_one,
        j_m: jacobi_sum_bruteforce(field, m)?,
        j_prev: jacobi_sum_bruteforce(field, m - 1)?,
        shifted_sum,
        inner_sum,
    })
}

/// True iff every identity of the `j_{m-1} → j_m` step holds exactly.
pub fn verify_recursion(field: &FieldDesc, m: usize) -> bool {
    recursion_terms(field, m).is_ok_and(|t| t.all_hold())
}

/// `Σ_{x ∉ {0,1}} χ(x(1-x))`, which equals `-χ(-1)`.
pub fn base_case_sum(field: &FieldDesc) -> i64 {
    let one = field.one();
    field
        .elements()
        .filter(|&x| !x.is_zero() && x != one)
        .map(|x| field.quad_char(field.mul(x, field.sub(one, x))) as i64)
        .sum()
}

/// A way of evaluating `j_m`.
pub trait JacobiSumMethod: Send + Sync {
    fn name(&self) -> &'static str;
    fn jacobi_sum(&self, field: &FieldDesc, m: usize) -> Result<BigInt>;
}

pub struct Convolution;
pub struct ClosedForm;
pub struct Literal;

impl JacobiSumMethod for Convolution {
    fn name(&self) -> &'static str {
        "convolution"
    }
    fn jacobi_sum(&self, field: &FieldDesc, m: usize) -> Result<BigInt> {
        jacobi_sum_bruteforce(field, m)
    }
}

impl JacobiSumMethod for ClosedForm {
    fn name(&self) -> &'static str {
        "closed"
    }
    fn jacobi_sum(&self, field: &FieldDesc, m: usize) -> Result<BigInt> {
        check_m(m)?;
        Ok(jacobi_sum_closed(field, m))
    }
}

impl JacobiSumMethod for Literal {
    fn name(&self) -> &'static str {
        "literal"
    }
    fn jacobi_sum(&self, field: &FieldDesc, m: usize) -> Result<BigInt> {
        jacobi_sum_literal(field, m)
    }
}

pub fn jacobi_methods() -> Registry<dyn JacobiSumMethod> {
    let mut reg: Registry<dyn JacobiSumMethod> = Registry::new("Jacobi-sum method");
    reg.register("convolution", || Box::new(Convolution))
        .register("closed", || Box::new(ClosedForm))
        .register("literal", || Box::new(Literal));
    reg
}

/// `|j_m|` must be a power of `q`; used as a cheap sanity check in reports.
pub fn is_signed_power_of(value: &BigInt, q: u64) -> bool {
    let mut v = value.abs();
    let q = BigInt::from(q);
    while !v.is_one() {
        if v.is_zero() || !(&v % &q).is_zero() {
            return false;
        }
        v /= &q;
    }
    true
}

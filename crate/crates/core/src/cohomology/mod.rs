//! Cohomology of the strata `Z_1 ≅ P^{n-1}`, `Q` and `Z_2` as free
//! coefficient modules with Frobenius weights, the monodromy spectral
//! sequence pages built from them, and the nearby-cycles stalks at the
//! singular point.
//!
//! Coefficients are taken in a ring where 2 is invertible: the Gysin map
//! `ι_{1*}` of the quadric is multiplication by its class `2h`.

mod dyadic;
mod page;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::make_field;
use crate::hermitian::{epsilon_of, HermitianDatum};
use crate::localmodel::{enumerate_special_fiber, find_singular_locus, SpecialFiberAmbient};

pub use dyadic::{dyadic_rank, DyadicRank};
pub use page::{
    build_e1_k, build_e1_z1, compute_e2_z1, compute_e2_z1_unchecked, E2Page, IntMatrix, PageEntry,
    RowRanks, SpectralPage, TableRow,
};

/// Frobenius eigenvalue `sign · p^exponent`; `twist` counts the Tate twists
/// already folded into `exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FrobWeight {
    pub sign: i8,
    pub exponent: u32,
    pub twist: i32,
}

impl FrobWeight {
    pub fn new(sign: i8, exponent: u32) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        Self {
            sign,
            exponent,
            twist: 0,
        }
    }

    /// Tate twist `(-1)`: the eigenvalue gains a factor `p`.
    pub fn twisted(self) -> Self {
        Self {
            sign: self.sign,
            exponent: self.exponent + 1,
            twist: self.twist + 1,
        }
    }

    /// `(sign, exponent)`, which determines the eigenvalue.
    pub fn key(self) -> (i8, u32) {
        (self.sign, self.exponent)
    }

    /// Eigenvalue of `Frob^k`: `sign^k · p^{k·exponent}`.
    pub fn eigenvalue_pow(self, p: u64, k: u32) -> i128 {
        let mag = (p as i128)
            .checked_pow(k * self.exponent)
            .expect("Frobenius eigenvalue overflows i128");
        if self.sign == -1 && k % 2 == 1 {
            -mag
        } else {
            mag
        }
    }

    pub fn eigenvalue(self, p: u64) -> i128 {
        self.eigenvalue_pow(p, 1)
    }
}

/// Basis symbols used by the tables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    /// `h^k` on `Z_1 ≅ P^{n-1}`.
    Hyper(u32),
    /// `ι_1^* h^k` on `Q`.
    Restricted(u32),
    /// The primitive middle class of `Q` (even `n`).
    Prim,
    /// `t · x` on the `P^1`-bundle `Z_2`.
    Fiber(Box<Symbol>),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Hyper(k) => write!(f, "h^{k}"),
            Symbol::Restricted(k) => write!(f, "i1*h^{k}"),
            Symbol::Prim => write!(f, "prim"),
            Symbol::Fiber(s) => write!(f, "t.{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisClass {
    pub symbol: Symbol,
    pub weight: FrobWeight,
}

impl BasisClass {
    fn twisted(&self) -> Self {
        Self {
            symbol: self.symbol.clone(),
            weight: self.weight.twisted(),
        }
    }
}

/// Graded free module: degree ↦ basis classes with their weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedModule {
    pub p: u64,
    pub degrees: BTreeMap<i64, Vec<BasisClass>>,
}

impl WeightedModule {
    pub fn empty(p: u64) -> Self {
        Self {
            p,
            degrees: BTreeMap::new(),
        }
    }

    pub fn classes(&self, degree: i64) -> &[BasisClass] {
        self.degrees.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.classes(degree).len()
    }

    pub fn total_rank(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn weights(&self, degree: i64) -> Vec<FrobWeight> {
        self.classes(degree).iter().map(|c| c.weight).collect()
    }

    fn push(&mut self, degree: i64, symbol: Symbol, weight: FrobWeight) {
        self.degrees
            .entry(degree)
            .or_default()
            .push(BasisClass { symbol, weight });
    }
}

/// `H^*(P^{n-1})`: one class `h^k` of weight `p^k` in each degree `2k`.
pub fn cohomology_projective_space(n_minus_1: u32, p: u64) -> WeightedModule {
    let mut m = WeightedModule::empty(p);
    for k in 0..=n_minus_1 {
        m.push(2 * k as i64, Symbol::Hyper(k), FrobWeight::new(1, k));
    }
    m
}

fn check_epsilon(n: usize, epsilon: Option<i8>) -> Result<()> {
    match (n % 2, epsilon) {
        (1, None) => Ok(()),
        (0, Some(1)) | (0, Some(-1)) => Ok(()),
        _ => Err(Error::EpsilonMismatch { n, epsilon }),
    }
}

/// `H^*(Q)` of the smooth quadric `Q ⊂ P^{n-1}`: the restrictions
/// `ι_1^* h^k` in degrees `2k ≤ 2(n-2)`, plus the primitive class of
/// weight `ε p^{(n-2)/2}` in degree `n-2` for even `n`.
pub fn cohomology_quadric(n: usize, epsilon: Option<i8>, p: u64) -> Result<WeightedModule> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    check_epsilon(n, epsilon)?;
    let mut m = WeightedModule::empty(p);
    for k in 0..=(n as u32 - 2) {
        m.push(2 * k as i64, Symbol::Restricted(k), FrobWeight::new(1, k));
    }
    if let Some(e) = epsilon {
        let half = (n as u32 - 2) / 2;
        m.push(n as i64 - 2, Symbol::Prim, FrobWeight::new(e, half));
    }
    Ok(m)
}

/// Projective bundle formula: `H^*(Z_2) = H^*(Q) ⊕ t·H^{*-2}(Q)(-1)`.
pub fn cohomology_p1_bundle(base: &WeightedModule) -> WeightedModule {
    let mut m = WeightedModule::empty(base.p);
    for (&d, classes) in &base.degrees {
        for c in classes {
            m.push(d, c.symbol.clone(), c.weight);
        }
    }
    for (&d, classes) in &base.degrees {
        for c in classes {
            let t = c.twisted();
            m.push(d + 2, Symbol::Fiber(Box::new(t.symbol)), t.weight);
        }
    }
    m
}

/// Lefschetz count over `F_{p^k}`: `Σ_d (-1)^d Σ_w w^k`.
pub fn predicted_point_count(table: &WeightedModule, k: u32) -> i128 {
    table
        .degrees
        .iter()
        .map(|(&d, classes)| {
            let s: i128 = classes
                .iter()
                .map(|c| c.weight.eigenvalue_pow(table.p, k))
                .sum();
            if d.rem_euclid(2) == 0 {
                s
            } else {
                -s
            }
        })
        .sum()
}

/// Stalks of `R^d Ψ Λ` at the singular point: degree ↦ Frobenius weights.
pub type Stalks = BTreeMap<i64, Vec<FrobWeight>>;

/// Nearby-cycles stalks at the singular point. For `n >= 3` these are read
/// off the computed `E_2` page of the spectral sequence on `Z_1` (which
/// degenerates there): the entry at `(a, b)` contributes to degree `a + b`.
pub fn nearby_cycles_stalks(n: usize, epsilon: Option<i8>, p: u64) -> Result<Stalks> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    check_epsilon(n, epsilon)?;
    let mut stalks = Stalks::new();
    if n == 2 {
        // Semistable case: Λ in degree 0, the twisted class in degree 1.
        let e = epsilon.unwrap();
        stalks.insert(0, vec![FrobWeight::new(1, 0)]);
        stalks.insert(1, vec![FrobWeight::new(e, 0).twisted()]);
        return Ok(stalks);
    }
    let e1 = build_e1_z1(n, epsilon, p)?;
    let e2 = compute_e2_z1(&e1)?;
    for (&(a, b), weights) in &e2.entries {
        if !weights.is_empty() {
            stalks
                .entry((a + b) as i64)
                .or_default()
                .extend(weights.iter().copied());
        }
    }
    Ok(stalks)
}

/// Alternating trace of `Frob^k` on the stalks.
pub fn stalk_trace(stalks: &Stalks, p: u64, k: u32) -> i128 {
    stalks
        .iter()
        .map(|(&d, ws)| {
            let s: i128 = ws.iter().map(|w| w.eigenvalue_pow(p, k)).sum();
            if d.rem_euclid(2) == 0 {
                s
            } else {
                -s
            }
        })
        .sum()
}

/// Alternating semisimple trace of Frobenius at the singular point.
pub fn kramer_ss_trace(n: usize, epsilon: Option<i8>, p: u64) -> Result<i128> {
    Ok(stalk_trace(&nearby_cycles_stalks(n, epsilon, p)?, p, 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LefschetzReport {
    pub n: usize,
    pub p: u64,
    pub k: u32,
    pub epsilon: Option<i8>,
    pub points: usize,
    pub singular_points: usize,
    pub singular_trace: i128,
    /// `Σ_x Tr(Frob^k | (RΨ)_x)` over the enumerated special fiber.
    pub stalk_trace_sum: i128,
    /// `Σ_{i=0}^{n-1} p^{ik}`.
    pub projective_count: i128,
    pub equal: bool,
}

/// Sums stalk traces over the special fiber over `F_{p^k}` and compares with
/// `#P^{n-1}(F_{p^k})`. A mismatch is reported, not raised.
pub fn lefschetz_consistency(datum: &HermitianDatum, k: u32) -> Result<LefschetzReport> {
    let p = datum.p();
    let n = datum.n();
    let field = make_field(p, k as i64)?;
    let ambient = SpecialFiberAmbient::build(datum, &field)?;
    let points = enumerate_special_fiber(&ambient)?;
    let singular = find_singular_locus(&points, &ambient);
    let epsilon = epsilon_of(datum);
    let stalks = nearby_cycles_stalks(n, epsilon, p)?;
    let singular_trace = stalk_trace(&stalks, p, k);
    let smooth = (points.len() - singular.len()) as i128;
    let stalk_trace_sum = smooth + singular.len() as i128 * singular_trace;
    let q = (p as i128).pow(k);
    let projective_count = (0..n as u32).map(|i| q.pow(i)).sum();
    Ok(LefschetzReport {
        n,
        p,
        k,
        epsilon,
        points: points.len(),
        singular_points: singular.len(),
        singular_trace,
        stalk_trace_sum,
        projective_count,
        equal: stalk_trace_sum == projective_count,
    })
}

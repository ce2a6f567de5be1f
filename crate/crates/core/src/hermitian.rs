//! Diagonal hermitian data `(V, (·,·), L)` over the ramified quadratic
//! extension `E/Q_p`, recorded by the residues of their unit diagonal entries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{self, is_norm_unit, FieldDesc};
use crate::quadric::{classify_diagonal_form, DiagonalQuadraticForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HermitianEntry {
    /// A `Z_p`-unit, given by an integer representative.
    Unit(i64),
    /// `scale · δ` for the distinguished non-norm unit `δ`.
    NonNorm { scale: i64, delta: i64 },
}

impl HermitianEntry {
    pub fn value(&self) -> i64 {
        match *self {
            HermitianEntry::Unit(a) => a,
            HermitianEntry::NonNorm { scale, delta } => scale * delta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HermitianClass {
    Split,
    Nonsplit,
}

impl HermitianClass {
    pub fn as_str(self) -> &'static str {
        match self {
            HermitianClass::Split => "split",
            HermitianClass::Nonsplit => "nonsplit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HermitianDatum {
    p: u64,
    entries: Vec<HermitianEntry>,
}

impl HermitianDatum {
    pub fn new(p: u64, entries: Vec<HermitianEntry>) -> Result<Self> {
        // Validates p as an odd prime.
        ffield::least_nonresidue(p)?;
        if entries.len() < 2 {
            return Err(Error::InvalidDatum(format!(
                "rank must be at least 2, got {}",
                entries.len()
            )));
        }
        let mut deltas = 0;
        for e in &entries {
            if is_norm_unit(e.value(), p).is_err() {
                return Err(Error::InvalidDatum(format!(
                    "entry {} is not a unit mod {p}",
                    e.value()
                )));
            }
            if let HermitianEntry::NonNorm { scale, delta } = *e {
                deltas += 1;
                if is_norm_unit(scale, p).is_err() || is_norm_unit(delta, p)? {
                    return Err(Error::InvalidDatum(format!(
                        "{delta} is a norm mod {p} (or {scale} is not a unit)"
                    )));
                }
            }
        }
        if deltas > 1 {
            return Err(Error::InvalidDatum(
                "at most one entry may carry the non-norm unit".into(),
            ));
        }
        Ok(Self { p, entries })
    }

    pub fn from_units(p: u64, diag: &[i64]) -> Result<Self> {
        Self::new(p, diag.iter().map(|&a| HermitianEntry::Unit(a)).collect())
    }

    /// `Diag(1,…,1,-1,…,-1)` with `ceil(n/2)` ones.
    pub fn split(p: u64, n: usize) -> Result<Self> {
        let half = n.div_ceil(2);
        Self::from_units(
            p,
            &(0..n)
                .map(|i| if i < half { 1 } else { -1 })
                .collect::<Vec<_>>(),
        )
    }

    /// The split shape with its last entry replaced by `-δ`, `δ` the least
    /// positive non-residue mod `p`.
    pub fn nonsplit(p: u64, n: usize) -> Result<Self> {
        let delta = ffield::least_nonresidue(p)?;
        let half = n.div_ceil(2);
        let mut entries: Vec<HermitianEntry> = (0..n)
            .map(|i| HermitianEntry::Unit(if i < half { 1 } else { -1 }))
            .collect();
        if let Some(last) = entries.last_mut() {
            let scale = last.value();
            *last = HermitianEntry::NonNorm { scale, delta };
        }
        Self::new(p, entries)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[HermitianEntry] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<i64> {
        self.entries.iter().map(HermitianEntry::value).collect()
    }

    /// `(-1)^{n(n-1)/2} det(V)` reduced mod `p`, as a representative in `1..p`.
    pub fn discriminant_residue(&self) -> i64 {
        let p = self.p as i64;
        let n = self.n();
        let det = self
            .entries
            .iter()
            .fold(1i64, |acc, e| (acc * e.value().rem_euclid(p)) % p);
        let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
            1
        } else {
            p - 1
        };
        det * sign % p
    }
}

pub fn classify_hermitian(datum: &HermitianDatum) -> HermitianClass {
    match is_norm_unit(datum.discriminant_residue(), datum.p) {
        Ok(true) => HermitianClass::Split,
        Ok(false) => HermitianClass::Nonsplit,
        Err(e) => unreachable!("validated datum has unit discriminant: {e}"),
    }
}

/// Frobenius sign on the nearby cycles: `None` for odd `n`, `+1` for
/// `n = 2`, and the hermitian class for even `n >= 4`.
pub fn epsilon_of(datum: &HermitianDatum) -> Option<i8> {
    let n = datum.n();
    if n % 2 == 1 {
        None
    } else if n == 2 {
        Some(1)
    } else {
        Some(match classify_hermitian(datum) {
            HermitianClass::Split => 1,
            HermitianClass::Nonsplit => -1,
        })
    }
}

/// Sign of the residual quadric's middle cohomology: the hermitian class for
/// every even `n` (including `n = 2`), `None` for odd `n`.
pub fn quadric_epsilon(datum: &HermitianDatum) -> Option<i8> {
    datum
        .n()
        .is_multiple_of(2)
        .then(|| match classify_hermitian(datum) {
            HermitianClass::Split => 1,
            HermitianClass::Nonsplit => -1,
        })
}

/// The quadric `Σ c_i x_i^2` over `F_p` cut out by the symmetric pairing on
/// `(π⊗1)L ⊗ F_p`, where `c_i` are the diagonal residues.
pub fn residual_quadric(datum: &HermitianDatum) -> Result<DiagonalQuadraticForm> {
    let field = ffield::make_field(datum.p, 1)?;
    residual_quadric_over(datum, &field)
}

/// [`residual_quadric`] with coefficients viewed in an extension of `F_p`.
pub fn residual_quadric_over(
    datum: &HermitianDatum,
    field: &FieldDesc,
) -> Result<DiagonalQuadraticForm> {
    if field.p() != datum.p {
        return Err(Error::FieldMismatch(format!(
            "datum at p = {} over {:?}",
            datum.p, field
        )));
    }
    let form = DiagonalQuadraticForm::from_ints(field, &datum.diagonal())?;
    if field.k() == 1 {
        let quadric = classify_diagonal_form(&form).split;
        let hermitian = quadric_epsilon(datum).map(|e| e == 1);
        if quadric != hermitian {
            let name = |s: Option<bool>| match s {
                Some(true) => "split",
                Some(false) => "nonsplit",
                None => "odd",
            };
            return Err(Error::ClassificationMismatch {
                hermitian: name(hermitian),
                quadric: name(quadric),
            });
        }
    }
    Ok(form)
}

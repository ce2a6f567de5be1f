//! Special fibers of the local model `M^ψ` and of its blow-up `M^{ψ,K}` at
//! the singular point, enumerated as explicit sets of subspaces of
//! `L ⊗ F_q ≅ F_q^{2n}`.
//!
//! Over the residue field both `π ⊗ 1` and its conjugate act through the
//! nilpotent operator `J`, the determinant condition is automatic, and the
//! wedge condition reduces to `rank(J|F) <= 1`. A point of the special fiber
//! is therefore an `n`-dimensional subspace `F` with `ψ(F, F) = 0`,
//! `J F ⊆ F` and `rank(J|F) <= 1`; a point of the blow-up adds a line `F_0`
//! with `J F ⊆ F_0 ⊆ F` and `J F_0 = 0`.

mod enumerate;
pub mod matrix;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ffield::{FieldDesc, FieldElem};
use crate::hermitian::HermitianDatum;
use matrix::{in_span, rref, Matrix, Vector};

pub use enumerate::{
    candidate_count, fiber_enumerators, Exhaustive, FiberEnumerator, PivotPruned, CANDIDATE_LIMIT,
};

/// A subspace of `F_q^{2n}` in reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubspaceBasis {
    rows: Vec<Vector>,
}

impl SubspaceBasis {
    /// Canonical basis of the span of `vectors`.
    pub fn span(field: &FieldDesc, vectors: Vec<Vector>) -> Self {
        Self {
            rows: rref(field, vectors).0,
        }
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| r.iter().position(|e| !e.is_zero()).unwrap())
            .collect()
    }

    pub fn contains(&self, field: &FieldDesc, v: &[FieldElem]) -> bool {
        in_span(field, &self.rows, &self.pivots(), v)
    }

    /// Row matrix as element indices (for JSON fixtures).
    pub fn to_indices(&self) -> Vec<Vec<u32>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.index()).collect())
            .collect()
    }

    /// All one-dimensional subspaces, each in canonical form.
    pub fn lines(&self, field: &FieldDesc) -> Vec<SubspaceBasis> {
        let d = self.dim();
        let q = field.order() as usize;
        let mut out = Vec::new();
        // Normalized coefficient vectors: leading nonzero coefficient is 1.
        for lead in 0..d {
            let tail = d - lead - 1;
            let count = q.pow(tail as u32);
            for code in 0..count {
                let mut coeffs = vec![field.zero(); d];
                coeffs[lead] = field.one();
                let mut c = code;
                for slot in coeffs[lead + 1..].iter_mut() {
                    *slot = field.from_index((c % q) as u32);
                    c /= q;
                }
                let v = combine(field, &self.rows, &coeffs);
                out.push(SubspaceBasis::span(field, vec![v]));
            }
        }
        out
    }
}

impl fmt::Debug for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_indices()).finish()
    }
}

impl Serialize for SubspaceBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_indices().serialize(s)
    }
}

fn combine(field: &FieldDesc, rows: &[Vector], coeffs: &[FieldElem]) -> Vector {
    let len = rows.first().map_or(0, Vec::len);
    let mut v = vec![field.zero(); len];
    for (row, &c) in rows.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (e, &r) in v.iter_mut().zip(row) {
            *e = field.add(*e, field.mul(c, r));
        }
    }
    v
}

/// `L ⊗ F_q` with the nilpotent operator `J` (action of `π ⊗ 1`) and the
/// reduced alternating form `ψ`.
#[derive(Clone, Debug)]
pub struct SpecialFiberAmbient {
    field: FieldDesc,
    n: usize,
    j: Matrix,
    psi: Matrix,
    /// `ker J = im J` in canonical form.
    kernel: SubspaceBasis,
}

impl SpecialFiberAmbient {
    /// Standard realization in the basis `(e_1,…,e_n, πe_1,…,πe_n)`:
    /// `J e_i = πe_i`, `ψ(πe_i, e_j) = 2 c_i δ_ij`, all other pairings zero.
    pub fn build(datum: &HermitianDatum, field: &FieldDesc) -> Result<Self> {
        if field.p() != datum.p() {
            return Err(Error::FieldMismatch(format!(
                "datum at p = {} over {:?}",
                datum.p(),
                field
            )));
        }
        let n = datum.n();
        let mut j = Matrix::zeros(2 * n, 2 * n);
        let mut psi = Matrix::zeros(2 * n, 2 * n);
        for (i, c) in datum.diagonal().into_iter().enumerate() {
            j.set(n + i, i, field.one());
            let two_c = field.from_int(2 * c);
            psi.set(n + i, i, two_c);
            psi.set(i, n + i, field.neg(two_c));
        }
        Self::from_matrices(field, n, j, psi)
    }

    /// Wraps explicit matrices, checking every ambient invariant.
    pub fn from_matrices(field: &FieldDesc, n: usize, j: Matrix, psi: Matrix) -> Result<Self> {
        let dim = 2 * n;
        let fail = |msg: &str| Err(Error::InvariantViolation(msg.to_string()));
        if (j.rows(), j.cols(), psi.rows(), psi.cols()) != (dim, dim, dim, dim) {
            return fail("matrix shape");
        }
        if !j.mul(field, &j).is_zero() {
            return fail("J^2 != 0");
        }
        if j.rank(field) != n {
            return fail("rank J != n");
        }
        if (0..dim).any(|i| !psi.get(i, i).is_zero()) || psi.transpose() != psi.neg(field) {
            return fail("psi is not alternating");
        }
        if psi.rank(field) != dim {
            return fail("psi is degenerate");
        }
        // ψ(Jx, y) + ψ(x, Jy) = 0  ⇔  J^T Ψ + Ψ J = 0.
        let jt_psi = j.transpose().mul(field, &psi);
        if !jt_psi.add(field, &psi.mul(field, &j)).is_zero() {
            return fail("J is not skew-adjoint for psi");
        }
        // {Jx, Jy} = ψ(Jx, y) has Gram matrix J^T Ψ; it descends to im J.
        if jt_psi.transpose() != jt_psi {
            return fail("induced pairing on im J is not symmetric");
        }
        if jt_psi.rank(field) != n {
            return fail("induced pairing on im J is degenerate");
        }
        let kernel = SubspaceBasis::span(field, j.nullspace(field));
        Ok(Self {
            field: field.clone(),
            n,
            j,
            psi,
            kernel,
        })
    }

    /// Transport of structure along `x ↦ g x`.
    pub fn conjugate(&self, g: &Matrix) -> Result<Self> {
        let f = &self.field;
        let g_inv = g
            .inverse(f)
            .ok_or_else(|| Error::InvalidParameter("conjugating matrix is singular".into()))?;
        let j = g.mul(f, &self.j).mul(f, &g_inv);
        let psi = g_inv.transpose().mul(f, &self.psi).mul(f, &g_inv);
        Self::from_matrices(f, self.n, j, psi)
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> &Matrix {
        &self.j
    }

    pub fn psi(&self) -> &Matrix {
        &self.psi
    }

    /// `im J = ker J`, the singular point `(π⊗1)L ⊗ F_q`.
    pub fn image_of_j(&self) -> &SubspaceBasis {
        &self.kernel
    }

    pub fn psi_pair(&self, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        self.psi.bilinear(&self.field, x, y)
    }

    /// `{u, w} := ψ(u, y)` for `u, w ∈ im J` and any `y` with `J y = w`.
    pub fn symmetric_pairing(&self, u: &[FieldElem], w: &[FieldElem]) -> Option<FieldElem> {
        let y = self.j.solve(&self.field, w)?;
        Some(self.psi_pair(u, &y))
    }

    pub fn apply_j(&self, x: &[FieldElem]) -> Vector {
        self.j.apply(&self.field, x)
    }

    /// `rank(J|F)`.
    pub fn j_rank_on(&self, f: &SubspaceBasis) -> usize {
        let images: Vec<Vector> = f.rows.iter().map(|r| self.apply_j(r)).collect();
        rref(&self.field, images).0.len()
    }

    pub fn is_isotropic(&self, f: &SubspaceBasis) -> bool {
        let rows = &f.rows;
        (0..rows.len())
            .all(|a| (a + 1..rows.len()).all(|b| self.psi_pair(&rows[a], &rows[b]).is_zero()))
    }

    pub fn is_j_stable(&self, f: &SubspaceBasis) -> bool {
        f.rows
            .iter()
            .all(|r| f.contains(&self.field, &self.apply_j(r)))
    }

    /// Every defining condition of a special-fiber point, checked directly.
    pub fn is_special_fiber_point(&self, f: &SubspaceBasis) -> bool {
        f.dim() == self.n
            && f.rows.iter().all(|r| r.len() == 2 * self.n)
            && self.is_isotropic(f)
            && self.is_j_stable(f)
            && self.j_rank_on(f) <= 1
    }

    /// Every defining condition of a blow-up point, checked directly.
    pub fn is_blowup_point(&self, f: &SubspaceBasis, f0: &SubspaceBasis) -> bool {
        let field = &self.field;
        self.is_special_fiber_point(f)
            && f0.dim() == 1
            && f0.rows.iter().all(|r| f.contains(field, r))
            && f.rows.iter().all(|r| f0.contains(field, &self.apply_j(r)))
            && f0
                .rows
                .iter()
                .all(|r| self.apply_j(r).iter().all(|e| e.is_zero()))
    }

    /// Whether the line `F_0 ⊆ im J` is isotropic for `{·,·}`.
    pub fn is_pairing_isotropic_line(&self, f0: &SubspaceBasis) -> bool {
        let v = &f0.rows[0];
        self.symmetric_pairing(v, v).is_some_and(|e| e.is_zero())
    }
}

/// Points of the special fiber with `rank(J|F) = 0`.
pub fn find_singular_locus(
    points: &[SubspaceBasis],
    ambient: &SpecialFiberAmbient,
) -> Vec<SubspaceBasis> {
    points
        .iter()
        .filter(|f| ambient.j_rank_on(f) == 0)
        .cloned()
        .collect()
}

pub fn enumerate_special_fiber(ambient: &SpecialFiberAmbient) -> Result<Vec<SubspaceBasis>> {
    PivotPruned.enumerate(ambient)
}

/// Pairs `(F, F_0)` over every point of the special fiber.
pub fn enumerate_blowup(
    ambient: &SpecialFiberAmbient,
) -> Result<Vec<(SubspaceBasis, SubspaceBasis)>> {
    let points = enumerate_special_fiber(ambient)?;
    Ok(blowup_over(ambient, &points))
}

/// Blow-up pairs lying over the given special-fiber points, re-verified.
pub fn blowup_over(
    ambient: &SpecialFiberAmbient,
    points: &[SubspaceBasis],
) -> Vec<(SubspaceBasis, SubspaceBasis)> {
    let field = &ambient.field;
    let mut pairs = Vec::new();
    for f in points {
        let images: Vec<Vector> = f.rows.iter().map(|r| ambient.apply_j(r)).collect();
        for line in f.lines(field) {
            let v = &line.rows[0];
            let kills = ambient.apply_j(v).iter().all(|e| e.is_zero());
            if kills && images.iter().all(|w| line.contains(field, w)) {
                pairs.push((f.clone(), line));
            }
        }
    }
    pairs.sort();
    debug_assert!(pairs.iter().all(|(f, l)| ambient.is_blowup_point(f, l)));
    pairs
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Strata {
    pub z1_count: u64,
    pub z2_count: u64,
    pub q_count: u64,
    pub off_strata_count: u64,
}

pub fn stratify_blowup(
    pairs: &[(SubspaceBasis, SubspaceBasis)],
    ambient: &SpecialFiberAmbient,
) -> Strata {
    let sg = ambient.image_of_j();
    let mut s = Strata::default();
    for (f, f0) in pairs {
        let over_sg = f == sg;
        let iso = ambient.is_pairing_isotropic_line(f0);
        s.z1_count += over_sg as u64;
        s.z2_count += iso as u64;
        s.q_count += (over_sg && iso) as u64;
        s.off_strata_count += (!over_sg && !iso) as u64;
    }
    s
}

/// Everything the special-fiber checks need for one `(datum, F_q)`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalModelSummary {
    pub p: u64,
    pub k: u32,
    pub n: usize,
    pub enumerator: String,
    pub points: usize,
    pub singular_points: usize,
    pub singular_is_image_of_j: bool,
    pub blowup_pairs: usize,
    pub strata: Strata,
    pub all_points_verified: bool,
    pub all_pairs_verified: bool,
}

impl LocalModelSummary {
    pub fn q(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// `(q^n - 1) / (q - 1)`.
    pub fn projective_space_count(&self) -> u64 {
        let q = self.q();
        (q.pow(self.n as u32) - 1) / (q - 1)
    }

    pub fn blowdown_holds(&self) -> bool {
        self.points as u64 + self.projective_space_count() == self.blowup_pairs as u64 + 1
    }

    pub fn inclusion_exclusion_holds(&self) -> bool {
        let s = self.strata;
        self.blowup_pairs as u64 + s.q_count == s.z1_count + s.z2_count && s.off_strata_count == 0
    }

    pub fn bundle_holds(&self) -> bool {
        self.strata.z2_count == (self.q() + 1) * self.strata.q_count
    }
}

/// Enumerates both special fibers with the chosen enumerator and collects
/// counts and identity checks.
pub fn summarize(
    datum: &HermitianDatum,
    field: &FieldDesc,
    enumerator: &dyn FiberEnumerator,
) -> Result<LocalModelSummary> {
    let ambient = SpecialFiberAmbient::build(datum, field)?;
    let points = enumerator.enumerate(&ambient)?;
    let singular = find_singular_locus(&points, &ambient);
    let pairs = blowup_over(&ambient, &points);
    let strata = stratify_blowup(&pairs, &ambient);
    Ok(LocalModelSummary {
        p: field.p(),
        k: field.k(),
        n: ambient.n,
        enumerator: enumerator.name().to_string(),
        points: points.len(),
        singular_points: singular.len(),
        singular_is_image_of_j: singular.len() == 1 && &singular[0] == ambient.image_of_j(),
        blowup_pairs: pairs.len(),
        strata,
        all_points_verified: points.iter().all(|f| ambient.is_special_fiber_point(f)),
        all_pairs_verified: pairs.iter().all(|(f, l)| ambient.is_blowup_point(f, l)),
    })
}

/// Scale envelope for special-fiber enumeration: `k <= 2`, and `n <= 4`
/// at `p = 3`, `n <= 3` at `p ∈ {5, 7}`, `n <= 2` beyond.
pub fn check_scale(p: u64, n: usize, k: u32) -> Result<()> {
    let max_n = match p {
        3 => 4,
        5 | 7 => 3,
        _ => 2,
    };
    if k > 2 {
        return Err(Error::TooLarge {
            what: "special-fiber extension degree",
            size: k as u128,
            limit: 2,
        });
    }
    if n > max_n {
        return Err(Error::TooLarge {
            what: "special-fiber rank",
            size: n as u128,
            limit: max_n as u128,
        });
    }
    Ok(())
}

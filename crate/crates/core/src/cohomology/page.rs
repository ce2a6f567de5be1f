//! Monodromy spectral sequence pages. Column `a ∈ {-1, 0, 1}`, row `b`;
//! the row-`b` complex is `(-1,b) --φ--> (0,b) --ψ--> (1,b)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::dyadic::dyadic_rank;
use super::{
    cohomology_p1_bundle, cohomology_projective_space, cohomology_quadric, BasisClass, FrobWeight,
    Symbol, WeightedModule,
};
use crate::error::{Error, Result};

/// `m[i][j]`: coefficient of target basis vector `i` in the image of source
/// basis vector `j`.
pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageEntry {
    pub a: i32,
    pub b: i32,
    pub label: String,
    pub classes: Vec<BasisClass>,
}

impl PageEntry {
    pub fn rank(&self) -> usize {
        self.classes.len()
    }

    pub fn weights(&self) -> Vec<FrobWeight> {
        self.classes.iter().map(|c| c.weight).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPage {
    pub name: String,
    pub n: usize,
    pub epsilon: Option<i8>,
    pub p: u64,
    pub entries: BTreeMap<(i32, i32), PageEntry>,
    /// `φ` out of `(-1, b)`, keyed by `b`. Empty for rendering-only pages.
    pub phi: BTreeMap<i32, IntMatrix>,
    /// `ψ` out of `(0, b)`, keyed by `b`.
    pub psi: BTreeMap<i32, IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub a: i32,
    pub b: i32,
    pub rank: usize,
    pub weights: Vec<FrobWeight>,
}

fn table_rows<'a>(
    cells: impl Iterator<Item = ((i32, i32), Vec<FrobWeight>)> + 'a,
) -> Vec<TableRow> {
    cells
        .map(|((a, b), weights)| TableRow {
            a,
            b,
            rank: weights.len(),
            weights,
        })
        .collect()
}

fn weight_label(w: FrobWeight) -> String {
    let s = if w.sign < 0 { '-' } else { '+' };
    match w.exponent {
        0 => format!("{s}1"),
        1 => format!("{s}p"),
        e => format!("{s}p^{e}"),
    }
}

fn render_grid(title: &str, cells: &BTreeMap<(i32, i32), Vec<FrobWeight>>) -> String {
    let max_b = cells.keys().map(|&(_, b)| b).max().unwrap_or(0);
    let cell = |a: i32, b: i32| -> String {
        match cells.get(&(a, b)) {
            Some(ws) if !ws.is_empty() => {
                let parts: Vec<String> = ws.iter().map(|&w| weight_label(w)).collect();
                format!("{}[{}]", ws.len(), parts.join(","))
            }
            _ => ".".to_string(),
        }
    };
    let mut grid: Vec<[String; 3]> = Vec::new();
    for b in (0..=max_b).rev() {
        grid.push([cell(-1, b), cell(0, b), cell(1, b)]);
    }
    let width = grid
        .iter()
        .flat_map(|r| r.iter().map(String::len))
        .chain(["a=-1".len()])
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    for (row, b) in grid.iter().zip((0..=max_b).rev()) {
        let _ = writeln!(
            out,
            "b={b:<3}| {:>w$} | {:>w$} | {:>w$}",
            row[0],
            row[1],
            row[2],
            w = width
        );
    }
    let _ = writeln!(
        out,
        "      {:>w$}   {:>w$}   {:>w$}",
        "a=-1",
        "a=0",
        "a=1",
        w = width
    );
    out
}

impl SpectralPage {
    pub fn entry(&self, a: i32, b: i32) -> Option<&PageEntry> {
        self.entries.get(&(a, b))
    }

    pub fn rank(&self, a: i32, b: i32) -> usize {
        self.entry(a, b).map_or(0, PageEntry::rank)
    }

    pub fn max_b(&self) -> i32 {
        self.entries.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    fn cells(&self) -> BTreeMap<(i32, i32), Vec<FrobWeight>> {
        self.entries
            .iter()
            .map(|(&k, e)| (k, e.weights()))
            .collect()
    }

    /// Rows `{a, b, rank, weights}` for every nonzero entry.
    pub fn table(&self) -> Vec<TableRow> {
        table_rows(self.cells().into_iter().filter(|(_, w)| !w.is_empty()))
    }

    pub fn render_text(&self) -> String {
        render_grid(&self.name, &self.cells())
    }
}

fn entry(a: i32, b: i32, label: String, classes: Vec<BasisClass>) -> PageEntry {
    PageEntry {
        a,
        b,
        label,
        classes,
    }
}

fn twisted(classes: &[BasisClass]) -> Vec<BasisClass> {
    classes
        .iter()
        .map(|c| BasisClass {
            symbol: c.symbol.clone(),
            weight: c.weight.twisted(),
        })
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "spectral pages need n >= 3, got {n}"
        )));
    }
    Ok(())
}

fn three_columns(
    name: &str,
    n: usize,
    epsilon: Option<i8>,
    p: u64,
    quadric: &WeightedModule,
    middle: &[(&str, &WeightedModule)],
) -> SpectralPage {
    let mut entries = BTreeMap::new();
    let top = 2 * (n as i32 - 1);
    for b in 0..=top {
        let left = twisted(quadric.classes(b as i64 - 2));
        entries.insert((-1, b), entry(-1, b, format!("H^{}(Q)(-1)", b - 2), left));
        let mut mid = Vec::new();
        let mut names = Vec::new();
        for (label, module) in middle {
            mid.extend(module.classes(b as i64).iter().cloned());
            names.push(format!("H^{b}({label})"));
        }
        entries.insert((0, b), entry(0, b, names.join(" + "), mid));
        entries.insert(
            (1, b),
            entry(
                1,
                b,
                format!("H^{b}(Q)"),
                quadric.classes(b as i64).to_vec(),
            ),
        );
    }
    SpectralPage {
        name: name.to_string(),
        n,
        epsilon,
        p,
        entries,
        phi: BTreeMap::new(),
        psi: BTreeMap::new(),
    }
}

/// First page of the full sequence on the blown-up special fiber. Entries
/// only; its differentials are not modelled.
pub fn build_e1_k(n: usize, epsilon: Option<i8>, p: u64) -> Result<SpectralPage> {
    check_n(n)?;
    let q = cohomology_quadric(n, epsilon, p)?;
    let z1 = cohomology_projective_space(n as u32 - 1, p);
    let z2 = cohomology_p1_bundle(&q);
    Ok(three_columns(
        "E1 (K)",
        n,
        epsilon,
        p,
        &q,
        &[("Z_1", &z1), ("Z_2", &z2)],
    ))
}

/// `ι_{1*}` on a quadric class: `ι_1^*h^k ↦ 2h^{k+1}`, `prim ↦ 0`.
fn gysin(symbol: &Symbol) -> Option<(Symbol, i64)> {
    match symbol {
        Symbol::Restricted(k) => Some((Symbol::Hyper(k + 1), 2)),
        _ => None,
    }
}

/// `ι_1^*` on a projective-space class.
fn restrict(symbol: &Symbol) -> Option<Symbol> {
    match symbol {
        Symbol::Hyper(k) => Some(Symbol::Restricted(*k)),
        _ => None,
    }
}

fn position(classes: &[BasisClass], symbol: &Symbol) -> Option<usize> {
    classes.iter().position(|c| &c.symbol == symbol)
}

/// First page of the sequence restricted to `Z_1`, with `φ` and `ψ` as
/// integer matrices in the bases `{h^k}` and `{ι_1^*h^k, prim}`.
///
/// `φ(x) = (-ι_{1*}x, ι_2^*ι_{2*}x)` with `ι_2^*ι_{2*} = -ι_1^*ι_{1*}`, and
/// `ψ(x, y) = -ι_1^*x + y`.
pub fn build_e1_z1(n: usize, epsilon: Option<i8>, p: u64) -> Result<SpectralPage> {
    check_n(n)?;
    let q = cohomology_quadric(n, epsilon, p)?;
    let z1 = cohomology_projective_space(n as u32 - 1, p);
    let mut page = three_columns("E1 (Z_1)", n, epsilon, p, &q, &[("Z_1", &z1), ("Q", &q)]);
    for b in 0..=page.max_b() {
        let left = &page.entries[&(-1, b)].classes;
        let mid = &page.entries[&(0, b)].classes;
        let right = &page.entries[&(1, b)].classes;
        let z1_len = z1.rank(b as i64);
        let (mid_z1, mid_q) = mid.split_at(z1_len);

        let mut phi = vec![vec![0i64; left.len()]; mid.len()];
        for (j, x) in left.iter().enumerate() {
            if let Some((target, coeff)) = gysin(&x.symbol) {
                if let Some(i) = position(mid_z1, &target) {
                    phi[i][j] -= coeff;
                }
                // -ι_1^*ι_{1*}x
                if let Some(r) = restrict(&target) {
                    if let Some(i) = position(mid_q, &r) {
                        phi[z1_len + i][j] -= coeff;
                    }
                }
            }
        }

        let mut psi = vec![vec![0i64; mid.len()]; right.len()];
        for (j, x) in mid_z1.iter().enumerate() {
            if let Some(r) = restrict(&x.symbol) {
                if let Some(i) = position(right, &r) {
                    psi[i][j] -= 1;
                }
            }
        }
        for (j, y) in mid_q.iter().enumerate() {
            if let Some(i) = position(right, &y.symbol) {
                psi[i][z1_len + j] += 1;
            }
        }
        page.phi.insert(b, phi);
        page.psi.insert(b, psi);
    }
    Ok(page)
}

/// Rank data of one row complex `L --φ--> M --ψ--> R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowRanks {
    pub b: i32,
    pub left: usize,
    pub middle: usize,
    pub right: usize,
    pub phi_rank: usize,
    pub psi_rank: usize,
    pub unimodular: bool,
}

impl RowRanks {
    pub fn phi_injective(&self) -> bool {
        self.phi_rank == self.left
    }

    pub fn psi_surjective(&self) -> bool {
        self.psi_rank == self.right
    }

    /// `rank ker ψ = rank im φ`.
    pub fn exact_in_middle(&self) -> bool {
        self.middle - self.psi_rank == self.phi_rank
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E2Page {
    pub n: usize,
    pub epsilon: Option<i8>,
    pub p: u64,
    /// Surviving weights per position; positions with nothing left are absent.
    pub entries: BTreeMap<(i32, i32), Vec<FrobWeight>>,
    pub rows: Vec<RowRanks>,
    /// Alternating rank sum of each `E_1` row agrees with that of `E_2`.
    pub euler_characteristics_agree: bool,
}

impl E2Page {
    pub fn table(&self) -> Vec<TableRow> {
        table_rows(self.entries.iter().map(|(&k, w)| (k, w.clone())))
    }

    pub fn render_text(&self) -> String {
        render_grid("E2 (Z_1)", &self.entries)
    }

    pub fn row(&self, b: i32) -> Option<&RowRanks> {
        self.rows.iter().find(|r| r.b == b)
    }
}

fn submatrix(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j]).collect())
        .collect()
}

fn group_by_weight(classes: &[BasisClass]) -> BTreeMap<(i8, u32), Vec<usize>> {
    let mut g: BTreeMap<(i8, u32), Vec<usize>> = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        g.entry(c.weight.key()).or_default().push(i);
    }
    g
}

fn check_equivariant(
    m: &IntMatrix,
    target: &[BasisClass],
    source: &[BasisClass],
    what: &str,
) -> Result<()> {
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 && target[i].weight.key() != source[j].weight.key() {
                return Err(Error::PageMismatch(format!(
                    "{what} mixes weights {:?} -> {:?}",
                    source[j].weight, target[i].weight
                )));
            }
        }
    }
    Ok(())
}

/// `E_2` by exact rank computation, one Frobenius eigenspace at a time.
/// Checks only structural consistency (equivariance, `ψ∘φ = 0`,
/// invertibility of pivots away from 2), not the expected answer.
pub fn compute_e2_z1_unchecked(page: &SpectralPage) -> Result<E2Page> {
    let mut entries: BTreeMap<(i32, i32), Vec<FrobWeight>> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut euler_ok = true;
    for b in 0..=page.max_b() {
        let left = page.entry(-1, b).map_or(&[][..], |e| &e.classes[..]);
        let mid = page.entry(0, b).map_or(&[][..], |e| &e.classes[..]);
        let right = page.entry(1, b).map_or(&[][..], |e| &e.classes[..]);
        let phi = page.phi.get(&b).ok_or_else(|| {
            Error::PageMismatch(format!("page has no differential phi in row {b}"))
        })?;
        let psi = page.psi.get(&b).ok_or_else(|| {
            Error::PageMismatch(format!("page has no differential psi in row {b}"))
        })?;
        check_equivariant(phi, mid, left, "phi")?;
        check_equivariant(psi, right, mid, "psi")?;
        for (i, prow) in psi.iter().enumerate() {
            for j in 0..left.len() {
                let v: i64 = prow.iter().zip(phi.iter()).map(|(&a, r)| a * r[j]).sum();
                if v != 0 {
                    return Err(Error::PageMismatch(format!(
                        "psi . phi != 0 in row {b} at ({i}, {j})"
                    )));
                }
            }
        }

        let gl = group_by_weight(left);
        let gm = group_by_weight(mid);
        let gr = group_by_weight(right);
        let mut keys: Vec<(i8, u32)> = gl
            .keys()
            .chain(gm.keys())
            .chain(gr.keys())
            .copied()
            .collect();
        keys.sort();
        keys.dedup();
        let empty = Vec::new();
        let (mut phi_rank, mut psi_rank, mut unimodular) = (0, 0, true);
        for key in keys {
            let il = gl.get(&key).unwrap_or(&empty);
            let im = gm.get(&key).unwrap_or(&empty);
            let ir = gr.get(&key).unwrap_or(&empty);
            let rp = dyadic_rank(&submatrix(phi, im, il));
            let rq = dyadic_rank(&submatrix(psi, ir, im));
            phi_rank += rp.rank;
            psi_rank += rq.rank;
            unimodular &= rp.unimodular && rq.unimodular;
            let rep = |idx: &[usize], classes: &[BasisClass]| classes[idx[0]].weight;
            let survivors = [
                (-1, il.len() - rp.rank, il, left),
                (0, im.len() - rp.rank - rq.rank, im, mid),
                (1, ir.len() - rq.rank, ir, right),
            ];
            for (a, count, idx, classes) in survivors {
                if count > 0 {
                    let w = rep(idx, classes);
                    entries
                        .entry((a, b))
                        .or_default()
                        .extend(std::iter::repeat_n(w, count));
                }
            }
        }
        let e2_alt = |a: i32| entries.get(&(a, b)).map_or(0, Vec::len) as i64;
        let e1_alt = left.len() as i64 - mid.len() as i64 + right.len() as i64;
        euler_ok &= e1_alt == e2_alt(-1) - e2_alt(0) + e2_alt(1);
        rows.push(RowRanks {
            b,
            left: left.len(),
            middle: mid.len(),
            right: right.len(),
            phi_rank,
            psi_rank,
            unimodular,
        });
    }
    Ok(E2Page {
        n: page.n,
        epsilon: page.epsilon,
        p: page.p,
        entries,
        rows,
        euler_characteristics_agree: euler_ok,
    })
}

/// Expected `E_2`: `Λ` at `(0,0)`, and for even `n` one class of weight
/// `ε p^{n/2}` at `(-1, n)`.
fn closed_form(n: usize, epsilon: Option<i8>) -> BTreeMap<(i32, i32), Vec<(i8, u32)>> {
    let mut m = BTreeMap::new();
    m.insert((0, 0), vec![(1, 0)]);
    if let Some(e) = epsilon {
        m.insert((-1, n as i32), vec![(e, n as u32 / 2)]);
    }
    m
}

/// [`compute_e2_z1_unchecked`] followed by the rank statements and the
/// closed-form comparison; any disagreement is a `PageMismatch`.
pub fn compute_e2_z1(page: &SpectralPage) -> Result<E2Page> {
    let e2 = compute_e2_z1_unchecked(page)?;
    let n = page.n as i32;
    for r in &e2.rows {
        if !r.unimodular {
            return Err(Error::PageMismatch(format!(
                "row {} needs a pivot that is not invertible once 2 is",
                r.b
            )));
        }
        if r.b % 2 == 0 && r.b != n && !r.phi_injective() {
            return Err(Error::PageMismatch(format!(
                "phi not injective in row {}",
                r.b
            )));
        }
        if r.b <= 2 * (n - 2) && !r.psi_surjective() {
            return Err(Error::PageMismatch(format!(
                "psi not surjective in row {}",
                r.b
            )));
        }
        if r.b != 0 && !r.exact_in_middle() {
            return Err(Error::PageMismatch(format!(
                "not exact in the middle of row {}",
                r.b
            )));
        }
    }
    if !e2.euler_characteristics_agree {
        return Err(Error::PageMismatch(
            "Euler characteristics differ between E1 and E2".into(),
        ));
    }
    let got: BTreeMap<(i32, i32), Vec<(i8, u32)>> = e2
        .entries
        .iter()
        .map(|(&k, ws)| (k, ws.iter().map(|w| w.key()).collect()))
        .collect();
    let want = closed_form(page.n, page.epsilon);
    if got != want {
        return Err(Error::PageMismatch(format!(
            "E2 for n = {} is {got:?}, expected {want:?}",
            page.n
        )));
    }
    Ok(e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_k_entries() {
        let page = build_e1_k(3, None, 3).unwrap();
        assert_eq!(page.rank(0, 0), 2);
        let top = page.entry(-1, 4).unwrap();
        assert_eq!(top.rank(), 1);
        assert_eq!(top.weights()[0].eigenvalue(3), 9);
        for n in 3..8 {
            let page = build_e1_k(n, if n % 2 == 0 { Some(1) } else { None }, 5).unwrap();
            let last = 2 * (n as i32 - 2);
            assert!(page.rank(1, last) > 0);
            assert!((last + 1..=page.max_b()).all(|b| page.rank(1, b) == 0));
            assert!(page.phi.is_empty());
        }
        assert!(build_e1_k(2, Some(1), 3).is_err());
    }

    #[test]
    fn e1_z1_phi_matrix() {
        let page = build_e1_z1(4, Some(1), 3).unwrap();
        let mid = &page.entry(0, 2).unwrap().classes;
        let phi = &page.phi[&2];
        assert_eq!(phi.len(), mid.len());
        let h1 = position(mid, &Symbol::Hyper(1)).unwrap();
        let r1 = position(mid, &Symbol::Restricted(1)).unwrap();
        let prim = position(mid, &Symbol::Prim).unwrap();
        assert_eq!((phi[h1][0], phi[r1][0], phi[prim][0]), (-2, -2, 0));
        // prim sits at (-1, 4) and is killed by φ.
        let left = &page.entry(-1, 4).unwrap().classes;
        let j = position(left, &Symbol::Prim).unwrap();
        assert!(page.phi[&4].iter().all(|r| r[j] == 0));
        // ψ restricts identically on the Q summand.
        let psi = &page.psi[&2];
        let right = &page.entry(1, 2).unwrap().classes;
        let i = position(right, &Symbol::Restricted(1)).unwrap();
        assert_eq!((psi[i][h1], psi[i][r1]), (-1, 1));
    }

    #[test]
    fn e2_examples() {
        let e2 = compute_e2_z1(&build_e1_z1(3, None, 3).unwrap()).unwrap();
        assert_eq!(e2.entries.len(), 1);
        assert_eq!(e2.entries[&(0, 0)], vec![FrobWeight::new(1, 0)]);
        let e2 = compute_e2_z1(&build_e1_z1(4, Some(1), 3).unwrap()).unwrap();
        assert_eq!(e2.entries[&(-1, 4)][0].eigenvalue(3), 9);
        let e2 = compute_e2_z1(&build_e1_z1(6, Some(-1), 5).unwrap()).unwrap();
        assert_eq!(e2.entries[&(-1, 6)][0].eigenvalue(5), -125);
        assert!(e2.euler_characteristics_agree);
    }

    #[test]
    fn broken_differential_is_reported() {
        let mut page = build_e1_z1(4, Some(-1), 3).unwrap();
        for row in page.phi.get_mut(&2).unwrap() {
            for v in row.iter_mut() {
                *v = 0;
            }
        }
        assert!(matches!(compute_e2_z1(&page), Err(Error::PageMismatch(_))));
        // The unchecked pass still reports what survives.
        let raw = compute_e2_z1_unchecked(&page).unwrap();
        assert!(raw.entries.contains_key(&(-1, 2)));
    }

    #[test]
    fn rendering() {
        let page = build_e1_z1(4, Some(-1), 3).unwrap();
        let text = page.render_text();
        assert!(text.contains("a=-1"));
        assert_eq!(text.lines().count(), 1 + 7 + 1);
        let json = serde_json::to_value(page.table()).unwrap();
        assert!(json
            .as_array()
            .unwrap()
            .iter()
            .all(|r| r["rank"].as_u64().unwrap() > 0));
        let e2 = compute_e2_z1(&page).unwrap();
        assert!(e2.render_text().contains("-p^2"));
    }
}

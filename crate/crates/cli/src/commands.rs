//! Check builders behind each subcommand.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use nearby_core::charsum::{
    base_case_sum, is_signed_power_of, jacobi_methods, jacobi_sum_closed, recursion_terms,
};
use nearby_core::cohomology::{
    build_e1_k, build_e1_z1, cohomology_p1_bundle, cohomology_projective_space, cohomology_quadric,
    compute_e2_z1, compute_e2_z1_unchecked, kramer_ss_trace, lefschetz_consistency,
    nearby_cycles_stalks, predicted_point_count, FrobWeight, Stalks,
};
use nearby_core::ffield::{make_field, FieldDesc};
use nearby_core::hermitian::{
    classify_hermitian, quadric_epsilon, residual_quadric_over, HermitianDatum,
};
use nearby_core::localmodel::{check_scale, fiber_enumerators, summarize, LocalModelSummary};
use nearby_core::quadric::{
    classify_diagonal_form, count_projective_points_bruteforce, point_counters,
    DiagonalQuadraticForm,
};
use nearby_core::{Error, Result};
use serde_json::{json, Value};

use crate::report::{Outcome, PendingCheck};

/// `--form`: `split`, `nonsplit`, or explicit diagonal residues `1,1,-1,-2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormSpec {
    Split,
    Nonsplit,
    List(Vec<i64>),
}

impl FromStr for FormSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "split" => Ok(Self::Split),
            "nonsplit" | "non-split" => Ok(Self::Nonsplit),
            _ => s
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Self::List)
                .map_err(|_| format!("expected split, nonsplit or a list like 1,1,-1; got {s:?}")),
        }
    }
}

impl FormSpec {
    pub fn label(&self) -> String {
        match self {
            Self::Split => "split".into(),
            Self::Nonsplit => "nonsplit".into(),
            Self::List(v) => v.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
        }
    }

    /// Resolves to a hermitian datum of rank `n` (taken from the list when
    /// explicit entries are given).
    pub fn datum(&self, p: u64, n: Option<usize>) -> Result<HermitianDatum> {
        let need_n = || n.ok_or_else(|| Error::InvalidParameter("--n is required".into()));
        match self {
            Self::Split => HermitianDatum::split(p, need_n()?),
            Self::Nonsplit => HermitianDatum::nonsplit(p, need_n()?),
            Self::List(v) => {
                if let Some(n) = n {
                    if n != v.len() {
                        return Err(Error::InvalidParameter(format!(
                            "--n {n} disagrees with {} form entries",
                            v.len()
                        )));
                    }
                }
                HermitianDatum::from_units(p, v)
            }
        }
    }
}

pub fn field(p: u64, k: u32) -> Result<FieldDesc> {
    make_field(p, k as i64)
}

fn sign_label(e: Option<i8>) -> &'static str {
    match e {
        Some(1) => "eps=+1",
        Some(_) => "eps=-1",
        None => "odd",
    }
}

pub fn weight_string(w: FrobWeight, p: u64) -> String {
    format!("{:+}", w.eigenvalue(p))
}

pub fn stalks_string(stalks: &Stalks, p: u64) -> String {
    let parts: Vec<String> = stalks
        .iter()
        .map(|(d, ws)| {
            let ws: Vec<String> = ws.iter().map(|&w| weight_string(w, p)).collect();
            format!("{d}: [{}]", ws.join(", "))
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

// ---------------------------------------------------------------- jacobi

pub fn jacobi_checks(p: u64, k: u32, m: usize, methods: &[String]) -> Result<Vec<PendingCheck>> {
    let f = field(p, k)?;
    if m == 0 {
        return Err(Error::InvalidParameter("--m must be at least 1".into()));
    }
    let registry = jacobi_methods();
    for name in methods {
        registry.get(name)?;
    }
    let q = f.order();
    let mut out = Vec::new();
    for name in methods.iter().filter(|n| n.as_str() != "closed") {
        let (f, name) = (f.clone(), name.clone());
        out.push(PendingCheck::new(
            format!("j_{m} over F_{q}: {name} vs closed form"),
            format!("closed form chi(-1)^m q^(m-1) vs {name} oracle"),
            move || {
                let method = jacobi_methods().get(&name)?;
                let actual = method.jacobi_sum(&f, m)?;
                Ok(Outcome::eq(jacobi_sum_closed(&f, m), actual))
            },
        ));
    }
    {
        let f = f.clone();
        out.push(PendingCheck::new(
            format!("|j_{m}| over F_{q} is a power of q"),
            "closed form",
            move || {
                let j = jacobi_methods().get("convolution")?.jacobi_sum(&f, m)?;
                Ok(Outcome::holds(is_signed_power_of(&j, q)))
            },
        ));
    }
    if m == 1 {
        let f = f.clone();
        out.push(PendingCheck::new(
            format!("base sum over F_{q}"),
            "identity: sum chi(x(1-x)) = -chi(-1)",
            move || {
                let chi = f.quad_char(f.neg(f.one())) as i64;
                Ok(Outcome::eq(-chi, base_case_sum(&f)))
            },
        ));
    } else {
        out.push(PendingCheck::new(
            format!("recursion step j_{} -> j_{m} over F_{q}", m - 1),
            "identity: shifted sum, split sum, inner sum, j_m = chi(-1) q j_(m-1)",
            move || {
                let t = recursion_terms(&f, m)?;
                let failed: Vec<&str> = [
                    ("shifted", t.shifted_identity_holds()),
                    ("split", t.split_identity_holds()),
                    ("inner", t.inner_sum_holds()),
                    ("step", t.step_holds()),
                ]
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(n, _)| *n)
                .collect();
                Ok(Outcome {
                    expected: "all identities hold".into(),
                    actual: if failed.is_empty() {
                        "all identities hold".into()
                    } else {
                        format!("failed: {}", failed.join(", "))
                    },
                    pass: failed.is_empty(),
                })
            },
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------- quadric

/// Projective count of `Σ a_i x_i^2 = 0` over `F_{p^k}` by every selected
/// counter, compared with brute force, plus the weighted-cohomology
/// prediction.
pub fn quadric_checks(
    p: u64,
    k: u32,
    entries: Vec<i64>,
    counters: &[String],
) -> Result<Vec<PendingCheck>> {
    let f = field(p, k)?;
    let base = field(p, 1)?;
    let form = DiagonalQuadraticForm::from_ints(&f, &entries)?;
    let n = form.dimension();
    let registry = point_counters();
    for name in counters {
        registry.get(name)?;
    }
    let q = f.order();
    let label = format!(
        "n={n} ({}) over F_{q}",
        entries
            .iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    let mut out = Vec::new();
    for name in counters.iter().filter(|c| c.as_str() != "bruteforce") {
        let (form, name) = (form.clone(), name.clone());
        out.push(PendingCheck::new(
            format!("#Q {label}: bruteforce vs {name}"),
            format!("oracle: bruteforce vs {name}"),
            move || {
                let brute = count_projective_points_bruteforce(&form)? as i128;
                let other = point_counters().get(&name)?.count(&form)?;
                Ok(Outcome::eq(other, brute))
            },
        ));
    }
    let base_form = DiagonalQuadraticForm::from_ints(&base, &entries)?;
    out.push(PendingCheck::new(
        format!("#Q {label}: bruteforce vs cohomology table"),
        "Lefschetz trace on weighted quadric table, eps from F_p",
        move || {
            let eps = classify_diagonal_form(&base_form).epsilon();
            let table = cohomology_quadric(n, eps, p)?;
            let brute = count_projective_points_bruteforce(&form)? as i128;
            Ok(Outcome::eq(predicted_point_count(&table, k), brute))
        },
    ));
    Ok(out)
}

// ---------------------------------------------------------------- localmodel

type SummaryCheck = Box<dyn Fn(&LocalCtx, &LocalModelSummary) -> Result<Outcome> + Send + Sync>;

struct LocalCtx {
    datum: HermitianDatum,
    field: FieldDesc,
    enumerator: String,
    memo: OnceLock<std::result::Result<LocalModelSummary, String>>,
}

impl LocalCtx {
    fn summary(&self) -> Result<&LocalModelSummary> {
        self.memo
            .get_or_init(|| {
                let e = fiber_enumerators()
                    .get(&self.enumerator)
                    .map_err(|e| e.to_string())?;
                summarize(&self.datum, &self.field, e.as_ref()).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::InvariantViolation(format!("enumeration failed: {e}")))
    }
}

pub fn localmodel_checks(
    datum: &HermitianDatum,
    k: u32,
    enumerator: &str,
) -> Result<Vec<PendingCheck>> {
    let p = datum.p();
    let n = datum.n();
    check_scale(p, n, k)?;
    fiber_enumerators().get(enumerator)?;
    let f = field(p, k)?;
    let q = f.order();
    let class = classify_hermitian(datum).as_str();
    let label = format!("n={n} {class} over F_{q}");
    let ctx = Arc::new(LocalCtx {
        datum: datum.clone(),
        field: f,
        enumerator: enumerator.to_string(),
        memo: OnceLock::new(),
    });
    let mut out = Vec::new();
    let mut add = |name: &str, prov: &str, job: SummaryCheck| {
        let ctx = ctx.clone();
        out.push(PendingCheck::new(
            format!("{label}: {name}"),
            prov,
            move || {
                let s = ctx.summary()?;
                job(&ctx, s)
            },
        ));
    };
    add(
        "unique singular point",
        "enumeration: points with J|F = 0",
        Box::new(|_, s| Ok(Outcome::eq(1, s.singular_points))),
    );
    add(
        "singular point is im J",
        "enumeration",
        Box::new(|_, s| Ok(Outcome::holds(s.singular_is_image_of_j))),
    );
    add(
        "enumerated points and pairs satisfy their conditions",
        "enumeration re-verified",
        Box::new(|_, s| {
            Ok(Outcome::holds(
                s.all_points_verified && s.all_pairs_verified,
            ))
        }),
    );
    add(
        "|M| = 1 + q #Q",
        "identity assembly vs direct enumeration",
        Box::new(move |c, s| {
            let form = residual_quadric_over(&c.datum, &c.field)?;
            let nq = count_projective_points_bruteforce(&form)?;
            Ok(Outcome::eq(1 + q * nq, s.points as u64))
        }),
    );
    if n >= 3 {
        add(
            "blowdown |M| = |M^K| - #P^(n-1) + 1",
            "identity: blowdown",
            Box::new(|_, s| {
                let expected = s.blowup_pairs as i64 - s.projective_space_count() as i64 + 1;
                Ok(Outcome::eq(expected, s.points as i64))
            }),
        );
    }
    add(
        "inclusion-exclusion |M^K| = z1 + z2 - q_count",
        "identity: strata cover the blow-up",
        Box::new(|_, s| {
            let st = s.strata;
            let expected = format!(
                "{} pairs, 0 off strata",
                st.z1_count + st.z2_count - st.q_count
            );
            let actual = format!(
                "{} pairs, {} off strata",
                s.blowup_pairs, st.off_strata_count
            );
            Ok(Outcome::eq(expected, actual))
        }),
    );
    add(
        "bundle z2 = (q+1) q_count",
        "identity: P^1-bundle over Q",
        Box::new(|_, s| {
            Ok(Outcome::eq(
                (s.q() + 1) * s.strata.q_count,
                s.strata.z2_count,
            ))
        }),
    );
    add(
        "z1 = #P^(n-1)",
        "Lefschetz trace on weighted P^(n-1) table",
        Box::new(move |_, s| {
            let t = cohomology_projective_space(n as u32 - 1, p);
            Ok(Outcome::eq(
                predicted_point_count(&t, k),
                s.strata.z1_count as i128,
            ))
        }),
    );
    let eps = quadric_epsilon(datum);
    add(
        "q_count = #Q",
        "Lefschetz trace on weighted quadric table",
        Box::new(move |_, s| {
            let t = cohomology_quadric(n, eps, p)?;
            Ok(Outcome::eq(
                predicted_point_count(&t, k),
                s.strata.q_count as i128,
            ))
        }),
    );
    add(
        "z2 = #Z_2",
        "Lefschetz trace on weighted P^1-bundle table",
        Box::new(move |_, s| {
            let t = cohomology_p1_bundle(&cohomology_quadric(n, eps, p)?);
            Ok(Outcome::eq(
                predicted_point_count(&t, k),
                s.strata.z2_count as i128,
            ))
        }),
    );
    Ok(out)
}

/// Summary counts for the report artifacts.
pub fn localmodel_artifact(datum: &HermitianDatum, k: u32, enumerator: &str) -> Result<Value> {
    let f = field(datum.p(), k)?;
    let e = fiber_enumerators().get(enumerator)?;
    let s = summarize(datum, &f, e.as_ref())?;
    Ok(serde_json::to_value(s).expect("summary serializes"))
}

// ---------------------------------------------------------------- nearby cycles

fn expected_stalks(n: usize, epsilon: Option<i8>) -> Stalks {
    let mut s = Stalks::new();
    s.insert(0, vec![FrobWeight::new(1, 0)]);
    if n == 2 {
        s.insert(1, vec![FrobWeight::new(1, 1)]);
    } else if let Some(e) = epsilon {
        s.insert(n as i64 - 1, vec![FrobWeight::new(e, n as u32 / 2)]);
    }
    s
}

fn expected_trace(n: usize, epsilon: Option<i8>, p: u64) -> i128 {
    match epsilon {
        None => 1,
        Some(e) => 1 - e as i128 * (p as i128).pow(n as u32 / 2),
    }
}

/// Page, stalk and trace checks for one `(n, ε, p)`.
pub fn nearby_cycles_checks(n: usize, epsilon: Option<i8>, p: u64) -> Result<Vec<PendingCheck>> {
    field(p, 1)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    cohomology_quadric(n, epsilon, p)?;
    let label = format!("n={n} {} p={p}", sign_label(epsilon));
    let mut out = Vec::new();
    if n >= 3 {
        out.push(PendingCheck::new(
            format!("{label}: E2 closed form"),
            "closed form: (0,0) weight 1, (-1,n) weight eps p^(n/2) for even n",
            move || {
                let e1 = build_e1_z1(n, epsilon, p)?;
                let e2 = compute_e2_z1_unchecked(&e1)?;
                let render = |m: &BTreeMap<(i32, i32), Vec<FrobWeight>>| {
                    let mut s = String::new();
                    for ((a, b), ws) in m {
                        let ws: Vec<String> = ws.iter().map(|&w| weight_string(w, p)).collect();
                        let _ = write!(s, "({a},{b}):[{}] ", ws.join(","));
                    }
                    s.trim_end().to_string()
                };
                let mut want = BTreeMap::new();
                want.insert((0, 0), vec![FrobWeight::new(1, 0)]);
                if let Some(e) = epsilon {
                    want.insert((-1, n as i32), vec![FrobWeight::new(e, n as u32 / 2)]);
                }
                Ok(Outcome::eq(render(&want), render(&e2.entries)))
            },
        ));
        out.push(PendingCheck::new(
            format!("{label}: rank statements"),
            "phi injective in even rows != n, psi surjective up to 2(n-2), exact for b > 0",
            move || {
                let e2 = compute_e2_z1_unchecked(&build_e1_z1(n, epsilon, p)?)?;
                let ni = n as i32;
                let bad: Vec<String> = e2
                    .rows
                    .iter()
                    .filter(|r| {
                        !r.unimodular
                            || (r.b % 2 == 0 && r.b != ni && !r.phi_injective())
                            || (r.b <= 2 * (ni - 2) && !r.psi_surjective())
                            || (r.b != 0 && !r.exact_in_middle())
                    })
                    .map(|r| r.b.to_string())
                    .collect();
                Ok(Outcome {
                    expected: "all rows".into(),
                    actual: if bad.is_empty() {
                        "all rows".into()
                    } else {
                        format!("rows failing: {}", bad.join(","))
                    },
                    pass: bad.is_empty(),
                })
            },
        ));
        out.push(PendingCheck::new(
            format!("{label}: Euler characteristics E1 = E2"),
            "identity: homology of three-term complexes",
            move || {
                let e2 = compute_e2_z1_unchecked(&build_e1_z1(n, epsilon, p)?)?;
                Ok(Outcome::holds(e2.euler_characteristics_agree))
            },
        ));
    }
    out.push(PendingCheck::new(
        format!("{label}: stalks at the singular point"),
        "closed-form stalk table vs stalks read off E2",
        move || {
            let got = nearby_cycles_stalks(n, epsilon, p)?;
            Ok(Outcome::eq(
                stalks_string(&expected_stalks(n, epsilon), p),
                stalks_string(&got, p),
            ))
        },
    ));
    out.push(PendingCheck::new(
        format!("{label}: alternating semisimple trace"),
        "closed form: 1 (odd n), 1 - eps p^(n/2) (even n)",
        move || {
            Ok(Outcome::eq(
                expected_trace(n, epsilon, p),
                kramer_ss_trace(n, epsilon, p)?,
            ))
        },
    ));
    Ok(out)
}

/// Rendered pages and the stalk table for the report artifacts.
pub fn nearby_cycles_artifacts(
    n: usize,
    epsilon: Option<i8>,
    p: u64,
) -> Result<BTreeMap<String, Value>> {
    let mut a = BTreeMap::new();
    let stalks = nearby_cycles_stalks(n, epsilon, p)?;
    let table: BTreeMap<String, Vec<i128>> = stalks
        .iter()
        .map(|(d, ws)| (d.to_string(), ws.iter().map(|w| w.eigenvalue(p)).collect()))
        .collect();
    a.insert("stalks".into(), json!(table));
    if n >= 3 {
        let e1k = build_e1_k(n, epsilon, p)?;
        let e1 = build_e1_z1(n, epsilon, p)?;
        let e2 = compute_e2_z1(&e1)?;
        a.insert("page_e1_k".into(), Value::String(e1k.render_text()));
        a.insert("page_e1_z1".into(), Value::String(e1.render_text()));
        a.insert("page_e2_z1".into(), Value::String(e2.render_text()));
        a.insert(
            "e2_table".into(),
            serde_json::to_value(e2.table()).expect("table"),
        );
    }
    Ok(a)
}

/// Stalk-trace sum over the enumerated special fiber against
/// `#P^{n-1}(F_{p^k})`. A reported comparison.
pub fn lefschetz_check(datum: &HermitianDatum, k: u32) -> Result<PendingCheck> {
    check_scale(datum.p(), datum.n(), k)?;
    let class = classify_hermitian(datum).as_str();
    let label = format!("n={} {class} p={} k={k}", datum.n(), datum.p());
    let datum = datum.clone();
    Ok(PendingCheck::new(
        format!("{label}: Lefschetz stalk-trace sum"),
        "consistency report: sum of stalk traces vs sum p^(ik), i < n",
        move || {
            let r = lefschetz_consistency(&datum, k)?;
            Ok(Outcome::eq(r.projective_count, r.stalk_trace_sum))
        },
    ))
}

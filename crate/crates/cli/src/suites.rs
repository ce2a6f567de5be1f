//! Named check grids for `verify --suite`.

use nearby_core::hermitian::HermitianDatum;
use nearby_core::{Registry, Result};

use crate::commands::{
    jacobi_checks, lefschetz_check, localmodel_checks, nearby_cycles_checks, quadric_checks,
};
use crate::report::PendingCheck;

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn checks(&self) -> Result<Vec<PendingCheck>>;
}

/// `(p, k)` for `q ∈ {3, 5, 7, 9, 11, 13}`.
pub const JACOBI_FIELDS: [(u64, u32); 6] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)];
pub const JACOBI_MS: [usize; 4] = [1, 2, 3, 4];
pub const QUADRIC_PRIMES: [u64; 3] = [3, 5, 7];
pub const LOCALMODEL_GRID: [(usize, u64); 5] = [(2, 3), (2, 5), (3, 3), (3, 5), (4, 3)];
pub const PAGE_PRIMES: [u64; 3] = [3, 5, 7];
pub const LEFSCHETZ_GRID: [(usize, u64, u32); 4] = [(3, 3, 1), (3, 3, 2), (3, 5, 1), (4, 3, 1)];

fn both_forms(p: u64, n: usize) -> Result<[HermitianDatum; 2]> {
    Ok([
        HermitianDatum::split(p, n)?,
        HermitianDatum::nonsplit(p, n)?,
    ])
}

pub struct JacobiSuite;
pub struct QuadricSuite;
pub struct LocalModelSuite;
pub struct NearbyCyclesSuite;
pub struct LefschetzSuite;
pub struct AllSuite;

impl Suite for JacobiSuite {
    fn name(&self) -> &'static str {
        "jacobi"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let methods = vec!["convolution".to_string()];
        let mut out = Vec::new();
        for (p, k) in JACOBI_FIELDS {
            for m in JACOBI_MS {
                out.extend(jacobi_checks(p, k, m, &methods)?);
            }
        }
        Ok(out)
    }
}

impl Suite for QuadricSuite {
    fn name(&self) -> &'static str {
        "quadric"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let counters = vec!["bruteforce".to_string(), "weil".to_string()];
        let mut out = Vec::new();
        for p in QUADRIC_PRIMES {
            for n in 2..=6 {
                for d in both_forms(p, n)? {
                    out.extend(quadric_checks(p, 1, d.diagonal(), &counters)?);
                    if p == 3 && n <= 4 {
                        out.extend(quadric_checks(p, 2, d.diagonal(), &counters)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl Suite for LocalModelSuite {
    fn name(&self) -> &'static str {
        "localmodel"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let mut out = Vec::new();
        for (n, p) in LOCALMODEL_GRID {
            for d in both_forms(p, n)? {
                out.extend(localmodel_checks(&d, 1, "pruned")?);
            }
        }
        Ok(out)
    }
}

impl Suite for NearbyCyclesSuite {
    fn name(&self) -> &'static str {
        "nearby-cycles"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let mut out = Vec::new();
        for p in PAGE_PRIMES {
            out.extend(nearby_cycles_checks(2, Some(1), p)?);
            for n in 3..=10 {
                if n % 2 == 1 {
                    out.extend(nearby_cycles_checks(n, None, p)?);
                } else {
                    for e in [1, -1] {
                        out.extend(nearby_cycles_checks(n, Some(e), p)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl Suite for LefschetzSuite {
    fn name(&self) -> &'static str {
        "lefschetz"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let mut out = Vec::new();
        for (n, p, k) in LEFSCHETZ_GRID {
            for d in both_forms(p, n)? {
                out.push(lefschetz_check(&d, k)?);
            }
        }
        Ok(out)
    }
}

impl Suite for AllSuite {
    fn name(&self) -> &'static str {
        "all"
    }
    fn checks(&self) -> Result<Vec<PendingCheck>> {
        let reg = suites();
        let mut out = Vec::new();
        for &name in reg.names().iter().filter(|n| **n != "all") {
            out.extend(reg.get(name)?.checks()?);
        }
        Ok(out)
    }
}

pub fn suites() -> Registry<dyn Suite> {
    let mut reg: Registry<dyn Suite> = Registry::new("suite");
    reg.register("jacobi", || Box::new(JacobiSuite))
        .register("quadric", || Box::new(QuadricSuite))
        .register("localmodel", || Box::new(LocalModelSuite))
        .register("nearby-cycles", || Box::new(NearbyCyclesSuite))
        .register("lefschetz", || Box::new(LefschetzSuite))
        .register("all", || Box::new(AllSuite));
    reg
}

//! Dense polynomials over `F_p`, lowest degree first, used to pick and
//! reduce by the defining modulus of `F_{p^k}`.

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let mut r = trim(a.to_vec());
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = mod_inverse(m[dm], p);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let factor = r[dr] * lead_inv % p;
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate().take(dm + 1) {
            r[i + shift] = (r[i + shift] + p - factor * c % p) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn pow_rem(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        exp >>= 1;
    }
    acc
}

/// Irreducibility of a monic `f` of degree `k` over `F_p`: `f` has no
/// irreducible factor of degree `d <= k/2`, i.e. `gcd(f, x^{p^d} - x) = 1`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = match degree(f) {
        Some(k) => k,
        None => return false,
    };
    if k <= 1 {
        return k == 1;
    }
    let x: Poly = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..=k / 2 {
        frob = pow_rem(&frob, p, f, p);
        let g = gcd(f, &sub(&frob, &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratics_over_f3() {
        // x^2 + 1, x^2 + x + 2, x^2 + 2x + 2 are the irreducible monic quadratics.
        let irreducible: Vec<Poly> = (0..9u64)
            .map(|i| vec![i % 3, i / 3, 1])
            .filter(|f| is_irreducible(f, 3))
            .collect();
        assert_eq!(
            irreducible,
            vec![vec![1, 0, 1], vec![2, 1, 1], vec![2, 2, 1]]
        );
    }

    #[test]
    fn product_of_quadratic_and_cubic_is_reducible() {
        // (x^2 + 1)(x^3 + 2x + 1) over F_3: degree 5 with no linear factor.
        let f = mul(&[1, 0, 1], &[1, 2, 0, 1], 3);
        assert_eq!(f.len(), 6);
        assert!(!is_irreducible(&f, 3));
    }
}

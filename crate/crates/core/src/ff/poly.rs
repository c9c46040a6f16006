//! Dense polynomials over `GF(p)`, coefficients stored low degree first.
//!
//! Only used while building field tables; all later arithmetic runs on the
//! discrete-log representation.

pub(crate) type Poly = Vec<u64>;

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod_int(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_int(a: u64, p: u64) -> u64 {
    powmod_int(a, p - 2, p)
}

pub(crate) fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic-or-not polynomial `m` (nonzero).
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Poly {
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_int(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = mulmod(r[dr], lead_inv, p);
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - mulmod(c, mi, p)) % p;
            }
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(ai, bj, p)) % p;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn mulmod_poly(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Poly {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Poly {
    let mut result: Poly = vec![1];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod_poly(&result, &b, m, p);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod_poly(&b, &b, m, p);
        }
    }
    result
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Rabin's test for a monic polynomial `f` of degree `n >= 1`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let frob_power = |k: usize| -> Poly {
        // x^(p^k) mod f by repeated p-th powers
        let mut y = x.clone();
        for _ in 0..k {
            y = powmod(&y, p as u128, f, p);
        }
        y
    };
    let full = frob_power(n);
    if sub(&full, &x, p) != Vec::<u64>::new() {
        return false;
    }
    for r in prime_factors(n as u64) {
        let y = frob_power(n / r as usize);
        let g = gcd(f, &sub(&y, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_root(f: &[u64], p: u64) -> bool {
        (0..p).any(|x| {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        })
    }

    #[test]
    fn quadratics_and_cubics_match_root_check() {
        // degree <= 3 is irreducible iff it has no root
        for p in [3u64, 5, 7] {
            for c0 in 0..p {
                for c1 in 0..p {
                    let f = vec![c0, c1, 1];
                    assert_eq!(is_irreducible(&f, p), !has_root(&f, p), "{f:?} mod {p}");
                    for c2 in 0..p {
                        let g = vec![c0, c1, c2, 1];
                        assert_eq!(is_irreducible(&g, p), !has_root(&g, p), "{g:?} mod {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_of_quadratics_is_reducible() {
        // (x^2+1)^2 over F_3 has no root but is reducible
        let f = mul(&[1, 0, 1], &[1, 0, 1], 3);
        assert!(!has_root(&f, 3));
        assert!(!is_irreducible(&f, 3));
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert_eq!(prime_factors(288), vec![2, 3]);
    }
}

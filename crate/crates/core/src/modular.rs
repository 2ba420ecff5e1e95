//! Integer number theory for exponent bookkeeping mod `D`.

use crate::error::{Error, Result};

/// Canonical representative of `x mod m` in `[0, m)`.
#[inline]
pub fn modp(x: i64, m: i64) -> i64 {
    x.rem_euclid(m)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtGcdResult {
    pub g: i64,
    pub r: i64,
    pub s: i64,
}

/// `g = gcd(l, m)` with Bézout coefficients `r·l + s·m = g`, `g ≥ 0`.
pub fn ext_gcd(l: i64, m: i64) -> Result<ExtGcdResult> {
    if l == 0 && m == 0 {
        return Err(Error::GcdOfZeros);
    }
    if l != 0 && m % l == 0 {
        return Ok(ExtGcdResult {
            g: l.abs(),
            r: l.signum(),
            s: 0,
        });
    }
    let (mut old_r, mut r) = (l, m);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    Ok(ExtGcdResult {
        g: old_r,
        r: old_s,
        s: old_t,
    })
}

/// Inverse of `a` mod `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let e = ext_gcd(modp(a, m), m).ok()?;
    (e.g == 1).then(|| modp(e.r, m))
}

/// The unique `n mod D` with `n·l ≡ j` and `n·m ≡ k`, given `gcd(l, m) = 1`
/// and `j·m ≡ k·l (mod D)`.
pub fn lemma_witness(j: i64, k: i64, l: i64, m: i64, d: i64) -> Result<i64> {
    let e = ext_gcd(l, m)?;
    if e.g != 1 {
        return Err(Error::NotCoprime { l, m, gcd: e.g });
    }
    if modp(j * m - k * l, d) != 0 {
        return Err(Error::CongruenceFails { j, k, l, m, d });
    }
    Ok(modp(j * e.r + k * e.s, d))
}

pub fn is_prime(d: u32) -> bool {
    d >= 2 && (2..d).take_while(|p| p * p <= d).all(|p| !d.is_multiple_of(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_examples() {
        assert_eq!(ext_gcd(104, 80).unwrap().g, 8);
        assert_eq!(ext_gcd(1, 7).unwrap(), ExtGcdResult { g: 1, r: 1, s: 0 });
        assert_eq!(ext_gcd(2, 3).unwrap(), ExtGcdResult { g: 1, r: -1, s: 1 });
        assert_eq!(ext_gcd(0, 0), Err(Error::GcdOfZeros));
        let e = ext_gcd(-12, 18).unwrap();
        assert_eq!(e.g, 6);
        assert_eq!(e.r * -12 + e.s * 18, 6);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(lemma_witness(2, 3, 2, 3, 7).unwrap(), 1);
        assert_eq!(lemma_witness(0, 0, 2, 3, 7).unwrap(), 0);
        assert_eq!(lemma_witness(4, 0, 2, 3, 6).unwrap(), 2);
        assert!(matches!(lemma_witness(1, 1, 2, 4, 6), Err(Error::NotCoprime { .. })));
        assert!(matches!(
            lemma_witness(1, 0, 1, 1, 5),
            Err(Error::CongruenceFails { .. })
        ));
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(2, 5), Some(3));
        assert_eq!(inv_mod(2, 6), None);
        assert_eq!(inv_mod(5, 6), Some(5));
    }
}

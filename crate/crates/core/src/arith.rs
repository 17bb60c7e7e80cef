use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let s = isqrt(n);
        &s * &s == *n
    }
}

pub fn floor_rat(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil_rat(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// Largest integer `x` with `x² ≤ q` for rational `q ≥ 0`.
pub fn floor_sqrt_rat(q: &BigRational) -> BigInt {
    // floor(sqrt(p/d)) = floor(sqrt(p d) / d)
    let p = q.numer() * q.denom();
    isqrt(&p) / q.denom()
}

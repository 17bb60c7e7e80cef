//! Integral binary quadratic forms `A x² + B xy + C y²` and their proper
//! (SL₂(Z)) equivalence, for every nonzero discriminant.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{ext_gcd, is_square, isqrt};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        BinaryForm { a: a.into(), b: b.into(), c: c.into() }
    }

    /// The form `x ↦ xᵀ G x` of a symmetric 2×2 Gram matrix.
    pub fn from_gram(g00: &BigInt, g01: &BigInt, g11: &BigInt) -> Self {
        BinaryForm { a: g00.clone(), b: BigInt::from(2) * g01, c: g11.clone() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// `f ∘ M` for `M = [[p, q], [r, s]]`.
    pub fn transform(&self, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) -> BinaryForm {
        let two = BigInt::from(2);
        BinaryForm {
            a: self.eval(p, r),
            b: &two * &self.a * p * q + &self.b * (p * s + q * r) + &two * &self.c * r * s,
            c: self.eval(q, s),
        }
    }

    fn neg(&self) -> BinaryForm {
        BinaryForm { a: -&self.a, b: -&self.b, c: -&self.c }
    }
}

/// Whether `f` and `g` are related by a matrix of determinant 1.
pub fn properly_equivalent(f: &BinaryForm, g: &BinaryForm) -> Result<bool> {
    let d = f.discriminant();
    if d.is_zero() {
        return Err(Error::InvalidInput("degenerate binary form".into()));
    }
    if g.discriminant() != d {
        return Ok(false);
    }
    if d.is_negative() {
        if f.a.signum() != g.a.signum() {
            return Ok(false);
        }
        if f.a.is_negative() {
            return Ok(reduce_definite(&f.neg()) == reduce_definite(&g.neg()));
        }
        return Ok(reduce_definite(f) == reduce_definite(g));
    }
    if is_square(&d) {
        let nf = isotropic_normal_forms(f);
        return Ok(nf == isotropic_normal_forms(g));
    }
    let start = reduce_indefinite(f);
    let target = reduce_indefinite(g);
    Ok(indefinite_cycle(&start).contains(&target))
}

/// Unique reduced representative of a positive definite form:
/// `|B| ≤ A ≤ C`, with `B ≥ 0` when `|B| = A` or `A = C`.
pub fn reduce_definite(f: &BinaryForm) -> BinaryForm {
    let mut g = f.clone();
    let disc = g.discriminant();
    loop {
        let two_a = BigInt::from(2) * &g.a;
        if g.b.abs() > g.a || (-&g.b == g.a) {
            // b ← b mod 2a into (−a, a]
            let mut b = g.b.mod_floor(&two_a);
            if b > g.a {
                b -= &two_a;
            }
            let c = (&b * &b - &disc) / (BigInt::from(4) * &g.a);
            g = BinaryForm { a: g.a.clone(), b, c };
        }
        if g.a > g.c {
            g = BinaryForm { a: g.c.clone(), b: -&g.b, c: g.a.clone() };
            continue;
        }
        if g.a == g.c && g.b.is_negative() {
            g.b = -&g.b;
        }
        return g;
    }
}

// m < √Δ for nonsquare Δ > 0
fn lt_sqrt(m: &BigInt, disc: &BigInt) -> bool {
    m.is_negative() || &(m * m) < disc
}

fn gt_sqrt(m: &BigInt, disc: &BigInt) -> bool {
    m.is_positive() && &(m * m) > disc
}

fn is_reduced_indefinite(f: &BinaryForm, disc: &BigInt) -> bool {
    // |√Δ − 2|A|| < B < √Δ
    let two_a = BigInt::from(2) * f.a.abs();
    f.b.is_positive() && lt_sqrt(&f.b, disc) && lt_sqrt(&(&two_a - &f.b), disc) && gt_sqrt(&(&two_a + &f.b), disc)
}

fn rho(f: &BinaryForm, disc: &BigInt, s: &BigInt) -> BinaryForm {
    let c_abs = f.c.abs();
    let m = BigInt::from(2) * &c_abs;
    let b = if lt_sqrt(&c_abs, disc) {
        // largest B' ≤ ⌊√Δ⌋ with B' ≡ −B (mod 2|C|)
        s - (s + &f.b).mod_floor(&m)
    } else {
        let mut b = (-&f.b).mod_floor(&m);
        if b > c_abs {
            b -= &m;
        }
        b
    };
    let a_new = (&b * &b - disc) / (BigInt::from(4) * &f.c);
    BinaryForm { a: f.c.clone(), b, c: a_new }
}

fn reduce_indefinite(f: &BinaryForm) -> BinaryForm {
    let disc = f.discriminant();
    let s = isqrt(&disc);
    let mut g = f.clone();
    while !is_reduced_indefinite(&g, &disc) {
        g = rho(&g, &disc, &s);
    }
    g
}

fn indefinite_cycle(start: &BinaryForm) -> BTreeSet<BinaryForm> {
    let disc = start.discriminant();
    let s = isqrt(&disc);
    let mut seen = BTreeSet::new();
    let mut g = start.clone();
    while seen.insert(g.clone()) {
        g = rho(&g, &disc, &s);
    }
    seen
}

/// For discriminant `δ²`: for each isotropic line, move it to the first
/// basis vector and reduce to `(0, B, C mod |B|)`.
fn isotropic_normal_forms(f: &BinaryForm) -> BTreeSet<BinaryForm> {
    let disc = f.discriminant();
    let delta = isqrt(&disc);
    let mut lines: Vec<(BigInt, BigInt)> = Vec::new();
    if f.a.is_zero() {
        lines.push((BigInt::one(), BigInt::zero()));
        // f = y (B x + C y): second line B x + C y = 0
        lines.push((-&f.c, f.b.clone()));
    } else {
        for sgn in [1, -1] {
            lines.push((-&f.b + BigInt::from(sgn) * &delta, BigInt::from(2) * &f.a));
        }
    }
    let mut out = BTreeSet::new();
    for (x, y) in lines {
        let g = x.gcd(&y);
        if g.is_zero() {
            continue;
        }
        let (x, y) = (&x / &g, &y / &g);
        // x w − u y = 1
        let (_, s, t) = ext_gcd(&x, &y);
        let (u, w) = (-t, s);
        let h = f.transform(&x, &u, &y, &w);
        debug_assert!(h.a.is_zero());
        let m = h.b.abs();
        out.insert(BinaryForm { a: BigInt::zero(), c: h.c.mod_floor(&m), b: h.b });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64) -> BinaryForm {
        BinaryForm::new(a, b, c)
    }

    #[test]
    fn definite_reduction() {
        assert_eq!(reduce_definite(&f(2, 2, 2)), f(2, 2, 2));
        assert_eq!(reduce_definite(&f(5, 8, 4)), reduce_definite(&f(1, 0, 4)));
        assert!(properly_equivalent(&f(1, 0, 1), &f(2, 2, 1)).unwrap());
        assert!(!properly_equivalent(&f(1, 0, 6), &f(2, 0, 3)).unwrap());
        assert!(properly_equivalent(&f(-1, 0, -1), &f(-2, 2, -1)).unwrap());
        assert!(!properly_equivalent(&f(-1, 0, -1), &f(1, 0, 1)).unwrap());
    }

    #[test]
    fn indefinite_equivalence() {
        // x² − 2y² and −x² + 2y² are equivalent (unit of norm −1 exists)
        assert!(properly_equivalent(&f(1, 0, -2), &f(-1, 0, 2)).unwrap());
        // x² − 3y² and −x² + 3y² are not
        assert!(!properly_equivalent(&f(1, 0, -3), &f(-1, 0, 3)).unwrap());
        let g = f(1, 0, -3).transform(&2.into(), &7.into(), &1.into(), &4.into());
        assert!(properly_equivalent(&f(1, 0, -3), &g).unwrap());
    }

    #[test]
    fn square_discriminant() {
        // hyperbolic plane 2xy vs x² − y²: discriminant 4 both
        assert!(!properly_equivalent(&f(0, 2, 0), &f(1, 0, -1)).unwrap());
        let g = f(0, 2, 0).transform(&3.into(), &1.into(), &5.into(), &2.into());
        assert!(properly_equivalent(&f(0, 2, 0), &g).unwrap());
    }
}

//! Second cohomology lattices of albanese fibres `K_H(v)` (generalised
//! Kummer type) and the numerics around their Beauville–Bogomolov form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::binary_form::{properly_equivalent, BinaryForm};
use crate::error::{Error, Result};
use crate::lattice::{
    is_positive, is_primitive, mukai_square, perp_basis, DefaultEffectivity, LatticeGram, MukaiVector, SurfaceKind,
    SurfaceModel,
};

/// `NS(K_H(v))` presented as `v^⊥`, with `n = ⟨v²⟩/2` so that the fibre has
/// dimension `2n − 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeauvilleData {
    pub n: BigInt,
    pub lattice: LatticeGram,
    pub fujiki_constant: BigRational,
}

/// The Gram is the Mukai pairing restricted to `v^⊥`. Flipping the global sign
/// of the identification with `H²` permutes basis signs but leaves the Gram
/// unchanged, so no sign convention enters here.
pub fn beauville_lattice(v: &MukaiVector, s: &SurfaceModel) -> Result<BeauvilleData> {
    if s.kind() != SurfaceKind::Abelian {
        return Err(Error::precondition("albanese fibres are defined for abelian surfaces"));
    }
    if !is_primitive(v) {
        return Err(Error::precondition(format!("{v} is not primitive")));
    }
    if !is_positive(v, s, &DefaultEffectivity)? {
        return Err(Error::precondition(format!("{v} is not positive")));
    }
    let sq = mukai_square(v, s)?;
    if sq < BigInt::from(6) {
        return Err(Error::precondition(format!(
            "⟨v²⟩ = {sq} < 6; use the ⟨v²⟩ = 4 Kummer reduction or the surface cases"
        )));
    }
    let n = sq / 2;
    Ok(BeauvilleData { fujiki_constant: fujiki_constant(&n), lattice: perp_basis(v, s)?, n })
}

/// `(x²) − 2n k²`, the form on `H² ⊕ Z(1 + nω)`.
pub fn kummer_q_rank1(x2: &BigInt, k: &BigInt, n: &BigInt) -> BigInt {
    x2 - BigInt::from(2) * n * k * k
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `(2n − 2)! n² / (2^{n−1} n!)`.
pub fn fujiki_constant(n: &BigInt) -> BigRational {
    let n64: u64 = n.try_into().expect("n fits in u64");
    let num = factorial(2 * n64 - 2) * n * n;
    let den = BigInt::from(2).pow(n64 - 1) * factorial(n64);
    BigRational::new(num, den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionShape {
    /// `∫ θ(l)^{2n−2}`
    Top,
    /// `∫ θ(l)^{2n−3} θ(x)`
    OneX,
    /// `∫ θ(l)^{2n−4} θ(x)²`
    TwoX,
    /// `∫ θ(l)^{2n−4} ẽ²`
    TwoE,
    /// `∫ θ(l)^{2n−4} θ(x) ẽ`
    MixedXE,
}

impl std::str::FromStr for IntersectionShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "L_2n2" | "top" => IntersectionShape::Top,
            "L_2n3_X" | "one-x" => IntersectionShape::OneX,
            "L_2n4_XX" | "two-x" => IntersectionShape::TwoX,
            "L_2n4_EE" | "two-e" => IntersectionShape::TwoE,
            "L_2n4_XE" | "mixed" => IntersectionShape::MixedXE,
            other => return Err(Error::InvalidInput(format!("unknown intersection shape {other:?}"))),
        })
    }
}

// exponents are never negative for n ≥ 3, and 0⁰ = 1
fn rpow(x: &BigRational, e: i64) -> BigRational {
    Pow::pow(x, e as u64)
}

/// Top intersection numbers on the `2n − 2` dimensional fibre, with
/// `l2 = (l²)`, `lx = (l, x)`, `x2 = (x²)` and `ẽ` the class with
/// `q(ẽ) = −2n` orthogonal to `H²`.
pub fn top_intersection(
    n: u32,
    l2: &BigRational,
    lx: &BigRational,
    x2: &BigRational,
    shape: IntersectionShape,
) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::precondition("intersection formulas need n ≥ 3"));
    }
    let ni = i64::from(n);
    let c = fujiki_constant(&BigInt::from(n));
    let q = |k: i64| BigRational::from_integer(k.into());
    Ok(match shape {
        IntersectionShape::Top => c * rpow(l2, ni - 1),
        IntersectionShape::OneX => c * rpow(l2, ni - 2) * lx,
        IntersectionShape::TwoX => {
            c * (rpow(l2, ni - 2) * x2 + q(2 * ni - 4) * rpow(l2, ni - 3) * lx * lx) / q(2 * ni - 3)
        }
        IntersectionShape::TwoE => c * q(-2 * ni) / q(2 * ni - 3) * rpow(l2, ni - 2),
        IntersectionShape::MixedXE => BigRational::zero(),
    })
}

/// Both sides of
/// `v(λ)² q(x) = q(λ) [(2m−1) v(λ) ∫λ^{2m−2}x² − (2m−2) (∫λ^{2m−1}x)²]`
/// with `m = n − 1` and `v(λ) = ∫λ^{2m}`.
pub fn fujiki_sides(
    n: u32,
    l2: &BigRational,
    lx: &BigRational,
    x2: &BigRational,
    q_x: &BigRational,
) -> Result<(BigRational, BigRational)> {
    if l2.is_zero() {
        return Err(Error::precondition("Fujiki relation needs (l²) ≠ 0"));
    }
    let m = i64::from(n) - 1;
    let q = |k: i64| BigRational::from_integer(k.into());
    let vol = top_intersection(n, l2, lx, x2, IntersectionShape::Top)?;
    let one = top_intersection(n, l2, lx, x2, IntersectionShape::OneX)?;
    let two = top_intersection(n, l2, lx, x2, IntersectionShape::TwoX)?;
    let q_l = l2.clone();
    let lhs = &vol * &vol * q_x;
    let rhs = q_l * (q(2 * m - 1) * &vol * two - q(2 * m - 2) * &one * &one);
    Ok((lhs, rhs))
}

pub fn fujiki_check(n: u32, l2: &BigRational, lx: &BigRational, x2: &BigRational) -> Result<bool> {
    // x is a pure H² class, so its q-value is (x²)
    let q_x = x2.clone();
    let (lhs, rhs) = fujiki_sides(n, l2, lx, x2, &q_x)?;
    Ok(lhs == rhs)
}

/// Whether an even rank-2 lattice has an orthogonal basis.
pub fn rank2_orthogonally_decomposable(g: &LatticeGram) -> Result<bool> {
    if g.rank() != 2 {
        return Err(Error::InvalidInput(format!("expected a rank-2 lattice, got rank {}", g.rank())));
    }
    let m = g.gram();
    let det = g.discriminant();
    if det.is_zero() {
        return Err(Error::InvalidGram("degenerate rank-2 lattice".into()));
    }
    // an orthogonal even basis has det = n1 n2 with both even
    if !det.is_multiple_of(&BigInt::from(4)) {
        return Ok(false);
    }
    let f = BinaryForm::from_gram(&m[(0, 0)], &m[(0, 1)], &m[(1, 1)]);
    let quarter = det.abs() / 4;
    let mut d = BigInt::one();
    while &d * &d <= quarter {
        if quarter.is_multiple_of(&d) {
            for p in [d.clone(), &quarter / &d] {
                for sign in [1, -1] {
                    let n1 = BigInt::from(2 * sign) * &p;
                    let n2 = &det / &n1;
                    if properly_equivalent(&f, &BinaryForm::new(n1, BigInt::zero(), n2))? {
                        return Ok(true);
                    }
                }
            }
        }
        d += 1;
    }
    Ok(false)
}

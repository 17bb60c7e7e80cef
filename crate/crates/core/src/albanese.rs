//! Formal algebra of the polarisation maps `φ_L : X → X̂`, `φ_L̃ : X̂ → X`
//! subject only to `φ_L̃ ∘ φ_L = −χ(L) 1_X` and `φ_L ∘ φ_L̃ = −χ(L) 1_X̂`.
//!
//! Every hom space between `X` and `X̂` is spanned by a single generator
//! (`1_X`, `1_X̂`, `φ_L` or `φ_L̃`), so a typed element is just a
//! coefficient together with its domain and codomain.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    XHat,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::X => "X",
            Side::XHat => "X̂",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhiElement {
    pub domain: Side,
    pub codomain: Side,
    pub coeff: BigInt,
}

impl PhiElement {
    pub fn new(domain: Side, codomain: Side, coeff: impl Into<BigInt>) -> Self {
        PhiElement { domain, codomain, coeff: coeff.into() }
    }

    pub fn scalar(side: Side, c: impl Into<BigInt>) -> Self {
        PhiElement::new(side, side, c)
    }

    pub fn identity(side: Side) -> Self {
        PhiElement::scalar(side, 1)
    }

    /// `φ_L : X → X̂`.
    pub fn phi_l() -> Self {
        PhiElement::new(Side::X, Side::XHat, 1)
    }

    /// `φ_L̃ : X̂ → X`.
    pub fn phi_l_tilde() -> Self {
        PhiElement::new(Side::XHat, Side::X, 1)
    }

    pub fn zero(domain: Side, codomain: Side) -> Self {
        PhiElement::new(domain, codomain, 0)
    }

    pub fn is_scalar(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        PhiElement { coeff: &self.coeff * k, ..self.clone() }
    }

    pub fn add(&self, other: &PhiElement) -> Result<PhiElement> {
        if (self.domain, self.codomain) != (other.domain, other.codomain) {
            return Err(Error::TypeMismatch(format!("cannot add {self:?} and {other:?}")));
        }
        Ok(PhiElement { coeff: &self.coeff + &other.coeff, ..self.clone() })
    }
}

impl fmt::Debug for PhiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gen = match (self.domain, self.codomain) {
            (Side::X, Side::X) => "1_X",
            (Side::XHat, Side::XHat) => "1_X̂",
            (Side::X, Side::XHat) => "φ_L",
            (Side::XHat, Side::X) => "φ_L̃",
        };
        if self.coeff.is_one() {
            write!(f, "{gen}")
        } else {
            write!(f, "{}·{gen}", self.coeff)
        }
    }
}

impl fmt::Display for PhiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `p ∘ q` (apply `q` first).
pub fn phi_compose(p: &PhiElement, q: &PhiElement, chi_l: &BigInt) -> Result<PhiElement> {
    if q.codomain != p.domain {
        return Err(Error::TypeMismatch(format!(
            "{p} starts on {} but {q} lands on {}",
            p.domain.name(),
            q.codomain.name()
        )));
    }
    let mut coeff = &p.coeff * &q.coeff;
    // a round trip X → X̂ → X or X̂ → X → X̂ is −χ(L)
    if !p.is_scalar() && !q.is_scalar() {
        coeff *= -chi_l;
    }
    Ok(PhiElement { domain: q.domain, codomain: p.codomain, coeff })
}

/// Endomorphism of `X × X̂`; entry `(i, j)` maps factor `j` to factor `i`
/// with factor 0 = `X`, factor 1 = `X̂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlbaneseMatrix {
    entries: [[PhiElement; 2]; 2],
}

const SIDES: [Side; 2] = [Side::X, Side::XHat];

impl AlbaneseMatrix {
    pub fn new(entries: [[PhiElement; 2]; 2]) -> Result<Self> {
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.domain != SIDES[j] || e.codomain != SIDES[i] {
                    return Err(Error::TypeMismatch(format!(
                        "entry ({i},{j}) must map {} to {}, got {} to {}",
                        SIDES[j].name(),
                        SIDES[i].name(),
                        e.domain.name(),
                        e.codomain.name()
                    )));
                }
            }
        }
        Ok(AlbaneseMatrix { entries })
    }

    /// `[[a, b φ_L̃], [c φ_L, d]]`.
    pub fn from_coeffs(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        AlbaneseMatrix {
            entries: [
                [PhiElement::scalar(Side::X, a), PhiElement::new(Side::XHat, Side::X, b)],
                [PhiElement::new(Side::X, Side::XHat, c), PhiElement::scalar(Side::XHat, d)],
            ],
        }
    }

    pub fn scalar(n: &BigInt) -> Self {
        AlbaneseMatrix::from_coeffs(n.clone(), 0, 0, n.clone())
    }

    pub fn entry(&self, i: usize, j: usize) -> &PhiElement {
        &self.entries[i][j]
    }

    pub fn coeffs(&self) -> [[BigInt; 2]; 2] {
        [
            [self.entries[0][0].coeff.clone(), self.entries[0][1].coeff.clone()],
            [self.entries[1][0].coeff.clone(), self.entries[1][1].coeff.clone()],
        ]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AlbaneseMatrix, chi_l: &BigInt) -> Result<AlbaneseMatrix> {
        let mut out = [
            [PhiElement::zero(Side::X, Side::X), PhiElement::zero(Side::XHat, Side::X)],
            [PhiElement::zero(Side::X, Side::XHat), PhiElement::zero(Side::XHat, Side::XHat)],
        ];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    let t = phi_compose(&self.entries[i][k], &other.entries[k][j], chi_l)?;
                    *cell = cell.add(&t)?;
                }
            }
        }
        Ok(AlbaneseMatrix { entries: out })
    }
}

/// `(x, y) ↦ (−a x + φ_L̃(y), φ_L(x) + r y)`.
pub fn albanese_map_matrix(r: &BigInt, a: &BigInt) -> AlbaneseMatrix {
    AlbaneseMatrix::from_coeffs(-a, 1, 1, r.clone())
}

/// `(x, y) ↦ (r x − φ_L̃(y), −φ_L(x) − a y)`.
pub fn quasi_section_matrix(r: &BigInt, a: &BigInt) -> AlbaneseMatrix {
    AlbaneseMatrix::from_coeffs(r.clone(), -1, -1, -a)
}

/// The product of the two matrices above, reduced.
pub fn quasi_section_product(r: &BigInt, a: &BigInt, chi_l: &BigInt) -> Result<AlbaneseMatrix> {
    albanese_map_matrix(r, a).compose(&quasi_section_matrix(r, a), chi_l)
}

/// Whether the product reduces to `n · 1` with `n = χ(L) − r a`.
pub fn quasi_section_check(r: &BigInt, a: &BigInt, chi_l: &BigInt) -> bool {
    let n = chi_l - r * a;
    quasi_section_product(r, a, chi_l).is_ok_and(|m| m == AlbaneseMatrix::scalar(&n))
}

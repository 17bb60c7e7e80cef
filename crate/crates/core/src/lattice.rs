//! Mukai vectors on abelian and K3 surfaces and the even lattice they live in.
//!
//! Only the algebraic part `H⁰ ⊕ NS ⊕ H⁴` is modelled. A vector is stored as
//! `(r, c1, a)` with `c1` in a fixed NS basis, and the Mukai pairing is
//! `⟨v, w⟩ = (c1, c1') − r a' − r' a`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::gcd_all;
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceKind {
    Abelian,
    K3,
}

impl SurfaceKind {
    /// ε in `v(O_X) = (1, 0, ε)`.
    pub fn euler_todd(self) -> i64 {
        match self {
            SurfaceKind::Abelian => 0,
            SurfaceKind::K3 => 1,
        }
    }

    /// χ(O_X).
    pub fn chi_structure_sheaf(self) -> i64 {
        2 * self.euler_todd()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceKind::Abelian => "abelian",
            SurfaceKind::K3 => "k3",
        }
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abelian" => Ok(SurfaceKind::Abelian),
            "k3" => Ok(SurfaceKind::K3),
            other => Err(Error::InvalidInput(format!("unknown surface kind {other:?}"))),
        }
    }
}

/// A surface with trivial canonical class, seen through its Néron–Severi
/// lattice and a chosen ample class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    kind: SurfaceKind,
    ns_gram: IntMatrix,
    ample_ray: Vec<BigInt>,
}

impl SurfaceModel {
    pub fn new(kind: SurfaceKind, ns_gram: IntMatrix, ample_ray: Vec<BigInt>) -> Result<Self> {
        check_even_gram(&ns_gram)?;
        if ns_gram.rows() == 0 {
            return Err(Error::InvalidGram("NS lattice must have positive rank".into()));
        }
        if ample_ray.len() != ns_gram.rows() {
            return Err(Error::DimensionMismatch { expected: ns_gram.rows(), found: ample_ray.len() });
        }
        let h2 = ns_gram.bilinear(&ample_ray, &ample_ray)?;
        if !h2.is_positive() {
            return Err(Error::InvalidInput(format!("ample class has self-intersection {h2}")));
        }
        Ok(SurfaceModel { kind, ns_gram, ample_ray })
    }

    /// `NS = Z H` with `(H²) = h2`.
    pub fn rank_one(kind: SurfaceKind, h2: i64) -> Result<Self> {
        Self::new(kind, IntMatrix::from_i64(&[&[h2]]), vec![BigInt::one()])
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn ns_gram(&self) -> &IntMatrix {
        &self.ns_gram
    }

    pub fn ample_ray(&self) -> &[BigInt] {
        &self.ample_ray
    }

    pub fn ns_rank(&self) -> usize {
        self.ns_gram.rows()
    }

    pub fn euler_todd(&self) -> BigInt {
        BigInt::from(self.kind.euler_todd())
    }

    /// Same NS lattice and polarisation on a surface of another kind.
    pub fn with_kind(&self, kind: SurfaceKind) -> SurfaceModel {
        SurfaceModel { kind, ..self.clone() }
    }

    /// Intersection form on NS.
    pub fn ns_pair(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        self.check_ns(x)?;
        self.check_ns(y)?;
        self.ns_gram.bilinear(x, y)
    }

    pub fn check_ns(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.ns_rank() {
            return Err(Error::DimensionMismatch { expected: self.ns_rank(), found: x.len() });
        }
        Ok(())
    }

    /// Gram matrix of the Mukai pairing in coordinates `(r, c1, a)`.
    pub fn ambient_gram(&self) -> IntMatrix {
        let n = self.ns_rank() + 2;
        let mut g = IntMatrix::zeros(n, n);
        g[(0, n - 1)] = -BigInt::one();
        g[(n - 1, 0)] = -BigInt::one();
        for i in 0..self.ns_rank() {
            for j in 0..self.ns_rank() {
                g[(i + 1, j + 1)] = self.ns_gram[(i, j)].clone();
            }
        }
        g
    }

    /// Whether the NS lattice has signature `(1, ρ − 1)`.
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.ns_gram.signature(), Ok((1, neg, 0)) if neg + 1 == self.ns_rank())
    }

    pub fn check_vector(&self, v: &MukaiVector) -> Result<()> {
        self.check_ns(&v.c1)
    }
}

pub(crate) fn check_even_gram(g: &IntMatrix) -> Result<()> {
    if !g.is_square() {
        return Err(Error::InvalidGram(format!("Gram matrix is {}x{}", g.rows(), g.cols())));
    }
    if !g.is_symmetric() {
        return Err(Error::InvalidGram("Gram matrix is not symmetric".into()));
    }
    for i in 0..g.rows() {
        if !(&g[(i, i)] % 2u8).is_zero() {
            return Err(Error::InvalidGram(format!("diagonal entry ({i},{i}) = {} is odd", g[(i, i)])));
        }
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c1: Vec<BigInt>,
    pub a: BigInt,
}

impl MukaiVector {
    pub fn new(r: BigInt, c1: Vec<BigInt>, a: BigInt) -> Self {
        MukaiVector { r, c1, a }
    }

    pub fn from_i64(r: i64, c1: &[i64], a: i64) -> Self {
        MukaiVector { r: r.into(), c1: c1.iter().map(|&x| x.into()).collect(), a: a.into() }
    }

    /// The class ω of a point.
    pub fn omega(ns_rank: usize) -> Self {
        MukaiVector { r: BigInt::zero(), c1: vec![BigInt::zero(); ns_rank], a: BigInt::one() }
    }

    /// The fundamental class `1`.
    pub fn one(ns_rank: usize) -> Self {
        MukaiVector { r: BigInt::one(), c1: vec![BigInt::zero(); ns_rank], a: BigInt::zero() }
    }

    /// `v(O_X) = (1, 0, ε)`.
    pub fn structure_sheaf(s: &SurfaceModel) -> Self {
        MukaiVector { a: s.euler_todd(), ..Self::one(s.ns_rank()) }
    }

    pub fn ns_rank(&self) -> usize {
        self.c1.len()
    }

    /// Coordinates `(r, c1_1, ..., c1_ρ, a)`.
    pub fn coords(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.c1.len() + 2);
        out.push(self.r.clone());
        out.extend(self.c1.iter().cloned());
        out.push(self.a.clone());
        out
    }

    pub fn from_coords(x: &[BigInt]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: x.len() });
        }
        let n = x.len();
        Ok(MukaiVector { r: x[0].clone(), c1: x[1..n - 1].to_vec(), a: x[n - 1].clone() })
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.a.is_zero() && self.c1.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        MukaiVector { r: &self.r * k, c1: self.c1.iter().map(|x| x * k).collect(), a: &self.a * k }
    }

    /// gcd of every coordinate, the largest `m` with `v ∈ m·Λ`.
    pub fn content(&self) -> BigInt {
        gcd_all(std::iter::once(&self.r).chain(&self.c1).chain(std::iter::once(&self.a)))
    }
}

impl std::ops::Add for &MukaiVector {
    type Output = MukaiVector;
    fn add(self, o: &MukaiVector) -> MukaiVector {
        MukaiVector {
            r: &self.r + &o.r,
            c1: self.c1.iter().zip(&o.c1).map(|(x, y)| x + y).collect(),
            a: &self.a + &o.a,
        }
    }
}

impl std::ops::Sub for &MukaiVector {
    type Output = MukaiVector;
    fn sub(self, o: &MukaiVector) -> MukaiVector {
        self + &(-o)
    }
}

impl std::ops::Neg for &MukaiVector {
    type Output = MukaiVector;
    fn neg(self) -> MukaiVector {
        MukaiVector { r: -&self.r, c1: self.c1.iter().map(|x| -x).collect(), a: -&self.a }
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c1: Vec<String> = self.c1.iter().map(ToString::to_string).collect();
        write!(f, "({}, [{}], {})", self.r, c1.join(", "), self.a)
    }
}

impl fmt::Debug for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Decides which NS classes count as effective.
pub trait EffectivityOracle: Sync {
    fn is_effective(&self, d: &[BigInt], s: &SurfaceModel) -> bool;

    /// A lower bound for `(D²)` over every nonzero class the oracle accepts.
    fn min_square(&self, s: &SurfaceModel) -> BigInt;
}

/// Riemann–Roch style default: on an abelian surface a nonzero class is
/// effective when `(D²) ≥ 0` and `(D, H) > 0`; on a K3 surface the square
/// bound drops to −2.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultEffectivity;

impl EffectivityOracle for DefaultEffectivity {
    fn is_effective(&self, d: &[BigInt], s: &SurfaceModel) -> bool {
        if d.iter().all(Zero::is_zero) {
            return s.kind() == SurfaceKind::Abelian;
        }
        let (Ok(d2), Ok(dh)) = (s.ns_pair(d, d), s.ns_pair(d, s.ample_ray())) else {
            return false;
        };
        dh.is_positive() && d2 >= self.min_square(s)
    }

    fn min_square(&self, s: &SurfaceModel) -> BigInt {
        match s.kind() {
            SurfaceKind::Abelian => BigInt::zero(),
            SurfaceKind::K3 => BigInt::from(-2),
        }
    }
}

pub fn mukai_pair(v: &MukaiVector, w: &MukaiVector, s: &SurfaceModel) -> Result<BigInt> {
    s.check_vector(v)?;
    s.check_vector(w)?;
    let cc = s.ns_gram().bilinear(&v.c1, &w.c1)?;
    Ok(cc - &v.r * &w.a - &w.r * &v.a)
}

/// `⟨v²⟩`.
pub fn mukai_square(v: &MukaiVector, s: &SurfaceModel) -> Result<BigInt> {
    mukai_pair(v, v, s)
}

pub fn mukai_dual(v: &MukaiVector) -> MukaiVector {
    MukaiVector { r: v.r.clone(), c1: v.c1.iter().map(|x| -x).collect(), a: v.a.clone() }
}

/// ℓ(v) = gcd(r, c1).
pub fn divisibility(v: &MukaiVector) -> BigInt {
    gcd_all(std::iter::once(&v.r).chain(&v.c1))
}

pub fn is_primitive(v: &MukaiVector) -> bool {
    v.content().is_one()
}

pub fn is_positive(v: &MukaiVector, s: &SurfaceModel, eff: &dyn EffectivityOracle) -> Result<bool> {
    s.check_vector(v)?;
    if s.kind() != SurfaceKind::Abelian {
        return Err(Error::UndefinedForK3);
    }
    if v.r.is_positive() {
        return Ok(true);
    }
    if !v.r.is_zero() {
        return Ok(false);
    }
    let c1_zero = v.c1.iter().all(Zero::is_zero);
    if c1_zero {
        return Ok(v.a.is_negative());
    }
    Ok(eff.is_effective(&v.c1, s) && !v.a.is_zero())
}

/// Multiplication by `ch(L)`.
pub fn twist(v: &MukaiVector, l: &[BigInt], s: &SurfaceModel) -> Result<MukaiVector> {
    s.check_vector(v)?;
    let l2 = s.ns_pair(l, l)?;
    let c1l = s.ns_pair(&v.c1, l)?;
    Ok(MukaiVector {
        r: v.r.clone(),
        c1: v.c1.iter().zip(l).map(|(c, x)| c + &v.r * x).collect(),
        a: &v.a + c1l + &v.r * l2 / 2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuliDimension {
    pub dim: BigInt,
    /// Dimension of the albanese fibre, abelian surfaces only.
    pub fiber_dim: Option<BigInt>,
}

pub fn moduli_dim(v: &MukaiVector, s: &SurfaceModel) -> Result<ModuliDimension> {
    let sq = mukai_square(v, s)?;
    let fiber_dim = (s.kind() == SurfaceKind::Abelian).then(|| &sq - 2);
    Ok(ModuliDimension { dim: sq + 2, fiber_dim })
}

pub fn bogomolov_discriminant(v: &MukaiVector, s: &SurfaceModel) -> Result<BigRational> {
    if !v.r.is_positive() {
        return Err(Error::precondition("discriminant needs positive rank"));
    }
    let sq = mukai_square(v, s)?;
    Ok(BigRational::new(sq, BigInt::from(2) * &v.r))
}

/// An even lattice given by a Gram matrix, optionally with a basis inside
/// the Mukai lattice of some surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGram {
    gram: IntMatrix,
    basis: Option<Vec<MukaiVector>>,
}

impl LatticeGram {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        check_even_gram(&gram)?;
        Ok(LatticeGram { gram, basis: None })
    }

    /// Gram computed from the Mukai pairing of `basis`.
    pub fn from_basis(basis: Vec<MukaiVector>, s: &SurfaceModel) -> Result<Self> {
        let n = basis.len();
        let mut gram = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let p = mukai_pair(&basis[i], &basis[j], s)?;
                gram[(i, j)] = p.clone();
                gram[(j, i)] = p;
            }
        }
        check_even_gram(&gram)?;
        Ok(LatticeGram { gram, basis: Some(basis) })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn basis(&self) -> Option<&[MukaiVector]> {
        self.basis.as_deref()
    }

    pub fn discriminant(&self) -> BigInt {
        self.gram.det().expect("square Gram")
    }

    pub fn quadratic_form(&self, x: &[BigInt]) -> Result<BigInt> {
        self.gram.bilinear(x, x)
    }

    /// Integer coordinates of `x` in the ambient basis, if `x` lies in the
    /// lattice.
    pub fn coordinates_of(&self, x: &MukaiVector) -> Option<Vec<BigInt>> {
        let basis = self.basis.as_ref()?;
        let cols: Vec<Vec<BigInt>> = basis.iter().map(MukaiVector::coords).collect();
        let m = IntMatrix::from_columns(&cols).ok()?;
        let sol = m.solve_rational(&x.coords())?;
        sol.into_iter().map(|q| q.is_integer().then(|| q.to_integer())).collect()
    }

    /// Expresses `vectors` in this lattice's basis. Succeeds only when they
    /// form a basis of the same lattice, in which case the returned matrix
    /// `P` (rows = coordinates) is unimodular.
    pub fn change_of_basis(&self, vectors: &[MukaiVector]) -> Option<IntMatrix> {
        if vectors.len() != self.rank() {
            return None;
        }
        let rows = vectors.iter().map(|v| self.coordinates_of(v)).collect::<Option<Vec<_>>>()?;
        let p = IntMatrix::from_rows(rows).ok()?;
        let det = p.det().ok()?;
        (det.abs().is_one()).then_some(p)
    }
}

/// `v^⊥` inside `H⁰ ⊕ NS ⊕ H⁴`, with a Hermite-reduced basis.
pub fn perp_basis(v: &MukaiVector, s: &SurfaceModel) -> Result<LatticeGram> {
    s.check_vector(v)?;
    if v.is_zero() {
        return Err(Error::InvalidInput("orthogonal complement of the zero vector".into()));
    }
    let form = s.ambient_gram().mul_vec(&v.coords())?;
    let row = IntMatrix::from_rows(vec![form])?;
    let kernel = row.integer_kernel();
    let basis = (0..kernel.rows()).map(|i| MukaiVector::from_coords(kernel.row(i))).collect::<Result<Vec<_>>>()?;
    LatticeGram::from_basis(basis, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian(h2: i64) -> SurfaceModel {
        SurfaceModel::rank_one(SurfaceKind::Abelian, h2).unwrap()
    }

    fn k3(h2: i64) -> SurfaceModel {
        SurfaceModel::rank_one(SurfaceKind::K3, h2).unwrap()
    }

    fn mv(r: i64, c: &[i64], a: i64) -> MukaiVector {
        MukaiVector::from_i64(r, c, a)
    }

    #[test]
    fn pairing_examples() {
        let v = mv(2, &[1], -2);
        assert_eq!(mukai_pair(&v, &v, &abelian(2)).unwrap(), 10.into());
        let w = mv(0, &[0], 1);
        assert_eq!(mukai_pair(&w, &w, &abelian(2)).unwrap(), 0.into());
        let s = k3(12);
        assert_eq!(mukai_pair(&mv(1, &[1], 3), &mv(2, &[-1], 3), &s).unwrap(), (-21).into());
    }

    #[test]
    fn pairing_dimension_mismatch() {
        let err = mukai_pair(&mv(1, &[1, 0], 0), &mv(1, &[1], 0), &abelian(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(mukai_dual(&mv(2, &[1], 3)), mv(2, &[-1], 3));
        assert_eq!(mukai_dual(&mv(0, &[0], 5)), mv(0, &[0], 5));
    }

    #[test]
    fn divisibility_examples() {
        assert_eq!(divisibility(&mv(2, &[1], -2)), 1.into());
        assert_eq!(divisibility(&mv(4, &[2, 6], 7)), 2.into());
        assert_eq!(divisibility(&mv(0, &[0], -3)), 0.into());
    }

    #[test]
    fn positivity() {
        let s = abelian(2);
        let eff = DefaultEffectivity;
        assert!(is_positive(&mv(0, &[1], 3), &s, &eff).unwrap());
        assert!(is_positive(&mv(1, &[0], 0), &s, &eff).unwrap());
        assert!(!is_positive(&mv(0, &[0], 1), &s, &eff).unwrap());
        assert!(is_positive(&mv(0, &[0], -1), &s, &eff).unwrap());
        assert!(!is_positive(&mv(0, &[1], 0), &s, &eff).unwrap());
        assert!(!is_positive(&mv(-1, &[1], 0), &s, &eff).unwrap());
        assert_eq!(is_positive(&mv(1, &[0], 0), &k3(2), &eff), Err(Error::UndefinedForK3));
    }

    #[test]
    fn twist_examples() {
        for m in 1..5 {
            for n in -3..4 {
                let s = abelian(2 * m);
                let t = twist(&mv(1, &[0], -n), &[1.into()], &s).unwrap();
                assert_eq!(t, mv(1, &[1], -n + m));
            }
        }
        let s = abelian(4);
        let v = mv(3, &[2], -1);
        assert_eq!(twist(&v, &[0.into()], &s).unwrap(), v);
    }

    #[test]
    fn dimensions() {
        let d = moduli_dim(&mv(2, &[1], -2), &abelian(2)).unwrap();
        assert_eq!(d.dim, 12.into());
        assert_eq!(d.fiber_dim, Some(8.into()));
        let d = moduli_dim(&mv(1, &[1], 3), &k3(12)).unwrap();
        assert_eq!(d.dim, 8.into());
        assert_eq!(d.fiber_dim, None);
        // isotropic
        assert_eq!(moduli_dim(&mv(2, &[1], 1), &abelian(4)).unwrap().dim, 2.into());
    }

    #[test]
    fn discriminant() {
        let s = abelian(2);
        assert_eq!(bogomolov_discriminant(&mv(2, &[1], -2), &s).unwrap(), BigRational::new(5.into(), 2.into()));
        assert!(bogomolov_discriminant(&mv(2, &[1], 1), &abelian(4)).unwrap().is_zero());
        assert_eq!(bogomolov_discriminant(&mv(1, &[0], 1), &s).unwrap(), BigRational::from_integer((-1).into()));
        assert!(matches!(bogomolov_discriminant(&mv(0, &[1], 1), &s), Err(Error::Precondition(_))));
    }

    #[test]
    fn perp_of_rank_two_example() {
        let s = abelian(2);
        let p = perp_basis(&mv(2, &[1], -2), &s).unwrap();
        assert_eq!(p.gram(), &IntMatrix::from_i64(&[&[-2, -1], &[-1, 2]]));
        assert_eq!(p.basis().unwrap(), &[mv(1, &[0], 1), mv(0, &[1], 1)]);
    }

    #[test]
    fn perp_of_zero_rejected() {
        assert!(perp_basis(&mv(0, &[0], 0), &abelian(2)).is_err());
    }

    #[test]
    fn odd_gram_rejected() {
        let e = SurfaceModel::new(SurfaceKind::Abelian, IntMatrix::from_i64(&[&[3]]), vec![1.into()]);
        assert!(matches!(e, Err(Error::InvalidGram(_))));
        let e = SurfaceModel::new(SurfaceKind::Abelian, IntMatrix::from_i64(&[&[-2]]), vec![1.into()]);
        assert!(matches!(e, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn riemann_roch_sign() {
        for s in [abelian(6), k3(6)] {
            let o = MukaiVector::structure_sheaf(&s);
            for (r, d, a) in [(1, 2, -3), (0, 1, 4), (3, -1, 0)] {
                let w = mv(r, &[d], a);
                let lhs = -mukai_pair(&o, &w, &s).unwrap();
                assert_eq!(lhs, &w.a + s.euler_todd() * &w.r);
            }
        }
    }
}

//! Integral isometries of Mukai lattices induced by Fourier–Mukai functors,
//! dualisation and twists, plus the two transforms that only make sense on
//! restricted families of vectors (the relative transform of an elliptic
//! surface and the reflection-dual attached to an isotropic vector).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::ext_gcd;
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::lattice::{divisibility, is_primitive, mukai_dual, mukai_square, MukaiVector, SurfaceKind, SurfaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapLabel {
    PoincareF,
    PoincareG,
    IsotropicF,
    IsotropicG,
    EllipticF,
    ReflectionDual,
    Dual,
    Twist,
    Composite,
}

impl MapLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MapLabel::PoincareF => "poincare-f",
            MapLabel::PoincareG => "poincare-g",
            MapLabel::IsotropicF => "isotropic-f",
            MapLabel::IsotropicG => "isotropic-g",
            MapLabel::EllipticF => "elliptic-f",
            MapLabel::ReflectionDual => "reflection-dual",
            MapLabel::Dual => "dual",
            MapLabel::Twist => "twist",
            MapLabel::Composite => "composite",
        }
    }
}

/// An integer matrix `M` with `Mᵀ G_target M = G_source`, acting on column
/// coordinates `(r, c1, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryMap {
    source: SurfaceModel,
    target: SurfaceModel,
    matrix: IntMatrix,
    label: MapLabel,
    inverted: bool,
}

impl IsometryMap {
    pub fn new(source: SurfaceModel, target: SurfaceModel, matrix: IntMatrix, label: MapLabel) -> Result<Self> {
        let (n, m) = (source.ns_rank() + 2, target.ns_rank() + 2);
        if matrix.rows() != m || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: m * n, found: matrix.rows() * matrix.cols() });
        }
        let map = IsometryMap { source, target, matrix, label, inverted: false };
        if !map.is_isometry() {
            return Err(Error::Invariant(format!("{} matrix {:?} is not an isometry", label.as_str(), map.matrix)));
        }
        Ok(map)
    }

    pub fn source(&self) -> &SurfaceModel {
        &self.source
    }

    pub fn target(&self) -> &SurfaceModel {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn label(&self) -> MapLabel {
        self.label
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    pub fn is_isometry(&self) -> bool {
        let lhs = self.matrix.transpose().mul(&self.target.ambient_gram()).and_then(|x| x.mul(&self.matrix));
        matches!(lhs, Ok(g) if g == self.source.ambient_gram())
    }

    pub fn apply(&self, v: &MukaiVector) -> Result<MukaiVector> {
        self.source.check_vector(v)?;
        MukaiVector::from_coords(&self.matrix.mul_vec(&v.coords())?)
    }

    /// The map `F̂` with `⟨F x, y⟩ = ⟨x, F̂ y⟩`, i.e. `G_s⁻¹ Mᵀ G_t`. For an
    /// isometry onto the target lattice it is the inverse.
    pub fn adjoint(&self) -> Result<IsometryMap> {
        let gs_inv = self
            .source
            .ambient_gram()
            .rational_inverse()
            .ok_or_else(|| Error::Invariant("degenerate source lattice".into()))?;
        let mt_gt = self.matrix.transpose().mul(&self.target.ambient_gram())?;
        let n = gs_inv.len();
        let mut rows = Vec::with_capacity(n);
        for row in &gs_inv {
            let mut out = Vec::with_capacity(mt_gt.cols());
            for j in 0..mt_gt.cols() {
                let mut acc = BigRational::zero();
                for (k, x) in row.iter().enumerate() {
                    acc += x * BigRational::from_integer(mt_gt[(k, j)].clone());
                }
                if !acc.is_integer() {
                    return Err(Error::precondition(format!(
                        "{} is not surjective onto the target lattice",
                        self.label.as_str()
                    )));
                }
                out.push(acc.to_integer());
            }
            rows.push(out);
        }
        Ok(IsometryMap {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: IntMatrix::from_rows(rows)?,
            label: self.label,
            inverted: !self.inverted,
        })
    }

    pub fn inverse(&self) -> Result<IsometryMap> {
        let inv = self.adjoint()?;
        let id = inv.matrix.mul(&self.matrix)?;
        if id != IntMatrix::identity(self.matrix.cols()) {
            return Err(Error::Invariant("adjoint is not a two-sided inverse".into()));
        }
        Ok(inv)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &IsometryMap) -> Result<IsometryMap> {
        if other.source.ns_gram() != self.target.ns_gram() {
            return Err(Error::TypeMismatch("composition of maps with different middle lattices".into()));
        }
        IsometryMap::new(
            self.source.clone(),
            other.target.clone(),
            other.matrix.mul(&self.matrix)?,
            MapLabel::Composite,
        )
    }
}

pub fn dual_map(s: &SurfaceModel) -> IsometryMap {
    let n = s.ns_rank() + 2;
    let mut m = IntMatrix::identity(n);
    for i in 1..n - 1 {
        m[(i, i)] = -BigInt::one();
    }
    IsometryMap::new(s.clone(), s.clone(), m, MapLabel::Dual).expect("dual is an isometry")
}

/// Matrix of multiplication by `ch(L)`.
pub fn twist_map(s: &SurfaceModel, l: &[BigInt]) -> Result<IsometryMap> {
    s.check_ns(l)?;
    let rho = s.ns_rank();
    let n = rho + 2;
    let gl = s.ns_gram().mul_vec(l)?;
    let l2 = s.ns_pair(l, l)?;
    let mut m = IntMatrix::identity(n);
    for i in 0..rho {
        m[(i + 1, 0)] = l[i].clone();
        m[(n - 1, i + 1)] = gl[i].clone();
    }
    m[(n - 1, 0)] = l2 / 2;
    IsometryMap::new(s.clone(), s.clone(), m, MapLabel::Twist)
}

fn require_abelian_rank_one(s: &SurfaceModel) -> Result<()> {
    if s.kind() != SurfaceKind::Abelian || s.ns_rank() != 1 {
        return Err(Error::precondition("the Poincaré transform needs an abelian surface with NS of rank 1"));
    }
    Ok(())
}

/// `(r, [d], a) ↦ (a, [−d], r)` on an abelian surface with `NS = Z H`.
pub fn poincare_f_map(s: &SurfaceModel) -> Result<IsometryMap> {
    require_abelian_rank_one(s)?;
    let m = IntMatrix::from_i64(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]);
    IsometryMap::new(s.clone(), s.clone(), m, MapLabel::PoincareF)
}

/// Dual composed with the Poincaré transform: `(r, [d], a) ↦ (a, [d], r)`.
pub fn poincare_g_map(s: &SurfaceModel) -> Result<IsometryMap> {
    require_abelian_rank_one(s)?;
    let m = IntMatrix::from_i64(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
    IsometryMap::new(s.clone(), s.clone(), m, MapLabel::PoincareG)
}

pub fn poincare_fm(v: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    poincare_f_map(s)?.apply(v)
}

pub fn poincare_g(v: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    poincare_g_map(s)?.apply(v)
}

/// Data of a rank-`r0` isotropic vector `v0 = (r0, [d0], d0² k)` on a
/// surface with `NS = Z H`, `(H²) = 2 r0 k`, together with a Bézout pair
/// `d1 (k d0) − l r0 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsotropicFmParams {
    pub r0: BigInt,
    pub d0: BigInt,
    pub k: BigInt,
    pub d1: BigInt,
    pub l: BigInt,
}

impl IsotropicFmParams {
    /// Normalised Bézout pair: `0 ≤ d1 < r0`.
    pub fn new(r0: BigInt, d0: BigInt, k: BigInt) -> Result<Self> {
        check_coprime(&r0, &d0, &k)?;
        let kd0 = &k * &d0;
        let (g, x, y) = ext_gcd(&kd0, &r0);
        debug_assert!(g.is_one());
        // kd0 x + r0 y = 1, so d1 = x, l = -y; shift into 0 ≤ d1 < r0
        let t = x.div_floor(&r0);
        let d1 = &x - &t * &r0;
        let l = -y - &t * &kd0;
        Self::with_bezout(r0, d0, k, d1, l)
    }

    pub fn with_bezout(r0: BigInt, d0: BigInt, k: BigInt, d1: BigInt, l: BigInt) -> Result<Self> {
        check_coprime(&r0, &d0, &k)?;
        if &d1 * &k * &d0 - &l * &r0 != BigInt::one() {
            return Err(Error::precondition(format!("d1 k d0 - l r0 = 1 fails for (d1, l) = ({d1}, {l})")));
        }
        Ok(IsotropicFmParams { r0, d0, k, d1, l })
    }

    pub fn from_i64(r0: i64, d0: i64, k: i64) -> Result<Self> {
        Self::new(r0.into(), d0.into(), k.into())
    }

    /// `(H²) = 2 r0 k`.
    pub fn h_square(&self) -> BigInt {
        BigInt::from(2) * &self.r0 * &self.k
    }

    pub fn surface(&self, kind: SurfaceKind) -> SurfaceModel {
        SurfaceModel::new(kind, IntMatrix::from_rows(vec![vec![self.h_square()]]).unwrap(), vec![BigInt::one()])
            .expect("positive (H²)")
    }

    pub fn v0(&self) -> MukaiVector {
        MukaiVector::new(self.r0.clone(), vec![self.d0.clone()], &self.d0 * &self.d0 * &self.k)
    }

    /// Image of ω; the Mukai vector of the kernel restricted to `X × {y}`.
    pub fn w0(&self) -> MukaiVector {
        MukaiVector::new(self.r0.clone(), vec![self.d1.clone()], &self.d1 * &self.d1 * &self.k)
    }
}

fn check_coprime(r0: &BigInt, d0: &BigInt, k: &BigInt) -> Result<()> {
    if !r0.is_positive() || !k.is_positive() {
        return Err(Error::precondition("isotropic transform needs r0 > 0 and k > 0"));
    }
    if !r0.gcd(d0).is_one() || !r0.gcd(k).is_one() {
        return Err(Error::precondition(format!("gcd(r0, d0) = gcd(r0, k) = 1 fails for ({r0}, {d0}, {k})")));
    }
    Ok(())
}

/// Cohomological transform attached to the universal family of the
/// isotropic vector `v0`, as a 3×3 matrix with columns `F(1), F(H), F(ω)`.
pub fn isotropic_fm(params: &IsotropicFmParams, kind: SurfaceKind) -> Result<IsometryMap> {
    let IsotropicFmParams { r0, d0, k, d1, l } = params;
    let two = BigInt::from(2);
    let f1 = vec![d0 * d0 * k, d0 * l, l * l * r0];
    let fh = vec![&two * d0 * k * r0, &two * d0 * k * d1 - 1, &two * d0 * k * k * d1 * d1 - &two * d1 * k];
    let fw = vec![r0.clone(), d1.clone(), d1 * d1 * k];
    let s = params.surface(kind);
    IsometryMap::new(s.clone(), s, IntMatrix::from_columns(&[f1, fh, fw])?, MapLabel::IsotropicF)
}

/// Dual composed with [`isotropic_fm`].
pub fn isotropic_g(params: &IsotropicFmParams, kind: SurfaceKind) -> Result<IsometryMap> {
    let f = isotropic_fm(params, kind)?;
    let g = f.then(&dual_map(f.target()))?;
    Ok(IsometryMap { label: MapLabel::IsotropicG, ..g })
}

/// `(r(G) c1(v) − r(v) c1(G), H)`.
pub fn twisted_degree(v: &MukaiVector, g: &MukaiVector, s: &SurfaceModel) -> Result<BigInt> {
    s.check_vector(v)?;
    s.check_vector(g)?;
    if !g.r.is_positive() {
        return Err(Error::precondition("twisted degree needs a reference class of positive rank"));
    }
    let x: Vec<BigInt> = v.c1.iter().zip(&g.c1).map(|(cv, cg)| &g.r * cv - &v.r * cg).collect();
    s.ns_pair(&x, s.ample_ray())
}

/// An elliptic surface `X → C` with section σ, fibre class f and a second
/// section τ of the same self-intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticFibration {
    surface: SurfaceModel,
    sigma: Vec<BigInt>,
    fiber: Vec<BigInt>,
    tau: Vec<BigInt>,
    d_tau: BigInt,
}

/// A class written as `(rank, c1, χ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SheafTriple {
    pub rank: BigInt,
    pub c1: Vec<BigInt>,
    pub chi: BigInt,
}

impl SheafTriple {
    /// `χ = a + ε r`.
    pub fn from_mukai(v: &MukaiVector, s: &SurfaceModel) -> Self {
        SheafTriple { rank: v.r.clone(), c1: v.c1.clone(), chi: &v.a + s.euler_todd() * &v.r }
    }

    pub fn to_mukai(&self, s: &SurfaceModel) -> MukaiVector {
        MukaiVector::new(self.rank.clone(), self.c1.clone(), &self.chi - s.euler_todd() * &self.rank)
    }
}

/// Output of the elliptic transform: the image triple and the sign the
/// transform carries on cohomology (the theorem's image is `sign · triple`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticImage {
    pub triple: SheafTriple,
    pub sign: i8,
}

/// Parameters `(r, l, n)` of a source class of the elliptic transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticData<T = i64> {
    pub r: T,
    pub l: T,
    pub n: T,
}

impl EllipticFibration {
    pub fn new(surface: SurfaceModel, sigma: Vec<BigInt>, fiber: Vec<BigInt>, tau: Vec<BigInt>) -> Result<Self> {
        let p = |x: &[BigInt], y: &[BigInt]| surface.ns_pair(x, y);
        if !p(&fiber, &fiber)?.is_zero() {
            return Err(Error::precondition("fibre class must be isotropic"));
        }
        if !p(&sigma, &fiber)?.is_one() || !p(&tau, &fiber)?.is_one() {
            return Err(Error::precondition("sections must meet the fibre once"));
        }
        let s2 = p(&sigma, &sigma)?;
        let chi_o = BigInt::from(surface.kind().chi_structure_sheaf());
        if s2 != -&chi_o {
            return Err(Error::precondition(format!("a section has (σ²) = −χ(O) = {}, got {s2}", -chi_o)));
        }
        if p(&tau, &tau)? != s2 {
            return Err(Error::precondition("both sections need the same self-intersection"));
        }
        let d_tau = p(&tau, &sigma)? - &s2;
        if d_tau.is_negative() {
            return Err(Error::precondition(format!("section offset d(τ) = {d_tau} is negative")));
        }
        Ok(EllipticFibration { surface, sigma, fiber, tau, d_tau })
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn sigma(&self) -> &[BigInt] {
        &self.sigma
    }

    pub fn fiber(&self) -> &[BigInt] {
        &self.fiber
    }

    pub fn tau(&self) -> &[BigInt] {
        &self.tau
    }

    pub fn d_tau(&self) -> &BigInt {
        &self.d_tau
    }

    pub fn chi_o(&self) -> BigInt {
        BigInt::from(self.surface.kind().chi_structure_sheaf())
    }

    fn combo(&self, cs: BigInt, ct: BigInt, cf: BigInt) -> Vec<BigInt> {
        (0..self.sigma.len()).map(|i| &cs * &self.sigma[i] + &ct * &self.tau[i] + &cf * &self.fiber[i]).collect()
    }

    /// `(r, σ − τ + (l + d(τ)) f, r χ(O) − n)`.
    pub fn source_triple(&self, d: &EllipticData<BigInt>) -> SheafTriple {
        SheafTriple {
            rank: d.r.clone(),
            c1: self.combo(BigInt::one(), -BigInt::one(), &d.l + &self.d_tau),
            chi: &d.r * self.chi_o() - &d.n,
        }
    }

    /// Recovers `(r, l, n)` from a triple of the source family.
    pub fn source_data(&self, t: &SheafTriple) -> Option<EllipticData<BigInt>> {
        let x: Vec<BigInt> = (0..self.sigma.len()).map(|i| &t.c1[i] - &self.sigma[i] + &self.tau[i]).collect();
        // x = (l + d) f and (f, σ) = 1
        let coeff = self.surface.ns_pair(&x, &self.sigma).ok()?;
        let d = EllipticData { r: t.rank.clone(), l: &coeff - &self.d_tau, n: &t.rank * self.chi_o() - &t.chi };
        (self.source_triple(&d) == *t).then_some(d)
    }
}

/// The relative transform on `(rank, c1, χ)` triples:
/// `(r, σ − τ + (l + d) f, r χ(O) − n) ↦ −(0, τ − σ + r σ + (n − d) f, r + l)`.
pub fn elliptic_fm(d: &EllipticData<BigInt>, fib: &EllipticFibration) -> Result<EllipticImage> {
    if !d.r.is_positive() {
        return Err(Error::precondition("elliptic transform needs r > 0"));
    }
    if !(&d.r + &d.l).is_positive() {
        return Err(Error::precondition("elliptic transform needs r + l > 0"));
    }
    let c1 = fib.combo(&d.r - 1, BigInt::one(), &d.n - fib.d_tau());
    Ok(EllipticImage { triple: SheafTriple { rank: BigInt::zero(), c1, chi: &d.r + &d.l }, sign: -1 })
}

/// Inverse of [`elliptic_fm`] on its image.
pub fn elliptic_fm_inverse(t: &SheafTriple, fib: &EllipticFibration) -> Result<EllipticData<BigInt>> {
    if !t.rank.is_zero() {
        return Err(Error::precondition("image of the elliptic transform has rank 0"));
    }
    let s = fib.surface();
    let r = s.ns_pair(&t.c1, fib.fiber())?;
    let x: Vec<BigInt> = (0..t.c1.len()).map(|i| &t.c1[i] - &fib.tau()[i] + &fib.sigma()[i]).collect();
    // x = r σ + (n − d) f
    let xs = s.ns_pair(&x, fib.sigma())?;
    let s2 = s.ns_pair(fib.sigma(), fib.sigma())?;
    let n = xs - &r * s2 + fib.d_tau();
    let data = EllipticData { l: &t.chi - &r, r, n };
    let back = elliptic_fm(&data, fib)?;
    if back.triple != *t {
        return Err(Error::precondition("class is not in the image of the elliptic transform"));
    }
    Ok(data)
}

/// Result of writing `v = l v1 − a ω` and sending it to `a w1 − l ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionImage {
    pub l: BigRational,
    pub a: BigRational,
    /// `a w1 − l ω`; the lattice image of `v` is its negative.
    pub target: MukaiVector,
    pub applicable: bool,
    pub sign: i8,
}

pub fn reflection_dual(
    v: &MukaiVector,
    v1: &MukaiVector,
    w1: &MukaiVector,
    s: &SurfaceModel,
) -> Result<ReflectionImage> {
    for x in [v, v1, w1] {
        s.check_vector(x)?;
    }
    if !v1.r.is_positive() || !is_primitive(v1) || !mukai_square(v1, s)?.is_zero() {
        return Err(Error::precondition("v1 must be primitive, isotropic and of positive rank"));
    }
    if w1.r != v1.r || !mukai_square(w1, s)?.is_zero() {
        return Err(Error::precondition("w1 must be isotropic of the same rank as v1"));
    }
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let l = BigRational::new(v.r.clone(), v1.r.clone());
    if v.c1.iter().zip(&v1.c1).any(|(c, c1)| q(c) != &l * q(c1)) {
        return Err(Error::InvalidInput(format!("{v} is not in the span of {v1} and ω")));
    }
    let a = &l * q(&v1.a) - q(&v.a);
    let den = q(&divisibility(v1));
    if !(&l * &den).is_integer() || !(&a * &den).is_integer() {
        return Err(Error::InvalidInput("coefficients have denominators not dividing ℓ(v1)".into()));
    }
    let coords: Option<Vec<BigInt>> = w1
        .coords()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut y = &a * q(x);
            if i == w1.ns_rank() + 1 {
                y -= &l;
            }
            y.is_integer().then(|| y.to_integer())
        })
        .collect();
    let target = coords
        .map(|c| MukaiVector::from_coords(&c))
        .transpose()?
        .ok_or_else(|| Error::precondition("reflected class is not integral"))?;
    let applicable = l.is_positive() && a.is_positive();
    Ok(ReflectionImage { l, a, target, applicable, sign: -1 })
}

/// The primitive isotropic `v1` with `(r(v1), c1(v1))` a positive multiple of
/// the primitive part of `(r, c1)`, for `r > 0`.
pub fn isotropic_on_ray(v: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    if !v.r.is_positive() {
        return Err(Error::precondition("ray needs positive rank"));
    }
    let ell = divisibility(v);
    let r0 = &v.r / &ell;
    let xi0: Vec<BigInt> = v.c1.iter().map(|c| c / &ell).collect();
    let xi2 = s.ns_pair(&xi0, &xi0)?;
    let two_r0 = BigInt::from(2) * &r0;
    let m = &two_r0 / xi2.gcd(&two_r0);
    let a1 = &m * &xi2 / &two_r0;
    Ok(MukaiVector::new(&m * &r0, xi0.iter().map(|x| &m * x).collect(), a1))
}

/// Convenience: `v^∨` of the isotropic vector on the ray of `v`.
pub fn dual_isotropic_on_ray(v: &MukaiVector, s: &SurfaceModel) -> Result<MukaiVector> {
    Ok(mukai_dual(&isotropic_on_ray(v, s)?))
}

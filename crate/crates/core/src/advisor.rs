//! Which isomorphism, birationality and deformation statements apply to a
//! Mukai vector, and what they send it to.
//!
//! Every verdict lists the conditions it checked; a verdict is applicable
//! exactly when all of them hold. Hypotheses that cannot be decided from
//! lattice data (stability of the universal family, genericity of the
//! polarisation) appear as conditions that are either automatic or taken
//! from [`ClassifyContext`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fm::{
    elliptic_fm, isotropic_fm, isotropic_on_ray, poincare_fm, poincare_g, reflection_dual, EllipticFibration,
    IsotropicFmParams, SheafTriple,
};
use crate::lattice::{
    divisibility, is_positive, is_primitive, mukai_dual, mukai_pair, mukai_square, DefaultEffectivity, MukaiVector,
    SurfaceKind, SurfaceModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoremId {
    /// `G` sends `(r, H, a)`, `r, a > 0`, to `(a, Ĥ, r)`.
    PoincareDualIso,
    /// `IT₀` for `F` when `a > ⟨v²⟩/2`.
    PoincareOpenImmersion,
    /// `WIT₂` for `F̂` on locally free `(r, −Ĥ, a)`, `a > 0`.
    PoincareDualOpenImmersion,
    /// `WIT₁` for `F` on `(r, H, a)`, `a < 0`.
    PoincareNegativeIso,
    /// Relative transform of an elliptic surface onto rank-0 sheaves.
    EllipticRelativeIso,
    /// `F` birational for `a ≤ 0 < d`.
    PoincareBirationalNegative,
    /// `G` birational for `d = 0` or `0 < a ≤ 4`.
    PoincareBirationalPositive,
    /// `G_E` for the transform attached to an isotropic vector.
    IsotropicFmDualIso,
    /// `F_E` for the transform attached to an isotropic vector.
    IsotropicFmNegativeIso,
    /// Reflection in a (−2)-vector on a K3 surface.
    K3ReflectionIso,
    /// Reflection in a primitive isotropic vector on the ray of `v`.
    IsotropicReflectionIso,
    AbelianDeformation,
    K3Deformation,
    /// Picard rank one, nothing proven: `±F(v)` or `±G(v)` expected.
    PoincareConjecture,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::PoincareDualIso,
        TheoremId::PoincareOpenImmersion,
        TheoremId::PoincareDualOpenImmersion,
        TheoremId::PoincareNegativeIso,
        TheoremId::EllipticRelativeIso,
        TheoremId::PoincareBirationalNegative,
        TheoremId::PoincareBirationalPositive,
        TheoremId::IsotropicFmDualIso,
        TheoremId::IsotropicFmNegativeIso,
        TheoremId::K3ReflectionIso,
        TheoremId::IsotropicReflectionIso,
        TheoremId::AbelianDeformation,
        TheoremId::K3Deformation,
        TheoremId::PoincareConjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::PoincareDualIso => "poincare-dual-iso",
            TheoremId::PoincareOpenImmersion => "poincare-open-immersion",
            TheoremId::PoincareDualOpenImmersion => "poincare-dual-open-immersion",
            TheoremId::PoincareNegativeIso => "poincare-negative-iso",
            TheoremId::EllipticRelativeIso => "elliptic-relative-iso",
            TheoremId::PoincareBirationalNegative => "poincare-birational-negative",
            TheoremId::PoincareBirationalPositive => "poincare-birational-positive",
            TheoremId::IsotropicFmDualIso => "isotropic-fm-dual-iso",
            TheoremId::IsotropicFmNegativeIso => "isotropic-fm-negative-iso",
            TheoremId::K3ReflectionIso => "k3-reflection-iso",
            TheoremId::IsotropicReflectionIso => "isotropic-reflection-iso",
            TheoremId::AbelianDeformation => "abelian-deformation",
            TheoremId::K3Deformation => "k3-deformation",
            TheoremId::PoincareConjecture => "poincare-conjecture",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Isomorphism,
    Birational,
    OpenImmersion,
    Conjectural,
    Deformation,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::Isomorphism => "isomorphism",
            MapKind::Birational => "birational",
            MapKind::OpenImmersion => "open-immersion",
            MapKind::Conjectural => "conjectural",
            MapKind::Deformation => "deformation",
        }
    }
}

/// Where the target moduli space lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetSurface {
    Same,
    Dual,
    FmPartner,
    /// A Hilbert scheme of points, possibly times the dual surface.
    HilbertModel,
}

impl TargetSurface {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetSurface::Same => "same-surface",
            TargetSurface::Dual => "dual-surface",
            TargetSurface::FmPartner => "fm-partner",
            TargetSurface::HilbertModel => "hilbert-model",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub name: String,
    pub value: String,
    pub required: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub surface: TargetSurface,
    pub vector: MukaiVector,
    pub kind: MapKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub theorem: TheoremId,
    pub applicable: bool,
    pub conditions: Vec<Condition>,
    /// Present when applicable.
    pub target: Option<Target>,
    /// The cohomological transform sends `v` to `sign · target`.
    pub sign: i8,
    pub sub_cases: Vec<String>,
}

/// Extra data some statements need.
#[derive(Debug, Clone, Default)]
pub struct ClassifyContext {
    pub isotropic: Option<IsotropicFmParams>,
    pub fibration: Option<EllipticFibration>,
    /// Stability of the universal family restricted to fibres, where it is
    /// not automatic.
    pub assume_star: bool,
    /// Genericity of the polarisation when the Picard rank exceeds one.
    pub assume_general: bool,
}

#[derive(Default)]
struct Checks(Vec<Condition>);

impl Checks {
    fn add(&mut self, name: &str, value: impl fmt::Display, required: &str, ok: bool) -> bool {
        self.0.push(Condition { name: name.into(), value: value.to_string(), required: required.into(), ok });
        ok
    }

    fn ok(&self) -> bool {
        self.0.iter().all(|c| c.ok)
    }

    fn finish(self, theorem: TheoremId, sign: i8, target: impl FnOnce() -> Result<Option<Target>>) -> Result<Verdict> {
        let applicable = self.ok();
        let target = if applicable { target()? } else { None };
        Ok(Verdict { theorem, applicable, conditions: self.0, target, sign, sub_cases: Vec::new() })
    }
}

fn tgt(surface: TargetSurface, vector: MukaiVector, kind: MapKind) -> Result<Option<Target>> {
    Ok(Some(Target { surface, vector, kind }))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Picard rank one with an ample generator: `v = (r, d H, a)`.
fn rank_one_degree(v: &MukaiVector, s: &SurfaceModel) -> Option<BigInt> {
    (s.ns_rank() == 1 && s.ample_ray()[0].is_positive()).then(|| v.c1[0].clone())
}

pub fn classify(v: &MukaiVector, s: &SurfaceModel) -> Result<Vec<Verdict>> {
    classify_with(v, s, &ClassifyContext::default())
}

pub fn classify_with(v: &MukaiVector, s: &SurfaceModel, ctx: &ClassifyContext) -> Result<Vec<Verdict>> {
    s.check_vector(v)?;
    if v.is_zero() {
        return Err(Error::InvalidInput("the zero vector has no moduli space".into()));
    }
    let mut out = Vec::new();
    let abelian_rank_one = s.kind() == SurfaceKind::Abelian && rank_one_degree(v, s).is_some();
    if abelian_rank_one {
        out.extend(poincare_family(v, s)?);
        out.extend(poincare_birational(v, s)?);
    }
    if let Some(p) = &ctx.isotropic {
        out.extend(isotropic_verdicts(v, s, p)?);
    }
    if let Some(fib) = &ctx.fibration {
        out.push(elliptic_verdict(v, s, fib)?);
    }
    if s.kind() == SurfaceKind::K3 && v.r.is_positive() {
        out.push(k3_reflection(v, s, ctx)?);
    }
    if v.r.is_positive() {
        out.push(isotropic_reflection(v, s, ctx)?);
    }
    out.push(deformation_verdict(v, s)?);
    if abelian_rank_one {
        let proven =
            out.iter().any(|x| x.applicable && x.target.as_ref().is_some_and(|t| t.kind != MapKind::Deformation));
        if !proven {
            out.push(conjecture(v, s)?);
        }
    }
    Ok(out)
}

fn poincare_family(v: &MukaiVector, s: &SurfaceModel) -> Result<Vec<Verdict>> {
    let d = rank_one_degree(v, s).expect("rank one");
    let mut out = Vec::new();
    let sq = mukai_square(v, s)?;
    if d.is_one() {
        let mut c = Checks::default();
        c.add("c1", "H", "H", true);
        c.add("r", &v.r, "> 0", v.r.is_positive());
        c.add("a", &v.a, "> 0", v.a.is_positive());
        out.push(c.finish(TheoremId::PoincareDualIso, 1, || {
            tgt(TargetSurface::Dual, poincare_g(v, s)?, MapKind::Isomorphism)
        })?);

        let mut c = Checks::default();
        c.add("c1", "H", "H", true);
        c.add(
            "a",
            &v.a,
            &format!("> ⟨v²⟩/2 = {}", BigRational::new(sq.clone(), 2.into())),
            BigInt::from(2) * &v.a > sq,
        );
        out.push(c.finish(TheoremId::PoincareOpenImmersion, 1, || {
            tgt(TargetSurface::Dual, poincare_fm(v, s)?, MapKind::OpenImmersion)
        })?);

        let mut c = Checks::default();
        c.add("c1", "H", "H", true);
        c.add("r", &v.r, "> 0", v.r.is_positive());
        c.add("a", &v.a, "< 0", v.a.is_negative());
        out.push(c.finish(TheoremId::PoincareNegativeIso, -1, || {
            tgt(TargetSurface::Dual, -&poincare_fm(v, s)?, MapKind::Isomorphism)
        })?);
    }
    if d == -BigInt::one() {
        let mut c = Checks::default();
        c.add("c1", "−H", "−H", true);
        c.add("a", &v.a, "> 0", v.a.is_positive());
        c.add("locally free", "assumed", "assumed", true);
        out.push(c.finish(TheoremId::PoincareDualOpenImmersion, 1, || {
            tgt(TargetSurface::Dual, poincare_fm(v, s)?, MapKind::OpenImmersion)
        })?);
    }
    Ok(out)
}

/// Appendix cases that justify the positive-`a` birational map.
fn positive_sub_cases(r: &BigInt, d: &BigInt, a: &BigInt) -> Vec<String> {
    let mut out = Vec::new();
    let pos = r.is_positive() && d.is_positive() && a.is_positive();
    if d.is_zero() {
        out.push("d = 0".into());
    }
    if a.is_positive() && a <= &BigInt::from(4) {
        out.push("0 < a ≤ 4".into());
    }
    if pos && r > &BigInt::one() {
        if d.mod_floor(r).is_one() {
            out.push("d ≡ 1 mod r".into());
        }
        if (d + 1u8).mod_floor(r).is_zero() {
            out.push("d ≡ −1 mod r".into());
        }
    }
    if pos && d.is_multiple_of(r) && r.gcd(a).is_one() {
        out.push("r | d, gcd(r, a) = 1".into());
    }
    if r == &BigInt::from(4)
        && d >= &BigInt::from(2)
        && (d - 2u8).is_multiple_of(&BigInt::from(4))
        && a.is_positive()
        && a.is_odd()
    {
        out.push("(4, 4n + 2, odd a)".into());
    }
    out
}

fn poincare_birational(v: &MukaiVector, s: &SurfaceModel) -> Result<Vec<Verdict>> {
    let d = rank_one_degree(v, s).expect("rank one");
    let base = |c: &mut Checks| {
        c.add("primitive", yes_no(is_primitive(v)), "yes", is_primitive(v));
        c.add("r", &v.r, "> 0", v.r.is_positive());
        c.add("d", &d, "≥ 0", !d.is_negative());
    };
    let mut c = Checks::default();
    base(&mut c);
    c.add("(a, d)", format!("({}, {d})", v.a), "a ≤ 0 and d > 0", !v.a.is_positive() && d.is_positive());
    let first = c.finish(TheoremId::PoincareBirationalNegative, -1, || {
        tgt(TargetSurface::Dual, -&poincare_fm(v, s)?, MapKind::Birational)
    })?;

    let mut c = Checks::default();
    base(&mut c);
    let small = d.is_zero() || (v.a.is_positive() && v.a <= BigInt::from(4));
    c.add("(a, d)", format!("({}, {d})", v.a), "d = 0 or 0 < a ≤ 4", small);
    let mut second = c.finish(TheoremId::PoincareBirationalPositive, 1, || {
        tgt(TargetSurface::Dual, poincare_g(v, s)?, MapKind::Birational)
    })?;
    second.sub_cases = positive_sub_cases(&v.r, &d, &v.a);
    Ok(vec![first, second])
}

fn isotropic_verdicts(v: &MukaiVector, s: &SurfaceModel, p: &IsotropicFmParams) -> Result<Vec<Verdict>> {
    let model = p.surface(s.kind());
    let same = s.ns_rank() == 1 && model.ns_gram() == s.ns_gram();
    let base = |c: &mut Checks| -> Option<BigInt> {
        c.add("(H²)", s.ns_gram()[(0, 0)].clone(), &format!("2 r0 k = {}", p.h_square()), same);
        if !same {
            return None;
        }
        let lin = &v.c1[0] * &p.r0 + &v.r * &p.d0;
        c.add("d r0 + r d0", &lin, "1", lin.is_one());
        Some(mukai_pair(v, &mukai_dual(&p.v0()), s).expect("same rank"))
    };
    let mut c = Checks::default();
    let pair = base(&mut c);
    if let Some(x) = &pair {
        c.add("−⟨v, v0^∨⟩", -x, "> 0", x.is_negative());
    }
    let dual = c.finish(TheoremId::IsotropicFmDualIso, 1, || {
        let fv = isotropic_fm(p, s.kind())?.apply(v)?;
        tgt(TargetSurface::FmPartner, mukai_dual(&fv), MapKind::Isomorphism)
    })?;
    let mut c = Checks::default();
    let pair = base(&mut c);
    if let Some(x) = &pair {
        c.add("⟨v, v0^∨⟩", x, "> 0", x.is_positive());
    }
    let neg = c.finish(TheoremId::IsotropicFmNegativeIso, -1, || {
        let fv = isotropic_fm(p, s.kind())?.apply(v)?;
        tgt(TargetSurface::FmPartner, -&fv, MapKind::Isomorphism)
    })?;
    Ok(vec![dual, neg])
}

fn elliptic_verdict(v: &MukaiVector, s: &SurfaceModel, fib: &EllipticFibration) -> Result<Verdict> {
    let mut c = Checks::default();
    let same = fib.surface().ns_gram() == s.ns_gram() && fib.surface().kind() == s.kind();
    c.add("fibration on this surface", yes_no(same), "yes", same);
    let data = if same { fib.source_data(&SheafTriple::from_mukai(v, s)) } else { None };
    if same {
        c.add("c1 = σ − τ + m f", yes_no(data.is_some()), "yes", data.is_some());
    }
    if let Some(d) = &data {
        c.add("r", &d.r, "> 0", d.r.is_positive());
        c.add("r + l", &d.r + &d.l, "> 0", (&d.r + &d.l).is_positive());
        c.add("polarisation σ + k f, k ≫ 0", "assumed", "assumed", true);
    }
    c.finish(TheoremId::EllipticRelativeIso, -1, || {
        let img = elliptic_fm(data.as_ref().expect("checked"), fib)?;
        tgt(TargetSurface::Same, img.triple.to_mukai(s), MapKind::Isomorphism)
    })
}

/// Automatic for Picard rank one, otherwise from the context.
fn general_condition(c: &mut Checks, s: &SurfaceModel, ctx: &ClassifyContext) {
    if s.ns_rank() == 1 {
        c.add("general polarisation", "automatic (ρ = 1)", "holds", true);
    } else {
        c.add(
            "general polarisation",
            if ctx.assume_general { "assumed" } else { "not asserted" },
            "holds",
            ctx.assume_general,
        );
    }
}

fn k3_reflection(v: &MukaiVector, s: &SurfaceModel, ctx: &ClassifyContext) -> Result<Verdict> {
    // v = l v0 − b ω with v0 = (r0, ξ0, ((ξ0²)/2 + 1)/r0) on the ray of v
    let ell = divisibility(v);
    let r0 = &v.r / &ell;
    let xi0: Vec<BigInt> = v.c1.iter().map(|x| x / &ell).collect();
    let num: BigInt = s.ns_pair(&xi0, &xi0)? / 2 + 1;
    let mut c = Checks::default();
    let integral = num.is_multiple_of(&r0);
    c.add("((ξ0²)/2 + 1) / r0", BigRational::new(num.clone(), r0.clone()), "integral", integral);
    let mut target = None;
    if integral {
        let v0 = MukaiVector::new(r0.clone(), xi0, &num / &r0);
        let b = &ell * &v0.a - &v.a;
        let br = &b * &r0;
        c.add("b r0", &br, &format!("in ({ell}, {})", BigInt::from(2) * &ell), br > ell && br < BigInt::from(2) * &ell);
        let m = &br - &ell;
        target = Some(&mukai_dual(&v0).scale(&m) - &MukaiVector::omega(s.ns_rank()).scale(&b));
    }
    general_condition(&mut c, s, ctx);
    c.finish(TheoremId::K3ReflectionIso, -1, || {
        tgt(TargetSurface::Same, target.expect("checked"), MapKind::Isomorphism)
    })
}

fn isotropic_reflection(v: &MukaiVector, s: &SurfaceModel, ctx: &ClassifyContext) -> Result<Verdict> {
    let v1 = isotropic_on_ray(v, s)?;
    let w1 = mukai_dual(&v1);
    let mut c = Checks::default();
    let image = reflection_dual(v, &v1, &w1, s);
    c.add("v = l v1 − a ω over 1/ℓ(v1)", yes_no(image.is_ok()), "yes", image.is_ok());
    let target = match image {
        Ok(img) => {
            c.add("l", &img.l, "> 0", img.l.is_positive());
            c.add("a", &img.a, "> 0", img.a.is_positive());
            Some(img.target)
        }
        Err(_) => None,
    };
    let star_auto = s.ns_rank() == 1 || s.kind() == SurfaceKind::Abelian;
    let star_value = if star_auto {
        "automatic"
    } else if ctx.assume_star {
        "assumed"
    } else {
        "not asserted"
    };
    c.add("universal family stable on fibres", star_value, "holds", star_auto || ctx.assume_star);
    general_condition(&mut c, s, ctx);
    c.finish(TheoremId::IsotropicReflectionIso, -1, || {
        tgt(TargetSurface::FmPartner, target.expect("checked"), MapKind::Isomorphism)
    })
}

fn ample_multiple(c1: &[BigInt], s: &SurfaceModel) -> bool {
    let h = s.ample_ray();
    let proportional = (0..c1.len()).all(|i| (0..c1.len()).all(|j| &c1[i] * &h[j] == &c1[j] * &h[i]));
    proportional && s.ns_pair(c1, h).is_ok_and(|x| x.is_positive())
}

fn deformation_verdict(v: &MukaiVector, s: &SurfaceModel) -> Result<Verdict> {
    let sq = mukai_square(v, s)?;
    let prim = is_primitive(v);
    let mut c = Checks::default();
    c.add("primitive", yes_no(prim), "yes", prim);
    match s.kind() {
        SurfaceKind::Abelian => {
            let pos = is_positive(v, s, &DefaultEffectivity)?;
            c.add("positive", yes_no(pos), "yes", pos);
            c.add("⟨v²⟩", &sq, "≥ 2", sq >= BigInt::from(2));
            let n = &sq / 2;
            let mut out = c.finish(TheoremId::AbelianDeformation, 1, || {
                tgt(
                    TargetSurface::HilbertModel,
                    MukaiVector::new(BigInt::one(), vec![BigInt::zero(); s.ns_rank()], -&n),
                    MapKind::Deformation,
                )
            })?;
            out.sub_cases = vec![format!("X̂ × Hilb^{n}")];
            Ok(out)
        }
        SurfaceKind::K3 => {
            let ok = v.r.is_positive() || (v.r.is_zero() && ample_multiple(&v.c1, s));
            c.add("r > 0 or c1 ample", yes_no(ok), "yes", ok);
            c.add("⟨v²⟩", &sq, "≥ −2", sq >= BigInt::from(-2));
            let n = &sq / 2 + 1;
            let mut out = c.finish(TheoremId::K3Deformation, 1, || {
                tgt(
                    TargetSurface::HilbertModel,
                    MukaiVector::new(BigInt::one(), vec![BigInt::zero(); s.ns_rank()], -&sq / 2),
                    MapKind::Deformation,
                )
            })?;
            out.sub_cases = vec![format!("Hilb^{n}")];
            Ok(out)
        }
    }
}

fn conjecture(v: &MukaiVector, s: &SurfaceModel) -> Result<Verdict> {
    let mut c = Checks::default();
    let pos = is_positive(v, s, &DefaultEffectivity)?;
    c.add("NS = Z H", "yes", "yes", true);
    c.add("positive", yes_no(pos), "yes", pos);
    let (sign, w) = if v.a.is_negative() { (-1, -&poincare_fm(v, s)?) } else { (1, poincare_g(v, s)?) };
    c.finish(TheoremId::PoincareConjecture, sign, || tgt(TargetSurface::Dual, w, MapKind::Conjectural))
}

/// Invariants that decide deformation equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeformationClass {
    Abelian {
        rank_positive: bool,
        ell: BigInt,
        square: BigInt,
        /// `a mod ℓ`, or `a` itself when `ℓ = 0`.
        a_mod_ell: BigInt,
        /// `n` in the model `X̂ × Hilb^n`.
        hilb: BigInt,
    },
    K3 {
        hilb: BigInt,
    },
}

impl DeformationClass {
    pub fn model(&self) -> String {
        match self {
            DeformationClass::Abelian { hilb, .. } => format!("X̂ × Hilb^{hilb}"),
            DeformationClass::K3 { hilb } => format!("Hilb^{hilb}"),
        }
    }
}

pub fn deformation_class(v: &MukaiVector, s: &SurfaceModel) -> Result<DeformationClass> {
    s.check_vector(v)?;
    if !is_primitive(v) {
        return Err(Error::precondition(format!("{v} is not primitive")));
    }
    let sq = mukai_square(v, s)?;
    match s.kind() {
        SurfaceKind::Abelian => {
            if !is_positive(v, s, &DefaultEffectivity)? {
                return Err(Error::precondition(format!("{v} is not positive")));
            }
            let ell = divisibility(v);
            let a_mod_ell = if ell.is_zero() { v.a.clone() } else { v.a.mod_floor(&ell) };
            Ok(DeformationClass::Abelian {
                rank_positive: v.r.is_positive(),
                ell,
                hilb: &sq / 2,
                square: sq,
                a_mod_ell,
            })
        }
        SurfaceKind::K3 => {
            if !(v.r.is_positive() || (v.r.is_zero() && ample_multiple(&v.c1, s))) {
                return Err(Error::precondition("needs r > 0 or c1 ample"));
            }
            Ok(DeformationClass::K3 { hilb: sq / 2 + 1 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KummerCase {
    /// ℓ = 1, r even, a even.
    CoprimeEvenRankEvenA,
    /// ℓ = 1, r even, a odd.
    CoprimeEvenRankOddA,
    /// ℓ = 1, r odd (after a twist making the multiplier even).
    CoprimeOddRank,
    /// ℓ = 1, r = 0.
    CoprimeRankZero,
    /// ℓ = 2, r/2 > 1.
    DoubleHigherRank,
    /// ℓ = 2, r = 2.
    DoubleRankTwo,
}

impl KummerCase {
    pub fn as_str(self) -> &'static str {
        match self {
            KummerCase::CoprimeEvenRankEvenA => "coprime-even-rank-even-a",
            KummerCase::CoprimeEvenRankOddA => "coprime-even-rank-odd-a",
            KummerCase::CoprimeOddRank => "coprime-odd-rank",
            KummerCase::CoprimeRankZero => "coprime-rank-zero",
            KummerCase::DoubleHigherRank => "double-higher-rank",
            KummerCase::DoubleRankTwo => "double-rank-two",
        }
    }
}

/// An isotropic vector `w` on the Kummer surface, given by its rank,
/// `(c1(w)²)` and ω-coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KummerReduction {
    pub case: KummerCase,
    pub w_rank: BigInt,
    pub w_c1_square: BigInt,
    pub w_omega: BigRational,
    pub isotropy_ok: bool,
}

impl KummerReduction {
    fn new(case: KummerCase, w_rank: BigInt, w_c1_square: BigInt, w_omega: BigRational) -> Self {
        let sq = BigRational::from_integer(w_c1_square.clone())
            - BigRational::from_integer(BigInt::from(2) * &w_rank) * &w_omega;
        KummerReduction { case, w_rank, w_c1_square, w_omega, isotropy_ok: sq.is_zero() }
    }

    /// `(c1(w)²) − 2 r(w) ω(w)`.
    pub fn w_square(&self) -> BigRational {
        BigRational::from_integer(self.w_c1_square.clone())
            - BigRational::from_integer(BigInt::from(2) * &self.w_rank) * &self.w_omega
    }
}

pub fn kummer4_reduce(v: &MukaiVector, s: &SurfaceModel) -> Result<KummerReduction> {
    if s.kind() != SurfaceKind::Abelian {
        return Err(Error::precondition("Kummer reduction needs an abelian surface"));
    }
    let sq = mukai_square(v, s)?;
    if sq != BigInt::from(4) {
        return Err(Error::precondition(format!("⟨v²⟩ = {sq}, expected 4")));
    }
    if !is_positive(v, s, &DefaultEffectivity)? {
        return Err(Error::precondition(format!("{v} is not positive")));
    }
    let ell = divisibility(v);
    let half = |x: BigInt| BigRational::new(x, 2.into());
    let (r, a) = (&v.r, &v.a);
    let two = BigInt::from(2);
    if ell.is_one() {
        if r.is_zero() {
            return Ok(KummerReduction::new(
                KummerCase::CoprimeRankZero,
                BigInt::zero(),
                BigInt::zero(),
                BigRational::one(),
            ));
        }
        if r.is_even() {
            let (case, m) = if a.is_even() {
                (KummerCase::CoprimeEvenRankEvenA, a - &two * r + 2)
            } else {
                (KummerCase::CoprimeEvenRankOddA, a - &two * r + 1)
            };
            return Ok(KummerReduction::new(case, r.clone(), r * &m, half(m)));
        }
        // c1 = d N with N primitive; twisting by N when d is odd
        let d = crate::arith::gcd_all(&v.c1);
        let a_twisted = if d.is_odd() {
            let n: Vec<BigInt> = v.c1.iter().map(|x| x / &d).collect();
            let n2 = s.ns_pair(&n, &n)?;
            a + &d * &n2 + r * &n2 / 2
        } else {
            a.clone()
        };
        let m = a_twisted - &two * r + 4;
        return Ok(KummerReduction::new(KummerCase::CoprimeOddRank, r.clone(), r * &m, half(m)));
    }
    if ell == two {
        let rp: BigInt = r / 2;
        if rp.is_one() {
            return Ok(KummerReduction::new(
                KummerCase::DoubleRankTwo,
                two,
                BigInt::from(-8),
                BigRational::from_integer((-2).into()),
            ));
        }
        let m = a + 1 - BigInt::from(4) * &rp;
        return Ok(KummerReduction::new(KummerCase::DoubleHigherRank, r.clone(), r * &m, half(m)));
    }
    Err(Error::Invariant(format!("ℓ(v) = {ell} is impossible when ⟨v²⟩ = 4")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialLocus {
    pub codim: BigInt,
    pub components: BigInt,
    pub fiber_dim: BigInt,
}

/// Locus of non-locally-free sheaves when `⟨v²⟩ = 2 r`: `r²` copies of
/// `P^{r−1}` in codimension `r − 1`.
pub fn special_locus(v: &MukaiVector, s: &SurfaceModel) -> Result<SpecialLocus> {
    let sq = mukai_square(v, s)?;
    let r = &v.r;
    if s.kind() != SurfaceKind::Abelian
        || !divisibility(v).is_one()
        || sq != BigInt::from(2) * r
        || r < &BigInt::from(2)
    {
        return Err(Error::precondition("not the ⟨v²⟩ = 2r, ℓ = 1, r ≥ 2 regime on an abelian surface"));
    }
    Ok(SpecialLocus { codim: r - 1, components: r * r, fiber_dim: r - 1 })
}

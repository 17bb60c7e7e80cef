//! Walls for purely one-dimensional sheaves `E` with `(c1(E)²) > 0` and
//! `χ(E) ≠ 0`: classes `ξ = χ(F) c1(E) − χ(E) c1(F)` over subsheaves `F`,
//! and the chambers they cut out of a segment in the positive cone.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{ceil_rat, floor_rat, floor_sqrt_rat, gcd_all, isqrt};
use crate::error::{Error, Result};
use crate::lattice::{EffectivityOracle, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WallDatum {
    /// Primitive class orthogonal to the wall.
    pub xi: Vec<BigInt>,
    pub witness_c1f: Vec<BigInt>,
    pub witness_chif: BigInt,
}

/// Walls plus the counts that bound their number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallEnumeration {
    pub walls: Vec<WallDatum>,
    /// Effective classes `c1(F)` that passed every filter.
    pub candidate_classes: usize,
    /// Longest χ(F) interval over those classes.
    pub max_chi_interval: usize,
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

struct Setup<'a> {
    s: &'a SurfaceModel,
    c1e: &'a [BigInt],
    chie: &'a BigInt,
    l0: &'a [BigInt],
    e2: BigInt,
    deg_max: BigInt,
}

fn setup<'a>(
    c1e: &'a [BigInt],
    chie: &'a BigInt,
    s: &'a SurfaceModel,
    l0: &'a [BigInt],
    eff: &dyn EffectivityOracle,
) -> Result<Setup<'a>> {
    s.check_ns(c1e)?;
    s.check_ns(l0)?;
    if chie.is_zero() {
        return Err(Error::precondition("χ(E) must be nonzero"));
    }
    if !s.is_hyperbolic() {
        return Err(Error::precondition("NS lattice must have signature (1, ρ − 1)"));
    }
    if !in_positive_cone(l0, s)? {
        return Err(Error::precondition("L0 is not in the positive cone of the ample class"));
    }
    let e2 = s.ns_pair(c1e, c1e)?;
    if !e2.is_positive() {
        return Err(Error::precondition("(c1(E)²) must be positive"));
    }
    if !eff.is_effective(c1e, s) {
        return Err(Error::precondition("c1(E) is not effective"));
    }
    let deg_max = s.ns_pair(c1e, l0)?;
    Ok(Setup { s, c1e, chie, l0, e2, deg_max })
}

/// `(x²) > 0` and `(x, H) > 0`.
pub fn in_positive_cone(x: &[BigInt], s: &SurfaceModel) -> Result<bool> {
    Ok(s.ns_pair(x, x)?.is_positive() && s.ns_pair(x, s.ample_ray())?.is_positive())
}

fn proportional(x: &[BigInt], y: &[BigInt]) -> bool {
    (0..x.len()).all(|i| (i + 1..x.len()).all(|j| &x[i] * &y[j] == &x[j] * &y[i]))
}

impl Setup<'_> {
    fn class_ok(&self, d: &[BigInt], eff: &dyn EffectivityOracle) -> bool {
        let deg = self.s.ns_pair(d, self.l0).expect("checked length");
        deg.is_positive() && deg <= self.deg_max && !proportional(d, self.c1e) && eff.is_effective(d, self.s)
    }

    fn xi(&self, d: &[BigInt], chif: &BigInt) -> Vec<BigInt> {
        self.c1e.iter().zip(d).map(|(e, f)| chif * e - self.chie * f).collect()
    }

    /// `B` with `P(D) ≤ B` for every candidate, `P(x) = 2(x,L0)²/(L0²) − (x²)`.
    fn p_bound(&self, eff: &dyn EffectivityOracle) -> BigRational {
        let g = self.s.ns_pair(self.l0, self.l0).expect("checked length");
        BigRational::new(BigInt::from(2) * &self.deg_max * &self.deg_max, g) - q(&eff.min_square(self.s))
    }

    /// Gram matrix of `P`.
    fn p_gram(&self) -> Vec<Vec<BigRational>> {
        let gl = self.s.ns_gram().mul_vec(self.l0).expect("checked length");
        let g = q(&self.s.ns_pair(self.l0, self.l0).expect("checked length"));
        let n = self.s.ns_rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        BigRational::from_integer(BigInt::from(2) * &gl[i] * &gl[j]) / &g - q(&self.s.ns_gram()[(i, j)])
                    })
                    .collect()
            })
            .collect()
    }
}

/// Integer `χ` with `A χ² − 2 B χ + C ≤ 0`, `A > 0`.
fn chi_interval(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<(BigInt, BigInt)> {
    let disc = b * b - a * c;
    if disc.is_negative() {
        return None;
    }
    let s = isqrt(&disc);
    let f = |x: &BigInt| a * x * x - BigInt::from(2) * b * x + c;
    // real roots lie in [(b − s − 1)/a, (b + s + 1)/a]
    let mut lo = (b - &s - BigInt::one()).div_floor(a);
    let mut hi = (b + &s + BigInt::one()).div_ceil(a);
    while lo <= hi && f(&lo).is_positive() {
        lo += 1;
    }
    while hi >= lo && f(&hi).is_positive() {
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

fn primitive(xi: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_all(xi);
    xi.iter().map(|x| x / &g).collect()
}

/// A rational point of the positive cone on `W_ξ`, for `(ξ²) < 0`:
/// `H − ((H, ξ)/(ξ²)) ξ`.
pub fn wall_certificate(xi: &[BigInt], s: &SurfaceModel) -> Result<Vec<BigRational>> {
    let x2 = s.ns_pair(xi, xi)?;
    if !x2.is_negative() {
        return Err(Error::precondition("a wall class needs (ξ²) < 0"));
    }
    let t = BigRational::new(s.ns_pair(s.ample_ray(), xi)?, x2);
    Ok(s.ample_ray().iter().zip(xi).map(|(h, x)| q(h) - &t * q(x)).collect())
}

fn collect(found: impl IntoIterator<Item = (Vec<BigInt>, Vec<BigInt>, BigInt)>) -> Vec<WallDatum> {
    let mut best: BTreeMap<Vec<BigInt>, (Vec<BigInt>, BigInt)> = BTreeMap::new();
    for (xi, d, chi) in found {
        let key = primitive(&xi);
        match best.get(&key) {
            Some(w) if *w <= (d.clone(), chi.clone()) => {}
            _ => {
                best.insert(key, (d, chi));
            }
        }
    }
    best.into_iter().map(|(xi, (witness_c1f, witness_chif))| WallDatum { xi, witness_c1f, witness_chif }).collect()
}

pub fn enumerate_walls(
    c1e: &[BigInt],
    chie: &BigInt,
    s: &SurfaceModel,
    l0: &[BigInt],
    eff: &dyn EffectivityOracle,
) -> Result<Vec<WallDatum>> {
    Ok(enumerate_walls_with_stats(c1e, chie, s, l0, eff)?.walls)
}

pub fn enumerate_walls_with_stats(
    c1e: &[BigInt],
    chie: &BigInt,
    s: &SurfaceModel,
    l0: &[BigInt],
    eff: &dyn EffectivityOracle,
) -> Result<WallEnumeration> {
    let st = setup(c1e, chie, s, l0, eff)?;
    let bound = st.p_bound(eff);
    let n = s.ns_rank();
    let mut found = Vec::new();
    let mut candidate_classes = 0usize;
    let mut max_chi_interval = 0usize;
    if bound.is_negative() {
        return Ok(WallEnumeration { walls: Vec::new(), candidate_classes, max_chi_interval });
    }
    // |x_i| ≤ sqrt(B (P⁻¹)_ii)
    let pg = st.p_gram();
    let pg_int_den: BigInt = pg.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = crate::intmat::IntMatrix::from_rows(
        pg.iter().map(|r| r.iter().map(|x| (x * q(&pg_int_den)).to_integer()).collect()).collect(),
    )?;
    let inv = scaled.rational_inverse().ok_or_else(|| Error::Invariant("positive form is singular".into()))?;
    let radii: Vec<BigInt> = (0..n).map(|i| floor_sqrt_rat(&(&bound * &inv[i][i] * q(&pg_int_den)))).collect();

    let mut d = radii.iter().map(|r| -r).collect::<Vec<_>>();
    'outer: loop {
        if st.class_ok(&d, eff) {
            let de = s.ns_pair(c1e, &d)?;
            let d2 = s.ns_pair(&d, &d)?;
            let b = chie * &de;
            let c = chie * chie * &d2;
            if let Some((lo, hi)) = chi_interval(&st.e2, &b, &c) {
                candidate_classes += 1;
                let len: usize = (&hi - &lo + 1u8).try_into().unwrap_or(usize::MAX);
                max_chi_interval = max_chi_interval.max(len);
                // on this interval (ξ²) = e2 χ² − 2bχ + c, so only the endpoints can be isotropic
                let mut chi = lo.clone();
                while chi <= hi {
                    let interior = chi != lo && chi != hi;
                    if interior || (&st.e2 * &chi * &chi - BigInt::from(2) * &b * &chi + &c).is_negative() {
                        let xi = st.xi(&d, &chi);
                        if xi.iter().any(|x| !x.is_zero()) {
                            found.push((xi, d.clone(), chi.clone()));
                        }
                    }
                    chi += 1;
                }
            }
        }
        for i in 0..n {
            if d[i] < radii[i] {
                d[i] += 1;
                continue 'outer;
            }
            d[i] = -radii[i].clone();
        }
        break;
    }
    Ok(WallEnumeration { walls: collect(found), candidate_classes, max_chi_interval })
}

/// Independent enumeration used as a cross-check: a Fincke–Pohst search of
/// the ellipsoid `P(D) ≤ B`, a root-bound scan of χ(F) and a direct
/// evaluation of `(ξ²)`.
pub fn enumerate_walls_brute_force(
    c1e: &[BigInt],
    chie: &BigInt,
    s: &SurfaceModel,
    l0: &[BigInt],
    eff: &dyn EffectivityOracle,
) -> Result<Vec<WallDatum>> {
    let st = setup(c1e, chie, s, l0, eff)?;
    let bound = st.p_bound(eff);
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let points = fincke_pohst(&st.p_gram(), &bound);
    let mut found = Vec::new();
    for d in points {
        if !st.class_ok(&d, eff) {
            continue;
        }
        let a = st.e2.clone();
        let b = chie * s.ns_pair(c1e, &d)?;
        let c = chie * chie * s.ns_pair(&d, &d)?;
        // every root of a χ² − 2bχ + c satisfies |χ| < 1 + max(|2b|, |c|)/a
        let r: BigInt = BigInt::from(2) + (BigInt::from(2) * &b).abs().max(c.abs()) / &a;
        let mut chi = -r.clone();
        while chi <= r {
            let xi = st.xi(&d, &chi);
            let x2 = s.ns_pair(&xi, &xi)?;
            if xi.iter().any(|x| !x.is_zero()) && x2.is_negative() {
                found.push((xi, d.clone(), chi.clone()));
            }
            chi += 1;
        }
    }
    Ok(collect(found))
}

/// All integer `x` with `xᵀ Q x ≤ bound` for a positive definite rational `Q`.
fn fincke_pohst(qm: &[Vec<BigRational>], bound: &BigRational) -> Vec<Vec<BigInt>> {
    let n = qm.len();
    // P(x) = Σ d_i (x_i + Σ_{j>i} μ_ij x_j)²
    let mut a = qm.to_vec();
    let mut diag = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        diag[i] = a[i][i].clone();
        for j in i + 1..n {
            mu[i][j] = &a[i][j] / &diag[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let t = &mu[i][j] * &a[i][k];
                a[j][k] -= t;
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fn rec(
        i: usize,
        budget: BigRational,
        x: &mut Vec<BigInt>,
        diag: &[BigRational],
        mu: &[Vec<BigRational>],
        out: &mut Vec<Vec<BigInt>>,
    ) {
        let n = x.len();
        let c: BigRational = -(i + 1..n).map(|j| &mu[i][j] * q(&x[j])).fold(BigRational::zero(), |s, t| s + t);
        let s = floor_sqrt_rat(&(&budget / &diag[i]));
        let lo = floor_rat(&c) - &s - 1;
        let hi = ceil_rat(&c) + &s + 1;
        let mut v = lo;
        while v <= hi {
            let dv = q(&v) - &c;
            let used = &diag[i] * &dv * &dv;
            if used <= budget {
                x[i] = v.clone();
                if i == 0 {
                    out.push(x.clone());
                } else {
                    rec(i - 1, &budget - &used, x, diag, mu, out);
                }
            }
            v += 1;
        }
    }
    if n > 0 {
        rec(n - 1, bound.clone(), &mut x, &diag, &mu, &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub t_lo: BigRational,
    pub t_hi: BigRational,
    pub t_mid: BigRational,
    pub point: Vec<BigRational>,
    /// Sign of `(point, ξ)` for each wall, in input order.
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSlicing {
    pub chambers: Vec<Chamber>,
    pub start_on_wall: bool,
    pub end_on_wall: bool,
}

#[cfg(test)]
fn rat_pair(x: &[BigRational], xi: &[BigInt], s: &SurfaceModel) -> BigRational {
    let gx = s.ns_gram().mul_vec(xi).expect("checked length");
    x.iter().zip(&gx).map(|(a, b)| a * q(b)).fold(BigRational::zero(), |acc, t| acc + t)
}

/// Open intervals of `t ∈ (0, 1)` on which `p0 + t (p1 − p0)` lies on no wall.
pub fn chambers_on_segment(
    walls: &[WallDatum],
    p0: &[BigInt],
    p1: &[BigInt],
    s: &SurfaceModel,
) -> Result<SegmentSlicing> {
    for p in [p0, p1] {
        if !in_positive_cone(p, s)? {
            return Err(Error::precondition("segment endpoints must lie in the positive cone"));
        }
    }
    let dir: Vec<BigInt> = p1.iter().zip(p0).map(|(a, b)| a - b).collect();
    // (p0 + t dir, ξ) = f0 + t slope for each wall
    let lines = walls
        .iter()
        .map(|w| {
            s.check_ns(&w.xi)?;
            Ok((s.ns_pair(p0, &w.xi)?, s.ns_pair(&dir, &w.xi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cuts = Vec::new();
    let (mut start_on_wall, mut end_on_wall) = (false, false);
    let mut degenerate = false;
    for (f0, slope) in &lines {
        start_on_wall |= f0.is_zero();
        end_on_wall |= (f0 + slope).is_zero();
        if slope.is_zero() {
            degenerate |= f0.is_zero();
            continue;
        }
        let t = BigRational::new(-f0, slope.clone());
        if t.is_positive() && t < BigRational::one() {
            cuts.push(t);
        }
    }
    if degenerate {
        return Ok(SegmentSlicing { chambers: Vec::new(), start_on_wall, end_on_wall });
    }
    cuts.sort();
    cuts.dedup();
    let mut ends = vec![BigRational::zero()];
    ends.extend(cuts);
    ends.push(BigRational::one());
    let chambers = ends
        .windows(2)
        .map(|w| {
            let t_mid = (&w[0] + &w[1]) / BigRational::from_integer(2.into());
            let point: Vec<BigRational> = p0.iter().zip(&dir).map(|(a, d)| q(a) + &t_mid * q(d)).collect();
            // denominators are positive, so the sign of f0·den + slope·num is the sign of the pairing
            let (num, den) = (t_mid.numer(), t_mid.denom());
            let signs = lines
                .iter()
                .map(|(f0, slope)| match (f0 * den + slope * num).sign() {
                    Sign::Plus => 1,
                    Sign::Minus => -1,
                    Sign::NoSign => 0,
                })
                .collect();
            Chamber { t_lo: w[0].clone(), t_hi: w[1].clone(), t_mid, point, signs }
        })
        .collect();
    Ok(SegmentSlicing { chambers, start_on_wall, end_on_wall })
}

/// `(H, ξ) ≠ 0` for every wall.
pub fn is_general(h: &[BigInt], walls: &[WallDatum], s: &SurfaceModel) -> Result<bool> {
    if !in_positive_cone(h, s)? {
        return Err(Error::precondition("polarisation must lie in the positive cone"));
    }
    for w in walls {
        if s.ns_pair(h, &w.xi)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#![allow(dead_code)]

use mukai_core::fm::{EllipticFibration, IsotropicFmParams};
use mukai_core::{IntMatrix, MukaiVector, SurfaceKind, SurfaceModel};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn b(x: i64) -> BigInt {
    x.into()
}

pub fn bv(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| x.into()).collect()
}

pub fn mv(r: i64, c: &[i64], a: i64) -> MukaiVector {
    MukaiVector::from_i64(r, c, a)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn kind(rng: &mut StdRng) -> SurfaceKind {
    if rng.gen_bool(0.5) {
        SurfaceKind::Abelian
    } else {
        SurfaceKind::K3
    }
}

pub fn rank_one(rng: &mut StdRng, kind: SurfaceKind) -> SurfaceModel {
    SurfaceModel::rank_one(kind, 2 * rng.gen_range(1..=10)).unwrap()
}

/// Even Gram of signature (1, 1) with entries in `[−bound, bound]`, with an
/// ample ray of positive square.
pub fn hyperbolic_rank_two(rng: &mut StdRng, kind: SurfaceKind, bound: i64) -> SurfaceModel {
    loop {
        let g00 = 2 * rng.gen_range(-bound / 2..=bound / 2);
        let g11 = 2 * rng.gen_range(-bound / 2..=bound / 2);
        let g01 = rng.gen_range(-bound..=bound);
        if g00 * g11 - g01 * g01 >= 0 {
            continue;
        }
        let gram = IntMatrix::from_i64(&[&[g00, g01], &[g01, g11]]);
        let mut rays = Vec::new();
        for x in -3i64..=3 {
            for y in -3i64..=3 {
                if g00 * x * x + 2 * g01 * x * y + g11 * y * y > 0 && x.gcd(&y) == 1 {
                    rays.push((x, y));
                }
            }
        }
        if rays.is_empty() {
            continue;
        }
        let (x, y) = rays[rng.gen_range(0..rays.len())];
        return SurfaceModel::new(kind, gram, bv(&[x, y])).unwrap();
    }
}

pub fn vector(rng: &mut StdRng, rho: usize, bound: i64) -> MukaiVector {
    MukaiVector::new(
        b(rng.gen_range(-bound..=bound)),
        (0..rho).map(|_| b(rng.gen_range(-bound..=bound))).collect(),
        b(rng.gen_range(-bound..=bound)),
    )
}

pub fn isotropic_params(rng: &mut StdRng) -> IsotropicFmParams {
    loop {
        let r0: i64 = rng.gen_range(1..=6);
        let d0: i64 = rng.gen_range(-6..=6);
        let k: i64 = rng.gen_range(1..=5);
        if r0.gcd(&d0) != 1 || r0.gcd(&k) != 1 {
            continue;
        }
        let p = IsotropicFmParams::from_i64(r0, d0, k).unwrap();
        // shift the Bézout pair by a random multiple
        let t = b(rng.gen_range(-2..=2));
        let kd0 = &p.k * &p.d0;
        return IsotropicFmParams::with_bezout(
            p.r0.clone(),
            p.d0.clone(),
            p.k.clone(),
            &p.d1 + &t * &p.r0,
            &p.l + &t * kd0,
        )
        .unwrap();
    }
}

/// `σ, f, x` with `(σ²) = −χ(O)`, `(σ, f) = 1`, `x² = −2` and second
/// section `τ = σ + f + x`.
pub fn product_fibration(kind: SurfaceKind) -> EllipticFibration {
    let s2 = -kind.chi_structure_sheaf();
    let s =
        SurfaceModel::new(kind, IntMatrix::from_i64(&[&[s2, 1, 0], &[1, 0, 0], &[0, 0, -2]]), bv(&[1, 3, 0])).unwrap();
    EllipticFibration::new(s, bv(&[1, 0, 0]), bv(&[0, 1, 0]), bv(&[1, 1, 1])).unwrap()
}

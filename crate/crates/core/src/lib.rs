//! Exact lattice computations for moduli of sheaves on abelian and K3
//! surfaces: Mukai vectors, cohomological Fourier–Mukai isometries, walls
//! for one-dimensional sheaves, Beauville–Bogomolov lattices of albanese
//! fibres and decision procedures for isomorphisms between moduli spaces.

pub mod advisor;
pub mod albanese;
pub mod arith;
pub mod binary_form;
pub mod error;
pub mod fm;
pub mod intmat;
pub mod kummer;
pub mod lattice;
pub mod walls;

pub use error::{Error, Result};
pub use intmat::IntMatrix;
pub use lattice::{
    bogomolov_discriminant, divisibility, is_positive, moduli_dim, mukai_dual, mukai_pair, mukai_square, perp_basis,
    twist, DefaultEffectivity, EffectivityOracle, LatticeGram, ModuliDimension, MukaiVector, SurfaceKind, SurfaceModel,
};

//! Even unimodular ideal lattices over `K = Q(√−ℓ, ζ_p)` with their Hermitian
//! `O_L`-structure, the `ζ_p` automorphism and the mod-`p` behaviour of their
//! Hermitian theta coefficients.

pub mod cli_report;
pub mod exact_linalg;
pub mod field_tower;
pub mod hermitian_theta;
pub mod lattice_builder;
pub mod exec;

pub use exec::Exec;

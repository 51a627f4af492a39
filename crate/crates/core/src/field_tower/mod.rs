//! Exact arithmetic in `K = Q(√−ℓ, ζ_p)` and its subfields `L = Q(√−ℓ)`,
//! `M = Q(ζ_p)` and the fixed field `F` of complex conjugation.
//!
//! Elements of `K` are stored on the product basis `{ζ^i, ζ^i·δ : 0 ≤ i ≤ p−2}` with
//! `δ² = −ℓ₀`, `ℓ₀` the squarefree part of the input `ℓ`. Conjugation and the subfield
//! traces act on this basis by index permutations and sign flips.

mod element;
mod embedding;
pub mod poly;
mod quadratic;
mod unramified;

pub use element::{FElement, KElement, TraceTarget};
pub use embedding::{Ball, CertifiedEmbedding};
pub use poly::RatPoly;
pub use quadratic::{LElement, QuadraticField};
pub use unramified::{verify_unramified, UnramifiedEvidence};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("ell must be a positive integer")]
    ZeroEll,
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("p = {0} is not congruent to 1 mod 4")]
    NotOneModFour(u64),
    #[error("p = {p} divides ell = {ell}")]
    PDividesEll { p: u64, ell: u64 },
    #[error("p = {0} is too large for this implementation")]
    TooLarge(u64),
    #[error("inversion of zero")]
    DivisionByZero,
}

/// The validated compositum `K = LM` with its discriminant bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    ell_input: u64,
    ell_norm: u64,
    ell0: u64,
    sqrt_factor: u64,
    p: u64,
    quad: QuadraticField,
}

/// Serialized form of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerParams {
    pub ell_input: u64,
    pub ell_norm: u64,
    pub p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `ℓ = s²·ℓ₀` with `ℓ₀` squarefree; returns `(ℓ₀, s)`.
pub fn squarefree_decomposition(ell: u64) -> (u64, u64) {
    let mut core = 1u64;
    let mut s = 1u64;
    let mut rest = ell;
    let mut d = 2u64;
    while d * d <= rest {
        let mut e = 0;
        while rest % d == 0 {
            rest /= d;
            e += 1;
        }
        s *= d.pow(e / 2);
        if e % 2 == 1 {
            core *= d;
        }
        d += 1;
    }
    (core * rest, s)
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Validates `(ℓ, p)` and builds the tower.
pub fn build_tower(ell: u64, p: u64) -> Result<FieldTower, TowerError> {
    if ell == 0 {
        return Err(TowerError::ZeroEll);
    }
    if !is_prime(p) {
        return Err(TowerError::NotPrime(p));
    }
    if p % 4 != 1 {
        return Err(TowerError::NotOneModFour(p));
    }
    if ell % p == 0 {
        return Err(TowerError::PDividesEll { p, ell });
    }
    if p > 61 {
        return Err(TowerError::TooLarge(p));
    }
    let (ell0, sqrt_factor) = squarefree_decomposition(ell);
    let ell_norm = if ell0 % 4 == 3 { ell0 } else { 4 * ell0 };
    Ok(FieldTower { ell_input: ell, ell_norm, ell0, sqrt_factor, p, quad: QuadraticField::new(ell0) })
}

impl FieldTower {
    pub fn ell_input(&self) -> u64 {
        self.ell_input
    }

    /// `ℓ` with `−ℓ` the fundamental discriminant of `L`.
    pub fn ell_norm(&self) -> u64 {
        self.ell_norm
    }

    /// Squarefree part of `ℓ`, `δ² = −ℓ₀`.
    pub fn ell0(&self) -> u64 {
        self.ell0
    }

    /// `s` with `ℓ = s²·ℓ₀`, so `√−ℓ = s·δ`.
    pub fn sqrt_factor(&self) -> u64 {
        self.sqrt_factor
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `[M : Q] = p − 1`.
    pub fn half_degree(&self) -> usize {
        (self.p - 1) as usize
    }

    /// `[K : Q] = 2(p − 1)`.
    pub fn degree(&self) -> usize {
        2 * self.half_degree()
    }

    pub fn quadratic(&self) -> &QuadraticField {
        &self.quad
    }

    /// `|disc K| = |disc L|^{p−1} · p^{2(p−2)}` (coprime conductors).
    pub fn abs_discriminant(&self) -> num_bigint::BigInt {
        num_bigint::BigInt::from(self.ell_norm).pow(self.p as u32 - 1) * num_bigint::BigInt::from(self.p).pow(2 * (self.p as u32 - 2))
    }

    pub fn params(&self) -> TowerParams {
        TowerParams { ell_input: self.ell_input, ell_norm: self.ell_norm, p: self.p }
    }
}

//! `O_K`-ideal arithmetic, the different, and the search for an ideal `A` with a totally
//! positive `d ∈ F` such that `Tr_{K/Q}(d·x·ȳ)` is even unimodular on `A`.

mod gram;
mod ideal;
mod order;
mod primes;
mod search;

pub use gram::{trace_gram, verify_even_unimodular, TraceLattice, UnimodularityReport};
pub use ideal::FracIdeal;
pub use order::{clear, row_times, MaximalOrder};
pub use primes::{prime_pool, primes_above, PrimeIdeal};
pub use search::{
    cyclotomic_units, find_unimodular_pair, find_unimodular_pair_with, satisfies_criterion, ExecChoice, SearchBudget, SearchDiagnostics,
    SearchLog, UnimodularPair,
};

use crate::exact_linalg::{invert, LinalgError};
use crate::field_tower::TowerError;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("discriminant of the integral basis is {computed}, expected {expected}")]
    DiscriminantMismatch { computed: String, expected: String },
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("{0} ramifies in K")]
    Ramified(u64),
    #[error("search exhausted: {0}")]
    SearchExhausted(Box<SearchDiagnostics>),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
}

/// `D^{-1} = {x : Tr(x·O_K) ⊆ Z}`, whose basis is given by the rows of the inverse trace form.
pub fn inverse_different(order: &MaximalOrder) -> Result<FracIdeal, LatticeError> {
    let tinv = invert(&order.trace_form().to_rat())?;
    let rows: Vec<Vec<BigRational>> = (0..tinv.rows()).map(|i| tinv.row(i).to_vec()).collect();
    FracIdeal::from_basis(order, &rows)
}

/// The different ideal `D_{K/Q}`.
pub fn different_ideal(order: &MaximalOrder) -> Result<FracIdeal, LatticeError> {
    inverse_different(order)?.inverse(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::build_tower;
    use num_bigint::BigInt;

    #[test]
    fn different_norm_is_discriminant() {
        for (ell, p) in [(1, 5), (3, 5), (2, 5), (7, 13)] {
            let t = build_tower(ell, p).unwrap();
            let o = MaximalOrder::new(&t).unwrap();
            let d = different_ideal(&o).unwrap();
            assert!(d.is_integral());
            assert_eq!(d.norm(), BigRational::from_integer(t.abs_discriminant()));
            assert_eq!(d.conj(&o).unwrap(), d);
            assert_eq!(d.mul(&inverse_different(&o).unwrap(), &o).unwrap(), FracIdeal::unit(&o));
        }
    }

    #[test]
    fn quadratic_different_is_sqrt_disc() {
        // the different of O_K contains √−ell_norm·(1 − ζ)^{p−2}
        let t = build_tower(3, 5).unwrap();
        let o = MaximalOrder::new(&t).unwrap();
        let d = different_ideal(&o).unwrap();
        let s = t.from_l(&t.quadratic().sqrt_disc());
        let one_minus = t.sub(&t.one(), &t.zeta());
        let g = t.mul(&s, &t.pow(&one_minus, 3));
        let gi = o.from_k_int(&g).unwrap();
        assert_eq!(FracIdeal::principal_int(&o, &gi).unwrap(), d);
        let _ = BigInt::from(0);
    }
}

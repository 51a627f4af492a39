use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::order::{clear, row_times, MaximalOrder};
use super::search::UnimodularPair;
use super::LatticeError;
use crate::exact_linalg::det::leading_minors;
use crate::exact_linalg::{det_int, IntMatrix};

/// The `Z`-lattice `(A, Tr_{K/Q}(d·x·ȳ))` on the HNF basis of `A`.
#[derive(Clone, Debug)]
pub struct TraceLattice {
    pub pair: UnimodularPair,
    /// Basis rows of `A` over the `O_K` basis, to be divided by `den`.
    pub zbasis: IntMatrix,
    pub den: BigInt,
    pub gram: IntMatrix,
}

/// Gram matrix `G_ij = Tr_{K/Q}(d·b_i·conj(b_j))` on the ideal's basis.
pub fn trace_gram(order: &MaximalOrder, pair: &UnimodularPair) -> Result<TraceLattice, LatticeError> {
    let ideal = &pair.ideal;
    let rows = ideal.basis().to_rows();
    let dk = order.from_k(pair.d.as_k());
    let (dden, dint) = clear(&dk);
    let h = order.hermitian_form();
    // G = (d·B)·H·Bᵀ / (dden·den²)
    let db: Vec<Vec<BigInt>> = rows.iter().map(|r| row_times(&order.mul(&dint, r), h)).collect();
    let scale = &dden * ideal.den() * ideal.den();
    let n = rows.len();
    let mut gram = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v: BigInt = db[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            let (q, r) = v.div_rem(&scale);
            if !r.is_zero() {
                return Err(LatticeError::InvalidPair(format!("Gram entry ({i},{j}) = {} is not integral", BigRational::new(v, scale.clone()))));
            }
            gram[(i, j)] = q;
        }
    }
    Ok(TraceLattice { pair: pair.clone(), zbasis: ideal.basis().clone(), den: ideal.den().clone(), gram })
}

/// Pass/fail of the five even-unimodular conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodularityReport {
    pub dim: usize,
    pub det: String,
    pub integral: bool,
    pub symmetric: bool,
    pub even: bool,
    pub det_one: bool,
    pub positive_definite: bool,
    pub dim_divisible_by_8: bool,
}

impl UnimodularityReport {
    pub fn all_pass(&self) -> bool {
        self.integral && self.symmetric && self.even && self.det_one && self.positive_definite && self.dim_divisible_by_8
    }
}

/// Checks integrality, evenness, determinant one, positive definiteness by leading
/// minors, and dimension divisible by eight.
pub fn verify_even_unimodular(gram: &[Vec<BigRational>]) -> UnimodularityReport {
    let n = gram.len();
    let integral = gram.iter().flatten().all(|x| x.is_integer());
    let symmetric = (0..n).all(|i| (0..n).all(|j| gram[i][j] == gram[j][i]));
    let even = integral && (0..n).all(|i| gram[i][i].to_integer().is_even());
    let (det, positive_definite) = if integral {
        let m = IntMatrix::from_rows(gram.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect());
        let det = det_int(&m).unwrap_or_else(|_| BigInt::zero());
        (det, symmetric && leading_minors(&m).iter().all(|x| x.is_positive()))
    } else {
        let sc = gram.iter().flatten().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let m = IntMatrix::from_rows(gram.iter().map(|r| r.iter().map(|x| (x * BigRational::from_integer(sc.clone())).to_integer()).collect()).collect());
        let d = det_int(&m).unwrap_or_else(|_| BigInt::zero());
        let pd = symmetric && leading_minors(&m).iter().all(|x| x.is_positive());
        (d, pd)
    };
    UnimodularityReport {
        dim: n,
        det: det.to_string(),
        integral,
        symmetric,
        even,
        det_one: integral && det.is_one(),
        positive_definite,
        dim_divisible_by_8: n > 0 && n % 8 == 0,
    }
}

impl TraceLattice {
    pub fn report(&self) -> UnimodularityReport {
        verify_even_unimodular(&self.gram.to_rat().to_rows())
    }
}

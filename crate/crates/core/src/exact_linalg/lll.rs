//! Exact LLL reduction of a positive definite Gram matrix.
//!
//! Integral variant: the Gram–Schmidt data is carried as the integers `d_i` (leading
//! minors) and `λ_{k,j} = d_j·μ_{k,j}`, so every step stays in `Z`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{GramForm, IntMatrix, RatMatrix};
use super::LinalgError;

#[derive(Clone, Debug)]
pub struct LllResult {
    /// `tᵀ·q·t`.
    pub gram: GramForm,
    /// Columns are the reduced basis in the input coordinates.
    pub transform: IntMatrix,
    /// Squared Gram–Schmidt norms of the reduced basis.
    pub gs_norms: Vec<BigRational>,
}

pub fn default_delta() -> BigRational {
    BigRational::new(99.into(), 100.into())
}

pub fn lll_reduce(q: &GramForm, delta: &BigRational) -> Result<LllResult, LinalgError> {
    let quarter = BigRational::new(1.into(), 4.into());
    if *delta <= quarter || *delta >= BigRational::one() {
        return Err(LinalgError::BadDelta(delta.to_string()));
    }
    let n = q.dim();
    let (scale, gi) = q.matrix().clear_denominators();
    let mut st = State::new(&gi);
    if n > 0 {
        st.run(delta.numer(), delta.denom())?;
    }
    let transform = IntMatrix::from_rows(st.h[1..].to_vec()).transpose();
    let scale_q = BigRational::from_integer(scale);
    let gram_rows: Vec<Vec<BigRational>> = (1..=n)
        .map(|i| (1..=n).map(|j| BigRational::from_integer(st.g[i][j].clone()) / &scale_q).collect())
        .collect();
    let gs_norms = (1..=n)
        .map(|i| BigRational::new(st.d[i].clone(), st.d[i - 1].clone()) / &scale_q)
        .collect();
    Ok(LllResult {
        gram: GramForm::new(if n == 0 { RatMatrix::zeros(0, 0) } else { RatMatrix::from_rows(gram_rows) })?,
        transform: if n == 0 { IntMatrix::zeros(0, 0) } else { transform },
        gs_norms,
    })
}

struct State {
    n: usize,
    // 1-indexed; row/col 0 unused
    g: Vec<Vec<BigInt>>,
    // h[k] is the k-th basis vector in input coordinates
    h: Vec<Vec<BigInt>>,
    lam: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
}

impl State {
    fn new(gi: &IntMatrix) -> Self {
        let n = gi.rows();
        let mut g = vec![vec![BigInt::zero(); n + 1]; n + 1];
        for i in 0..n {
            for j in 0..n {
                g[i + 1][j + 1] = gi[(i, j)].clone();
            }
        }
        let mut h = vec![vec![BigInt::zero(); n]; n + 1];
        for k in 1..=n {
            h[k][k - 1] = BigInt::one();
        }
        State { n, g, h, lam: vec![vec![BigInt::zero(); n + 1]; n + 1], d: vec![BigInt::zero(); n + 1] }
    }

    fn run(&mut self, a: &BigInt, b: &BigInt) -> Result<(), LinalgError> {
        let n = self.n;
        self.d[0] = BigInt::one();
        self.d[1] = self.g[1][1].clone();
        if !self.d[1].is_positive() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let mut k = 2;
        let mut kmax = 1;
        while k <= n {
            if k > kmax {
                kmax = k;
                for j in 1..=k {
                    let mut u = self.g[k][j].clone();
                    for i in 1..j {
                        u = (&self.d[i] * &u - &self.lam[k][i] * &self.lam[j][i]) / &self.d[i - 1];
                    }
                    if j < k {
                        self.lam[k][j] = u;
                    } else {
                        if !u.is_positive() {
                            return Err(LinalgError::NotPositiveDefinite);
                        }
                        self.d[k] = u;
                    }
                }
            }
            self.red(k, k - 1);
            let lhs = b * &self.d[k] * &self.d[k - 2];
            let rhs = a * &self.d[k - 1] * &self.d[k - 1] - b * &self.lam[k][k - 1] * &self.lam[k][k - 1];
            if lhs < rhs {
                self.swap(k, kmax);
                k = std::cmp::max(2, k - 1);
            } else {
                for l in (1..k - 1).rev() {
                    self.red(k, l);
                }
                k += 1;
            }
        }
        Ok(())
    }

    fn red(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lam[k][l] * 2;
        if two_lam.abs() <= self.d[l] {
            return;
        }
        let dl = &self.d[l];
        let q = (two_lam + dl).div_floor(&(dl * BigInt::from(2)));
        // basis and Gram
        for idx in 0..self.n {
            let t = &q * &self.h[l][idx];
            self.h[k][idx] -= t;
        }
        for j in 1..=self.n {
            let t = &q * &self.g[l][j];
            self.g[k][j] -= t;
        }
        for i in 1..=self.n {
            let t = &q * &self.g[i][l];
            self.g[i][k] -= t;
        }
        let t = &q * &self.d[l];
        self.lam[k][l] -= t;
        for i in 1..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.h.swap(k, k - 1);
        self.g.swap(k, k - 1);
        for row in self.g.iter_mut() {
            row.swap(k, k - 1);
        }
        for j in 1..k.saturating_sub(1) {
            let t = self.lam[k][j].clone();
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let bb = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lam[i][k - 1] = (&bb * &t + &lam * &self.lam[i][k]) / &self.d[k];
        }
        self.d[k - 1] = bb;
    }
}

/// Checks size reduction and the Lovász condition under exact rational Gram–Schmidt.
pub fn is_lll_reduced(q: &GramForm, delta: &BigRational) -> bool {
    let n = q.dim();
    let g = q.matrix();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bn = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut v = g[(i, j)].clone();
            for k in 0..j {
                v -= &mu[i][k] * &mu[j][k] * &bn[k];
            }
            mu[i][j] = v / &bn[j];
        }
        let mut v = g[(i, i)].clone();
        for k in 0..i {
            v -= &mu[i][k] * &mu[i][k] * &bn[k];
        }
        bn[i] = v;
    }
    let half = BigRational::new(1.into(), 2.into());
    for i in 0..n {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 && bn[i] < (delta - &mu[i][i - 1] * &mu[i][i - 1]) * &bn[i - 1] {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::det::{det_exact, is_unimodular};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_size_reduction() {
        let q = GramForm::from_i64(&[vec![4, 2], vec![2, 4]]).unwrap();
        let r = lll_reduce(&q, &BigRational::new(3.into(), 4.into())).unwrap();
        let g = r.gram.matrix();
        assert!(g[(0, 0)] <= g[(1, 1)]);
        assert!(g[(0, 1)].abs() * BigRational::from_integer(2.into()) <= g[(0, 0)]);
    }

    #[test]
    fn reduced_input_is_fixed() {
        let q = GramForm::from_i64(&[vec![2, 1, 0], vec![1, 2, 0], vec![0, 0, 2]]).unwrap();
        assert!(is_lll_reduced(&q, &default_delta()));
        let r = lll_reduce(&q, &default_delta()).unwrap();
        assert_eq!(r.transform, IntMatrix::identity(3));
    }

    #[test]
    fn rejects_bad_input() {
        let q = GramForm::from_i64(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(lll_reduce(&q, &default_delta()).unwrap_err(), LinalgError::NotPositiveDefinite);
        let q = GramForm::from_i64(&[vec![1]]).unwrap();
        assert!(matches!(lll_reduce(&q, &BigRational::new(1.into(), 5.into())), Err(LinalgError::BadDelta(_))));
    }

    proptest! {
        #[test]
        fn lll_invariants(entries in proptest::collection::vec(-6i64..7, 16)) {
            // random basis b, q = bᵀb (positive definite unless b singular)
            let b = IntMatrix::from_i64(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec(), entries[12..16].to_vec()]);
            let q = GramForm::from_int(&b.transpose().mul(&b)).unwrap();
            prop_assume!(q.is_positive_definite());
            let delta = default_delta();
            let r = lll_reduce(&q, &delta).unwrap();
            prop_assert!(is_unimodular(&r.transform));
            prop_assert_eq!(&q.transform(&r.transform), &r.gram);
            prop_assert!(is_lll_reduced(&r.gram, &delta));
            let det = det_exact(q.matrix()).unwrap();
            prop_assert_eq!(det_exact(r.gram.matrix()).unwrap(), det.clone());
            let prod = r.gs_norms.iter().fold(BigRational::one(), |acc, x| acc * x);
            prop_assert_eq!(prod, det);
        }
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{IntMatrix, RatMatrix};
use super::LinalgError;

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn det_int(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// Exact determinant of a rational matrix: rows are scaled to integers, then Bareiss.
pub fn det_exact(m: &RatMatrix) -> Result<BigRational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let den = m.row(i).iter().fold(BigInt::one(), |acc, a| num_integer::Integer::lcm(&acc, a.denom()));
        rows.push(m.row(i).iter().map(|a| (a * BigRational::from_integer(den.clone())).to_integer()).collect());
        scale *= den;
    }
    let d = det_int(&IntMatrix::from_rows(rows))?;
    Ok(BigRational::new(d, scale))
}

/// Leading principal minors `d_1, …, d_n` of a square integer matrix. Once a minor
/// vanishes the remaining entries are reported as zero.
pub fn leading_minors(m: &IntMatrix) -> Vec<BigInt> {
    assert!(m.is_square());
    let n = m.rows();
    let mut a = m.to_rows();
    let mut out = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            out.resize(n, BigInt::zero());
            return out;
        }
        out.push(a[k][k].clone());
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    out
}

/// Exact inverse by Gauss–Jordan elimination over the rationals.
pub fn invert(m: &RatMatrix) -> Result<RatMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::Singular)?;
        a.swap(piv, k);
        inv.swap(piv, k);
        let p = a[k][k].clone();
        for j in 0..n {
            a[k][j] = &a[k][j] / &p;
            inv[k][j] = &inv[k][j] / &p;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    Ok(RatMatrix::from_rows(inv))
}

/// Solves `m·x = b` for square nonsingular `m`.
pub fn solve(m: &RatMatrix, b: &[BigRational]) -> Result<Vec<BigRational>, LinalgError> {
    Ok(invert(m)?.mul_vec(b))
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    det_int(m).map(|d| d.abs().is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn identity_and_small_cases() {
        assert_eq!(det_exact(&RatMatrix::identity(8)).unwrap(), r(1, 1));
        assert_eq!(det_exact(&RatMatrix::from_i64(&[vec![2, 1], vec![1, 2]])).unwrap(), r(3, 1));
        assert_eq!(det_int(&IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]])).unwrap(), BigInt::from(-1));
        assert_eq!(det_int(&IntMatrix::from_i64(&[vec![1, 2], vec![2, 4]])).unwrap(), BigInt::zero());
    }

    #[test]
    fn non_square_is_an_error() {
        let m = RatMatrix::zeros(2, 3);
        assert!(matches!(det_exact(&m), Err(LinalgError::NotSquare { .. })));
        assert!(matches!(invert(&m), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn rational_det() {
        let m = RatMatrix::from_rows(vec![vec![r(1, 2), r(1, 3)], vec![r(1, 4), r(1, 5)]]);
        assert_eq!(det_exact(&m).unwrap(), r(1, 10) - r(1, 12));
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(invert(&RatMatrix::identity(4)).unwrap(), RatMatrix::identity(4));
        let m = RatMatrix::from_i64(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(invert(&m).unwrap(), RatMatrix::from_rows(vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(1, 2)]]));
        assert_eq!(invert(&RatMatrix::from_i64(&[vec![1, 2], vec![2, 4]])), Err(LinalgError::Singular));
    }

    #[test]
    fn minors() {
        let m = IntMatrix::from_i64(&[vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]]);
        let mins: Vec<i64> = leading_minors(&m).iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(mins, vec![2, 3, 4]);
    }
}

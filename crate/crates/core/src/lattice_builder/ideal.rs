use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::order::{clear, row_times, MaximalOrder};
use super::LatticeError;
use crate::exact_linalg::hnf::{hnf_rows, kernel, triangular_det};
use crate::exact_linalg::{det_int, IntMatrix};

/// A fractional `O_K`-ideal `basis/den` in canonical form: `basis` is the row HNF of an
/// integral lattice, `den > 0` and the gcd of `den` with all entries is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    basis: IntMatrix,
    den: BigInt,
}

impl FracIdeal {
    fn canonical(rows: Vec<Vec<BigInt>>, den: BigInt, n: usize) -> Result<Self, LatticeError> {
        if rows.len() != n {
            return Err(LatticeError::ZeroIdeal);
        }
        let g = rows.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        let rows: Vec<Vec<BigInt>> = rows.into_iter().map(|r| r.into_iter().map(|x| x / &g).collect()).collect();
        Ok(FracIdeal { basis: IntMatrix::from_rows(rows), den: den / g })
    }

    /// The ideal with the given `Z`-basis (square, full rank).
    pub fn from_basis(order: &MaximalOrder, rows: &[Vec<BigRational>]) -> Result<Self, LatticeError> {
        let n = order.degree();
        if rows.len() != n {
            return Err(LatticeError::ZeroIdeal);
        }
        let den = rows.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        let det = det_int(&IntMatrix::from_rows(ints.clone()))?.abs();
        if det.is_zero() {
            return Err(LatticeError::ZeroIdeal);
        }
        Self::canonical(hnf_rows(ints, n, Some(&det)), den, n)
    }

    /// `Z`-span of integral generators, given a positive integer the lattice is known to contain
    /// times `Zⁿ`.
    fn from_int_generators<I>(order: &MaximalOrder, gens: I, modulus: &BigInt, den: BigInt) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = Vec<BigInt>>,
    {
        let n = order.degree();
        Self::canonical(hnf_rows(gens, n, Some(modulus)), den, n)
    }

    pub fn unit(order: &MaximalOrder) -> Self {
        FracIdeal { basis: IntMatrix::identity(order.degree()), den: BigInt::one() }
    }

    /// `x·O_K`.
    pub fn principal(order: &MaximalOrder, x: &[BigRational]) -> Result<Self, LatticeError> {
        let (d, xi) = clear(x);
        if xi.iter().all(Zero::is_zero) {
            return Err(LatticeError::ZeroIdeal);
        }
        let m = order.mult_matrix(&xi);
        let det = det_int(&m)?.abs();
        Self::from_int_generators(order, m.to_rows(), &det, d)
    }

    pub fn principal_int(order: &MaximalOrder, x: &[BigInt]) -> Result<Self, LatticeError> {
        let r: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        Self::principal(order, &r)
    }

    /// `qO_K + Σ gens·O_K` for integral `gens`.
    pub fn from_generators_mod(order: &MaximalOrder, q: &BigInt, gens: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let all = gens.iter().flat_map(|g| order.mult_matrix(g).to_rows());
        Self::from_int_generators(order, all, q, BigInt::one())
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Basis rows as rational coordinate vectors.
    pub fn rational_rows(&self) -> Vec<Vec<BigRational>> {
        self.basis
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| BigRational::new(x, self.den.clone())).collect())
            .collect()
    }

    /// `[O_K : I]` extended multiplicatively.
    pub fn norm(&self) -> BigRational {
        let n = self.dim() as u32;
        BigRational::new(triangular_det(&self.basis.to_rows()), self.den.pow(n))
    }

    /// Integer `|det|` of the integral part.
    fn lattice_det(&self) -> BigInt {
        triangular_det(&self.basis.to_rows())
    }

    pub fn mul(&self, other: &FracIdeal, order: &MaximalOrder) -> Result<FracIdeal, LatticeError> {
        let modulus = self.lattice_det() * other.lattice_det();
        let a = self.basis.to_rows();
        let b = other.basis.to_rows();
        let gens = a.iter().flat_map(|x| b.iter().map(move |y| order.mul(x, y)));
        Self::from_int_generators(order, gens, &modulus, &self.den * &other.den)
    }

    pub fn conj(&self, order: &MaximalOrder) -> Result<FracIdeal, LatticeError> {
        let rows = self.basis.to_rows().iter().map(|r| order.conj(r)).collect::<Vec<_>>();
        Self::from_int_generators(order, rows, &self.lattice_det(), self.den.clone())
    }

    /// `I^{-1} = {x : x·I ⊆ O_K}` by dualizing the lattice of all coordinate functionals
    /// `x ↦ (x·b)_j`.
    pub fn inverse(&self, order: &MaximalOrder) -> Result<FracIdeal, LatticeError> {
        let n = order.degree();
        let det = self.lattice_det();
        // columns of each mult matrix, as rows
        let cols = self.basis.to_rows().into_iter().flat_map(|b| {
            let m = order.mult_matrix(&b);
            (0..n).map(move |j| m.col(j))
        });
        let h = hnf_rows(cols, n, Some(&det));
        if h.len() != n {
            return Err(LatticeError::ZeroIdeal);
        }
        // dual basis: rows of (Hᵀ)^{-1}, scaled to the integral lattice det·(Hᵀ)^{-1}
        let inv = upper_inverse_scaled(&h, &det);
        let rows: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| inv[j][i].clone()).collect()).collect();
        // O_K ⊆ I^{-1}, so the scaled lattice contains den·det·Zⁿ
        let modulus = &det * &self.den;
        let scaled_rows = rows.into_iter().map(|r| r.into_iter().map(|x| x * &self.den).collect());
        Self::canonical(hnf_rows(scaled_rows, n, Some(&modulus)), det, n)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        let n = self.dim();
        let scaled: Vec<BigRational> = x.iter().map(|c| c * BigRational::from_integer(self.den.clone())).collect();
        if scaled.iter().any(|c| !c.is_integer()) {
            return false;
        }
        let mut v: Vec<BigInt> = scaled.into_iter().map(|c| c.to_integer()).collect();
        for i in 0..n {
            let piv = &self.basis[(i, i)];
            if !v[i].is_multiple_of(piv) {
                return false;
            }
            let q = &v[i] / piv;
            if !q.is_zero() {
                for (vj, bj) in v.iter_mut().zip(self.basis.row(i)) {
                    *vj -= &q * bj;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// Every basis vector times every ring generator stays inside.
    pub fn is_ideal(&self, order: &MaximalOrder) -> bool {
        let gens = [order.zeta_matrix().clone(), order.mult_matrix(&order.unit_vector(order.degree() / 2))];
        self.rational_rows().iter().all(|r| {
            let (d, ri) = clear(r);
            gens.iter().all(|g| {
                let img: Vec<BigRational> = row_times(&ri, g).into_iter().map(|c| BigRational::new(c, d.clone())).collect();
                self.contains(&img)
            })
        })
    }

    /// `Z`-basis of `I ∩ F`, the conjugation-fixed part.
    pub fn fixed_sublattice(&self, order: &MaximalOrder) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let c_minus = order.conj_matrix().sub(&IntMatrix::identity(n));
        let bc = self.basis.mul(&c_minus);
        let ker = kernel(&bc.transpose());
        (0..ker.cols())
            .map(|k| {
                let y = ker.col(k);
                row_times(&y, &self.basis).into_iter().map(|c| BigRational::new(c, self.den.clone())).collect()
            })
            .collect()
    }

    pub fn scale(&self, k: &BigRational) -> FracIdeal {
        let rows = self.basis.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * k.numer()).collect()).collect();
        let n = self.dim();
        Self::canonical(rows, &self.den * k.denom(), n).expect("nonzero scalar")
    }
}

/// `s·H^{-1}` for upper-triangular integral `H` with `s·H^{-1}` integral.
fn upper_inverse_scaled(h: &[Vec<BigInt>], s: &BigInt) -> Vec<Vec<BigInt>> {
    let n = h.len();
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for i in (0..n).rev() {
        let piv = BigRational::from_integer(h[i][i].clone());
        inv[i][i] = BigRational::one() / &piv;
        for j in (i + 1)..n {
            let mut acc = BigRational::zero();
            for k in (i + 1)..=j {
                if !h[i][k].is_zero() {
                    acc += BigRational::from_integer(h[i][k].clone()) * &inv[k][j];
                }
            }
            inv[i][j] = -acc / &piv;
        }
    }
    let sr = BigRational::from_integer(s.clone());
    inv.into_iter().map(|r| r.into_iter().map(|x| (x * &sr).to_integer()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::build_tower;

    fn int(n: i64, o: &MaximalOrder) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); o.degree()];
        v[0] = BigRational::from_integer(BigInt::from(n));
        v
    }

    #[test]
    fn principal_arithmetic() {
        let t = build_tower(3, 5).unwrap();
        let o = MaximalOrder::new(&t).unwrap();
        let two = FracIdeal::principal(&o, &int(2, &o)).unwrap();
        let three = FracIdeal::principal(&o, &int(3, &o)).unwrap();
        let six = FracIdeal::principal(&o, &int(6, &o)).unwrap();
        assert_eq!(two.mul(&three, &o).unwrap(), six);
        assert_eq!(two.norm(), BigRational::from_integer(BigInt::from(256)));
        let unit = FracIdeal::unit(&o);
        assert_eq!(two.mul(&unit, &o).unwrap(), two);
        let half = two.inverse(&o).unwrap();
        assert_eq!(half, FracIdeal::principal(&o, &[vec![BigRational::new(1.into(), 2.into())], vec![BigRational::zero(); 7]].concat()).unwrap());
        assert_eq!(half.mul(&two, &o).unwrap(), unit);
    }

    #[test]
    fn non_principal_shapes() {
        let t = build_tower(1, 5).unwrap();
        let o = MaximalOrder::new(&t).unwrap();
        // (1 − ζ) has norm 5² in K
        let mut x = o.one();
        x[1] = BigInt::from(-1);
        let i = FracIdeal::principal_int(&o, &x).unwrap();
        assert_eq!(i.norm(), BigRational::from_integer(BigInt::from(25)));
        assert!(i.is_ideal(&o));
        assert_eq!(i.conj(&o).unwrap(), i);
        let inv = i.inverse(&o).unwrap();
        assert_eq!(inv.mul(&i, &o).unwrap(), FracIdeal::unit(&o));
        assert_eq!(i.fixed_sublattice(&o).len(), 4);
        // (2, 1+i) over Z[i]: 2 ramifies in L
        let mut y = o.one();
        y[4] = BigInt::one();
        let p2 = FracIdeal::from_generators_mod(&o, &BigInt::from(2), &[y]).unwrap();
        assert_eq!(p2.norm(), BigRational::from_integer(BigInt::from(16)));
        assert_eq!(p2.mul(&p2, &o).unwrap(), FracIdeal::principal(&o, &int(2, &o)).unwrap());
    }
}

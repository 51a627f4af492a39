use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LatticeError;
use crate::exact_linalg::{det_int, IntMatrix};
use crate::field_tower::{FieldTower, KElement};

/// The ring of integers `O_K = O_L ⊗ O_M` with basis `ζ^0..ζ^{p−2}, ωζ^0..ωζ^{p−2}`.
///
/// Elements are coordinate rows over this basis. A linear map `f` is stored as the matrix
/// whose row `i` holds the coordinates of `f(e_i)`, so it acts by `x ↦ x·F`.
#[derive(Clone, Debug)]
pub struct MaximalOrder {
    tower: FieldTower,
    half: usize,
    omega_trace: BigInt,
    omega_norm: BigInt,
    trace_vec: Vec<BigInt>,
    trace_form: IntMatrix,
    hermitian_form: IntMatrix,
    conj: IntMatrix,
    zeta: IntMatrix,
}

fn ri(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MaximalOrder {
    /// Builds the tensor basis and checks its discriminant against the closed form.
    pub fn new(tower: &FieldTower) -> Result<Self, LatticeError> {
        let q = tower.quadratic();
        let half = tower.half_degree();
        let mut o = MaximalOrder {
            tower: tower.clone(),
            half,
            omega_trace: BigInt::from(q.omega_trace()),
            omega_norm: BigInt::from(q.omega_norm()),
            trace_vec: Vec::new(),
            trace_form: IntMatrix::zeros(0, 0),
            hermitian_form: IntMatrix::zeros(0, 0),
            conj: IntMatrix::zeros(0, 0),
            zeta: IntMatrix::zeros(0, 0),
        };
        let n = o.degree();
        o.trace_vec = (0..n)
            .map(|i| {
                let t = tower.trace_q(&o.to_k_int(&o.unit_vector(i)));
                t.to_integer()
            })
            .collect();
        let conj_rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| o.from_k_int(&tower.conj(&o.to_k_int(&o.unit_vector(i)))).expect("O_K is conjugation stable"))
            .collect();
        o.conj = IntMatrix::from_rows(conj_rows);
        let mut zeta_e = vec![BigInt::zero(); n];
        zeta_e[1 % half] = BigInt::one();
        if half == 1 {
            zeta_e[0] = -BigInt::one();
        }
        o.zeta = o.mult_matrix(&zeta_e);
        let mut tf = IntMatrix::zeros(n, n);
        let mut hf = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let eij = o.mul(&o.unit_vector(i), &o.unit_vector(j));
                let t = o.trace(&eij);
                tf[(i, j)] = t.clone();
                tf[(j, i)] = t;
                let cj = o.conj.row(j).to_vec();
                let hij = o.trace(&o.mul(&o.unit_vector(i), &cj));
                let cji = o.trace(&o.mul(&o.unit_vector(j), o.conj.row(i)));
                hf[(i, j)] = hij;
                hf[(j, i)] = cji;
            }
        }
        o.trace_form = tf;
        o.hermitian_form = hf;
        let disc = det_int(&o.trace_form)?;
        if disc.abs() != tower.abs_discriminant() {
            return Err(LatticeError::DiscriminantMismatch { computed: disc.to_string(), expected: tower.abs_discriminant().to_string() });
        }
        Ok(o)
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    /// `[K : Q]`.
    pub fn degree(&self) -> usize {
        2 * self.half
    }

    pub fn unit_vector(&self, i: usize) -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); self.degree()];
        e[i] = BigInt::one();
        e
    }

    pub fn one(&self) -> Vec<BigInt> {
        self.unit_vector(0)
    }

    fn cyc_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let p = self.half + 1;
        let mut c = vec![BigInt::zero(); p];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    c[(i + j) % p] += x * y;
                }
            }
        }
        let top = c.pop().expect("length p");
        if !top.is_zero() {
            for v in c.iter_mut() {
                *v -= &top;
            }
        }
        c
    }

    /// Product of two integral elements.
    pub fn mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let (a1, b1) = x.split_at(self.half);
        let (a2, b2) = y.split_at(self.half);
        let aa = self.cyc_mul(a1, a2);
        let bb = self.cyc_mul(b1, b2);
        let ab = self.cyc_mul(a1, b2);
        let ba = self.cyc_mul(b1, a2);
        // ω² = tω − n
        let mut out: Vec<BigInt> = aa.iter().zip(&bb).map(|(u, v)| u - v * &self.omega_norm).collect();
        out.extend(ab.iter().zip(&ba).zip(&bb).map(|((u, v), w)| u + v + w * &self.omega_trace));
        out
    }

    /// Product of rational elements.
    pub fn mul_rat(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let (dx, xi) = clear(x);
        let (dy, yi) = clear(y);
        let den = dx * dy;
        self.mul(&xi, &yi).into_iter().map(|c| BigRational::new(c, den.clone())).collect()
    }

    /// Matrix of `y ↦ x·y` in the row convention.
    pub fn mult_matrix(&self, x: &[BigInt]) -> IntMatrix {
        IntMatrix::from_rows((0..self.degree()).map(|i| self.mul(x, &self.unit_vector(i))).collect())
    }

    pub fn trace(&self, x: &[BigInt]) -> BigInt {
        x.iter().zip(&self.trace_vec).map(|(a, b)| a * b).sum()
    }

    pub fn trace_rat(&self, x: &[BigRational]) -> BigRational {
        x.iter().zip(&self.trace_vec).map(|(a, b)| a * BigRational::from_integer(b.clone())).sum()
    }

    /// `Tr_{K/Q}(e_i e_j)`.
    pub fn trace_form(&self) -> &IntMatrix {
        &self.trace_form
    }

    /// `Tr_{K/Q}(e_i conj(e_j))`.
    pub fn hermitian_form(&self) -> &IntMatrix {
        &self.hermitian_form
    }

    pub fn conj_matrix(&self) -> &IntMatrix {
        &self.conj
    }

    /// Multiplication by `ζ`.
    pub fn zeta_matrix(&self) -> &IntMatrix {
        &self.zeta
    }

    pub fn conj(&self, x: &[BigInt]) -> Vec<BigInt> {
        row_times(x, &self.conj)
    }

    pub fn conj_rat(&self, x: &[BigRational]) -> Vec<BigRational> {
        let (d, xi) = clear(x);
        row_times(&xi, &self.conj).into_iter().map(|c| BigRational::new(c, d.clone())).collect()
    }

    /// Power-basis coordinates of an element given on the integral basis.
    pub fn to_k(&self, x: &[BigRational]) -> KElement {
        let n = self.half;
        let (c, e) = x.split_at(n);
        let mut coords: Vec<BigRational> = Vec::with_capacity(2 * n);
        if self.omega_trace.is_one() {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            coords.extend(c.iter().zip(e).map(|(ci, ei)| ci + ei * &half));
            coords.extend(e.iter().map(|ei| ei * &half));
        } else {
            coords.extend(c.iter().cloned());
            coords.extend(e.iter().cloned());
        }
        KElement::from_coords(coords)
    }

    pub fn to_k_int(&self, x: &[BigInt]) -> KElement {
        let r: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        self.to_k(&r)
    }

    /// Integral-basis coordinates of a field element.
    pub fn from_k(&self, x: &KElement) -> Vec<BigRational> {
        let n = self.half;
        let (a, b) = x.coords().split_at(n);
        if self.omega_trace.is_one() {
            // x = Σ (c + e/2)ζ^i + (e/2)δζ^i
            let e: Vec<BigRational> = b.iter().map(|v| v * ri(2)).collect();
            let c: Vec<BigRational> = a.iter().zip(b).map(|(u, v)| u - v).collect();
            c.into_iter().chain(e).collect()
        } else {
            x.coords().to_vec()
        }
    }

    /// Integral coordinates, or `None` outside `O_K`.
    pub fn from_k_int(&self, x: &KElement) -> Option<Vec<BigInt>> {
        self.from_k(x).into_iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

/// `(d, d·x)` with `d` the least common denominator.
pub fn clear(x: &[BigRational]) -> (BigInt, Vec<BigInt>) {
    let d = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let v = x.iter().map(|c| (c * BigRational::from_integer(d.clone())).to_integer()).collect();
    (d, v)
}

pub fn row_times(x: &[BigInt], m: &IntMatrix) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.cols()];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (o, mij) in out.iter_mut().zip(m.row(i)) {
            *o += xi * mij;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::build_tower;

    #[test]
    fn discriminant_matches_closed_form() {
        for (ell, p) in [(1, 5), (3, 5), (7, 5), (2, 5), (3, 13), (12, 5)] {
            let t = build_tower(ell, p).unwrap();
            MaximalOrder::new(&t).unwrap();
        }
    }

    #[test]
    fn closure_and_roundtrip() {
        let t = build_tower(7, 5).unwrap();
        let o = MaximalOrder::new(&t).unwrap();
        assert!(o.zeta_matrix().pow(5).is_identity());
        assert!(o.conj_matrix().pow(2).is_identity());
        for i in 0..o.degree() {
            let e = o.unit_vector(i);
            let k = o.to_k_int(&e);
            assert_eq!(o.from_k_int(&k).unwrap(), e);
            let zk = t.mul(&t.zeta(), &k);
            assert_eq!(o.from_k_int(&zk).unwrap(), row_times(&e, o.zeta_matrix()));
            for j in 0..o.degree() {
                let f = o.unit_vector(j);
                let prod = t.mul(&k, &o.to_k_int(&f));
                assert_eq!(o.from_k_int(&prod).unwrap(), o.mul(&e, &f));
            }
        }
    }

    #[test]
    fn half_integral_element_is_outside() {
        let t = build_tower(3, 5).unwrap();
        let o = MaximalOrder::new(&t).unwrap();
        let half = t.scale(&t.one(), &BigRational::new(BigInt::one(), BigInt::from(2)));
        assert!(o.from_k_int(&half).is_none());
        assert!(o.hermitian_form().is_symmetric());
    }
}

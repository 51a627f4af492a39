//! The Hermitian `O_L`-structure `h(x, y) = Tr_{K/L}(d·x·ȳ)` on a trace lattice, the
//! `ζ`-automorphism, representation numbers and theta-series checks.

mod repnum;
mod theta;

pub use repnum::{
    congruence_check, rep_number_coset, rep_numbers, u_invariance_check, CongruenceEntry, CongruenceReport, HermMatrixL, InvarianceReport,
    RepNumberTable,
};
pub use theta::{e8_cartan_gram, e8_identify, theta_genus1, transform_check_genus1, E8Report, TransformPoint, TransformReport};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact_linalg::{det_int, invert, GramForm, IntMatrix, LinalgError, ShortVectors};
use crate::exec::Exec;
use crate::field_tower::{LElement, QuadraticField};
use crate::lattice_builder::{clear, MaximalOrder, TraceLattice};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ThetaError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("the zeta action is not integral on the ideal basis")]
    NonIntegralAction,
    #[error("lattice shape mismatch: {0}")]
    Shape(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("precision {target:e} unreachable with coefficient bound {bound}; best certified error {achievable:e}")]
    PrecisionUnreachable { target: f64, bound: usize, achievable: f64 },
    #[error("entry too large for machine arithmetic")]
    Overflow,
}

/// `h` on integer coordinates: `h(u, v) = (uᵀ·A·v + (uᵀ·B·v)·ω) / den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledHermitian {
    pub den: i64,
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

impl ScaledHermitian {
    /// `(uᵀA, uᵀB)` so that pairing with many `v` is a dot product.
    pub fn left(&self, u: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let n = u.len();
        let mut la = vec![0i64; n];
        let mut lb = vec![0i64; n];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for j in 0..n {
                la[j] += ui * self.a[i][j];
                lb[j] += ui * self.b[i][j];
            }
        }
        (la, lb)
    }

    pub fn pair(&self, u: &[i64], v: &[i64]) -> (i64, i64) {
        let (la, lb) = self.left(u);
        (dot(&la, v), dot(&lb, v))
    }

    pub fn to_l(&self, sa: i64, sb: i64) -> LElement {
        let d = BigInt::from(self.den);
        LElement::new(BigRational::new(sa.into(), d.clone()), BigRational::new(sb.into(), d))
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A trace lattice with its `L`-valued form and the action of `ζ`.
#[derive(Clone, Debug)]
pub struct HermitianLattice {
    p: u64,
    quad: QuadraticField,
    gram: IntMatrix,
    h_table: Vec<Vec<LElement>>,
    /// Column convention: `ζ·(Σ u_i b_i) = Σ (M·u)_i b_i`.
    zeta: IntMatrix,
    scaled: ScaledHermitian,
}

impl HermitianLattice {
    /// Computes the `h`-table and `ζ`-matrix of a trace lattice.
    pub fn from_trace_lattice(order: &MaximalOrder, lat: &TraceLattice) -> Result<Self, ThetaError> {
        let t = order.tower();
        let n = order.degree();
        // Tr_{K/L}(e_k·conj(e_l)) as integral a + bω
        let mut pa = IntMatrix::zeros(n, n);
        let mut pb = IntMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                let x = order.mul(&order.unit_vector(k), order.conj_matrix().row(l));
                let tl = t.trace_l(&order.to_k_int(&x));
                pa[(k, l)] = tl.a.to_integer();
                pb[(k, l)] = tl.b.to_integer();
            }
        }
        let rows = lat.zbasis.to_rows();
        let (dden, dint) = clear(&order.from_k(lat.pair.d.as_k()));
        let scale = &dden * &lat.den * &lat.den;
        let xs: Vec<Vec<BigInt>> = rows.iter().map(|r| order.mul(&dint, r)).collect();
        let xm = IntMatrix::from_rows(xs);
        let rt = lat.zbasis.transpose();
        let ha = xm.mul(&pa).mul(&rt);
        let hb = xm.mul(&pb).mul(&rt);
        let h_table: Vec<Vec<LElement>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| LElement::new(BigRational::new(ha[(i, j)].clone(), scale.clone()), BigRational::new(hb[(i, j)].clone(), scale.clone())))
                    .collect()
            })
            .collect();
        // ζ on the ideal basis: R = B·Z·B^{-1} (rows), M = Rᵀ
        let b = lat.zbasis.to_rat();
        let r = b.mul(&order.zeta_matrix().to_rat()).mul(&invert(&b)?);
        let r = r.to_int().ok_or(ThetaError::NonIntegralAction)?;
        Self::from_parts(t.p(), t.quadratic().clone(), lat.gram.clone(), h_table, r.transpose())
    }

    /// Assembles a lattice from stored data; shapes are checked, invariants are not.
    pub fn from_parts(
        p: u64,
        quad: QuadraticField,
        gram: IntMatrix,
        h_table: Vec<Vec<LElement>>,
        zeta: IntMatrix,
    ) -> Result<Self, ThetaError> {
        let n = gram.rows();
        if !gram.is_square() || h_table.len() != n || h_table.iter().any(|r| r.len() != n) || zeta.rows() != n || zeta.cols() != n {
            return Err(ThetaError::Shape(format!("gram {}x{}, h-table {}, zeta {}x{}", gram.rows(), gram.cols(), h_table.len(), zeta.rows(), zeta.cols())));
        }
        let den = h_table.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.a.denom()).lcm(x.b.denom()));
        let to_i64 = |x: &BigRational| (x * BigRational::from_integer(den.clone())).to_integer().to_i64().ok_or(ThetaError::Overflow);
        let a = h_table.iter().map(|r| r.iter().map(|x| to_i64(&x.a)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        let b = h_table.iter().map(|r| r.iter().map(|x| to_i64(&x.b)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        let scaled = ScaledHermitian { den: den.to_i64().ok_or(ThetaError::Overflow)?, a, b };
        Ok(HermitianLattice { p, quad, gram, h_table, zeta, scaled })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn quadratic(&self) -> &QuadraticField {
        &self.quad
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn h_table(&self) -> &[Vec<LElement>] {
        &self.h_table
    }

    pub fn zeta_matrix(&self) -> &IntMatrix {
        &self.zeta
    }

    pub fn scaled(&self) -> &ScaledHermitian {
        &self.scaled
    }

    pub fn form(&self) -> Result<GramForm, ThetaError> {
        Ok(GramForm::from_int(&self.gram)?)
    }

    pub fn short_vectors(&self) -> Result<ShortVectors, ThetaError> {
        Ok(ShortVectors::new(&self.form()?)?)
    }

    /// `h(u, v)` for integer coordinate vectors.
    pub fn h(&self, u: &[i64], v: &[i64]) -> LElement {
        let (sa, sb) = self.scaled.pair(u, v);
        self.scaled.to_l(sa, sb)
    }

    /// `b(u, u) = uᵀGu`.
    pub fn norm(&self, u: &[i64]) -> i64 {
        let g = self.gram.to_i64_rows().expect("small Gram");
        u.iter().enumerate().map(|(i, &ui)| ui * dot(&g[i], u)).sum()
    }

    pub fn apply_zeta(&self, u: &[i64]) -> Vec<i64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.zeta[(i, j)].to_i64().expect("small") * u[j]).sum()).collect()
    }

    /// The three table invariants: conjugate symmetry, entries in `O_L^*`, and
    /// `Tr_{L/Q}(h) = G`.
    pub fn table_report(&self) -> TableReport {
        let n = self.dim();
        let q = &self.quad;
        let mut conj_symmetric = true;
        let mut in_inverse_different = true;
        let mut trace_matches_gram = true;
        for i in 0..n {
            for j in 0..n {
                let hij = &self.h_table[i][j];
                conj_symmetric &= q.conj(hij) == self.h_table[j][i];
                in_inverse_different &= q.in_inverse_different(hij);
                trace_matches_gram &= q.trace(hij) == BigRational::from_integer(self.gram[(i, j)].clone());
            }
        }
        TableReport { conj_symmetric, in_inverse_different, trace_matches_gram }
    }

    /// `det(G) = 1` and every `h`-value lies in `O_L^*`.
    pub fn dual_check(&self) -> DualReport {
        let det = det_int(&self.gram).unwrap_or_else(|_| BigInt::zero());
        let t = self.table_report();
        DualReport { det: det.to_string(), det_one: det.is_one(), h_in_inverse_different: t.in_inverse_different, pass: det.is_one() && t.in_inverse_different }
    }

    /// Order, isometry and fixed-point-freeness of the `ζ`-matrix.
    pub fn zeta_report(&self) -> ZetaReport {
        let m = &self.zeta;
        let n = self.dim();
        let order_p = m.pow(self.p).is_identity();
        let nontrivial = !m.is_identity();
        let preserves_gram = m.transpose().mul(&self.gram).mul(m) == self.gram;
        // h(ζx, ζy) = h(x, y): Mᵀ·H·M = H over each rational part
        let (ha, hb) = (IntMatrix::from_i64(&self.scaled.a), IntMatrix::from_i64(&self.scaled.b));
        let preserves_h = m.transpose().mul(&ha).mul(m) == ha && m.transpose().mul(&hb).mul(m) == hb;
        let det = det_int(&m.sub(&IntMatrix::identity(n))).unwrap_or_else(|_| BigInt::zero());
        ZetaReport {
            order_p,
            nontrivial,
            preserves_gram,
            preserves_h,
            det_m_minus_i: det.to_string(),
            fixed_point_free: !det.is_zero(),
            expected_det: (BigInt::from(self.p).pow((n / (self.p as usize - 1)) as u32)).to_string(),
        }
    }

    /// Every nonzero vector with `b(x,x) ≤ max_norm` has a `ζ`-orbit of size exactly `p`
    /// whose members share its norm. Returns the number of vectors checked.
    pub fn orbit_check(&self, max_norm: i64, exec: Exec) -> Result<OrbitReport, ThetaError> {
        let sv = self.short_vectors()?;
        let g = self.gram.to_i64_rows().ok_or(ThetaError::Overflow)?;
        let m = self.zeta.to_i64_rows().ok_or(ThetaError::Overflow)?;
        let p = self.p as usize;
        let n = self.dim();
        let parts = sv.fold(&BigRational::from_integer(max_norm.into()), exec, || (0u64, 0u64), |acc: &mut (u64, u64), hit| {
            acc.0 += 1;
            let x = hit.x;
            let nx: i64 = x.iter().enumerate().map(|(i, &xi)| xi * dot(&g[i], x)).sum();
            let mut y = x.to_vec();
            let mut size = 0;
            let mut ok = true;
            for k in 1..=p {
                y = (0..n).map(|i| dot(&m[i], &y)).collect();
                let ny: i64 = y.iter().enumerate().map(|(i, &yi)| yi * dot(&g[i], &y)).sum();
                ok &= ny == nx;
                if y == x {
                    size = k;
                    break;
                }
            }
            if !ok || size != p {
                acc.1 += 1;
            }
        })?;
        let (checked, bad) = parts.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        Ok(OrbitReport { max_norm, vectors_checked: checked, bad_orbits: bad, pass: bad == 0 && checked % self.p == 0 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub conj_symmetric: bool,
    pub in_inverse_different: bool,
    pub trace_matches_gram: bool,
}

impl TableReport {
    pub fn pass(&self) -> bool {
        self.conj_symmetric && self.in_inverse_different && self.trace_matches_gram
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualReport {
    pub det: String,
    pub det_one: bool,
    pub h_in_inverse_different: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaReport {
    pub order_p: bool,
    pub nontrivial: bool,
    pub preserves_gram: bool,
    pub preserves_h: bool,
    pub det_m_minus_i: String,
    pub expected_det: String,
    pub fixed_point_free: bool,
}

impl ZetaReport {
    pub fn pass(&self) -> bool {
        self.order_p && self.nontrivial && self.preserves_gram && self.preserves_h && self.fixed_point_free && self.det_m_minus_i == self.expected_det
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitReport {
    pub max_norm: i64,
    pub vectors_checked: u64,
    pub bad_orbits: u64,
    pub pass: bool,
}


#[cfg(test)]
mod tests {
    use super::test_support::lattice;
    use super::*;

    #[test]
    fn small_lattice_invariants() {
        for ell in [1, 3, 7] {
            let hl = lattice(ell, 5);
            assert!(hl.table_report().pass());
            assert!(hl.dual_check().pass);
            let z = hl.zeta_report();
            assert!(z.pass(), "{z:?}");
            assert_eq!(z.det_m_minus_i, "25");
            let o = hl.orbit_check(4, Exec::Parallel).unwrap();
            assert!(o.pass);
            assert_eq!(o.vectors_checked, 240 + 2160);
        }
    }

    #[test]
    fn rescaled_lattice_fails_dual_check() {
        let hl = lattice(1, 5);
        let g2 = hl.gram().scale(&BigInt::from(2));
        let h2 = hl.h_table().iter().map(|r| r.iter().map(|x| x.scale(&BigRational::from_integer(2.into()))).collect()).collect();
        let bad = HermitianLattice::from_parts(5, hl.quadratic().clone(), g2, h2, hl.zeta_matrix().clone()).unwrap();
        let r = bad.dual_check();
        assert!(!r.det_one);
        assert!(r.h_in_inverse_different);
        assert!(!r.pass);
    }

    #[test]
    fn h_values_of_vectors_are_dual_integral() {
        let hl = lattice(3, 5);
        let vs = hl.short_vectors().unwrap().collect(&BigRational::from_integer(4.into()), Exec::Sequential).unwrap();
        let q = hl.quadratic();
        for x in vs.iter().step_by(37) {
            for y in vs.iter().step_by(53) {
                let h = hl.h(x, y);
                assert!(q.in_inverse_different(&h));
                assert_eq!(q.trace(&h), BigRational::from_integer(dot(x, &hl.gram().to_i64_rows().unwrap().iter().map(|r| dot(r, y)).collect::<Vec<_>>()).into()));
            }
            assert_eq!(hl.h(x, x).a * BigRational::from_integer(2.into()), BigRational::from_integer(hl.norm(x).into()));
        }
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use super::{FieldTower, LElement, RatPoly, TowerError};
use crate::exact_linalg::{det::invert, RatMatrix};

/// Element of `K` on the basis `ζ^0..ζ^{p−2}, δζ^0..δζ^{p−2}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KElement {
    coords: Vec<BigRational>,
}

impl fmt::Debug for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter().map(|c| c.to_string())).finish()
    }
}

impl KElement {
    pub fn from_coords(coords: Vec<BigRational>) -> Self {
        KElement { coords }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn half(&self) -> usize {
        self.coords.len() / 2
    }

    /// `(a, b)` with `x = a(ζ) + δ·b(ζ)`.
    fn parts(&self) -> (&[BigRational], &[BigRational]) {
        self.coords.split_at(self.half())
    }
}

/// An element of `F`, the fixed field of complex conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FElement(KElement);

impl FElement {
    /// `None` unless `conj(x) = x`.
    pub fn new(t: &FieldTower, x: KElement) -> Option<Self> {
        (t.conj(&x) == x).then_some(FElement(x))
    }

    pub fn as_k(&self) -> &KElement {
        &self.0
    }

    pub fn into_k(self) -> KElement {
        self.0
    }
}

/// Subfields a trace can be taken to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceTarget {
    Q,
    L,
    F,
    M,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldTower {
    pub fn zero(&self) -> KElement {
        KElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn from_rational(&self, q: BigRational) -> KElement {
        let mut x = self.zero();
        x.coords[0] = q;
        x
    }

    pub fn one(&self) -> KElement {
        self.from_rational(BigRational::one())
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> KElement {
        let p = self.p as i64;
        let mut cyc = vec![BigRational::zero(); self.p as usize];
        cyc[k.rem_euclid(p) as usize] = BigRational::one();
        let a = self.reduce_cyclic(cyc);
        let mut coords = a;
        coords.extend(std::iter::repeat_n(BigRational::zero(), self.half_degree()));
        KElement { coords }
    }

    pub fn zeta(&self) -> KElement {
        self.zeta_pow(1)
    }

    pub fn delta(&self) -> KElement {
        let mut x = self.zero();
        x.coords[self.half_degree()] = BigRational::one();
        x
    }

    /// `√−ℓ` for the input `ℓ`, i.e. `s·δ`.
    pub fn sqrt_minus_ell(&self) -> KElement {
        self.scale(&self.delta(), &rat(self.sqrt_factor as i64))
    }

    pub fn from_l(&self, x: &LElement) -> KElement {
        let (a, b) = self.quad.to_delta_coords(x);
        let mut k = self.zero();
        k.coords[0] = a;
        k.coords[self.half_degree()] = b;
        k
    }

    /// `x` as an element of `L`, if it lies there.
    pub fn to_l(&self, x: &KElement) -> Option<LElement> {
        let (a, b) = x.parts();
        if a[1..].iter().chain(&b[1..]).any(|c| !c.is_zero()) {
            return None;
        }
        Some(self.quad.from_delta_coords(&a[0], &b[0]))
    }

    pub fn to_rational(&self, x: &KElement) -> Option<BigRational> {
        x.coords[1..].iter().all(Zero::is_zero).then(|| x.coords[0].clone())
    }

    // reduce a length-p cyclic vector modulo Φ_p
    fn reduce_cyclic(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let top = c.pop().expect("length p");
        if !top.is_zero() {
            for v in c.iter_mut() {
                *v -= &top;
            }
        }
        c
    }

    fn cyc_mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let p = self.p as usize;
        let mut c = vec![BigRational::zero(); p];
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
        self.reduce_cyclic(c)
    }

    pub fn add(&self, x: &KElement, y: &KElement) -> KElement {
        KElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &KElement, y: &KElement) -> KElement {
        KElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &KElement) -> KElement {
        KElement { coords: x.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &KElement, k: &BigRational) -> KElement {
        KElement { coords: x.coords.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, x: &KElement, y: &KElement) -> KElement {
        let (a1, b1) = x.parts();
        let (a2, b2) = y.parts();
        let l0 = rat(self.ell0 as i64);
        let aa = self.cyc_mul(a1, a2);
        let bb = self.cyc_mul(b1, b2);
        let ab = self.cyc_mul(a1, b2);
        let ba = self.cyc_mul(b1, a2);
        let mut coords: Vec<BigRational> = aa.iter().zip(&bb).map(|(u, v)| u - v * &l0).collect();
        coords.extend(ab.iter().zip(&ba).map(|(u, v)| u + v));
        KElement { coords }
    }

    pub fn pow(&self, x: &KElement, mut e: u64) -> KElement {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Matrix of `y ↦ x·y` on the power basis (columns are images of basis vectors).
    pub fn mult_matrix(&self, x: &KElement) -> RatMatrix {
        let n = self.degree();
        let mut m = RatMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = self.zero();
            e.coords[j] = BigRational::one();
            let img = self.mul(x, &e);
            for i in 0..n {
                m[(i, j)] = img.coords[i].clone();
            }
        }
        m
    }

    pub fn inv(&self, x: &KElement) -> Result<KElement, TowerError> {
        if x.is_zero() {
            return Err(TowerError::DivisionByZero);
        }
        let m = invert(&self.mult_matrix(x)).map_err(|_| TowerError::DivisionByZero)?;
        let mut e = vec![BigRational::zero(); self.degree()];
        e[0] = BigRational::one();
        Ok(KElement { coords: m.mul_vec(&e) })
    }

    pub fn div(&self, x: &KElement, y: &KElement) -> Result<KElement, TowerError> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    /// The automorphism `ζ ↦ ζ^g`, `δ ↦ ±δ`.
    pub fn galois(&self, x: &KElement, g: u64, delta_sign: bool) -> KElement {
        let p = self.p as usize;
        let (a, b) = x.parts();
        let permute = |v: &[BigRational]| {
            let mut c = vec![BigRational::zero(); p];
            for (i, x) in v.iter().enumerate() {
                c[(i * g as usize) % p] += x;
            }
            self.reduce_cyclic(c)
        };
        let mut coords = permute(a);
        let bp = permute(b);
        if delta_sign {
            coords.extend(bp);
        } else {
            coords.extend(bp.into_iter().map(|v| -v));
        }
        KElement { coords }
    }

    /// Complex conjugation: `ζ ↦ ζ^{−1}`, `δ ↦ −δ`.
    pub fn conj(&self, x: &KElement) -> KElement {
        self.galois(x, self.p - 1, false)
    }

    /// Relative trace, returned as an element of `K` lying in the target subfield.
    pub fn trace_to(&self, target: TraceTarget, x: &KElement) -> KElement {
        match target {
            TraceTarget::Q => self.from_rational(self.trace_q(x)),
            TraceTarget::L => {
                let (a, b) = x.parts();
                let tm = |v: &[BigRational]| {
                    v.iter().enumerate().fold(BigRational::zero(), |acc, (i, c)| {
                        if i == 0 { acc + c * rat(self.p as i64 - 1) } else { acc - c }
                    })
                };
                let mut out = self.zero();
                out.coords[0] = tm(a);
                out.coords[self.half_degree()] = tm(b);
                out
            }
            TraceTarget::F => self.add(x, &self.conj(x)),
            TraceTarget::M => self.add(x, &self.galois(x, 1, false)),
        }
    }

    pub fn trace_q(&self, x: &KElement) -> BigRational {
        let (a, _) = x.parts();
        // Tr(δ·ζ^i) = 0; Tr(ζ^i) = 2(p−1) or −2
        a.iter().enumerate().fold(BigRational::zero(), |acc, (i, c)| {
            if i == 0 { acc + c * rat(2 * (self.p as i64 - 1)) } else { acc - c * rat(2) }
        })
    }

    pub fn trace_l(&self, x: &KElement) -> LElement {
        self.to_l(&self.trace_to(TraceTarget::L, x)).expect("trace lies in L")
    }

    /// Monic minimal polynomial over `Q`, found as the first linear dependency among
    /// `1, x, x², …`.
    pub fn minimal_polynomial(&self, x: &KElement) -> RatPoly {
        let n = self.degree();
        // echelon rows: (vector, pivot, combination over powers)
        let mut rows: Vec<(Vec<BigRational>, usize, Vec<BigRational>)> = Vec::new();
        let mut power = self.one();
        for k in 0..=n {
            let mut v = power.coords.clone();
            let mut comb = vec![BigRational::zero(); k + 1];
            comb[k] = BigRational::one();
            for (w, piv, c) in &rows {
                if v[*piv].is_zero() {
                    continue;
                }
                let f = &v[*piv] / &w[*piv];
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi -= &f * wi;
                }
                for (ci, cw) in comb.iter_mut().zip(c) {
                    *ci -= &f * cw;
                }
            }
            match v.iter().position(|c| !c.is_zero()) {
                None => return RatPoly::new(comb),
                Some(piv) => rows.push((v, piv, comb)),
            }
            power = self.mul(&power, x);
        }
        unreachable!("degree bound exceeded")
    }

    /// `N_{K/Q}(x)` from the minimal polynomial.
    pub fn norm_q(&self, x: &KElement) -> BigRational {
        norm_from_minpoly(&self.minimal_polynomial(x), self.degree())
    }

    /// `N_{F/Q}(x)` for `x ∈ F`.
    pub fn norm_f(&self, x: &FElement) -> BigRational {
        norm_from_minpoly(&self.minimal_polynomial(x.as_k()), self.half_degree())
    }

    /// Exact decision of total positivity: certified embeddings first, falling back to a
    /// Sturm count on the minimal polynomial when some sign is not certain.
    pub fn is_totally_positive(&self, d: &FElement) -> bool {
        if d.as_k().is_zero() {
            return false;
        }
        match self.certified_real_signs(d.as_k()) {
            Some(signs) => signs.iter().all(|&s| s > 0),
            None => self.is_totally_positive_exact(d),
        }
    }

    /// Sturm-sequence criterion: every root of the minimal polynomial is positive.
    pub fn is_totally_positive_exact(&self, d: &FElement) -> bool {
        if d.as_k().is_zero() {
            return false;
        }
        let m = self.minimal_polynomial(d.as_k());
        m.count_positive_roots() == m.degree().unwrap_or(0)
    }
}

fn norm_from_minpoly(m: &RatPoly, field_degree: usize) -> BigRational {
    let deg = m.degree().expect("nonzero polynomial");
    let c0 = m.coeffs()[0].clone();
    let base = if deg % 2 == 1 { -c0 } else { c0 };
    let e = field_degree / deg;
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= &base;
    }
    if acc.is_negative() && field_degree % 2 == 0 && e % 2 == 0 {
        unreachable!("even power is nonnegative");
    }
    acc
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// `L = Q(δ)`, `δ² = −ℓ₀`, with integral generator `ω = (1+δ)/2` when `ℓ₀ ≡ 3 (mod 4)`
/// and `ω = δ` otherwise, so `O_L = Z + Zω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticField {
    ell0: u64,
    // ω² = t·ω − nrm
    omega_trace: i64,
    omega_norm: i64,
}

/// `a + b·ω` with rational `a, b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LElement {
    pub a: BigRational,
    pub b: BigRational,
}

impl fmt::Debug for LElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*w", self.a, self.b)
    }
}

impl LElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        LElement { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        LElement { a: BigRational::from_integer(a.into()), b: BigRational::from_integer(b.into()) }
    }

    pub fn rational(a: BigRational) -> Self {
        LElement { a, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Membership in `O_L`.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn add(&self, o: &LElement) -> LElement {
        LElement { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &LElement) -> LElement {
        LElement { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn neg(&self) -> LElement {
        LElement { a: -&self.a, b: -&self.b }
    }

    pub fn scale(&self, k: &BigRational) -> LElement {
        LElement { a: &self.a * k, b: &self.b * k }
    }
}

impl QuadraticField {
    pub fn new(ell0: u64) -> Self {
        if ell0 % 4 == 3 {
            QuadraticField { ell0, omega_trace: 1, omega_norm: ((1 + ell0) / 4) as i64 }
        } else {
            QuadraticField { ell0, omega_trace: 0, omega_norm: ell0 as i64 }
        }
    }

    pub fn ell0(&self) -> u64 {
        self.ell0
    }

    /// Whether `ω = (1 + δ)/2`.
    pub fn omega_is_half(&self) -> bool {
        self.omega_trace == 1
    }

    pub fn omega_trace(&self) -> i64 {
        self.omega_trace
    }

    pub fn omega_norm(&self) -> i64 {
        self.omega_norm
    }

    pub fn omega(&self) -> LElement {
        LElement::from_ints(0, 1)
    }

    pub fn mul(&self, x: &LElement, y: &LElement) -> LElement {
        // (a + bω)(c + dω) = ac + (ad + bc)ω + bd(tω − n)
        let t = BigRational::from_integer(self.omega_trace.into());
        let nrm = BigRational::from_integer(self.omega_norm.into());
        let bd = &x.b * &y.b;
        LElement { a: &x.a * &y.a - &bd * nrm, b: &x.a * &y.b + &x.b * &y.a + bd * t }
    }

    /// Complex conjugation: `ω̄ = t − ω`.
    pub fn conj(&self, x: &LElement) -> LElement {
        let t = BigRational::from_integer(self.omega_trace.into());
        LElement { a: &x.a + &x.b * t, b: -&x.b }
    }

    pub fn trace(&self, x: &LElement) -> BigRational {
        &x.a * BigRational::from_integer(2.into()) + &x.b * BigRational::from_integer(self.omega_trace.into())
    }

    pub fn norm(&self, x: &LElement) -> BigRational {
        self.mul(x, &self.conj(x)).a
    }

    pub fn inv(&self, x: &LElement) -> Option<LElement> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        Some(self.conj(x).scale(&(BigRational::one() / n)))
    }

    /// `√−|disc L|` in `a + bω` form: `δ` when `ℓ₀ ≡ 3 (mod 4)`, `2δ` otherwise.
    pub fn sqrt_disc(&self) -> LElement {
        if self.omega_is_half() {
            LElement::from_ints(-1, 2)
        } else {
            LElement::from_ints(0, 2)
        }
    }

    /// Membership in the inverse different `O_L^* = (√−|disc L|)⁻¹·O_L`.
    pub fn in_inverse_different(&self, x: &LElement) -> bool {
        self.mul(&self.sqrt_disc(), x).is_integral()
    }

    /// Units of `O_L`.
    pub fn units(&self) -> Vec<LElement> {
        let mut u = vec![LElement::one(), LElement::from_ints(-1, 0)];
        match self.ell0 {
            1 => {
                u.push(LElement::from_ints(0, 1));
                u.push(LElement::from_ints(0, -1));
            }
            3 => {
                // ω = (1+√−3)/2 is a primitive sixth root of unity
                for k in 1..6 {
                    if k == 3 {
                        continue;
                    }
                    let mut w = LElement::one();
                    for _ in 0..k {
                        w = self.mul(&w, &self.omega());
                    }
                    u.push(w);
                }
            }
            _ => {}
        }
        u
    }

    /// `(A, B)` with `x = A + B·δ`.
    pub fn to_delta_coords(&self, x: &LElement) -> (BigRational, BigRational) {
        if self.omega_is_half() {
            let half = BigRational::new(BigInt::one(), 2.into());
            (&x.a + &x.b * &half, &x.b * half)
        } else {
            (x.a.clone(), x.b.clone())
        }
    }

    pub fn from_delta_coords(&self, a: &BigRational, b: &BigRational) -> LElement {
        if self.omega_is_half() {
            // δ = 2ω − 1
            LElement { a: a - b, b: b * BigRational::from_integer(2.into()) }
        } else {
            LElement { a: a.clone(), b: b.clone() }
        }
    }
}

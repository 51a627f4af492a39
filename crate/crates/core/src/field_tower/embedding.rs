//! Certified complex embeddings of `K` in binary fixed-point ball arithmetic.
//!
//! A [`Ball`] stores each coordinate as `(v ± r)·2^{−prec}` with integer `v, r`.
//! Every operation rounds outward, so the enclosure is rigorous at any precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldTower, KElement};

/// Largest working precision tried before giving up on a sign.
pub const MAX_PRECISION_BITS: u32 = 4096;
const START_PRECISION_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Fixed {
    v: BigInt,
    r: BigInt,
}

impl Fixed {
    fn exact(v: BigInt) -> Self {
        Fixed { v, r: BigInt::zero() }
    }

    fn add(&self, o: &Fixed) -> Fixed {
        Fixed { v: &self.v + &o.v, r: &self.r + &o.r }
    }

    fn neg(&self) -> Fixed {
        Fixed { v: -&self.v, r: self.r.clone() }
    }

    fn mul(&self, o: &Fixed, prec: u32) -> Fixed {
        let prod = &self.v * &o.v;
        let v = prod >> prec as usize; // floor: error < 1 ulp
        let spread = self.v.abs() * &o.r + o.v.abs() * &self.r + &self.r * &o.r;
        let r = ceil_shift(&spread, prec) + 1;
        Fixed { v, r }
    }

    /// `self · n / d` for a rational `n/d`.
    fn scale(&self, q: &BigRational) -> Fixed {
        let n = q.numer();
        let d = q.denom();
        let v = (&self.v * n).div_floor(d);
        let r = (self.r.clone() * n.abs()).div_ceil(d) + 1;
        Fixed { v, r }
    }

    fn div_int(&self, d: u64) -> Fixed {
        let d = BigInt::from(d);
        Fixed { v: self.v.div_floor(&d), r: self.r.div_ceil(&d) + 1 }
    }

    fn sign(&self) -> Option<i8> {
        if self.v > self.r {
            Some(1)
        } else if -&self.v > self.r {
            Some(-1)
        } else {
            None
        }
    }

    fn to_f64(&self, prec: u32) -> f64 {
        scaled_to_f64(&self.v, prec)
    }
}

fn ceil_shift(x: &BigInt, prec: u32) -> BigInt {
    let one = BigInt::one() << prec as usize;
    x.div_ceil(&one)
}

fn scaled_to_f64(v: &BigInt, prec: u32) -> f64 {
    let bits = v.bits() as i64;
    let shift = (bits - 60).max(0);
    let head = (v >> shift as usize).to_f64().unwrap_or(0.0);
    head * 2f64.powi((shift - prec as i64) as i32)
}

/// `atan(1/m)` by its alternating series, each floor contributing under 2 ulps.
fn atan_inv(m: u64, prec: u32) -> Fixed {
    let m2 = BigInt::from(m * m);
    let mut pw = (BigInt::one() << prec as usize) / BigInt::from(m);
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut j = 0u64;
    while !pw.is_zero() {
        let t = &pw / BigInt::from(2 * j + 1);
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pw /= &m2;
        j += 1;
        terms += 1;
    }
    Fixed { v: sum, r: BigInt::from(2 * terms + 1) }
}

fn pi(prec: u32) -> Fixed {
    let a = atan_inv(5, prec);
    let b = atan_inv(239, prec);
    let v = a.v * 16 - b.v * 4;
    let r = a.r * 16 + b.r * 4;
    Fixed { v, r }
}

/// `(cos θ, sin θ)` for `0 ≤ θ ≤ π` by Taylor series.
fn cos_sin(theta: &Fixed, prec: u32) -> (Fixed, Fixed) {
    let one = Fixed::exact(BigInt::one() << prec as usize);
    let mut c = one.clone();
    let mut s = Fixed::exact(BigInt::zero());
    let mut term = one;
    let mut n = 1u64;
    loop {
        term = term.mul(theta, prec).div_int(n);
        let signed = if (n / 2) % 2 == 0 { term.clone() } else { term.neg() };
        if n % 2 == 0 {
            c = c.add(&signed);
        } else {
            s = s.add(&signed);
        }
        // for n ≥ 8 the ratio θ/(n+1) ≤ 1/2, so the remaining tail is at most twice the last term
        if n >= 8 && term.v.abs() <= BigInt::one() {
            let tail = (term.v.abs() + &term.r) * 2 + 1;
            c.r += &tail;
            s.r += &tail;
            return (c, s);
        }
        n += 1;
    }
}

/// A certified complex value `re + i·im` with outward-rounded radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    re: Fixed,
    im: Fixed,
    prec: u32,
}

impl Ball {
    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn re(&self) -> f64 {
        self.re.to_f64(self.prec)
    }

    pub fn im(&self) -> f64 {
        self.im.to_f64(self.prec)
    }

    /// Upper bound for the error of either coordinate's midpoint.
    pub fn radius(&self) -> f64 {
        let r = (&self.re.r).max(&self.im.r) + 1;
        scaled_to_f64(&r, self.prec)
    }

    /// Sign of the real part when certain.
    pub fn real_sign(&self) -> Option<i8> {
        self.re.sign()
    }

    /// Whether the imaginary part may be zero.
    pub fn may_be_real(&self) -> bool {
        self.im.sign().is_none()
    }
}

/// The embedding `ζ ↦ e^{2πik/p}`, `δ ↦ ±i√ℓ₀`, evaluated at one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedEmbedding {
    pub k: u64,
    pub delta_sign: bool,
    pub value: Ball,
}

/// Cached roots of unity and `√ℓ₀` at a fixed precision.
struct EmbeddingTable {
    prec: u32,
    cos: Vec<Fixed>,
    sin: Vec<Fixed>,
    sqrt_ell0: Fixed,
}

impl EmbeddingTable {
    fn new(t: &FieldTower, prec: u32) -> Self {
        let p = t.p();
        let two_pi = pi(prec).add(&pi(prec));
        let mut cos = Vec::with_capacity(p as usize);
        let mut sin = Vec::with_capacity(p as usize);
        for j in 0..p {
            let (jj, flip) = if 2 * j <= p { (j, false) } else { (p - j, true) };
            let theta = Fixed { v: &two_pi.v * jj, r: &two_pi.r * jj }.div_int(p);
            let (c, s) = cos_sin(&theta, prec);
            cos.push(c);
            sin.push(if flip { s.neg() } else { s });
        }
        let root = (BigInt::from(t.ell0()) << (2 * prec as usize)).sqrt();
        let sqrt_ell0 = Fixed { v: root, r: BigInt::one() };
        EmbeddingTable { prec, cos, sin, sqrt_ell0 }
    }

    fn eval(&self, t: &FieldTower, x: &KElement, k: u64, delta_sign: bool) -> Ball {
        let n = t.half_degree();
        let p = t.p();
        let zero = || Fixed::exact(BigInt::zero());
        let (mut ar, mut ai, mut br, mut bi) = (zero(), zero(), zero(), zero());
        for (i, c) in x.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = ((i % n) as u64 * k % p) as usize;
            let (cr, ci) = (self.cos[j].scale(c), self.sin[j].scale(c));
            if i < n {
                ar = ar.add(&cr);
                ai = ai.add(&ci);
            } else {
                br = br.add(&cr);
                bi = bi.add(&ci);
            }
        }
        // δ·(br + i·bi) ↦ ±√ℓ₀·(−bi + i·br)
        let mut dr = bi.mul(&self.sqrt_ell0, self.prec).neg();
        let mut di = br.mul(&self.sqrt_ell0, self.prec);
        if !delta_sign {
            dr = dr.neg();
            di = di.neg();
        }
        Ball { re: ar.add(&dr), im: ai.add(&di), prec: self.prec }
    }
}

impl FieldTower {
    /// All `2(p−1)` complex embeddings of `x` at the given working precision, listed so that
    /// entry `2j+1` is the complex conjugate embedding of entry `2j`.
    pub fn embeddings(&self, x: &KElement, prec: u32) -> Vec<CertifiedEmbedding> {
        let table = EmbeddingTable::new(self, prec);
        let p = self.p();
        let mut out = Vec::with_capacity(self.degree());
        for k in 1..=(p - 1) / 2 {
            for s in [true, false] {
                for (kk, ss) in [(k, s), (p - k, !s)] {
                    out.push(CertifiedEmbedding { k: kk, delta_sign: ss, value: table.eval(self, x, kk, ss) });
                }
            }
        }
        out
    }

    /// Values of a conjugation-fixed `x` under the `p−1` real embeddings of `F`.
    pub fn real_embeddings(&self, x: &KElement, prec: u32) -> Vec<Ball> {
        let table = EmbeddingTable::new(self, prec);
        (1..self.p()).map(|k| table.eval(self, x, k, true)).collect()
    }

    /// Signs of `x` under the real embeddings of `F`, doubling precision until each is certain.
    /// `None` once [`MAX_PRECISION_BITS`] is exceeded.
    pub fn certified_real_signs(&self, x: &KElement) -> Option<Vec<i8>> {
        let mut prec = START_PRECISION_BITS;
        while prec <= MAX_PRECISION_BITS {
            let signs: Option<Vec<i8>> = self.real_embeddings(x, prec).iter().map(Ball::real_sign).collect();
            if signs.is_some() {
                return signs;
            }
            prec *= 2;
        }
        None
    }
}

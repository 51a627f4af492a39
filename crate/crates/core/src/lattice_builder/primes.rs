use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::ideal::FracIdeal;
use super::order::MaximalOrder;
use super::LatticeError;

/// A prime ideal of `O_K` above an unramified rational prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub q: u64,
    /// Position among the primes above `q`, in idempotent order.
    pub index: usize,
    pub residue_degree: u32,
    pub ideal: FracIdeal,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        BigInt::from(self.q).pow(self.residue_degree)
    }
}

fn md(x: i64, q: i64) -> i64 {
    x.rem_euclid(q)
}

fn inv_mod(a: i64, q: i64) -> i64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(q));
    md(e.x.to_i64().expect("small"), q)
}

struct ModAlgebra<'a> {
    order: &'a MaximalOrder,
    q: i64,
}

impl ModAlgebra<'_> {
    fn mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        self.order.mul(&xb, &yb).iter().map(|v| v.mod_floor(&BigInt::from(self.q)).to_i64().expect("reduced")).collect()
    }

    fn pow(&self, x: &[i64], mut e: u64) -> Vec<i64> {
        let mut acc = self.unit(0);
        let mut base = x.to_vec();
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

    fn unit(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.order.degree()];
        e[i] = 1;
        e
    }

    fn lin(&self, a: i64, x: &[i64], b: i64, y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).map(|(u, v)| md(a * u + b * v, self.q)).collect()
    }

    /// Monic minimal polynomial of `w` inside the algebra `eA` (identity `e`), low degree first.
    fn min_poly(&self, w: &[i64], e: &[i64]) -> Vec<i64> {
        let q = self.q;
        let mut rows: Vec<(Vec<i64>, usize, Vec<i64>)> = Vec::new();
        let mut power = e.to_vec();
        for k in 0.. {
            let mut v = power.clone();
            let mut comb = vec![0; k + 1];
            comb[k] = 1;
            for (r, piv, c) in &rows {
                if v[*piv] != 0 {
                    let f = md(v[*piv] * inv_mod(r[*piv], q), q);
                    for (vi, ri) in v.iter_mut().zip(r) {
                        *vi = md(*vi - f * ri, q);
                    }
                    for (ci, cr) in comb.iter_mut().zip(c) {
                        *ci = md(*ci - f * cr, q);
                    }
                }
            }
            match v.iter().position(|&c| c != 0) {
                None => return comb,
                Some(piv) => rows.push((v, piv, comb)),
            }
            power = self.mul(&power, w);
        }
        unreachable!()
    }
}

/// Basis of the kernel of `m` (rows act on the right: `x·m = 0`) over `F_q`.
fn left_kernel_mod(m: &[Vec<i64>], q: i64) -> Vec<Vec<i64>> {
    let n = m.len();
    let cols = m[0].len();
    // augmented [m | I], row-reduce m
    let mut a: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut r: Vec<i64> = m[i].iter().map(|&v| md(v, q)).collect();
            r.extend((0..n).map(|j| i64::from(i == j)));
            r
        })
        .collect();
    let mut row = 0;
    for c in 0..cols {
        let Some(pr) = (row..n).find(|&r| a[r][c] != 0) else { continue };
        a.swap(row, pr);
        let inv = inv_mod(a[row][c], q);
        for v in a[row].iter_mut() {
            *v = md(*v * inv, q);
        }
        for r in 0..n {
            if r != row && a[r][c] != 0 {
                let f = a[r][c];
                let pivot_row = a[row].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = md(*x - f * y, q);
                }
            }
        }
        row += 1;
    }
    a[row..].iter().map(|r| r[cols..].to_vec()).collect()
}

/// Primes of `O_K` above `q`, via the idempotents of the Frobenius-fixed subalgebra of
/// `O_K/qO_K ≅ ∏ F_{q^f}`. `q` must be unramified (coprime to `p·ell_norm`).
pub fn primes_above(order: &MaximalOrder, q: u64) -> Result<Vec<PrimeIdeal>, LatticeError> {
    let t = order.tower();
    if (t.p() * t.ell_norm()) % q == 0 {
        return Err(LatticeError::Ramified(q));
    }
    let n = order.degree();
    let qi = q as i64;
    let alg = ModAlgebra { order, q: qi };
    let frob: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut r = alg.pow(&alg.unit(i), q);
            r[i] = md(r[i] - 1, qi);
            r
        })
        .collect();
    let fixed = left_kernel_mod(&frob, qi);
    let g = fixed.len();
    let mut idems = vec![alg.unit(0)];
    for v in &fixed {
        if idems.len() == g {
            break;
        }
        let mut next = Vec::new();
        for e in &idems {
            let w = alg.mul(v, e);
            let mp = alg.min_poly(&w, e);
            let roots: Vec<i64> = (0..qi).filter(|&r| eval_mod(&mp, r, qi) == 0).collect();
            if roots.len() <= 1 {
                next.push(e.clone());
                continue;
            }
            for &r in &roots {
                let mut f = e.clone();
                for &s in roots.iter().filter(|&&s| s != r) {
                    let c = inv_mod(md(r - s, qi), qi);
                    // f ← f·(w − s·e)/(r − s)
                    let factor = alg.lin(1, &w, md(-s, qi), e);
                    f = alg.mul(&f, &factor).into_iter().map(|x| md(x * c, qi)).collect();
                }
                next.push(f);
            }
        }
        idems = next;
    }
    assert_eq!(idems.len(), g, "Frobenius-fixed subalgebra must split completely");
    let f = (n / g) as u32;
    let qb = BigInt::from(q);
    idems
        .iter()
        .enumerate()
        .map(|(index, e)| {
            // P = qO_K + (1 − e)O_K
            let mut one_minus: Vec<BigInt> = e.iter().map(|&x| BigInt::from(md(-x, qi))).collect();
            one_minus[0] += 1;
            let ideal = FracIdeal::from_generators_mod(order, &qb, &[one_minus])?;
            debug_assert_eq!(ideal.norm().to_integer(), qb.pow(f));
            Ok(PrimeIdeal { q, index, residue_degree: f, ideal })
        })
        .collect()
}

fn eval_mod(poly: &[i64], x: i64, q: i64) -> i64 {
    poly.iter().rev().fold(0, |acc, &c| md(acc * x + c, q))
}

/// All primes of norm at most `max_norm` above unramified rational primes, sorted by
/// `(norm, q, index)`.
pub fn prime_pool(order: &MaximalOrder, max_norm: u64) -> Result<Vec<PrimeIdeal>, LatticeError> {
    let t = order.tower();
    let mut out = Vec::new();
    for q in 2..=max_norm {
        if !crate::field_tower::is_prime(q) || (t.p() * t.ell_norm()) % q == 0 {
            continue;
        }
        // the residue degree is at least the order of q mod p
        let mut ord = 1u32;
        let mut x = q % t.p();
        while x != 1 {
            x = x * q % t.p();
            ord += 1;
        }
        if BigInt::from(q).pow(ord) > BigInt::from(max_norm) {
            continue;
        }
        for pr in primes_above(order, q)? {
            if pr.norm() <= BigInt::from(max_norm) {
                out.push(pr);
            }
        }
    }
    out.sort_by(|a, b| a.norm().cmp(&b.norm()).then(a.q.cmp(&b.q)).then(a.index.cmp(&b.index)));
    Ok(out)
}

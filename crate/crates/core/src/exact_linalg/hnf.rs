//! Hermite normal forms, integer kernels and integer linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Column-style Hermite normal form: returns `(h, u)` with `m·u = h`, `u` unimodular.
///
/// Pivots move down and to the right; each pivot is positive and the entries to its
/// left in the pivot row lie in `[0, pivot)`. Columns after the rank are zero.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (r, c) = (m.rows(), m.cols());
    let mut h = m.transpose().to_rows(); // h[j] is column j
    let mut u = IntMatrix::identity(c).to_rows(); // u[j] is column j of u
    let mut k = 0;
    for i in 0..r {
        if k == c {
            break;
        }
        for j in k + 1..c {
            if h[j][i].is_zero() {
                continue;
            }
            if h[k][i].is_zero() {
                h.swap(k, j);
                u.swap(k, j);
                continue;
            }
            let (a, b) = (h[k][i].clone(), h[j][i].clone());
            let (g, s, t) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            combine(&mut h, k, j, &s, &t, &ag, &bg);
            combine(&mut u, k, j, &s, &t, &ag, &bg);
        }
        if h[k][i].is_zero() {
            continue;
        }
        if h[k][i].is_negative() {
            negate(&mut h[k]);
            negate(&mut u[k]);
        }
        for j in 0..k {
            let q = h[j][i].div_floor(&h[k][i]);
            if !q.is_zero() {
                axpy(&mut h, j, k, &q);
                axpy(&mut u, j, k, &q);
            }
        }
        k += 1;
    }
    (IntMatrix::from_rows(h).transpose(), IntMatrix::from_rows(u).transpose())
}

// (col_k, col_j) <- (s·col_k + t·col_j, ag·col_j − bg·col_k)
fn combine(cols: &mut [Vec<BigInt>], k: usize, j: usize, s: &BigInt, t: &BigInt, ag: &BigInt, bg: &BigInt) {
    for idx in 0..cols[k].len() {
        let x = cols[k][idx].clone();
        let y = cols[j][idx].clone();
        cols[k][idx] = s * &x + t * &y;
        cols[j][idx] = ag * &y - bg * &x;
    }
}

fn negate(v: &mut [BigInt]) {
    for x in v.iter_mut() {
        *x = -&*x;
    }
}

// cols[dst] -= q·cols[src]
fn axpy(cols: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for idx in 0..cols[dst].len() {
        let t = q * &cols[src][idx];
        cols[dst][idx] -= t;
    }
}

/// Column rank of `m` read off its Hermite normal form.
pub fn rank(m: &IntMatrix) -> usize {
    let (h, _) = hnf(m);
    (0..h.cols()).filter(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero())).count()
}

/// Basis (as columns) of the integer kernel `{x ∈ Zⁿ : m·x = 0}`.
pub fn kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(m);
    let rk = (0..h.cols()).filter(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero())).count();
    let cols: Vec<Vec<BigInt>> = (rk..u.cols()).map(|j| u.col(j)).collect();
    if cols.is_empty() {
        return IntMatrix::zeros(m.cols(), 0);
    }
    IntMatrix::from_rows(cols).transpose()
}

/// Integer solutions of `c·x = t`: a particular solution and a kernel basis (columns),
/// or `None` when no integer solution exists.
pub fn solve_integer(c: &IntMatrix, t: &[BigRational]) -> Option<(Vec<BigInt>, IntMatrix)> {
    assert_eq!(c.rows(), t.len());
    let n = c.cols();
    if t.iter().any(|v| !v.is_integer()) {
        return None;
    }
    let t: Vec<BigInt> = t.iter().map(|v| v.to_integer()).collect();
    let (h, u) = hnf(c);
    let mut z = vec![BigInt::zero(); n];
    let mut rk = 0;
    for i in 0..h.rows() {
        if rk < n && !h[(i, rk)].is_zero() {
            let partial: BigInt = (0..rk).map(|l| &h[(i, l)] * &z[l]).sum();
            let rem = &t[i] - partial;
            let (q, r) = rem.div_rem(&h[(i, rk)]);
            if !r.is_zero() {
                return None;
            }
            z[rk] = q;
            rk += 1;
        } else {
            let partial: BigInt = (0..rk).map(|l| &h[(i, l)] * &z[l]).sum();
            if partial != t[i] {
                return None;
            }
        }
    }
    let x0 = u.mul_vec(&z);
    let ker = if rk == n {
        IntMatrix::zeros(n, 0)
    } else {
        IntMatrix::from_rows((rk..n).map(|j| u.col(j)).collect()).transpose()
    };
    Some((x0, ker))
}

/// Row Hermite normal form of the lattice spanned by `gens` in `Zⁿ`.
///
/// Returns the nonzero echelon rows: upper triangular, positive pivots, entries above a
/// pivot reduced into `[0, pivot)`. When `modulus` is given the caller promises
/// `modulus·Zⁿ` lies in the lattice; intermediate entries are then kept below it.
pub fn hnf_rows<I>(gens: I, n: usize, modulus: Option<&BigInt>) -> Vec<Vec<BigInt>>
where
    I: IntoIterator<Item = Vec<BigInt>>,
{
    let mut tri: Vec<Option<Vec<BigInt>>> = vec![None; n];
    if let Some(m) = modulus {
        assert!(m.is_positive());
        for (i, slot) in tri.iter_mut().enumerate() {
            let mut e = vec![BigInt::zero(); n];
            e[i] = m.clone();
            *slot = Some(e);
        }
    }
    for g in gens {
        assert_eq!(g.len(), n);
        insert_row(&mut tri, g, modulus);
    }
    for i in 0..n {
        let Some(piv_row) = tri[i].clone() else { continue };
        let piv = &piv_row[i];
        for k in 0..i {
            if let Some(row) = tri[k].as_mut() {
                let q = row[i].div_floor(piv);
                if !q.is_zero() {
                    for (x, y) in row.iter_mut().zip(&piv_row) {
                        *x -= &q * y;
                    }
                }
            }
        }
    }
    tri.into_iter().flatten().collect()
}

fn reduce_mod(v: &mut [BigInt], m: &BigInt, keep: Option<usize>) {
    for (idx, x) in v.iter_mut().enumerate() {
        if Some(idx) == keep {
            continue;
        }
        *x = x.mod_floor(m);
    }
}

fn insert_row(tri: &mut [Option<Vec<BigInt>>], mut v: Vec<BigInt>, modulus: Option<&BigInt>) {
    if let Some(m) = modulus {
        reduce_mod(&mut v, m, None);
    }
    for i in 0..v.len() {
        if v[i].is_zero() {
            continue;
        }
        match tri[i].take() {
            None => {
                if v[i].is_negative() {
                    negate(&mut v);
                }
                tri[i] = Some(v);
                return;
            }
            Some(r) => {
                let (a, b) = (r[i].clone(), v[i].clone());
                let (g, s, t) = ext_gcd(&a, &b);
                let (ag, bg) = (&a / &g, &b / &g);
                let mut new_r: Vec<BigInt> = r.iter().zip(&v).map(|(x, y)| &s * x + &t * y).collect();
                let mut new_v: Vec<BigInt> = r.iter().zip(&v).map(|(x, y)| &ag * y - &bg * x).collect();
                if let Some(m) = modulus {
                    reduce_mod(&mut new_r, m, Some(i));
                    reduce_mod(&mut new_v, m, None);
                }
                tri[i] = Some(new_r);
                v = new_v;
            }
        }
    }
}

/// `|det|` of a square upper-triangular basis.
pub fn triangular_det(rows: &[Vec<BigInt>]) -> BigInt {
    rows.iter().enumerate().fold(BigInt::one(), |acc, (i, r)| acc * &r[i]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_case() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));
    }

    #[test]
    fn swap_reduces_to_identity() {
        let m = IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(m.mul(&u), h);
    }

    #[test]
    fn already_in_hnf() {
        let m = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(hnf(&m).0, m);
    }

    #[test]
    fn kernel_and_solve() {
        let c = IntMatrix::from_i64(&[vec![1, 1, 0]]);
        let k = kernel(&c);
        assert_eq!(k.cols(), 2);
        assert!(c.mul(&k).to_rows().iter().flatten().all(|x| x.is_zero()));
        let t = [BigRational::from_integer(BigInt::from(3))];
        let (x0, ker) = solve_integer(&c, &t).unwrap();
        assert_eq!(&x0[0] + &x0[1], BigInt::from(3));
        assert_eq!(ker.cols(), 2);
        let c2 = IntMatrix::from_i64(&[vec![2, 4]]);
        assert!(solve_integer(&c2, &[BigRational::from_integer(BigInt::from(3))]).is_none());
        assert!(solve_integer(&c2, &[BigRational::new(1.into(), 2.into())]).is_none());
    }

    #[test]
    fn row_hnf_with_modulus_matches_plain() {
        let gens = vec![
            vec![BigInt::from(6), BigInt::from(4), BigInt::from(2)],
            vec![BigInt::from(0), BigInt::from(5), BigInt::from(3)],
            vec![BigInt::from(0), BigInt::from(0), BigInt::from(7)],
            vec![BigInt::from(3), BigInt::from(1), BigInt::from(1)],
        ];
        let plain = hnf_rows(gens.clone(), 3, None);
        let det = triangular_det(&plain);
        let modded = hnf_rows(gens, 3, Some(&det));
        assert_eq!(plain, modded);
    }

    proptest! {
        #[test]
        fn hnf_is_idempotent_and_unimodular(entries in proptest::collection::vec(-9i64..10, 12)) {
            let m = IntMatrix::from_i64(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec()]);
            let (h, u) = hnf(&m);
            prop_assert_eq!(&m.mul(&u), &h);
            prop_assert!(super::super::det::is_unimodular(&u));
            prop_assert_eq!(hnf(&h).0, h);
        }
    }
}

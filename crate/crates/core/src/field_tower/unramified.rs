use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{prime_factors, FElement, FieldTower, KElement};

/// Discriminant data for two integral `F`-bases of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnramifiedEvidence {
    /// `det(Tr_{K/F}(b_i b_j))` for `(1, √−ℓ)`; rational.
    pub disc_b1: String,
    pub disc_b1_expected: String,
    /// `|N_{F/Q}|` of the discriminant of `(1, ζ)`.
    pub norm_disc_b2: String,
    pub norm_disc_b2_expected: String,
    /// The discriminant of `(1, ζ)` equals `(ζ − ζ^{−1})²`.
    pub disc_b2_closed_form: bool,
    pub support_b1: Vec<u64>,
    pub support_b2: Vec<u64>,
    pub supports_disjoint: bool,
    pub matches_closed_forms: bool,
    pub unramified: bool,
}

fn disc_over_f(t: &FieldTower, b: [&KElement; 2]) -> KElement {
    let tr = |x: &KElement, y: &KElement| {
        let xy = t.mul(x, y);
        t.add(&xy, &t.conj(&xy))
    };
    let m00 = tr(b[0], b[0]);
    let m01 = tr(b[0], b[1]);
    let m11 = tr(b[1], b[1]);
    t.sub(&t.mul(&m00, &m11), &t.mul(&m01, &m01))
}

/// Checks that `K/F` is unramified at every finite prime: the two basis discriminants
/// have coprime norms, so the relative discriminant is trivial.
pub fn verify_unramified(t: &FieldTower) -> UnramifiedEvidence {
    let one = t.one();
    let b1 = disc_over_f(t, [&one, &t.sqrt_minus_ell()]);
    let expected_b1 = BigRational::from_integer(BigInt::from(-4 * t.ell_input() as i128));
    let disc_b1 = t.to_rational(&b1);

    let b2 = disc_over_f(t, [&one, &t.zeta()]);
    let closed = t.pow(&t.sub(&t.zeta(), &t.zeta_pow(-1)), 2);
    let disc_b2_closed_form = b2 == closed;
    let norm_b2 = FElement::new(t, b2).map(|f| t.norm_f(&f).abs()).unwrap_or_else(BigRational::zero);
    let expected_b2 = BigRational::from_integer(BigInt::from(t.p() * t.p()));

    let support = |q: &BigRational| -> Vec<u64> {
        if q.is_integer() {
            q.numer().abs().to_u64().map(prime_factors).unwrap_or_default()
        } else {
            Vec::new()
        }
    };
    let support_b1 = disc_b1.as_ref().map(support).unwrap_or_default();
    let support_b2 = support(&norm_b2);
    let supports_disjoint = !support_b1.is_empty() && !support_b2.is_empty() && support_b1.iter().all(|q| !support_b2.contains(q));
    let matches_closed_forms = disc_b1.as_ref() == Some(&expected_b1) && norm_b2 == expected_b2 && disc_b2_closed_form;

    UnramifiedEvidence {
        disc_b1: disc_b1.map(|q| q.to_string()).unwrap_or_else(|| "not rational".into()),
        disc_b1_expected: expected_b1.to_string(),
        norm_disc_b2: norm_b2.to_string(),
        norm_disc_b2_expected: expected_b2.to_string(),
        disc_b2_closed_form,
        support_b1,
        support_b2,
        supports_disjoint,
        matches_closed_forms,
        unramified: supports_disjoint && matches_closed_forms,
    }
}

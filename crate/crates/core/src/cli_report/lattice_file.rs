//! The lattice interchange file: one canonical JSON document per built lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exact_linalg::IntMatrix;
use crate::field_tower::{FieldTower, KElement, LElement};
use crate::hermitian_theta::HermitianLattice;
use crate::lattice_builder::{SearchLog, TraceLattice};

/// Serialized form of a built lattice. Big integers and rationals are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub ell: u64,
    pub ell_norm: u64,
    pub p: u64,
    /// `Z`-basis rows of the ideal over the `O_K` basis `ζ^i, ωζ^i`, divided by `ideal_den`.
    pub ideal_basis: Vec<Vec<String>>,
    pub ideal_den: String,
    /// `d` on the basis `ζ^i, δζ^i` as `"num/den"` strings.
    pub d_coords: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    /// `h(b_i, b_j) = a + b·ω` as `[a, b]`.
    pub h_table: Vec<Vec<[String; 2]>>,
    /// Column convention: `ζ·b_j = Σ_i M_ij b_i`.
    pub zeta_matrix: Vec<Vec<i64>>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub candidate: String,
    pub candidate_index: usize,
    pub candidate_norm: String,
    pub candidates_tried: usize,
    pub generators_found: usize,
    pub unit_adjustments_tried: usize,
    pub unit_exponents: Vec<i32>,
    pub enumeration_bound: String,
    pub pool_norm: u64,
    pub unit_range: u32,
    /// Whether `conj(A) = A` for the chosen ideal.
    pub conj_stable: bool,
    /// Convention for the genus-1 q-exponent.
    pub theta_convention: String,
}

pub fn rat_string(q: &BigRational) -> String {
    if q.is_integer() {
        format!("{}/1", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n, d))
}

fn int_rows(m: &IntMatrix) -> Option<Vec<Vec<i64>>> {
    m.to_i64_rows()
}

impl LatticeFile {
    pub fn new(tower: &FieldTower, lat: &TraceLattice, hl: &HermitianLattice, conj_stable: bool) -> Option<Self> {
        let log: &SearchLog = &lat.pair.log;
        Some(LatticeFile {
            ell: tower.ell_input(),
            ell_norm: tower.ell_norm(),
            p: tower.p(),
            ideal_basis: lat.zbasis.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            ideal_den: lat.den.to_string(),
            d_coords: lat.pair.d.as_k().coords().iter().map(rat_string).collect(),
            gram: int_rows(&lat.gram)?,
            h_table: hl.h_table().iter().map(|r| r.iter().map(|x| [rat_string(&x.a), rat_string(&x.b)]).collect()).collect(),
            zeta_matrix: int_rows(hl.zeta_matrix())?,
            provenance: Provenance {
                candidate: log.candidate.clone(),
                candidate_index: log.candidate_index,
                candidate_norm: log.candidate_norm.clone(),
                candidates_tried: log.candidates_tried,
                generators_found: log.generators_found,
                unit_adjustments_tried: log.unit_adjustments_tried,
                unit_exponents: log.unit_exponents.clone(),
                enumeration_bound: log.enumeration_bound.clone(),
                pool_norm: log.budget.pool_norm,
                unit_range: log.budget.unit_range,
                conj_stable,
                theta_convention: "genus 1: c_m counts x with h(x,x) = m, i.e. b(x,x) = 2m".into(),
            },
        })
    }

    /// Canonical text: keys sorted, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let v: Value = serde_json::to_value(self).expect("serializable");
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed lattice file: {e}"))
    }

    pub fn ideal_rows(&self) -> Result<(Vec<Vec<BigInt>>, BigInt), String> {
        let rows = self
            .ideal_basis
            .iter()
            .map(|r| r.iter().map(|x| x.parse::<BigInt>().map_err(|e| format!("bad ideal entry {x}: {e}"))).collect())
            .collect::<Result<Vec<Vec<BigInt>>, String>>()?;
        let den = self.ideal_den.parse::<BigInt>().map_err(|e| format!("bad ideal_den: {e}"))?;
        Ok((rows, den))
    }

    pub fn d_element(&self) -> Result<KElement, String> {
        let coords = self.d_coords.iter().map(|s| parse_rat(s).ok_or_else(|| format!("bad rational {s}"))).collect::<Result<Vec<_>, _>>()?;
        Ok(KElement::from_coords(coords))
    }

    pub fn h_entries(&self) -> Result<Vec<Vec<LElement>>, String> {
        self.h_table
            .iter()
            .map(|r| {
                r.iter()
                    .map(|[a, b]| Ok(LElement::new(parse_rat(a).ok_or(format!("bad rational {a}"))?, parse_rat(b).ok_or(format!("bad rational {b}"))?)))
                    .collect()
            })
            .collect()
    }
}

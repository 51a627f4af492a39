//! Command orchestration, persistence and reporting for the full pipeline.
//!
//! Every command returns an [`Outcome`]; the binary only prints it and exits with its code.

mod lattice_file;
mod manifest;

pub use lattice_file::{parse_rat, rat_string, LatticeFile, Provenance};
pub use manifest::{append as append_manifest, has_passing_verify, manifest_path, read as read_manifest, sha256_hex, ManifestEntry};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::exact_linalg::IntMatrix;
use crate::exec::{with_threads, Exec};
use crate::field_tower::{build_tower, verify_unramified, FElement, FieldTower, UnramifiedEvidence};
use crate::hermitian_theta::{
    congruence_check, e8_identify, rep_numbers, theta_genus1, transform_check_genus1, CongruenceEntry, CongruenceReport, DualReport,
    E8Report, HermitianLattice, OrbitReport, TableReport, ThetaError, TransformReport, ZetaReport,
};
use crate::lattice_builder::{
    find_unimodular_pair_with, satisfies_criterion, trace_gram, verify_even_unimodular, FracIdeal, LatticeError, MaximalOrder,
    SearchBudget, SearchLog, UnimodularPair, UnimodularityReport,
};

/// Stable process exit codes shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    Exhausted = 2,
    Invalid = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: ExitStatus,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(status: ExitStatus, stdout: String, stderr: String) -> Self {
        Outcome { status, stdout, stderr }
    }

    fn invalid(msg: impl Into<String>) -> Self {
        Outcome::new(ExitStatus::Invalid, String::new(), format!("error: {}\n", msg.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Build,
    Verify,
    Theta,
    TransformCheck,
    Sweep,
    E8Check,
}

/// Everything a command may need; unused fields are ignored by each command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub ell: Option<u64>,
    pub p: Option<u64>,
    pub genus: usize,
    /// Genus-1 coefficient bound for `theta`/`sweep`, maximal truncation for `transform-check`.
    pub coeff_bound: Option<usize>,
    pub diag_bound: u64,
    pub pool_norm: u64,
    pub unit_range: u32,
    pub precision: f64,
    pub ys: Vec<f64>,
    pub pairs: Vec<(u64, u64)>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        let budget = SearchBudget::default();
        RunConfig {
            ell: None,
            p: None,
            genus: 1,
            coeff_bound: None,
            diag_bound: 2,
            pool_norm: budget.pool_norm,
            unit_range: budget.unit_range,
            precision: 1e-8,
            ys: vec![1.0, 1.2, 1.5, 2.0],
            pairs: Vec::new(),
            input: None,
            out: None,
            threads: None,
            exec: Exec::Parallel,
        }
    }
}

pub const THETA_DEFAULT_BOUND: usize = 6;
pub const SWEEP_DEFAULT_BOUND: usize = 2;
pub const TRANSFORM_DEFAULT_MAX_BOUND: usize = 200;
/// Orbit sizes are checked on vectors with `b(x, x)` up to this value.
pub const ORBIT_NORM: i64 = 4;

impl RunConfig {
    pub fn validate(&self, cmd: Command) -> Result<(), String> {
        if self.ell == Some(0) {
            return Err("--ell must be a positive integer".into());
        }
        if self.genus == 0 {
            return Err("--genus must be at least 1".into());
        }
        if self.pool_norm == 0 {
            return Err("--pool-norm must be positive".into());
        }
        if self.threads == Some(0) {
            return Err("--threads must be positive".into());
        }
        if !(self.precision.is_finite() && self.precision > 0.0) {
            return Err("--precision must be a positive number".into());
        }
        if self.ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
            return Err("--y values must be positive numbers".into());
        }
        match cmd {
            Command::Build => {
                if self.ell.is_none() || self.p.is_none() {
                    return Err("build needs --ell and --p".into());
                }
            }
            Command::Verify | Command::Theta | Command::TransformCheck => {
                if self.input.is_none() {
                    return Err("an input lattice file is required (--in)".into());
                }
            }
            Command::E8Check => {
                if self.input.is_none() && (self.ell.is_none() || self.p.is_none()) {
                    return Err("e8check needs --in or both --ell and --p".into());
                }
            }
            Command::Sweep => {
                if let Some(&(ell, _)) = self.pairs.iter().find(|(ell, _)| *ell == 0) {
                    return Err(format!("sweep pair has ell = {ell}"));
                }
            }
        }
        Ok(())
    }

    pub fn budget(&self) -> SearchBudget {
        SearchBudget { pool_norm: self.pool_norm, unit_range: self.unit_range, exec: self.exec.into(), ..SearchBudget::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSummary {
    pub ell_input: u64,
    pub ell_norm: u64,
    pub squarefree_part: u64,
    pub p: u64,
    pub degree: usize,
    pub abs_discriminant: String,
}

impl TowerSummary {
    fn of(t: &FieldTower) -> Self {
        TowerSummary {
            ell_input: t.ell_input(),
            ell_norm: t.ell_norm(),
            squarefree_part: t.ell0(),
            p: t.p(),
            degree: t.degree(),
            abs_discriminant: t.abs_discriminant().to_string(),
        }
    }
}

/// Recomputation of the stored data from `(A, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub ell_norm_matches: bool,
    pub ideal_canonical: bool,
    pub d_in_real_subfield: bool,
    pub d_totally_positive: bool,
    pub criterion: bool,
    pub gram_matches_pair: bool,
    pub h_table_matches_pair: bool,
    pub zeta_matches_pair: bool,
}

/// Collected verdicts; a section is absent when its prerequisite stage did not run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PipelineReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unramified: Option<UnramifiedEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unimodularity: Option<UnimodularityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<ZetaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<OrbitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<TableReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub congruence: Option<CongruenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e8: Option<E8Report>,
    pub failed_checks: Vec<String>,
    /// Wall-clock seconds per stage; printed to standard error, never serialized.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.failed_checks.is_empty()
    }

    fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed_checks.push(name.to_string());
        }
    }

    fn time<R>(&mut self, stage: &str, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let r = f();
        self.timings.push((stage.to_string(), start.elapsed().as_secs_f64()));
        r
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    fn timing_lines(&self) -> String {
        self.timings.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "timing {k}: {v:.3}s");
            s
        })
    }
}

/// A freshly built lattice together with its in-memory form.
pub struct Built {
    pub tower: FieldTower,
    pub file: LatticeFile,
    pub lattice: HermitianLattice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    Invalid(String),
    Exhausted(String),
    Failed(String),
}

impl BuildError {
    pub fn status(&self) -> ExitStatus {
        match self {
            BuildError::Invalid(_) => ExitStatus::Invalid,
            BuildError::Exhausted(_) => ExitStatus::Exhausted,
            BuildError::Failed(_) => ExitStatus::Failure,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            BuildError::Invalid(m) | BuildError::Exhausted(m) | BuildError::Failed(m) => m,
        }
    }
}

/// Tower, pair search, trace lattice and Hermitian data for `(ell, p)`.
pub fn build_lattice(ell: u64, p: u64, budget: &SearchBudget) -> Result<Built, BuildError> {
    let tower = build_tower(ell, p).map_err(|e| BuildError::Invalid(e.to_string()))?;
    let order = MaximalOrder::new(&tower).map_err(|e| BuildError::Failed(e.to_string()))?;
    let pair = find_unimodular_pair_with(&order, budget).map_err(|e| match e {
        LatticeError::SearchExhausted(_) => BuildError::Exhausted(e.to_string()),
        e => BuildError::Failed(e.to_string()),
    })?;
    let conj_stable = pair.ideal.conj(&order).map(|c| c == pair.ideal).unwrap_or(false);
    let lat = trace_gram(&order, &pair).map_err(|e| BuildError::Failed(e.to_string()))?;
    let lattice = HermitianLattice::from_trace_lattice(&order, &lat).map_err(|e| BuildError::Failed(e.to_string()))?;
    let file = LatticeFile::new(&tower, &lat, &lattice, conj_stable).ok_or_else(|| BuildError::Failed("matrix entries overflow i64".into()))?;
    Ok(Built { tower, file, lattice })
}

/// Stored Hermitian data as a lattice; shape errors mean a malformed file.
pub fn lattice_from_file(tower: &FieldTower, file: &LatticeFile) -> Result<HermitianLattice, String> {
    let h = file.h_entries()?;
    HermitianLattice::from_parts(tower.p(), tower.quadratic().clone(), IntMatrix::from_i64(&file.gram), h, IntMatrix::from_i64(&file.zeta_matrix))
        .map_err(|e| e.to_string())
}

fn placeholder_log(file: &LatticeFile) -> SearchLog {
    let pv = &file.provenance;
    SearchLog {
        candidate: pv.candidate.clone(),
        candidate_index: pv.candidate_index,
        candidate_norm: pv.candidate_norm.clone(),
        candidates_tried: pv.candidates_tried,
        generators_found: pv.generators_found,
        unit_adjustments_tried: pv.unit_adjustments_tried,
        unit_exponents: pv.unit_exponents.clone(),
        enumeration_bound: pv.enumeration_bound.clone(),
        budget: SearchBudget { pool_norm: pv.pool_norm, unit_range: pv.unit_range, ..SearchBudget::default() },
    }
}

/// Re-derives everything from `(A, d)` and checks the stored lattice.
///
/// `Err` means the file cannot be interpreted at all (invalid input).
pub fn verify_lattice(file: &LatticeFile, exec: Exec) -> Result<PipelineReport, String> {
    let mut rep = PipelineReport::default();
    let tower = build_tower(file.ell, file.p).map_err(|e| e.to_string())?;
    let n = tower.degree();
    let square = |m: &Vec<Vec<i64>>| m.len() == n && m.iter().all(|r| r.len() == n);
    if !square(&file.gram) || !square(&file.zeta_matrix) || file.h_table.len() != n || file.h_table.iter().any(|r| r.len() != n) {
        return Err(format!("lattice data must be {n}x{n} for (ell, p) = ({}, {})", file.ell, file.p));
    }
    if file.d_coords.len() != n || file.ideal_basis.len() != n || file.ideal_basis.iter().any(|r| r.len() != n) {
        return Err(format!("ideal basis and d must have {n} coordinates"));
    }
    rep.tower = Some(TowerSummary::of(&tower));
    rep.provenance = Some(file.provenance.clone());

    let ev = rep.time("unramified", || verify_unramified(&tower));
    rep.check("unramified", ev.unramified && ev.matches_closed_forms);
    rep.unramified = Some(ev);

    let order = MaximalOrder::new(&tower).map_err(|e| e.to_string())?;
    let (rows, den) = file.ideal_rows()?;
    if den <= BigInt::from(0) {
        return Err("ideal_den must be positive".into());
    }
    let rat_rows: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect()).collect();
    let ideal = FracIdeal::from_basis(&order, &rat_rows).map_err(|e| e.to_string())?;
    let canonical = ideal.basis().to_rows() == rows && *ideal.den() == den && ideal.is_ideal(&order);
    let d_k = file.d_element()?;
    let d = FElement::new(&tower, d_k.clone());
    let d_positive = d.as_ref().map(|d| rep.time("total positivity", || tower.is_totally_positive(d))).unwrap_or(false);
    let criterion = rep.time("criterion", || satisfies_criterion(&order, &ideal, &d_k)).unwrap_or(false);
    let (gram_ok, h_ok, zeta_ok) = match &d {
        Some(d) => {
            let pair = UnimodularPair { ideal: ideal.clone(), d: d.clone(), log: placeholder_log(file) };
            match trace_gram(&order, &pair).and_then(|lat| {
                HermitianLattice::from_trace_lattice(&order, &lat).map_err(|e| LatticeError::InvalidPair(e.to_string())).map(|hl| (lat, hl))
            }) {
                Ok((lat, hl)) => (
                    lat.gram.to_i64_rows().as_ref() == Some(&file.gram),
                    hl.h_table().iter().map(|r| r.iter().map(|x| [rat_string(&x.a), rat_string(&x.b)]).collect::<Vec<_>>()).collect::<Vec<_>>()
                        == file.h_table,
                    hl.zeta_matrix().to_i64_rows().as_ref() == Some(&file.zeta_matrix),
                ),
                Err(_) => (false, false, false),
            }
        }
        None => (false, false, false),
    };
    let cons = ConsistencyReport {
        ell_norm_matches: file.ell_norm == tower.ell_norm(),
        ideal_canonical: canonical,
        d_in_real_subfield: d.is_some(),
        d_totally_positive: d_positive,
        criterion,
        gram_matches_pair: gram_ok,
        h_table_matches_pair: h_ok,
        zeta_matches_pair: zeta_ok,
    };
    for (name, ok) in [
        ("consistency.ell_norm", cons.ell_norm_matches),
        ("consistency.ideal_canonical", cons.ideal_canonical),
        ("consistency.d_in_real_subfield", cons.d_in_real_subfield),
        ("consistency.d_totally_positive", cons.d_totally_positive),
        ("consistency.criterion", cons.criterion),
        ("consistency.gram", cons.gram_matches_pair),
        ("consistency.h_table", cons.h_table_matches_pair),
        ("consistency.zeta_matrix", cons.zeta_matches_pair),
    ] {
        rep.check(name, ok);
    }
    rep.consistency = Some(cons);

    let gram_rat: Vec<Vec<BigRational>> = file.gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let uni = rep.time("even unimodular", || verify_even_unimodular(&gram_rat));
    for (name, ok) in [
        ("even_unimodular.integral", uni.integral),
        ("even_unimodular.symmetric", uni.symmetric),
        ("even_unimodular.even", uni.even),
        ("even_unimodular.det_one", uni.det_one),
        ("even_unimodular.positive_definite", uni.positive_definite),
        ("even_unimodular.dim_divisible_by_8", uni.dim_divisible_by_8),
    ] {
        rep.check(name, ok);
    }
    let positive = uni.positive_definite && uni.symmetric;
    rep.unimodularity = Some(uni);

    let hl = lattice_from_file(&tower, file)?;
    let table = hl.table_report();
    rep.check("h_table", table.pass());
    rep.table = Some(table);
    let dual = hl.dual_check();
    rep.check("dual", dual.pass);
    rep.dual = Some(dual);
    let z = hl.zeta_report();
    for (name, ok) in [
        ("zeta.order_p", z.order_p),
        ("zeta.nontrivial", z.nontrivial),
        ("zeta.preserves_gram", z.preserves_gram),
        ("zeta.preserves_h", z.preserves_h),
        ("zeta.fixed_point_free", z.fixed_point_free),
    ] {
        rep.check(name, ok);
    }
    rep.automorphism = Some(z);
    if positive {
        match rep.time("orbits", || hl.orbit_check(ORBIT_NORM, exec)) {
            Ok(o) => {
                rep.check("orbits", o.pass);
                rep.orbits = Some(o);
            }
            Err(_) => rep.check("orbits", false),
        }
    }
    Ok(rep)
}

/// Genus-1 coefficients in the same report shape as higher genus.
pub fn genus1_congruence(coeffs: &[u64], p: u64) -> CongruenceReport {
    let entries = coeffs
        .iter()
        .enumerate()
        .map(|(m, &c)| CongruenceEntry { diag: vec![m.to_string()], offdiag: vec![], count: c, residue: c % p })
        .collect();
    let zero_count = coeffs.first().copied().unwrap_or(0);
    let verdict = zero_count == 1 && coeffs.iter().skip(1).all(|c| c % p == 0);
    CongruenceReport { p, genus: 1, diag_bound: coeffs.len().saturating_sub(1) as u64, entries, zero_count, verdict }
}

pub fn coefficients_csv(report: &CongruenceReport) -> String {
    let mut s = String::new();
    if report.genus == 1 {
        s.push_str("m,count,residue\n");
        for e in &report.entries {
            let _ = writeln!(s, "{},{},{}", e.diag[0], e.count, e.residue);
        }
    } else {
        s.push_str("diag,offdiag,count,residue\n");
        for e in &report.entries {
            let off: Vec<String> = e.offdiag.iter().map(|[a, b]| format!("{a}{}{b}w", if b.starts_with('-') { "" } else { "+" })).collect();
            let _ = writeln!(s, "{},{},{},{}", e.diag.join(";"), off.join(";"), e.count, e.residue);
        }
    }
    s
}

/// Runs `cmd` under the configured thread count.
pub fn run(cmd: Command, cfg: &RunConfig) -> Outcome {
    if let Err(e) = cfg.validate(cmd) {
        return Outcome::invalid(e);
    }
    with_threads(cfg.threads, || match cmd {
        Command::Build => cmd_build(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Theta => cmd_theta(cfg),
        Command::TransformCheck => cmd_transform_check(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::E8Check => cmd_e8check(cfg),
    })
}

pub fn default_output_path(ell: u64, p: u64) -> PathBuf {
    PathBuf::from(format!("lattice_ell{ell}_p{p}.json"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Outcome> {
    std::fs::write(path, contents)
        .map_err(|e| Outcome::new(ExitStatus::Failure, String::new(), format!("error: cannot write {}: {e}\n", path.display())))
}

pub fn cmd_build(cfg: &RunConfig) -> Outcome {
    let (Some(ell), Some(p)) = (cfg.ell, cfg.p) else {
        return Outcome::invalid("build needs --ell and --p");
    };
    let start = Instant::now();
    let built = match build_lattice(ell, p, &cfg.budget()) {
        Ok(b) => b,
        Err(e) => return Outcome::new(e.status(), String::new(), format!("error: {}\n", e.message())),
    };
    let path = cfg.out.clone().unwrap_or_else(|| default_output_path(ell, p));
    let text = built.file.to_canonical_json();
    if let Err(o) = write_file(&path, &text) {
        return o;
    }
    let entry = ManifestEntry { command: "build".into(), sha256: sha256_hex(text.as_bytes()), verdict: "pass".into(), failed_checks: vec![] };
    if let Err(e) = append_manifest(&path, &entry) {
        return Outcome::new(ExitStatus::Failure, String::new(), format!("error: cannot write manifest: {e}\n"));
    }
    let rep = PipelineReport {
        tower: Some(TowerSummary::of(&built.tower)),
        provenance: Some(built.file.provenance.clone()),
        ..PipelineReport::default()
    };
    Outcome::new(
        ExitStatus::Success,
        rep.to_json(),
        format!("wrote {} (dim {})\ntiming build: {:.3}s\n", path.display(), built.lattice.dim(), start.elapsed().as_secs_f64()),
    )
}

/// Reads and parses the `--in` file, returning its bytes' hash too.
fn load_input(cfg: &RunConfig) -> Result<(PathBuf, LatticeFile, String), Outcome> {
    let path = cfg.input.clone().ok_or_else(|| Outcome::invalid("an input lattice file is required (--in)"))?;
    let text = std::fs::read_to_string(&path).map_err(|e| Outcome::invalid(format!("cannot read {}: {e}", path.display())))?;
    let file = LatticeFile::from_json(&text).map_err(Outcome::invalid)?;
    Ok((path, file, sha256_hex(text.as_bytes())))
}

fn failure_lines(rep: &PipelineReport) -> String {
    rep.failed_checks.iter().fold(String::new(), |mut s, c| {
        let _ = writeln!(s, "failed check: {c}");
        s
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Outcome {
    let (path, file, sha) = match load_input(cfg) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let rep = match verify_lattice(&file, cfg.exec) {
        Ok(r) => r,
        Err(e) => return Outcome::invalid(e),
    };
    let pass = rep.passed();
    let entry = ManifestEntry {
        command: "verify".into(),
        sha256: sha,
        verdict: if pass { "pass" } else { "fail" }.into(),
        failed_checks: rep.failed_checks.clone(),
    };
    let mut stderr = failure_lines(&rep) + &rep.timing_lines();
    if let Err(e) = append_manifest(&path, &entry) {
        let _ = writeln!(stderr, "warning: cannot write manifest: {e}");
    }
    let json = rep.to_json();
    if let Some(out) = &cfg.out {
        if let Err(o) = write_file(out, &json) {
            return o;
        }
    }
    let _ = writeln!(stderr, "verify: {}", if pass { "pass" } else { "FAIL" });
    Outcome::new(if pass { ExitStatus::Success } else { ExitStatus::Failure }, json, stderr)
}

/// Loads a lattice whose current contents passed `verify`.
fn load_verified(cfg: &RunConfig) -> Result<(PathBuf, LatticeFile, FieldTower, HermitianLattice), Outcome> {
    let (path, file, sha) = load_input(cfg)?;
    if !has_passing_verify(&path, &sha) {
        return Err(Outcome::invalid(format!(
            "{} has no passing verify entry for its current contents; run `verify --in {}` first",
            path.display(),
            path.display()
        )));
    }
    let tower = build_tower(file.ell, file.p).map_err(|e| Outcome::invalid(e.to_string()))?;
    let hl = lattice_from_file(&tower, &file).map_err(Outcome::invalid)?;
    Ok((path, file, tower, hl))
}

fn record(path: &Path, command: &str, pass: bool, stderr: &mut String) {
    let Ok(text) = std::fs::read(path) else { return };
    let entry = ManifestEntry { command: command.into(), sha256: sha256_hex(&text), verdict: if pass { "pass" } else { "fail" }.into(), failed_checks: vec![] };
    if let Err(e) = append_manifest(path, &entry) {
        let _ = writeln!(stderr, "warning: cannot write manifest: {e}");
    }
}

pub fn cmd_theta(cfg: &RunConfig) -> Outcome {
    let (path, _file, tower, hl) = match load_verified(cfg) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let start = Instant::now();
    let report = if cfg.genus == 1 {
        theta_genus1(&hl, cfg.coeff_bound.unwrap_or(THETA_DEFAULT_BOUND), cfg.exec).map(|c| genus1_congruence(&c, tower.p()))
    } else {
        rep_numbers(&hl, cfg.genus, cfg.diag_bound, cfg.exec).map(|t| congruence_check(&t, tower.p()))
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return Outcome::new(ExitStatus::Failure, String::new(), format!("error: {e}\n")),
    };
    let mut stderr = format!("timing theta: {:.3}s\n", start.elapsed().as_secs_f64());
    let csv = coefficients_csv(&report);
    let stdout = match &cfg.out {
        Some(out) => {
            if let Err(o) = write_file(out, &csv) {
                return o;
            }
            let rep = PipelineReport { congruence: Some(report.clone()), ..PipelineReport::default() };
            rep.to_json()
        }
        None => csv,
    };
    record(&path, &format!("theta genus {}", cfg.genus), report.verdict, &mut stderr);
    let _ = writeln!(stderr, "congruence mod {}: {}", report.p, if report.verdict { "pass" } else { "FAIL" });
    Outcome::new(if report.verdict { ExitStatus::Success } else { ExitStatus::Failure }, stdout, stderr)
}

pub fn cmd_transform_check(cfg: &RunConfig) -> Outcome {
    let (path, _file, _tower, hl) = match load_verified(cfg) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let max_bound = cfg.coeff_bound.unwrap_or(TRANSFORM_DEFAULT_MAX_BOUND);
    let mut stderr = String::new();
    match transform_check_genus1(&hl, &cfg.ys, cfg.precision, max_bound, None, cfg.exec) {
        Ok(r) => {
            let rep = PipelineReport { transform: Some(r.clone()), ..PipelineReport::default() };
            let json = rep.to_json();
            if let Some(out) = &cfg.out {
                if let Err(o) = write_file(out, &json) {
                    return o;
                }
            }
            record(&path, "transform-check", r.pass, &mut stderr);
            let _ = writeln!(
                stderr,
                "max relative error {:.3e} with truncation radius {} (target {:.1e}): {}",
                r.max_relative_error,
                r.coefficient_bound,
                r.target_precision,
                if r.pass { "pass" } else { "FAIL" }
            );
            Outcome::new(if r.pass { ExitStatus::Success } else { ExitStatus::Failure }, json, stderr)
        }
        Err(ThetaError::PrecisionUnreachable { target, bound, achievable }) => {
            record(&path, "transform-check", false, &mut stderr);
            let _ = writeln!(stderr, "error: precision {target:e} unreachable within truncation radius {bound}; achievable {achievable:e}");
            Outcome::new(ExitStatus::Failure, String::new(), stderr)
        }
        Err(e) => Outcome::new(ExitStatus::Failure, String::new(), format!("error: {e}\n")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub ell: u64,
    pub p: u64,
    pub dim: Option<usize>,
    pub built: bool,
    pub verified: bool,
    pub congruence: Option<bool>,
    pub root_count: Option<u64>,
    pub error: String,
}

impl SweepRow {
    pub fn pass(&self) -> bool {
        self.built && self.verified && self.congruence == Some(true)
    }
}

pub fn sweep_row(ell: u64, p: u64, bound: usize, budget: &SearchBudget, exec: Exec) -> SweepRow {
    let mut row = SweepRow { ell, p, dim: None, built: false, verified: false, congruence: None, root_count: None, error: String::new() };
    let built = match build_lattice(ell, p, budget) {
        Ok(b) => b,
        Err(e) => {
            row.error = e.message().to_string();
            return row;
        }
    };
    row.built = true;
    row.dim = Some(built.lattice.dim());
    match verify_lattice(&built.file, exec) {
        Ok(rep) => {
            row.verified = rep.passed();
            if !row.verified {
                row.error = rep.failed_checks.join(";");
            }
        }
        Err(e) => row.error = e,
    }
    if row.verified {
        match theta_genus1(&built.lattice, bound.max(1), exec) {
            Ok(c) => {
                row.root_count = Some(c[1]);
                row.congruence = Some(genus1_congruence(&c, p).verdict);
            }
            Err(e) => row.error = e.to_string(),
        }
    }
    row
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |x: Option<String>| x.unwrap_or_default();
    rows.iter().fold(String::from("ell,p,dim,built,verified,congruence,root_count,error\n"), |mut s, r| {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.ell,
            r.p,
            opt(r.dim.map(|d| d.to_string())),
            r.built,
            r.verified,
            opt(r.congruence.map(|c| c.to_string())),
            opt(r.root_count.map(|c| c.to_string())),
            r.error.replace(',', ";")
        );
        s
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Outcome {
    let budget = cfg.budget();
    let bound = cfg.coeff_bound.unwrap_or(SWEEP_DEFAULT_BOUND);
    let rows = cfg.exec.map_ordered(cfg.pairs.clone(), |(ell, p)| sweep_row(ell, p, bound, &budget, cfg.exec));
    let csv = sweep_csv(&rows);
    let stdout = match &cfg.out {
        Some(out) => {
            if let Err(o) = write_file(out, &csv) {
                return o;
            }
            String::new()
        }
        None => csv,
    };
    let failed = rows.iter().filter(|r| !r.pass()).count();
    let stderr = format!("sweep: {} rows, {} failed\n", rows.len(), failed);
    Outcome::new(if failed == 0 { ExitStatus::Success } else { ExitStatus::Failure }, stdout, stderr)
}

pub fn cmd_e8check(cfg: &RunConfig) -> Outcome {
    let hl = if cfg.input.is_some() {
        let (_, file, _) = match load_input(cfg) {
            Ok(x) => x,
            Err(o) => return o,
        };
        let tower = match build_tower(file.ell, file.p) {
            Ok(t) => t,
            Err(e) => return Outcome::invalid(e.to_string()),
        };
        match lattice_from_file(&tower, &file) {
            Ok(h) => h,
            Err(e) => return Outcome::invalid(e),
        }
    } else {
        match build_lattice(cfg.ell.unwrap_or(0), cfg.p.unwrap_or(0), &cfg.budget()) {
            Ok(b) => b.lattice,
            Err(e) => return Outcome::new(e.status(), String::new(), format!("error: {}\n", e.message())),
        }
    };
    match e8_identify(&hl, cfg.exec) {
        Ok(r) => {
            let ok = r.is_e8;
            let rep = PipelineReport { e8: Some(r), ..PipelineReport::default() };
            Outcome::new(if ok { ExitStatus::Success } else { ExitStatus::Failure }, rep.to_json(), format!("e8: {}\n", if ok { "yes" } else { "no" }))
        }
        Err(e @ ThetaError::NotApplicable(_)) => Outcome::invalid(e.to_string()),
        Err(e) => Outcome::new(ExitStatus::Failure, String::new(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus1_report_shape() {
        let r = genus1_congruence(&[1, 240, 2160], 5);
        assert!(r.verdict);
        assert_eq!(r.entries.len(), 3);
        assert_eq!(coefficients_csv(&r), "m,count,residue\n0,1,1\n1,240,0\n2,2160,0\n");
        assert!(!genus1_congruence(&[1, 241], 5).verdict);
        assert!(genus1_congruence(&[1], 5).verdict);
    }

    #[test]
    fn config_validation() {
        let cfg = RunConfig::default();
        assert!(cfg.validate(Command::Build).is_err());
        assert!(cfg.validate(Command::Verify).is_err());
        assert!(cfg.validate(Command::Sweep).is_ok());
        let bad = RunConfig { precision: 0.0, ..RunConfig::default() };
        assert!(bad.validate(Command::Sweep).is_err());
        let bad = RunConfig { threads: Some(0), ..RunConfig::default() };
        assert!(bad.validate(Command::Sweep).is_err());
    }

    #[test]
    fn invalid_pairs_exit_three() {
        for (ell, p) in [(5, 5), (1, 7), (1, 4)] {
            let cfg = RunConfig { ell: Some(ell), p: Some(p), ..RunConfig::default() };
            let o = cmd_build(&cfg);
            assert_eq!(o.status, ExitStatus::Invalid, "{ell} {p}");
            assert!(o.stderr.contains(&format!("p = {p}")));
        }
    }

    #[test]
    fn build_verify_in_memory() {
        let built = build_lattice(1, 5, &SearchBudget::default()).unwrap();
        let text = built.file.to_canonical_json();
        let parsed = LatticeFile::from_json(&text).unwrap();
        assert_eq!(parsed.to_canonical_json(), text);
        let rep = verify_lattice(&parsed, Exec::Sequential).unwrap();
        assert!(rep.passed(), "{:?}", rep.failed_checks);

        let mut bad = parsed.clone();
        bad.gram[0][1] += 1;
        let rep = verify_lattice(&bad, Exec::Sequential).unwrap();
        assert!(rep.failed_checks.iter().any(|c| c == "consistency.gram"));
        assert!(rep.failed_checks.iter().any(|c| c == "even_unimodular.symmetric"));

        let mut bad = parsed;
        bad.zeta_matrix = (0..8).map(|i| (0..8).map(|j| i64::from(i == j)).collect()).collect();
        let rep = verify_lattice(&bad, Exec::Sequential).unwrap();
        assert!(rep.failed_checks.iter().any(|c| c == "zeta.order_p" || c == "zeta.nontrivial"));
    }

    #[test]
    fn empty_sweep() {
        let o = cmd_sweep(&RunConfig::default());
        assert_eq!(o.status, ExitStatus::Success);
        assert_eq!(o.stdout, "ell,p,dim,built,verified,congruence,root_count,error\n");
    }
}

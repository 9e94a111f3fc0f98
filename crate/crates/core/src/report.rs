//! Verification reports and the command implementations behind the CLI.

use crate::braid::{braid_equal, compose_blocks, lift_to_twists, monodromy_blocks, verify_manfredini, BraidWord};
use crate::coxeter::{coxeter_action, psi_factorization, psi_factors, validate_chain};
use crate::error::{Error, Result};
use crate::factorization::{
    apply_script, auroux_certificate, hurwitz_search, letterwise_equal, product_matrix, random_factorization, random_script, replay_certificate, AurouxCertificate,
    Factorization, HomologyComparator, Move, SearchBudget, SearchOutcome,
};
use crate::invariants::{family_enumerate, invariants, printed_formula_report, theorem_hypotheses, CoverType};
use crate::surface::{format_signs, reference_model, ribbon_from_system, CurveId, SignMode};
use crate::twist::{is_symplectic, psi_reference, sign_search, word_matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub max_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl Environment {
    pub fn current(model: Option<String>) -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            max_states: SearchBudget::default().from_env().max_states,
            model,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub environment: Environment,
    pub exit_code: i32,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>) -> Self {
        VerificationReport { command: command.into(), checks: Vec::new(), notes: Vec::new(), environment: Environment::current(None), exit_code: 0 }
    }

    pub fn check(&mut self, name: impl Into<String>, status: Status, details: Value) {
        self.checks.push(Check { name: name.into(), status, details });
        self.exit_code = self.compute_exit_code();
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// 1 if anything failed, 3 if nothing failed but something was inconclusive, else 0.
    fn compute_exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            3
        } else {
            0
        }
    }

    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    pub fn to_table(&self) -> String {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = format!("{}\n", self.command);
        for c in &self.checks {
            let st = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Inconclusive => "inconclusive",
            };
            out.push_str(&format!("  {:<w$}  {st}\n", c.name));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out.push_str(&format!("exit code {}\n", self.exit_code));
        out
    }
}

pub fn check_b(b: u32) -> Result<()> {
    if !(2..=6).contains(&b) {
        return Err(Error::InvalidParameter(format!("b must be in 2..=6, got {b}")));
    }
    Ok(())
}

/// Compares the six-factor product with the reference ψ on homology.
pub fn cmd_verify_psi(b: u32, mode: SignMode) -> Result<VerificationReport> {
    check_b(b)?;
    let mut r = VerificationReport::new(format!("verify-psi --b {b} --sign-mode {mode}"));
    let signs = match mode {
        SignMode::Explicit(s) => s,
        SignMode::Auto => {
            let search = sign_search(b, true)?;
            let admissible: Vec<String> = search.conventions.iter().filter(|c| c.admissible).map(|c| format_signs(&c.signs)).collect();
            let matching: Vec<String> = search.conventions.iter().filter(|c| c.admissible && c.product_matches == Some(true)).map(|c| format_signs(&c.signs)).collect();
            let accepted = search.conventions.iter().find(|c| c.admissible && c.product_matches == Some(true)).or_else(|| search.conventions.iter().find(|c| c.admissible));
            r.check(
                "sign-search",
                Status::from_bool(accepted.is_some()),
                json!({ "admissible": admissible, "product_matches": matching, "accepted": accepted.map(|c| format_signs(&c.signs)) }),
            );
            match accepted {
                Some(c) => c.signs,
                None => return Ok(r),
            }
        }
    };
    let (sys, _, model) = reference_model(b, SignMode::Explicit(signs))?;
    r.environment.model = Some(model.fingerprint.clone());
    let topo = model.boundary_components == 4 && model.genus == (4 * b - 3) as usize && model.rank == (8 * b - 6) as usize;
    r.check(
        "topology",
        Status::from_bool(topo),
        json!({ "sigma_signs": format_signs(&signs), "boundary_components": model.boundary_components, "genus": model.genus, "rank": model.rank }),
    );
    let psi = match psi_reference(&model) {
        Ok(p) => p,
        Err(e) => {
            r.check("psi-well-defined", Status::Fail, json!({ "error": e.to_string() }));
            return Ok(r);
        }
    };
    r.check("psi-well-defined", Status::Pass, json!({}));
    let word = psi_factorization(b)?;
    let product = word_matrix(&model, &word)?;
    r.check("psi-symplectic", Status::from_bool(is_symplectic(&psi, &model)), json!({}));
    r.check("product-symplectic", Status::from_bool(is_symplectic(&product, &model)), json!({ "letters": word.len() }));
    r.check("product-equals-psi", Status::from_bool(product.matrix == psi.matrix), json!({ "dimension": model.rank }));
    let mut actions = Vec::new();
    let mut all = true;
    for f in psi_factors(b)? {
        let chain = validate_chain(&sys, &f.chain)?;
        let a = coxeter_action(&model, &chain)?;
        all &= a.holds();
        actions.push(json!({ "factor": f.name, "length": chain.len(), "power": a.power, "holds": a.holds() }));
    }
    r.check("coxeter-action", Status::from_bool(all), json!(actions));
    Ok(r)
}

/// Options for the Auroux pipeline.
#[derive(Clone, Debug)]
pub struct AurouxOptions {
    pub b: u32,
    pub mode: SignMode,
    /// Block composition such as `XXYY`.
    pub composition: String,
    /// Drop every σ letter from the lifted factorization.
    pub without_sigma: bool,
}

impl AurouxOptions {
    pub fn new(b: u32) -> Self {
        AurouxOptions { b, mode: SignMode::Auto, composition: "XXYY".into(), without_sigma: false }
    }
}

pub struct AurouxRun {
    pub report: VerificationReport,
    pub factorization: Factorization,
    pub certificate: Option<AurouxCertificate>,
}

/// The lifted monodromy factorization for a block composition.
pub fn lifted_monodromy(opts: &AurouxOptions) -> Result<(Factorization, crate::surface::HomologyModel)> {
    check_b(opts.b)?;
    let (_, _, model) = reference_model(opts.b, opts.mode)?;
    let blocks = monodromy_blocks(opts.b)?;
    let letters = compose_blocks(&blocks, &opts.composition)?;
    let mut f = lift_to_twists(&letters, opts.b, &model)?;
    if opts.without_sigma {
        f.letters.retain(|l| l.core != CurveId::SIGMA);
    }
    Ok((f, model))
}

pub fn cmd_auroux(opts: &AurouxOptions) -> Result<AurouxRun> {
    let (f, model) = lifted_monodromy(opts)?;
    let mut cmd = format!("auroux --b {} --composition {}", opts.b, opts.composition);
    if opts.without_sigma {
        cmd.push_str(" --without-sigma");
    }
    let mut r = VerificationReport::new(cmd);
    r.environment.model = Some(model.fingerprint.clone());
    let psi = psi_factorization(opts.b)?;
    let identity = product_matrix(&f, &model)?.is_identity();
    r.check("lifted-product-identity", Status::from_bool(identity), json!({ "letters": f.len() }));
    let certificate = match auroux_certificate(&f, &psi, &model) {
        Ok(c) => c,
        Err(Error::HypothesisUnmet(missing)) => {
            r.check("hypothesis", Status::Fail, json!({ "missing_cores": missing }));
            return Ok(AurouxRun { report: r, factorization: f, certificate: None });
        }
        Err(e) => {
            r.check("certificate", Status::Fail, json!({ "error": e.to_string() }));
            return Ok(AurouxRun { report: r, factorization: f, certificate: None });
        }
    };
    let cores: Vec<String> = certificate.entries.iter().map(|e| e.core.to_string()).collect();
    r.check("hypothesis", Status::Pass, json!({ "cores": cores }));
    let replay = replay_certificate(&f, &psi, &certificate, &model);
    r.check(
        "certificate-replay",
        Status::from_bool(replay.is_ok()),
        json!({ "entries": certificate.entries.len(), "moves": certificate.entries.iter().map(|e| e.script.len()).sum::<usize>(), "error": replay.err().map(|e| e.to_string()) }),
    );
    Ok(AurouxRun { report: r, factorization: f, certificate: Some(certificate) })
}

/// Replays a stored certificate against the factorization it was issued for.
pub fn cmd_auroux_replay(opts: &AurouxOptions, cert: &AurouxCertificate) -> Result<VerificationReport> {
    let (f, model) = lifted_monodromy(opts)?;
    let mut r = VerificationReport::new(format!("auroux replay --b {}", opts.b));
    r.environment.model = Some(model.fingerprint.clone());
    let psi = psi_factorization(opts.b)?;
    match replay_certificate(&f, &psi, cert, &model) {
        Ok(()) => r.check("certificate-replay", Status::Pass, json!({ "entries": cert.entries.len() })),
        Err(Error::Replay { entry, step, reason }) => r.check("certificate-replay", Status::Fail, json!({ "entry": entry, "step": step, "reason": reason })),
        Err(e) => r.check("certificate-replay", Status::Fail, json!({ "error": e.to_string() })),
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportTarget {
    Config,
    Ribbon,
    Model,
    Monodromy,
    PsiWord,
}

impl std::str::FromStr for ExportTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "config" => ExportTarget::Config,
            "ribbon" => ExportTarget::Ribbon,
            "model" => ExportTarget::Model,
            "monodromy" => ExportTarget::Monodromy,
            "psi-word" => ExportTarget::PsiWord,
            _ => return Err(Error::InvalidParameter(format!("unknown export target {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "json" => Format::Json,
            "dot" => Format::Dot,
            "table" => Format::Table,
            _ => return Err(Error::InvalidParameter(format!("unknown format {s:?}"))),
        })
    }
}

fn pretty(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Byte-stable text for the requested artifact.
pub fn cmd_export(what: ExportTarget, b: u32, mode: SignMode, format: Format) -> Result<String> {
    check_b(b)?;
    let unsupported = || Err(Error::InvalidParameter(format!("{format:?} output is not available for {what:?}")));
    match (what, format) {
        (ExportTarget::Config, Format::Json) => pretty(&reference_model(b, mode)?.0),
        (ExportTarget::Config, Format::Dot) => Ok(reference_model(b, mode)?.0.to_dot()),
        (ExportTarget::Ribbon, Format::Json) => pretty(&ribbon_from_system(&reference_model(b, mode)?.0)?),
        (ExportTarget::Model, Format::Json) => pretty(&reference_model(b, mode)?.2),
        (ExportTarget::Monodromy, Format::Json) => pretty(&monodromy_blocks(b)?),
        (ExportTarget::PsiWord, Format::Json) => {
            let factors = psi_factors(b)?;
            pretty(&json!({ "b": b, "factors": factors, "word": psi_factorization(b)? }))
        }
        (ExportTarget::PsiWord, Format::Table) => Ok(format!("{}\n", psi_factorization(b)?)),
        _ => unsupported(),
    }
}

pub fn cmd_invariants(a: i64, b: i64, c: i64, d: Option<i64>, k: Option<i64>, force: bool) -> Result<VerificationReport> {
    let d_val = d.unwrap_or(b);
    let t = CoverType::new(a, b, c, d_val)?;
    let mut cmd = format!("invariants --a {a} --b {b} --c {c}");
    if let Some(d) = d {
        cmd.push_str(&format!(" --d {d}"));
    }
    if let Some(k) = k {
        cmd.push_str(&format!(" --k {k}"));
    }
    let mut r = VerificationReport::new(cmd);
    let inv = invariants(&t);
    r.check("invariants", Status::Pass, json!({ "cover": t, "invariants": inv }));
    if d_val == b {
        r.check("deformation-dimension", Status::Pass, json!({ "M": crate::invariants::deformation_dimension(a, b, c) }));
        for disc in printed_formula_report(a, b, c)? {
            if !disc.agrees {
                r.note(format!(
                    "printed {} = {} gives {}, closed form gives {}",
                    disc.quantity, disc.printed, disc.printed_value, disc.computed_value
                ));
            }
        }
    }
    if let Some(k) = k {
        let hyp = theorem_hypotheses(a, b, c, k);
        for h in &hyp.checks {
            r.check(format!("hypothesis-{}", h.name), Status::from_bool(h.holds), serde_json::to_value(h)?);
        }
        match family_enumerate(a, b, c, k, force) {
            Ok(members) => r.check("family", Status::Pass, serde_json::to_value(&members)?),
            Err(Error::HypothesisUnmet(_)) => r.note("family not enumerated: hypotheses fail (use --force)"),
            Err(e) => return Err(e),
        }
    }
    Ok(r)
}

pub fn cmd_braid_eq(strands: usize, w1: Vec<i32>, w2: Vec<i32>) -> Result<VerificationReport> {
    let (a, b) = (BraidWord::new(strands, w1)?, BraidWord::new(strands, w2)?);
    let mut r = VerificationReport::new(format!("braid eq --strands {strands} {:?} {:?}", a.word, b.word));
    let eq = braid_equal(&a, &b)?;
    r.check("braid-equal", Status::from_bool(eq), json!({ "permutation_left": a.permutation(), "permutation_right": b.permutation() }));
    Ok(r)
}

pub fn cmd_manfredini(n: usize, k: usize) -> Result<VerificationReport> {
    let rep = verify_manfredini(n, k)?;
    let mut r = VerificationReport::new(format!("braid manfredini --n {n} --k {k}"));
    for c in &rep.checks {
        let status = match (&c.skipped, c.holds) {
            (Some(_), _) => Status::Inconclusive,
            (None, h) => Status::from_bool(h),
        };
        r.check(c.name.clone(), status, json!({ "skipped": c.skipped }));
    }
    Ok(r)
}

/// Replays `script` on `f`. When `target` is given the result must equal it letter for letter,
/// or only letterwise on homology when `homology_only` is set.
pub fn cmd_hurwitz_replay(f: &Factorization, script: &[Move], target: Option<&Factorization>, homology_only: bool, b: u32, mode: SignMode) -> Result<VerificationReport> {
    check_b(b)?;
    let (_, _, model) = reference_model(b, mode)?;
    let mut r = VerificationReport::new(format!("hurwitz replay --b {b}"));
    r.environment.model = Some(model.fingerprint.clone());
    let out = match apply_script(f, script) {
        Ok(out) => out,
        Err((step, e)) => {
            r.check("replay", Status::Fail, json!({ "step": step, "error": e.to_string() }));
            return Ok(r);
        }
    };
    let before = product_matrix(f, &model)?;
    let after = product_matrix(&out, &model)?;
    r.check("replay", Status::Pass, json!({ "moves": script.len() }));
    r.check("product-preserved", Status::from_bool(before.matrix == after.matrix), json!({}));
    if let Some(t) = target {
        let exact = out.letters == t.letters;
        let on_homology = letterwise_equal(&out, t, &HomologyComparator { model: &model })?;
        let ok = if homology_only { on_homology } else { exact };
        r.check("matches-target", Status::from_bool(ok), json!({ "exact": exact, "on_homology": on_homology }));
    }
    Ok(r)
}

pub struct SearchRun {
    pub report: VerificationReport,
    pub script: Option<Vec<Move>>,
}

pub fn cmd_hurwitz_search(f: &Factorization, g: &Factorization, b: u32, mode: SignMode, budget: SearchBudget) -> Result<SearchRun> {
    check_b(b)?;
    let (_, _, model) = reference_model(b, mode)?;
    let mut r = VerificationReport::new(format!("hurwitz search --b {b} --depth {}", budget.max_depth));
    r.environment.model = Some(model.fingerprint.clone());
    let cmp = HomologyComparator { model: &model };
    let pf = product_matrix(f, &model)?;
    let pg = product_matrix(g, &model)?;
    if pf.matrix != pg.matrix {
        r.check("products-agree", Status::Fail, json!({}));
        return Ok(SearchRun { report: r, script: None });
    }
    r.check("products-agree", Status::Pass, json!({}));
    let out = hurwitz_search(f, g, budget, &cmp)?;
    let script = out.script().map(|s| s.to_vec());
    match &out {
        SearchOutcome::Found { script, essential_moves, states } => {
            let replayed = apply_script(f, script).map(|h| letterwise_equal(&h, g, &cmp).unwrap_or(false)).unwrap_or(false);
            r.check("search", Status::from_bool(replayed), json!({ "moves": script.len(), "essential_moves": essential_moves, "states": states }));
        }
        SearchOutcome::Inconclusive { states, depth_reached, reason } => {
            r.check("search", Status::Inconclusive, json!({ "states": states, "depth_reached": depth_reached, "reason": reason }));
        }
    }
    Ok(SearchRun { report: r, script })
}

/// A random factorization, a random script and the resulting target, for search benchmarks.
#[derive(Clone, Debug, Serialize)]
pub struct PlantedInstance {
    pub seed: u64,
    pub source: Factorization,
    pub script: Vec<Move>,
    pub target: Factorization,
}

pub fn cmd_hurwitz_plant(b: u32, mode: SignMode, len: usize, moves: usize, seed: u64) -> Result<PlantedInstance> {
    check_b(b)?;
    let (sys, _, model) = reference_model(b, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source = random_factorization(&model, &sys.curves, len, 1, &mut rng);
    let script = random_script(len, moves, &mut rng);
    let target = apply_script(&source, &script).map_err(|(_, e)| e)?;
    Ok(PlantedInstance { seed, source, script, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut r = VerificationReport::new("x");
        assert_eq!(r.exit_code, 0);
        r.check("a", Status::Inconclusive, json!({}));
        assert_eq!(r.exit_code, 3);
        r.check("b", Status::Pass, json!({}));
        assert_eq!(r.exit_code, 3);
        r.check("c", Status::Fail, json!({}));
        assert_eq!(r.exit_code, 1);
    }

    #[test]
    fn verify_psi_b2() {
        let r = cmd_verify_psi(2, SignMode::Auto).unwrap();
        assert_eq!(r.exit_code, 0, "{}", r.to_table());
        assert!(cmd_verify_psi(1, SignMode::Auto).is_err());
    }

    #[test]
    fn auroux_variants() {
        let run = cmd_auroux(&AurouxOptions::new(2)).unwrap();
        assert_eq!(run.report.exit_code, 0, "{}", run.report.to_table());
        let mut opts = AurouxOptions::new(2);
        opts.without_sigma = true;
        let run = cmd_auroux(&opts).unwrap();
        assert_eq!(run.report.status_of("hypothesis"), Some(Status::Fail));
        let missing = &run.report.checks.iter().find(|c| c.name == "hypothesis").unwrap().details["missing_cores"];
        assert_eq!(missing, &json!(["σ"]));
    }

    #[test]
    fn exports_are_stable() {
        let a = cmd_export(ExportTarget::Config, 2, SignMode::Auto, Format::Dot).unwrap();
        assert_eq!(a, cmd_export(ExportTarget::Config, 2, SignMode::Auto, Format::Dot).unwrap());
        assert!(cmd_export(ExportTarget::Monodromy, 2, SignMode::Auto, Format::Dot).is_err());
        assert!("svg".parse::<Format>().is_err());
        assert!("nope".parse::<ExportTarget>().is_err());
    }

    #[test]
    fn invariants_report() {
        let r = cmd_invariants(14, 8, 6, None, Some(2), false).unwrap();
        assert_eq!(r.exit_code, 0, "{}", r.to_table());
        assert!(r.notes.iter().any(|n| n.contains("chi")));
        let r = cmd_invariants(10, 6, 4, None, Some(2), false).unwrap();
        assert_eq!(r.exit_code, 1);
    }

    #[test]
    fn manfredini_k1_is_inconclusive_only_for_c() {
        let r = cmd_manfredini(4, 1).unwrap();
        assert_eq!(r.exit_code, 3);
        assert!(r.checks.iter().any(|c| c.status == Status::Inconclusive));
    }
}

//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjoint::{adjoint_cross_check, build_adjoint_rep, build_coadjoint_rep, coadjoint_cross_check};
use crate::dgmod::{cohomology_dims, shape, trivial_line, ComponentTable};
use crate::gca::AlgebraElement;
use crate::io::{fixture, mutate_file, parse_structure, FileMutation, IoError, Loaded, StructureFile};
use crate::lie2::{compile_homological_vf, lie2_axioms_check, q_square_check};
use crate::poisson::{compatibility_check, poisson_axioms_check, sharp_antimorphism_check, symplectic_check};
use crate::report::CheckReport;
use crate::weil::{brute_force_weil_dims, build_weil, split_weil_dims, weil_double_complex_check, weil_row_vs_coadjoint_check};

pub const TOOL: &str = "lie2";
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_WEIL_CUTOFF: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "lie2", version, about = "Exact checks for split Lie 2-algebroids, their adjoint modules, Weil algebras and degree-2 Poisson brackets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the structured JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for mutation sampling (overrides the file's options.seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also run K random single-entry mutations of the input and report which are detected.
    #[arg(long, global = true, value_name = "K")]
    pub mutations: Option<usize>,
    /// Largest bidegree p, q compared against brute-force counts in `check weil`.
    #[arg(long, global = true, value_name = "N")]
    pub weil_cutoff: Option<usize>,
    /// Report timing_ms as 0 so that reports compare byte for byte.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a group of checks on a structure file.
    Check { what: CheckKind, file: PathBuf },
    /// Build a derived structure and print its components.
    Build { what: BuildKind, file: PathBuf },
    /// Write a shipped fixture as a structure file.
    Export {
        what: ExportKind,
        name: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohomology of the trivial line representation (point base only).
    Cohomology {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: i32,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Lie2,
    Rep3,
    Weil,
    Poisson,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildKind {
    Adjoint,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportKind {
    Fixture,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub command: String,
    pub file: String,
    pub name: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: BTreeMap<String, CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mutations: Vec<MutationOutcome>,
    pub timing_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationOutcome {
    pub pointer: String,
    pub delta: String,
    pub detected: bool,
    pub failing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorReport {
    pub tool: String,
    pub error: String,
}

/// One entry of a component table, e.g. the `(1,0)` coefficient of `t1` from `X1` to `q2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub shape: (u32, u32),
    pub monomial: String,
    pub from: String,
    pub to: String,
    pub value: String,
}

pub fn component_entries(t: &ComponentTable) -> Vec<ComponentEntry> {
    let mut out = Vec::new();
    for (m, mat) in &t.table {
        for (j, row) in mat.iter().enumerate() {
            for (k, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    out.push(ComponentEntry {
                        shape: shape(&t.gens, m),
                        monomial: AlgebraElement::monomial_string(&t.gens, m),
                        from: t.src.names[j].clone(),
                        to: t.dst.names[k].clone(),
                        value: p.to_string(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

pub fn load_file(path: &Path) -> Result<(StructureFile, Loaded), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let f = parse_structure(&text)?;
    let l = f.load()?;
    Ok((f, l))
}

type Job = (&'static str, fn(&Loaded, usize) -> CheckReport);

fn check_declared_q(l: &Loaded, _: usize) -> CheckReport {
    let compiled = compile_homological_vf(&l.data);
    let gs = l.data.gens();
    let failures = gs
        .slots()
        .into_iter()
        .filter(|&s| compiled.value(s) != l.declared_q.value(s))
        .map(|s| format!("Q({}): declared {}, compiled {}", gs.slot_name(s), l.declared_q.value(s), compiled.value(s)))
        .collect();
    let mut r = CheckReport::new("declared_q");
    r.clause("matches_tensors", failures);
    r
}

fn check_axioms(l: &Loaded, _: usize) -> CheckReport {
    lie2_axioms_check(&l.data)
}

fn check_q_square(l: &Loaded, _: usize) -> CheckReport {
    q_square_check(&l.data)
}

fn check_adjoint(l: &Loaded, _: usize) -> CheckReport {
    adjoint_cross_check(&l.data, &l.tm).unwrap_or_else(|e| {
        let mut r = CheckReport::new("adjoint");
        r.clause("build", vec![e.to_string()]);
        r
    })
}

fn check_coadjoint(l: &Loaded, _: usize) -> CheckReport {
    match build_adjoint_rep(&l.data, &l.tm) {
        Ok(ad) => coadjoint_cross_check(&ad),
        Err(e) => {
            let mut r = CheckReport::new("coadjoint");
            r.clause("build", vec![e.to_string()]);
            r
        }
    }
}

fn check_weil_complex(l: &Loaded, _: usize) -> CheckReport {
    weil_double_complex_check(&build_weil(&l.data))
}

fn check_weil_row(l: &Loaded, _: usize) -> CheckReport {
    weil_row_vs_coadjoint_check(&l.data, &l.tm)
}

fn check_weil_dims(l: &Loaded, cutoff: usize) -> CheckReport {
    let d = &l.data;
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let mut failures = Vec::new();
    for p in 0..=cutoff {
        for q in 0..=cutoff {
            let (a, b) = (split_weil_dims(m, rq, rb, p, q), brute_force_weil_dims(m, rq, rb, p, q));
            if a != b {
                failures.push(format!("W^({p},{q}): formula {a}, count {b}"));
            }
        }
    }
    let mut r = CheckReport::new("weil_dims");
    r.clause(format!("bidegrees_up_to_{cutoff}"), failures);
    r
}

fn poisson_missing() -> CheckReport {
    let mut r = CheckReport::new("poisson");
    r.clause("present", vec!["no poisson section".into()]);
    r
}

fn check_poisson_axioms(l: &Loaded, _: usize) -> CheckReport {
    l.poisson.as_ref().map_or_else(poisson_missing, |(p, _)| poisson_axioms_check(p))
}

fn check_compatibility(l: &Loaded, _: usize) -> CheckReport {
    l.poisson
        .as_ref()
        .map_or_else(poisson_missing, |(p, _)| compatibility_check(p, &compile_homological_vf(&l.data)))
}

fn check_antimorphism(l: &Loaded, _: usize) -> CheckReport {
    l.poisson
        .as_ref()
        .map_or_else(poisson_missing, |(p, _)| sharp_antimorphism_check(p, &compile_homological_vf(&l.data)))
}

fn check_symplectic(l: &Loaded, _: usize) -> CheckReport {
    l.poisson.as_ref().map_or_else(poisson_missing, |(p, _)| symplectic_check(p))
}

fn jobs(kind: CheckKind, l: &Loaded) -> Vec<Job> {
    let lie2: Vec<Job> = vec![
        ("lie2.declared_q", check_declared_q),
        ("lie2.axioms", check_axioms),
        ("lie2.q_square", check_q_square),
    ];
    let rep3: Vec<Job> = vec![("rep3.adjoint", check_adjoint), ("rep3.coadjoint", check_coadjoint)];
    let mut weil: Vec<Job> = vec![("weil.double_complex", check_weil_complex), ("weil.row", check_weil_row)];
    if l.data.nvars() == 0 {
        weil.push(("weil.dims", check_weil_dims));
    }
    let mut poisson: Vec<Job> = vec![
        ("poisson.axioms", check_poisson_axioms),
        ("poisson.compatibility", check_compatibility),
        ("poisson.antimorphism", check_antimorphism),
    ];
    if l.poisson.as_ref().is_some_and(|(_, s)| *s) {
        poisson.push(("poisson.symplectic", check_symplectic));
    }
    match kind {
        CheckKind::Lie2 => lie2,
        CheckKind::Rep3 => rep3,
        CheckKind::Weil => weil,
        CheckKind::Poisson => poisson,
        CheckKind::All => {
            let mut all = lie2;
            all.extend(rep3);
            all.extend(weil);
            if l.poisson.is_some() {
                all.extend(poisson);
            }
            all
        }
    }
}

/// Runs the selected checks in parallel; the result is keyed by check name.
pub fn run_checks(kind: CheckKind, l: &Loaded, cutoff: usize) -> BTreeMap<String, CheckReport> {
    jobs(kind, l)
        .into_par_iter()
        .map(|(name, f)| (name.to_string(), f(l, cutoff)))
        .collect()
}

fn failing_ids(checks: &BTreeMap<String, CheckReport>) -> Vec<String> {
    checks
        .iter()
        .flat_map(|(name, r)| r.failing().into_iter().map(move |c| format!("{name}/{c}")))
        .collect()
}

/// Applies `k` seeded single-entry mutations and reruns the checks on each.
pub fn run_mutations(kind: CheckKind, f: &StructureFile, seed: u64, k: usize, cutoff: usize) -> Vec<MutationOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let muts: Vec<(FileMutation, StructureFile)> = (0..k).map(|_| mutate_file(f, &mut rng)).collect();
    muts.into_par_iter()
        .map(|(mu, g)| {
            let failing = match g.load() {
                Ok(l) => failing_ids(&run_checks(kind, &l, cutoff)),
                Err(e) => vec![format!("input: {e}")],
            };
            MutationOutcome {
                pointer: mu.pointer,
                delta: mu.delta,
                detected: !failing.is_empty(),
                failing,
            }
        })
        .collect()
}

/// Checks a report document against the report schema; returns the violations.
pub fn validate_report(text: &str) -> Vec<String> {
    let report: Report = match serde_json::from_str(text) {
        Ok(r) => r,
        Err(e) => return vec![format!("does not match report schema: {e}")],
    };
    let mut bad = Vec::new();
    if report.tool != TOOL {
        bad.push(format!("/tool: expected {TOOL}"));
    }
    let all_pass = report.checks.values().all(CheckReport::passed);
    if report.passed != all_pass {
        bad.push("/passed: disagrees with checks".into());
    }
    for (name, r) in &report.checks {
        for (i, c) in r.clauses.iter().enumerate() {
            let ptr = format!("/checks/{name}/clauses/{i}");
            if c.passed != (c.failures == 0) {
                bad.push(format!("{ptr}/passed: disagrees with failures"));
            }
            if c.witnesses.len() > c.failures || (!c.passed && c.witnesses.is_empty()) {
                bad.push(format!("{ptr}/witnesses: inconsistent with failures"));
            }
        }
    }
    bad
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} ({}): {}", r.command, r.file, r.name, if r.passed { "PASS" } else { "FAIL" });
    for (name, c) in &r.checks {
        let _ = writeln!(out, "  {name}: {}", if c.passed() { "pass" } else { "FAIL" });
        for cl in c.clauses.iter().filter(|c| !c.passed) {
            let _ = writeln!(out, "    {} ({} failures)", cl.id, cl.failures);
            for w in &cl.witnesses {
                let _ = writeln!(out, "      {w}");
            }
        }
    }
    if let Some(d) = &r.data {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(d).expect("data serializes"));
    }
    if !r.mutations.is_empty() {
        let caught = r.mutations.iter().filter(|m| m.detected).count();
        let _ = writeln!(out, "  mutations: {caught}/{} detected", r.mutations.len());
        for m in r.mutations.iter().filter(|m| !m.detected) {
            let _ = writeln!(out, "    undetected: {} += {}", m.pointer, m.delta);
        }
    }
    out
}

/// Writes a line to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let start = Instant::now();
    let (command, path, name, seed, checks, data, mutations) = match &cli.command {
        Command::Export { name, out, .. } => {
            let json = fixture(name)?.to_json();
            match out {
                Some(p) => std::fs::write(p, json + "\n").map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
                None => emit(&json),
            }
            return Ok(0);
        }
        Command::Check { what, file } => {
            let (f, l) = load_file(file)?;
            let seed = cli.seed.or(l.options.seed).unwrap_or(DEFAULT_SEED);
            let cutoff = cli.weil_cutoff.or(l.options.weil_cutoff).unwrap_or(DEFAULT_WEIL_CUTOFF);
            if *what == CheckKind::Poisson && l.poisson.is_none() {
                return Err(CliError::Input(format!("{}: no poisson section", file.display())));
            }
            let checks = run_checks(*what, &l, cutoff);
            let k = cli.mutations.or(l.options.mutations).unwrap_or(0);
            let muts = run_mutations(*what, &f, seed, k, cutoff);
            let cmd = format!("check {}", what.to_possible_value().expect("named").get_name());
            (cmd, file, l.name.clone(), seed, checks, None, muts)
        }
        Command::Build { file, .. } => {
            let (_, l) = load_file(file)?;
            let ad = build_adjoint_rep(&l.data, &l.tm).map_err(|e| CliError::Input(e.to_string()))?;
            let co = build_coadjoint_rep(&ad);
            let mut checks = BTreeMap::new();
            checks.insert("rep3.adjoint".to_string(), check_adjoint(&l, 0));
            let data = serde_json::json!({
                "adjoint": component_entries(&ad.components),
                "coadjoint": component_entries(&co.components),
            });
            ("build adjoint".to_string(), file, l.name.clone(), 0, checks, Some(data), vec![])
        }
        Command::Cohomology { file, max_degree } => {
            let (_, l) = load_file(file)?;
            let q = compile_homological_vf(&l.data);
            let dims = cohomology_dims(&trivial_line(&q), 0, *max_degree).map_err(|e| CliError::Input(e.to_string()))?;
            let data = serde_json::json!({ "degrees": (0..=*max_degree).collect::<Vec<_>>(), "dims": dims });
            ("cohomology".to_string(), file, l.name.clone(), 0, BTreeMap::new(), Some(data), vec![])
        }
    };
    let passed = checks.values().all(CheckReport::passed);
    let report = Report {
        tool: TOOL.to_string(),
        command,
        file: path.display().to_string(),
        name,
        seed,
        passed,
        checks,
        data,
        mutations,
        timing_ms: if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 },
    };
    if cli.json {
        emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        emit(render_text(&report).trim_end());
    }
    Ok(if passed { 0 } else { 1 })
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            if cli.json {
                let e = ErrorReport {
                    tool: TOOL.to_string(),
                    error: msg.clone(),
                };
                emit(&serde_json::to_string_pretty(&e).expect("error serializes"));
            }
            eprintln!("error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::FIXTURE_NAMES;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn fixtures_pass_all_checks() {
        for name in FIXTURE_NAMES {
            let l = fixture(name).unwrap().load().unwrap();
            let checks = run_checks(CheckKind::All, &l, 2);
            assert!(failing_ids(&checks).is_empty(), "{name}: {:?}", failing_ids(&checks));
        }
    }

    #[test]
    fn mutations_are_detected_and_deterministic() {
        let f = fixture("FX-STRING-SO3").unwrap();
        let a = run_mutations(CheckKind::All, &f, 7, 6, 1);
        assert_eq!(a, run_mutations(CheckKind::All, &f, 7, 6, 1));
        assert!(a.iter().all(|m| m.detected && !m.failing.is_empty()), "{a:?}");
    }

    #[test]
    fn report_validation_flags_inconsistency() {
        let l = fixture("FX-ABELIAN").unwrap().load().unwrap();
        let mut r = Report {
            tool: TOOL.into(),
            command: "check lie2".into(),
            file: "x".into(),
            name: l.name.clone(),
            seed: 0,
            passed: true,
            checks: run_checks(CheckKind::Lie2, &l, 0),
            data: None,
            mutations: vec![],
            timing_ms: 0,
        };
        assert!(validate_report(&serde_json::to_string(&r).unwrap()).is_empty());
        r.passed = false;
        assert_eq!(validate_report(&serde_json::to_string(&r).unwrap()).len(), 1);
        assert!(!validate_report("{\"tool\": \"lie2\"}").is_empty());
    }
}

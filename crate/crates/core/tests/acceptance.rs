//! Acceptance suite: eight criteria, one result line each. Runs without the
//! libtest harness so the lines are always printed.
//!
//! All comparisons are exact rational equality; the only numeric limits are
//! the wall-clock budgets below.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use lie2core::adjoint::{
    adjoint_cross_check, adjoint_operator_via_lie_derivative, change_of_connection_check, change_of_splitting, TmConnections,
};
use lie2core::algebroid::FormValued;
use lie2core::cli::{validate_report, Report};
use lie2core::dgmod::{cohomology_dims, morphism_check, trivial_line};
use lie2core::io::{fixture, fixture_file_stem, mutate_file, FIXTURE_NAMES};
use lie2core::lie2::fixtures::{self, LIE2_FIXTURES};
use lie2core::lie2::{
    aff1_constants, build_derivation_lie2, compile_homological_vf, killing_form, lie2_algebra_axioms_check, lie2_axioms_check,
    q_square_check, so3_constants, LieConstants, SplitLie2Data,
};
use lie2core::linalg;
use lie2core::poisson::{compatibility_check, sharp_antimorphism_check, sharp_matrix, symplectic_check};
use lie2core::report::CheckReport;
use lie2core::scalars::{rat, Poly};
use lie2core::weil::{brute_force_weil_dims, build_weil, split_weil_dims, weil_double_complex_check, weil_row_vs_coadjoint_check};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;
const MUTATIONS_PER_FIXTURE: usize = 25;
const CLI_MUTATIONS_PER_FIXTURE: usize = 12;
const RANDOM_SPLITTINGS: usize = 5;
const WEIL_DIM_CUTOFF: usize = 6;
const BUDGET_AXIOMS_VS_Q2: Duration = Duration::from_secs(10);
const BUDGET_ADJOINT: Duration = Duration::from_secs(30);

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(problems: Vec<String>, summary: String) -> Outcome {
    if problems.is_empty() {
        Outcome { ok: true, detail: summary }
    } else {
        Outcome {
            ok: false,
            detail: format!("{summary}; {}", problems.join("; ")),
        }
    }
}

fn failing(name: &str, r: &CheckReport) -> Option<String> {
    (!r.passed()).then(|| format!("{name}: {:?}", r.failing()))
}

fn tm_for(name: &str, d: &SplitLie2Data) -> TmConnections {
    let mut tm = TmConnections::trivial(d);
    if name == "FX-TANGENT-R2" {
        tm.on_q = fixtures::tangent_r2_connection();
    }
    tm
}

fn axioms_agree_with_q_square() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut problems = Vec::new();
    let (mut total, mut invalid) = (0, 0);
    for name in LIE2_FIXTURES {
        let d = fixtures::by_name(name).expect("fixture");
        if !lie2_axioms_check(&d).passed() || !q_square_check(&d).passed() {
            problems.push(format!("{name} itself fails"));
        }
        for _ in 0..MUTATIONS_PER_FIXTURE {
            let (e, delta, m) = d.random_mutation(&mut rng).expect("fixtures have entries");
            let (ax, q2) = (lie2_axioms_check(&m).passed(), q_square_check(&m).passed());
            total += 1;
            invalid += usize::from(!ax);
            if ax != q2 {
                problems.push(format!("{name} {e} += {delta}: axioms {ax}, Q² {q2}"));
            }
        }
    }
    let t = start.elapsed();
    if t > BUDGET_AXIOMS_VS_Q2 {
        problems.push(format!("took {t:?}, budget {BUDGET_AXIOMS_VS_Q2:?}"));
    }
    outcome(problems, format!("{total} mutants agree ({invalid} invalid), {t:.2?}"))
}

fn derivation_lie2_algebras() -> Outcome {
    let mut abelian = LieConstants::new();
    abelian.insert((0, 1), vec![rat(0), rat(0)]);
    let cases: [(&str, LieConstants, usize, usize); 3] =
        [("abelian ℚ²", abelian, 2, 4), ("aff(1)", aff1_constants(), 2, 2), ("so(3)", so3_constants(), 3, 3)];
    let mut problems = Vec::new();
    let mut dims = Vec::new();
    for (label, c, n, want) in cases {
        match build_derivation_lie2(&c, n) {
            Err(e) => problems.push(format!("{label}: {e}")),
            Ok(g) => {
                dims.push(format!("{label} {}", g.dim1));
                if g.dim1 != want {
                    problems.push(format!("{label}: dim Der {} ≠ {want}", g.dim1));
                }
                problems.extend(failing(label, &lie2_algebra_axioms_check(&g)));
            }
        }
    }
    outcome(problems, format!("dim Der: {}", dims.join(", ")))
}

fn adjoint_cross_validation() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for name in LIE2_FIXTURES {
        let d = fixtures::by_name(name).expect("fixture");
        match adjoint_cross_check(&d, &tm_for(name, &d)) {
            Ok(r) => problems.extend(failing(name, &r)),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    let t = start.elapsed();
    if t > BUDGET_ADJOINT {
        problems.push(format!("took {t:?}, budget {BUDGET_ADJOINT:?}"));
    }
    outcome(problems, format!("closed form = transport, 𝒟² = 0, seven equations on 4 fixtures, {t:.2?}"))
}

fn random_sigma(rng: &mut ChaCha8Rng) -> FormValued {
    loop {
        let vals: Vec<i64> = (0..3).map(|_| rng.gen_range(-4..=4)).collect();
        let s = FormValued::from_fn(0, 2, 3, 1, |idx| vec![Poly::int(0, vals[idx[0] + idx[1] - 1])]);
        if (0..3).any(|a| (a + 1..3).any(|b| !s.eval(&[a, b])[0].is_zero())) {
            return s;
        }
    }
}

fn transformation_laws() -> Outcome {
    let mut problems = Vec::new();
    let d = fixtures::tangent_r2();
    let (flat, curved) = (TmConnections::trivial(&d), tm_for("FX-TANGENT-R2", &d));
    match change_of_connection_check(&d, &flat, &curved) {
        Ok(r) => problems.extend(failing("change_of_connection", &r)),
        Err(e) => problems.push(e.to_string()),
    }
    let d = fixtures::string_so3();
    let tm = TmConnections::trivial(&d);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for k in 0..RANDOM_SPLITTINGS {
        let sigma = random_sigma(&mut rng);
        match change_of_splitting(&d, &sigma, &tm) {
            Err(e) => problems.push(format!("σ#{k}: {e}")),
            Ok(ch) => {
                problems.extend(failing(&format!("σ#{k} identities"), &ch.report));
                problems.extend(failing(&format!("σ#{k} axioms"), &lie2_axioms_check(&ch.data)));
                let src = adjoint_operator_via_lie_derivative(&d, &tm);
                let dst = adjoint_operator_via_lie_derivative(&ch.data, &TmConnections::trivial(&ch.data));
                problems.extend(failing(&format!("σ#{k} μ^σ"), &morphism_check(&ch.morphism, &src, &dst)));
            }
        }
    }
    outcome(problems, format!("connection change on FX-TANGENT-R2, {RANDOM_SPLITTINGS} splittings on FX-STRING-SO3"))
}

fn weil_double_complex() -> Outcome {
    let mut problems = Vec::new();
    let mut compared = 0;
    for name in LIE2_FIXTURES {
        let d = fixtures::by_name(name).expect("fixture");
        problems.extend(failing(&format!("{name} complex"), &weil_double_complex_check(&build_weil(&d))));
        problems.extend(failing(&format!("{name} row"), &weil_row_vs_coadjoint_check(&d, &tm_for(name, &d))));
        if d.nvars() == 0 {
            for p in 0..=WEIL_DIM_CUTOFF {
                for q in 0..=WEIL_DIM_CUTOFF {
                    let (a, b) = (split_weil_dims(0, d.rq(), d.rb, p, q), brute_force_weil_dims(0, d.rq(), d.rb, p, q));
                    compared += 1;
                    if a != b {
                        problems.push(format!("{name} W^({p},{q}): {a} vs {b}"));
                    }
                }
            }
        }
    }
    outcome(problems, format!("𝐝², ℒ_Q², [ℒ_Q,𝐝] vanish; {compared} bidegrees match; q = 1 row = coadjoint"))
}

fn poisson_sharp() -> Outcome {
    let mut problems = Vec::new();
    let (d, p) = lie2core::poisson::fixtures::so3_pair();
    let q = compile_homological_vf(&d);
    problems.extend(failing("compatibility", &compatibility_check(&p, &q)));
    problems.extend(failing("antimorphism", &sharp_antimorphism_check(&p, &q)));
    problems.extend(failing("symplectic", &symplectic_check(&p)));
    let killing_inv = linalg::inverse(&killing_form(&so3_constants(), 3)).expect("nondegenerate");
    match sharp_matrix(&p) {
        Ok(m) if m == killing_inv => {}
        Ok(_) => problems.push("♯ on degree 1 ≠ Killing⁻¹".into()),
        Err(e) => problems.push(e),
    }
    let (d, p) = lie2core::poisson::fixtures::so3_pair_noninvariant();
    let q = compile_homological_vf(&d);
    let c = compatibility_check(&p, &q);
    let a = sharp_antimorphism_check(&p, &q);
    let cw = c.get("q_derivation").map(|c| c.witnesses.clone()).unwrap_or_default();
    let aw = a.get("antimorphism").map(|c| c.witnesses.clone()).unwrap_or_default();
    if c.passed() || a.passed() {
        problems.push("non-invariant pairing not rejected by both checks".into());
    }
    if cw.is_empty() || cw != aw {
        problems.push(format!("witnesses differ: {cw:?} vs {aw:?}"));
    }
    outcome(problems, format!("FX-SO3-PAIR passes; mutant fails both with {} shared witnesses", cw.len()))
}

fn trivial_line_cohomology() -> Outcome {
    let mut problems = Vec::new();
    let mut abelian = LieConstants::new();
    abelian.insert((0, 1), vec![rat(0), rat(0)]);
    let cases = [
        ("abelian ℚ²", fixtures::lie_algebra(&abelian, 2), 2, vec![1, 2, 1]),
        ("so(3)", fixtures::so3_point(), 3, vec![1, 0, 0, 1]),
        // The free degree-2 generator b adds one class in degree 2.
        ("FX-ABELIAN", fixtures::abelian(), 2, vec![1, 2, 2]),
    ];
    let mut seen = Vec::new();
    for (label, d, hi, want) in cases {
        match cohomology_dims(&trivial_line(&compile_homological_vf(&d)), 0, hi) {
            Ok(dims) => {
                seen.push(format!("{label} {dims:?}"));
                if dims != want {
                    problems.push(format!("{label}: {dims:?} ≠ {want:?}"));
                }
            }
            Err(e) => problems.push(format!("{label}: {e}")),
        }
    }
    outcome(problems, seen.join(", "))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn report_schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).expect("report schema")).expect("schema JSON");
    jsonschema::validator_for(&schema).expect("valid schema")
}

fn run_check_all(file: &Path) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lie2"))
        .args(["check", "all", "--json", "--no-timing"])
        .arg(file)
        .output()
        .expect("binary runs");
    (out.status.code(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli_contract() -> Outcome {
    let schema = report_schema();
    let mut problems = Vec::new();
    let tmp = std::env::temp_dir().join(format!("lie2-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).expect("temp dir");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut killed, mut by_declared_only, mut total) = (0, 0, 0);
    for name in FIXTURE_NAMES {
        let path = fixtures_dir().join(format!("{}.json", fixture_file_stem(name)));
        let (code, out) = run_check_all(&path);
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap_or(serde_json::Value::Null);
        if code != Some(0) {
            problems.push(format!("{name}: exit {code:?}"));
        }
        if !schema.is_valid(&doc) || !validate_report(&out).is_empty() {
            problems.push(format!("{name}: report not schema-valid"));
        }
        let base = fixture(name).expect("fixture");
        for k in 0..CLI_MUTATIONS_PER_FIXTURE {
            let (mu, g) = mutate_file(&base, &mut rng);
            let file = tmp.join(format!("{}_{k}.json", fixture_file_stem(name)));
            std::fs::write(&file, g.to_json()).expect("write mutant");
            let (code, out) = run_check_all(&file);
            total += 1;
            let report: Option<Report> = serde_json::from_str(&out).ok();
            let witnesses: Vec<(String, String)> = report
                .iter()
                .flat_map(|r| r.checks.iter())
                .flat_map(|(n, c)| c.clauses.iter().filter(|c| !c.passed).map(move |c| (n.clone(), c.witnesses.join(" | "))))
                .collect();
            if code != Some(1) || witnesses.is_empty() || witnesses.iter().any(|(_, w)| w.is_empty()) {
                problems.push(format!("{name} {} += {}: exit {code:?}, witnesses {witnesses:?}", mu.pointer, mu.delta));
                continue;
            }
            if !schema.is_valid(&serde_json::from_str::<serde_json::Value>(&out).expect("json")) {
                problems.push(format!("{name} mutant report not schema-valid"));
            }
            killed += 1;
            if witnesses.iter().all(|(n, _)| n == "lie2.declared_q") {
                by_declared_only += 1;
            }
        }
    }
    let _ = std::fs::remove_dir_all(&tmp);
    outcome(
        problems,
        format!("5 fixtures exit 0; {killed}/{total} mutants exit 1 ({by_declared_only} caught only by the declared-Q comparison)"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("axioms ⇔ Q² on fixtures and mutants", axioms_agree_with_q_square),
        ("derivation Lie 2-algebras", derivation_lie2_algebras),
        ("adjoint cross-validation", adjoint_cross_validation),
        ("transformation laws", transformation_laws),
        ("Weil double complex", weil_double_complex),
        ("Poisson and sharp on so(3)", poisson_sharp),
        ("trivial line cohomology", trivial_line_cohomology),
        ("CLI contract", cli_contract),
    ];
    let mut failed = Vec::new();
    for (i, (label, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {}: {} [{label}] {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
        if !o.ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

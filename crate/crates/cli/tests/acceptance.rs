//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lo_core::instances::{generate_instance, InstanceSpec};
use lo_core::inverse::{run_inverse, InverseConfig, InverseResult};
use lo_core::numeric::rat;
use lo_core::oracle::{
    classical_trend, comparison_trend, equivalence_suite, erdos_exhaustive, forward_suite, fourier_suite,
    intersection_suite, lemma31_suite, newhalasz_dichotomy, DichotomyOptions,
};
use lo_core::walks::concentration_with;
use lo_core::{Density, Gap, Limits, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

const SEED: u64 = 1;
const GUARD: usize = 1 << 20;

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let r = equivalence_suite(200, SEED, &Limits::default()).map_err(|e| e.to_string())?;
    ensure(
        r.passed(),
        format!("{} words, longest {}, {} mismatches", r.cases, r.max_len, r.mismatches.len()),
    )
}

fn fourier_cross_check() -> Outcome {
    let r = fourier_suite(50, SEED, 1 << 16, 1e-9, &Limits::default()).map_err(|e| e.to_string())?;
    ensure(r.passed, format!("{} instances, max error {:.3e}", r.cases, r.max_error))
}

fn erdos_identity() -> Outcome {
    let limits = Limits::default();
    let r = erdos_exhaustive(6, &[1, 2, 3], &limits).map_err(|e| e.to_string())?;
    let ten = concentration_with(&Word::from_i64s(&[1; 10]), Density::ONE, &limits)
        .map_err(|e| e.to_string())?
        .value;
    let ok = r.passed() && r.bound == rat(20, 64) && r.max_p == r.bound && ten == rat(252, 1024);
    ensure(
        ok,
        format!(
            "{} words, max {} against {}, {} extremal, all-equal n=10 gives {}",
            r.words, r.max_p, r.bound, r.extremal, ten
        ),
    )
}

fn lemma_suite() -> Outcome {
    let r = lemma31_suite(500, SEED, &Limits::default()).map_err(|e| e.to_string())?;
    let tallies: Vec<String> = r.parts.iter().map(|t| format!("{} {}/{}", t.part, t.passed, t.passed + t.failed)).collect();
    ensure(r.passed(), format!("{} cases: {}", r.cases, tallies.join(", ")))
}

fn forward_theorem() -> Outcome {
    let r = forward_suite(100, SEED, &Limits::default()).map_err(|e| e.to_string())?;
    let spread = r
        .ratio_percentiles
        .as_ref()
        .map(|p| format!(", P * 2|Q| ranges {:.3} .. {:.3}", approx(&p.min), approx(&p.max)))
        .unwrap_or_default();
    ensure(r.passed(), format!("{} pairs, {} failures{spread}", r.pairs, r.failures.len()))
}

fn approx(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn intersection_lemma() -> Outcome {
    let r = intersection_suite(200, SEED, Limits::default().enumeration_guard).map_err(|e| e.to_string())?;
    let spread = r
        .ratio_percentiles
        .as_ref()
        .map(|p| {
            format!(
                ", ratio min {:.3} p25 {:.3} median {:.3} p75 {:.3} max {:.3}",
                approx(&p.min),
                approx(&p.p25),
                approx(&p.median),
                approx(&p.p75),
                approx(&p.max)
            )
        })
        .unwrap_or_default();
    ensure(r.passed(), format!("{} pairs, {} failures{spread}", r.pairs, r.failures.len()))
}

fn inverse_invariants(name: &str, r: &InverseResult, cfg: &InverseConfig) -> Result<(), String> {
    let fail = |what: String| Err(format!("{name}: {what}"));
    if r.steps > r.step_cap {
        return fail(format!("{} steps over the cap {}", r.steps, r.step_cap));
    }
    for s in &r.trace {
        if s.potential > rat(1, 1) {
            return fail(format!("F_{} = {}", s.index, s.potential));
        }
        if s.rank >= cfg.d {
            return fail(format!("rank {} at step {}", s.rank, s.index));
        }
    }
    for w in r.trace.windows(2) {
        if BigRational::from_integer(BigInt::from(w[1].cardinality)) < &cfg.big_k * BigInt::from(w[0].cardinality) {
            return fail(format!("growth {} -> {}", w[0].cardinality, w[1].cardinality));
        }
    }
    if r.trace.iter().filter(|s| s.proper_step).count() >= cfg.d {
        return fail("too many proper steps".into());
    }
    for name in ["rank", "volume", "containment", "exceptional_count"] {
        match r.verification.iter().find(|c| c.name == name) {
            Some(c) if c.passed => {}
            Some(c) => return fail(format!("{name}: {}", c.detail)),
            None => return fail(format!("no {name} check")),
        }
    }
    if !r.passed() {
        return fail("a run check failed".into());
    }
    Ok(())
}

fn inverse_runs() -> Outcome {
    let runs = [
        (
            "all_equal(100,5)",
            InstanceSpec::AllEqual { n: 100, value: 5.into() },
            2,
            5,
            Density::HALF,
            rat(2, 1),
            rat(1, 1),
        ),
        ("ap(100)", InstanceSpec::Ap { n: 100 }, 2, 9, Density::ONE, rat(8, 1), rat(1, 16)),
        (
            "gap_sample(200)",
            InstanceSpec::GapSample {
                gap: Gap::from_ints(&[3, 3], &[1, 100]).map_err(|e| e.to_string())?,
                n: 200,
                seed: 1,
            },
            3,
            5,
            Density::HALF,
            rat(8, 1),
            rat(1, 100),
        ),
    ];
    let mut notes = Vec::new();
    for (name, spec, d, k, mu, big_k, c0) in runs {
        let v = generate_instance(&spec, GUARD).map_err(|e| e.to_string())?;
        let cfg = InverseConfig {
            big_k,
            c0,
            ..InverseConfig::new(d, k, mu)
        };
        let r = run_inverse(&v, &cfg).map_err(|e| format!("{name}: {e}"))?;
        inverse_invariants(name, &r, &cfg)?;
        notes.push(format!("{name} {} steps, final {}, {} exceptional", r.steps, r.final_gap, r.exceptional.len()));
    }
    Ok(notes.join("; "))
}

fn sweeps() -> Outcome {
    let opts = DichotomyOptions::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [20, 40] {
        for (spec, want) in [(InstanceSpec::Ap { n }, 2), (InstanceSpec::Dissociated { n }, 1)] {
            let v = generate_instance(&spec, GUARD).map_err(|e| e.to_string())?;
            let r = newhalasz_dichotomy(&v, Density::ONE, &opts).map_err(|e| e.to_string())?;
            ok &= r.verdict == want;
            notes.push(format!("{spec} branch {}", r.verdict));
        }
    }
    let ns: Vec<usize> = (10..=50).collect();
    let limits = Limits::default();
    let classical = classical_trend(&ns, 2, &limits).map_err(|e| e.to_string())?;
    let comparison = comparison_trend(&ns, 2, &limits).map_err(|e| e.to_string())?;
    ok &= classical.trend.passed && comparison.trend.passed;
    notes.push(format!(
        "P n^(3/2) relative range {:.3} .. {:.3}",
        classical.trend.min_relative_approx.sqrt(),
        classical.trend.max_relative_approx.sqrt()
    ));
    notes.push(format!(
        "comparison relative range {:.3} .. {:.3}",
        comparison.trend.min_relative_approx, comparison.trend.max_relative_approx
    ));
    ensure(ok, notes.join(", "))
}

fn run_lo(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lo"))
        .args(args)
        .env_remove("LO_GUARD")
        .output()
        .map_err(|e| e.to_string())?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("lo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let trace = dir.join("trace.jsonl");
    let trace_arg = trace.to_str().ok_or("temp path is not UTF-8")?.to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["prob", "--instance", "random-bounded", "--n", "40", "--seed", "5", "--mu", "1/3"],
        vec![
            "--trace", &trace_arg, "inverse", "--instance", "ap", "--n", "100", "--k", "9", "--d", "2", "--K", "8",
            "--C0", "1/16",
        ],
        vec!["verify", "lemma3.1", "--cases", "100", "--seed", "3"],
        vec!["verify", "sandwich", "--pairs", "50", "--seed", "3"],
        vec!["verify", "forward", "--instance", "ap", "--n", "10", "--pairs", "20", "--seed", "3"],
        vec!["verify", "equivalence", "--cases", "50", "--seed", "3"],
        vec!["sweep", "--family", "random-bounded", "--n-from", "5", "--n-to", "30", "--check", "dichotomy", "--seed", "3"],
    ];
    let mut same = true;
    let mut checked = 0;
    for args in &commands {
        let first = run_lo(args)?;
        let first_trace = std::fs::read(&trace).unwrap_or_default();
        let _ = std::fs::remove_file(&trace);
        let second = run_lo(args)?;
        let second_trace = std::fs::read(&trace).unwrap_or_default();
        let _ = std::fs::remove_file(&trace);
        if first.is_empty() || first != second || first_trace != second_trace {
            same = false;
            eprintln!("  differs: lo {}", args.join(" "));
        }
        checked += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(same, format!("{checked} commands run twice, reports and traces compared byte for byte"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("fourier cross-check", Duration::from_secs(30), fourier_cross_check),
        ("erdos extremal identity", Duration::from_secs(10), erdos_identity),
        ("lemma 3.1 suite", Duration::from_secs(120), lemma_suite),
        ("forward theorem", Duration::from_secs(120), forward_theorem),
        ("intersection inequalities", Duration::from_secs(60), intersection_lemma),
        ("end-to-end inverse runs", Duration::from_secs(600), inverse_runs),
        ("dichotomy and classical sweeps", Duration::from_secs(300), sweeps),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use clap::{Args, Subcommand, ValueEnum};
use lo_core::gap::{embed_proper, EmbedOptions, ElementSet};
use lo_core::instances::{generate_instance, InstanceSpec};
use lo_core::inverse::{run_inverse, strong_inverse};
use lo_core::numeric::{rat, small_ratio, Density};
use lo_core::oracle::{
    classical_bounds_check, comparison_trend, equivalence_suite, erdos_exhaustive, erdos_inverse_record,
    forward_lo_witness, forward_suite, fourier_suite, halasz_r, intersection_suite, lemma31_suite,
    newhalasz_dichotomy, sandwich_and_comparison_ratios, trend_within, ComparisonCase,
    DichotomyOptions, RatioRecord,
};
use lo_core::walks::{concentration_with, generalized_concentration_with, walk_distribution_with};
use lo_core::{Limits, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{inverse_config, rational, ConfigFile, InverseFlags};
use crate::instance::{parse_gap, Family, InstanceArgs, InstanceFile, StepValue};
use crate::{Cli, CliError, Command, Output};

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub steps: Vec<i64>,
}

#[derive(Debug, Subcommand)]
pub enum GapCommand {
    /// Whether the GAP is t-proper; exits 1 when it is not.
    Check {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long, default_value = "1")]
        t: String,
    },
    /// Proper (t-proper) GAP containing the input.
    Embed {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long, default_value_t = 1)]
        t: u64,
        /// Largest accepted size ratio |Q'| / |Q|.
        #[arg(long, default_value = "32")]
        budget: String,
        #[arg(long = "max-rank", default_value_t = 3)]
        max_rank: usize,
    },
    /// Volume, cardinality and properness.
    Metrics {
        #[command(flatten)]
        gap: GapArgs,
        #[arg(long, default_value = "1")]
        t: String,
        /// Include the enumerated elements.
        #[arg(long)]
        elements: bool,
    },
}

impl GapCommand {
    pub fn name(&self) -> &'static str {
        match self {
            GapCommand::Check { .. } => "check",
            GapCommand::Embed { .. } => "embed",
            GapCommand::Metrics { .. } => "metrics",
        }
    }
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_name = "RATIONAL")]
    pub eps: Option<String>,
    #[command(flatten)]
    pub flags: InverseFlags,
}

#[derive(Debug, Args)]
pub struct StrongArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Exponent A of the hypothesis P_mu(v) >= n^-A.
    #[arg(long = "A", value_name = "RATIONAL")]
    pub a: String,
    #[arg(long, value_name = "RATIONAL")]
    pub eps: String,
    #[command(flatten)]
    pub flags: InverseFlags,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Random cases of the word-calculus lemma, every part as an exact inequality.
    #[command(name = "lemma3.1")]
    Lemma {
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Intersection-lemma inequalities for one GAP pair or for random pairs.
    Sandwich {
        #[arg(long = "p-dims", value_delimiter = ',')]
        p_dims: Vec<String>,
        #[arg(long = "p-steps", value_delimiter = ',', allow_hyphen_values = true)]
        p_steps: Vec<i64>,
        #[arg(long = "q-dims", value_delimiter = ',')]
        q_dims: Vec<String>,
        #[arg(long = "q-steps", value_delimiter = ',', allow_hyphen_values = true)]
        q_steps: Vec<i64>,
        /// Random pairs instead of an explicit one.
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        comparison: ComparisonArgs,
    },
    /// Forward theorem with its explicit constant.
    Forward {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Random (Q, v) pairs instead of the given instance.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Signed 2l-fold solution count R_l.
    Halasz {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
    },
    /// Erdos bound and distinct-entry ratio, or exhaustive check over an alphabet.
    Classical {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also record nonzero-count / k when P_1 >= k^-1/2.
        #[arg(long)]
        k: Option<u64>,
        /// Exhaustive check of every word of this length over --alphabet.
        #[arg(long)]
        exhaustive: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2,3")]
        alphabet: Vec<i64>,
    },
    /// Random-walk comparison ratio for one case, or its trend over ap(n).
    Comparison {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        comparison: ComparisonArgs,
        #[arg(long = "n-from")]
        n_from: Option<usize>,
        #[arg(long = "n-to")]
        n_to: Option<usize>,
        #[arg(long, default_value_t = 2)]
        factor: i64,
    },
    /// Both branches of the small-probability / short-progression dichotomy.
    Dichotomy {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value = "1/10")]
        delta: String,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long = "prefix-cap", default_value_t = 1 << 16)]
        prefix_cap: usize,
    },
    /// Convolution engine against exhaustive enumeration.
    Equivalence {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Quadrature of the Fourier identity against exact masses.
    Fourier {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 16)]
        nodes: u64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

impl VerifyCommand {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyCommand::Lemma { .. } => "lemma3.1",
            VerifyCommand::Sandwich { .. } => "sandwich",
            VerifyCommand::Forward { .. } => "forward",
            VerifyCommand::Halasz { .. } => "halasz",
            VerifyCommand::Classical { .. } => "classical",
            VerifyCommand::Comparison { .. } => "comparison",
            VerifyCommand::Dichotomy { .. } => "dichotomy",
            VerifyCommand::Equivalence { .. } => "equivalence",
            VerifyCommand::Fourier { .. } => "fourier",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct ComparisonArgs {
    /// Repeated step v0 of the comparison.
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<i64>,
    #[arg(long = "ck", default_value_t = 3)]
    pub k: u64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub qset: Vec<i64>,
    /// Word v of a comparison attached to a sandwich check.
    #[arg(long = "cv", value_delimiter = ',', allow_hyphen_values = true)]
    pub cv: Vec<i64>,
    #[arg(long = "cmu", default_value = "1/2")]
    pub cmu: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepCheck {
    Prob,
    Classical,
    Comparison,
    Dichotomy,
    ErdosInverse,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long = "n-from")]
    pub n_from: usize,
    #[arg(long = "n-to")]
    pub n_to: usize,
    #[arg(long = "n-step", default_value_t = 1)]
    pub n_step: usize,
    #[arg(long, value_enum)]
    pub check: SweepCheck,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub value: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub bound: u64,
    /// Trend factor for the classical and comparison checks.
    #[arg(long, default_value_t = 2)]
    pub factor: i64,
    /// k of the erdos-inverse check and of the comparison check.
    #[arg(long, default_value_t = 3)]
    pub k: u64,
}

fn density(text: &str) -> Result<Density, CliError> {
    text.parse::<Density>()
        .map_err(|e| CliError::Usage(format!("mu: {e}")))
}

fn exponent(text: &str, what: &str) -> Result<num_rational::Ratio<i64>, CliError> {
    Ok(small_ratio(&rational(text, what)?)?)
}

#[derive(Serialize)]
struct ProbReport<'a> {
    instance: &'a str,
    n: usize,
    mu: Density,
    #[serde(skip_serializing_if = "Option::is_none")]
    qset: Option<&'a ElementSet>,
    #[serde(flatten)]
    result: lo_core::ConcentrationResult,
}

#[derive(Serialize)]
struct DistReport<'a> {
    instance: &'a str,
    n: usize,
    mu: Density,
    distribution: lo_core::WalkDistribution,
}

#[derive(Serialize)]
struct GapReport<'a, T: Serialize> {
    gap: &'a lo_core::Gap,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct HalaszReport<'a> {
    instance: &'a str,
    n: usize,
    l: usize,
    mu: Density,
    r_l: String,
    /// `P^2 n^{4l+1}` against `R_l^2`: the square of the ratio `P n^{2l+1/2} / R_l`.
    ratio_squared: RatioRecord,
}

#[derive(Serialize)]
struct Described<'a, T: Serialize> {
    instance: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct SweepEntry {
    n: usize,
    instance: String,
    report: Value,
}

#[derive(Serialize)]
struct SweepReport {
    family: String,
    check: String,
    entries: Vec<SweepEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trend: Option<lo_core::oracle::Trend>,
}

fn to_value(x: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Io(e.to_string()))
}

fn big(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn comparison_case(v: Word, mu: Density, args: &ComparisonArgs) -> Result<ComparisonCase, CliError> {
    let v0 = args
        .v0
        .ok_or_else(|| CliError::Usage("--v0 is required for a comparison case".into()))?;
    Ok(ComparisonCase {
        v,
        v0,
        k: args.k,
        qset: ElementSet::from_vec(args.qset.clone()),
        mu,
    })
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let limits = file.limits(cli.guard);
    let guard = limits.enumeration_guard;
    match &cli.command {
        Command::Prob { instance, qset } => {
            let inst = instance.resolve(guard)?;
            let (result, q) = if qset.is_empty() {
                (concentration_with(&inst.word, inst.mu, &limits)?, None)
            } else {
                let q = ElementSet::from_vec(qset.clone());
                (generalized_concentration_with(&inst.word, inst.mu, &q, &limits)?, Some(q))
            };
            Output::new(
                true,
                ProbReport {
                    instance: &inst.descriptor,
                    n: inst.word.len(),
                    mu: inst.mu,
                    qset: q.as_ref(),
                    result,
                },
            )
        }
        Command::Dist { instance } => {
            let inst = instance.resolve(guard)?;
            Output::new(
                true,
                DistReport {
                    instance: &inst.descriptor,
                    n: inst.word.len(),
                    mu: inst.mu,
                    distribution: walk_distribution_with(&inst.word, inst.mu, &limits)?,
                },
            )
        }
        Command::Gap(cmd) => run_gap(cmd, guard),
        Command::Inverse(args) => {
            let inst = args.instance.resolve(guard)?;
            let cfg = inverse_config(args.d, args.k, inst.mu, args.eps.as_ref(), &args.flags, &file, limits)?;
            let result = run_inverse(&inst.word, &cfg)?;
            let trace = result.trace.iter().map(to_value).collect::<Result<Vec<_>, _>>()?;
            let mut out = Output::new(
                result.passed(),
                Described {
                    instance: &inst.descriptor,
                    body: &result,
                },
            )?;
            out.trace = trace;
            Ok(out)
        }
        Command::StrongInverse(args) => {
            let inst = args.instance.resolve(guard)?;
            let base = inverse_config(1, 2, inst.mu, None, &args.flags, &file, limits)?;
            let a = rational(&args.a, "A")?;
            let eps = rational(&args.eps, "eps")?;
            let result = strong_inverse(&inst.word, &a, &eps, inst.mu, &base)?;
            let trace = result
                .inverse
                .trace
                .iter()
                .map(to_value)
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = Output::new(
                result.passed(),
                Described {
                    instance: &inst.descriptor,
                    body: &result,
                },
            )?;
            out.trace = trace;
            Ok(out)
        }
        Command::Verify(cmd) => run_verify(cmd, &limits),
        Command::Sweep(args) => run_sweep(args, &limits),
        Command::Generate { instance } => {
            let inst = instance.resolve(guard)?;
            Output::new(
                true,
                InstanceFile {
                    steps: inst
                        .word
                        .entries()
                        .iter()
                        .map(|x| StepValue::Text(x.to_string()))
                        .collect(),
                    mu: Some(inst.mu.to_string()),
                },
            )
        }
    }
}

fn run_gap(cmd: &GapCommand, guard: usize) -> Result<Output, CliError> {
    match cmd {
        GapCommand::Check { gap, t } => {
            let q = parse_gap(&gap.dims, &gap.steps)?;
            let metrics = q.metrics(&rational(t, "t")?, guard)?;
            Output::new(metrics.t_proper, GapReport { gap: &q, body: metrics })
        }
        GapCommand::Metrics { gap, t, elements } => {
            let q = parse_gap(&gap.dims, &gap.steps)?;
            let metrics = q.metrics(&rational(t, "t")?, guard)?;
            #[derive(Serialize)]
            struct Body {
                #[serde(flatten)]
                metrics: lo_core::gap::GapMetrics,
                #[serde(skip_serializing_if = "Option::is_none")]
                elements: Option<ElementSet>,
            }
            let elements = elements.then(|| q.enumerate(guard)).transpose()?;
            Output::new(true, GapReport { gap: &q, body: Body { metrics, elements } })
        }
        GapCommand::Embed { gap, t, budget, max_rank } => {
            let q = parse_gap(&gap.dims, &gap.steps)?;
            let opts = EmbedOptions {
                ratio_budget: rational(budget, "budget")?,
                max_rank: *max_rank,
                guard,
            };
            Output::new(true, GapReport { gap: &q, body: embed_proper(&q, *t, &opts)? })
        }
    }
}

fn run_verify(cmd: &VerifyCommand, limits: &Limits) -> Result<Output, CliError> {
    let guard = limits.enumeration_guard;
    match cmd {
        VerifyCommand::Lemma { cases, seed } => {
            let r = lemma31_suite(*cases, *seed, limits)?;
            Output::new(r.passed(), r)
        }
        VerifyCommand::Sandwich {
            p_dims,
            p_steps,
            q_dims,
            q_steps,
            pairs,
            seed,
            comparison,
        } => {
            if let Some(pairs) = pairs {
                let r = intersection_suite(*pairs, *seed, guard)?;
                return Output::new(r.passed(), r);
            }
            let p = parse_gap(p_dims, p_steps)?;
            let q = parse_gap(q_dims, q_steps)?;
            let case = match comparison.v0 {
                Some(_) => Some(comparison_case(
                    Word::from_i64s(&comparison.cv),
                    density(&comparison.cmu)?,
                    comparison,
                )?),
                None => None,
            };
            let r = sandwich_and_comparison_ratios(&p, &q, case.as_ref(), limits)?;
            Output::new(r.intersection.passed(), r)
        }
        VerifyCommand::Forward { instance, pairs } => {
            if let Some(pairs) = pairs {
                let r = forward_suite(*pairs, instance.seed, limits)?;
                return Output::new(r.passed(), r);
            }
            let q = parse_gap(&instance.gap_dims, &instance.gap_steps)?;
            let inst = instance.resolve(guard)?;
            let w = forward_lo_witness(&q, &inst.word, inst.mu, limits)?;
            Output::new(
                w.passed(),
                Described {
                    instance: &inst.descriptor,
                    body: w,
                },
            )
        }
        VerifyCommand::Halasz { instance, l } => {
            let inst = instance.resolve(guard)?;
            let r = halasz_r(&inst.word, *l, guard)?;
            let p = concentration_with(&inst.word, inst.mu, limits)?.value;
            let n = inst.word.len();
            let r_big = BigRational::from_integer(BigInt::from(r.clone()));
            let ratio_squared = RatioRecord::new(
                inst.descriptor.clone(),
                &p * &p * big(n).pow((4 * l + 1) as i32),
                &r_big * &r_big,
            )?;
            Output::new(
                true,
                HalaszReport {
                    instance: &inst.descriptor,
                    n,
                    l: *l,
                    mu: inst.mu,
                    r_l: r.to_string(),
                    ratio_squared,
                },
            )
        }
        VerifyCommand::Classical {
            instance,
            k,
            exhaustive,
            alphabet,
        } => {
            if let Some(n) = exhaustive {
                let r = erdos_exhaustive(*n, alphabet, limits)?;
                return Output::new(r.passed(), r);
            }
            let inst = instance.resolve(guard)?;
            let report = classical_bounds_check(&inst.word, limits)?;
            let inverse = k.map(|k| erdos_inverse_record(&inst.word, k, limits)).transpose()?;
            #[derive(Serialize)]
            struct Body {
                #[serde(flatten)]
                report: lo_core::oracle::ClassicalReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                erdos_inverse: Option<lo_core::oracle::ErdosInverseRecord>,
            }
            Output::new(
                report.passed(),
                Described {
                    instance: &inst.descriptor,
                    body: Body {
                        report,
                        erdos_inverse: inverse,
                    },
                },
            )
        }
        VerifyCommand::Comparison {
            instance,
            comparison,
            n_from,
            n_to,
            factor,
        } => {
            if let (Some(a), Some(b)) = (n_from, n_to) {
                let ns: Vec<usize> = (*a..=*b).collect();
                let r = comparison_trend(&ns, *factor, limits)?;
                return Output::new(r.trend.passed, r);
            }
            let inst = instance.resolve(guard)?;
            let case = comparison_case(inst.word, inst.mu, comparison)?;
            let r = lo_core::oracle::comparison_ratio(&case, limits)?;
            Output::new(true, r)
        }
        VerifyCommand::Dichotomy {
            instance,
            l,
            delta,
            eps,
            c,
            prefix_cap,
        } => {
            let inst = instance.resolve(guard)?;
            let opts = DichotomyOptions {
                l: *l,
                delta: exponent(delta, "delta")?,
                eps: exponent(eps, "eps")?,
                c: rational(c, "c")?,
                prefix_cap: *prefix_cap,
                limits: *limits,
            };
            let r = newhalasz_dichotomy(&inst.word, inst.mu, &opts)?;
            Output::new(
                true,
                Described {
                    instance: &inst.descriptor,
                    body: r,
                },
            )
        }
        VerifyCommand::Equivalence { cases, seed } => {
            let r = equivalence_suite(*cases, *seed, limits)?;
            Output::new(r.passed(), r)
        }
        VerifyCommand::Fourier {
            cases,
            seed,
            nodes,
            tolerance,
        } => {
            let r = fourier_suite(*cases, *seed, *nodes, *tolerance, limits)?;
            Output::new(r.passed, r)
        }
    }
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn sweep_spec(args: &SweepArgs, n: usize) -> Result<InstanceSpec, CliError> {
    Ok(match args.family {
        Family::AllEqual => InstanceSpec::AllEqual {
            n,
            value: lo_core::numeric::parse_int(&args.value)?,
        },
        Family::Ap => InstanceSpec::Ap { n },
        Family::Dissociated => InstanceSpec::Dissociated { n },
        Family::RandomBounded => InstanceSpec::RandomBounded {
            n,
            bound: args.bound,
            seed: args.seed,
        },
        Family::GapSample => {
            return Err(CliError::Usage(
                "sweep does not support gap-sample; use generate and a file".into(),
            ))
        }
    })
}

fn run_sweep(args: &SweepArgs, limits: &Limits) -> Result<Output, CliError> {
    if args.n_step == 0 || args.n_from > args.n_to {
        return Err(CliError::Usage("empty n range".into()));
    }
    let ns: Vec<usize> = (args.n_from..=args.n_to).step_by(args.n_step).collect();
    let default_mu = match args.check {
        SweepCheck::Comparison => Density::HALF,
        _ => Density::ONE,
    };
    let mu = args.mu.as_deref().map(density).transpose()?.unwrap_or(default_mu);
    let results = ns
        .par_iter()
        .map(|&n| -> Result<(SweepEntry, Option<BigRational>), CliError> {
            let spec = sweep_spec(args, n)?;
            let v = generate_instance(&spec, limits.enumeration_guard)?;
            let (report, ratio) = match args.check {
                SweepCheck::Prob => (to_value(concentration_with(&v, mu, limits)?)?, None),
                SweepCheck::Classical => {
                    let r = classical_bounds_check(&v, limits)?;
                    let ratio = r.distinct_ratio_squared.clone();
                    (to_value(r)?, ratio)
                }
                SweepCheck::Comparison => {
                    let case = ComparisonCase {
                        v,
                        v0: 1,
                        k: args.k,
                        qset: ElementSet::from_vec(vec![0]),
                        mu,
                    };
                    let r = lo_core::oracle::comparison_ratio(&case, limits)?;
                    let ratio = r.ratio.clone();
                    (to_value(r)?, Some(ratio))
                }
                SweepCheck::Dichotomy => {
                    let opts = DichotomyOptions {
                        limits: *limits,
                        ..DichotomyOptions::default()
                    };
                    (to_value(newhalasz_dichotomy(&v, mu, &opts)?)?, None)
                }
                SweepCheck::ErdosInverse => (to_value(erdos_inverse_record(&v, args.k, limits)?)?, None),
            };
            Ok((
                SweepEntry {
                    n,
                    instance: spec.to_string(),
                    report,
                },
                ratio,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ratios: Option<Vec<BigRational>> = results.iter().map(|(_, r)| r.clone()).collect();
    let trend = match (args.check, ratios) {
        (SweepCheck::Classical, Some(r)) => Some(trend_within(&r, &rat(args.factor * args.factor, 1))?),
        (SweepCheck::Comparison, Some(r)) => Some(trend_within(&r, &rat(args.factor, 1))?),
        _ => None,
    };
    let passed = trend.as_ref().is_none_or(|t| t.passed);
    let report = SweepReport {
        family: value_name(args.family),
        check: value_name(args.check),
        entries: results.into_iter().map(|(e, _)| e).collect(),
        trend,
    };
    Output::new(passed, report)
}

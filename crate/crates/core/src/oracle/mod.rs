//! Independent cross-checks: exhaustive enumeration, quadrature of the Fourier
//! identity, additive-energy counts, the forward theorem with an explicit
//! constant, and recorders for inequalities whose constants are unspecified.

mod brute;
mod classical;
mod dichotomy;
pub mod fourier;
mod forward;
mod halasz;
mod lemma;
mod ratios;
mod suites;

pub use brute::brute_distribution;
pub use classical::{classical_bounds_check, erdos_inverse_record, ClassicalReport, ErdosCheck, ErdosInverseRecord};
pub use dichotomy::{newhalasz_dichotomy, DichotomyOptions, DichotomyReport, Progression};
pub use forward::{forward_lo_witness, ForwardWitness};
pub use fourier::fourier_quadrature;
pub use halasz::halasz_r;
pub use lemma::{lemma31_case, lemma31_suite, LemmaCase, LemmaSuiteReport, PartTally, PARTS};
pub use ratios::{
    comparison_ratio, intersection_inequalities, percentiles, sandwich_and_comparison_ratios, trend_within,
    ComparisonCase, IntersectionRecord, Percentiles, RatioRecord, SandwichReport, Trend,
};
pub use suites::{
    classical_trend, comparison_trend, equivalence_suite, erdos_exhaustive, forward_suite, fourier_suite,
    intersection_suite, EquivalenceReport, ErdosExhaustiveReport, ForwardCase, ForwardSuiteReport, FourierReport,
    IntersectionSuiteReport, SweepPoint, TrendReport,
};

//! Randomized invariant suites behind `telewit verify`.

use std::fmt;
use std::str::FromStr;

use super::CliError;
use crate::fef::{self, OptimizerConfig};
use crate::linalg::{self, frobenius_norm};
use crate::states::{self, DensityMatrix};
use crate::witness;

pub const CONVEXITY_TOL: f64 = 1e-9;
pub const LIPSCHITZ_TOL: f64 = 1e-9;
pub const SEPARABLE_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-6;
pub const SAMPLER_SLACK: f64 = 1e-9;
pub const D2_DECOMPOSITION_TOL: f64 = 1e-14;
pub const GELLMANN_TOL: f64 = 1e-12;

/// Haar draws per state when cross-checking the optimizer against sampling.
const SAMPLER_DRAWS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Convexity,
    Lipschitz,
    SeparableNonneg,
    Decompositions,
    OracleAgreement,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Convexity,
        Suite::Lipschitz,
        Suite::SeparableNonneg,
        Suite::Decompositions,
        Suite::OracleAgreement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Convexity => "convexity",
            Self::Lipschitz => "lipschitz",
            Self::SeparableNonneg => "separable-nonneg",
            Self::Decompositions => "decompositions",
            Self::OracleAgreement => "oracle-agreement",
            Self::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::EACH
            .iter()
            .chain(std::iter::once(&Self::All))
            .find(|suite| suite.as_str() == s)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("unknown suite '{s}'")))
    }
}

/// Outcome of one invariant check over many random instances.
///
/// `worst_margin` is the smallest slack seen, `bound - observed`; a negative
/// margin beyond the tolerance is a violation. For reconstruction checks it is
/// the largest residual instead.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} checks, {} violations, worst margin {:e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.violations,
            self.worst_margin
        )
    }
}

struct Tally {
    report: CheckReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            report: CheckReport {
                name: name.into(),
                checks: 0,
                violations: 0,
                worst_margin: f64::INFINITY,
            },
        }
    }

    /// Records `margin >= -tol`.
    fn margin(&mut self, margin: f64, tol: f64) {
        self.report.checks += 1;
        self.report.worst_margin = self.report.worst_margin.min(margin);
        if margin.is_nan() || margin < -tol {
            self.report.violations += 1;
        }
    }

    fn finish(self) -> CheckReport {
        self.report
    }
}

/// Distinct deterministic seed per `(stream, index)`.
pub fn sub_seed(seed: u64, stream: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index as u64)
}

/// Random two-qubit state with rank cycling through 1..=4.
fn random_qubit_pair_state(seed: u64, stream: u64, index: usize) -> crate::Result<DensityMatrix> {
    states::random_density(2, 1 + index % 4, sub_seed(seed, stream, index))
}

pub fn convexity(samples: usize, seed: u64) -> crate::Result<CheckReport> {
    let mut tally = Tally::new("convexity F(mix) <= lambda F1 + (1-lambda) F2 (d=2)");
    for k in 0..samples {
        let a = random_qubit_pair_state(seed, 1, k)?;
        let b = random_qubit_pair_state(seed, 2, k)?;
        let fa = fef::fef_exact_2x2(&a)?.value;
        let fb = fef::fef_exact_2x2(&b)?.value;
        for step in 1..=9 {
            let lambda = step as f64 / 10.0;
            let fm = fef::fef_exact_2x2(&states::mix(&a, &b, lambda)?)?.value;
            tally.margin(lambda * fa + (1.0 - lambda) * fb - fm, CONVEXITY_TOL);
        }
    }
    Ok(tally.finish())
}

pub fn lipschitz(samples: usize, seed: u64) -> crate::Result<CheckReport> {
    let bound = fef::continuity_bound(2)?;
    let mut tally = Tally::new("lipschitz |F(a) - F(b)| <= d^2 ||a - b||_F (d=2)");
    for k in 0..samples {
        let a = random_qubit_pair_state(seed, 3, k)?;
        let b = random_qubit_pair_state(seed, 4, k)?;
        let gap = (fef::fef_exact_2x2(&a)?.value - fef::fef_exact_2x2(&b)?.value).abs();
        let dist = frobenius_norm(&a.matrix().sub(b.matrix())?);
        tally.margin(bound * dist - gap, LIPSCHITZ_TOL);
    }
    Ok(tally.finish())
}

pub fn separable_nonneg(samples: usize, seed: u64) -> crate::Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for d in [2usize, 3] {
        let mut tally = Tally::new(&format!("separable Tr(W sigma) >= 0 (d={d})"));
        for k in 0..samples {
            let terms = 1 + k % 6;
            let sigma = states::random_separable(d, terms, sub_seed(seed, 5 + d as u64, k))?;
            tally.margin(witness::witness_expectation(&sigma), SEPARABLE_TOL);
        }
        out.push(tally.finish());
    }
    Ok(out)
}

fn residual_report(name: &str, residual: f64, tol: f64) -> CheckReport {
    CheckReport {
        name: name.into(),
        checks: 1,
        violations: usize::from(residual.is_nan() || residual >= tol),
        worst_margin: residual,
    }
}

pub fn decompositions() -> crate::Result<Vec<CheckReport>> {
    let w2 = witness::witness_operator(2)?;
    let mut out = vec![
        residual_report(
            "pauli reconstruction residual (d=2)",
            witness::pauli_decomposition().reconstruct().max_abs_diff(&w2)?,
            D2_DECOMPOSITION_TOL,
        ),
        residual_report(
            "projector reconstruction residual (d=2)",
            witness::projector_decomposition().reconstruct().max_abs_diff(&w2)?,
            D2_DECOMPOSITION_TOL,
        ),
    ];
    for d in [3usize, 4] {
        let w = witness::witness_operator(d)?;
        out.push(residual_report(
            &format!("gell-mann reconstruction residual (d={d})"),
            witness::gellmann_decomposition(d)?.reconstruct().max_abs_diff(&w)?,
            GELLMANN_TOL,
        ));
    }
    Ok(out)
}

pub fn oracle_agreement(samples: usize, seed: u64) -> crate::Result<Vec<CheckReport>> {
    let cfg = OptimizerConfig {
        seed,
        ..OptimizerConfig::default()
    };
    let mut exact_vs_opt = Tally::new("optimizer vs exact |diff| < 1e-6 (d=2)");
    let mut opt_vs_sampler = Tally::new("sampler <= optimizer (d=2,3)");
    for k in 0..samples {
        let rho = random_qubit_pair_state(seed, 8, k)?;
        let exact = fef::fef_exact_2x2(&rho)?.value;
        let opt = fef::fef_optimize(&rho, &cfg)?.value;
        exact_vs_opt.margin(ORACLE_TOL - (exact - opt).abs(), 0.0);
        let sampled = fef::fef_sample(&rho, SAMPLER_DRAWS, sub_seed(seed, 9, k))?.value;
        opt_vs_sampler.margin(opt - sampled, SAMPLER_SLACK);
    }
    // The sampler bound at d = 3 where no exact value exists.
    for k in 0..samples.div_ceil(10) {
        let rho = states::random_density(3, 1 + k % 9, sub_seed(seed, 10, k))?;
        let opt = fef::fef_optimize(&rho, &cfg)?.value;
        let sampled = fef::fef_sample(&rho, SAMPLER_DRAWS, sub_seed(seed, 11, k))?.value;
        opt_vs_sampler.margin(opt - sampled, SAMPLER_SLACK);
    }
    Ok(vec![exact_vs_opt.finish(), opt_vs_sampler.finish()])
}

/// Runs a suite and returns one report per check.
pub fn run_suite(suite: Suite, samples: usize, seed: u64) -> crate::Result<Vec<CheckReport>> {
    Ok(match suite {
        Suite::Convexity => vec![convexity(samples, seed)?],
        Suite::Lipschitz => vec![lipschitz(samples, seed)?],
        Suite::SeparableNonneg => separable_nonneg(samples, seed)?,
        Suite::Decompositions => decompositions()?,
        Suite::OracleAgreement => oracle_agreement(samples, seed)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, samples, seed)?);
            }
            all
        }
    })
}

/// Submultiplicativity of the Frobenius norm on random rectangular pairs.
pub fn norm_lemma(samples: usize, seed: u64) -> CheckReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("||AB||_F <= ||A||_F ||B||_F");
    for _ in 0..samples {
        let (m, n, r) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = linalg::ginibre(m, n, &mut rng);
        let b = linalg::ginibre(n, r, &mut rng);
        let ab = linalg::matmul(&a, &b).expect("inner dimensions agree");
        tally.margin(frobenius_norm(&a) * frobenius_norm(&b) - frobenius_norm(&ab), 1e-12);
    }
    tally.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::EACH {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::Convexity, Suite::Lipschitz, Suite::SeparableNonneg, Suite::Decompositions] {
            for r in run_suite(s, 10, 3).unwrap() {
                assert!(r.passed(), "{r}");
            }
        }
        assert!(norm_lemma(50, 1).passed());
    }

    #[test]
    fn tally_counts_nan_as_violation() {
        let mut t = Tally::new("x");
        t.margin(f64::NAN, 1.0);
        t.margin(-0.5, 1.0);
        let r = t.finish();
        assert_eq!((r.checks, r.violations), (2, 1));
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(0, 1, 0), sub_seed(0, 2, 0));
        assert_ne!(sub_seed(0, 1, 0), sub_seed(0, 1, 1));
        assert_ne!(sub_seed(1, 1, 0), sub_seed(0, 1, 0));
    }
}

//! Zero-failure reliability statistics: the "balls and urn" model.
//!
//! A program that survives `N` failure-free demands drawn from its operational
//! input distribution supports the claim "probability of failure per demand is
//! at most `p`, with confidence `C`" whenever `(1-p)^N <= 1-C`. These functions
//! move between the three quantities, plus the continuous per-hour analogue
//! under a constant-rate exponential failure model.
//!
//! All formulas are evaluated through `ln_1p`/`exp_m1` so that tiny bounds
//! (`p = 1e-9` and below) and large counts do not lose precision to the naive
//! `1 - (1-p)^N` form.

use thiserror::Error;

/// Whether a bound is per demand (dimensionless) or per hour of operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    PerDemand,
    PerHour,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::PerDemand => write!(f, "per-demand"),
            Basis::PerHour => write!(f, "per-hour"),
        }
    }
}

/// A reliability figure an assessor wants to demonstrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityTarget {
    /// Failure probability per demand, or failure rate per hour.
    pub bound: f64,
    /// Confidence level in (0,1).
    pub confidence: f64,
    pub basis: Basis,
}

/// The amount of failure-free testing a target translates into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestRequirement {
    /// Number of failure-free demands.
    Count(u64),
    /// Hours of failure-free operation.
    Hours(f64),
}

/// Evidence behind a demonstrated claim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evidence {
    Demands { tests_executed: u64, failures: u64 },
    Operation { hours: f64, failures: u64 },
}

/// A reliability claim supported by completed zero-failure testing.
///
/// Constructed only from zero-failure evidence; campaigns that observe
/// failures produce a report but no claim.
#[derive(Debug, Clone, PartialEq)]
pub struct DemonstratedClaim {
    pub bound: f64,
    pub confidence: f64,
    pub basis: Basis,
    pub evidence: Evidence,
}

impl DemonstratedClaim {
    /// Claim from `tests` failure-free demands at the given confidence.
    pub fn from_demands(tests: u64, confidence: f64) -> Result<Self, StatsError> {
        let bound = demonstrated_pfd(tests, confidence)?;
        Ok(DemonstratedClaim {
            bound,
            confidence,
            basis: Basis::PerDemand,
            evidence: Evidence::Demands { tests_executed: tests, failures: 0 },
        })
    }

    /// Claim from `hours` failure-free operating hours at the given confidence.
    pub fn from_hours(hours: f64, confidence: f64) -> Result<Self, StatsError> {
        let bound = demonstrated_failure_rate(hours, confidence)?;
        Ok(DemonstratedClaim {
            bound,
            confidence,
            basis: Basis::PerHour,
            evidence: Evidence::Operation { hours, failures: 0 },
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("{name} = {value} is out of range; expected {expected}")]
    OutOfRange { name: &'static str, value: f64, expected: &'static str },
    #[error("required test count exceeds 2^64 for pfd {pfd} at confidence {confidence}")]
    CountOverflow { pfd: f64, confidence: f64 },
}

fn check_unit_open(name: &'static str, value: f64) -> Result<(), StatsError> {
    if !(value > 0.0 && value < 1.0) {
        return Err(StatsError::OutOfRange { name, value, expected: "a value strictly inside (0,1)" });
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<(), StatsError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(StatsError::OutOfRange { name, value, expected: "a finite value > 0" });
    }
    Ok(())
}

/// `N * ln(1-p) <= ln(1-C)`, i.e. N failure-free tests suffice for (p, C).
fn count_suffices(n: u64, pfd: f64, confidence: f64) -> bool {
    (n as f64) * (-pfd).ln_1p() <= (-confidence).ln_1p()
}

/// Smallest number of failure-free tests `N` with `(1-p)^N <= 1-C`.
///
/// Computed as `ceil(ln(1-C) / ln(1-p))` and then adjusted by direct
/// evaluation of the defining inequality, so the result is tight.
pub fn required_test_count(pfd: f64, confidence: f64) -> Result<u64, StatsError> {
    check_unit_open("pfd", pfd)?;
    check_unit_open("confidence", confidence)?;
    let ratio = (-confidence).ln_1p() / (-pfd).ln_1p();
    if !ratio.is_finite() || ratio >= u64::MAX as f64 {
        return Err(StatsError::CountOverflow { pfd, confidence });
    }
    let mut n = ratio.ceil().max(1.0) as u64;
    // Float fix-up around the ceiling: find the smallest sufficient integer.
    while n > 1 && count_suffices(n - 1, pfd, confidence) {
        n -= 1;
    }
    while !count_suffices(n, pfd, confidence) {
        n = n.checked_add(1).ok_or(StatsError::CountOverflow { pfd, confidence })?;
    }
    Ok(n)
}

/// Confidence `1 - (1-p)^N` achieved by `tests` failure-free demands.
pub fn achieved_confidence(pfd: f64, tests: u64) -> Result<f64, StatsError> {
    check_unit_open("pfd", pfd)?;
    Ok(-((tests as f64) * (-pfd).ln_1p()).exp_m1())
}

/// Tightest pfd claimable at confidence `C` after `tests` failure-free demands:
/// `1 - (1-C)^(1/N)`.
pub fn demonstrated_pfd(tests: u64, confidence: f64) -> Result<f64, StatsError> {
    if tests == 0 {
        return Err(StatsError::OutOfRange {
            name: "tests",
            value: 0.0,
            expected: "a positive test count",
        });
    }
    check_unit_open("confidence", confidence)?;
    Ok(-((-confidence).ln_1p() / tests as f64).exp_m1())
}

/// Failure-free operating hours `T` with `1 - exp(-rate * T) = C`,
/// i.e. `T = -ln(1-C) / rate` under a constant failure rate.
pub fn required_test_hours(rate: f64, confidence: f64) -> Result<f64, StatsError> {
    check_positive("rate", rate)?;
    check_unit_open("confidence", confidence)?;
    Ok(-(-confidence).ln_1p() / rate)
}

/// Failure rate demonstrated by `hours` of failure-free operation:
/// `lambda = -ln(1-C) / T`.
pub fn demonstrated_failure_rate(hours: f64, confidence: f64) -> Result<f64, StatsError> {
    check_positive("hours", hours)?;
    check_unit_open("confidence", confidence)?;
    Ok(-(-confidence).ln_1p() / hours)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    // Expected values below were fixed ahead of the implementation with a
    // 60-digit arbitrary-precision evaluation of the closed forms (f64 inputs
    // converted exactly). The acceptance suite re-derives the headline count
    // with an independent big-integer oracle.

    #[test]
    fn count_for_one_in_a_million_at_99() {
        let n = required_test_count(1e-6, 0.99).unwrap();
        assert_eq!(n, 4_605_168);
        // 3-significant-figure rendering is 4.61e6.
        assert_eq!(format!("{:.2e}", n as f64), "4.61e6");
    }

    #[test]
    fn count_definition_forces_one_test_at_half_half() {
        assert_eq!(required_test_count(0.5, 0.5).unwrap(), 1);
    }

    #[test]
    fn count_is_tight_at_the_boundary() {
        for &(p, c) in &[(1e-6, 0.99), (1e-3, 0.9), (0.5, 0.5), (1e-9, 0.999), (0.3, 0.95)] {
            let n = required_test_count(p, c).unwrap();
            assert!(count_suffices(n, p, c), "N={n} must satisfy (1-p)^N <= 1-C for p={p}, C={c}");
            if n > 1 {
                assert!(!count_suffices(n - 1, p, c), "N-1 must not suffice for p={p}, C={c}");
            }
        }
    }

    #[test]
    fn count_matches_oracle_for_tiny_pfd() {
        // p = 1e-9, C = 0.999: oracle ratio 6907755275.528..., hence 6907755276.
        assert_eq!(required_test_count(1e-9, 0.999).unwrap(), 6_907_755_276);
    }

    #[test]
    fn count_rejects_out_of_range() {
        assert!(required_test_count(0.0, 0.99).is_err());
        assert!(required_test_count(1.0, 0.99).is_err());
        assert!(required_test_count(1e-6, 0.0).is_err());
        assert!(required_test_count(1e-6, 1.0).is_err());
        assert!(required_test_count(-0.1, 0.5).is_err());
        assert!(required_test_count(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn confidence_with_no_tests_is_zero() {
        assert_eq!(achieved_confidence(1e-6, 0).unwrap(), 0.0);
        assert_eq!(achieved_confidence(0.37, 0).unwrap(), 0.0);
    }

    #[test]
    fn confidence_single_coin_flip() {
        assert!(rel_err(achieved_confidence(0.5, 1).unwrap(), 0.5) < 1e-15);
    }

    #[test]
    fn confidence_roundtrips_the_required_count() {
        let n = required_test_count(1e-6, 0.99).unwrap();
        let c = achieved_confidence(1e-6, n).unwrap();
        // Oracle value 0.990000001165974366832...
        assert!(c >= 0.99 && c < 0.99 + 1e-6, "achieved {c}");
        assert!(rel_err(c, 0.990000001165974366832) < 1e-12);
    }

    #[test]
    fn confidence_survives_tiny_pfd_times_huge_count() {
        // Naive 1-(1-p)^N collapses to 0 here because 1-1e-18 rounds to 1.0.
        // Oracle: 1 - e^-1 = 0.632120558828557704907...
        let c = achieved_confidence(1e-18, 1_000_000_000_000_000_000).unwrap();
        assert!(rel_err(c, 0.6321205588285577) < 1e-12, "stable form required, got {c}");
    }

    #[test]
    fn pfd_after_the_oracle_count() {
        // Oracle: 1 - 0.01^(1/4605168) = 9.9999997468119990848e-7.
        let p = demonstrated_pfd(4_605_168, 0.99).unwrap();
        assert!(rel_err(p, 1.0e-6) < 1e-3);
        assert!(rel_err(p, 9.9999997468119990848e-7) < 1e-12);
    }

    #[test]
    fn pfd_after_a_million_tests() {
        // Oracle: 1 - 0.01^(1e-6) = 4.60515958220814693306e-6.
        let p = demonstrated_pfd(1_000_000, 0.99).unwrap();
        assert!(rel_err(p, 4.60515958220814693306e-6) < 1e-12);
    }

    #[test]
    fn pfd_single_test_at_half_confidence() {
        assert!(rel_err(demonstrated_pfd(1, 0.5).unwrap(), 0.5) < 1e-15);
    }

    #[test]
    fn pfd_rejects_zero_tests() {
        assert!(demonstrated_pfd(0, 0.99).is_err());
    }

    #[test]
    fn hours_for_one_in_a_million_per_hour() {
        // Oracle: -ln(0.01)/1e-6 = 4605170.18598809068825.
        let t = required_test_hours(1e-6, 0.99).unwrap();
        assert!(rel_err(t, 4_605_170.18598809068825) < 1e-12);
        assert_eq!(format!("{:.2e}", t), "4.61e6");
    }

    #[test]
    fn hours_shrink_to_zero_with_confidence() {
        let t = required_test_hours(1e-6, 1e-12).unwrap();
        assert!(t > 0.0 && t < 2e-6, "T must vanish as C -> 0, got {t}");
    }

    #[test]
    fn hours_scale_inversely_with_rate() {
        let t1 = required_test_hours(1e-6, 0.99).unwrap();
        let t2 = required_test_hours(2e-6, 0.99).unwrap();
        assert_eq!(t2, t1 / 2.0);
    }

    #[test]
    fn rate_from_hours_inverts_exactly() {
        // Oracle: -ln(0.01)/4.60517e6 = 1.00000004038680232866e-6.
        let l = demonstrated_failure_rate(4.60517e6, 0.99).unwrap();
        assert!(rel_err(l, 1.00000004038680232866e-6) < 1e-12);

        // Oracle: -ln(0.01)/1e9 = 4.60517018598809047986e-9.
        let l9 = demonstrated_failure_rate(1e9, 0.99).unwrap();
        assert!(rel_err(l9, 4.60517018598809047986e-9) < 1e-12);

        // Algebraic roundtrip at tight tolerance.
        for &(t, c) in &[(123.0, 0.9), (4.6e6, 0.99), (1e9, 0.999)] {
            let rate = demonstrated_failure_rate(t, c).unwrap();
            let back = required_test_hours(rate, c).unwrap();
            assert!(rel_err(back, t) < 1e-12);
        }
    }

    #[test]
    fn count_monotone_in_both_arguments() {
        let pfds = [1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5];
        let confs = [0.5, 0.8, 0.9, 0.99, 0.999, 0.9999];
        for &c in &confs {
            let mut prev = u64::MAX;
            for &p in &pfds {
                let n = required_test_count(p, c).unwrap();
                assert!(n <= prev, "count must not increase as pfd grows");
                prev = n;
            }
        }
        for &p in &pfds {
            let mut prev = 0u64;
            for &c in &confs {
                let n = required_test_count(p, c).unwrap();
                assert!(n >= prev, "count must not decrease as confidence grows");
                prev = n;
            }
        }
    }

    #[test]
    fn demonstrated_pfd_roundtrip_is_tight_from_below() {
        // The claimable pfd after the required count is never looser than p.
        for &(p, c) in &[(1e-6, 0.99), (1e-4, 0.9), (1e-2, 0.999), (0.4, 0.6)] {
            let n = required_test_count(p, c).unwrap();
            let q = demonstrated_pfd(n, c).unwrap();
            assert!(q <= p, "claimable pfd after N tests can only be tighter");
        }
        // Ceiling slack is ~1/N relative, so for counts in the millions the
        // roundtrip is tight to within 1e-6.
        for &(p, c) in &[(1e-6, 0.99), (1e-7, 0.9), (1e-8, 0.999), (5e-7, 0.99)] {
            let n = required_test_count(p, c).unwrap();
            assert!(n >= 2_000_000);
            let q = demonstrated_pfd(n, c).unwrap();
            assert!(q <= p && q / p >= 1.0 - 1e-6, "ratio {}", q / p);
        }
    }

    #[test]
    fn claim_constructors_carry_evidence() {
        let c = DemonstratedClaim::from_demands(1_000_000, 0.99).unwrap();
        assert_eq!(c.basis, Basis::PerDemand);
        assert_eq!(c.evidence, Evidence::Demands { tests_executed: 1_000_000, failures: 0 });
        let h = DemonstratedClaim::from_hours(4.6e6, 0.99).unwrap();
        assert_eq!(h.basis, Basis::PerHour);
    }
}

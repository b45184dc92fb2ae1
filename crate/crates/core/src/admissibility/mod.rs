//! Which distributions `η` are derivatives at `t = 0` of families of positive
//! measures starting at `μ`.
//!
//! The condition is `⟨η, f⟩ >= 0` (one-sided) or `⟨η, f⟩ = 0` (two-sided)
//! for every smooth compactly supported `f >= 0` vanishing on `supp μ`;
//! probability families additionally need `⟨η, 1⟩ = 0`.
//!
//! [`check_one_sided`] and [`check_two_sided`] decide with a rule engine:
//!
//! * **R1** the measure part of `η` off `supp μ` is nonnegative;
//! * **R2** derivative atoms off `supp μ` are forbidden;
//! * **R3** atoms at interior points or at endpoints of nondegenerate
//!   support intervals are unconstrained, since every admissible `f` is flat
//!   there;
//! * **R4** at an isolated support point `p`, `f(p) = f'(p) = 0` and
//!   `f''(p) >= 0`, and a tilted `(x-p)²(1 + c(x-p))` profile makes any
//!   higher-order term dominate with either sign: the order is at most 2
//!   and the `∂²δ_p` coefficient is `b >= 0`. `b = 0` is accepted and flagged.
//!
//! Two-sided is one-sided for `η` and for `-η`. Consequently the measure
//! part must vanish off `supp μ` and a nonzero `∂²δ_p` at an isolated
//! point is rejected, while `a ∂δ_p` remains allowed. In particular, for
//! `μ = δ_0` a positive measure added to `a ∂δ_0` is *not* two-sided
//! admissible unless it lives on `{0}`.
//!
//! [`falsify`] is an independent search over explicit test functions; it
//! only ever refutes. Inadmissible verdicts carry its counterexample when
//! one is found.

mod oracle;
mod rules;
mod testfn;

pub use oracle::{falsify, Counterexample, DEFAULT_BUDGET, MIN_WIDTH};
pub use rules::{one_sided_trace, Rule, RuleFiring, Site, TOLERANCE};
pub use testfn::{TestFunctionKind, TestFunctionSpec};

use std::fmt;

use crate::distributions::{RadonMeasure, StructuredDistribution, SupportSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    OneSided,
    TwoSided,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OneSided => "one_sided",
            Mode::TwoSided => "two_sided",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub admissible: bool,
    pub mode: Mode,
    /// `Some` when the probability constraint was requested.
    pub probability_constraint_ok: Option<bool>,
    pub trace: Vec<RuleFiring>,
    /// Oracle counterexample, searched for only when the rules reject.
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub probability: bool,
    pub budget: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { probability: false, budget: DEFAULT_BUDGET, seed: 0 }
    }
}

/// `|⟨η, 1⟩| <= 1e-10`.
pub fn check_probability_constraint(eta: &StructuredDistribution) -> bool {
    eta.total_action_on_one().abs() <= 1e-10
}

fn rule_trace(support: &SupportSet, eta: &StructuredDistribution, mode: Mode) -> Vec<RuleFiring> {
    let mut trace = one_sided_trace(support, eta);
    if mode == Mode::TwoSided {
        for mut firing in one_sided_trace(support, &-eta) {
            firing.note = if firing.note.is_empty() { "for -η".into() } else { format!("for -η: {}", firing.note) };
            trace.push(firing);
        }
    }
    trace
}

/// Verdict against a bare support set; only `supp μ` enters the condition.
pub fn check_support(support: &SupportSet, eta: &StructuredDistribution, mode: Mode, opts: &CheckOptions) -> Verdict {
    let trace = rule_trace(support, eta, mode);
    let rules_ok = trace.iter().all(|f| f.satisfied);
    let probability_constraint_ok = opts.probability.then(|| check_probability_constraint(eta));
    let counterexample = if rules_ok { None } else { falsify(support, eta, mode, opts.budget, opts.seed) };
    Verdict {
        admissible: rules_ok && probability_constraint_ok.unwrap_or(true),
        mode,
        probability_constraint_ok,
        trace,
        counterexample,
    }
}

pub fn check(mu: &RadonMeasure, eta: &StructuredDistribution, mode: Mode, opts: &CheckOptions) -> Verdict {
    check_support(mu.support(), eta, mode, opts)
}

pub fn check_one_sided(mu: &RadonMeasure, eta: &StructuredDistribution) -> Verdict {
    check(mu, eta, Mode::OneSided, &CheckOptions::default())
}

pub fn check_two_sided(mu: &RadonMeasure, eta: &StructuredDistribution) -> Verdict {
    check(mu, eta, Mode::TwoSided, &CheckOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Atom, DensityPiece};

    fn atoms(list: &[(f64, usize, f64)]) -> StructuredDistribution {
        StructuredDistribution::new(list.iter().map(|&(p, k, c)| Atom::new(p, k, c)), []).unwrap()
    }

    #[test]
    fn point_mass_deformation_admissible() {
        let nu = StructuredDistribution::new(
            [Atom::new(0.4, 0, 0.3)],
            [DensityPiece::uniform(-1.0, -0.2, 0.5).unwrap()],
        )
        .unwrap();
        let eta = nu.plus(&atoms(&[(0.0, 1, -1.7), (0.0, 2, 0.8)]));
        let v = check_one_sided(&RadonMeasure::dirac(0.0), &eta);
        assert!(v.admissible, "{:?}", v.trace);
        assert!(v.counterexample.is_none());
    }

    #[test]
    fn fifth_derivative_inside_interval() {
        let mu = RadonMeasure::uniform(-0.5, 0.5).unwrap();
        assert!(check_one_sided(&mu, &atoms(&[(0.0, 5, 1.0)])).admissible);
    }

    #[test]
    fn third_derivative_at_point_mass() {
        let v = check_one_sided(&RadonMeasure::dirac(0.0), &atoms(&[(0.0, 3, 1.0)]));
        assert!(!v.admissible);
        assert!(v.counterexample.unwrap().value < -1e-9);
    }

    #[test]
    fn two_sided_examples() {
        let mu = RadonMeasure::dirac(0.0);
        assert!(check_two_sided(&mu, &atoms(&[(0.0, 1, 2.5)])).admissible);
        let v = check_two_sided(&mu, &atoms(&[(0.0, 2, 1.0)]));
        assert!(!v.admissible);
        assert!(v.counterexample.is_some());
        let with_measure = atoms(&[(0.0, 1, 2.5), (0.6, 0, 1.0)]);
        assert!(check_one_sided(&mu, &with_measure).admissible);
        assert!(!check_two_sided(&mu, &with_measure).admissible);
    }

    #[test]
    fn singular_support_allows_everything_inside() {
        let mu = RadonMeasure::singular_continuous(SupportSet::interval(0.0, 1.0).unwrap(), 1.0).unwrap();
        for k in 0..=6 {
            let eta = atoms(&[(0.5 * 2f64.sqrt(), k, 1.0)]);
            assert!(check_two_sided(&mu, &eta).admissible, "k={k}");
        }
    }

    #[test]
    fn probability_constraint() {
        assert!(check_probability_constraint(&atoms(&[(0.0, 1, 1.0), (0.0, 2, 3.0)])));
        assert!(!check_probability_constraint(&StructuredDistribution::dirac(0.0)));
        assert!(check_probability_constraint(&atoms(&[(0.0, 0, 1.0), (1.0, 0, -1.0)])));
        let opts = CheckOptions { probability: true, ..CheckOptions::default() };
        let v = check(&RadonMeasure::dirac(0.0), &StructuredDistribution::dirac(0.0), Mode::OneSided, &opts);
        assert_eq!(v.probability_constraint_ok, Some(false));
        assert!(!v.admissible);
    }
}

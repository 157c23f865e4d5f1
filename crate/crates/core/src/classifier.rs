//! Parabolicity and hyperbolicity verdicts with replayable certificates.
//!
//! Rules, in order of precedence:
//!
//! | rule      | bounds            | balance   | integral         | outcome    |
//! |-----------|-------------------|-----------|------------------|------------|
//! | `cor3`    | both, both        | `M ≡ 0`   | `∫Λ` (∝ `∫w`)    | either     |
//! | `t1a`     | lower, lower, `g` | `M ≥ 0`   | `∫Λ_g = ∞`       | parabolic  |
//! | `t1b`     | lower, lower      | `M ≤ 0`   | `∫Λ = ∞`         | parabolic  |
//! | `t2a`     | upper, upper, `g` | `M ≤ 0`   | `∫Λ_g < ∞`       | hyperbolic |
//! | `t2b`     | upper, upper      | `M ≥ 0`   | `∫Λ < ∞`         | hyperbolic |
//!
//! The bound directions (curvature, then mean convexity) describe an ambient
//! manifold this crate never sees, so they are recorded as asserted rather
//! than checked.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ModelSpace;
use crate::problem::RadialProblem;
use crate::profiles::BalanceReport;
use crate::quadrature::{classify_improper, AhlforsWeight, IntegralOutcome, IntegralVerdict, Mp2Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Parabolic,
    Hyperbolic,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    TheoremA,
    #[serde(rename = "T1A")]
    T1a,
    #[serde(rename = "T1B")]
    T1b,
    #[serde(rename = "T2A")]
    T2a,
    #[serde(rename = "T2B")]
    T2b,
    Cor3,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::TheoremA => "TheoremA",
            Rule::T1a => "T1A",
            Rule::T1b => "T1B",
            Rule::T2a => "T2A",
            Rule::T2b => "T2B",
            Rule::Cor3 => "Cor3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckItem {
    pub hypothesis: String,
    pub passed: bool,
    /// Taken from the input as a fact about the ambient space, not verified.
    pub asserted: bool,
    pub detail: String,
}

impl CheckItem {
    fn asserted(hypothesis: impl Into<String>, passed: bool) -> Self {
        Self {
            hypothesis: hypothesis.into(),
            passed,
            asserted: true,
            detail: String::new(),
        }
    }

    fn checked(hypothesis: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            hypothesis: hypothesis.into(),
            passed,
            asserted: false,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum CertificateInputs {
    Model { model: ModelSpace, n_exponent: usize, rho: f64 },
    Submanifold { problem: RadialProblem },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub rule: Option<Rule>,
    pub balance: Option<BalanceReport>,
    pub integral: Option<IntegralVerdict>,
    pub checklist: Vec<CheckItem>,
    pub inputs: CertificateInputs,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeVerdict {
    pub outcome: Outcome,
    pub certificate: Certificate,
}

impl TypeVerdict {
    pub fn is_definite(&self) -> bool {
        self.outcome != Outcome::Inconclusive
    }

    /// Re-derives the verdict from the recorded inputs and compares the
    /// outcome, the rule and every checklist entry.
    pub fn replay(&self) -> Result<bool> {
        let again = match &self.certificate.inputs {
            CertificateInputs::Model { model, n_exponent, rho } => {
                classify_model_with(model, *n_exponent, *rho, self.certificate.tolerance)?
            }
            CertificateInputs::Submanifold { problem } => classify_submanifold_with(problem, self.certificate.tolerance)?,
        };
        let same_checks = again.certificate.checklist.len() == self.certificate.checklist.len()
            && again
                .certificate
                .checklist
                .iter()
                .zip(&self.certificate.checklist)
                .all(|(a, b)| a.hypothesis == b.hypothesis && a.passed == b.passed);
        Ok(again.outcome == self.outcome && again.certificate.rule == self.certificate.rule && same_checks)
    }
}

fn describe(verdict: &IntegralVerdict) -> String {
    match &verdict.outcome {
        IntegralOutcome::Finite { value, abs_error } => format!("finite: {value} ± {abs_error:.1e}"),
        IntegralOutcome::Divergent { tail } => format!(
            "divergent: log-tail rate {}, power {}, log {}",
            tail.exponential_rate, tail.power_exponent, tail.log_exponent
        ),
        IntegralOutcome::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

/// Volume criterion for models: `M_w` is parabolic iff `∫_ρ^∞ w^{1−n}`
/// diverges. `n_exponent` is the dimension entering the volume exponent.
pub fn classify_model(model: &ModelSpace, n_exponent: usize, rho: f64) -> Result<TypeVerdict> {
    classify_model_with(model, n_exponent, rho, crate::quadrature::DEFAULT_TOLERANCE)
}

pub fn classify_model_with(model: &ModelSpace, n_exponent: usize, rho: f64, tol: f64) -> Result<TypeVerdict> {
    let w = model.warping();
    if !w.is_complete() {
        return Err(Error::invalid("the volume criterion needs a complete, non-compact model"));
    }
    let weight = AhlforsWeight::new(w, n_exponent, rho)?;
    let verdict = classify_improper(&weight, tol);
    let (outcome, rule) = match verdict.outcome {
        IntegralOutcome::Divergent { .. } => (Outcome::Parabolic, Some(Rule::TheoremA)),
        IntegralOutcome::Finite { .. } => (Outcome::Hyperbolic, Some(Rule::TheoremA)),
        IntegralOutcome::Inconclusive { .. } => (Outcome::Inconclusive, None),
    };
    let checklist = vec![
        CheckItem::checked("model is complete and non-compact", true, ""),
        CheckItem::checked(
            format!("∫_ρ^∞ w^(1−{n_exponent}) classified"),
            !verdict.is_inconclusive(),
            describe(&verdict),
        ),
    ];
    Ok(TypeVerdict {
        outcome,
        certificate: Certificate {
            rule,
            balance: None,
            integral: Some(verdict),
            checklist,
            inputs: CertificateInputs::Model {
                model: model.clone(),
                n_exponent,
                rho,
            },
            tolerance: tol,
        },
    })
}

struct Evaluation {
    balance: BalanceReport,
    lambda: IntegralVerdict,
    lambda_g: Option<IntegralVerdict>,
}

struct Candidate {
    rule: Rule,
    outcome: Outcome,
    checks: Vec<CheckItem>,
    integral: Option<IntegralVerdict>,
}

impl Candidate {
    fn fires(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn candidates(p: &RadialProblem, e: &Evaluation) -> Vec<Candidate> {
    let curv_lower = CheckItem::asserted("radial curvature K ≥ −w''/w", p.curvature_bound.includes_lower());
    let curv_upper = CheckItem::asserted("radial curvature K ≤ −w''/w", p.curvature_bound.includes_upper());
    let conv_lower = CheckItem::asserted("mean convexity C ≥ h", p.convexity_bound.includes_lower());
    let conv_upper = CheckItem::asserted("mean convexity C ≤ h", p.convexity_bound.includes_upper());
    let grade = format!("{:?} ({:?})", e.balance.class, e.balance.grade);
    let nonneg = CheckItem::checked("balance M ≥ 0", e.balance.class.is_nonnegative(), grade.clone());
    let nonpos = CheckItem::checked("balance M ≤ 0", e.balance.class.is_nonpositive(), grade.clone());
    let zero = CheckItem::checked("balance M ≡ 0", e.balance.class == crate::profiles::BalanceClass::IdenticallyZero, grade);
    let has_g = CheckItem::checked("tangency bound g supplied", p.g.is_some(), "");
    let lambda_div = CheckItem::checked("∫Λ = ∞", e.lambda.is_divergent(), describe(&e.lambda));
    let lambda_fin = CheckItem::checked("∫Λ < ∞", e.lambda.is_finite(), describe(&e.lambda));
    let (g_div, g_fin) = match &e.lambda_g {
        Some(v) => (
            CheckItem::checked("∫Λ_g = ∞", v.is_divergent(), describe(v)),
            CheckItem::checked("∫Λ_g < ∞", v.is_finite(), describe(v)),
        ),
        None => (
            CheckItem::checked("∫Λ_g = ∞", false, "no tangency bound"),
            CheckItem::checked("∫Λ_g < ∞", false, "no tangency bound"),
        ),
    };

    let mut out = Vec::new();
    let both = vec![curv_lower.clone(), curv_upper.clone(), conv_lower.clone(), conv_upper.clone(), zero];
    let cor3_outcome = if e.lambda.is_divergent() {
        Outcome::Parabolic
    } else {
        Outcome::Hyperbolic
    };
    let mut cor3 = both;
    cor3.push(CheckItem::checked("∫Λ (∝ ∫w) classified", !e.lambda.is_inconclusive(), describe(&e.lambda)));
    out.push(Candidate {
        rule: Rule::Cor3,
        outcome: cor3_outcome,
        checks: cor3,
        integral: Some(e.lambda.clone()),
    });
    out.push(Candidate {
        rule: Rule::T1a,
        outcome: Outcome::Parabolic,
        checks: vec![curv_lower.clone(), conv_lower.clone(), has_g.clone(), nonneg.clone(), g_div],
        integral: e.lambda_g.clone(),
    });
    out.push(Candidate {
        rule: Rule::T1b,
        outcome: Outcome::Parabolic,
        checks: vec![curv_lower, conv_lower, nonpos.clone(), lambda_div],
        integral: Some(e.lambda.clone()),
    });
    out.push(Candidate {
        rule: Rule::T2a,
        outcome: Outcome::Hyperbolic,
        checks: vec![curv_upper.clone(), conv_upper.clone(), has_g, nonpos, g_fin],
        integral: e.lambda_g.clone(),
    });
    out.push(Candidate {
        rule: Rule::T2b,
        outcome: Outcome::Hyperbolic,
        checks: vec![curv_upper, conv_upper, nonneg, lambda_fin],
        integral: Some(e.lambda.clone()),
    });
    out
}

/// Applies the comparison theorems to a submanifold problem. Intrinsic
/// problems go through [`classify_model`] with `n = m`.
pub fn classify_submanifold(p: &RadialProblem) -> Result<TypeVerdict> {
    classify_submanifold_with(p, crate::quadrature::DEFAULT_TOLERANCE)
}

pub fn classify_submanifold_with(p: &RadialProblem, tol: f64) -> Result<TypeVerdict> {
    if p.intrinsic {
        let model = ModelSpace::new(p.m, p.warping.clone())?;
        let mut v = classify_model_with(&model, p.m, p.rho, tol)?;
        v.certificate.inputs = CertificateInputs::Submanifold { problem: p.clone() };
        return Ok(v);
    }
    let balance = p.balance()?;
    let lambda = classify_improper(&p.weight_plain(p.rho, tol)?, tol);
    let lambda_g = match &p.g {
        Some(_) => Some(classify_improper(&p.weight(p.rho, tol)?, tol)),
        None => None,
    };
    decide(
        p,
        Evaluation {
            balance,
            lambda,
            lambda_g,
        },
        tol,
    )
}

fn decide(p: &RadialProblem, eval: Evaluation, tol: f64) -> Result<TypeVerdict> {
    let all = candidates(p, &eval);
    let fired: Vec<&Candidate> = all.iter().filter(|c| c.fires()).collect();
    let parabolic = fired.iter().find(|c| c.outcome == Outcome::Parabolic);
    let hyperbolic = fired.iter().find(|c| c.outcome == Outcome::Hyperbolic);
    if let (Some(a), Some(b)) = (parabolic, hyperbolic) {
        return Err(Error::Consistency(format!(
            "{} proves parabolicity while {} proves hyperbolicity; the supplied bounds cannot all hold",
            a.rule.name(),
            b.rule.name()
        )));
    }
    let inputs = CertificateInputs::Submanifold { problem: p.clone() };
    if let Some(winner) = fired.first() {
        return Ok(TypeVerdict {
            outcome: winner.outcome,
            certificate: Certificate {
                rule: Some(winner.rule),
                balance: Some(eval.balance.clone()),
                integral: winner.integral.clone(),
                checklist: winner.checks.clone(),
                inputs,
                tolerance: tol,
            },
        });
    }
    let checklist = all
        .iter()
        .flat_map(|c| {
            c.checks.iter().map(move |item| CheckItem {
                hypothesis: format!("{}: {}", c.rule.name(), item.hypothesis),
                ..item.clone()
            })
        })
        .collect();
    Ok(TypeVerdict {
        outcome: Outcome::Inconclusive,
        certificate: Certificate {
            rule: None,
            balance: Some(eval.balance),
            integral: None,
            checklist,
            inputs,
            tolerance: tol,
        },
    })
}


#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Known {
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObligationStatus {
    Holds,
    Fails,
    NotEvaluable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corollary {
    /// Parabolic under upper bounds with `M ≥ 0`: `∫Λ = ∞`.
    Cor1A,
    /// Parabolic under upper bounds with `M ≤ 0`: no `g`, or `∫Λ_g = ∞`.
    Cor1B,
    /// Hyperbolic under lower bounds with `M ≥ 0`: no `g`, or `∫Λ_g < ∞`.
    Cor2A,
    /// Hyperbolic under lower bounds with `M ≤ 0`: `∫Λ < ∞`.
    Cor2B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obligation {
    pub corollary: Corollary,
    pub statement: String,
    pub status: ObligationStatus,
    pub integral: Option<IntegralVerdict>,
}

fn status(verdict: &IntegralVerdict, want_finite: bool) -> ObligationStatus {
    match (&verdict.outcome, want_finite) {
        (IntegralOutcome::Inconclusive { .. }, _) => ObligationStatus::NotEvaluable,
        (IntegralOutcome::Finite { .. }, true) | (IntegralOutcome::Divergent { .. }, false) => ObligationStatus::Holds,
        _ => ObligationStatus::Fails,
    }
}

/// Necessary conditions implied by a known type: the contrapositives of the
/// comparison theorems. A failed obligation means the supplied data
/// contradict the known type.
pub fn necessary_conditions(p: &RadialProblem, known: Known, tol: f64) -> Result<Vec<Obligation>> {
    if p.intrinsic {
        return Err(Error::HypothesisMismatch("intrinsic problems carry no submanifold bounds".into()));
    }
    let (curv_ok, conv_ok) = match known {
        Known::Hyperbolic => (p.curvature_bound.includes_lower(), p.convexity_bound.includes_lower()),
        Known::Parabolic => (p.curvature_bound.includes_upper(), p.convexity_bound.includes_upper()),
    };
    if !(curv_ok && conv_ok) {
        return Err(Error::HypothesisMismatch(format!(
            "known {known:?} needs {} bounds on both curvature and mean convexity",
            if known == Known::Hyperbolic { "lower" } else { "upper" }
        )));
    }
    let balance = p.balance()?;
    if !balance.class.is_nonnegative() && !balance.class.is_nonpositive() {
        return Err(Error::HypothesisMismatch("the balance function changes sign".into()));
    }
    let lambda = || -> Result<IntegralVerdict> { Ok(classify_improper(&p.weight_plain(p.rho, tol)?, tol)) };
    let lambda_g = || -> Result<Option<IntegralVerdict>> {
        match &p.g {
            Some(_) => Ok(Some(classify_improper(&p.weight(p.rho, tol)?, tol))),
            None => Ok(None),
        }
    };
    let tangency = |corollary: Corollary, want_finite: bool| -> Result<Obligation> {
        let relation = if want_finite { "<" } else { "=" };
        let statement = format!("no tangency bound g exists, or ∫Λ_g {relation} ∞ for it");
        Ok(match lambda_g()? {
            Some(v) => Obligation {
                corollary,
                statement,
                status: status(&v, want_finite),
                integral: Some(v),
            },
            None => Obligation {
                corollary,
                statement,
                status: ObligationStatus::NotEvaluable,
                integral: None,
            },
        })
    };
    let mut out = Vec::new();
    match known {
        Known::Parabolic => {
            if balance.class.is_nonnegative() {
                let v = lambda()?;
                out.push(Obligation {
                    corollary: Corollary::Cor1A,
                    statement: "∫Λ = ∞".into(),
                    status: status(&v, false),
                    integral: Some(v),
                });
            }
            if balance.class.is_nonpositive() {
                out.push(tangency(Corollary::Cor1B, false)?);
            }
        }
        Known::Hyperbolic => {
            if balance.class.is_nonnegative() {
                out.push(tangency(Corollary::Cor2A, true)?);
            }
            if balance.class.is_nonpositive() {
                let v = lambda()?;
                out.push(Obligation {
                    corollary: Corollary::Cor2B,
                    statement: "∫Λ < ∞".into(),
                    status: status(&v, true),
                    integral: Some(v),
                });
            }
        }
    }
    Ok(out)
}

/// Checks that `G^m/w^{m−1}` with `G = exp(∫_ρ^r h)` and `Λ` have integrals of
/// the same type. The two weights agree up to the constant `w(ρ)^m`.
pub fn mp2_equivalence_check(p: &RadialProblem, tol: f64) -> Result<bool> {
    let h = p.effective_h();
    if !h.is_closed() {
        return Err(Error::invalid("the equivalence check needs h in a closed family"));
    }
    let lhs = classify_improper(&Mp2Weight::new(p.m, &p.warping, &h, p.rho, tol)?, tol);
    let rhs = classify_improper(&p.weight_plain(p.rho, tol)?, tol);
    if lhs.is_inconclusive() || rhs.is_inconclusive() {
        return Err(Error::Inconclusive(format!(
            "G^m/w^(m−1): {}; Λ: {}",
            describe(&lhs),
            describe(&rhs)
        )));
    }
    Ok(lhs.is_finite() == rhs.is_finite())
}

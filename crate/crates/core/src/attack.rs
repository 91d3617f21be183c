//! Exhaustive attacker and cross-check oracles.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maxflow::{max_flow, residual_value_unchecked};
use crate::model::Solution;
use crate::network::{ArcId, ArcSet, Flow, Network};
use crate::rational::Rational;
use crate::scenario::{binomial, ScenarioIndex};

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Default bisection tolerance, 1/10^6.
pub fn default_tolerance() -> Rational {
    Rational::new(1, 1_000_000)
}

#[derive(Debug, Clone, Copy)]
pub struct AttackOptions {
    /// Largest number of k-subsets the attacker will enumerate.
    pub budget: u64,
    pub parallel: bool,
}

impl Default for AttackOptions {
    fn default() -> Self {
        AttackOptions { budget: DEFAULT_ENUMERATION_BUDGET, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackReport {
    pub attacked_flow_value: Rational,
    pub worst_attack: Vec<ArcId>,
    pub residual: Rational,
    pub loss: Rational,
    pub subsets_evaluated: u64,
}

pub fn worst_case(net: &Network, phi: &Flow, k: usize) -> Result<AttackReport> {
    worst_case_with(net, phi, k, &AttackOptions::default())
}

/// Minimum adaptive residual value over every k-subset of real arcs.
///
/// Ties go to the lexicographically smallest subset regardless of evaluation
/// order.
pub fn worst_case_with(
    net: &Network,
    phi: &Flow,
    k: usize,
    options: &AttackOptions,
) -> Result<AttackReport> {
    let m = net.arc_count();
    let scenarios = ScenarioIndex::new(m, k)?;
    let count = binomial(m, k).unwrap_or(u64::MAX);
    if count > options.budget {
        let shown = if count == u64::MAX { "more than 2^64".to_string() } else { count.to_string() };
        return Err(Error::Budget(format!(
            "attack enumeration needs C({m},{k}) = {shown} subsets, above the budget of {}",
            options.budget
        )));
    }
    phi.validate(net)?;

    let eval = |i: usize| -> (Rational, usize) {
        let deleted: ArcSet = scenarios.subset(i).into_iter().collect();
        (residual_value_unchecked(net, phi, &deleted), i)
    };
    let best = if options.parallel {
        (0..scenarios.len()).into_par_iter().map(eval).min()
    } else {
        (0..scenarios.len()).map(eval).min()
    };
    let (residual, index) = best.expect("at least one subset");
    let value = phi.value().clone();
    Ok(AttackReport {
        loss: &value - &residual,
        attacked_flow_value: value,
        worst_attack: scenarios.subset(index),
        residual,
        subsets_evaluated: scenarios.len() as u64,
    })
}

/// Confirms that the worst attack on `sol.flow` leaves exactly `sol.theta`,
/// recording the attack on the solution.
pub fn certify(net: &Network, sol: &mut Solution, k: usize, options: &AttackOptions) -> Result<bool> {
    sol.certified = false;
    sol.worst_attack.clear();
    if sol.flow.value().is_zero() {
        ScenarioIndex::new(net.arc_count(), k)?;
        sol.flow.validate(net)?;
        sol.certified = sol.theta.is_zero();
        return Ok(sol.certified);
    }
    let report = worst_case_with(net, &sol.flow, k, options)?;
    sol.worst_attack = report.worst_attack;
    sol.certified = report.residual == sol.theta;
    Ok(sol.certified)
}

/// Bisection estimate of the smallest `lambda` such that capping every real
/// arc at `lambda` keeps the maximum flow value. That is the least possible
/// largest arc value over all maximum flows.
///
/// Returns a value at or above the breakpoint and within `tolerance` of it;
/// returns 0 when the maximum flow value is 0.
pub fn k1_bisection_oracle(net: &Network, tolerance: &Rational) -> Rational {
    assert!(tolerance.is_positive(), "tolerance must be positive");
    let none = ArcSet::new();
    let fstar = max_flow(net, None, &none).value;
    if fstar.is_zero() {
        return Rational::zero();
    }
    let caps: Vec<Rational> = net
        .real_arcs()
        .map(|(_, a)| a.capacity.finite().expect("real arcs are finite").clone())
        .collect();
    let keeps_value = |lambda: &Rational| -> bool {
        let capped: Vec<Rational> = caps.iter().map(|c| c.clone().min(lambda.clone())).collect();
        max_flow(net, Some(&capped), &none).value == fstar
    };
    let mut lo = Rational::zero();
    let mut hi = fstar.clone();
    let half = Rational::new(1, 2);
    while &(&hi - &lo) > tolerance {
        let mid = (&lo + &hi) * &half;
        if keeps_value(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

//! The scenario-expanded linear program for robust adaptive flows.
//!
//! Variables are laid out as
//!
//! ```text
//! phi[1..=m+1]            initial flow, return arc last
//! theta                   guaranteed residual value
//! phi_i[a]  for each scenario i and each arc a not destroyed in i
//! ```
//!
//! and rows as
//!
//! ```text
//! M phi = 0                       (n rows)
//! phi[a] <= c[a]                  (real arcs)
//! M_i phi_i = 0                   (n rows per scenario)
//! phi_i[a] <= phi[a]              (every surviving arc, return arc included)
//! phi_i[m+1] >= theta             (one per scenario)
//! phi[m+1] = F*                   (two-phase mode only)
//! ```
//!
//! The combined mode maximizes `phi[m+1] + theta`; the two-phase mode pins the
//! flow value to the maximum flow value and maximizes `theta`.

use std::ops::Range;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::attack::{self, AttackOptions};
use crate::error::{Error, Result};
use crate::maxflow::max_flow;
use crate::network::{ArcId, ArcSet, Flow, Network};
use crate::rational::Rational;
use crate::scenario::{binomial, ScenarioIndex};
use crate::simplex::{solve_lp_with, LinearProgram, LpOutcome, Relation, SimplexOptions, SimplexStats};

/// Default cap on scenario variables, `C(m,k) * (m+1-k)`.
pub const DEFAULT_MAX_VARS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveMode {
    /// Pin the flow value to F* and maximize theta.
    #[default]
    TwoPhase,
    /// Maximize flow value plus theta in one LP.
    Combined,
}

/// What a model variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarRole {
    Flow(ArcId),
    Theta,
    Adaptive { scenario: usize, arc: ArcId },
}

/// Index bookkeeping between the LP and the network.
#[derive(Debug, Clone)]
pub struct ModelMap {
    scenarios: ScenarioIndex,
    vertices: usize,
    /// m + 1
    arcs: usize,
    /// Surviving arcs per scenario, m + 1 - k.
    block: usize,
    pub conservation_rows: Range<usize>,
    pub capacity_rows: Range<usize>,
    pub scenario_conservation_rows: Range<usize>,
    pub coupling_rows: Range<usize>,
    pub guarantee_rows: Range<usize>,
    pub pin_row: Option<usize>,
}

impl ModelMap {
    pub fn scenarios(&self) -> &ScenarioIndex {
        &self.scenarios
    }

    pub fn flow_var(&self, a: ArcId) -> usize {
        a.index()
    }

    pub fn theta_var(&self) -> usize {
        self.arcs
    }

    fn block_start(&self, scenario: usize) -> usize {
        self.arcs + 1 + scenario * self.block
    }

    /// Variable of arc `a` in scenario `scenario`, or `None` if `a` is destroyed there.
    pub fn scenario_var(&self, scenario: usize, a: ArcId) -> Option<usize> {
        let destroyed = self.scenarios.subset(scenario);
        scenario_slot(&destroyed, a).map(|slot| self.block_start(scenario) + slot)
    }

    pub fn variable_count(&self) -> usize {
        self.arcs + 1 + self.scenarios.len() * self.block
    }

    pub fn conservation_row_count(&self) -> usize {
        self.conservation_rows.len() + self.scenario_conservation_rows.len()
    }

    pub fn role(&self, var: usize) -> VarRole {
        if var < self.arcs {
            return VarRole::Flow(ArcId::from_index(var));
        }
        if var == self.arcs {
            return VarRole::Theta;
        }
        let offset = var - self.arcs - 1;
        let scenario = offset / self.block;
        let slot = offset % self.block;
        let destroyed = self.scenarios.subset(scenario);
        let arc = (1..=self.arcs)
            .map(ArcId)
            .filter(|a| destroyed.binary_search(a).is_err())
            .nth(slot)
            .expect("slot within block");
        VarRole::Adaptive { scenario, arc }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }
}

/// Position of `a` among the arcs surviving `destroyed` (sorted), if it survives.
fn scenario_slot(destroyed: &[ArcId], a: ArcId) -> Option<usize> {
    match destroyed.binary_search(&a) {
        Ok(_) => None,
        Err(before) => Some(a.index() - before),
    }
}

/// `(m+1) + 1 + C(m,k) * (m+1-k)`, the model's variable count.
pub fn expected_variable_count(m: usize, k: usize) -> Option<usize> {
    let scenarios = usize::try_from(binomial(m, k)?).ok()?;
    scenarios.checked_mul(m + 1 - k.min(m + 1))?.checked_add(m + 2)
}

fn check_size(m: usize, k: usize, max_vars: usize) -> Result<()> {
    let scenario_vars =
        binomial(m, k).and_then(|c| c.checked_mul((m + 1 - k) as u64)).unwrap_or(u64::MAX);
    if scenario_vars > max_vars as u64 {
        let shown = if scenario_vars == u64::MAX { "more than 2^64".to_string() } else { scenario_vars.to_string() };
        return Err(Error::Budget(format!(
            "model needs {shown} scenario variables (C({m},{k}) * {}), above the cap of {max_vars}; \
             the model grows like m^(k+1), raise --max-vars or lower k",
            m + 1 - k
        )));
    }
    Ok(())
}

/// Builds the LP. `fstar` is required in two-phase mode and ignored otherwise.
pub fn build_model(
    net: &Network,
    k: usize,
    mode: ObjectiveMode,
    fstar: Option<&Rational>,
    max_vars: usize,
) -> Result<(LinearProgram, ModelMap)> {
    let m = net.arc_count();
    let scenarios = ScenarioIndex::new(m, k)?;
    check_size(m, k, max_vars)?;
    let fstar = match (mode, fstar) {
        (ObjectiveMode::TwoPhase, None) => {
            return Err(Error::invalid("two-phase mode needs the maximum flow value"))
        }
        (_, f) => f,
    };

    let n = net.vertex_count();
    let arcs = m + 1;
    let dummy = net.dummy_arc();
    let mut lp = LinearProgram::new();

    for (a, _) in net.arcs() {
        lp.add_variable(format!("phi[{a}]"));
    }
    let theta = lp.add_variable("theta");
    let mut blocks: Vec<Vec<ArcId>> = Vec::with_capacity(scenarios.len());
    for (i, destroyed) in scenarios.iter().enumerate() {
        for (a, _) in net.arcs() {
            if destroyed.binary_search(&a).is_err() {
                lp.add_variable(format!("phi{}[{a}]", i + 1));
            }
        }
        blocks.push(destroyed);
    }

    let conservation = |lp: &mut LinearProgram, var_of: &dyn Fn(ArcId) -> Option<usize>| {
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
        for (a, arc) in net.arcs() {
            if let Some(v) = var_of(a) {
                rows[arc.tail].push((v, Rational::one()));
                rows[arc.head].push((v, -Rational::one()));
            }
        }
        for row in rows {
            lp.add_constraint(row, Relation::Eq, Rational::zero());
        }
    };

    let start = lp.constraints().len();
    conservation(&mut lp, &|a| Some(a.index()));
    let conservation_rows = start..lp.constraints().len();

    let start = lp.constraints().len();
    for (a, arc) in net.real_arcs() {
        let cap = arc.capacity.finite().expect("real arcs are finite").clone();
        lp.add_constraint(vec![(a.index(), Rational::one())], Relation::Le, cap);
    }
    let capacity_rows = start..lp.constraints().len();

    let block = arcs - k;
    let block_start = |i: usize| arcs + 1 + i * block;

    let start = lp.constraints().len();
    for (i, destroyed) in blocks.iter().enumerate() {
        let base = block_start(i);
        conservation(&mut lp, &|a| scenario_slot(destroyed, a).map(|s| base + s));
    }
    let scenario_conservation_rows = start..lp.constraints().len();

    let start = lp.constraints().len();
    for (i, destroyed) in blocks.iter().enumerate() {
        let base = block_start(i);
        for (a, _) in net.arcs() {
            if let Some(slot) = scenario_slot(destroyed, a) {
                lp.add_constraint(
                    vec![(base + slot, Rational::one()), (a.index(), -Rational::one())],
                    Relation::Le,
                    Rational::zero(),
                );
            }
        }
    }
    let coupling_rows = start..lp.constraints().len();

    let start = lp.constraints().len();
    for (i, destroyed) in blocks.iter().enumerate() {
        let ts = block_start(i) + scenario_slot(destroyed, dummy).expect("return arc survives");
        lp.add_constraint(
            vec![(ts, Rational::one()), (theta, -Rational::one())],
            Relation::Ge,
            Rational::zero(),
        );
    }
    let guarantee_rows = start..lp.constraints().len();

    let pin_row = match (mode, fstar) {
        (ObjectiveMode::TwoPhase, Some(f)) => {
            Some(lp.add_constraint(vec![(dummy.index(), Rational::one())], Relation::Eq, f.clone()))
        }
        _ => None,
    };

    lp.set_objective(theta, Rational::one());
    if mode == ObjectiveMode::Combined {
        lp.set_objective(dummy.index(), Rational::one());
    }

    let map = ModelMap {
        scenarios,
        vertices: n,
        arcs,
        block,
        conservation_rows,
        capacity_rows,
        scenario_conservation_rows,
        coupling_rows,
        guarantee_rows,
        pin_row,
    };
    debug_assert_eq!(lp.num_vars(), map.variable_count());
    Ok((lp, map))
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: ObjectiveMode,
    /// Run the exhaustive attacker on the result.
    pub certify: bool,
    pub max_vars: usize,
    pub attack: AttackOptions,
    pub simplex: SimplexOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: ObjectiveMode::TwoPhase,
            certify: true,
            max_vars: DEFAULT_MAX_VARS,
            attack: AttackOptions::default(),
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub fstar: Duration,
    pub build: Duration,
    pub solve: Duration,
    pub certify: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub flow: Flow,
    pub fstar: Rational,
    pub theta: Rational,
    pub loss: Rational,
    pub mode: ObjectiveMode,
    pub certified: bool,
    /// Empty unless certification ran.
    pub worst_attack: Vec<ArcId>,
    /// Why certification did not run or did not confirm, if it did not.
    pub certification_note: Option<String>,
    pub scenarios: usize,
    pub variables: usize,
    pub lp_stats: SimplexStats,
    pub timings: PhaseTimings,
}

/// Computes a maximum flow minimizing the worst-case loss over all `k`-arc attacks.
pub fn solve_kamrfp(net: &Network, k: usize, options: &SolveOptions) -> Result<Solution> {
    let m = net.arc_count();
    let scenarios = ScenarioIndex::new(m, k)?;
    check_size(m, k, options.max_vars)?;
    let variables = expected_variable_count(m, k).expect("size checked");
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let base = max_flow(net, None, &ArcSet::new());
    let fstar = base.value.clone();
    timings.fstar = t.elapsed();

    let mut sol = if fstar.is_zero() {
        Solution {
            flow: base.flow,
            fstar: fstar.clone(),
            theta: Rational::zero(),
            loss: Rational::zero(),
            mode: options.mode,
            certified: false,
            worst_attack: Vec::new(),
            certification_note: None,
            scenarios: scenarios.len(),
            variables,
            lp_stats: SimplexStats::default(),
            timings,
        }
    } else {
        let t = Instant::now();
        let (lp, map) = build_model(net, k, options.mode, Some(&fstar), options.max_vars)?;
        timings.build = t.elapsed();

        let t = Instant::now();
        let (outcome, lp_stats) = solve_lp_with(&lp, &options.simplex);
        timings.solve = t.elapsed();
        let lp_sol = match outcome {
            LpOutcome::Optimal(s) => s,
            other => {
                return Err(Error::Invariant(format!("k-arc model reported {other:?}; it is always feasible and bounded")))
            }
        };
        let flow = Flow::from_values(lp_sol.values[..=m].to_vec());
        let theta = lp_sol.values[map.theta_var()].clone();
        flow.validate(net).map_err(|e| Error::Invariant(format!("LP flow is not feasible: {e}")))?;
        if flow.value() != &fstar {
            return Err(Error::Invariant(format!(
                "{:?} mode returned flow value {} but the maximum flow value is {fstar}",
                options.mode,
                flow.value()
            )));
        }
        if theta.is_negative() || theta > fstar {
            return Err(Error::Invariant(format!("theta {theta} outside [0, {fstar}]")));
        }
        // With theta = 0 every maximum flow is optimal; prefer the one that
        // is most robust against fewer destroyed arcs.
        let flow = if theta.is_zero() && k > 1 {
            let fewer = SolveOptions { certify: false, ..options.clone() };
            solve_kamrfp(net, k - 1, &fewer)?.flow
        } else {
            flow
        };
        Solution {
            loss: &fstar - &theta,
            flow,
            fstar: fstar.clone(),
            theta,
            mode: options.mode,
            certified: false,
            worst_attack: Vec::new(),
            certification_note: None,
            scenarios: map.scenarios().len(),
            variables: lp.num_vars(),
            lp_stats,
            timings,
        }
    };

    if options.certify {
        let t = Instant::now();
        match attack::certify(net, &mut sol, k, &options.attack) {
            Ok(true) => {}
            Ok(false) => {
                sol.certification_note = Some("exhaustive attack disagrees with theta".into())
            }
            Err(e @ Error::Budget(_)) => sol.certification_note = Some(e.to_string()),
            Err(e) => return Err(e),
        }
        sol.timings.certify = t.elapsed();
    } else {
        sol.certification_note = Some("certification skipped".into());
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::two_branch_instance;
    use crate::network::InputFormat;

    fn net(text: &str) -> Network {
        Network::parse(text, InputFormat::Dimacs).unwrap()
    }

    #[test]
    fn two_branch_instance_model_size() {
        let g = two_branch_instance(4);
        let (lp, map) = build_model(&g, 1, ObjectiveMode::TwoPhase, Some(&4.into()), DEFAULT_MAX_VARS).unwrap();
        assert_eq!(lp.num_vars(), 44);
        assert_eq!(map.variable_count(), 44);
        assert_eq!(expected_variable_count(6, 1), Some(44));
        assert_eq!(map.scenario_conservation_rows.len(), 18);
        assert_eq!(map.conservation_row_count(), 3 * 7);
        assert_eq!(map.capacity_rows.len(), 6);
        assert_eq!(map.coupling_rows.len(), 36);
        assert_eq!(map.guarantee_rows.len(), 6);
        assert!(map.pin_row.is_some());
    }

    #[test]
    fn variable_roles_round_trip() {
        let g = two_branch_instance(4);
        let (lp, map) = build_model(&g, 2, ObjectiveMode::Combined, None, DEFAULT_MAX_VARS).unwrap();
        assert!(map.pin_row.is_none());
        for var in 0..lp.num_vars() {
            let back = match map.role(var) {
                VarRole::Flow(a) => map.flow_var(a),
                VarRole::Theta => map.theta_var(),
                VarRole::Adaptive { scenario, arc } => {
                    assert!(!map.scenarios().subset(scenario).contains(&arc));
                    map.scenario_var(scenario, arc).unwrap()
                }
            };
            assert_eq!(back, var);
        }
        // scenario 0 destroys arcs {1, 2}
        assert_eq!(map.scenario_var(0, ArcId(1)), None);
        assert_eq!(map.scenario_var(0, ArcId(3)), Some(8));
    }

    #[test]
    fn build_errors() {
        let g = two_branch_instance(4);
        assert!(matches!(build_model(&g, 0, ObjectiveMode::Combined, None, DEFAULT_MAX_VARS), Err(Error::Invalid(_))));
        assert!(matches!(build_model(&g, 7, ObjectiveMode::Combined, None, DEFAULT_MAX_VARS), Err(Error::Invalid(_))));
        assert!(matches!(build_model(&g, 1, ObjectiveMode::TwoPhase, None, DEFAULT_MAX_VARS), Err(Error::Invalid(_))));
        let err = build_model(&g, 2, ObjectiveMode::Combined, None, 10).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert!(err.to_string().contains("m^(k+1)"), "{err}");
    }

    #[test]
    fn single_arc_loses_everything() {
        let g = net("p max 2 1\nn 1 s\nn 2 t\na 1 2 5\n");
        let (lp, map) = build_model(&g, 1, ObjectiveMode::TwoPhase, Some(&5.into()), DEFAULT_MAX_VARS).unwrap();
        assert_eq!(map.scenarios().len(), 1);
        // phi[1], phi[2], theta, phi1[2]
        assert_eq!(lp.num_vars(), 4);
        assert_eq!(map.role(3), VarRole::Adaptive { scenario: 0, arc: ArcId(2) });
        let sol = solve_kamrfp(&g, 1, &SolveOptions::default()).unwrap();
        assert_eq!(sol.theta, Rational::zero());
        assert_eq!(sol.loss, 5.into());
        assert!(sol.certified);
        assert_eq!(sol.worst_attack, vec![ArcId(1)]);
    }

    #[test]
    fn two_branch_instance_k1_and_k2() {
        let g = two_branch_instance(4);
        for mode in [ObjectiveMode::TwoPhase, ObjectiveMode::Combined] {
            let opts = SolveOptions { mode, ..Default::default() };
            let sol = solve_kamrfp(&g, 1, &opts).unwrap();
            assert_eq!((sol.fstar.clone(), sol.theta.clone(), sol.loss.clone()), (4.into(), 2.into(), 2.into()));
            let expect: Vec<Rational> = [1, 1, 1, 1, 2, 2, 4].into_iter().map(Rational::from).collect();
            assert_eq!(sol.flow.values(), expect.as_slice());
            assert!(sol.certified, "{:?}", sol.certification_note);
            assert_eq!(sol.worst_attack, vec![ArcId(5)]);

            let sol = solve_kamrfp(&g, 2, &opts).unwrap();
            assert_eq!(sol.theta, Rational::zero());
            assert_eq!(sol.loss, 4.into());
            assert!(sol.certified);
            assert_eq!(sol.worst_attack, vec![ArcId(5), ArcId(6)]);
        }
    }

    #[test]
    fn parallel_arcs_unique_flow() {
        let g = net("p max 2 2\nn 1 s\nn 2 t\na 1 2 1\na 1 2 2\n");
        let sol = solve_kamrfp(&g, 1, &SolveOptions::default()).unwrap();
        assert_eq!(sol.flow.values(), &[1.into(), 2.into(), 3.into()]);
        assert_eq!(sol.theta, 1.into());
        assert_eq!(sol.loss, 2.into());
        assert_eq!(sol.worst_attack, vec![ArcId(2)]);
    }

    #[test]
    fn full_destruction_and_no_path() {
        let g = two_branch_instance(2);
        let sol = solve_kamrfp(&g, 4, &SolveOptions::default()).unwrap();
        assert_eq!(sol.theta, Rational::zero());
        assert_eq!(sol.scenarios, 1);

        let g = net("p max 3 1\nn 1 s\nn 3 t\na 1 2 4\n");
        let sol = solve_kamrfp(&g, 1, &SolveOptions::default()).unwrap();
        assert_eq!((sol.fstar.clone(), sol.theta.clone(), sol.loss.clone()), (0.into(), 0.into(), 0.into()));
        assert!(sol.certified);
        assert!(sol.worst_attack.is_empty());
    }

    #[test]
    fn no_certify_is_explicit() {
        let g = two_branch_instance(4);
        let sol = solve_kamrfp(&g, 1, &SolveOptions { certify: false, ..Default::default() }).unwrap();
        assert!(!sol.certified);
        assert!(sol.worst_attack.is_empty());
        assert_eq!(sol.theta, 2.into());
    }
}

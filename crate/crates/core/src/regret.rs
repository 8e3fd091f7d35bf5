//! Scenario baselines and the min-max regret pipelines.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulation::{
    build_ccu, build_nc, build_ocu, build_scenario_deterministic, equation_of, h_name, i_name, r_name, t_name,
    x_name, y_name, z_name, DistributionCost, ModelKind, ModelOptions, OcuObjective, MAX_REGRET,
};
use crate::instance::Instance;
use crate::milp::{solve_milp, Solution};
use crate::model::LinearModel;

/// Per-scenario optima `L*_s` and the designs attaining them.
#[derive(Debug, Clone)]
pub struct ScenarioBaseline {
    values: Vec<f64>,
    witnesses: Vec<Solution>,
}

impl ScenarioBaseline {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn witnesses(&self) -> &[Solution] {
        &self.witnesses
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Solves the deterministic model of every scenario to optimality.
pub fn compute_baselines(inst: &Instance, opts: &ModelOptions) -> Result<ScenarioBaseline> {
    let mut values = Vec::with_capacity(inst.scenario_count());
    let mut witnesses = Vec::with_capacity(inst.scenario_count());
    for s in 0..inst.scenario_count() {
        let model = build_scenario_deterministic(inst, s, opts);
        let sol = solve_milp(&model)?;
        if !sol.is_optimal() {
            return Err(Error::InfeasibleScenario { scenario: s });
        }
        values.push(sol.objective);
        witnesses.push(sol);
    }
    Ok(ScenarioBaseline { values, witnesses })
}

/// Result of a CCU or OCU solve.
#[derive(Debug, Clone)]
pub struct RegretSolution {
    pub kind: ModelKind,
    pub options: ModelOptions,
    pub baselines: ScenarioBaseline,
    pub model: LinearModel,
    pub solution: Solution,
    /// `R_s` as reported by the solver.
    pub regrets: Vec<f64>,
    /// `R*`, the optimal objective.
    pub max_regret: f64,
    /// Scenario costs of the chosen design, replayed with [`evaluate_design`].
    pub scenario_costs: Vec<f64>,
}

impl RegretSolution {
    pub fn is_optimal(&self) -> bool {
        self.solution.is_optimal()
    }
}

pub fn solve_ccu(inst: &Instance, opts: &ModelOptions) -> Result<RegretSolution> {
    let baselines = compute_baselines(inst, opts)?;
    solve_regret_with(inst, ModelKind::Ccu, baselines, opts)
}

pub fn solve_ocu(inst: &Instance, opts: &ModelOptions) -> Result<RegretSolution> {
    if inst.chains().len() < 2 {
        return Err(Error::ChainCount(inst.chains().len()));
    }
    let baselines = compute_baselines(inst, opts)?;
    solve_regret_with(inst, ModelKind::Ocu, baselines, opts)
}

/// Builds and solves CCU or OCU against precomputed baselines.
pub fn solve_regret_with(inst: &Instance, kind: ModelKind, baselines: ScenarioBaseline, opts: &ModelOptions) -> Result<RegretSolution> {
    let model = match kind {
        ModelKind::Ccu => build_ccu(inst, baselines.values(), opts)?,
        ModelKind::Ocu => build_ocu(inst, baselines.values(), opts)?,
        other => {
            return Err(Error::InvalidModel(format!("{other:?} is not a regret model")));
        }
    };
    let solution = solve_milp(&model)?;
    let (regrets, max_regret, scenario_costs) = if solution.is_optimal() {
        let design = Design::from_solution(&solution);
        let costs = (0..inst.scenario_count())
            .map(|s| evaluate_design(inst, &design, s, opts))
            .collect::<Result<Vec<_>>>()?;
        let regrets = (0..inst.scenario_count())
            .map(|s| solution.value(&r_name(s)).expect("R_s column"))
            .collect();
        (regrets, solution.value(MAX_REGRET).expect("R column"), costs)
    } else {
        (Vec::new(), f64::INFINITY, Vec::new())
    };
    Ok(RegretSolution {
        kind,
        options: *opts,
        baselines,
        model,
        solution,
        regrets,
        max_regret,
        scenario_costs,
    })
}

/// A fixed design: hub decisions and flows, by variable name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Design {
    pub values: HashMap<String, f64>,
}

impl Design {
    pub fn from_solution(sol: &Solution) -> Self {
        Self {
            values: sol.names.iter().cloned().zip(sol.values.iter().copied()).collect(),
        }
    }

    fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    pub fn has_hub_split(&self) -> bool {
        self.values.contains_key("T[0]")
    }
}

/// Cost of a fixed design under scenario `s`.
///
/// The design is first checked against the flow rows (and the collaboration
/// rows when it carries `I`/`T` values). The cost is then summed directly
/// from the instance data, without going through any model objective.
pub fn evaluate_design(inst: &Instance, design: &Design, s: usize, opts: &ModelOptions) -> Result<f64> {
    if s >= inst.scenario_count() {
        return Err(Error::InvalidModel(format!("scenario {s} out of range")));
    }
    let structure = if design.has_hub_split() {
        build_ocu(inst, &vec![0.0; inst.scenario_count()], opts)?
    } else {
        build_nc(inst, opts)
    };
    let values: Vec<f64> = structure.variables().iter().map(|v| design.get(&v.name)).collect();
    let violations: Vec<String> = structure
        .check_feasibility(&values)?
        .into_iter()
        .filter(|v| !matches!(equation_of(&v.label), Some(12 | 13 | 21)) && !v.label.starts_with("bound:R"))
        .map(|v| format!("{} by {:.3e}", v.label, v.amount))
        .collect();
    if !violations.is_empty() {
        return Err(Error::InfeasibleDesign(violations.join(", ")));
    }

    let n = inst.n();
    let mut cost = 0.0;
    for k in 0..n {
        let fs = inst.effective_setup(s, k);
        if design.has_hub_split() {
            cost += inst.setup(k) * design.get(&t_name(k));
            cost += match opts.ocu_objective {
                OcuObjective::AsWritten => fs * design.get(&h_name(k)),
                OcuObjective::CollaborativeSplit => fs * design.get(&i_name(k)),
            };
        } else {
            cost += fs * design.get(&h_name(k));
        }
    }
    for i in 0..n {
        for k in 0..n {
            cost += inst.chi() * inst.cost(i, k) * design.get(&z_name(i, k));
            for l in 0..n {
                cost += inst.alpha() * inst.cost(k, l) * design.get(&y_name(i, k, l));
            }
        }
        for l in 0..n {
            for j in 0..n {
                let c = match opts.distribution_cost {
                    DistributionCost::StandardClj => inst.cost(l, j),
                    DistributionCost::LiteralCij => inst.cost(i, j),
                };
                cost += inst.delta() * c * design.get(&x_name(i, l, j));
            }
        }
    }
    Ok(cost)
}

/// JSON regret report.
#[derive(Debug, Clone, Serialize)]
pub struct RegretReport {
    pub model: ModelKind,
    pub status: crate::milp::SolveStatus,
    pub options: ModelOptions,
    pub baselines: Vec<f64>,
    pub open_hubs: Vec<usize>,
    pub collaborative_hubs: Vec<usize>,
    pub noncollaborative_hubs: Vec<usize>,
    pub scenario_costs: Vec<f64>,
    pub regrets: Vec<f64>,
    pub max_regret: Option<f64>,
}

impl RegretReport {
    pub fn new(r: &RegretSolution) -> Self {
        Self {
            model: r.kind,
            status: r.solution.status,
            options: r.options,
            baselines: r.baselines.values().to_vec(),
            open_hubs: r.solution.open_hubs.clone(),
            collaborative_hubs: r.solution.collaborative_hubs.clone(),
            noncollaborative_hubs: r.solution.noncollaborative_hubs.clone(),
            scenario_costs: r.scenario_costs.clone(),
            regrets: r.regrets.clone(),
            max_regret: r.is_optimal().then_some(r.max_regret),
        }
    }
}

//! Model builders for the hub location formulations.
//!
//! Every builder starts from the same flow core: hub indicators `H[k]`,
//! collection flows `Z[i,k]`, transfer flows `Y[i,k,l]` and distribution
//! flows `X[i,l,j]` (all indexed by origin `i`), together with the rows
//! `eq2` .. `eq7`. Row labels carry the equation number they come from and
//! the index tuple, e.g. `eq5[i=2,k=0]`.
//!
//! | builder | objective | extra rows |
//! |---|---|---|
//! | [`build_nc`] | setup + flow | none |
//! | [`build_scenario_deterministic`] | scenario setup + flow | none |
//! | [`build_cc`] | epigraph `t` | `eq10[s]` |
//! | [`build_ccu`] | max regret `R` | `eq12[s]`, `eq13[s]` |
//! | [`build_ocu`] | max regret `R` | `eq21[s]`, `eq13[s]`, `eq15`..`eq20` |

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{LinearModel, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionCost {
    /// Charge `C[i][j]` on `X[i,l,j]`, as the objective is printed.
    LiteralCij,
    /// Charge the hub-to-destination distance `C[l][j]`.
    #[default]
    StandardClj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OcuObjective {
    /// `F_k T_k + F~_k H_k`: non-collaborative hubs pay their setup twice.
    #[default]
    AsWritten,
    /// `F_k T_k + F~_k I_k`: each open hub pays one setup cost.
    CollaborativeSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eq20Mode {
    Omit,
    /// `Y <= M(1 - T_k)` and `Y <= M(1 - T_l)`.
    #[default]
    Linearized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BigMMode {
    /// `M = sum_ij W_ij` on every row.
    TotalDemand,
    /// The smallest flow bound implied by the demand rows.
    #[default]
    PerConstraintTight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModelOptions {
    pub distribution_cost: DistributionCost,
    pub ocu_objective: OcuObjective,
    pub eq20_mode: Eq20Mode,
    pub big_m_mode: BigMMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nc,
    Cc,
    Ccu,
    Ocu,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Nc, ModelKind::Cc, ModelKind::Ccu, ModelKind::Ocu];

    pub fn needs_baselines(self) -> bool {
        matches!(self, ModelKind::Ccu | ModelKind::Ocu)
    }
}

/// Column positions of the flow core. Variables are laid out as
/// `H[k]`, `Z[i,k]`, `Y[i,k,l]`, `X[i,l,j]`, each block in lexicographic
/// index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreLayout {
    pub n: usize,
    h: usize,
    z: usize,
    y: usize,
    x: usize,
}

impl CoreLayout {
    pub fn h(&self, k: usize) -> usize {
        self.h + k
    }
    pub fn z(&self, i: usize, k: usize) -> usize {
        self.z + i * self.n + k
    }
    pub fn y(&self, i: usize, k: usize, l: usize) -> usize {
        self.y + (i * self.n + k) * self.n + l
    }
    pub fn x(&self, i: usize, l: usize, j: usize) -> usize {
        self.x + (i * self.n + l) * self.n + j
    }
}

pub fn h_name(k: usize) -> String {
    format!("H[{k}]")
}
pub fn z_name(i: usize, k: usize) -> String {
    format!("Z[{i},{k}]")
}
pub fn y_name(i: usize, k: usize, l: usize) -> String {
    format!("Y[{i},{k},{l}]")
}
pub fn x_name(i: usize, l: usize, j: usize) -> String {
    format!("X[{i},{l},{j}]")
}
pub fn i_name(k: usize) -> String {
    format!("I[{k}]")
}
pub fn t_name(k: usize) -> String {
    format!("T[{k}]")
}
pub fn r_name(s: usize) -> String {
    format!("R[{s}]")
}
pub const MAX_REGRET: &str = "R";
pub const EPIGRAPH: &str = "t";

/// Source equation number of a row label such as `eq5[i=0,k=1]`.
pub fn equation_of(label: &str) -> Option<u32> {
    let rest = label.strip_prefix("eq")?;
    let end = rest.find('[')?;
    rest[..end].parse().ok()
}

/// Adds the flow core (variables and rows `eq2`..`eq7`) to `m`.
pub fn add_core(m: &mut LinearModel, inst: &Instance) -> CoreLayout {
    let n = inst.n();
    let h = m.num_vars();
    for k in 0..n {
        m.add_binary(h_name(k));
    }
    let z = m.num_vars();
    for i in 0..n {
        for k in 0..n {
            m.add_continuous(z_name(i, k));
        }
    }
    let y = m.num_vars();
    for i in 0..n {
        for k in 0..n {
            for l in 0..n {
                m.add_continuous(y_name(i, k, l));
            }
        }
    }
    let x = m.num_vars();
    for i in 0..n {
        for l in 0..n {
            for j in 0..n {
                m.add_continuous(x_name(i, l, j));
            }
        }
    }
    let lay = CoreLayout { n, h, z, y, x };

    for i in 0..n {
        m.add_constraint(
            format!("eq2[i={i}]"),
            (0..n).map(|k| (lay.z(i, k), 1.0)),
            Relation::Eq,
            inst.origin_supply(i),
        );
    }
    for i in 0..n {
        for j in 0..n {
            m.add_constraint(
                format!("eq3[i={i},j={j}]"),
                (0..n).map(|l| (lay.x(i, l, j), 1.0)),
                Relation::Eq,
                inst.demand(i, j),
            );
        }
    }
    for k in 0..n {
        m.add_constraint(
            format!("eq4[k={k}]"),
            (0..n).map(|i| (lay.z(i, k), 1.0)).chain([(lay.h(k), -inst.capacity(k))]),
            Relation::Le,
            0.0,
        );
    }
    for i in 0..n {
        for k in 0..n {
            let out_y = (0..n).map(|l| (lay.y(i, k, l), 1.0));
            let out_x = (0..n).map(|j| (lay.x(i, k, j), 1.0));
            let in_y = (0..n).map(|l| (lay.y(i, l, k), -1.0));
            m.add_constraint(
                format!("eq5[i={i},k={k}]"),
                out_y.chain(out_x).chain(in_y).chain([(lay.z(i, k), -1.0)]),
                Relation::Eq,
                0.0,
            );
        }
    }
    for i in 0..n {
        for k in 0..n {
            m.add_constraint(
                format!("eq6[i={i},k={k}]"),
                [(lay.z(i, k), 1.0), (lay.h(k), -inst.origin_supply(i))],
                Relation::Le,
                0.0,
            );
        }
    }
    for l in 0..n {
        for j in 0..n {
            m.add_constraint(
                format!("eq7[l={l},j={j}]"),
                (0..n)
                    .map(|i| (lay.x(i, l, j), 1.0))
                    .chain([(lay.h(l), -inst.destination_demand(j))]),
                Relation::Le,
                0.0,
            );
        }
    }
    lay
}

/// Collection, transfer and distribution cost terms.
pub fn flow_cost_terms(inst: &Instance, lay: &CoreLayout, opts: &ModelOptions) -> Vec<(usize, f64)> {
    let n = inst.n();
    let mut terms = Vec::with_capacity(n * n + 2 * n * n * n);
    for i in 0..n {
        for k in 0..n {
            terms.push((lay.z(i, k), inst.chi() * inst.cost(i, k)));
        }
        for k in 0..n {
            for l in 0..n {
                terms.push((lay.y(i, k, l), inst.alpha() * inst.cost(k, l)));
            }
        }
        for l in 0..n {
            for j in 0..n {
                let c = match opts.distribution_cost {
                    DistributionCost::StandardClj => inst.cost(l, j),
                    DistributionCost::LiteralCij => inst.cost(i, j),
                };
                terms.push((lay.x(i, l, j), inst.delta() * c));
            }
        }
    }
    terms
}

/// The deterministic model with setup costs `F_k`.
pub fn build_nc(inst: &Instance, opts: &ModelOptions) -> LinearModel {
    let mut m = LinearModel::new();
    let lay = add_core(&mut m, inst);
    let setup = (0..inst.n()).map(|k| (lay.h(k), inst.setup(k)));
    m.set_objective(setup.chain(flow_cost_terms(inst, &lay, opts)));
    m
}

/// The deterministic model of scenario `s`, whose optimum is the baseline
/// `L*_s`.
pub fn build_scenario_deterministic(inst: &Instance, s: usize, opts: &ModelOptions) -> LinearModel {
    assert!(s < inst.scenario_count(), "scenario {s} out of range");
    let mut m = LinearModel::new();
    let lay = add_core(&mut m, inst);
    let setup = (0..inst.n()).map(|k| (lay.h(k), inst.effective_setup(s, k)));
    m.set_objective(setup.chain(flow_cost_terms(inst, &lay, opts)));
    m
}

/// Scenario cost `sum_k F~^s_k H_k + flow` written as terms.
fn scenario_cost_terms(inst: &Instance, s: usize, lay: &CoreLayout, flow: &[(usize, f64)]) -> Vec<(usize, f64)> {
    (0..inst.n())
        .map(|k| (lay.h(k), inst.effective_setup(s, k)))
        .chain(flow.iter().copied())
        .collect()
}

/// Min-max over scenarios, as `min t` with `t >= L_s` for every scenario.
pub fn build_cc(inst: &Instance, opts: &ModelOptions) -> LinearModel {
    let mut m = LinearModel::new();
    let lay = add_core(&mut m, inst);
    let t = m.add_free(EPIGRAPH);
    let flow = flow_cost_terms(inst, &lay, opts);
    for s in 0..inst.scenario_count() {
        let cost = scenario_cost_terms(inst, s, &lay, &flow);
        m.add_constraint(
            format!("eq10[s={s}]"),
            std::iter::once((t, 1.0)).chain(cost.into_iter().map(|(j, c)| (j, -c))),
            Relation::Ge,
            0.0,
        );
    }
    m.set_objective([(t, 1.0)]);
    m
}

fn check_baselines(inst: &Instance, baselines: &[f64]) -> Result<()> {
    if baselines.len() != inst.scenario_count() {
        return Err(Error::BaselineMissing {
            expected: inst.scenario_count(),
            got: baselines.len(),
        });
    }
    Ok(())
}

/// Adds `R[s]` for every scenario and `R`, and returns their indices.
fn add_regret_vars(m: &mut LinearModel, scenarios: usize) -> (Vec<usize>, usize) {
    let rs = (0..scenarios).map(|s| m.add_free(r_name(s))).collect();
    let r = m.add_free(MAX_REGRET);
    (rs, r)
}

fn add_eq13(m: &mut LinearModel, rs: &[usize], r: usize) {
    for (s, &rs_s) in rs.iter().enumerate() {
        m.add_constraint(format!("eq13[s={s}]"), [(r, 1.0), (rs_s, -1.0)], Relation::Ge, 0.0);
    }
}

/// Min-max regret against the per-scenario optima `baselines`.
pub fn build_ccu(inst: &Instance, baselines: &[f64], opts: &ModelOptions) -> Result<LinearModel> {
    check_baselines(inst, baselines)?;
    let mut m = LinearModel::new();
    let lay = add_core(&mut m, inst);
    let (rs, r) = add_regret_vars(&mut m, inst.scenario_count());
    let flow = flow_cost_terms(inst, &lay, opts);
    for (s, &rs_s) in rs.iter().enumerate() {
        let cost = scenario_cost_terms(inst, s, &lay, &flow);
        m.add_constraint(
            format!("eq12[s={s}]"),
            std::iter::once((rs_s, 1.0)).chain(cost.into_iter().map(|(j, c)| (j, -c))),
            Relation::Eq,
            -baselines[s],
        );
    }
    add_eq13(&mut m, &rs, r);
    m.set_objective([(r, 1.0)]);
    Ok(m)
}

/// One big-M row of the collaboration constraints, by index tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "eq", rename_all = "lowercase")]
pub enum BigMRow {
    /// `Z[i,k] <= M(1 - T_k)`.
    Eq16 { i: usize, k: usize },
    /// `X[i,l,j] <= M(1 - T_l)`.
    Eq17 { i: usize, l: usize, j: usize },
    /// `Y[i,k,l] <= M(1 - T_l)`.
    Eq18 { i: usize, k: usize, l: usize },
    /// `Y[i,k,l] <= M(1 - T_k)`.
    Eq19 { i: usize, k: usize, l: usize },
    /// `Y[i,k,l] <= M(1 - T_k)(1 - T_l)`.
    Eq20 { i: usize, k: usize, l: usize },
}

/// The constant `M` of a big-M row.
///
/// In tight mode this is the bound on the row's flow variable implied by the
/// demand rows: `O_i` for collection and transfer flows, `W_ij` for
/// distribution flows.
pub fn compute_big_m(inst: &Instance, row: BigMRow, mode: BigMMode) -> f64 {
    match mode {
        BigMMode::TotalDemand => inst.total_demand(),
        BigMMode::PerConstraintTight => match row {
            BigMRow::Eq16 { i, .. } | BigMRow::Eq18 { i, .. } | BigMRow::Eq19 { i, .. } | BigMRow::Eq20 { i, .. } => {
                inst.origin_supply(i)
            }
            BigMRow::Eq17 { i, j, .. } => inst.demand(i, j),
        },
    }
}

/// Index tuples of the collaboration rows, expanded over every ordered pair
/// of distinct chains and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OcuPatterns {
    pub eq16: BTreeSet<(usize, usize)>,
    pub eq17: BTreeSet<(usize, usize, usize)>,
    pub eq18: BTreeSet<(usize, usize, usize)>,
    pub eq19: BTreeSet<(usize, usize, usize)>,
    pub eq20: BTreeSet<(usize, usize, usize)>,
}

impl OcuPatterns {
    pub fn from_chains(chains: &[Vec<usize>]) -> Self {
        let mut p = Self::default();
        for (a, sa) in chains.iter().enumerate() {
            for (b, sb) in chains.iter().enumerate() {
                if a == b {
                    continue;
                }
                for &i in sa {
                    for &k in sb {
                        p.eq16.insert((i, k));
                    }
                    for &j in sa {
                        for &l in sb {
                            p.eq17.insert((i, l, j));
                        }
                    }
                    // eq18: i,k in SC_a, l in SC_b; eq19: i,l in SC_a, k in SC_b.
                    for &own in sa {
                        for &other in sb {
                            p.eq18.insert((i, own, other));
                            p.eq19.insert((i, other, own));
                        }
                    }
                    for &k in sb {
                        for &l in sb {
                            p.eq20.insert((i, k, l));
                        }
                    }
                }
            }
        }
        p
    }

    pub fn rows(&self, eq20_mode: Eq20Mode) -> Vec<BigMRow> {
        let mut rows: Vec<BigMRow> = Vec::new();
        rows.extend(self.eq16.iter().map(|&(i, k)| BigMRow::Eq16 { i, k }));
        rows.extend(self.eq17.iter().map(|&(i, l, j)| BigMRow::Eq17 { i, l, j }));
        rows.extend(self.eq18.iter().map(|&(i, k, l)| BigMRow::Eq18 { i, k, l }));
        rows.extend(self.eq19.iter().map(|&(i, k, l)| BigMRow::Eq19 { i, k, l }));
        if eq20_mode == Eq20Mode::Linearized {
            rows.extend(self.eq20.iter().map(|&(i, k, l)| BigMRow::Eq20 { i, k, l }));
        }
        rows
    }
}

/// Column positions of the OCU-only variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcuLayout {
    pub core: CoreLayout,
    pub regret: Vec<usize>,
    pub max_regret: usize,
    /// Empty in the I-eliminated variant.
    pub collaborative: Vec<usize>,
    pub noncollaborative: Vec<usize>,
}

/// Adds the rows of one big-M pattern. Returns the number of rows added.
fn add_big_m_rows(m: &mut LinearModel, inst: &Instance, lay: &CoreLayout, t: &[usize], row: BigMRow, mode: BigMMode) -> usize {
    let big_m = compute_big_m(inst, row, mode);
    let mut push = |label: String, flow: usize, tk: usize| {
        m.add_constraint(label, [(flow, 1.0), (t[tk], big_m)], Relation::Le, big_m);
    };
    match row {
        BigMRow::Eq16 { i, k } => push(format!("eq16[i={i},k={k}]"), lay.z(i, k), k),
        BigMRow::Eq17 { i, l, j } => push(format!("eq17[i={i},l={l},j={j}]"), lay.x(i, l, j), l),
        BigMRow::Eq18 { i, k, l } => push(format!("eq18[i={i},k={k},l={l}]"), lay.y(i, k, l), l),
        BigMRow::Eq19 { i, k, l } => push(format!("eq19[i={i},k={k},l={l}]"), lay.y(i, k, l), k),
        BigMRow::Eq20 { i, k, l } => {
            push(format!("eq20[i={i},k={k},l={l},on=k]"), lay.y(i, k, l), k);
            if k != l {
                push(format!("eq20[i={i},k={k},l={l},on=l]"), lay.y(i, k, l), l);
                return 2;
            }
        }
    }
    1
}

/// Collaborative model: CCU plus the collaborative/non-collaborative hub
/// split and the cross-chain big-M rows.
pub fn build_ocu(inst: &Instance, baselines: &[f64], opts: &ModelOptions) -> Result<LinearModel> {
    build_ocu_layout(inst, baselines, opts, true).map(|(m, _)| m)
}

/// OCU with `I_k` substituted by `H_k - T_k`: `eq15` becomes
/// `H_k - T_k >= 0` and the `I` columns disappear.
pub fn build_ocu_without_i(inst: &Instance, baselines: &[f64], opts: &ModelOptions) -> Result<LinearModel> {
    build_ocu_layout(inst, baselines, opts, false).map(|(m, _)| m)
}

pub fn build_ocu_layout(
    inst: &Instance,
    baselines: &[f64],
    opts: &ModelOptions,
    with_i: bool,
) -> Result<(LinearModel, OcuLayout)> {
    if inst.chains().len() < 2 {
        return Err(Error::ChainCount(inst.chains().len()));
    }
    check_baselines(inst, baselines)?;
    let n = inst.n();
    let mut m = LinearModel::new();
    let lay = add_core(&mut m, inst);
    let (rs, r) = add_regret_vars(&mut m, inst.scenario_count());
    let ivars: Vec<usize> = if with_i { (0..n).map(|k| m.add_binary(i_name(k))).collect() } else { vec![] };
    let tvars: Vec<usize> = (0..n).map(|k| m.add_binary(t_name(k))).collect();

    let flow = flow_cost_terms(inst, &lay, opts);
    for (s, &rs_s) in rs.iter().enumerate() {
        let mut cost: Vec<(usize, f64)> = Vec::with_capacity(flow.len() + 3 * n);
        for k in 0..n {
            let fs = inst.effective_setup(s, k);
            cost.push((tvars[k], inst.setup(k)));
            match opts.ocu_objective {
                OcuObjective::AsWritten => cost.push((lay.h(k), fs)),
                OcuObjective::CollaborativeSplit if with_i => cost.push((ivars[k], fs)),
                OcuObjective::CollaborativeSplit => {
                    cost.push((lay.h(k), fs));
                    cost.push((tvars[k], -fs));
                }
            }
        }
        cost.extend_from_slice(&flow);
        m.add_constraint(
            format!("eq21[s={s}]"),
            std::iter::once((rs_s, 1.0)).chain(cost.into_iter().map(|(j, c)| (j, -c))),
            Relation::Eq,
            -baselines[s],
        );
    }
    add_eq13(&mut m, &rs, r);

    for k in 0..n {
        if with_i {
            m.add_constraint(
                format!("eq15[k={k}]"),
                [(lay.h(k), 1.0), (ivars[k], -1.0), (tvars[k], -1.0)],
                Relation::Eq,
                0.0,
            );
        } else {
            m.add_constraint(format!("eq15[k={k}]"), [(lay.h(k), 1.0), (tvars[k], -1.0)], Relation::Ge, 0.0);
        }
    }

    let patterns = OcuPatterns::from_chains(inst.chains());
    for row in patterns.rows(opts.eq20_mode) {
        add_big_m_rows(&mut m, inst, &lay, &tvars, row, opts.big_m_mode);
    }
    m.set_objective([(r, 1.0)]);
    Ok((
        m,
        OcuLayout {
            core: lay,
            regret: rs,
            max_regret: r,
            collaborative: ivars,
            noncollaborative: tvars,
        },
    ))
}

/// Builds the model of `kind`. CCU and OCU need `baselines`.
pub fn build_model(inst: &Instance, kind: ModelKind, baselines: Option<&[f64]>, opts: &ModelOptions) -> Result<LinearModel> {
    let need = || baselines.ok_or(Error::BaselineMissing { expected: inst.scenario_count(), got: 0 });
    match kind {
        ModelKind::Nc => Ok(build_nc(inst, opts)),
        ModelKind::Cc => Ok(build_cc(inst, opts)),
        ModelKind::Ccu => build_ccu(inst, need()?, opts),
        ModelKind::Ocu => build_ocu(inst, need()?, opts),
    }
}

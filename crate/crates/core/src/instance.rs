//! Problem data for the capacitated multiple-allocation hub location models.
//!
//! An [`Instance`] is built from an [`InstanceData`] (the serde view of the
//! instance file) and is validated once at construction. After that it is
//! read-only, so it can be shared freely between threads.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One realization of the supplementary setup costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub supplement: Vec<f64>,
}

/// Raw, unvalidated instance contents. Field names match the instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceData {
    pub n: usize,
    pub demand: Vec<Vec<f64>>,
    pub cost: Vec<Vec<f64>>,
    pub setup: Vec<f64>,
    pub capacity: Vec<f64>,
    pub chi: f64,
    pub alpha: f64,
    pub delta: f64,
    pub scenarios: Vec<Scenario>,
    pub chains: Vec<Vec<usize>>,
}

/// A validated hub location instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    data: InstanceData,
}

impl TryFrom<InstanceData> for Instance {
    type Error = Error;

    fn try_from(data: InstanceData) -> Result<Self> {
        validate(&data)?;
        Ok(Self { data })
    }
}

impl Instance {
    pub fn new(data: InstanceData) -> Result<Self> {
        Self::try_from(data)
    }

    pub fn data(&self) -> &InstanceData {
        &self.data
    }

    /// Clones the underlying data, e.g. to derive a modified instance.
    pub fn to_data(&self) -> InstanceData {
        self.data.clone()
    }

    pub fn n(&self) -> usize {
        self.data.n
    }

    pub fn demand(&self, i: usize, j: usize) -> f64 {
        self.data.demand[i][j]
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.data.cost[i][j]
    }

    pub fn setup(&self, k: usize) -> f64 {
        self.data.setup[k]
    }

    pub fn capacity(&self, k: usize) -> f64 {
        self.data.capacity[k]
    }

    pub fn chi(&self) -> f64 {
        self.data.chi
    }

    pub fn alpha(&self) -> f64 {
        self.data.alpha
    }

    pub fn delta(&self) -> f64 {
        self.data.delta
    }

    pub fn scenario_count(&self) -> usize {
        self.data.scenarios.len()
    }

    pub fn supplement(&self, s: usize, k: usize) -> f64 {
        self.data.scenarios[s].supplement[k]
    }

    /// Setup cost of hub `k` in scenario `s`, including the supplement.
    pub fn effective_setup(&self, s: usize, k: usize) -> f64 {
        self.data.setup[k] + self.data.scenarios[s].supplement[k]
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.data.chains
    }

    /// Total flow leaving origin `i`, `O_i = sum_j W_ij`.
    pub fn origin_supply(&self, i: usize) -> f64 {
        self.data.demand[i].iter().sum()
    }

    /// Total flow arriving at destination `j`.
    pub fn destination_demand(&self, j: usize) -> f64 {
        self.data.demand.iter().map(|row| row[j]).sum()
    }

    pub fn total_demand(&self) -> f64 {
        self.data.demand.iter().flatten().sum()
    }

    pub fn has_zero_supplements(&self) -> bool {
        self.data
            .scenarios
            .iter()
            .all(|s| s.supplement.iter().all(|&v| v == 0.0))
    }
}

fn validate(d: &InstanceData) -> Result<()> {
    let n = d.n;
    let fail = |msg: String| Err(Error::Validation(msg));
    if n == 0 {
        return fail("node count must be positive".into());
    }
    check_matrix("demand", &d.demand, n)?;
    check_matrix("cost", &d.cost, n)?;
    check_vector("setup", &d.setup, n)?;
    check_vector("capacity", &d.capacity, n)?;

    for (i, row) in d.demand.iter().enumerate() {
        if let Some(j) = row.iter().position(|&w| w < 0.0) {
            return fail(format!("demand must be nonnegative (W[{i}][{j}] = {})", row[j]));
        }
    }
    for (i, row) in d.cost.iter().enumerate() {
        if let Some(j) = row.iter().position(|&c| c < 0.0) {
            return fail(format!("cost must be nonnegative (C[{i}][{j}] = {})", row[j]));
        }
        if row[i] != 0.0 {
            return fail(format!("cost diagonal must be zero (C[{i}][{i}] = {})", row[i]));
        }
    }
    if let Some(k) = d.setup.iter().position(|&f| f < 0.0) {
        return fail(format!("setup cost must be nonnegative (F[{k}] = {})", d.setup[k]));
    }
    if let Some(k) = d.capacity.iter().position(|&g| g <= 0.0) {
        return fail(format!("capacity must be positive (capacity[{k}] = {})", d.capacity[k]));
    }
    for (name, v) in [("chi", d.chi), ("alpha", d.alpha), ("delta", d.delta)] {
        if !v.is_finite() || v <= 0.0 || v > 10.0 {
            return fail(format!("{name} must lie in (0, 10], got {v}"));
        }
    }

    if d.scenarios.is_empty() {
        return fail("at least one scenario is required".into());
    }
    for (s, sc) in d.scenarios.iter().enumerate() {
        check_vector(&format!("scenarios[{s}].supplement"), &sc.supplement, n)?;
        for k in 0..n {
            if d.setup[k] + sc.supplement[k] < 0.0 {
                return fail(format!(
                    "effective setup cost must be nonnegative (F[{k}] + sigma[{s}][{k}] = {})",
                    d.setup[k] + sc.supplement[k]
                ));
            }
        }
    }

    if d.chains.is_empty() {
        return fail("at least one chain is required".into());
    }
    let mut seen: Vec<BTreeSet<usize>> = Vec::with_capacity(d.chains.len());
    let mut covered = vec![false; n];
    for (a, chain) in d.chains.iter().enumerate() {
        if chain.is_empty() {
            return fail(format!("chain {a} is empty"));
        }
        let set: BTreeSet<usize> = chain.iter().copied().collect();
        if set.len() != chain.len() {
            return fail(format!("chain {a} lists a node twice"));
        }
        if let Some(&bad) = set.iter().find(|&&v| v >= n) {
            return fail(format!("chain {a} references node {bad}, but n = {n}"));
        }
        if let Some(b) = seen.iter().position(|other| *other == set) {
            return fail(format!("chains {b} and {a} are identical"));
        }
        for &v in &set {
            covered[v] = true;
        }
        seen.push(set);
    }
    if let Some(missing) = covered.iter().position(|c| !c) {
        return fail(format!("chain union must cover all nodes (node {missing} is in no chain)"));
    }
    Ok(())
}

fn check_matrix(name: &str, m: &[Vec<f64>], n: usize) -> Result<()> {
    if m.len() != n {
        return Err(Error::Validation(format!("{name} must have {n} rows, got {}", m.len())));
    }
    for (i, row) in m.iter().enumerate() {
        check_vector(&format!("{name}[{i}]"), row, n)?;
    }
    Ok(())
}

fn check_vector(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Validation(format!("{name} must have {n} entries, got {}", v.len())));
    }
    if let Some(p) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("{name}[{p}] is not finite")));
    }
    Ok(())
}

/// Parses and validates an instance file.
pub fn load_instance(text: &str) -> Result<Instance> {
    let data: InstanceData = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Instance::new(data)
}

/// Serializes an instance to the JSON file format.
pub fn save_instance(inst: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(inst.data()).expect("instance data is plain JSON");
    text.push('\n');
    text
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Distances between uniformly drawn points in a 100 x 100 square.
    Euclidean,
    /// Independent uniform costs, symmetric, zero diagonal.
    Uniform,
}

/// Parameters of the seeded instance generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub chain_count: usize,
    pub overlap_fraction: f64,
    pub scenario_count: usize,
    pub demand_density: f64,
    pub cost_mode: CostMode,
    pub capacity_tightness: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 4,
            chain_count: 2,
            overlap_fraction: 0.0,
            scenario_count: 2,
            demand_density: 0.5,
            cost_mode: CostMode::Euclidean,
            capacity_tightness: 0.6,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return fail("n must be positive".into());
        }
        if self.chain_count == 0 {
            return fail("chain_count must be at least 1".into());
        }
        if self.chain_count > self.n {
            return fail(format!(
                "chain_count ({}) exceeds node count ({})",
                self.chain_count, self.n
            ));
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return fail("overlap_fraction must lie in [0, 1]".into());
        }
        if self.scenario_count == 0 {
            return fail("scenario_count must be at least 1".into());
        }
        if !(self.demand_density > 0.0 && self.demand_density <= 1.0) {
            return fail("demand_density must lie in (0, 1]".into());
        }
        if !(self.capacity_tightness > 0.0 && self.capacity_tightness <= 1.0) {
            return fail("capacity_tightness must lie in (0, 1]".into());
        }
        Ok(())
    }
}

// Rounds to two decimals so generated files stay readable.
fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Draws a random instance. The result depends only on `cfg`.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let cost = match cfg.cost_mode {
        CostMode::Euclidean => {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                            round2((dx * dx + dy * dy).sqrt())
                        })
                        .collect()
                })
                .collect()
        }
        CostMode::Uniform => {
            let mut c = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = round2(rng.gen_range(1.0..100.0));
                    c[i][j] = v;
                    c[j][i] = v;
                }
            }
            c
        }
    };

    let mut demand = vec![vec![0.0; n]; n];
    for (i, row) in demand.iter_mut().enumerate() {
        for (j, w) in row.iter_mut().enumerate() {
            if i != j && rng.gen_bool(cfg.demand_density) {
                *w = rng.gen_range(1..=20) as f64;
            }
        }
    }
    let total: f64 = demand.iter().flatten().sum();

    // Setup costs on the scale of one hub's share of the flow cost, so the
    // hub choice reacts to the scenario supplements.
    let scale = (10.0 * total / n as f64).max(100.0);
    let setup: Vec<f64> = (0..n).map(|_| round2(rng.gen_range(0.5..1.5) * scale)).collect();

    // Each hub absorbs a fixed share of total demand; the share is raised when
    // needed so that opening every hub always covers the total supply.
    let share = cfg.capacity_tightness.max(1.0 / n as f64);
    let capacity = if total > 0.0 {
        vec![(share * total).ceil(); n]
    } else {
        vec![1.0; n]
    };

    let scenarios = (0..cfg.scenario_count)
        .map(|_| Scenario {
            supplement: setup.iter().map(|&f| round2(rng.gen_range(0.0..1.5 * f))).collect(),
        })
        .collect();

    let chains = draw_chains(&mut rng, n, cfg.chain_count, cfg.overlap_fraction);

    Instance::new(InstanceData {
        n,
        demand,
        cost,
        setup,
        capacity,
        chi: 1.0,
        alpha: 0.5,
        delta: 1.0,
        scenarios,
        chains,
    })
}

fn draw_chains(rng: &mut ChaCha8Rng, n: usize, count: usize, overlap: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut chains: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for (pos, &v) in order.iter().enumerate() {
        chains[pos % count].insert(v);
    }

    if count > 1 {
        let extra = (overlap * n as f64).round() as usize;
        for &v in order.iter().take(extra) {
            let start = rng.gen_range(0..count);
            for step in 0..count {
                let a = (start + step) % count;
                if chains[a].contains(&v) {
                    continue;
                }
                let mut grown = chains[a].clone();
                grown.insert(v);
                if chains.iter().any(|c| *c == grown) {
                    continue;
                }
                chains[a] = grown;
                break;
            }
        }
    }
    chains.into_iter().map(|c| c.into_iter().collect()).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Three nodes, a single flow of 10 units from node 0 to node 2.
    pub(crate) fn toy3_data() -> InstanceData {
        InstanceData {
            n: 3,
            demand: vec![vec![0.0, 0.0, 10.0], vec![0.0; 3], vec![0.0; 3]],
            cost: vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
            setup: vec![100.0, 5.0, 100.0],
            capacity: vec![20.0; 3],
            chi: 1.0,
            alpha: 0.5,
            delta: 1.0,
            scenarios: vec![Scenario { supplement: vec![0.0; 3] }],
            chains: vec![vec![0, 1], vec![1, 2]],
        }
    }

    const MINIMAL: &str = r#"{
        "n": 1, "demand": [[0]], "cost": [[0]], "setup": [3], "capacity": [1],
        "chi": 1, "alpha": 0.5, "delta": 1,
        "scenarios": [{"supplement": [0]}], "chains": [[0]]
    }"#;

    #[test]
    fn minimal_instance_loads() {
        let inst = load_instance(MINIMAL).unwrap();
        assert_eq!(inst.n(), 1);
        assert_eq!(inst.scenario_count(), 1);
    }

    #[test]
    fn zero_capacity_is_rejected() {
        let text = MINIMAL.replace(r#""capacity": [1]"#, r#""capacity": [0]"#);
        let err = load_instance(&text).unwrap_err().to_string();
        assert!(err.contains("capacity must be positive"), "{err}");
    }

    #[test]
    fn chains_must_cover_nodes() {
        let mut d = toy3_data();
        d.chains = vec![vec![0], vec![1]];
        let err = Instance::new(d).unwrap_err().to_string();
        assert!(err.contains("chain union must cover all nodes"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace(r#""n": 1,"#, r#""n": 1, "probability": 0.5,"#);
        assert!(matches!(load_instance(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match load_instance("{\n  \"n\": 1,\n  oops\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn invariant_violations_are_named() {
        let cases: Vec<(fn(&mut InstanceData), &str)> = vec![
            (|d| d.demand[0][1] = -1.0, "demand must be nonnegative"),
            (|d| d.cost[1][1] = 2.0, "cost diagonal must be zero"),
            (|d| d.alpha = 0.0, "alpha must lie in (0, 10]"),
            (|d| d.scenarios[0].supplement[1] = -6.0, "effective setup cost"),
            (|d| d.chains = vec![vec![0, 1, 2], vec![2, 1, 0]], "identical"),
            (|d| d.chains.push(vec![]), "is empty"),
            (|d| d.setup.pop().map(|_| ()).unwrap(), "setup must have 3 entries"),
            (|d| d.scenarios.clear(), "at least one scenario"),
        ];
        for (mutate, needle) in cases {
            let mut d = toy3_data();
            mutate(&mut d);
            let err = Instance::new(d).unwrap_err().to_string();
            assert!(err.contains(needle), "`{err}` should mention `{needle}`");
        }
    }

    #[test]
    fn negative_supplement_allowed_down_to_setup() {
        let mut d = toy3_data();
        d.scenarios[0].supplement = vec![-100.0, -5.0, -0.25];
        let inst = Instance::new(d).unwrap();
        assert_eq!(inst.effective_setup(0, 0), 0.0);
        assert_eq!(inst.effective_setup(0, 2), 99.75);
    }

    #[test]
    fn round_trip_minimal_and_negative_supplements() {
        let inst = load_instance(MINIMAL).unwrap();
        assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);

        let mut d = toy3_data();
        d.scenarios[0].supplement = vec![-0.1, -3.000000000000001, 1e-300];
        let inst = Instance::new(d).unwrap();
        let back = load_instance(&save_instance(&inst)).unwrap();
        for k in 0..3 {
            assert_eq!(back.supplement(0, k).to_bits(), inst.supplement(0, k).to_bits());
        }
    }

    #[test]
    fn round_trip_generated() {
        let cfg = GeneratorConfig { seed: 42, n: 5, ..Default::default() };
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(load_instance(&save_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn origin_supply_cases() {
        let toy = Instance::new(toy3_data()).unwrap();
        assert_eq!(toy.origin_supply(0), 10.0);
        assert_eq!(toy.origin_supply(1), 0.0);

        let mut d = toy3_data();
        d.demand = vec![vec![0.0; 3]; 3];
        let zero = Instance::new(d).unwrap();
        assert!((0..3).all(|i| zero.origin_supply(i) == 0.0));

        let inst = generate_instance(&GeneratorConfig { seed: 9, n: 6, ..Default::default() }).unwrap();
        let by_origin: f64 = (0..6).map(|i| inst.origin_supply(i)).sum();
        assert_eq!(by_origin, inst.total_demand());
    }

    #[test]
    fn partition_when_no_overlap() {
        let cfg = GeneratorConfig { seed: 1, n: 4, chain_count: 2, overlap_fraction: 0.0, ..Default::default() };
        let inst = generate_instance(&cfg).unwrap();
        let mut all: Vec<usize> = inst.chains().iter().flatten().copied().collect();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3]);
        assert_eq!(generate_instance(&cfg).unwrap(), inst);
    }

    #[test]
    fn overlap_puts_some_node_in_two_chains() {
        let cfg = GeneratorConfig { seed: 2, n: 6, chain_count: 3, overlap_fraction: 0.5, ..Default::default() };
        let inst = generate_instance(&cfg).unwrap();
        let mut count = [0usize; 6];
        for c in inst.chains() {
            for &v in c {
                count[v] += 1;
            }
        }
        assert!(count.iter().all(|&c| c >= 1));
        assert!(count.iter().any(|&c| c >= 2));
    }

    #[test]
    fn too_many_chains_is_a_config_error() {
        let cfg = GeneratorConfig { n: 3, chain_count: 4, ..Default::default() };
        assert!(matches!(generate_instance(&cfg), Err(Error::Config(_))));
    }
}

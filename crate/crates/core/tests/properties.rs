use proptest::prelude::*;

use collab_hub::formulation::{build_nc, ModelOptions};
use collab_hub::instance::{generate_instance, load_instance, save_instance, CostMode, GeneratorConfig};
use collab_hub::lp::{solve_lp, verify_certificate, LpStatus};
use collab_hub::milp::{solve_by_enumeration, solve_milp};
use collab_hub::model::{LinearModel, Relation};

fn config() -> impl Strategy<Value = GeneratorConfig> {
    (any::<u64>(), 1usize..7, 0.0f64..=1.0, 1usize..4, 0.05f64..=1.0, any::<bool>(), 0.05f64..=1.0).prop_flat_map(
        |(seed, n, overlap, scenarios, density, euclid, tightness)| {
            (1..=n).prop_map(move |chains| GeneratorConfig {
                seed,
                n,
                chain_count: chains,
                overlap_fraction: overlap,
                scenario_count: scenarios,
                demand_density: density,
                cost_mode: if euclid { CostMode::Euclidean } else { CostMode::Uniform },
                capacity_tightness: tightness,
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn generated_instances_are_valid(cfg in config()) {
        let inst = generate_instance(&cfg).unwrap();
        let n = inst.n();
        let mut covered = vec![false; n];
        for chain in inst.chains() {
            for &k in chain {
                covered[k] = true;
            }
        }
        prop_assert!(covered.iter().all(|&c| c));
        let capacity: f64 = (0..n).map(|k| inst.capacity(k)).sum();
        prop_assert!(capacity >= inst.total_demand());
        for s in 0..inst.scenario_count() {
            for k in 0..n {
                prop_assert!(inst.effective_setup(s, k) >= 0.0);
            }
        }
        prop_assert_eq!(&generate_instance(&cfg).unwrap(), &inst);
    }

    #[test]
    fn save_load_round_trip(cfg in config()) {
        let inst = generate_instance(&cfg).unwrap();
        let text = save_instance(&inst);
        let back = load_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(save_instance(&back), text);
    }
}

/// Minimum of `c.x` over `A x <= b`, `0 <= x <= u` in two variables, by
/// checking every intersection of two boundary lines.
fn vertex_oracle(c: [f64; 2], rows: &[([f64; 2], f64)], u: f64) -> Option<f64> {
    let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
    lines.extend([([1.0, 0.0], 0.0), ([0.0, 1.0], 0.0), ([1.0, 0.0], u), ([0.0, 1.0], u)]);
    let feasible = |x: [f64; 2]| {
        x.iter().all(|&v| v >= -1e-9 && v <= u + 1e-9) && rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= b + 1e-9)
    };
    let mut best: Option<f64> = None;
    for p in 0..lines.len() {
        for q in (p + 1)..lines.len() {
            let ((a1, b1), (a2, b2)) = (lines[p], lines[q]);
            let det = a1[0] * a2[1] - a1[1] * a2[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = [(b1 * a2[1] - b2 * a1[1]) / det, (a1[0] * b2 - a2[0] * b1) / det];
            if feasible(x) {
                let v = c[0] * x[0] + c[1] * x[1];
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    }
    best
}

fn coef() -> impl Strategy<Value = f64> {
    (-5i32..=5).prop_map(f64::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn lp_matches_vertex_oracle(
        c in [coef(), coef()],
        rows in prop::collection::vec(([coef(), coef()], -4i32..=8), 0..5),
    ) {
        let rows: Vec<([f64; 2], f64)> = rows.into_iter().map(|(a, b)| (a, f64::from(b))).collect();
        let u = 10.0;
        let mut m = LinearModel::new();
        let x = m.add_var("x", collab_hub::model::VarKind::Continuous, 0.0, u);
        let y = m.add_var("y", collab_hub::model::VarKind::Continuous, 0.0, u);
        for (r, (a, b)) in rows.iter().enumerate() {
            m.add_constraint(format!("r{r}"), [(x, a[0]), (y, a[1])], Relation::Le, *b);
        }
        m.set_objective([(x, c[0]), (y, c[1])]);
        let lp = solve_lp(&m, false, &[]).unwrap();
        match vertex_oracle(c, &rows, u) {
            Some(v) => {
                prop_assert_eq!(lp.status, LpStatus::Optimal);
                prop_assert!((lp.objective - v).abs() < 1e-7, "{} vs {}", lp.objective, v);
                let cert = verify_certificate(&m, &lp);
                prop_assert!(cert.pass, "{:?}", cert.failures);
            }
            None => prop_assert_eq!(lp.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn branch_and_bound_matches_enumeration(
        value in prop::collection::vec(1i32..20, 5),
        weight in prop::collection::vec(1i32..10, 5),
        cap in 5i32..25,
        slack_cost in 0i32..4,
    ) {
        // Knapsack with a penalised continuous overflow variable.
        let mut m = LinearModel::new();
        let xs: Vec<usize> = (0..5).map(|k| m.add_binary(format!("b{k}"))).collect();
        let over = m.add_continuous("over");
        let mut row: Vec<(usize, f64)> = xs.iter().zip(&weight).map(|(&j, &w)| (j, f64::from(w))).collect();
        row.push((over, -1.0));
        m.add_constraint("capacity", row, Relation::Le, f64::from(cap));
        let mut obj: Vec<(usize, f64)> = xs.iter().zip(&value).map(|(&j, &v)| (j, -f64::from(v))).collect();
        obj.push((over, f64::from(slack_cost)));
        m.set_objective(obj);
        let bb = solve_milp(&m).unwrap();
        let en = solve_by_enumeration(&m, 24).unwrap();
        prop_assert_eq!(bb.status, en.status);
        prop_assert!((bb.objective - en.objective).abs() < 1e-6);
        prop_assert_eq!(bb.stats.certificate_failures, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nominal_solvers_agree_on_generated(seed in any::<u64>(), n in 2usize..5) {
        let cfg = GeneratorConfig { seed, n, chain_count: 1, ..GeneratorConfig::default() };
        let inst = generate_instance(&cfg).unwrap();
        let model = build_nc(&inst, &ModelOptions::default());
        let bb = solve_milp(&model).unwrap();
        let en = solve_by_enumeration(&model, 24).unwrap();
        prop_assert_eq!(bb.status, en.status);
        prop_assert!((bb.objective - en.objective).abs() <= 1e-6 * en.objective.abs().max(1.0));
    }
}

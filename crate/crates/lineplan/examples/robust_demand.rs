//! Planning under demand uncertainty: evaluate, then immunize.
//!
//! Demand forecasts are ranges, not numbers. This example first stress-tests
//! a nominal concept against an uncertainty set (worst case and expectation),
//! then solves the robust counterpart model, which buys enough capacity for
//! every demand realization in the set.
//!
//! Run with: cargo run --example robust_demand

use std::collections::BTreeMap;

use lineplan::formulations::{
    build_cost_model, traffic_lower_bounds, FrequencyBounds,
};
use lineplan::milp::SolveOptions;
use lineplan::network::{Instance, LineDef, LinePool};
use lineplan::routing::{shortest_paths_ptn, traffic_loads};
use lineplan::uncertainty::{
    expected_eval, robust_cost_model_box, worst_case_eval, DemandUncertainty, EvalConfig,
};

fn main() -> lineplan::Result<()> {
    let mut b = Instance::builder();
    b.link("a1", "s1", "s2", 20.0, 2, Some(4))?;
    b.link("a2", "s2", "s3", 20.0, 2, Some(4))?;
    b.od("s1", "s3", 120.0);
    let instance = b.build()?;
    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("l1", &["a1"], 1.0),
            LineDef::new("l2", &["a2"], 1.0).capacity(30),
            LineDef::new("l3", &["a1", "a2"], 1.8),
        ],
    )?;

    // Nominal plan: cheapest concept for the forecast demand of 120.
    let loads = traffic_loads(&instance, &shortest_paths_ptn(&instance));
    let mut bounds = FrequencyBounds::from_instance(&instance);
    bounds.raise_lower(&traffic_lower_bounds(&loads, instance.default_capacity()));
    let nominal_model = build_cost_model(&instance, &pool, &bounds);
    let nominal_sol = nominal_model.solve(&SolveOptions::default())?;
    let nominal = nominal_model.decode_concept(&nominal_sol)?;
    println!(
        "nominal concept costs {:.1} and assumes exactly 120 passengers",
        nominal_sol.objective_value
    );

    // The forecast may actually land anywhere in [120, 240].
    let s1 = instance.station("s1").unwrap();
    let s3 = instance.station("s3").unwrap();
    let along = |v: f64| BTreeMap::from([((s1, s3), v)]);
    let set = DemandUncertainty::Box {
        bounds: BTreeMap::from([((s1, s3), (120.0, 240.0))]),
    };

    // Stress test: which realization hurts the nominal plan most?
    let config = EvalConfig::default();
    let worst = worst_case_eval(&instance, &pool, &nominal, &set, &config)?;
    println!(
        "worst case over the box: demand {:.0} -> objective {:.0} \
         ({:.0} travel minutes + {:.0} capacity deficit at weight {:.0})",
        worst.worst.scenario[&(s1, s3)],
        worst.worst.objective,
        worst.worst.travel_time,
        worst.worst.total_deficit,
        worst.deficit_weight
    );

    // If the planner can attach probabilities, use the expectation instead.
    let discrete = DemandUncertainty::Discrete {
        scenarios: vec![along(120.0), along(180.0), along(240.0)],
        probabilities: Some(vec![0.5, 0.3, 0.2]),
    };
    let expected = expected_eval(&instance, &pool, &nominal, &discrete, &config)?;
    println!("expected objective over three weighted scenarios: {:.0}", expected.expected_objective);
    for (p, eval) in &expected.per_scenario {
        println!(
            "  with prob {:.1}: demand {:.0}, objective {:.0}",
            p,
            eval.scenario[&(s1, s3)],
            eval.objective
        );
    }

    // Robust planning: require enough capacity for every box realization.
    let robust_model = robust_cost_model_box(&instance, &pool, &set)?;
    let robust_sol = robust_model.solve(&SolveOptions::default())?;
    let robust = robust_model.decode_concept(&robust_sol)?;
    println!("\nrobust concept costs {:.1}:", robust_sol.objective_value);
    for (l, line) in pool.lines() {
        if robust.is_selected(l) {
            println!("  {} at frequency {}", line.id(), robust.frequency(l));
        }
    }
    let robust_worst = worst_case_eval(&instance, &pool, &robust, &set, &config)?;
    println!(
        "its worst case has zero deficit: {:.0} minutes, deficit {:.0}",
        robust_worst.worst.objective, robust_worst.worst.total_deficit
    );
    assert_eq!(robust_worst.worst.total_deficit, 0.0);
    assert!(robust_sol.objective_value >= nominal_sol.objective_value);
    println!("robustness costs {:.1} extra operating units.", robust_sol.objective_value - nominal_sol.objective_value);
    Ok(())
}

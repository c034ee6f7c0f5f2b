//! One network, several seasons: coupled frequency plans.
//!
//! Summer and winter demand differ, but operating two unrelated line plans
//! confuses passengers and crews. The multi-period model solves all seasons
//! at once and bounds how much consecutive plans may differ. Sweeping that
//! bound shows the price of stability.
//!
//! Run with: cargo run --example multi_period

use std::collections::BTreeMap;

use lineplan::evaluate::DissimilarityMeasure;
use lineplan::milp::SolveOptions;
use lineplan::network::{Instance, LineDef, LinePool};
use lineplan::uncertainty::{build_multiperiod_model, decode_multiperiod, Season};

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

    let s1 = instance.station("s1").unwrap();
    let s3 = instance.station("s3").unwrap();
    // Summer carries 120 passengers, winter twice that. Summer counts twice
    // in the objective, say because it lasts twice as long.
    let seasons = vec![
        Season {
            demand: BTreeMap::from([((s1, s3), 120.0)]),
            weight: 2.0,
        },
        Season {
            demand: BTreeMap::from([((s1, s3), 240.0)]),
            weight: 1.0,
        },
    ];

    // Couple the seasons by the 1-norm of their frequency differences:
    // sum over lines of |f_summer - f_winter| must stay within the bound.
    let measure = DissimilarityMeasure::FreqNorm(1.0);
    println!("bound | total cost | summer plan        | winter plan");
    for bound in [f64::INFINITY, 2.0, 1.0, 0.0] {
        let artifacts = build_multiperiod_model(&instance, &pool, &seasons, &measure, bound)?;
        let solution = artifacts.solve(&SolveOptions::default())?;
        let concepts = decode_multiperiod(&artifacts, &solution)?;
        let show = |i: usize| -> String {
            let parts: Vec<String> = pool
                .lines()
                .filter(|(l, _)| concepts[i].is_selected(*l))
                .map(|(l, line)| format!("{}@{}", line.id(), concepts[i].frequency(l)))
                .collect();
            if parts.is_empty() {
                "-".into()
            } else {
                parts.join(", ")
            }
        };
        let b = if bound.is_infinite() {
            "  inf".to_string()
        } else {
            format!("{bound:5.1}")
        };
        println!(
            "{b} | {:10.1} | {:18} | {}",
            solution.objective_value,
            show(0),
            show(1)
        );
    }

    println!();
    println!("an unbounded model plans each season alone; bound 0 forces one");
    println!("shared plan sized for the winter peak, paid for all summer long.");
    Ok(())
}

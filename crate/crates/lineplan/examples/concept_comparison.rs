//! Measuring how different two line concepts are.
//!
//! When a plan is revised — next season, after a disruption, or by a better
//! optimization run — planners want to know how disruptive the change is for
//! passengers. Three families of measures answer that: frequency norms,
//! the line-set delta, and a transport distance that understands that moving
//! service to a similar line is cheaper than to an unrelated one.
//!
//! Run with: cargo run --example concept_comparison

use lineplan::evaluate::{concept_dissimilarity, DissimilarityMeasure};
use lineplan::network::{Instance, LineConcept, LineDef, LineId, LinePool};

fn main() -> lineplan::Result<()> {
    let mut b = Instance::builder();
    b.link("a1", "s1", "s2", 20.0, 0, None)?;
    b.link("a2", "s2", "s3", 20.0, 0, None)?;
    b.od("s1", "s3", 120.0);
    let instance = b.build()?;
    let pool = LinePool::build(
        &instance,
        vec![
            LineDef::new("l1", &["a1"], 1.0),
            LineDef::new("l2", &["a2"], 1.0),
            LineDef::new("l3", &["a1", "a2"], 1.8),
        ],
    )?;

    let but = |pairs: &[(usize, u32)]| {
        LineConcept::from_frequencies(pairs.iter().map(|&(i, f)| (LineId(i), f)))
    };
    let base = but(&[(0, 2), (1, 2)]); // two shuttles, twice each
    let variants = [
        ("identical plan", but(&[(0, 2), (1, 2)])),
        ("one extra trip on l1", but(&[(0, 3), (1, 2)])),
        ("shuttles replaced by through line", but(&[(2, 2)])),
        ("everything different", but(&[(2, 4)])),
    ];

    let measures = [
        ("freq 1-norm", DissimilarityMeasure::FreqNorm(1.0)),
        ("freq 2-norm", DissimilarityMeasure::FreqNorm(2.0)),
        ("freq max-norm", DissimilarityMeasure::FreqNorm(f64::INFINITY)),
        ("line-set delta", DissimilarityMeasure::LineSetDelta),
        ("transport dist", DissimilarityMeasure::TransportDistance),
    ];

    print!("{:36}", "compared against the base plan:");
    for (name, _) in &measures {
        print!(" {name:>14}");
    }
    println!();
    for (what, other) in &variants {
        print!("{what:36}");
        for (_, m) in &measures {
            let d = concept_dissimilarity(&pool, &base, other, m)?;
            print!(" {d:14.3}");
        }
        println!();
    }

    println!();
    println!("the transport distance stays small when service moves to lines that");
    println!("share links (l1+l2 vs l3), where the line-set delta counts 3 changes.");

    // Every measure is symmetric and zero only between equal concepts.
    for (_, m) in &measures {
        let d1 = concept_dissimilarity(&pool, &base, &variants[2].1, m)?;
        let d2 = concept_dissimilarity(&pool, &variants[2].1, &base, m)?;
        assert!((d1 - d2).abs() < 1e-9);
        assert_eq!(concept_dissimilarity(&pool, &base, &base, m)?, 0.0);
    }
    Ok(())
}

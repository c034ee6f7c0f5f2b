//! Dissimilarity measures between two line concepts over the same pool,
//! used to keep successive planning periods recognisable to passengers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::milp::{solve_lp_relaxation, MilpModel, Relation, Sense, SolveOptions, SolveStatus};
use crate::network::{LineConcept, LineId, LinePool};

/// How to compare two concepts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DissimilarityMeasure {
    /// `‖f¹ − f²‖_p` over the full pool frequency vector; `p` may be
    /// `f64::INFINITY` for the maximum norm.
    FreqNorm(f64),
    /// Number of lines that are selected in one concept but not the other.
    LineSetDelta,
    /// Optimal cost of transporting frequency mass from one concept to the
    /// other. Moving a unit between lines costs their Jaccard distance on
    /// link sets; surplus mass that cannot be matched costs 1 per unit.
    TransportDistance,
}

/// Measures how far apart two line concepts are.
///
/// All measures are symmetric, non-negative, and zero for equal concepts
/// (for `TransportDistance` this assumes pool lines have distinct link sets,
/// which holds for generated pools).
pub fn concept_dissimilarity(
    pool: &LinePool,
    c1: &LineConcept,
    c2: &LineConcept,
    measure: &DissimilarityMeasure,
) -> Result<f64> {
    c1.validate_against(pool)?;
    c2.validate_against(pool)?;
    match *measure {
        DissimilarityMeasure::FreqNorm(p) => freq_norm(pool, c1, c2, p),
        DissimilarityMeasure::LineSetDelta => Ok(line_set_delta(pool, c1, c2)),
        DissimilarityMeasure::TransportDistance => transport_distance(pool, c1, c2),
    }
}

fn freq_norm(pool: &LinePool, c1: &LineConcept, c2: &LineConcept, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency norm order must be >= 1, got {p}"
        )));
    }
    let diffs = (0..pool.len()).map(|i| {
        let l = LineId(i);
        (f64::from(c1.frequency(l)) - f64::from(c2.frequency(l))).abs()
    });
    if p.is_infinite() {
        Ok(diffs.fold(0.0, f64::max))
    } else {
        Ok(diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p))
    }
}

fn line_set_delta(pool: &LinePool, c1: &LineConcept, c2: &LineConcept) -> f64 {
    (0..pool.len())
        .filter(|&i| c1.is_selected(LineId(i)) != c2.is_selected(LineId(i)))
        .count() as f64
}

/// Jaccard distance between the link sets of two lines.
fn jaccard_distance(pool: &LinePool, l1: LineId, l2: LineId) -> f64 {
    let a: BTreeSet<_> = pool.line(l1).links().iter().copied().collect();
    let b: BTreeSet<_> = pool.line(l2).links().iter().copied().collect();
    let inter = a.intersection(&b).count() as f64;
    let union = a.union(&b).count() as f64;
    1.0 - inter / union
}

fn transport_distance(pool: &LinePool, c1: &LineConcept, c2: &LineConcept) -> Result<f64> {
    let supplies: Vec<(LineId, f64)> =
        c1.selected().map(|(l, f)| (l, f64::from(f))).collect();
    let demands: Vec<(LineId, f64)> =
        c2.selected().map(|(l, f)| (l, f64::from(f))).collect();
    if supplies.is_empty() && demands.is_empty() {
        return Ok(0.0);
    }

    // Transportation LP: ship supply mass to demand mass; per-unit cost is
    // the Jaccard ground distance, and either side may leave mass unmatched
    // at cost 1 (the maximum ground distance).
    let mut model = MilpModel::new(Sense::Minimize);
    let mut ship = Vec::with_capacity(supplies.len() * demands.len());
    for &(l1, _) in &supplies {
        for &(l2, _) in &demands {
            let v = model.add_var(
                &format!("move_{}_{}", l1.0, l2.0),
                0.0,
                f64::INFINITY,
                false,
            );
            model.set_objective(v, jaccard_distance(pool, l1, l2));
            ship.push(v);
        }
    }
    let n = demands.len();
    for (i, &(l1, mass)) in supplies.iter().enumerate() {
        let slack = model.add_var(&format!("keep_{}", l1.0), 0.0, f64::INFINITY, false);
        model.set_objective(slack, 1.0);
        let mut row: Vec<_> = (0..n).map(|j| (ship[i * n + j], 1.0)).collect();
        row.push((slack, 1.0));
        model.add_constraint(row, Relation::Eq, mass);
    }
    for (j, &(l2, mass)) in demands.iter().enumerate() {
        let slack = model.add_var(&format!("short_{}", l2.0), 0.0, f64::INFINITY, false);
        model.set_objective(slack, 1.0);
        let mut row: Vec<_> = (0..supplies.len()).map(|i| (ship[i * n + j], 1.0)).collect();
        row.push((slack, 1.0));
        model.add_constraint(row, Relation::Eq, mass);
    }

    let solution = solve_lp_relaxation(&model, &SolveOptions::default())?;
    match solution.status {
        SolveStatus::Optimal => {
            // Rounding in the simplex can leave a tiny negative residue.
            Ok(solution.objective_value.max(0.0))
        }
        other => Err(Error::Numerical(format!(
            "transport-distance LP ended with status {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::tests::fixture;
    use crate::network::{Instance, LineDef, LinePool};

    fn worked_concepts() -> (LinePool, LineConcept, LineConcept) {
        let (_, pool) = fixture();
        let c1 = LineConcept::from_frequencies([(LineId(0), 1), (LineId(1), 2), (LineId(2), 1)]);
        let c2 = LineConcept::from_frequencies([(LineId(0), 1), (LineId(1), 2)]);
        (pool, c1, c2)
    }

    /// Five stations in a row; `long` covers `short`'s two links plus two more,
    /// so their Jaccard distance is 1 − 2/4 = 0.5.
    fn half_overlap_pool() -> (Instance, LinePool) {
        let mut b = Instance::builder();
        for i in 1..=4 {
            b.link(
                &format!("a{i}"),
                &format!("s{i}"),
                &format!("s{}", i + 1),
                10.0,
                0,
                None,
            )
            .unwrap();
        }
        b.od("s1", "s5", 10.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(
            &instance,
            vec![
                LineDef::new("short", &["a1", "a2"], 1.0),
                LineDef::new("long", &["a1", "a2", "a3", "a4"], 2.0),
            ],
        )
        .unwrap();
        (instance, pool)
    }

    /// Brute-force minimum over all integer transport plans of a 2x2 problem.
    fn enumerate_transport_2x2(costs: [[f64; 2]; 2], supply: [u32; 2], demand: [u32; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for x11 in 0..=supply[0].min(demand[0]) {
            for x12 in 0..=(supply[0] - x11).min(demand[1]) {
                for x21 in 0..=supply[1].min(demand[0] - x11) {
                    for x22 in 0..=(supply[1] - x21).min(demand[1] - x12) {
                        let moved = f64::from(x11) * costs[0][0]
                            + f64::from(x12) * costs[0][1]
                            + f64::from(x21) * costs[1][0]
                            + f64::from(x22) * costs[1][1];
                        let unmatched = f64::from(
                            (supply[0] - x11 - x12)
                                + (supply[1] - x21 - x22)
                                + (demand[0] - x11 - x21)
                                + (demand[1] - x12 - x22),
                        );
                        best = best.min(moved + unmatched);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn identical_concepts_have_zero_distance() {
        let (pool, c1, _) = worked_concepts();
        for measure in [
            DissimilarityMeasure::FreqNorm(1.0),
            DissimilarityMeasure::FreqNorm(2.0),
            DissimilarityMeasure::FreqNorm(f64::INFINITY),
            DissimilarityMeasure::LineSetDelta,
            DissimilarityMeasure::TransportDistance,
        ] {
            let d = concept_dissimilarity(&pool, &c1, &c1, &measure).unwrap();
            assert_eq!(d, 0.0, "measure {measure:?}");
        }
    }

    #[test]
    fn dropping_one_line_scores_one() {
        let (pool, c1, c2) = worked_concepts();
        let norm =
            concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::FreqNorm(1.0)).unwrap();
        assert_eq!(norm, 1.0);
        let delta =
            concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::LineSetDelta).unwrap();
        assert_eq!(delta, 1.0);
        // Frequency changes on a kept line move the norm but not the delta.
        let mut c3 = c2.clone();
        c3.set_frequency(LineId(1), 4);
        let norm =
            concept_dissimilarity(&pool, &c1, &c3, &DissimilarityMeasure::FreqNorm(1.0)).unwrap();
        assert_eq!(norm, 3.0);
        let delta =
            concept_dissimilarity(&pool, &c1, &c3, &DissimilarityMeasure::LineSetDelta).unwrap();
        assert_eq!(delta, 1.0);
    }

    #[test]
    fn norm_orders_behave() {
        let (pool, c1, _) = worked_concepts();
        let c2 = LineConcept::from_frequencies([(LineId(0), 3), (LineId(1), 2), (LineId(2), 3)]);
        // Differences are (2, 0, 2).
        let l1 = concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::FreqNorm(1.0));
        assert_eq!(l1.unwrap(), 4.0);
        let l2 = concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::FreqNorm(2.0));
        assert!((l2.unwrap() - 8.0f64.sqrt()).abs() < 1e-12);
        let linf = concept_dissimilarity(
            &pool,
            &c1,
            &c2,
            &DissimilarityMeasure::FreqNorm(f64::INFINITY),
        );
        assert_eq!(linf.unwrap(), 2.0);
        let err = concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::FreqNorm(0.5));
        assert!(matches!(err.unwrap_err(), Error::InvalidParameter(_)));
    }

    #[test]
    fn moving_one_unit_costs_the_ground_distance() {
        let (_, pool) = half_overlap_pool();
        let short = LineId(0);
        let long = LineId(1);
        assert_eq!(jaccard_distance(&pool, short, long), 0.5);
        // Swap one frequency unit from `short` to `long`.
        let c1 = LineConcept::from_frequencies([(short, 2), (long, 1)]);
        let c2 = LineConcept::from_frequencies([(short, 1), (long, 2)]);
        let d = concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::TransportDistance)
            .unwrap();
        let oracle = enumerate_transport_2x2([[0.0, 0.5], [0.5, 0.0]], [2, 1], [1, 2]);
        assert!((d - oracle).abs() < 1e-9);
        assert!((d - 0.5).abs() < 1e-9);
    }

    #[test]
    fn transport_matches_enumeration_on_asymmetric_masses() {
        let (_, pool) = half_overlap_pool();
        let short = LineId(0);
        let long = LineId(1);
        // Total mass differs by 2, so two units stay unmatched at cost 1 each.
        let c1 = LineConcept::from_frequencies([(short, 3), (long, 1)]);
        let c2 = LineConcept::from_frequencies([(short, 1), (long, 1)]);
        let d = concept_dissimilarity(&pool, &c1, &c2, &DissimilarityMeasure::TransportDistance)
            .unwrap();
        let oracle = enumerate_transport_2x2([[0.0, 0.5], [0.5, 0.0]], [3, 1], [1, 1]);
        assert!((d - oracle).abs() < 1e-9);
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn one_sided_concepts_pay_the_full_mass() {
        let (_, pool) = half_overlap_pool();
        let c1 = LineConcept::from_frequencies([(LineId(0), 2), (LineId(1), 3)]);
        let empty = LineConcept::new();
        let d = concept_dissimilarity(&pool, &c1, &empty, &DissimilarityMeasure::TransportDistance)
            .unwrap();
        assert!((d - 5.0).abs() < 1e-9);
    }

    #[test]
    fn measures_are_symmetric_and_nonnegative() {
        let (pool, c1, c2) = worked_concepts();
        let cases = [
            DissimilarityMeasure::FreqNorm(1.0),
            DissimilarityMeasure::FreqNorm(2.0),
            DissimilarityMeasure::LineSetDelta,
            DissimilarityMeasure::TransportDistance,
        ];
        for measure in cases {
            let forward = concept_dissimilarity(&pool, &c1, &c2, &measure).unwrap();
            let backward = concept_dissimilarity(&pool, &c2, &c1, &measure).unwrap();
            assert!(forward >= 0.0);
            assert!(
                (forward - backward).abs() < 1e-9,
                "asymmetry under {measure:?}"
            );
            // Distinct concepts over this pool score strictly positive.
            assert!(forward > 0.0, "measure {measure:?} missed a difference");
        }
    }

    #[test]
    fn foreign_lines_are_rejected() {
        let (pool, c1, _) = worked_concepts();
        let foreign = LineConcept::from_frequencies([(LineId(9), 1)]);
        for measure in [
            DissimilarityMeasure::FreqNorm(1.0),
            DissimilarityMeasure::LineSetDelta,
            DissimilarityMeasure::TransportDistance,
        ] {
            let err = concept_dissimilarity(&pool, &c1, &foreign, &measure).unwrap_err();
            assert!(matches!(err, Error::PoolMismatch(_)));
        }
    }
}

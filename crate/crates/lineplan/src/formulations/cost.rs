//! Cost-minimal line concepts and frequency-structure refinements.

use std::collections::BTreeMap;

use super::{line_frequency_cap, Context, FormulationArtifacts, FrequencyBounds, VarKey};
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation, Sense};
use crate::network::{Instance, LinePool};

/// Builds the basic line planning model: choose integer frequencies
/// minimizing total operating cost while every link's cumulative frequency
/// stays within its bounds.
///
/// Infeasible bound combinations are a legitimate outcome, reported by the
/// solver, not at build time.
pub fn build_cost_model(
    instance: &Instance,
    pool: &LinePool,
    bounds: &FrequencyBounds,
) -> FormulationArtifacts {
    let mut model = MilpModel::new(Sense::Minimize);
    let mut index = BTreeMap::new();

    for (l, line) in pool.lines() {
        let cap = line_frequency_cap(instance, pool, l, bounds);
        let var = model.add_var(format!("f_{}", line.id()), 0.0, cap as f64, true);
        model.set_objective(var, line.cost_per_trip());
        index.insert(VarKey::Freq(l), var);
    }

    for (a, _) in instance.links() {
        let terms: Vec<_> = pool
            .through_link(a)
            .iter()
            .map(|&l| (index[&VarKey::Freq(l)], 1.0))
            .collect();
        let lo = bounds.lower(a);
        if lo > 0 {
            model.add_constraint(terms.clone(), Relation::Ge, lo as f64);
        }
        if let Some(hi) = bounds.upper(a) {
            model.add_constraint(terms, Relation::Le, hi as f64);
        }
    }

    FormulationArtifacts::new(model, index, Context::Plain)
}

/// Restricts every frequency to a multiple of the system frequency `i`:
/// adds an integer multiplier per line and the coupling f_l = i * m_l.
pub fn apply_system_frequency(
    mut art: FormulationArtifacts,
    i: u32,
) -> Result<FormulationArtifacts> {
    if i < 2 {
        return Err(Error::InvalidParameter(format!(
            "system frequency must be at least 2, got {i}"
        )));
    }
    let freq_vars: Vec<_> = art
        .keys()
        .filter_map(|k| match k {
            VarKey::Freq(l) => Some((*l, art.var(k).unwrap())),
            _ => None,
        })
        .collect();
    if freq_vars.is_empty() {
        return Err(Error::InvalidParameter(
            "formulation has no frequency variables".into(),
        ));
    }
    for (l, f_var) in freq_vars {
        let f_upper = art.model.var(f_var).upper;
        let name = art.model.var(f_var).name.clone();
        let suffix = name.strip_prefix("f_").unwrap_or(&name).to_string();
        let m_upper = (f_upper / i as f64).floor();
        let m_var = art
            .model
            .add_var(format!("m_{suffix}"), 0.0, m_upper, true);
        art.model.add_constraint(
            vec![(f_var, 1.0), (m_var, -(i as f64))],
            Relation::Eq,
            0.0,
        );
        art.index_mut().insert(VarKey::SystemMultiple(l), m_var);
    }
    Ok(art)
}

/// Restricts every line to a frequency from the finite menu `allowed` (or
/// zero): adds binary pickers z with f_l = Σ φ z_l^φ and Σ z_l^φ ≤ 1.
pub fn apply_frequency_indicators(
    mut art: FormulationArtifacts,
    allowed: &[u32],
) -> Result<FormulationArtifacts> {
    let mut menu: Vec<u32> = allowed.to_vec();
    menu.sort_unstable();
    menu.dedup();
    if menu.is_empty() {
        return Err(Error::InvalidParameter(
            "the allowed frequency menu is empty".into(),
        ));
    }
    if menu[0] == 0 {
        return Err(Error::InvalidParameter(
            "allowed frequencies must be positive (zero means 'not selected')".into(),
        ));
    }
    let freq_vars: Vec<_> = art
        .keys()
        .filter_map(|k| match k {
            VarKey::Freq(l) => Some((*l, art.var(k).unwrap())),
            _ => None,
        })
        .collect();
    if freq_vars.is_empty() {
        return Err(Error::InvalidParameter(
            "formulation has no frequency variables".into(),
        ));
    }
    for (l, f_var) in freq_vars {
        let name = art.model.var(f_var).name.clone();
        let suffix = name.strip_prefix("f_").unwrap_or(&name).to_string();
        let mut coupling = vec![(f_var, 1.0)];
        let mut chooser = Vec::with_capacity(menu.len());
        for &phi in &menu {
            let z = art
                .model
                .add_var(format!("z_{suffix}_{phi}"), 0.0, 1.0, true);
            coupling.push((z, -(phi as f64)));
            chooser.push((z, 1.0));
            art.index_mut().insert(VarKey::FreqIndicator(l, phi), z);
        }
        art.model.add_constraint(coupling, Relation::Eq, 0.0);
        art.model.add_constraint(chooser, Relation::Le, 1.0);
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::check_frequency_bounds;
    use crate::milp::{SolveOptions, SolveStatus};
    use crate::network::tests::fixture;
    use crate::network::{LineDef, LineId};

    /// Exhaustive search over all frequency vectors within per-line caps.
    /// Returns (best cost, best vector) with the same tie-breaking as
    /// reading vectors in lexicographic order.
    fn brute_force_cost(
        instance: &Instance,
        pool: &LinePool,
        bounds: &FrequencyBounds,
        caps: &[u32],
        multiple_of: u32,
        menu: Option<&[u32]>,
    ) -> Option<(f64, Vec<u32>)> {
        let n = pool.len();
        let mut best: Option<(f64, Vec<u32>)> = None;
        let mut f = vec![0u32; n];
        loop {
            let allowed = f.iter().all(|&v| {
                (multiple_of == 0 || v % multiple_of == 0)
                    && menu.map_or(true, |m| v == 0 || m.contains(&v))
            });
            if allowed && check_frequency_bounds(instance, pool, &to_concept(&f), bounds).is_ok() {
                let cost: f64 = pool
                    .lines()
                    .map(|(l, line)| line.cost_per_trip() * f[l.0] as f64)
                    .sum();
                if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                    best = Some((cost, f.clone()));
                }
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                if f[i] < caps[i] {
                    f[i] += 1;
                    break;
                }
                f[i] = 0;
                i += 1;
            }
        }
    }

    fn to_concept(f: &[u32]) -> crate::network::LineConcept {
        crate::network::LineConcept::from_frequencies(
            f.iter().enumerate().map(|(i, &v)| (LineId(i), v)),
        )
    }

    #[test]
    fn fixture_optimum_matches_exhaustive_enumeration() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = build_cost_model(&instance, &pool, &bounds);
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);

        let (oracle_cost, oracle_f) =
            brute_force_cost(&instance, &pool, &bounds, &[4, 4, 4], 0, None).unwrap();
        assert_eq!(sol.objective_value, oracle_cost);
        assert_eq!(oracle_cost, 3.6);
        assert_eq!(oracle_f, vec![0, 0, 2]);

        let concept = art.decode_concept(&sol).unwrap();
        assert_eq!(concept.frequency(LineId(2)), 2);
        assert_eq!(concept.selected_count(), 1);
        check_frequency_bounds(&instance, &pool, &concept, &bounds).unwrap();
    }

    #[test]
    fn no_demand_pressure_yields_the_empty_concept() {
        let (instance, pool) = fixture();
        let mut bounds = FrequencyBounds::from_instance(&instance);
        for (a, _) in instance.links() {
            bounds.set_lower(a, 0);
        }
        let art = build_cost_model(&instance, &pool, &bounds);
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective_value, 0.0);
        let concept = art.decode_concept(&sol).unwrap();
        assert_eq!(concept.selected_count(), 0);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut b = Instance::builder();
        b.link("a", "u", "v", 10.0, 0, None).unwrap();
        b.od("u", "v", 30.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(&instance, vec![LineDef::new("l", &["a"], 1.0)]).unwrap();
        let mut bounds = FrequencyBounds::new();
        let a = instance.link_by_id("a").unwrap();
        bounds.set_lower(a, 1);
        bounds.set_upper(a, Some(0));
        let art = build_cost_model(&instance, &pool, &bounds);
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn system_frequency_restricts_to_multiples() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = build_cost_model(&instance, &pool, &bounds);
        let art = apply_system_frequency(art, 2).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);

        let oracle = brute_force_cost(&instance, &pool, &bounds, &[4, 4, 4], 2, None).unwrap();
        assert_eq!(sol.objective_value, oracle.0);

        let concept = art.decode_concept(&sol).unwrap();
        for (l, f) in concept.selected() {
            assert_eq!(f % 2, 0, "line index {} has odd frequency {f}", l.0);
        }
        // The multiplier of the through line decodes to f/2 = 1.
        let m = art.var(&VarKey::SystemMultiple(LineId(2))).unwrap();
        assert_eq!(sol.value(m), 1.0);
    }

    #[test]
    fn system_frequency_can_make_bounds_unattainable() {
        let mut b = Instance::builder();
        b.link("a", "u", "v", 10.0, 1, Some(1)).unwrap();
        b.od("u", "v", 10.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(&instance, vec![LineDef::new("l", &["a"], 1.0)]).unwrap();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = build_cost_model(&instance, &pool, &bounds);
        let art = apply_system_frequency(art, 2).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn system_frequency_rejects_unit_multiplier() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = build_cost_model(&instance, &pool, &bounds);
        assert!(matches!(
            apply_system_frequency(art, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn frequency_menu_matching_the_optimum_changes_nothing() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let plain = build_cost_model(&instance, &pool, &bounds);
        let plain_sol = plain.solve(&SolveOptions::default()).unwrap();

        let menu = [1u32, 2, 4];
        let art = apply_frequency_indicators(build_cost_model(&instance, &pool, &bounds), &menu)
            .unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective_value, plain_sol.objective_value);

        let oracle =
            brute_force_cost(&instance, &pool, &bounds, &[4, 4, 4], 0, Some(&menu)).unwrap();
        assert_eq!(sol.objective_value, oracle.0);

        // The chosen menu entry is readable from the indicator variables.
        let z2 = art.var(&VarKey::FreqIndicator(LineId(2), 2)).unwrap();
        assert_eq!(sol.value(z2), 1.0);
        let concept = art.decode_concept(&sol).unwrap();
        assert_eq!(concept.frequency(LineId(2)), 2);
    }

    #[test]
    fn menu_outside_the_bounds_is_infeasible() {
        let mut b = Instance::builder();
        b.link("a", "u", "v", 10.0, 2, Some(4)).unwrap();
        b.od("u", "v", 10.0);
        let instance = b.build().unwrap();
        let pool = LinePool::build(&instance, vec![LineDef::new("l", &["a"], 1.0)]).unwrap();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art =
            apply_frequency_indicators(build_cost_model(&instance, &pool, &bounds), &[5]).unwrap();
        let sol = art.solve(&SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn full_menu_equals_plain_model() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let plain = build_cost_model(&instance, &pool, &bounds)
            .solve(&SolveOptions::default())
            .unwrap();
        let full = apply_frequency_indicators(
            build_cost_model(&instance, &pool, &bounds),
            &[1, 2, 3, 4],
        )
        .unwrap()
        .solve(&SolveOptions::default())
        .unwrap();
        assert_eq!(plain.objective_value, full.objective_value);
    }

    #[test]
    fn rejects_zero_in_the_menu() {
        let (instance, pool) = fixture();
        let bounds = FrequencyBounds::from_instance(&instance);
        let art = build_cost_model(&instance, &pool, &bounds);
        assert!(matches!(
            apply_frequency_indicators(art, &[0, 2]),
            Err(Error::InvalidParameter(_))
        ));
    }
}

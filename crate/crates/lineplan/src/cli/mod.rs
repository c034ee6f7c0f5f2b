//! Command-line front end.
//!
//! Four commands tie the library into reproducible runs: `solve` builds and
//! solves a line-planning formulation, `evaluate` routes passengers over a
//! given concept and writes indicator/capacity reports, `generate-pool`
//! materializes a candidate line pool, and `scan` rates every link's failure
//! impact. All artifacts land in `--out DIR`; JSON files are byte-identical
//! across reruns with identical inputs (sorted keys, six-decimal floats) and
//! every run writes a `manifest.json` hashing its inputs.
//!
//! Exit codes: 0 success/optimal, 1 I/O or validation failure, 2 infeasible
//! model, 3 solver limit reached, 4 capacity check failed under
//! `evaluate --strict`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::{
    check_capacity, concept_dissimilarity, indicators, link_failure_scan, CapacityReport,
    DissimilarityMeasure, FailurePolicy, FailureScan, FailureScanConfig, FareSchedule,
    IndicatorReport,
};
use crate::formulations::{
    build_cost_model, build_direct_traveler_model, build_flow_model, traffic_lower_bounds,
    DirectBudget, FlowLevel, FlowModelConfig, FlowObjective, FormulationArtifacts,
    FrequencyBounds,
};
use crate::milp::{SolveOptions, SolveStatus};
use crate::network::{
    generate_pool, load_concept, load_instance, load_od, load_pool, save_concept, save_pool,
    Instance, InstanceConfig, LineConcept, LinePool, PoolGenConfig,
};
use crate::report::{fmt6, write_csv, write_json, Manifest};
use crate::routing::{
    assign_trips, build_cgn, route_line_level, route_link_level, shortest_paths_ptn,
    AdaptionModel, CapacityMode, Level, RoutingResult, Timetable, TransferModel,
};
use crate::uncertainty::{
    build_multiperiod_model, decode_multiperiod, expected_eval, load_uncertainty,
    robust_cost_model_box, worst_case_eval, DemandUncertainty, EvalConfig, Season,
};

/// Entry point for the `lineplan` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lineplan: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::GeneratePool(args) => cmd_generate_pool(args),
        Command::Scan(args) => cmd_scan(args),
    }
}

#[derive(Parser)]
#[command(
    name = "lineplan",
    version,
    about = "Line planning for public transport: pools, frequencies, routing, evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and solve a line-planning formulation.
    Solve(SolveArgs),
    /// Route passengers over a concept and write indicator/capacity reports.
    Evaluate(EvaluateArgs),
    /// Generate a candidate line pool from k-shortest terminal paths.
    GeneratePool(GeneratePoolArgs),
    /// Rate the impact of failing each network link in turn.
    Scan(ScanArgs),
}

/// Input files and instance parameters shared by all commands.
#[derive(Args)]
struct InstanceArgs {
    /// Network CSV: link_id,from,to,length_time,lower_freq,upper_freq.
    #[arg(long)]
    network: PathBuf,
    /// Demand CSV: origin,destination,passengers.
    #[arg(long)]
    od: PathBuf,
    /// Planning period in minutes.
    #[arg(long, default_value_t = 60.0)]
    period: f64,
    /// Default vehicle capacity (passengers per trip).
    #[arg(long, default_value_t = 60)]
    capacity: u32,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        load_instance(
            &self.network,
            &self.od,
            InstanceConfig {
                period: self.period,
                default_capacity: self.capacity,
            },
        )
    }

    fn record(&self, manifest: &mut Manifest) -> Result<()> {
        manifest.record_input("network", &self.network)?;
        manifest.record_input("od", &self.od)?;
        manifest.set_option("period", self.period);
        manifest.set_option("capacity", self.capacity);
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    /// Minimize operating cost subject to traffic-based frequency bounds.
    Cost,
    /// Joint frequency setting and link-level passenger flows.
    FlowLink,
    /// Joint frequency setting and line-level flows on a Change&Go network.
    FlowLine,
    /// Maximize direct travelers under a budget.
    Direct,
    /// One concept per demand season, coupled by a similarity bound.
    Multiperiod,
    /// Cost model against the upper demand bounds of a box uncertainty set.
    RobustBox,
}

impl FormulationArg {
    fn name(self) -> &'static str {
        match self {
            FormulationArg::Cost => "cost",
            FormulationArg::FlowLink => "flow-link",
            FormulationArg::FlowLine => "flow-line",
            FormulationArg::Direct => "direct",
            FormulationArg::Multiperiod => "multiperiod",
            FormulationArg::RobustBox => "robust-box",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Cost,
    TravelTime,
    /// cost + lambda * travel time; requires --lambda.
    Weighted,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    /// 1-norm of the frequency difference vector.
    FreqNorm,
    /// Number of lines selected in one season but not the other.
    LineSetDelta,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Line pool CSV: line_id,link_ids,cost_per_trip,...
    #[arg(long)]
    pool: PathBuf,
    /// Output directory for concept.csv, solution.json, summary.txt, manifest.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Branch-and-bound node limit.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Recorded in the manifest; reserved for randomized checks.
    #[arg(long)]
    seed: Option<u64>,

    /// Objective of the flow formulations.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::TravelTime)]
    objective: ObjectiveArg,
    /// Travel-time weight for --objective weighted.
    #[arg(long)]
    lambda: Option<f64>,
    /// Minutes charged per transfer in the flow-line formulation.
    #[arg(long, default_value_t = 5.0)]
    transfer_penalty: f64,
    /// Cap route times at this factor of the shortest possible time.
    #[arg(long)]
    max_detour: Option<f64>,

    /// Detour bound defining a direct connection (direct formulation).
    #[arg(long, default_value_t = 1.25)]
    detour_factor: f64,
    /// Budget on the summed per-trip cost of selected lines (direct
    /// formulation); without it, selection is governed by frequency bounds.
    #[arg(long)]
    budget: Option<f64>,

    /// Season demand CSV (repeat once per season; multiperiod formulation).
    #[arg(long = "season")]
    seasons: Vec<PathBuf>,
    /// Weight of each season, parallel to --season (default 1 each).
    #[arg(long = "season-weight")]
    season_weights: Vec<f64>,
    /// Similarity measure coupling the seasons.
    #[arg(long, value_enum, default_value_t = MeasureArg::FreqNorm)]
    measure: MeasureArg,
    /// Upper bound on the season-pair dissimilarity (default: uncoupled).
    #[arg(long, default_value_t = f64::INFINITY)]
    bound: f64,

    /// Uncertainty-set JSON (robust-box formulation).
    #[arg(long)]
    uncertainty: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Link,
    Line,
    Trip,
}

impl LevelArg {
    fn level(self) -> Level {
        match self {
            LevelArg::Link => Level::Link,
            LevelArg::Line => Level::Line,
            LevelArg::Trip => Level::Trip,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanKind {
    LinkFailure,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    pool: PathBuf,
    /// Line concept CSV: line_id,frequency.
    #[arg(long)]
    concept: PathBuf,
    /// Output directory for reports and manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Aggregation level of routing and capacity checking.
    #[arg(long, value_enum, default_value_t = LevelArg::Line)]
    level: LevelArg,
    /// Minutes charged per transfer when routing.
    #[arg(long, default_value_t = 5.0)]
    transfer_penalty: f64,
    /// Fare per unit of ridden link length; enables revenue/profit.
    #[arg(long)]
    fare: Option<f64>,
    /// Subsidy per routed passenger (requires --fare).
    #[arg(long, requires = "fare")]
    subsidy: Option<f64>,
    /// Exit 4 when the capacity check finds violations.
    #[arg(long)]
    strict: bool,
    /// Additional scan to run alongside the evaluation.
    #[arg(long, value_enum)]
    scan: Option<ScanKind>,
    /// Replace failed links by a slow bridge of this factor instead of
    /// removing them (scan sub-mode).
    #[arg(long)]
    bridge_factor: Option<f64>,
    /// Minutes charged per unserved passenger in the scan.
    #[arg(long)]
    penalty: Option<f64>,
    /// Uncertainty-set JSON; adds worst-case (and, with probabilities,
    /// expected-value) evaluation.
    #[arg(long)]
    uncertainty: Option<PathBuf>,
    /// Minutes charged per unit capacity deficit in uncertainty evaluation.
    #[arg(long)]
    deficit_weight: Option<f64>,
    /// Second concept CSV to compare against under all measures.
    #[arg(long)]
    dissimilar: Option<PathBuf>,
    /// Recorded in the manifest; reserved for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GeneratePoolArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output directory for pool.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Terminal pair `from:to` (repeatable). Defaults to all pairs of
    /// degree-1 stations.
    #[arg(long = "terminal")]
    terminals: Vec<String>,
    /// Candidate paths per terminal pair before the detour filter.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Keep paths up to this factor of the shortest terminal distance.
    #[arg(long, default_value_t = 1.5)]
    detour_factor: f64,
    /// Recorded in the manifest; reserved for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    /// Remove the failed link entirely.
    Reroute,
    /// Keep the link at --bridge-factor times its length.
    Bridge,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output directory for failure_scan.json/.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = PolicyArg::Reroute)]
    policy: PolicyArg,
    /// Slowdown factor of the bridge policy.
    #[arg(long, default_value_t = 2.0)]
    bridge_factor: f64,
    /// Minutes charged per unserved passenger.
    #[arg(long)]
    penalty: Option<f64>,
    /// Recorded in the manifest; reserved for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

// --------------------------------------------------------------------------
// JSON artifact shapes. Field order is output order; keep it stable.

#[derive(Serialize)]
struct SolutionArtifact {
    formulation: String,
    status: String,
    objective: Option<f64>,
    bound: Option<f64>,
    nodes: u64,
    seasons: Option<usize>,
}

#[derive(Serialize)]
struct TimeArtifact {
    driving: f64,
    waiting: f64,
    transfer: f64,
    adaption: f64,
    total: f64,
}

#[derive(Serialize)]
struct IndicatorArtifact {
    variable_cost: f64,
    fixed_cost: f64,
    vehicle_estimate: f64,
    vehicles_required: u32,
    coverage: f64,
    direct_travelers: f64,
    time: TimeArtifact,
    revenue: Option<f64>,
    profit: Option<f64>,
}

#[derive(Serialize)]
struct ViolationArtifact {
    arc: String,
    load: f64,
    capacity: f64,
    deficit: f64,
}

#[derive(Serialize)]
struct CapacityArtifact {
    level: String,
    feasible: bool,
    total_deficit: f64,
    violations: Vec<ViolationArtifact>,
}

#[derive(Serialize)]
struct LinkFailureArtifact {
    link: String,
    unserved: f64,
    detoured: f64,
    added_minutes: f64,
    impact: f64,
}

#[derive(Serialize)]
struct FailureArtifact {
    policy: String,
    unserved_penalty: f64,
    worst_link: Option<String>,
    worst_impact: f64,
    mean_impact: f64,
    links: Vec<LinkFailureArtifact>,
}

#[derive(Serialize)]
struct UncertaintyArtifact {
    kind: String,
    deficit_weight: f64,
    candidates: usize,
    heuristic: bool,
    worst_objective: f64,
    worst_travel_time: f64,
    worst_total_deficit: f64,
    /// The worst scenario's demand overrides as `[origin, destination, value]`.
    worst_scenario: Vec<(String, String, f64)>,
    expected_objective: Option<f64>,
}

#[derive(Serialize)]
struct DissimilarityArtifact {
    other: String,
    freq_norm_1: f64,
    freq_norm_2: f64,
    freq_norm_inf: f64,
    line_set_delta: f64,
    transport_distance: f64,
}

// --------------------------------------------------------------------------
// solve

/// Frequency bounds for cost-style models: static per-link bounds raised by
/// the traffic loads of shortest-path routing.
fn traffic_bounds(instance: &Instance) -> Result<FrequencyBounds> {
    let sp = shortest_paths_ptn(instance);
    if let Some(&(s, t)) = sp.unreachable.first() {
        return Err(Error::Validation(format!(
            "OD pair {} -> {} has no path in the network",
            instance.station_name(s),
            instance.station_name(t)
        )));
    }
    let loads = crate::routing::traffic_loads(instance, &sp);
    let mut bounds = FrequencyBounds::from_instance(instance);
    bounds.raise_lower(&traffic_lower_bounds(&loads, instance.default_capacity()));
    Ok(bounds)
}

fn solve_options(node_limit: Option<usize>) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(n) = node_limit {
        opts.node_limit = n;
    }
    opts
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let instance = args.instance.load()?;
    let pool = load_pool(&args.pool, &instance)?;
    std::fs::create_dir_all(&args.out)?;

    let mut manifest = Manifest::new("solve");
    args.instance.record(&mut manifest)?;
    manifest.record_input("pool", &args.pool)?;
    manifest.set_option("formulation", args.formulation.name());
    if let Some(n) = args.node_limit {
        manifest.set_option("node_limit", n);
    }
    manifest.seed = args.seed;

    let mut seasons_attached = None;
    let artifacts: FormulationArtifacts = match args.formulation {
        FormulationArg::Cost => {
            let bounds = traffic_bounds(&instance)?;
            build_cost_model(&instance, &pool, &bounds)
        }
        FormulationArg::FlowLink | FormulationArg::FlowLine => {
            let level = if args.formulation == FormulationArg::FlowLink {
                FlowLevel::Link
            } else {
                FlowLevel::Line
            };
            let mut config = FlowModelConfig::new(level);
            config.objective = match args.objective {
                ObjectiveArg::Cost => FlowObjective::Cost,
                ObjectiveArg::TravelTime => FlowObjective::TravelTime,
                ObjectiveArg::Weighted => {
                    let lambda = args.lambda.ok_or_else(|| {
                        Error::InvalidParameter(
                            "--objective weighted needs --lambda".into(),
                        )
                    })?;
                    manifest.set_option("lambda", lambda);
                    FlowObjective::Weighted(lambda)
                }
            };
            manifest.set_option(
                "objective",
                match args.objective {
                    ObjectiveArg::Cost => "cost",
                    ObjectiveArg::TravelTime => "travel-time",
                    ObjectiveArg::Weighted => "weighted",
                },
            );
            config.transfer_penalty = args.transfer_penalty;
            manifest.set_option("transfer_penalty", args.transfer_penalty);
            config.bounds = FrequencyBounds::from_instance(&instance);
            config.max_detour_factor = args.max_detour;
            if let Some(beta) = args.max_detour {
                manifest.set_option("max_detour", beta);
            }
            build_flow_model(&instance, &pool, &config)?
        }
        FormulationArg::Direct => {
            let budget = match args.budget {
                Some(b) => {
                    manifest.set_option("budget", b);
                    DirectBudget::Cost(b)
                }
                None => DirectBudget::FrequencyBounds(FrequencyBounds::from_instance(&instance)),
            };
            manifest.set_option("detour_factor", args.detour_factor);
            build_direct_traveler_model(&instance, &pool, args.detour_factor, &budget)?
        }
        FormulationArg::Multiperiod => {
            if args.seasons.is_empty() {
                return Err(Error::InvalidParameter(
                    "the multiperiod formulation needs at least two --season files".into(),
                ));
            }
            if !args.season_weights.is_empty()
                && args.season_weights.len() != args.seasons.len()
            {
                return Err(Error::InvalidParameter(format!(
                    "{} --season files but {} --season-weight values",
                    args.seasons.len(),
                    args.season_weights.len()
                )));
            }
            let mut seasons = Vec::with_capacity(args.seasons.len());
            for (j, path) in args.seasons.iter().enumerate() {
                let demand = load_od(path, &instance)?;
                let weight = args.season_weights.get(j).copied().unwrap_or(1.0);
                manifest.record_input(&format!("season_{j}"), path)?;
                manifest.set_option(&format!("season_{j}_weight"), weight);
                seasons.push(Season { demand, weight });
            }
            let measure = match args.measure {
                MeasureArg::FreqNorm => DissimilarityMeasure::FreqNorm(1.0),
                MeasureArg::LineSetDelta => DissimilarityMeasure::LineSetDelta,
            };
            manifest.set_option(
                "measure",
                match args.measure {
                    MeasureArg::FreqNorm => "freq-norm",
                    MeasureArg::LineSetDelta => "line-set-delta",
                },
            );
            manifest.set_option("bound", args.bound);
            seasons_attached = Some(seasons.len());
            build_multiperiod_model(&instance, &pool, &seasons, &measure, args.bound)?
        }
        FormulationArg::RobustBox => {
            let path = args.uncertainty.as_ref().ok_or_else(|| {
                Error::InvalidParameter(
                    "the robust-box formulation needs --uncertainty FILE".into(),
                )
            })?;
            let set = load_uncertainty(path, &instance)?;
            manifest.record_input("uncertainty", path)?;
            robust_cost_model_box(&instance, &pool, &set)?
        }
    };

    let opts = solve_options(args.node_limit);
    let formulation = args.formulation.name().to_string();
    let finite = |v: f64| v.is_finite().then_some(v);
    match artifacts.solve(&opts) {
        Ok(solution) => {
            let status = solution.status.as_str().to_string();
            let solved = solution.status == SolveStatus::Optimal;
            let artifact = SolutionArtifact {
                formulation: formulation.clone(),
                status: status.clone(),
                objective: solved.then_some(solution.objective_value),
                bound: finite(solution.bound),
                nodes: solution.nodes as u64,
                seasons: seasons_attached,
            };
            write_json(&args.out.join("solution.json"), &artifact)?;
            let mut summary = format!("formulation: {formulation}\nstatus: {status}\n");
            if solved {
                summary.push_str(&format!(
                    "objective: {}\n",
                    fmt6(solution.objective_value)
                ));
                if args.formulation == FormulationArg::Multiperiod {
                    let concepts = decode_multiperiod(&artifacts, &solution)?;
                    for (j, concept) in concepts.iter().enumerate() {
                        save_concept(
                            concept,
                            &pool,
                            &args.out.join(format!("concept_season_{j}.csv")),
                        )?;
                        summary.push_str(&format!(
                            "season {j}: {}\n",
                            describe_concept(concept, &pool)
                        ));
                    }
                } else {
                    let concept = artifacts.decode_concept(&solution)?;
                    save_concept(&concept, &pool, &args.out.join("concept.csv"))?;
                    summary.push_str(&format!(
                        "concept: {}\n",
                        describe_concept(&concept, &pool)
                    ));
                }
            }
            std::fs::write(args.out.join("summary.txt"), summary.as_bytes())?;
            manifest.write(&args.out)?;
            print!("{summary}");
            Ok(if solved { 0 } else { 2 })
        }
        Err(Error::NodeLimit { incumbent, bound }) => {
            let artifact = SolutionArtifact {
                formulation: formulation.clone(),
                status: "node-limit".into(),
                objective: incumbent.as_ref().map(|i| i.objective_value),
                bound: finite(bound),
                nodes: incumbent.as_ref().map(|i| i.nodes as u64).unwrap_or(0),
                seasons: seasons_attached,
            };
            write_json(&args.out.join("solution.json"), &artifact)?;
            let summary = format!(
                "formulation: {formulation}\nstatus: node-limit\nbound: {}\n",
                fmt6(bound)
            );
            std::fs::write(args.out.join("summary.txt"), summary.as_bytes())?;
            manifest.write(&args.out)?;
            print!("{summary}");
            Ok(3)
        }
        Err(e) => Err(e),
    }
}

/// `k of n lines selected (l1=2, l3=1)` — deterministic order.
fn describe_concept(concept: &LineConcept, pool: &LinePool) -> String {
    let parts: Vec<String> = pool
        .lines()
        .filter(|(l, _)| concept.is_selected(*l))
        .map(|(l, line)| format!("{}={}", line.id(), concept.frequency(l)))
        .collect();
    format!(
        "{} of {} lines selected ({})",
        concept.selected_count(),
        pool.len(),
        parts.join(", ")
    )
}

// --------------------------------------------------------------------------
// evaluate

/// Routes demand for evaluation. Capacities are respected when possible;
/// when the concept cannot carry everything, passengers fall back to their
/// fastest routes so the capacity report can show the overloads.
fn evaluation_routing(
    instance: &Instance,
    pool: &LinePool,
    concept: &LineConcept,
    level: Level,
    transfer_penalty: f64,
) -> Result<RoutingResult> {
    if level == Level::Link {
        return Ok(route_link_level(instance));
    }
    let cgn = build_cgn(
        instance,
        pool,
        &TransferModel::Fixed(transfer_penalty),
        &AdaptionModel::None,
    )?;
    let line_routes = match route_line_level(instance, pool, &cgn, CapacityMode::Enforce(concept))
    {
        Ok(r) => r,
        Err(Error::Infeasible(_)) => {
            route_line_level(instance, pool, &cgn, CapacityMode::Ignore)?
        }
        Err(e) => return Err(e),
    };
    if level == Level::Line {
        return Ok(line_routes);
    }
    let timetable = Timetable::regular(pool, concept, instance.period());
    assign_trips(instance, pool, &timetable, &line_routes)
}

fn capacity_artifact(
    report: &CapacityReport,
    instance: &Instance,
    pool: &LinePool,
) -> CapacityArtifact {
    CapacityArtifact {
        level: report.level.as_str().to_string(),
        feasible: report.feasible,
        total_deficit: report.total_deficit(),
        violations: report
            .violations
            .iter()
            .map(|v| ViolationArtifact {
                arc: v.arc.describe(instance, pool),
                load: v.load,
                capacity: v.capacity,
                deficit: v.deficit,
            })
            .collect(),
    }
}

fn indicator_artifact(report: &IndicatorReport) -> IndicatorArtifact {
    IndicatorArtifact {
        variable_cost: report.variable_cost,
        fixed_cost: report.fixed_cost,
        vehicle_estimate: report.vehicle_estimate,
        vehicles_required: report.vehicles_required,
        coverage: report.coverage,
        direct_travelers: report.direct_travelers,
        time: TimeArtifact {
            driving: report.time_components.driving,
            waiting: report.time_components.waiting,
            transfer: report.time_components.transfer,
            adaption: report.time_components.adaption,
            total: report.time_components.total(),
        },
        revenue: report.revenue,
        profit: report.profit,
    }
}

fn failure_artifact(scan: &FailureScan, instance: &Instance, policy: &str) -> FailureArtifact {
    FailureArtifact {
        policy: policy.to_string(),
        unserved_penalty: scan.penalty,
        worst_link: scan.worst_link.map(|a| instance.link(a).id.clone()),
        worst_impact: scan.worst_impact,
        mean_impact: scan.mean_impact,
        links: scan
            .records
            .iter()
            .map(|r| LinkFailureArtifact {
                link: instance.link(r.link).id.clone(),
                unserved: r.unserved,
                detoured: r.detoured,
                added_minutes: r.added_minutes,
                impact: r.impact,
            })
            .collect(),
    }
}

fn run_failure_scan(
    instance: &Instance,
    bridge_factor: Option<f64>,
    penalty: Option<f64>,
    out: &Path,
) -> Result<FailureArtifact> {
    let policy = match bridge_factor {
        Some(factor) => FailurePolicy::Bridge(factor),
        None => FailurePolicy::Reroute,
    };
    let policy_name = match policy {
        FailurePolicy::Reroute => "reroute".to_string(),
        FailurePolicy::Bridge(f) => format!("bridge({})", fmt6(f)),
    };
    let config = FailureScanConfig {
        policy,
        unserved_penalty: penalty,
    };
    let scan = link_failure_scan(instance, &config)?;
    let artifact = failure_artifact(&scan, instance, &policy_name);
    write_json(&out.join("failure_scan.json"), &artifact)?;
    let rows: Vec<Vec<String>> = artifact
        .links
        .iter()
        .map(|r| {
            vec![
                r.link.clone(),
                fmt6(r.unserved),
                fmt6(r.detoured),
                fmt6(r.added_minutes),
                fmt6(r.impact),
            ]
        })
        .collect();
    write_csv(
        &out.join("failure_scan.csv"),
        &["link", "unserved", "detoured", "added_minutes", "impact"],
        &rows,
    )?;
    Ok(artifact)
}

fn uncertainty_kind(set: &DemandUncertainty) -> &'static str {
    match set {
        DemandUncertainty::Discrete { .. } => "discrete",
        DemandUncertainty::Box { .. } => "box",
        DemandUncertainty::Gamma { .. } => "gamma",
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<i32> {
    let instance = args.instance.load()?;
    let pool = load_pool(&args.pool, &instance)?;
    let concept = load_concept(&args.concept, &pool)?;
    std::fs::create_dir_all(&args.out)?;

    let mut manifest = Manifest::new("evaluate");
    args.instance.record(&mut manifest)?;
    manifest.record_input("pool", &args.pool)?;
    manifest.record_input("concept", &args.concept)?;
    let level = args.level.level();
    manifest.set_option("level", level.as_str());
    manifest.set_option("transfer_penalty", args.transfer_penalty);
    manifest.seed = args.seed;

    let routing = evaluation_routing(
        &instance,
        &pool,
        &concept,
        level,
        args.transfer_penalty,
    )?;

    let fares = args.fare.map(|fare| {
        manifest.set_option("fare", fare);
        let subsidy = args.subsidy.unwrap_or(0.0);
        manifest.set_option("subsidy", subsidy);
        FareSchedule {
            fare_per_length: fare,
            subsidy_per_passenger: subsidy,
        }
    });
    let indicator_report = indicators(&instance, &pool, &concept, &routing, fares.as_ref());
    let indicator_art = indicator_artifact(&indicator_report);
    write_json(&args.out.join("indicators.json"), &indicator_art)?;
    let mut rows = vec![
        vec!["variable_cost".to_string(), fmt6(indicator_art.variable_cost)],
        vec!["fixed_cost".to_string(), fmt6(indicator_art.fixed_cost)],
        vec![
            "vehicle_estimate".to_string(),
            fmt6(indicator_art.vehicle_estimate),
        ],
        vec![
            "vehicles_required".to_string(),
            indicator_art.vehicles_required.to_string(),
        ],
        vec!["coverage".to_string(), fmt6(indicator_art.coverage)],
        vec![
            "direct_travelers".to_string(),
            fmt6(indicator_art.direct_travelers),
        ],
        vec!["time_driving".to_string(), fmt6(indicator_art.time.driving)],
        vec!["time_waiting".to_string(), fmt6(indicator_art.time.waiting)],
        vec!["time_transfer".to_string(), fmt6(indicator_art.time.transfer)],
        vec!["time_adaption".to_string(), fmt6(indicator_art.time.adaption)],
        vec!["time_total".to_string(), fmt6(indicator_art.time.total)],
    ];
    if let Some(revenue) = indicator_art.revenue {
        rows.push(vec!["revenue".to_string(), fmt6(revenue)]);
    }
    if let Some(profit) = indicator_art.profit {
        rows.push(vec!["profit".to_string(), fmt6(profit)]);
    }
    write_csv(&args.out.join("indicators.csv"), &["key", "value"], &rows)?;

    let capacity_report = check_capacity(&pool, &concept, &routing, level)?;
    let capacity_art = capacity_artifact(&capacity_report, &instance, &pool);
    write_json(
        &args.out.join(format!("capacity_{}.json", level.as_str())),
        &capacity_art,
    )?;

    if let Some(ScanKind::LinkFailure) = args.scan {
        manifest.set_option("scan", "link-failure");
        run_failure_scan(&instance, args.bridge_factor, args.penalty, &args.out)?;
    }

    if let Some(path) = &args.uncertainty {
        manifest.record_input("uncertainty", path)?;
        let set = load_uncertainty(path, &instance)?;
        let config = EvalConfig {
            deficit_weight: args.deficit_weight,
        };
        let worst = worst_case_eval(&instance, &pool, &concept, &set, &config)?;
        let expected = match &set {
            DemandUncertainty::Discrete {
                probabilities: Some(_),
                ..
            } => Some(expected_eval(&instance, &pool, &concept, &set, &config)?),
            _ => None,
        };
        let artifact = UncertaintyArtifact {
            kind: uncertainty_kind(&set).to_string(),
            deficit_weight: worst.deficit_weight,
            candidates: worst.candidates,
            heuristic: worst.heuristic,
            worst_objective: worst.worst.objective,
            worst_travel_time: worst.worst.travel_time,
            worst_total_deficit: worst.worst.total_deficit,
            worst_scenario: worst
                .worst
                .scenario
                .iter()
                .map(|(&(s, t), &v)| {
                    (
                        instance.station_name(s).to_string(),
                        instance.station_name(t).to_string(),
                        v,
                    )
                })
                .collect(),
            expected_objective: expected.map(|e| e.expected_objective),
        };
        write_json(&args.out.join("uncertainty.json"), &artifact)?;
    }

    if let Some(path) = &args.dissimilar {
        manifest.record_input("dissimilar", path)?;
        let other = load_concept(path, &pool)?;
        let measure = |m: DissimilarityMeasure| concept_dissimilarity(&pool, &concept, &other, &m);
        let artifact = DissimilarityArtifact {
            other: path.display().to_string(),
            freq_norm_1: measure(DissimilarityMeasure::FreqNorm(1.0))?,
            freq_norm_2: measure(DissimilarityMeasure::FreqNorm(2.0))?,
            freq_norm_inf: measure(DissimilarityMeasure::FreqNorm(f64::INFINITY))?,
            line_set_delta: measure(DissimilarityMeasure::LineSetDelta)?,
            transport_distance: measure(DissimilarityMeasure::TransportDistance)?,
        };
        write_json(&args.out.join("dissimilarity.json"), &artifact)?;
    }

    manifest.write(&args.out)?;
    println!(
        "level: {}\nfeasible: {}\ntotal deficit: {}",
        level.as_str(),
        capacity_report.feasible,
        fmt6(capacity_report.total_deficit())
    );
    if args.strict && !capacity_report.feasible {
        Ok(4)
    } else {
        Ok(0)
    }
}

// --------------------------------------------------------------------------
// generate-pool

fn cmd_generate_pool(args: GeneratePoolArgs) -> Result<i32> {
    let instance = args.instance.load()?;
    std::fs::create_dir_all(&args.out)?;

    let mut manifest = Manifest::new("generate-pool");
    args.instance.record(&mut manifest)?;
    manifest.set_option("k", args.k);
    manifest.set_option("detour_factor", args.detour_factor);
    manifest.seed = args.seed;

    let terminals: Vec<(String, String)> = if args.terminals.is_empty() {
        default_terminals(&instance)?
    } else {
        args.terminals
            .iter()
            .map(|spec| {
                spec.split_once(':')
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "terminal `{spec}` is not of the form from:to"
                        ))
                    })
            })
            .collect::<Result<_>>()?
    };
    manifest.set_option(
        "terminals",
        terminals
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect::<Vec<_>>()
            .join(","),
    );

    let pool = generate_pool(
        &instance,
        &terminals,
        PoolGenConfig {
            k: args.k,
            detour_factor: args.detour_factor,
        },
    )?;
    save_pool(&pool, &instance, &args.out.join("pool.csv"))?;
    manifest.write(&args.out)?;
    println!("generated {} candidate lines", pool.len());
    Ok(0)
}

/// All unordered pairs of degree-1 stations, in station order.
fn default_terminals(instance: &Instance) -> Result<Vec<(String, String)>> {
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for (_, link) in instance.links() {
        *degree.entry(link.from.0).or_insert(0) += 1;
        *degree.entry(link.to.0).or_insert(0) += 1;
    }
    let ends: Vec<String> = (0..instance.station_count())
        .filter(|s| degree.get(s).copied().unwrap_or(0) == 1)
        .map(|s| instance.station_name(crate::network::StationId(s)).to_string())
        .collect();
    if ends.len() < 2 {
        return Err(Error::InvalidParameter(
            "no terminal pairs: give --terminal from:to (the network has fewer \
             than two degree-1 stations)"
                .into(),
        ));
    }
    let mut pairs = Vec::new();
    for i in 0..ends.len() {
        for j in (i + 1)..ends.len() {
            pairs.push((ends[i].clone(), ends[j].clone()));
        }
    }
    Ok(pairs)
}

// --------------------------------------------------------------------------
// scan

fn cmd_scan(args: ScanArgs) -> Result<i32> {
    let instance = args.instance.load()?;
    std::fs::create_dir_all(&args.out)?;

    let mut manifest = Manifest::new("scan");
    args.instance.record(&mut manifest)?;
    manifest.set_option(
        "policy",
        match args.policy {
            PolicyArg::Reroute => "reroute".to_string(),
            PolicyArg::Bridge => format!("bridge({})", fmt6(args.bridge_factor)),
        },
    );
    if let Some(p) = args.penalty {
        manifest.set_option("penalty", p);
    }
    manifest.seed = args.seed;

    let bridge = match args.policy {
        PolicyArg::Reroute => None,
        PolicyArg::Bridge => Some(args.bridge_factor),
    };
    let scan = run_failure_scan(&instance, bridge, args.penalty, &args.out)?;
    manifest.write(&args.out)?;
    println!(
        "worst link: {}\nworst impact: {}",
        scan.worst_link.as_deref().unwrap_or("-"),
        fmt6(scan.worst_impact)
    );
    Ok(0)
}

//! Seeded scenarios, the three-way benchmark and its reports.

mod config;
mod report;
mod runner;
mod scenarios;

pub use config::{default_lambda_grid, ExperimentConfig, ModelConfigs};
pub use report::{
    emit_outputs, frontier, frontier_svg, read_metrics, scatter_svg, summarize, write_metrics, FrontierPoint,
    SummaryRow,
};
pub use runner::{
    combined_score, p_transformer_readout, run_benchmark, run_seed, BenchmarkOutcome, MetricsRow, ScatterData,
    SeedResult, MLP, MODEL_NAMES, P_TRANSFORMER, TRANSFORMER,
};
pub use scenarios::{
    curve_scenario_with, gen_convex_scenario, gen_nonconvex_scenario, gen_sphere_scenario, generate_scenario,
    sphere_scenario_with, ConvexMap, CurveMap, Scenario, ScenarioKind, ScenarioSize, SphereMap, TargetFn,
    SPHERE_INPUT_DIM,
};

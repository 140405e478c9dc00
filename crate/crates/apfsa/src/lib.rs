//! Scenario files, benchmark campaigns and CSV/SVG output for `apfsa-core`.

pub mod campaign;
pub mod output;
pub mod scenario;
pub mod svg;

pub use campaign::{
    run_campaign, run_campaign_with, run_trial, Algorithm, CampaignOptions, TrialOutcome,
    TrialStats,
};
pub use output::{read_stats_csv, write_stats_csv, write_trace_csv, OutputError, StatsRecord};
pub use scenario::{load_scenario, parse_scenario, Scenario, ScenarioError};
pub use svg::{render_svg, write_svg, Projection};

//! Repeated seeded trials and their summary statistics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use apfsa_core::{
    plan, plan_rrt, plan_rrt_star, ApfMode, PlanError, PlanResult, PlanStatus, RngStream,
};
use rayon::prelude::*;

use crate::scenario::Scenario;

/// Environment variable capping campaign worker threads. `0` runs trials
/// sequentially on the calling thread.
pub const THREADS_ENV: &str = "APFSA_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Apf,
    ApfSa,
    Rrt,
    RrtStar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Apf,
        Algorithm::ApfSa,
        Algorithm::Rrt,
        Algorithm::RrtStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Apf => "apf",
            Algorithm::ApfSa => "apf-sa",
            Algorithm::Rrt => "rrt",
            Algorithm::RrtStar => "rrt-star",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm `{0}` (expected apf, apf-sa, rrt or rrt-star)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownAlgorithm(s.to_owned()))
    }
}

/// Runs one trial with a fresh stream seeded by `seed`.
pub fn run_trial(
    scenario: &Scenario,
    algorithm: Algorithm,
    seed: u64,
) -> Result<PlanResult, PlanError> {
    let mut rng = RngStream::new(seed);
    let Scenario {
        scene,
        field,
        uav,
        sa,
        rrt,
        ..
    } = scenario;
    let started = Instant::now();
    let mut result = match algorithm {
        Algorithm::Apf => plan(scene, field, uav, sa, ApfMode::ClassicApf, &mut rng),
        Algorithm::ApfSa => plan(scene, field, uav, sa, ApfMode::ApfSa, &mut rng),
        Algorithm::Rrt => plan_rrt(scene, rrt, uav, &mut rng),
        Algorithm::RrtStar => plan_rrt_star(scene, rrt, uav, &mut rng),
    }?;
    result.elapsed = started.elapsed().as_secs_f64();
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignOptions {
    /// `None` uses rayon's global pool; `Some(0)` is sequential.
    pub threads: Option<usize>,
    /// Record wall-clock time. Off by default so repeated campaigns are
    /// byte-identical.
    pub timing: bool,
}


impl CampaignOptions {
    /// Defaults with the thread cap taken from `APFSA_THREADS` when it parses.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok());
        Self {
            threads,
            ..Self::default()
        }
    }
}

/// Outcome of a single seeded trial, reduced to what the statistics need.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    /// `None` when the planner rejected its inputs.
    pub status: Option<PlanStatus>,
    pub path_length: f64,
    pub steps: usize,
    pub escapes: usize,
    pub elapsed: f64,
}

impl TrialOutcome {
    fn from_result(seed: u64, result: Result<PlanResult, PlanError>, timing: bool) -> Self {
        match result {
            Ok(r) => TrialOutcome {
                seed,
                status: Some(r.status),
                path_length: r.path_length,
                steps: r.waypoints.len().saturating_sub(1),
                escapes: r.escape_events.len(),
                elapsed: if timing { r.elapsed } else { 0.0 },
            },
            Err(_) => TrialOutcome {
                seed,
                status: None,
                path_length: 0.0,
                steps: 0,
                escapes: 0,
                elapsed: 0.0,
            },
        }
    }

    pub fn reached(&self) -> bool {
        self.status == Some(PlanStatus::Reached)
    }

    pub fn status_label(&self) -> &'static str {
        self.status.map_or("error", PlanStatus::as_str)
    }
}

/// Per-algorithm campaign summary. Length and time figures cover reached
/// runs only and are NaN when nothing reached the goal.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub algorithm: Algorithm,
    pub n_runs: usize,
    pub n_reached: usize,
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub mean_steps: f64,
    pub mean_elapsed: f64,
    pub seeds: Vec<u64>,
    /// Count of runs per final status, reached included.
    pub outcomes: BTreeMap<&'static str, usize>,
    pub total_escapes: usize,
}

impl TrialStats {
    /// Folds outcomes in seed order, so the result does not depend on the
    /// order trials finished in.
    pub fn from_outcomes(algorithm: Algorithm, outcomes: &[TrialOutcome]) -> Self {
        let mut sorted: Vec<&TrialOutcome> = outcomes.iter().collect();
        sorted.sort_by_key(|o| o.seed);

        let mut counts = BTreeMap::new();
        let (mut best, mut worst) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut length_sum, mut steps_sum, mut elapsed_sum) = (0.0, 0.0, 0.0);
        let mut n_reached = 0;
        let mut total_escapes = 0;
        for o in &sorted {
            *counts.entry(o.status_label()).or_insert(0) += 1;
            total_escapes += o.escapes;
            if o.reached() {
                n_reached += 1;
                best = best.min(o.path_length);
                worst = worst.max(o.path_length);
                length_sum += o.path_length;
                steps_sum += o.steps as f64;
                elapsed_sum += o.elapsed;
            }
        }
        let per_run = |sum: f64| {
            if n_reached == 0 {
                f64::NAN
            } else {
                sum / n_reached as f64
            }
        };
        if n_reached == 0 {
            best = f64::NAN;
            worst = f64::NAN;
        }
        TrialStats {
            algorithm,
            n_runs: sorted.len(),
            n_reached,
            best,
            worst,
            mean: per_run(length_sum),
            mean_steps: per_run(steps_sum),
            mean_elapsed: per_run(elapsed_sum),
            seeds: sorted.iter().map(|o| o.seed).collect(),
            outcomes: counts,
            total_escapes,
        }
    }
}

fn run_seeds(
    scenario: &Scenario,
    algorithm: Algorithm,
    seeds: &[u64],
    timing: bool,
) -> Vec<TrialOutcome> {
    let one =
        |&seed: &u64| TrialOutcome::from_result(seed, run_trial(scenario, algorithm, seed), timing);
    seeds.iter().map(one).collect()
}

fn run_seeds_parallel(
    scenario: &Scenario,
    algorithm: Algorithm,
    seeds: &[u64],
    timing: bool,
) -> Vec<TrialOutcome> {
    seeds
        .par_iter()
        .map(|&seed| TrialOutcome::from_result(seed, run_trial(scenario, algorithm, seed), timing))
        .collect()
}

/// Raw per-seed outcomes for every algorithm, seeds `base_seed..base_seed + n_runs`.
pub fn run_outcomes(
    scenario: &Scenario,
    algorithms: &[Algorithm],
    n_runs: usize,
    base_seed: u64,
    options: &CampaignOptions,
) -> Vec<(Algorithm, Vec<TrialOutcome>)> {
    let seeds: Vec<u64> = (0..n_runs as u64)
        .map(|i| base_seed.wrapping_add(i))
        .collect();
    let timing = options.timing;
    let run_all = || {
        algorithms
            .iter()
            .map(|&a| (a, run_seeds_parallel(scenario, a, &seeds, timing)))
            .collect::<Vec<_>>()
    };
    match options.threads {
        Some(0) => algorithms
            .iter()
            .map(|&a| (a, run_seeds(scenario, a, &seeds, timing)))
            .collect(),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run_all),
            Err(_) => algorithms
                .iter()
                .map(|&a| (a, run_seeds(scenario, a, &seeds, timing)))
                .collect(),
        },
        None => run_all(),
    }
}

pub fn run_campaign_with(
    scenario: &Scenario,
    algorithms: &[Algorithm],
    n_runs: usize,
    base_seed: u64,
    options: &CampaignOptions,
) -> Vec<TrialStats> {
    run_outcomes(scenario, algorithms, n_runs, base_seed, options)
        .into_iter()
        .map(|(a, outcomes)| TrialStats::from_outcomes(a, &outcomes))
        .collect()
}

/// Campaign with options from the environment and timing disabled.
pub fn run_campaign(
    scenario: &Scenario,
    algorithms: &[Algorithm],
    n_runs: usize,
    base_seed: u64,
) -> Vec<TrialStats> {
    run_campaign_with(
        scenario,
        algorithms,
        n_runs,
        base_seed,
        &CampaignOptions::from_env(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(seed: u64, status: PlanStatus, length: f64, steps: usize) -> TrialOutcome {
        TrialOutcome {
            seed,
            status: Some(status),
            path_length: length,
            steps,
            escapes: 0,
            elapsed: 0.0,
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("astar".parse::<Algorithm>().is_err());
    }

    #[test]
    fn stats_cover_reached_runs_only() {
        let runs = [
            outcome(3, PlanStatus::Reached, 12.0, 12),
            outcome(1, PlanStatus::Stalled, 500.0, 500),
            outcome(2, PlanStatus::Reached, 10.0, 10),
        ];
        let s = TrialStats::from_outcomes(Algorithm::ApfSa, &runs);
        assert_eq!((s.n_runs, s.n_reached), (3, 2));
        assert_eq!(
            (s.best, s.worst, s.mean, s.mean_steps),
            (10.0, 12.0, 11.0, 11.0)
        );
        assert_eq!(s.seeds, vec![1, 2, 3]);
        assert_eq!(s.outcomes.get("stalled"), Some(&1));
    }

    #[test]
    fn no_reached_runs_gives_nan_lengths() {
        let s =
            TrialStats::from_outcomes(Algorithm::Apf, &[outcome(0, PlanStatus::Stalled, 4.0, 4)]);
        assert_eq!(s.n_reached, 0);
        assert!(s.best.is_nan() && s.mean.is_nan() && s.worst.is_nan());
    }

    #[test]
    fn aggregation_ignores_input_order() {
        let mut runs: Vec<_> = (0..20)
            .map(|i| outcome(i, PlanStatus::Reached, 1.0 + (i as f64) * 0.1, 3))
            .collect();
        let a = TrialStats::from_outcomes(Algorithm::Rrt, &runs);
        runs.reverse();
        runs.swap(3, 11);
        let b = TrialStats::from_outcomes(Algorithm::Rrt, &runs);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a, b);
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::chain::chain_endpoint;
use super::degree::{root_degree_with, DegreeOutcome};
use super::disk::{boltzmann_disk_with, DEFAULT_DISK_BUDGET};
use super::law::PeelingLaw;
use super::stream_rng;
use crate::error::Result;
use crate::hyper_constants::{d_of_h, drift};

/// Monte Carlo mean with its standard error. Replication r uses stream r of
/// the generator seeded with `seed`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub std_error: f64,
    pub replications: u64,
    pub seed: u64,
    pub target: f64,
    pub z_score: f64,
    /// Replications dropped (step budget exceeded).
    pub excluded: u64,
}

impl EstimateReport {
    pub fn from_samples(samples: &[f64], seed: u64, target: f64, excluded: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std_error = (var / n).sqrt();
        EstimateReport {
            mean,
            std_error,
            replications: samples.len() as u64,
            seed,
            target,
            z_score: (mean - target) / std_error,
            excluded,
        }
    }

    pub fn within(&self, k_se: f64) -> bool {
        self.z_score.abs() <= k_se
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftEstimate {
    pub steps: u64,
    pub perimeter: EstimateReport,
    pub volume: EstimateReport,
}

/// P(k)/k and V(k)/k over independent replications.
pub fn estimate_drift(law: &PeelingLaw, k_steps: u64, reps: u64, seed: u64) -> Result<DriftEstimate> {
    let target = drift(law.lambda())?;
    let ends: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = chain_endpoint(law, k_steps, &mut stream_rng(seed, r))?;
            Ok((s.perimeter as f64 / k_steps as f64, s.volume as f64 / k_steps as f64))
        })
        .collect::<Result<_>>()?;
    let ps: Vec<f64> = ends.iter().map(|e| e.0).collect();
    let vs: Vec<f64> = ends.iter().map(|e| e.1).collect();
    Ok(DriftEstimate {
        steps: k_steps,
        perimeter: EstimateReport::from_samples(&ps, seed, target.p_rate, 0),
        volume: EstimateReport::from_samples(&vs, seed, target.v_rate, 0),
    })
}

/// Mean of 1/deg(ρ), with target d(λ).
pub fn estimate_inverse_degree(law: &PeelingLaw, reps: u64, seed: u64, budget: u64) -> Result<EstimateReport> {
    let outcomes: Vec<DegreeOutcome> = (0..reps)
        .into_par_iter()
        .map(|r| root_degree_with(law, &mut stream_rng(seed, r), budget))
        .collect::<Result<_>>()?;
    let samples: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match o {
            DegreeOutcome::Degree(d) => Some(1.0 / *d as f64),
            DegreeOutcome::Timeout => None,
        })
        .collect();
    let excluded = reps - samples.len() as u64;
    Ok(EstimateReport::from_samples(&samples, seed, d_of_h(law.params.h), excluded))
}

/// Inner-vertex counts of Boltzmann p-gons; the target is supplied by the caller.
pub fn disk_volumes(law: &PeelingLaw, p: usize, reps: u64, seed: u64) -> Result<Vec<u64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            boltzmann_disk_with(law, p, &mut stream_rng(seed, r), DEFAULT_DISK_BUDGET)
                .map(|d| d.inner_vertices)
        })
        .collect()
}

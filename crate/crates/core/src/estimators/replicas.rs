use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{init_stationary, LatticeState, StepObserver, Stepper};
use crate::error::{Error, Result};
use crate::fields::{FieldTracker, TrackerConfig, TrackerSet, TrajectoryFunctionals};
use crate::special::ModelParams;

/// Stream for replica `index`: the ChaCha key comes from `master_seed` and
/// the replica index selects the stream, so draws never depend on how
/// replicas are scheduled.
pub fn replica_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaPlan {
    pub replicas: u64,
    pub master_seed: u64,
    pub params: ModelParams,
}

impl ReplicaPlan {
    pub fn new(replicas: u64, master_seed: u64, params: ModelParams) -> Result<Self> {
        if replicas == 0 {
            return Err(Error::InvalidParams("replicas must be at least 1".into()));
        }
        Ok(Self {
            replicas,
            master_seed,
            params,
        })
    }

    /// Runs `job` once per replica (in parallel) and returns the results in
    /// replica order. The first failing replica, by index, is reported.
    pub fn map<T, F>(&self, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
    {
        let results: Vec<Result<T>> = (0..self.replicas)
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_rng(self.master_seed, i);
                job(i, &mut rng)
            })
            .collect();
        results
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.map_err(|e| Error::ReplicaAborted {
                    replica: i as u64,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// Evolves one stationary replica over `params.steps()` steps with one
/// tracker per config.
pub fn simulate_replica<R: rand::Rng + ?Sized>(
    params: &ModelParams,
    configs: &[TrackerConfig],
    rng: &mut R,
) -> Result<(LatticeState, Vec<TrajectoryFunctionals>)> {
    let initial = init_stationary(params, rng);
    let trackers = configs
        .iter()
        .map(|c| FieldTracker::new(c.clone(), params, &initial))
        .collect::<Result<Vec<_>>>()?;
    let mut set = TrackerSet(trackers);
    let mut stepper = Stepper::new(*params, initial)?;
    stepper.run(params.steps(), rng, &mut set as &mut dyn StepObserver)?;
    let out = set.0.into_iter().map(|t| t.into_functionals()).collect();
    Ok((stepper.into_state(), out))
}

/// [`simulate_replica`] for every replica of the plan.
pub fn run_replicas(
    plan: &ReplicaPlan,
    configs: &[TrackerConfig],
) -> Result<Vec<Vec<TrajectoryFunctionals>>> {
    plan.map(|_, rng| simulate_replica(&plan.params, configs, rng).map(|(_, f)| f))
}

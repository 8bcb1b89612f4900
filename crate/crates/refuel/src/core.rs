//! Domain types and the auxiliary function.
//!
//! A job models one airplane: `p` is its fuel consumption rate read as an
//! integer processing time, `w` its tank volume read as a weight. A schedule
//! maximizes the payoff `sum w_j / C_j`, the negation of the minimized cost
//! `sum -w_j / C_j`; both orientations rank permutations identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type JobId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    /// Processing time, a positive integer number of time units.
    pub p: u64,
    /// Weight; positive and finite.
    pub w: f64,
}

impl Job {
    pub fn new(id: JobId, p: u64, w: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::BadProcessingTime { id, p });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::BadWeight { id, w });
        }
        Ok(Job { id, p, w })
    }

    /// The auxiliary function `phi(t) = w / (p (p + t))`, strictly
    /// decreasing in `t` and strictly positive.
    pub fn phi<S: Scalar>(&self, t: &S) -> S {
        let p = S::from_int(self.p);
        S::from_weight(self.w) / (p.clone() * (p + t.clone()))
    }
}

/// `phi` in plain floating point.
pub fn phi(job: &Job, t: f64) -> f64 {
    job.phi(&t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct InstanceMeta {
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    jobs: Vec<Job>,
    horizon: u64,
    pub meta: InstanceMeta,
}

impl Instance {
    /// Builds an instance from jobs whose ids must be exactly `0..n`.
    pub fn new(jobs: Vec<Job>) -> Result<Self> {
        let n = jobs.len();
        let mut seen = vec![false; n];
        for job in &jobs {
            if job.id >= n || seen[job.id] {
                return Err(Error::BadIds { n });
            }
            seen[job.id] = true;
        }
        let horizon = jobs.iter().map(|j| j.p).sum();
        let meta = InstanceMeta {
            n,
            sigma: 0.0,
            seed: 0,
        };
        Ok(Instance {
            jobs,
            horizon,
            meta,
        })
    }

    /// Builds an instance from `(p, w)` pairs, assigning ids in order.
    pub fn from_params(params: &[(u64, f64)]) -> Result<Self> {
        let jobs = params
            .iter()
            .enumerate()
            .map(|(id, &(p, w))| Job::new(id, p, w))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(jobs)
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> &Job {
        &self.jobs[id]
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    /// Total processing time `T`.
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.display().to_string(),
            source,
        })?;
        let jobs = file
            .jobs
            .into_iter()
            .map(|r| Job::new(r.id, r.p, r.w))
            .collect::<Result<Vec<_>>>()?;
        let mut instance = Instance::new(jobs)?;
        instance.meta = file.meta;
        Ok(instance)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = InstanceFile {
            meta: self.meta,
            jobs: self
                .jobs
                .iter()
                .map(|j| JobRecord {
                    id: j.id,
                    p: j.p,
                    w: j.w,
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&file).expect("instance serializes");
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    meta: InstanceMeta,
    jobs: Vec<JobRecord>,
}

#[derive(Serialize, Deserialize)]
struct JobRecord {
    id: JobId,
    p: u64,
    w: f64,
}

/// Checks that `order` is a permutation of the instance's job ids.
pub fn check_permutation(instance: &Instance, order: &[JobId]) -> Result<()> {
    if order.len() != instance.len() {
        return Err(Error::MalformedPermutation);
    }
    let mut seen = vec![false; instance.len()];
    for &id in order {
        if id >= instance.len() || seen[id] {
            return Err(Error::MalformedPermutation);
        }
        seen[id] = true;
    }
    Ok(())
}

/// Payoff `sum w_j / (t_j + p_j)` of processing `order` starting at
/// `base_time`, in the chosen backend. Larger is better.
pub fn schedule_payoff_in<S: Scalar>(
    instance: &Instance,
    order: &[JobId],
    base_time: S,
) -> Result<S> {
    check_permutation(instance, order)?;
    let mut t = base_time;
    let mut payoff = S::zero();
    for &id in order {
        let job = instance.job(id);
        let completion = t.clone() + S::from_int(job.p);
        payoff = payoff + S::from_weight(job.w) / completion.clone();
        t = completion;
    }
    Ok(payoff)
}

pub fn schedule_payoff(instance: &Instance, order: &[JobId], base_time: f64) -> Result<f64> {
    schedule_payoff_in(instance, order, base_time)
}

/// Payoff change from swapping adjacent jobs `i, j` when `i` starts at `t`:
/// `F(A i j B) - F(A j i B) = p_i p_j / (p_i + p_j + t) * (phi_i(t) - phi_j(t))`.
pub fn swap_delta_in<S: Scalar>(i: &Job, j: &Job, t: &S) -> S {
    let pi = S::from_int(i.p);
    let pj = S::from_int(j.p);
    let factor = pi.clone() * pj.clone() / (pi + pj + t.clone());
    factor * (i.phi(t) - j.phi(t))
}

pub fn swap_delta(i: &Job, j: &Job, t: f64) -> f64 {
    swap_delta_in(i, j, &t)
}

/// The drop-out order is the reverse of the processing order: the first job
/// to complete in the scheduling view is the last airplane to leave the
/// fleet.
pub fn to_dropout_order(order: &[JobId]) -> Vec<JobId> {
    order.iter().rev().copied().collect()
}

/// A permutation with its derived start times and payoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub order: Vec<JobId>,
    pub starts: Vec<f64>,
    pub payoff: f64,
}

impl Schedule {
    pub fn from_order(instance: &Instance, order: &[JobId], base_time: f64) -> Result<Self> {
        check_permutation(instance, order)?;
        let mut t = base_time;
        let mut starts = Vec::with_capacity(order.len());
        for &id in order {
            starts.push(t);
            t += instance.job(id).p as f64;
        }
        let payoff = schedule_payoff(instance, order, base_time)?;
        Ok(Schedule {
            order: order.to_vec(),
            starts,
            payoff,
        })
    }
}

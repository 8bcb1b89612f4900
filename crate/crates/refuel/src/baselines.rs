//! Reference algorithms: exhaustive permutation search, a brute-force
//! potential-schedule counter, the greedy constructor, and best-first
//! search over job subsets.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use num_rational::BigRational;

use crate::core::{Instance, Job, JobId};
use crate::dominance::{classify_pair, linear_form, PairRelation};
use crate::error::{Error, Result};
use crate::scalar::{NumericMode, Scalar};
use crate::solver::{duration_ms, greedy_order_in, Algo, SolveReport};

pub const BRUTE_SIZE_GUARD: usize = 10;
pub const ASTAR_SIZE_GUARD: usize = 30;

fn guard(n: usize, limit: usize, override_guard: bool) -> Result<()> {
    if n > limit && !override_guard {
        return Err(Error::SizeGuard { n, limit });
    }
    Ok(())
}

/// Exhaustive search over all `n!` orders in the chosen backend. Returns
/// the maximum payoff and the lexicographically smallest maximizing order.
pub fn brute_force_in<S: Scalar>(jobs: &[Job], t: S) -> (S, Vec<JobId>) {
    if jobs.is_empty() {
        return (S::zero(), Vec::new());
    }
    let mut ids: Vec<JobId> = jobs.iter().map(|j| j.id).collect();
    ids.sort_unstable();
    let by_id: HashMap<JobId, &Job> = jobs.iter().map(|j| (j.id, j)).collect();

    let mut best: Option<(S, Vec<JobId>)> = None;
    // `ids` starts in lexicographic order and `next_permutation` advances
    // it, so strict improvement keeps the lexicographically smallest
    // maximizer.
    loop {
        let mut now = t.clone();
        let mut payoff = S::zero();
        for &id in &ids {
            let job = by_id[&id];
            now = now + S::from_int(job.p);
            payoff = payoff + S::from_weight(job.w) / now.clone();
        }
        if best.as_ref().is_none_or(|(b, _)| payoff > *b) {
            best = Some((payoff, ids.clone()));
        }
        if !next_permutation(&mut ids) {
            break;
        }
    }
    best.expect("nonempty job set")
}

fn next_permutation(ids: &mut [JobId]) -> bool {
    let n = ids.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && ids[i - 1] >= ids[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while ids[j] <= ids[i - 1] {
        j -= 1;
    }
    ids.swap(i - 1, j);
    ids[i..].reverse();
    true
}

pub fn brute_force(instance: &Instance, override_guard: bool) -> Result<SolveReport> {
    brute_force_mode(instance, NumericMode::Fast, override_guard)
}

pub fn brute_force_mode(
    instance: &Instance,
    mode: NumericMode,
    override_guard: bool,
) -> Result<SolveReport> {
    guard(instance.len(), BRUTE_SIZE_GUARD, override_guard)?;
    let started = Instant::now();
    let (payoff, order) = match mode {
        NumericMode::Fast => brute_force_in::<f64>(instance.jobs(), 0.0),
        NumericMode::Exact => {
            let (p, o) =
                brute_force_in::<BigRational>(instance.jobs(), <BigRational as Scalar>::zero());
            (p.to_f64(), o)
        }
    };
    let permutations = factorial(instance.len());
    Ok(SolveReport {
        algo: Algo::Brute,
        mode,
        payoff,
        order,
        leaves: permutations,
        branches: 0,
        nodes: permutations,
        elapsed_ms: duration_ms(started.elapsed()),
    })
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// Incremental violation check for appending `next` (starting at `t_next`)
/// to a prefix of placed jobs. A pair violates as soon as both its jobs are
/// placed, so prefix pruning filters exactly the same set as testing
/// complete permutations.
fn extension_ok<S: Scalar>(placed: &[(Job, u64)], next: &Job, t_next: u64) -> bool {
    for (earlier, t_earlier) in placed {
        match classify_pair::<S>(earlier, next) {
            PairRelation::SecondDominates => return false,
            PairRelation::Crossover {
                tstar,
                dominant_before,
            } => {
                if dominant_before == earlier.id {
                    if S::from_int(*t_earlier) >= tstar {
                        return false;
                    }
                } else if S::from_int(t_next) - S::from_int(earlier.p) < tstar {
                    return false;
                }
            }
            PairRelation::FirstDominates | PairRelation::Equivalent => {}
        }
    }
    true
}

fn count_rec<S: Scalar>(placed: &mut Vec<(Job, u64)>, remaining: &mut Vec<Job>, t: u64) -> u64 {
    if remaining.is_empty() {
        return 1;
    }
    let mut total = 0u64;
    for k in 0..remaining.len() {
        let job = remaining[k];
        if extension_ok::<S>(placed, &job, t) {
            remaining.remove(k);
            placed.push((job, t));
            total = total.saturating_add(count_rec::<S>(placed, remaining, t + job.p));
            placed.pop();
            remaining.insert(k, job);
        }
    }
    total
}

/// Number of permutations satisfying every dominance relation, by DFS with
/// prefix pruning.
pub fn count_potential_brute(instance: &Instance, override_guard: bool) -> Result<u64> {
    count_potential_brute_in::<f64>(instance, override_guard)
}

pub fn count_potential_brute_in<S: Scalar>(
    instance: &Instance,
    override_guard: bool,
) -> Result<u64> {
    guard(instance.len(), BRUTE_SIZE_GUARD, override_guard)?;
    let mut placed = Vec::with_capacity(instance.len());
    let mut remaining = instance.jobs().to_vec();
    Ok(count_rec::<S>(&mut placed, &mut remaining, 0))
}

/// Greedy construction from time `t`; the result always satisfies the
/// dominance rule.
pub fn greedy_potential(instance: &Instance, t: f64) -> Vec<JobId> {
    greedy_order_in(instance.jobs(), &t)
}

pub fn greedy_report(instance: &Instance) -> Result<SolveReport> {
    let started = Instant::now();
    let order = greedy_potential(instance, 0.0);
    let payoff = crate::core::schedule_payoff(instance, &order, 0.0)?;
    Ok(SolveReport {
        algo: Algo::Greedy,
        mode: NumericMode::Fast,
        payoff,
        order,
        leaves: 1,
        branches: 0,
        nodes: instance.len() as u64,
        elapsed_ms: duration_ms(started.elapsed()),
    })
}

#[derive(Debug, Clone, Default)]
pub struct AstarOptions {
    pub prune: bool,
    pub override_guard: bool,
    pub deadline: Option<Instant>,
}

struct HeapEntry {
    f: f64,
    g: f64,
    t: u64,
    mask: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.mask == other.mask
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap on f; ties broken by mask for determinism.
        self.f
            .partial_cmp(&other.f)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.mask.cmp(&other.mask))
    }
}

/// Best-first search over job subsets maximizing the payoff.
///
/// Each state is the set of already-scheduled jobs; its elapsed time is the
/// subset's total processing time, so only the best accumulated payoff per
/// subset is retained. The heuristic sums `w_j / (t + p_j)` over the
/// remaining jobs, an upper bound since no remaining completion time can
/// beat `t + p_j`. With `prune` set, extending with job `j` is skipped
/// whenever some unscheduled `k` has a strictly larger `phi` over the whole
/// residual horizon, which would force a dominance violation; pruning never
/// changes the returned payoff.
pub fn astar(instance: &Instance, opts: &AstarOptions) -> Result<SolveReport> {
    let n = instance.len();
    if n > 64 {
        return Err(Error::TooManyJobs { n });
    }
    guard(n, ASTAR_SIZE_GUARD, opts.override_guard)?;
    let started = Instant::now();

    if n == 0 {
        return Ok(SolveReport {
            algo: Algo::Astar,
            mode: NumericMode::Fast,
            payoff: 0.0,
            order: Vec::new(),
            leaves: 0,
            branches: 0,
            nodes: 0,
            elapsed_ms: duration_ms(started.elapsed()),
        });
    }

    let jobs = instance.jobs();
    let horizon = instance.horizon() as f64;
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // D_{kj}(t) > 0 and D_{kj}(T) > 0 means k's phi strictly exceeds j's on
    // [t, T]; forms are linear so checking both endpoints suffices.
    let forms: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| linear_form::<f64>(&jobs[k], &jobs[j]))
                .collect()
        })
        .collect();
    let dominated_over = |k: usize, j: usize, t: f64| -> bool {
        let (c, s) = forms[k][j];
        c + s * t > 0.0 && c + s * horizon > 0.0
    };

    let h = |mask: u64, t: f64| -> f64 {
        let mut bound = 0.0;
        for (j, job) in jobs.iter().enumerate() {
            if mask & (1 << j) == 0 {
                bound += job.w / (t + job.p as f64);
            }
        }
        bound
    };

    let mut best_g: HashMap<u64, f64> = HashMap::new();
    let mut parent: HashMap<u64, (u64, JobId)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best_g.insert(0, 0.0);
    heap.push(HeapEntry {
        f: h(0, 0.0),
        g: 0.0,
        t: 0,
        mask: 0,
    });

    let mut nodes = 0u64;
    let mut branches = 0u64;
    while let Some(entry) = heap.pop() {
        if let Some(deadline) = opts.deadline {
            if nodes.is_multiple_of(256) && Instant::now() >= deadline {
                return Err(Error::Timeout);
            }
        }
        if entry.g < best_g[&entry.mask] {
            continue; // stale entry
        }
        nodes += 1;
        if entry.mask == full {
            let mut order = Vec::with_capacity(n);
            let mut mask = full;
            while mask != 0 {
                let (prev, id) = parent[&mask];
                order.push(id);
                mask = prev;
            }
            order.reverse();
            return Ok(SolveReport {
                algo: Algo::Astar,
                mode: NumericMode::Fast,
                payoff: entry.g,
                order,
                leaves: 0,
                branches,
                nodes,
                elapsed_ms: duration_ms(started.elapsed()),
            });
        }
        #[allow(clippy::needless_range_loop)]
        'extend: for j in 0..n {
            if entry.mask & (1 << j) != 0 {
                continue;
            }
            if opts.prune {
                for k in 0..n {
                    if k != j && entry.mask & (1 << k) == 0 && dominated_over(k, j, entry.t as f64)
                    {
                        continue 'extend;
                    }
                }
            }
            let t_next = entry.t + jobs[j].p;
            let g_next = entry.g + jobs[j].w / t_next as f64;
            let mask_next = entry.mask | (1 << j);
            let improved = best_g.get(&mask_next).is_none_or(|&g| g_next > g);
            if improved {
                best_g.insert(mask_next, g_next);
                parent.insert(mask_next, (entry.mask, jobs[j].id));
                branches += 1;
                heap.push(HeapEntry {
                    f: g_next + h(mask_next, t_next as f64),
                    g: g_next,
                    t: t_next,
                    mask: mask_next,
                });
            }
        }
    }
    unreachable!("the full subset is always reachable")
}

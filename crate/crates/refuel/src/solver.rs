//! The recursive exact solver.
//!
//! Each window `(J', t)` picks the pivot job `alpha` maximizing `phi(t)`,
//! partitions `[t, t + sum p)` at the cut points `t* + p_j` of `alpha`'s
//! in-window crossovers, and tries at most one start time per subinterval:
//! `t_alpha = t + sum_{j in P_q} p_j`, where `P_q` holds the jobs whose
//! cuts have been passed. A candidate is accepted when it lands in its
//! subinterval and outside `alpha`'s banned intervals; the window then
//! splits into an independent left part (before `alpha`, starting at `t`)
//! and right part (after `alpha`, starting at `t_alpha + p_alpha`).
//!
//! Every accepted branch contains at least one schedule satisfying all
//! dominance relations, and no such schedule is ever discarded, so the best
//! payoff over branches is the optimum and the accumulated leaf count
//! equals the number of those schedules.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use serde::Serialize;

use crate::core::{Instance, Job, JobId};
use crate::dominance::{banned_set, cut_grid, phi_cmp};
use crate::error::{Error, Result};
use crate::scalar::{NumericMode, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Fast,
    Astar,
    Brute,
    Greedy,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algo::Fast => "fast",
            Algo::Astar => "astar",
            Algo::Brute => "brute",
            Algo::Greedy => "greedy",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Algo::Fast),
            "astar" => Ok(Algo::Astar),
            "brute" => Ok(Algo::Brute),
            "greedy" => Ok(Algo::Greedy),
            other => Err(format!(
                "unknown algorithm `{other}` (expected fast|astar|brute|greedy)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algo: Algo,
    pub mode: NumericMode,
    /// Maximized `sum w_j / C_j`.
    pub payoff: f64,
    pub order: Vec<JobId>,
    /// Complete candidate schedules enumerated (`K` for the fast solver).
    pub leaves: u64,
    /// Accepted branch points.
    pub branches: u64,
    /// Recursion calls / expanded states.
    pub nodes: u64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub mode: NumericMode,
    /// Incumbent-based bounding. Off by default so the leaf count keeps its
    /// exact meaning.
    pub prune: bool,
    pub deadline: Option<Instant>,
}

/// Search counters shared by the solver backends.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub nodes: u64,
    pub branches: u64,
}

struct Ctl {
    counters: Counters,
    prune: bool,
    deadline: Option<Instant>,
}

impl Ctl {
    fn tick(&mut self) -> Result<()> {
        self.counters.nodes += 1;
        if let Some(deadline) = self.deadline {
            // Cooperative timeout; granularity of a few hundred nodes.
            if self.counters.nodes.is_multiple_of(256) && Instant::now() >= deadline {
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }
}

/// The job of `window_jobs` maximizing `phi(t_o)`, ties broken by maximum
/// `phi(t_e)`, then by smallest id.
pub fn select_alpha_in<'a, S: Scalar>(window_jobs: &'a [Job], t_o: &S, t_e: &S) -> Result<&'a Job> {
    let mut best: Option<&Job> = None;
    for job in window_jobs {
        let Some(cur) = best else {
            best = Some(job);
            continue;
        };
        let at_start = phi_cmp(job, cur, t_o);
        let better = match at_start {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => phi_cmp(job, cur, t_e).is_gt(),
        };
        if better {
            best = Some(job);
        }
    }
    best.ok_or(Error::EmptyWindow)
}

pub fn select_alpha(window_jobs: &[Job], t_o: f64, t_e: f64) -> Result<&Job> {
    select_alpha_in(window_jobs, &t_o, &t_e)
}

/// Branch structure of a window: the pivot, the remaining jobs sorted by
/// cut rank, and one `(split, t_alpha)` per accepted subinterval. Each
/// branch places `rest[..split]` before the pivot and `rest[split..]`
/// after it, so branches share the sorted buffer instead of owning copies.
struct Branches<S> {
    alpha: Job,
    rest: Vec<Job>,
    splits: Vec<(usize, S)>,
}

/// All accepted branches of a window with two or more jobs.
fn branches_of<S: Scalar>(window: &[Job], t: &S) -> Result<Branches<S>> {
    let t_e = window
        .iter()
        .fold(t.clone(), |acc, j| acc + S::from_int(j.p));
    let alpha = *select_alpha_in(window, t, &t_e)?;
    let grid = cut_grid(&alpha, window, t.clone(), t_e.clone())?;
    let banned = banned_set(&alpha, window, &t_e);

    let mut rest: Vec<Job> = window
        .iter()
        .filter(|j| j.id != alpha.id)
        .copied()
        .collect();
    rest.sort_by_cached_key(|j| (grid.rank_of(j.id), j.id));

    let mut splits = Vec::new();
    let mut passed = 0usize;
    let mut t_alpha = t.clone();
    for q in 1..grid.cuts.len() {
        while passed < rest.len() && grid.rank_of(rest[passed].id) <= q {
            t_alpha = t_alpha + S::from_int(rest[passed].p);
            passed += 1;
        }
        let lo = &grid.cuts[q - 1];
        let hi = &grid.cuts[q];
        if lo <= &t_alpha && &t_alpha < hi && !banned.contains(&t_alpha) {
            splits.push((passed, t_alpha.clone()));
        }
    }
    Ok(Branches {
        alpha,
        rest,
        splits,
    })
}

/// Greedy construction: always take the unscheduled job with the maximum
/// `phi` at the current completion time, ties by smallest id. The result
/// never violates the dominance rule.
pub fn greedy_order_in<S: Scalar>(jobs: &[Job], t: &S) -> Vec<JobId> {
    let mut remaining: Vec<&Job> = jobs.iter().collect();
    let mut order = Vec::with_capacity(jobs.len());
    let mut now = t.clone();
    while !remaining.is_empty() {
        let mut pick = 0usize;
        for k in 1..remaining.len() {
            let cmp = phi_cmp(remaining[k], remaining[pick], &now);
            if cmp.is_gt() || (cmp.is_eq() && remaining[k].id < remaining[pick].id) {
                pick = k;
            }
        }
        let job = remaining.swap_remove(pick);
        order.push(job.id);
        now = now + S::from_int(job.p);
    }
    order
}

/// Sum of an optimistic payoff bound: every job completes no earlier than
/// `t + p_j`.
fn payoff_upper_bound<S: Scalar>(jobs: &[Job], t: &S) -> S {
    jobs.iter().fold(S::zero(), |acc, j| {
        acc + S::from_weight(j.w) / (t.clone() + S::from_int(j.p))
    })
}

fn solve_rec<S: Scalar>(window: &[Job], t: &S, ctl: &mut Ctl) -> Result<(S, Vec<JobId>, u64)> {
    ctl.tick()?;
    match window {
        [] => return Ok((S::zero(), Vec::new(), 1)),
        [only] => {
            let payoff = S::from_weight(only.w) / (S::from_int(only.p) + t.clone());
            return Ok((payoff, vec![only.id], 1));
        }
        _ => {}
    }

    let Branches {
        alpha,
        rest,
        splits,
    } = branches_of(window, t)?;
    let mut best: Option<(S, Vec<JobId>)> = None;
    let mut leaves = 0u64;
    for (split, t_alpha) in splits {
        let (left, right) = rest.split_at(split);
        let alpha_completion = t_alpha + S::from_int(alpha.p);
        let alpha_term = S::from_weight(alpha.w) / alpha_completion.clone();
        if ctl.prune {
            if let Some((incumbent, _)) = &best {
                let bound = payoff_upper_bound(left, t)
                    + alpha_term.clone()
                    + payoff_upper_bound(right, &alpha_completion);
                if &bound <= incumbent {
                    continue;
                }
            }
        }
        ctl.counters.branches += 1;
        let (left_payoff, left_order, left_leaves) = solve_rec(left, t, ctl)?;
        let (right_payoff, right_order, right_leaves) = solve_rec(right, &alpha_completion, ctl)?;
        leaves = leaves.saturating_add(left_leaves.saturating_mul(right_leaves));
        let payoff = left_payoff + alpha_term + right_payoff;
        if best.as_ref().is_none_or(|(b, _)| payoff > *b) {
            let mut order = left_order;
            order.push(alpha.id);
            order.extend(right_order);
            best = Some((payoff, order));
        }
    }

    match best {
        Some((payoff, order)) => Ok((payoff, order, leaves)),
        None => {
            // Unreachable with exact arithmetic: every window admits a
            // branch. A floating-point tie on a subinterval boundary could
            // in principle empty the list; fall back to the greedy order so
            // fast mode still returns a schedule.
            debug_assert!(false, "window with no accepted branch");
            let order = greedy_order_in(window, t);
            let mut now = t.clone();
            let mut payoff = S::zero();
            for &id in &order {
                let job = window.iter().find(|j| j.id == id).expect("own order");
                now = now + S::from_int(job.p);
                payoff = payoff + S::from_weight(job.w) / now.clone();
            }
            Ok((payoff, order, 1))
        }
    }
}

/// Solves one window in the chosen backend, returning the exact payoff
/// value alongside order, leaf count, and counters.
pub fn solve_window_in<S: Scalar>(
    jobs: &[Job],
    t: S,
    prune: bool,
    deadline: Option<Instant>,
) -> Result<(S, Vec<JobId>, u64, Counters)> {
    let mut ctl = Ctl {
        counters: Counters::default(),
        prune,
        deadline,
    };
    let (payoff, order, leaves) = solve_rec(jobs, &t, &mut ctl)?;
    Ok((payoff, order, leaves, ctl.counters))
}

/// Solves an instance from time zero.
pub fn fast_schedule(instance: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let started = Instant::now();
    let (payoff, order, leaves, counters) = match opts.mode {
        NumericMode::Fast => {
            solve_window_in::<f64>(instance.jobs(), 0.0, opts.prune, opts.deadline)?
        }
        NumericMode::Exact => {
            let (p, o, l, c) = solve_window_in::<BigRational>(
                instance.jobs(),
                <BigRational as Scalar>::zero(),
                opts.prune,
                opts.deadline,
            )?;
            (p.to_f64(), o, l, c)
        }
    };
    Ok(SolveReport {
        algo: Algo::Fast,
        mode: opts.mode,
        payoff: payoff.to_f64(),
        order,
        leaves,
        branches: counters.branches,
        nodes: counters.nodes,
        elapsed_ms: duration_ms(started.elapsed()),
    })
}

pub(crate) fn duration_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

enum Pending<S> {
    Window(Vec<Job>, S),
    Fixed(JobId),
}

fn enumerate_walk<S: Scalar>(
    stack: &mut Vec<Pending<S>>,
    prefix: &mut Vec<JobId>,
    visit: &mut dyn FnMut(&[JobId]),
    count: &mut u64,
) -> Result<()> {
    let Some(item) = stack.pop() else {
        visit(prefix);
        *count = count.saturating_add(1);
        return Ok(());
    };
    match &item {
        Pending::Fixed(id) => {
            prefix.push(*id);
            enumerate_walk(stack, prefix, visit, count)?;
            prefix.pop();
        }
        Pending::Window(jobs, t) => match jobs.as_slice() {
            [] => enumerate_walk(stack, prefix, visit, count)?,
            [only] => {
                prefix.push(only.id);
                enumerate_walk(stack, prefix, visit, count)?;
                prefix.pop();
            }
            _ => {
                let Branches {
                    alpha,
                    rest,
                    splits,
                } = branches_of(jobs, t)?;
                for (split, t_alpha) in splits {
                    let depth = stack.len();
                    let right_start = t_alpha + S::from_int(alpha.p);
                    stack.push(Pending::Window(rest[split..].to_vec(), right_start));
                    stack.push(Pending::Fixed(alpha.id));
                    stack.push(Pending::Window(rest[..split].to_vec(), t.clone()));
                    enumerate_walk(stack, prefix, visit, count)?;
                    stack.truncate(depth);
                }
            }
        },
    }
    stack.push(item);
    Ok(())
}

/// Runs the same recursion as the solver but yields every complete
/// enumerated order to `visitor`; returns the leaf count, which equals the
/// solver's `leaves` on the same input.
pub fn enumerate_potential_in<S: Scalar, F: FnMut(&[JobId])>(
    jobs: &[Job],
    t: S,
    mut visitor: F,
) -> Result<u64> {
    let mut stack = vec![Pending::Window(jobs.to_vec(), t)];
    let mut prefix = Vec::with_capacity(jobs.len());
    let mut count = 0u64;
    enumerate_walk(&mut stack, &mut prefix, &mut visitor, &mut count)?;
    Ok(count)
}

pub fn enumerate_potential<F: FnMut(&[JobId])>(instance: &Instance, visitor: F) -> Result<u64> {
    enumerate_potential_in(instance.jobs(), 0.0f64, visitor)
}

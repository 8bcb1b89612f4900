//! Pairwise dominance rules.
//!
//! For jobs `i, j` the sign of `phi_i(t) - phi_j(t)` equals the sign of the
//! linear form `D(t) = c + s t` with `s = w_i p_j - w_j p_i` and
//! `c = w_i p_j^2 - w_j p_i^2`. All comparisons in this module go through
//! `D` so exact mode stays division-free and fast mode avoids rounding in
//! quotients.
//!
//! Conventions are half-open throughout: when the curves cross at `t*`, the
//! first job dominates on `[0, t*)` and the second on `[t*, inf)`, and the
//! banned interval of the first job imposed by the second is
//! `[t*, t* + p_j)`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::core::{check_permutation, Instance, Job, JobId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients `(c, s)` of `D(t) = c + s t` for a job pair.
pub fn linear_form<S: Scalar>(i: &Job, j: &Job) -> (S, S) {
    let wi = S::from_weight(i.w);
    let wj = S::from_weight(j.w);
    let pi = S::from_int(i.p);
    let pj = S::from_int(j.p);
    let s = wi.clone() * pj.clone() - wj.clone() * pi.clone();
    let c = wi * pj.clone() * pj - wj * pi.clone() * pi;
    (c, s)
}

/// Sign of `phi_i(t) - phi_j(t)` via the linear form.
pub fn phi_cmp<S: Scalar>(i: &Job, j: &Job, t: &S) -> Ordering {
    let (c, s) = linear_form::<S>(i, j);
    (c + s * t.clone()).sign()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairRelation<S> {
    /// `phi_i >= phi_j` on all of `[0, inf)`, strictly somewhere.
    FirstDominates,
    /// `phi_j >= phi_i` on all of `[0, inf)`, strictly somewhere.
    SecondDominates,
    /// The curves cross once at `tstar > 0`; `dominant_before` rules on
    /// `[0, tstar)`, the other job on `[tstar, inf)`.
    Crossover { tstar: S, dominant_before: JobId },
    /// Identical parameters; swapping never changes the payoff.
    Equivalent,
}

/// Classifies a pair per the dominance rule.
pub fn classify_pair<S: Scalar>(i: &Job, j: &Job) -> PairRelation<S> {
    let (c, s) = linear_form::<S>(i, j);
    match (c.sign(), s.sign()) {
        (Ordering::Equal, Ordering::Equal) => PairRelation::Equivalent,
        (Ordering::Less, Ordering::Less | Ordering::Equal) | (Ordering::Equal, Ordering::Less) => {
            PairRelation::SecondDominates
        }
        (Ordering::Greater, Ordering::Greater | Ordering::Equal)
        | (Ordering::Equal, Ordering::Greater) => PairRelation::FirstDominates,
        (Ordering::Greater, Ordering::Less) => PairRelation::Crossover {
            tstar: -c / s,
            dominant_before: i.id,
        },
        (Ordering::Less, Ordering::Greater) => PairRelation::Crossover {
            tstar: -c / s,
            dominant_before: j.id,
        },
    }
}

/// Normalized union of a job's banned start-time intervals, each half-open
/// `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BannedSet<S> {
    pub owner: JobId,
    pub intervals: Vec<(S, S)>,
}

impl<S: Scalar> BannedSet<S> {
    pub fn contains(&self, t: &S) -> bool {
        self.intervals.iter().any(|(lo, hi)| lo <= t && t < hi)
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Union over `others` of the banned intervals `[t*, t* + p_j)` of `alpha`,
/// for crossovers where `alpha` dominates before `t*` and `t*` falls below
/// `horizon`. Intervals are sorted, merged, and disjoint.
pub fn banned_set<S: Scalar>(alpha: &Job, others: &[Job], horizon: &S) -> BannedSet<S> {
    let mut raw: Vec<(S, S)> = Vec::new();
    for j in others {
        if j.id == alpha.id {
            continue;
        }
        if let PairRelation::Crossover {
            tstar,
            dominant_before,
        } = classify_pair::<S>(alpha, j)
        {
            if dominant_before == alpha.id && &tstar < horizon {
                let hi = tstar.clone() + S::from_int(j.p);
                raw.push((tstar, hi));
            }
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite interval endpoints"));
    let mut intervals: Vec<(S, S)> = Vec::new();
    for (lo, hi) in raw {
        match intervals.last_mut() {
            // Half-open intervals merge when they touch.
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => intervals.push((lo, hi)),
        }
    }
    BannedSet {
        owner: alpha.id,
        intervals,
    }
}

/// Cut points partitioning a window `[t_o, t_e)` for a pivot job, plus each
/// job's rank: 1 for the pivot, the rank of its cut for in-window
/// crossovers, `|J'| + 1` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CutGrid<S> {
    pub alpha: JobId,
    pub t_o: S,
    pub t_e: S,
    /// Sorted, deduplicated; first element is `t_o`, last is `t_e`.
    pub cuts: Vec<S>,
    /// Sorted by id.
    rank_of: Vec<(JobId, usize)>,
    /// `|J'| + 1`, the rank of jobs without an in-window crossover.
    pub beyond_rank: usize,
}

impl<S> CutGrid<S> {
    pub fn rank_of(&self, id: JobId) -> usize {
        let at = self
            .rank_of
            .binary_search_by_key(&id, |&(j, _)| j)
            .expect("job in window");
        self.rank_of[at].1
    }
}

/// Builds the cut grid for `alpha` over `window_jobs` spanning
/// `[t_o, t_e)` with `t_e = t_o + sum p`.
///
/// A job contributes a cut `t* + p_j` only when its crossover with `alpha`
/// has `alpha` dominant before `t*`, `t*` lies strictly inside the window,
/// and the cut itself does too; boundary ties resolve to global dominance
/// inside the half-open window.
pub fn cut_grid<S: Scalar>(alpha: &Job, window_jobs: &[Job], t_o: S, t_e: S) -> Result<CutGrid<S>> {
    let expected = window_jobs
        .iter()
        .fold(t_o.clone(), |acc, j| acc + S::from_int(j.p));
    if expected != t_e {
        return Err(Error::WindowMismatch {
            got: t_e.to_f64(),
            expected: expected.to_f64(),
        });
    }
    debug_assert!(window_jobs.iter().any(|j| j.id == alpha.id));

    let beyond_rank = window_jobs.len() + 1;
    let mut job_cuts: Vec<(S, JobId)> = Vec::new();
    for j in window_jobs {
        if j.id == alpha.id {
            continue;
        }
        if let PairRelation::Crossover {
            tstar,
            dominant_before,
        } = classify_pair::<S>(alpha, j)
        {
            if dominant_before == alpha.id && tstar > t_o && tstar < t_e {
                let cut = tstar + S::from_int(j.p);
                if cut > t_o && cut < t_e {
                    job_cuts.push((cut, j.id));
                }
            }
        }
    }
    job_cuts.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite cuts")
            .then(a.1.cmp(&b.1))
    });

    let mut cuts: Vec<S> = Vec::with_capacity(job_cuts.len() + 2);
    cuts.push(t_o.clone());
    let mut ranked: Vec<(JobId, usize)> = Vec::with_capacity(job_cuts.len());
    for (cut, id) in job_cuts {
        if cuts.last() != Some(&cut) {
            cuts.push(cut);
        }
        // Jobs sharing a cut value share its rank.
        ranked.push((id, cuts.len()));
    }
    cuts.push(t_e.clone());

    let mut rank_of: Vec<(JobId, usize)> = Vec::with_capacity(window_jobs.len());
    for j in window_jobs {
        let rank = if j.id == alpha.id {
            1
        } else {
            ranked
                .iter()
                .find(|&&(id, _)| id == j.id)
                .map_or(beyond_rank, |&(_, r)| r)
        };
        rank_of.push((j.id, rank));
    }
    rank_of.sort_unstable_by_key(|&(id, _)| id);

    Ok(CutGrid {
        alpha: alpha.id,
        t_o,
        t_e,
        cuts,
        rank_of,
        beyond_rank,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationReason {
    /// The later job globally dominates the earlier one.
    GlobalDominance,
    /// The earlier job dominates only before `t*` but starts at or after it.
    CrossoverLateStart,
    /// The later job dominates before `t*` and the pair's window ends
    /// before `t*`.
    CrossoverEarlyWindow,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationReason::GlobalDominance => "global-dominance",
            ViolationReason::CrossoverLateStart => "crossover-late-start",
            ViolationReason::CrossoverEarlyWindow => "crossover-early-window",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub earlier: JobId,
    pub later: JobId,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks every ordered pair of `order` against the dominance rule.
pub fn is_potential_in<S: Scalar>(instance: &Instance, order: &[JobId]) -> Result<PotentialReport> {
    check_permutation(instance, order)?;
    let mut starts: Vec<u64> = Vec::with_capacity(order.len());
    let mut t = 0u64;
    for &id in order {
        starts.push(t);
        t += instance.job(id).p;
    }

    let mut violations = Vec::new();
    for a in 0..order.len() {
        for b in a + 1..order.len() {
            let i = instance.job(order[a]);
            let j = instance.job(order[b]);
            let t_i = S::from_int(starts[a]);
            let t_j = S::from_int(starts[b]);
            match classify_pair::<S>(i, j) {
                PairRelation::SecondDominates => violations.push(Violation {
                    earlier: i.id,
                    later: j.id,
                    reason: ViolationReason::GlobalDominance,
                }),
                PairRelation::Crossover {
                    tstar,
                    dominant_before,
                } => {
                    if dominant_before == i.id {
                        // j rules on [t*, inf); violated when the pair's
                        // window [t_i, t_j - p_i] sits inside it.
                        if t_i >= tstar {
                            violations.push(Violation {
                                earlier: i.id,
                                later: j.id,
                                reason: ViolationReason::CrossoverLateStart,
                            });
                        }
                    } else {
                        // j rules on [0, t*).
                        if t_j - S::from_int(i.p) < tstar {
                            violations.push(Violation {
                                earlier: i.id,
                                later: j.id,
                                reason: ViolationReason::CrossoverEarlyWindow,
                            });
                        }
                    }
                }
                PairRelation::FirstDominates | PairRelation::Equivalent => {}
            }
        }
    }
    Ok(PotentialReport {
        valid: violations.is_empty(),
        violations,
    })
}

pub fn is_potential(instance: &Instance, order: &[JobId]) -> Result<PotentialReport> {
    is_potential_in::<f64>(instance, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn job(id: JobId, p: u64, w: f64) -> Job {
        Job::new(id, p, w).unwrap()
    }

    #[test]
    fn classify_fig1_pair() {
        let i = job(0, 2, 12.0);
        let j = job(1, 9, 162.0);
        let (c, s) = linear_form::<f64>(&i, &j);
        assert_eq!(c, 324.0);
        assert_eq!(s, -216.0);
        match classify_pair::<f64>(&i, &j) {
            PairRelation::Crossover {
                tstar,
                dominant_before,
            } => {
                assert_eq!(tstar, 1.5);
                assert_eq!(dominant_before, 0);
            }
            other => panic!("expected crossover, got {other:?}"),
        }
    }

    #[test]
    fn classify_global_dominance() {
        let i = job(0, 1, 10.0);
        let j = job(1, 2, 2.0);
        let (c, s) = linear_form::<f64>(&i, &j);
        assert_eq!((c, s), (38.0, 18.0));
        assert_eq!(classify_pair::<f64>(&i, &j), PairRelation::FirstDominates);
        assert_eq!(classify_pair::<f64>(&j, &i), PairRelation::SecondDominates);
    }

    #[test]
    fn classify_equivalent() {
        let i = job(0, 3, 5.0);
        let j = job(1, 3, 5.0);
        assert_eq!(classify_pair::<f64>(&i, &j), PairRelation::Equivalent);
    }

    #[test]
    fn classification_is_mirrored() {
        let i = job(0, 2, 12.0);
        let j = job(1, 9, 162.0);
        match (classify_pair::<f64>(&i, &j), classify_pair::<f64>(&j, &i)) {
            (
                PairRelation::Crossover {
                    tstar: a,
                    dominant_before: da,
                },
                PairRelation::Crossover {
                    tstar: b,
                    dominant_before: db,
                },
            ) => {
                assert_eq!(a, b);
                assert_eq!(da, db);
            }
            other => panic!("expected crossovers, got {other:?}"),
        }
    }

    #[test]
    fn phi_equal_at_crossover_exactly() {
        let i = job(0, 2, 12.0);
        let j = job(1, 9, 162.0);
        if let PairRelation::Crossover { tstar, .. } = classify_pair::<BigRational>(&i, &j) {
            assert_eq!(i.phi(&tstar), j.phi(&tstar));
        } else {
            panic!("expected crossover");
        }
    }

    #[test]
    fn banned_set_examples() {
        let alpha = job(0, 2, 12.0);
        let other = job(1, 9, 162.0);
        let set = banned_set::<f64>(&alpha, &[other], &11.0);
        assert_eq!(set.intervals, vec![(1.5, 10.5)]);
        assert!(set.contains(&1.5));
        assert!(set.contains(&9.0));
        assert!(!set.contains(&10.5));
        assert!(!set.contains(&1.0));

        let alpha = job(0, 1, 10.0);
        let set = banned_set::<f64>(&alpha, &[job(1, 2, 2.0)], &3.0);
        assert!(set.is_empty());

        let set = banned_set::<f64>(&job(0, 2, 12.0), &[], &2.0);
        assert!(set.is_empty());
    }

    #[test]
    fn banned_set_merges_overlaps() {
        // Two crossovers of alpha at nearby t*; the intervals overlap.
        let alpha = job(0, 1, 6.0);
        let mut others = Vec::new();
        let mut horizon = alpha.p;
        for (id, (p, w)) in [(4u64, 30.0), (5u64, 40.0)].iter().enumerate() {
            let j = job(id + 1, *p, *w);
            horizon += j.p;
            others.push(j);
        }
        let set = banned_set::<f64>(&alpha, &others, &(horizon as f64));
        for window in set.intervals.windows(2) {
            assert!(window[0].1 < window[1].0);
        }
        // Membership agrees with the raw union.
        for j in &others {
            if let PairRelation::Crossover {
                tstar,
                dominant_before,
            } = classify_pair::<f64>(&alpha, j)
            {
                if dominant_before == alpha.id && tstar < horizon as f64 {
                    let mid = tstar + j.p as f64 / 2.0;
                    assert!(set.contains(&mid));
                }
            }
        }
    }

    #[test]
    fn cut_grid_examples() {
        let alpha = job(0, 2, 12.0);
        let other = job(1, 9, 162.0);
        let grid = cut_grid::<f64>(&alpha, &[alpha, other], 0.0, 11.0).unwrap();
        assert_eq!(grid.cuts, vec![0.0, 10.5, 11.0]);
        assert_eq!(grid.rank_of(0), 1);
        assert_eq!(grid.rank_of(1), 2);

        let alpha = job(0, 1, 10.0);
        let other = job(1, 2, 2.0);
        let grid = cut_grid::<f64>(&alpha, &[alpha, other], 0.0, 3.0).unwrap();
        assert_eq!(grid.cuts, vec![0.0, 3.0]);
        assert_eq!(grid.rank_of(0), 1);
        assert_eq!(grid.rank_of(1), 3);

        let alpha = job(0, 2, 12.0);
        let grid = cut_grid::<f64>(&alpha, &[alpha], 5.0, 7.0).unwrap();
        assert_eq!(grid.cuts, vec![5.0, 7.0]);
        assert_eq!(grid.rank_of(0), 1);
    }

    #[test]
    fn cut_grid_rejects_bad_window() {
        let alpha = job(0, 2, 12.0);
        let err = cut_grid::<f64>(&alpha, &[alpha], 0.0, 3.0).unwrap_err();
        assert!(matches!(err, Error::WindowMismatch { .. }));
    }

    #[test]
    fn validator_examples() {
        let inst = Instance::from_params(&[(2, 12.0), (9, 162.0)]).unwrap();
        let ok = is_potential(&inst, &[0, 1]).unwrap();
        assert!(ok.valid);

        let bad = is_potential(&inst, &[1, 0]).unwrap();
        assert!(!bad.valid);
        assert_eq!(bad.violations.len(), 1);
        let v = bad.violations[0];
        assert_eq!((v.earlier, v.later), (1, 0));
        assert_eq!(v.reason, ViolationReason::CrossoverEarlyWindow);

        let same = Instance::from_params(&[(1, 1.0); 3]).unwrap();
        for order in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
            assert!(is_potential(&same, &order).unwrap().valid);
        }
    }

    #[test]
    fn validator_flags_global_dominance() {
        let inst = Instance::from_params(&[(1, 10.0), (2, 2.0)]).unwrap();
        let bad = is_potential(&inst, &[1, 0]).unwrap();
        assert_eq!(bad.violations[0].reason, ViolationReason::GlobalDominance);
    }
}

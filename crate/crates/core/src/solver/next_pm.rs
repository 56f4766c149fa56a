use std::cmp::Ordering;

use super::{compare_pm, NextPmProblem, PmPlan};
use crate::error::{Error, Result};

/// Largest component count solved by set-partition enumeration.
pub const PARTITION_LIMIT: usize = 10;

/// Global minimiser of the next-PM objective.
///
/// Any optimal plan groups components by shared month, so it suffices to
/// enumerate set partitions of the components and give each block its
/// cheapest month admissible for every member. Merging two blocks that
/// picked the same month only removes a set-up charge, so the best
/// partition is optimal.
pub fn solve_next_pm(problem: &NextPmProblem) -> Result<PmPlan> {
    problem.validate()?;
    let n = problem.n();
    if n > PARTITION_LIMIT {
        return Err(Error::TooLarge(format!(
            "{n} components exceed the partition-enumeration limit of {PARTITION_LIMIT}; \
             use solve_next_pm_branch_and_bound"
        )));
    }

    let block_month = best_block_months(problem);
    let mut labels = vec![0usize; n];
    let mut best: Option<PmPlan> = None;
    enumerate_partitions(0, 0, &mut labels, &mut |labels, blocks| {
        let mut masks = vec![0usize; blocks];
        for (j, &b) in labels.iter().enumerate() {
            masks[b] |= 1 << j;
        }
        let mut assignment = vec![0u32; n];
        for mask in masks {
            let t = block_month[mask];
            for (j, slot) in assignment.iter_mut().enumerate() {
                if mask & (1 << j) != 0 {
                    *slot = t;
                }
            }
        }
        let plan = problem.plan_from_assignment(assignment);
        if best.as_ref().is_none_or(|b| compare_pm(&plan, b) == Ordering::Less) {
            best = Some(plan);
        }
    });
    Ok(best.expect("at least one partition"))
}

/// Cheapest admissible common month for every non-empty subset of components.
fn best_block_months(problem: &NextPmProblem) -> Vec<u32> {
    let n = problem.n();
    let s = problem.s;
    let mut out = vec![0u32; 1 << n];
    for (mask, slot) in out.iter_mut().enumerate().skip(1) {
        let members: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let mut best = (f64::INFINITY, problem.r + 1);
        for t in s + 1..=problem.r + 1 {
            if !members.iter().all(|&j| problem.feasible(j, t)) {
                continue;
            }
            let k = (t - s - 1) as usize;
            let value = members
                .iter()
                .fold(problem.setup[k], |acc, &j| acc + problem.cost[j][k])
                / (t - s) as f64;
            if value < best.0 {
                best = (value, t);
            }
        }
        *slot = best.1;
    }
    out
}

/// Restricted-growth-string enumeration of set partitions.
fn enumerate_partitions<F: FnMut(&[usize], usize)>(
    j: usize,
    blocks: usize,
    labels: &mut [usize],
    visit: &mut F,
) {
    if j == labels.len() {
        visit(labels, blocks);
        return;
    }
    for b in 0..=blocks {
        labels[j] = b;
        enumerate_partitions(j + 1, blocks.max(b + 1), labels, visit);
    }
}

/// Depth-first branch and bound over component-to-month assignments.
///
/// Same contract and tie-breaking as [`solve_next_pm`], without a size cap.
/// The bound adds, for every unassigned component, its cheapest
/// `c / (t - s)` over admissible months, ignoring set-up costs.
pub fn solve_next_pm_branch_and_bound(problem: &NextPmProblem) -> Result<PmPlan> {
    problem.validate()?;
    let n = problem.n();
    let s = problem.s;
    let months: Vec<u32> = (s + 1..=problem.r + 1).collect();

    let mut choices: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut cheapest = vec![0.0; n];
    for j in 0..n {
        let mut ts: Vec<u32> = months.iter().copied().filter(|&t| problem.feasible(j, t)).collect();
        let rate = |t: u32| problem.cost[j][(t - s - 1) as usize] / (t - s) as f64;
        ts.sort_by(|&a, &b| rate(a).total_cmp(&rate(b)).then(a.cmp(&b)));
        cheapest[j] = rate(ts[0]);
        choices.push(ts);
    }
    let mut tail_bound = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail_bound[j] = tail_bound[j + 1] + cheapest[j];
    }

    struct Search<'a> {
        problem: &'a NextPmProblem,
        choices: Vec<Vec<u32>>,
        tail_bound: Vec<f64>,
        open: Vec<u32>,
        assignment: Vec<u32>,
        best: Option<PmPlan>,
    }

    impl Search<'_> {
        fn run(&mut self, j: usize, partial: f64) {
            let s = self.problem.s;
            if j == self.assignment.len() {
                let plan = self.problem.plan_from_assignment(self.assignment.clone());
                if self.best.as_ref().is_none_or(|b| compare_pm(&plan, b) == Ordering::Less) {
                    self.best = Some(plan);
                }
                return;
            }
            for idx in 0..self.choices[j].len() {
                let t = self.choices[j][idx];
                let k = (t - s - 1) as usize;
                let w = (t - s) as f64;
                let opening = self.open[k] == 0;
                let step = if opening {
                    (self.problem.setup[k] + self.problem.cost[j][k]) / w
                } else {
                    self.problem.cost[j][k] / w
                };
                let bound = partial + step + self.tail_bound[j + 1];
                if let Some(best) = &self.best {
                    // slack keeps rounding from pruning exact ties
                    if bound > best.objective + 1e-9 * best.objective.abs().max(1.0) {
                        continue;
                    }
                }
                self.open[k] += 1;
                self.assignment[j] = t;
                self.run(j + 1, partial + step);
                self.open[k] -= 1;
            }
        }
    }

    let mut search = Search {
        problem,
        choices,
        tail_bound,
        open: vec![0; months.len()],
        assignment: vec![0; n],
        best: None,
    };
    search.run(0, 0.0);
    Ok(search.best.expect("deferral column is always admissible"))
}

//! Exhaustive oracles for the exact solvers.

use std::cmp::Ordering;

use super::{compare_om, compare_pm, NextOmProblem, NextPmProblem, OmPlan, PmPlan};
use crate::error::{Error, Result};

/// Maximum number of next-PM assignments enumerated.
pub const BRUTE_FORCE_PM_LIMIT: u64 = 10_000_000;
/// Maximum component count for the opportunistic oracle.
pub const BRUTE_FORCE_OM_LIMIT: usize = 20;

/// Enumerates every admissible assignment of components to months.
pub fn brute_force_next_pm(problem: &NextPmProblem) -> Result<PmPlan> {
    problem.validate()?;
    let n = problem.n();
    let width = problem.width() as u64;
    if width.checked_pow(n as u32).is_none_or(|c| c > BRUTE_FORCE_PM_LIMIT) {
        return Err(Error::TooLarge(format!(
            "{width}^{n} assignments exceed the brute-force limit of {BRUTE_FORCE_PM_LIMIT}"
        )));
    }
    let options: Vec<Vec<u32>> = (0..n)
        .map(|j| (problem.s + 1..=problem.r + 1).filter(|&t| problem.feasible(j, t)).collect())
        .collect();
    let mut index = vec![0usize; n];
    let mut best: Option<PmPlan> = None;
    loop {
        let assignment: Vec<u32> = (0..n).map(|j| options[j][index[j]]).collect();
        let plan = problem.plan_from_assignment(assignment);
        if best.as_ref().is_none_or(|b| compare_pm(&plan, b) == Ordering::Less) {
            best = Some(plan);
        }
        // odometer
        let mut j = 0;
        loop {
            if j == n {
                return Ok(best.expect("at least one assignment"));
            }
            index[j] += 1;
            if index[j] < options[j].len() {
                break;
            }
            index[j] = 0;
            j += 1;
        }
    }
}

/// Enumerates all `2^(n-1)` slot choices of the non-failed components.
pub fn brute_force_next_om(problem: &NextOmProblem) -> Result<OmPlan> {
    problem.validate()?;
    let n = problem.n();
    if n > BRUTE_FORCE_OM_LIMIT {
        return Err(Error::TooLarge(format!(
            "{n} components exceed the brute-force limit of {BRUTE_FORCE_OM_LIMIT}"
        )));
    }
    let others: Vec<usize> = (0..n).filter(|&j| j != problem.failed).collect();
    let mut best: Option<OmPlan> = None;
    for bits in 0u64..1 << others.len() {
        let mut assignment = vec![0u8; n];
        let mut admissible = true;
        for (k, &j) in others.iter().enumerate() {
            if bits & (1 << k) != 0 {
                assignment[j] = 1;
            } else if problem.benefit_next[j] < 0.0 {
                admissible = false;
            }
        }
        if !admissible {
            continue;
        }
        let plan = problem.plan_from_assignment(assignment);
        if best.as_ref().is_none_or(|b| compare_om(&plan, b) == Ordering::Less) {
            best = Some(plan);
        }
    }
    Ok(best.expect("all-later assignment is admissible"))
}

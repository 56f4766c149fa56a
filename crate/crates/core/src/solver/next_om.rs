use super::{compare_om, NextOmProblem, OmPlan};
use crate::error::Result;

/// Exact minimiser of the opportunistic-maintenance objective.
///
/// If the second month stays closed every other component must join the
/// corrective visit, which needs a non-negative benefit for all of them.
/// If it is open, components choose independently between `c_{s+1}` (when
/// admissible) and `c_{s+2} / 2`. The cheaper of the two cases wins.
pub fn solve_next_om(problem: &NextOmProblem) -> Result<OmPlan> {
    problem.validate()?;
    let n = problem.n();
    let others = || (0..n).filter(|&j| j != problem.failed);

    let mut candidates = Vec::with_capacity(2);
    if others().all(|j| problem.benefit_next[j] >= 0.0) {
        candidates.push(problem.plan_from_assignment(vec![0; n]));
    }
    let mut split = vec![0u8; n];
    for j in others() {
        let admissible = problem.benefit_next[j] >= 0.0;
        if !admissible || problem.cost[j][1] / 2.0 < problem.cost[j][0] {
            split[j] = 1;
        }
    }
    candidates.push(problem.plan_from_assignment(split));

    Ok(candidates.into_iter().min_by(compare_om).expect("second case always exists"))
}

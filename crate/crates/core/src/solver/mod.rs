//! Exact solvers for the next-PM and opportunistic-maintenance binary programs.
//!
//! Both problems are small facility-location problems: months are
//! facilities opened at set-up cost `d_t`, components are clients that must
//! be served by exactly one open month. Plans are compared with a single
//! canonical objective evaluation so every solver and oracle produces
//! bit-identical objectives for the same assignment.

mod brute;
mod next_om;
mod next_pm;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::costs::CostTables;
use crate::calendar::SetupCostCalendar;
use crate::error::{domain, Result};

pub use brute::{brute_force_next_om, brute_force_next_pm, BRUTE_FORCE_PM_LIMIT, BRUTE_FORCE_OM_LIMIT};
pub use next_om::solve_next_om;
pub use next_pm::{solve_next_pm, solve_next_pm_branch_and_bound, PARTITION_LIMIT};

/// A next-PM instance over the window `[s+1, r+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextPmProblem {
    pub s: u32,
    pub r: u32,
    /// `setup[k] = d_{s+1+k}` for `k = 0..=r-s`.
    pub setup: Vec<f64>,
    /// `cost[j][k] = c_{s, s+1+k}` for `k = 0..=r-s`.
    pub cost: Vec<Vec<f64>>,
    /// `benefit[j][k] = D_{s, s+1+k}` for `k = 0..r-s`.
    pub benefit: Vec<Vec<f64>>,
}

/// Solution of a next-PM instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmPlan {
    /// Month of the next PM; `r + 1` means nothing is planned in the window.
    pub tau: u32,
    /// Component indices maintained at `tau` (empty when `tau = r + 1`).
    pub maintained: Vec<usize>,
    /// Time-average cost per month.
    pub objective: f64,
    /// Month assigned to each component.
    pub assignment: Vec<u32>,
}

impl NextPmProblem {
    pub fn from_tables(tables: &CostTables, calendar: &SetupCostCalendar) -> Self {
        let months = tables.months();
        Self {
            s: tables.s,
            r: tables.r,
            setup: months.clone().map(|t| calendar.month(t)).collect(),
            cost: (0..tables.components.len())
                .map(|j| months.clone().map(|t| tables.cost(j, t)).collect())
                .collect(),
            benefit: (0..tables.components.len())
                .map(|j| {
                    (tables.s + 1..=tables.r)
                        .map(|t| tables.benefit(j, t).expect("benefit inside window"))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn width(&self) -> usize {
        (self.r - self.s + 1) as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < self.s + 1 {
            return Err(domain(format!("window end {} must be > s = {}", self.r, self.s)));
        }
        if self.cost.is_empty() {
            return Err(domain("at least one component is required"));
        }
        let w = self.width();
        if self.setup.len() != w
            || self.cost.iter().any(|c| c.len() != w)
            || self.benefit.len() != self.cost.len()
            || self.benefit.iter().any(|b| b.len() != w - 1)
        {
            return Err(domain("table dimensions do not match the window"));
        }
        Ok(())
    }

    /// Whether month `t` is admissible for component `j`.
    #[inline]
    pub fn feasible(&self, j: usize, t: u32) -> bool {
        t == self.r + 1 || self.benefit[j][(t - self.s - 1) as usize] >= 0.0
    }

    /// Canonical objective of an assignment.
    pub fn objective(&self, assignment: &[u32]) -> f64 {
        let mut order: Vec<usize> = (0..assignment.len()).collect();
        order.sort_by_key(|&j| (assignment[j], j));
        let mut total = 0.0;
        let mut i = 0;
        while i < order.len() {
            let t = assignment[order[i]];
            let k = (t - self.s - 1) as usize;
            let mut occasion = self.setup[k];
            while i < order.len() && assignment[order[i]] == t {
                occasion += self.cost[order[i]][k];
                i += 1;
            }
            total += occasion / (t - self.s) as f64;
        }
        total
    }

    pub(crate) fn plan_from_assignment(&self, assignment: Vec<u32>) -> PmPlan {
        let tau = *assignment.iter().min().expect("non-empty");
        let maintained = if tau <= self.r {
            (0..assignment.len()).filter(|&j| assignment[j] == tau).collect()
        } else {
            Vec::new()
        };
        PmPlan {
            tau,
            maintained,
            objective: self.objective(&assignment),
            assignment,
        }
    }

    /// Checks every model constraint on a plan.
    pub fn check_plan(&self, plan: &PmPlan) -> Result<()> {
        if plan.assignment.len() != self.n() {
            return Err(domain("assignment length differs from component count"));
        }
        for (j, &t) in plan.assignment.iter().enumerate() {
            if t <= self.s || t > self.r + 1 {
                return Err(domain(format!("component {j} assigned outside the window")));
            }
            if !self.feasible(j, t) {
                return Err(domain(format!("component {j} assigned to month {t} with negative benefit")));
            }
        }
        let expected = self.plan_from_assignment(plan.assignment.clone());
        if expected.tau != plan.tau || expected.maintained != plan.maintained {
            return Err(domain("tau or maintained set inconsistent with assignment"));
        }
        if expected.objective != plan.objective {
            return Err(domain("objective differs from canonical evaluation"));
        }
        Ok(())
    }
}

/// Orders plans: objective, then earliest `tau`, then lexicographic set,
/// then lexicographic assignment.
pub fn compare_pm(a: &PmPlan, b: &PmPlan) -> Ordering {
    a.objective
        .total_cmp(&b.objective)
        .then(a.tau.cmp(&b.tau))
        .then_with(|| a.maintained.cmp(&b.maintained))
        .then_with(|| a.assignment.cmp(&b.assignment))
}

/// An opportunistic-maintenance instance triggered by a failure of
/// component `failed` during month `s + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextOmProblem {
    pub s: u32,
    pub failed: usize,
    /// `[d_{s+1}, d_{s+2}]`.
    pub setup: [f64; 2],
    /// `[c_{s,s+1}, c_{s,s+2}]` per component.
    pub cost: Vec<[f64; 2]>,
    /// `D_{s,s+1}` per component.
    pub benefit_next: Vec<f64>,
}

/// Solution of an opportunistic-maintenance instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmPlan {
    /// Components maintained together with the failed one at `s + 1`.
    pub opportunistic: Vec<usize>,
    pub objective: f64,
    /// Slot per component: `0` for `s + 1`, `1` for `s + 2`.
    pub assignment: Vec<u8>,
}

impl NextOmProblem {
    /// Reads the first two months of a table built at `s`.
    pub fn from_tables(tables: &CostTables, calendar: &SetupCostCalendar, failed: usize) -> Self {
        let s = tables.s;
        Self {
            s,
            failed,
            setup: [calendar.month(s + 1), calendar.month(s + 2)],
            cost: (0..tables.components.len())
                .map(|j| [tables.cost(j, s + 1), tables.cost(j, s + 2)])
                .collect(),
            benefit_next: (0..tables.components.len())
                .map(|j| tables.benefit(j, s + 1).expect("benefit at s+1"))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.failed >= self.n() {
            return Err(domain(format!("failed component {} out of range", self.failed)));
        }
        if self.benefit_next.len() != self.n() {
            return Err(domain("benefit length differs from component count"));
        }
        Ok(())
    }

    /// Canonical objective; the failed component is pinned to `s + 1`.
    pub fn objective(&self, assignment: &[u8]) -> f64 {
        let mut first = self.setup[0];
        let mut second = self.setup[1];
        let mut second_open = false;
        for (j, &slot) in assignment.iter().enumerate() {
            if j == self.failed {
                continue;
            }
            if slot == 0 {
                first += self.cost[j][0];
            } else {
                second += self.cost[j][1];
                second_open = true;
            }
        }
        if second_open {
            first + second / 2.0
        } else {
            first
        }
    }

    pub(crate) fn plan_from_assignment(&self, assignment: Vec<u8>) -> OmPlan {
        OmPlan {
            opportunistic: (0..assignment.len())
                .filter(|&j| j != self.failed && assignment[j] == 0)
                .collect(),
            objective: self.objective(&assignment),
            assignment,
        }
    }

    pub fn check_plan(&self, plan: &OmPlan) -> Result<()> {
        if plan.assignment.len() != self.n() || plan.assignment[self.failed] != 0 {
            return Err(domain("failed component must be assigned to s+1"));
        }
        for &j in &plan.opportunistic {
            if self.benefit_next[j] < 0.0 {
                return Err(domain(format!("component {j} maintained with negative benefit")));
            }
        }
        let expected = self.plan_from_assignment(plan.assignment.clone());
        if expected.opportunistic != plan.opportunistic || expected.objective != plan.objective {
            return Err(domain("plan inconsistent with its assignment"));
        }
        Ok(())
    }
}

pub fn compare_om(a: &OmPlan, b: &OmPlan) -> Ordering {
    a.objective
        .total_cmp(&b.objective)
        .then_with(|| a.assignment.cmp(&b.assignment))
}

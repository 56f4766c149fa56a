//! Full-horizon interval-cost scheduling model, kept for comparison with the
//! next-PM planner.
//!
//! Each component follows a chain of renewal months `0 = u_0 < u_1 < ... <
//! T+1`; an arc `(u, t)` costs `c_{t-u}` and every month `t <= T` with at
//! least one renewal costs the (constant) set-up `d` once. For a fixed set
//! of open months each component's chain is a shortest path in a DAG, so
//! the search only branches on the open months.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::costs::{Estimate, McSettings};
use crate::error::{domain, Error, Result};
use crate::lifetime::ComponentSpec;
use crate::rng::{self, substream, tag};
use crate::scheduler::{Planner, SystemState};

/// Largest horizon accepted by the exact solver.
pub const EXACT_HORIZON_LIMIT: u32 = 36;
/// Largest horizon accepted by the exhaustive oracle.
pub const BRUTE_FORCE_HORIZON_LIMIT: u32 = 16;

const BLOCK: u64 = 4096;

/// First argument of the discount term `(x / t)^lambda` for the i-th failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalConvention {
    /// Time since the interval start, `U_{0,i}` (the original model).
    AbsoluteTime,
    /// Inter-failure time `L_i` (the next-PM model).
    InterFailure,
}

/// Interval costs `c_t` for `t = 1..=horizon + 1` under constant set-up `d`.
///
/// All lengths share one set of sample paths.
pub fn interval_costs(
    spec: &ComponentSpec,
    d: f64,
    lambda: f64,
    horizon: u32,
    convention: IntervalConvention,
    mc: &McSettings,
) -> Vec<Estimate> {
    let len = horizon as usize + 1;
    let reps = mc.replications.max(1);
    let limit = (horizon + 1) as f64;
    let blocks: Vec<(Vec<f64>, Vec<f64>)> = (0..reps.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(mc.seed, &[tag::INTERVAL, spec.id as u64, b]);
            let mut sum = vec![0.0; len];
            let mut sum_sq = vec![0.0; len];
            let mut acc = vec![0.0; len];
            for _ in 0..BLOCK.min(reps - b * BLOCK) {
                acc.iter_mut().for_each(|a| *a = 0.0);
                let mut at = 0.0;
                loop {
                    let life = spec.life_from_uniform(rng::open_unit(&mut rng));
                    at += life;
                    if at > limit {
                        break;
                    }
                    let arg = match convention {
                        IntervalConvention::AbsoluteTime => at,
                        IntervalConvention::InterFailure => life,
                    };
                    for k in (at.ceil() as usize).max(1) - 1..len {
                        let t = (k + 1) as f64;
                        acc[k] += spec.cm_cost + d - (arg / t).powf(lambda) * (spec.pm_cost + d);
                    }
                }
                for k in 0..len {
                    let x = spec.pm_cost + acc[k];
                    sum[k] += x;
                    sum_sq[k] += x * x;
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let n = reps as f64;
    (0..len)
        .map(|k| {
            let s: f64 = blocks.iter().map(|b| b.0[k]).sum();
            let sq: f64 = blocks.iter().map(|b| b.1[k]).sum();
            let mean = s / n;
            let var = if reps > 1 {
                ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            Estimate {
                mean,
                stderr: (var / n).sqrt(),
            }
        })
        .collect()
}

/// Single interval cost `c_t`.
pub fn pmspic_interval_cost(
    spec: &ComponentSpec,
    d: f64,
    lambda: f64,
    t: u32,
    convention: IntervalConvention,
    mc: &McSettings,
) -> Result<Estimate> {
    if t < 1 {
        return Err(domain("interval length must be >= 1"));
    }
    Ok(interval_costs(spec, d, lambda, t - 1, convention, mc)[t as usize - 1])
}

/// A full-horizon instance with constant set-up cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmspicProblem {
    pub horizon: u32,
    pub setup: f64,
    /// `costs[j][t-1] = c^j_t` for `t = 1..=horizon + 1`.
    pub costs: Vec<Vec<f64>>,
}

/// A full-horizon plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmspicPlan {
    /// `open[t-1]` is `z_t` for `t = 1..=T`.
    pub open: Vec<bool>,
    /// Renewal months `<= T` of each component, ascending.
    pub renewals: Vec<Vec<u32>>,
    pub objective: f64,
    /// Proven lower bound on the optimum; equals `objective` when optimal.
    pub lower_bound: f64,
    pub optimal: bool,
    pub nodes: u64,
}

impl PmspicProblem {
    /// Monte Carlo interval costs for every component of `config`, using the
    /// absolute-time convention and constant set-up `d`.
    pub fn estimate(config: &SystemConfig, d: f64, horizon: u32, mc: &McSettings) -> Self {
        Self {
            horizon,
            setup: d,
            costs: config
                .components
                .iter()
                .map(|spec| {
                    interval_costs(spec, d, config.lambda, horizon, IntervalConvention::AbsoluteTime, mc)
                        .into_iter()
                        .map(|e| e.mean)
                        .collect()
                })
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.horizon as usize + 1;
        if self.costs.is_empty() || self.costs.iter().any(|c| c.len() != len) {
            return Err(domain(format!("every component needs {len} interval costs")));
        }
        if self.costs.iter().flatten().any(|c| !c.is_finite()) || !self.setup.is_finite() {
            return Err(domain("interval costs must be finite"));
        }
        Ok(())
    }

    #[inline]
    fn arc(&self, j: usize, from: u32, to: u32) -> f64 {
        self.costs[j][(to - from - 1) as usize]
    }

    /// Shortest renewal chain of component `j` through months allowed by
    /// `allowed` (`allowed[t-1]` for `t <= T`).
    fn chain(&self, j: usize, allowed: &[bool]) -> (f64, Vec<u32>) {
        let end = self.horizon + 1;
        let mut dist = vec![f64::INFINITY; end as usize + 1];
        let mut pred = vec![0u32; end as usize + 1];
        dist[0] = 0.0;
        for t in 1..=end {
            if t < end && !allowed[t as usize - 1] {
                continue;
            }
            for u in 0..t {
                if u > 0 && !allowed[u as usize - 1] {
                    continue;
                }
                let cand = dist[u as usize] + self.arc(j, u, t);
                if cand < dist[t as usize] {
                    dist[t as usize] = cand;
                    pred[t as usize] = u;
                }
            }
        }
        let mut path = Vec::new();
        let mut at = pred[end as usize];
        while at > 0 {
            path.push(at);
            at = pred[at as usize];
        }
        path.reverse();
        (dist[end as usize], path)
    }

    /// Canonical objective: set-up per open month plus every chain's arcs.
    pub fn objective(&self, renewals: &[Vec<u32>]) -> f64 {
        let open = Self::open_months(self.horizon, renewals);
        let mut total = self.setup * open.iter().filter(|&&z| z).count() as f64;
        for (j, chain) in renewals.iter().enumerate() {
            let mut prev = 0;
            for &t in chain.iter().chain(std::iter::once(&(self.horizon + 1))) {
                total += self.arc(j, prev, t);
                prev = t;
            }
        }
        total
    }

    fn open_months(horizon: u32, renewals: &[Vec<u32>]) -> Vec<bool> {
        let mut open = vec![false; horizon as usize];
        for &t in renewals.iter().flatten() {
            open[t as usize - 1] = true;
        }
        open
    }

    fn plan(&self, renewals: Vec<Vec<u32>>, lower_bound: f64, optimal: bool, nodes: u64) -> PmspicPlan {
        let objective = self.objective(&renewals);
        PmspicPlan {
            open: Self::open_months(self.horizon, &renewals),
            renewals,
            objective,
            lower_bound: if optimal { objective } else { lower_bound.min(objective) },
            optimal,
            nodes,
        }
    }

    /// Checks chain structure and the open-month linking constraint.
    pub fn check_plan(&self, plan: &PmspicPlan) -> Result<()> {
        if plan.renewals.len() != self.n() || plan.open.len() != self.horizon as usize {
            return Err(domain("plan dimensions differ from the problem"));
        }
        for chain in &plan.renewals {
            if chain.windows(2).any(|w| w[0] >= w[1]) || chain.iter().any(|&t| t < 1 || t > self.horizon) {
                return Err(domain("renewal chain must be strictly increasing inside [1, T]"));
            }
            if chain.iter().any(|&t| !plan.open[t as usize - 1]) {
                return Err(domain("renewal at a month that is not open"));
            }
        }
        if plan.objective != self.objective(&plan.renewals) {
            return Err(domain("objective differs from canonical evaluation"));
        }
        Ok(())
    }
}

/// Search limits for [`solve_pmspic_best_effort`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub max_nodes: u64,
    pub time_limit: Duration,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_nodes: 200_000,
            time_limit: Duration::from_secs(10),
        }
    }
}

/// Exact optimum for horizons up to [`EXACT_HORIZON_LIMIT`].
pub fn solve_pmspic(problem: &PmspicProblem) -> Result<PmspicPlan> {
    problem.validate()?;
    if problem.horizon > EXACT_HORIZON_LIMIT {
        return Err(Error::TooLarge(format!(
            "horizon {} exceeds the exact limit of {EXACT_HORIZON_LIMIT}; use solve_pmspic_best_effort",
            problem.horizon
        )));
    }
    Ok(branch_and_bound(problem, None))
}

/// Branch and bound stopped by `limits`; the result carries the incumbent
/// and a valid lower bound, and is flagged optimal only if the search
/// finished.
pub fn solve_pmspic_best_effort(problem: &PmspicProblem, limits: SearchLimits) -> Result<PmspicPlan> {
    problem.validate()?;
    Ok(branch_and_bound(problem, Some(limits)))
}

struct Node {
    depth: u32,
    open: Vec<bool>,
    parent_bound: f64,
}

/// Depth-first search over `z_1..z_T` in month order. At depth `k` the
/// months `1..=k` are fixed and later months are free of set-up charge, so
/// `d * (fixed open months) + sum of unrestricted-tail chains` bounds every
/// completion. The chains themselves give a feasible completion.
fn branch_and_bound(problem: &PmspicProblem, limits: Option<SearchLimits>) -> PmspicPlan {
    let horizon = problem.horizon;
    let n = problem.n();
    let started = Instant::now();
    let mut stack = vec![Node {
        depth: 0,
        open: vec![true; horizon as usize],
        parent_bound: f64::NEG_INFINITY,
    }];
    let mut best = local_search(problem);
    let mut nodes = 0u64;

    while let Some(node) = stack.pop() {
        if let Some(l) = limits {
            if nodes >= l.max_nodes || started.elapsed() >= l.time_limit {
                stack.push(node);
                break;
            }
        }
        nodes += 1;
        let fixed_open = node.open[..node.depth as usize].iter().filter(|&&z| z).count();
        let mut bound = problem.setup * fixed_open as f64;
        let mut chains = Vec::with_capacity(n);
        for j in 0..n {
            let (len, chain) = problem.chain(j, &node.open);
            bound += len;
            chains.push(chain);
        }
        // slack keeps near-ties alive so the canonical tie-break decides
        if bound > best.0 + 1e-9 * best.0.abs().max(1.0) {
            continue;
        }
        // the chains complete the fixed prefix; prefix months they leave
        // unused are dropped by the canonical evaluation
        let completion = problem.objective(&chains);
        if better(completion, &chains, &best) {
            best = (completion, chains.clone());
        }
        if node.depth == horizon {
            continue;
        }
        let month = node.depth + 1;
        let wanted = chains.iter().flatten().any(|&t| t == month);
        let mut closed = node.open.clone();
        closed[month as usize - 1] = false;
        let open_child = Node {
            depth: month,
            open: node.open,
            parent_bound: bound,
        };
        let closed_child = Node {
            depth: month,
            open: closed,
            parent_bound: bound,
        };
        // the preferred child is pushed last so it is explored first
        if wanted {
            stack.push(closed_child);
            stack.push(open_child);
        } else {
            stack.push(open_child);
            stack.push(closed_child);
        }
    }

    let (_, renewals) = best;
    let finished = stack.is_empty();
    let lower = stack
        .iter()
        .map(|n| n.parent_bound)
        .fold(f64::INFINITY, f64::min);
    let plan = problem.plan(renewals, lower, finished, nodes);
    if finished {
        plan
    } else {
        PmspicPlan {
            lower_bound: lower.min(plan.objective),
            ..plan
        }
    }
}

/// Lower canonical objective, then lexicographically smaller chains.
fn better(value: f64, chains: &[Vec<u32>], than: &(f64, Vec<Vec<u32>>)) -> bool {
    value < than.0 || (value == than.0 && chains < than.1.as_slice())
}

/// Set-up plus chain cost of the chains through `open`; months no chain
/// uses are not charged.
fn evaluate(problem: &PmspicProblem, open: &[bool]) -> (f64, Vec<Vec<u32>>) {
    let chains: Vec<Vec<u32>> = (0..problem.n()).map(|j| problem.chain(j, open).1).collect();
    (problem.objective(&chains), chains)
}

/// Starting incumbent: from the months the unrestricted chains use, flip
/// single months while that lowers the cost.
fn local_search(problem: &PmspicProblem) -> (f64, Vec<Vec<u32>>) {
    let horizon = problem.horizon as usize;
    let (mut value, mut chains) = evaluate(problem, &vec![true; horizon]);
    let mut open = PmspicProblem::open_months(problem.horizon, &chains);
    let mut improved = true;
    while improved {
        improved = false;
        for k in 0..horizon {
            open[k] = !open[k];
            let (v, c) = evaluate(problem, &open);
            if v < value {
                value = v;
                chains = c;
                open = PmspicProblem::open_months(problem.horizon, &chains);
                improved = true;
            } else {
                open[k] = !open[k];
            }
        }
    }
    (value, chains)
}

/// Exhaustive enumeration of open-month sets; test oracle.
pub fn brute_force_pmspic(problem: &PmspicProblem) -> Result<PmspicPlan> {
    problem.validate()?;
    if problem.horizon > BRUTE_FORCE_HORIZON_LIMIT {
        return Err(Error::TooLarge(format!(
            "horizon {} exceeds the brute-force limit of {BRUTE_FORCE_HORIZON_LIMIT}",
            problem.horizon
        )));
    }
    let t = problem.horizon as usize;
    let mut best: Option<(f64, Vec<Vec<u32>>)> = None;
    for bits in 0u64..1 << t {
        let open: Vec<bool> = (0..t).map(|k| bits & (1 << k) != 0).collect();
        let chains: Vec<Vec<u32>> = (0..problem.n()).map(|j| problem.chain(j, &open).1).collect();
        let value = problem.objective(&chains);
        if best.as_ref().is_none_or(|b| better(value, &chains, b)) {
            best = Some((value, chains));
        }
    }
    let (_, renewals) = best.expect("at least the empty set");
    Ok(problem.plan(renewals, f64::NEG_INFINITY, true, 1 << t))
}

/// The first planned PM occasion of a full-horizon plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstPm {
    /// No renewal before `T + 1`.
    Deferred,
    At { month: u32, components: Vec<usize> },
}

pub fn first_pm_extract(plan: &PmspicPlan) -> FirstPm {
    match plan.open.iter().position(|&z| z) {
        None => FirstPm::Deferred,
        Some(k) => {
            let month = k as u32 + 1;
            FirstPm::At {
                month,
                components: (0..plan.renewals.len())
                    .filter(|&j| plan.renewals[j].contains(&month))
                    .collect(),
            }
        }
    }
}

/// Monthly cost of the first renewal of each component, in the same form
/// as the next-PM objective: each distinct first-renewal month `t` (the
/// end month `T+1` included) contributes `(d + sum of c^j_t) / t`.
pub fn first_renewal_monthly_cost(problem: &PmspicProblem, plan: &PmspicPlan) -> f64 {
    let end = problem.horizon + 1;
    let firsts: Vec<u32> = plan.renewals.iter().map(|c| c.first().copied().unwrap_or(end)).collect();
    let mut months = firsts.clone();
    months.sort_unstable();
    months.dedup();
    months
        .iter()
        .map(|&t| {
            let block: f64 = (0..firsts.len())
                .filter(|&j| firsts[j] == t)
                .map(|j| problem.costs[j][t as usize - 1])
                .sum();
            (problem.setup + block) / t as f64
        })
        .sum()
}

/// One row of the first-PM comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub strategy: String,
    pub horizon: u32,
    /// First PM month per component, `None` when not in the first occasion.
    pub first_pm: Vec<Option<u32>>,
    pub monthly_cost: f64,
    pub solve_seconds: f64,
    pub optimal: bool,
    /// Full-horizon total cost of the returned plan and its proven lower
    /// bound (full-horizon rows only).
    pub total_cost: Option<f64>,
    pub lower_bound: Option<f64>,
}

/// Compares the first planned PM of the next-PM planner (window from the
/// configuration, fresh system) with the full-horizon model at `horizon`.
/// The configuration's calendar must be constant.
pub fn compare_first_pm(
    config: &SystemConfig,
    horizon: u32,
    limits: SearchLimits,
) -> Result<Vec<ComparisonRow>> {
    let d = config.calendar.month(1);
    if (1..=config.horizon).any(|t| config.calendar.month(t) != d) {
        return Err(domain("the comparison needs a constant set-up calendar"));
    }
    let n = config.n();

    let planner = Planner::new(config);
    let state = SystemState::fresh(config);
    let tables = planner.tables(state.s, &state.last_maintenance, state.r)?;
    let problem = crate::solver::NextPmProblem::from_tables(&tables, &config.calendar);
    let started = Instant::now();
    let plan = crate::solver::solve_next_pm(&problem)?;
    let pm_seconds = started.elapsed().as_secs_f64();
    let mut first_pm = vec![None; n];
    for &j in &plan.maintained {
        first_pm[j] = Some(plan.tau);
    }
    let mut rows = vec![ComparisonRow {
        strategy: "NextPM".into(),
        horizon: config.horizon,
        first_pm,
        monthly_cost: plan.objective,
        solve_seconds: pm_seconds,
        optimal: true,
        total_cost: None,
        lower_bound: None,
    }];

    let full = PmspicProblem::estimate(config, d, horizon, &config.mc);
    let started = Instant::now();
    let solved = if horizon <= EXACT_HORIZON_LIMIT {
        solve_pmspic(&full)?
    } else {
        solve_pmspic_best_effort(&full, limits)?
    };
    let seconds = started.elapsed().as_secs_f64();
    let mut first_pm = vec![None; n];
    if let FirstPm::At { month, components } = first_pm_extract(&solved) {
        for j in components {
            first_pm[j] = Some(month);
        }
    }
    rows.push(ComparisonRow {
        strategy: "PMSPIC".into(),
        horizon,
        first_pm,
        monthly_cost: first_renewal_monthly_cost(&full, &solved),
        solve_seconds: seconds,
        optimal: solved.optimal,
        total_cost: Some(solved.objective),
        lower_bound: Some(solved.lower_bound),
    });
    Ok(rows)
}

/// Writes `strategy,horizon,pm_1..pm_n,monthly_cost,solve_seconds,optimal,total_cost,lower_bound`.
pub fn write_comparison_csv<W: std::io::Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = rows.first().map_or(0, |r| r.first_pm.len());
    let mut header = vec!["strategy".to_string(), "horizon".to_string()];
    header.extend((1..=n).map(|j| format!("pm_{j}")));
    header.extend(["monthly_cost", "solve_seconds", "optimal", "total_cost", "lower_bound"].map(String::from));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.strategy.clone(), row.horizon.to_string()];
        rec.extend(row.first_pm.iter().map(|m| m.map_or("x".to_string(), |t| t.to_string())));
        rec.push(row.monthly_cost.to_string());
        rec.push(row.solve_seconds.to_string());
        rec.push(row.optimal.to_string());
        rec.push(row.total_cost.map(|b| b.to_string()).unwrap_or_default());
        rec.push(row.lower_bound.map(|b| b.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

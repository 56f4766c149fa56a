//! Monte Carlo expected costs over delayed renewal processes.
//!
//! For a component last renewed at `t_j` and observed at month `s`, the
//! failure times `U_1 < U_2 < ...` form a delayed renewal process: the first
//! total life is drawn conditioned on exceeding the current age `s - t_j`,
//! later lives are unconditional. One simulated path feeds every target
//! month `t` of a table, so neighbouring cells share their random numbers
//! and the argmin over `t` is not blurred by independent cell noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar::SetupCostCalendar;
use crate::config::SystemConfig;
use crate::error::{domain, Result};
use crate::lifetime::ComponentSpec;
use crate::rng::{self, substream, tag};

/// Replications per independent substream block.
const BLOCK: u64 = 4096;

/// Monte Carlo budget and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    #[serde(default = "McSettings::default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    /// Advisory ceiling on per-cell standard errors, kUSD. Only reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_stderr: Option<f64>,
}

impl McSettings {
    fn default_replications() -> u64 {
        100_000
    }

    pub fn new(replications: u64, seed: u64) -> Self {
        Self {
            replications,
            seed,
            target_stderr: None,
        }
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self::new(Self::default_replications(), 0)
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn estimate(&self, n: u64) -> Estimate {
        let nf = n as f64;
        let mean = self.sum / nf;
        let stderr = if n > 1 {
            let var = ((self.sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
            (var / nf).sqrt()
        } else {
            0.0
        };
        Estimate { mean, stderr }
    }
}

#[inline]
fn pow_lambda(x: f64, lambda: f64, int_lambda: Option<i32>) -> f64 {
    match int_lambda {
        Some(k) => x.powi(k),
        None => x.powf(lambda),
    }
}

fn integer_exponent(lambda: f64) -> Option<i32> {
    (lambda.fract() == 0.0 && (1.0..=16.0).contains(&lambda)).then_some(lambda as i32)
}

/// Cost functions of one component under a given calendar and discount
/// exponent `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct CostModel<'a> {
    pub spec: &'a ComponentSpec,
    pub calendar: &'a SetupCostCalendar,
    pub lambda: f64,
    pub horizon: u32,
}

/// `c_{s,t}` and `D_{s,t}` of one component for consecutive months.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentTable {
    pub component_id: u32,
    pub s: u32,
    pub last_maintenance: u32,
    pub first_month: u32,
    /// `cost[k]` is `c_{s, first_month + k}`.
    pub cost: Vec<Estimate>,
    /// `benefit[k]` is `D_{s, first_month + k}`; shorter than `cost` when the
    /// range reaches past the horizon.
    pub benefit: Vec<Estimate>,
}

impl ComponentTable {
    pub fn cost_at(&self, t: u32) -> Option<Estimate> {
        t.checked_sub(self.first_month)
            .and_then(|k| self.cost.get(k as usize).copied())
    }

    pub fn benefit_at(&self, t: u32) -> Option<Estimate> {
        t.checked_sub(self.first_month)
            .and_then(|k| self.benefit.get(k as usize).copied())
    }

    pub fn last_month(&self) -> u32 {
        self.first_month + self.cost.len() as u32 - 1
    }
}

struct Accumulator {
    cost: Vec<Moments>,
    benefit: Vec<Moments>,
}

impl<'a> CostModel<'a> {
    pub fn new(
        spec: &'a ComponentSpec,
        calendar: &'a SetupCostCalendar,
        lambda: f64,
        horizon: u32,
    ) -> Self {
        Self {
            spec,
            calendar,
            lambda,
            horizon,
        }
    }

    /// Additional cost of a failure `u` months after `start`, when the next
    /// PM was planned `t` months after `start`.
    pub fn failure_cost(&self, start: f64, u: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) || !(0.0..=t).contains(&u) {
            return Err(domain(format!("failure cost needs 0 <= u <= t, t > 0; got u={u}, t={t}")));
        }
        Ok(self.failure_cost_unchecked(start, u, t, integer_exponent(self.lambda)))
    }

    #[inline]
    fn failure_cost_unchecked(&self, start: f64, u: f64, t: f64, int_lambda: Option<i32>) -> f64 {
        let cal = self.calendar;
        self.spec.cm_cost + cal.at(start + u)
            - pow_lambda(u / t, self.lambda, int_lambda) * (self.spec.pm_cost + cal.at(start + t))
    }

    fn check_state(&self, s: u32, last: u32) -> Result<()> {
        if last > s {
            return Err(domain(format!("last maintenance {last} is after current month {s}")));
        }
        Ok(())
    }

    /// Expected cost `c_{s,t}` of a PM planned at month `t`.
    pub fn expected_pm_cost(&self, s: u32, last: u32, t: u32, mc: &McSettings) -> Result<Estimate> {
        self.check_state(s, last)?;
        if t <= s || t > self.horizon + 1 {
            return Err(domain(format!("PM month {t} must lie in [{}, {}]", s + 1, self.horizon + 1)));
        }
        let table = self.simulate(s, last, t, t, false, mc);
        Ok(table.cost[0])
    }

    /// PM benefit `D_{s,t}`: expected cost of running to failure until `T`
    /// minus the expected cost of PM at `t` followed by running to failure.
    pub fn pm_benefit(&self, s: u32, last: u32, t: u32, mc: &McSettings) -> Result<Estimate> {
        self.check_state(s, last)?;
        if t <= s || t > self.horizon {
            return Err(domain(format!("benefit month {t} must lie in [{}, {}]", s + 1, self.horizon)));
        }
        let table = self.simulate(s, last, t, t, true, mc);
        Ok(table.benefit[0])
    }

    /// `c` for months `first..=last_month` and `D` for those not beyond `T`.
    pub fn table(
        &self,
        s: u32,
        last: u32,
        first: u32,
        last_month: u32,
        mc: &McSettings,
    ) -> Result<ComponentTable> {
        self.check_state(s, last)?;
        if first <= s || last_month < first || last_month > self.horizon + 1 {
            return Err(domain(format!(
                "table months [{first}, {last_month}] must lie in [{}, {}]",
                s + 1,
                self.horizon + 1
            )));
        }
        Ok(self.simulate(s, last, first, last_month, true, mc))
    }

    fn simulate(
        &self,
        s: u32,
        last: u32,
        first: u32,
        last_month: u32,
        with_benefit: bool,
        mc: &McSettings,
    ) -> ComponentTable {
        let n_cost = (last_month - first + 1) as usize;
        let n_benefit = if with_benefit {
            (last_month.min(self.horizon) + 1).saturating_sub(first) as usize
        } else {
            0
        };
        let reps = mc.replications.max(1);
        let blocks = reps.div_ceil(BLOCK);
        let stream_key = [tag::COST_TABLE, self.spec.id as u64, s as u64, last as u64];

        let acc = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let n = BLOCK.min(reps - b * BLOCK);
                let mut key = stream_key.to_vec();
                key.push(b);
                let mut rng = substream(mc.seed, &key);
                self.run_block(s, last, first, n_cost, n_benefit, n, &mut rng)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(None::<Accumulator>, |acc, block| match acc {
                None => Some(block),
                Some(mut a) => {
                    a.cost.iter_mut().zip(&block.cost).for_each(|(x, y)| x.merge(y));
                    a.benefit.iter_mut().zip(&block.benefit).for_each(|(x, y)| x.merge(y));
                    Some(a)
                }
            })
            .expect("at least one block");

        ComponentTable {
            component_id: self.spec.id,
            s,
            last_maintenance: last,
            first_month: first,
            cost: acc.cost.iter().map(|m| m.estimate(reps)).collect(),
            benefit: acc.benefit.iter().map(|m| m.estimate(reps)).collect(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn run_block(
        &self,
        s: u32,
        last: u32,
        first: u32,
        n_cost: usize,
        n_benefit: usize,
        replications: u64,
        rng: &mut rng::Stream,
    ) -> Accumulator {
        let spec = self.spec;
        let cal = self.calendar;
        let horizon = self.horizon as f64;
        let int_lambda = integer_exponent(self.lambda);
        let age = (s - last) as f64;
        let s_f = s as f64;

        let mut cost = vec![Moments::default(); n_cost];
        let mut benefit = vec![Moments::default(); n_benefit];
        let mut failures: Vec<f64> = Vec::with_capacity(16);
        let mut fresh: Vec<f64> = Vec::with_capacity(16);
        let mut gsum = vec![0.0; n_cost];

        for _ in 0..replications {
            // The path limits are fixed so that every range over the same
            // state consumes identical draws.
            failures.clear();
            let mut u = last as f64 + spec.conditional_life_from_uniform(age, rng::open_unit(rng));
            while u <= horizon + 1.0 {
                failures.push(u);
                u += spec.sample_life(rng);
            }
            fresh.clear();
            let mut v = spec.sample_life(rng);
            while v <= horizon {
                fresh.push(v);
                v += spec.sample_life(rng);
            }

            gsum.iter_mut().for_each(|g| *g = 0.0);
            let mut prev = s_f;
            for &fail in &failures {
                let inter = fail - prev;
                let d_fail = cal.at(fail);
                let lo = (fail.ceil() as u32).max(first);
                for k in (lo - first) as usize..n_cost {
                    let window = (first + k as u32 - s) as f64;
                    gsum[k] += spec.cm_cost + d_fail
                        - pow_lambda(inter / window, self.lambda, int_lambda)
                            * (spec.pm_cost + cal.at(prev + window));
                }
                prev = fail;
            }
            for (m, g) in cost.iter_mut().zip(&gsum) {
                m.push(spec.pm_cost + g);
            }

            if n_benefit > 0 {
                let no_pm: f64 = failures
                    .iter()
                    .take_while(|&&f| f <= horizon)
                    .map(|&f| spec.cm_cost + cal.at(f))
                    .sum();
                for (k, m) in benefit.iter_mut().enumerate() {
                    let t = (first + k as u32) as f64;
                    let after_pm: f64 = fresh
                        .iter()
                        .take_while(|&&v| t + v <= horizon)
                        .map(|&v| spec.cm_cost + cal.at(t + v))
                        .sum();
                    m.push(no_pm - (spec.pm_cost + gsum[k]) - after_pm);
                }
            }
        }
        Accumulator { cost, benefit }
    }
}

/// Expected number of renewals in `[0, t]` of a zero-delay renewal process.
pub fn renewal_function(spec: &ComponentSpec, t: f64, mc: &McSettings) -> Result<Estimate> {
    if !(t >= 0.0) {
        return Err(domain(format!("renewal function needs t >= 0, got {t}")));
    }
    let reps = mc.replications.max(1);
    let blocks = reps.div_ceil(BLOCK);
    let acc = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(mc.seed, &[tag::RENEWAL, spec.id as u64, b]);
            let mut m = Moments::default();
            for _ in 0..BLOCK.min(reps - b * BLOCK) {
                let mut count = 0u32;
                let mut v = spec.sample_life(&mut rng);
                while v <= t {
                    count += 1;
                    v += spec.sample_life(&mut rng);
                }
                m.push(count as f64);
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Moments::default(), |mut a, b| {
            a.merge(&b);
            a
        });
    Ok(acc.estimate(reps))
}

/// Long-run monthly cost of corrective-only maintenance,
/// `sum_j (mean(d) + b_j) / mu_j`.
pub fn cm_only_rate(config: &SystemConfig) -> f64 {
    let d_bar = config.calendar.mean(config.horizon);
    config
        .components
        .iter()
        .map(|c| (d_bar + c.cm_cost) / c.mean_life())
        .sum()
}

/// Cost and benefit tables of every component for months `[s+1, r+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTables {
    pub s: u32,
    pub r: u32,
    pub horizon: u32,
    pub settings: McSettings,
    pub components: Vec<ComponentTable>,
}

impl CostTables {
    pub fn cost(&self, j: usize, t: u32) -> f64 {
        self.components[j].cost_at(t).expect("month inside table").mean
    }

    /// `D` at month `t`, `None` outside `[s+1, min(r, T)]`.
    pub fn benefit(&self, j: usize, t: u32) -> Option<f64> {
        if t > self.r {
            return None;
        }
        self.components[j].benefit_at(t).map(|e| e.mean)
    }

    pub fn months(&self) -> std::ops::RangeInclusive<u32> {
        self.s + 1..=self.r + 1
    }

    /// Writes `j,t,c,c_stderr,D,D_stderr`; `D` is blank in the deferral column.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "t", "c", "c_stderr", "D", "D_stderr"])?;
        for table in &self.components {
            for t in self.months() {
                let c = table.cost_at(t).expect("month inside table");
                let (d, d_se) = match table.benefit_at(t).filter(|_| t <= self.r) {
                    Some(e) => (e.mean.to_string(), e.stderr.to_string()),
                    None => (String::new(), String::new()),
                };
                w.write_record([
                    table.component_id.to_string(),
                    t.to_string(),
                    c.mean.to_string(),
                    c.stderr.to_string(),
                    d,
                    d_se,
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds `c` for `t in [s+1, r+1]` and `D` for `t in [s+1, r]`.
pub fn build_cost_tables(
    config: &SystemConfig,
    s: u32,
    last_maintenance: &[u32],
    r: u32,
    mc: &McSettings,
) -> Result<CostTables> {
    if last_maintenance.len() != config.components.len() {
        return Err(domain(format!(
            "{} last-maintenance times for {} components",
            last_maintenance.len(),
            config.components.len()
        )));
    }
    if r < s + 1 || r > config.horizon {
        return Err(domain(format!("window end {r} must lie in [{}, {}]", s + 1, config.horizon)));
    }
    let components = config
        .components
        .iter()
        .zip(last_maintenance)
        .map(|(spec, &last)| config.cost_model(spec).table(s, last, s + 1, r + 1, mc))
        .collect::<Result<Vec<_>>>()?;
    Ok(CostTables {
        s,
        r,
        horizon: config.horizon,
        settings: *mc,
        components,
    })
}

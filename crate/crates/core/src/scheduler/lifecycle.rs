use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{advance, Advance, MaintenanceEvent, Planner, SystemState};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rng::{substream, tag, Stream};
use crate::solver::PmPlan;

/// Supplies successive total lives of each component, starting at age 0.
pub trait LifeSource {
    fn next_life(&mut self, component: usize) -> Option<f64>;
}

/// Lives fixed in advance; running out is an error.
#[derive(Debug, Clone, Default)]
pub struct ScriptedLives(pub Vec<VecDeque<f64>>);

impl ScriptedLives {
    pub fn new(lives: Vec<Vec<f64>>) -> Self {
        Self(lives.into_iter().map(VecDeque::from).collect())
    }

    /// Every component lives forever.
    pub fn immortal(n: usize) -> Self {
        Self(vec![VecDeque::from(vec![f64::INFINITY]); n])
    }
}

impl LifeSource for ScriptedLives {
    fn next_life(&mut self, component: usize) -> Option<f64> {
        let lives = self.0.get_mut(component)?;
        match lives.len() {
            0 => None,
            // an infinite life repeats forever
            1 if lives[0].is_infinite() => Some(f64::INFINITY),
            _ => lives.pop_front(),
        }
    }
}

/// Weibull lives from one substream per component, so two strategies run
/// with the same seed see the same sequence of lives for each component.
#[derive(Debug, Clone)]
pub struct SampledLives {
    specs: Vec<crate::lifetime::ComponentSpec>,
    streams: Vec<Stream>,
}

impl SampledLives {
    pub fn new(config: &SystemConfig, seed: u64) -> Self {
        Self {
            specs: config.components.clone(),
            streams: config
                .components
                .iter()
                .map(|c| substream(seed, &[tag::LIVES, c.id as u64]))
                .collect(),
        }
    }
}

impl LifeSource for SampledLives {
    fn next_life(&mut self, component: usize) -> Option<f64> {
        let spec = self.specs.get(component)?;
        Some(spec.sample_life(&mut self.streams[component]))
    }
}

/// Absolute time at which each component will next fail.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureClock {
    pub failure_at: Vec<f64>,
}

impl FailureClock {
    /// All components new at time 0.
    pub fn fresh(n: usize, lives: &mut dyn LifeSource) -> Result<Self> {
        let failure_at = (0..n)
            .map(|j| lives.next_life(j).ok_or(Error::TraceExhausted(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { failure_at })
    }

    pub fn from_times(failure_at: Vec<f64>) -> Self {
        Self { failure_at }
    }

    /// Earliest failure at or before `until`; ties go to the lower index.
    pub fn earliest_until(&self, until: f64) -> Option<(usize, f64)> {
        self.failure_at
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, f)| f <= until)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    /// Components renewed at `time` start a fresh life.
    pub fn renew(&mut self, components: &[usize], time: f64, lives: &mut dyn LifeSource) -> Result<()> {
        for &j in components {
            let life = lives.next_life(j).ok_or(Error::TraceExhausted(j))?;
            self.failure_at[j] = time + life;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// The rescheduling loop.
    NextPm,
    /// Repair on failure only.
    CmOnly,
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::NextPm => "nextpm",
            Strategy::CmOnly => "cm-only",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nextpm" | "next-pm" => Ok(Strategy::NextPm),
            "cm-only" | "cm" => Ok(Strategy::CmOnly),
            other => Err(Error::Domain(format!("unknown strategy {other:?}"))),
        }
    }
}

/// One simulated trajectory over `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifecycleResult {
    pub strategy: Strategy,
    pub seed: u64,
    pub events: Vec<MaintenanceEvent>,
    pub total_cost: f64,
    /// `total_cost / T`.
    pub monthly_rate: f64,
    /// The first next-PM plan of the run (its objective is the planning rate).
    pub first_plan: Option<PmPlan>,
    /// Month at which the rescheduling loop stopped planning.
    pub planning_stopped_at: Option<u32>,
}

/// Simulates one lifespan under `strategy`.
///
/// Lives come from `SampledLives::new(config, seed)`. Under the next-PM
/// strategy, once the loop stops planning (next PM at or past `T`), the
/// remaining failures before `T` are still repaired correctively so both
/// strategies are charged over the same span.
pub fn run_lifecycle(planner: &Planner<'_>, strategy: Strategy, seed: u64) -> Result<LifecycleResult> {
    let config = planner.config();
    let horizon = config.horizon;
    let mut lives = SampledLives::new(config, seed);
    let mut clock = FailureClock::fresh(config.n(), &mut lives)?;
    let mut events = Vec::new();
    let mut first_plan = None;
    let mut planning_stopped_at = None;
    let mut from = 0u32;

    if strategy == Strategy::NextPm && horizon > 0 {
        let mut state = SystemState::fresh(config);
        loop {
            if state.s >= horizon || state.r <= state.s {
                break;
            }
            let (plan, _) = planner.step_plan(&state)?;
            if first_plan.is_none() {
                first_plan = Some(plan.clone());
            }
            match advance(planner, &state, &plan, &mut clock, &mut lives)? {
                Advance::Stop => break,
                Advance::Moved { state: next, events: new, .. } => {
                    debug_assert!(next.s > state.s);
                    events.extend(new);
                    state = next;
                }
            }
        }
        planning_stopped_at = Some(state.s);
        from = state.s;
    }

    events.extend(corrective_until_horizon(config, from, &mut clock, &mut lives)?);

    let total_cost: f64 = events.iter().map(|e| e.cost).sum();
    Ok(LifecycleResult {
        strategy,
        seed,
        events,
        total_cost,
        monthly_rate: if horizon > 0 { total_cost / horizon as f64 } else { 0.0 },
        first_plan,
        planning_stopped_at,
    })
}

/// Repairs every failure before `T` at the start of the following month;
/// failures in the same month share one visit.
fn corrective_until_horizon(
    config: &SystemConfig,
    from: u32,
    clock: &mut FailureClock,
    lives: &mut dyn LifeSource,
) -> Result<Vec<MaintenanceEvent>> {
    let horizon = config.horizon as f64;
    let mut events = Vec::new();
    let mut last_visit = from;
    while let Some((_, at)) = clock.earliest_until(f64::INFINITY) {
        if at >= horizon {
            break;
        }
        let visit = ((at.floor() as u32) + 1).max(last_visit + 1);
        if visit > config.horizon {
            break;
        }
        let failed: Vec<usize> = (0..clock.failure_at.len())
            .filter(|&j| clock.failure_at[j] < visit as f64)
            .collect();
        clock.renew(&failed, visit as f64, lives)?;
        events.push(MaintenanceEvent::new(config, visit, failed, Vec::new()));
        last_visit = visit;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_lives_run_out() {
        let mut lives = ScriptedLives::new(vec![vec![1.0, 2.0]]);
        assert_eq!(lives.next_life(0), Some(1.0));
        assert_eq!(lives.next_life(0), Some(2.0));
        assert_eq!(lives.next_life(0), None);
        let mut forever = ScriptedLives::immortal(1);
        for _ in 0..5 {
            assert_eq!(forever.next_life(0), Some(f64::INFINITY));
        }
    }

    #[test]
    fn earliest_failure_tie_goes_to_lower_index() {
        let clock = FailureClock::from_times(vec![5.0, 3.0, 3.0, 9.0]);
        assert_eq!(clock.earliest_until(4.0), Some((1, 3.0)));
        assert_eq!(clock.earliest_until(2.0), None);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("cm-only".parse::<Strategy>().unwrap(), Strategy::CmOnly);
        assert_eq!("nextpm".parse::<Strategy>().unwrap(), Strategy::NextPm);
        assert!("pm".parse::<Strategy>().is_err());
    }
}

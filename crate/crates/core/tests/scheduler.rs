use nextpm::calendar::{SetupCostCalendar, SEASONAL_PATTERN_D5};
use nextpm::config::wind_turbine;
use nextpm::scheduler::{
    advance, run_lifecycle, run_study, Advance, FailureClock, ScriptedLives, Strategy,
};
use nextpm::{Error, MaintenanceKind, McSettings, Planner, PmPlan, SystemConfig, SystemState};

fn turbine(d: f64, reps: u64) -> SystemConfig {
    wind_turbine(SetupCostCalendar::constant(240, d), McSettings::new(reps, 2024))
}

fn pm_everything_at(tau: u32) -> PmPlan {
    PmPlan {
        tau,
        maintained: vec![0, 1, 2, 3],
        objective: f64::NAN,
        assignment: vec![tau; 4],
    }
}

#[test]
fn planned_pm_without_failures() {
    let config = turbine(5.0, 1_000);
    let planner = Planner::new(&config);
    let state = SystemState::fresh(&config);
    let mut clock = FailureClock::from_times(vec![f64::INFINITY; 4]);
    let mut lives = ScriptedLives::immortal(4);
    let Advance::Moved { state, events, opportunistic } =
        advance(&planner, &state, &pm_everything_at(50), &mut clock, &mut lives).unwrap()
    else {
        panic!("expected a move");
    };
    assert_eq!((state.s, state.r), (50, 130));
    assert_eq!(state.last_maintenance, vec![50; 4]);
    assert!(opportunistic.is_none());
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].kind, MaintenanceKind::Preventive);
    assert_eq!(events[0].time, 50);
    assert_eq!(events[0].cost, 5.0 + 36.75 + 23.75 + 46.75 + 33.75);
    assert_eq!(events[0].cost, 146.0);
}

#[test]
fn failure_preempts_the_plan() {
    let config = turbine(5.0, 20_000);
    let planner = Planner::new(&config);
    let state = SystemState::fresh(&config);
    let mut clock = FailureClock::from_times(vec![f64::INFINITY, f64::INFINITY, 12.4, f64::INFINITY]);
    let mut lives = ScriptedLives::immortal(4);
    let Advance::Moved { state: next, events, opportunistic } =
        advance(&planner, &state, &pm_everything_at(50), &mut clock, &mut lives).unwrap()
    else {
        panic!("expected a move");
    };
    let om = opportunistic.expect("opportunistic plan");
    let (expected_om, _) = planner.opportunistic(12, &state.last_maintenance, 2).unwrap();
    assert_eq!(om, expected_om);
    assert_eq!((next.s, next.r), (13, 93));
    assert_eq!(next.last_maintenance[2], 13);
    assert_eq!(events.len(), 1);
    let e = &events[0];
    assert_eq!((e.time, e.kind), (13, MaintenanceKind::Corrective));
    assert_eq!(e.corrective, vec![2]);
    assert_eq!(e.preventive, om.opportunistic);
    let om_cost: f64 = om.opportunistic.iter().map(|&j| config.components[j].pm_cost).sum();
    assert_eq!(e.cost, 5.0 + 202.0 + om_cost);
    for &j in &om.opportunistic {
        assert_eq!(next.last_maintenance[j], 13);
    }
}

#[test]
fn plan_at_or_past_the_horizon_stops() {
    let config = turbine(5.0, 1_000);
    let planner = Planner::new(&config);
    let state = SystemState { s: 200, last_maintenance: vec![150; 4], r: 240, horizon: 240, window: 80 };
    let mut clock = FailureClock::from_times(vec![f64::INFINITY; 4]);
    let mut lives = ScriptedLives::immortal(4);
    for tau in [240, 241] {
        let out = advance(&planner, &state, &pm_everything_at(tau), &mut clock, &mut lives).unwrap();
        assert_eq!(out, Advance::Stop);
    }
}

#[test]
fn running_out_of_lives_is_an_error() {
    let config = turbine(5.0, 1_000);
    let planner = Planner::new(&config);
    let state = SystemState::fresh(&config);
    let mut clock = FailureClock::from_times(vec![f64::INFINITY; 4]);
    let mut lives = ScriptedLives::new(vec![vec![]; 4]);
    let err = advance(&planner, &state, &pm_everything_at(50), &mut clock, &mut lives).unwrap_err();
    assert!(matches!(err, Error::TraceExhausted(_)));
}

#[test]
fn last_month_window_offers_t_or_nothing() {
    let config = turbine(5.0, 2_000);
    let planner = Planner::new(&config);
    let state = SystemState { s: 239, last_maintenance: vec![180, 200, 239, 100], r: 240, horizon: 240, window: 80 };
    let (plan, _) = planner.step_plan(&state).unwrap();
    assert!(plan.tau == 240 || plan.tau == 241);
}

#[test]
fn plans_are_reproducible() {
    let config = turbine(5.0, 5_000);
    let state = SystemState { s: 30, last_maintenance: vec![0, 12, 30, 0], r: 110, horizon: 240, window: 80 };
    let a = Planner::new(&config).step_plan(&state).unwrap();
    let b = Planner::new(&config).with_cache().step_plan(&state).unwrap();
    assert_eq!(a, b);
}

#[test]
fn loop_invariants_hold_over_many_lifecycles() {
    let config = wind_turbine(SetupCostCalendar::seasonal(240, &SEASONAL_PATTERN_D5, true), McSettings::new(500, 3));
    let planner = Planner::new(&config).with_cache();
    for seed in 0..25 {
        let run = run_lifecycle(&planner, Strategy::NextPm, seed).unwrap();
        let mut last = 0;
        for e in &run.events {
            assert!(e.time > last && e.time <= 240, "times must increase: {:?}", run.events);
            last = e.time;
            assert_eq!(e.cost, e.recompute(&config));
            assert_eq!(e.setup_cost, config.calendar.month(e.time));
        }
        let total: f64 = run.events.iter().map(|e| e.cost).sum();
        assert_eq!(run.total_cost, total);
        assert!(run.monthly_rate >= 0.0);

        // replay the log through the state machine
        let mut state = SystemState::fresh(&config);
        for e in &run.events {
            if e.time > run.planning_stopped_at.unwrap() {
                break;
            }
            let next = state.moved_to(e.time, &e.renewed());
            assert!(next.s > state.s);
            assert_eq!(next.r - next.s, config.window.min(240 - next.s));
            assert!(next.ages().iter().all(|&a| a <= next.s));
            state = next;
        }
    }
}

#[test]
fn study_of_one_matches_single_run() {
    let config = turbine(5.0, 500);
    let planner = Planner::new(&config);
    let report = run_study(&planner, &[Strategy::NextPm, Strategy::CmOnly], 1, 42).unwrap();
    for (k, strategy) in [Strategy::NextPm, Strategy::CmOnly].into_iter().enumerate() {
        let run = &report.runs[k][0];
        assert_eq!(run, &run_lifecycle(&planner, strategy, run.seed).unwrap());
        assert_eq!(report.strategies[k].mean_rate, run.monthly_rate);
    }
}

#[test]
fn identical_seeds_give_identical_reports() {
    let config = turbine(5.0, 500);
    let planner = Planner::new(&config);
    let a = run_study(&planner, &[Strategy::NextPm, Strategy::CmOnly], 6, 5).unwrap();
    let b = run_study(&planner, &[Strategy::NextPm, Strategy::CmOnly], 6, 5).unwrap();
    assert_eq!(a, b);
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("strategy,mean_rate,stderr,ci_low,ci_high,saving_pct\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn paired_strategies_see_the_same_first_failures() {
    let config = turbine(5.0, 500);
    let planner = Planner::new(&config).with_cache();
    for seed in 0..20 {
        let pm = run_lifecycle(&planner, Strategy::NextPm, seed).unwrap();
        let cm = run_lifecycle(&planner, Strategy::CmOnly, seed).unwrap();
        // Same lives: the planned run either acts before the first failure
        // or repairs it in the same month as the repair-only run.
        let first_pm = pm.events.first().map_or(u32::MAX, |e| e.time);
        let first_cm = cm.events.first().map_or(u32::MAX, |e| e.time);
        assert!(first_pm <= first_cm);
        assert_eq!(cm.first_plan, None);
        assert!(pm.first_plan.is_some());
    }
}

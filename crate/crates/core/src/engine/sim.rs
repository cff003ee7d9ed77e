use super::fixpoint::{discrete_fixpoint, FixpointOutcome};
use super::plan::{evaluate_plan, integrate, plan_continuous, EquationPlan};
use super::store::{instantiate_root, ObjectStore};
use super::{EngineError, Model};
use crate::values::Value;

/// Time stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub start_time: f64,
    pub end_time: f64,
    pub time_step: f64,
    pub max_discrete_iterations: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { start_time: 0.0, end_time: 10.0, time_step: 1.0 / 64.0, max_discrete_iterations: 1000 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let fail = |m: String| Err(EngineError::Config(m));
        if !(self.time_step.is_finite() && self.time_step > 0.0) {
            return fail(format!("time step must be positive, got {}", self.time_step));
        }
        if !self.start_time.is_finite() || !self.end_time.is_finite() {
            return fail("start and end time must be finite".into());
        }
        if self.end_time <= self.start_time {
            return fail(format!("end time {} must be greater than start time {}", self.end_time, self.start_time));
        }
        if self.max_discrete_iterations == 0 {
            return fail("discrete iteration limit must be at least 1".into());
        }
        Ok(())
    }
}

pub type ObserverError = Box<dyn std::error::Error + Send + Sync>;

/// Receives the state after every completed step.
pub trait Observer {
    fn observe(&mut self, time: f64, store: &ObjectStore) -> Result<(), ObserverError>;

    /// Flushes buffered output. Called once after the last frame.
    fn finish(&mut self) -> Result<(), ObserverError> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    pub frames: u64,
    pub steps: u64,
    pub discrete_events: u64,
    pub replans: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub time: f64,
    pub fixpoint: FixpointOutcome,
    pub replanned: bool,
}

/// A running simulation. Every reported state is settled: the discrete
/// fixpoint holds and algebraic variables agree with the integrated state.
///
/// A step integrates with the derivatives of the previous settled state,
/// advances time, runs the discrete fixpoint, replans if guards or the object
/// graph changed, and re-evaluates the continuous equations.
pub struct Simulation<'m> {
    model: &'m Model,
    store: ObjectStore,
    config: SimConfig,
    plan: EquationPlan,
    steps: u64,
    stats: RunStats,
}

impl<'m> Simulation<'m> {
    pub fn new(model: &'m Model, root: &str, args: Vec<Value>, config: SimConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let start = config.start_time;
        let mut store = instantiate_root(model, root, args).map_err(|e| e.at_time(start))?;
        let fixpoint =
            discrete_fixpoint(model, &mut store, config.max_discrete_iterations).map_err(|e| e.at_time(start))?;
        let plan = plan_continuous(model, &store).map_err(|e| e.at_time(start))?;
        evaluate_plan(&mut store, &plan).map_err(|e| e.at_time(start))?;
        let stats = RunStats { discrete_events: fixpoint.fired as u64, replans: 1, ..RunStats::default() };
        Ok(Simulation { model, store, config, plan, steps: 0, stats })
    }

    pub fn store(&self) -> &ObjectStore {
        &self.store
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn plan(&self) -> &EquationPlan {
        &self.plan
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    /// Current simulation time: `start + n * h` after `n` steps.
    pub fn time(&self) -> f64 {
        self.config.start_time + self.steps as f64 * self.config.time_step
    }

    pub fn is_finished(&self) -> bool {
        self.time() >= self.config.end_time - self.config.time_step * 1e-9
    }

    /// Runs the discrete fixpoint and brings the continuous equations up to date.
    pub fn settle(&mut self) -> Result<(FixpointOutcome, bool), EngineError> {
        let time = self.time();
        let fixpoint = discrete_fixpoint(self.model, &mut self.store, self.config.max_discrete_iterations)
            .map_err(|e| e.at_time(time))?;
        self.stats.discrete_events += fixpoint.fired as u64;
        let replan = fixpoint.changed || !self.plan.is_current(self.model, &self.store).map_err(|e| e.at_time(time))?;
        if replan {
            self.plan = plan_continuous(self.model, &self.store).map_err(|e| e.at_time(time))?;
            self.stats.replans += 1;
        }
        evaluate_plan(&mut self.store, &self.plan).map_err(|e| e.at_time(time))?;
        Ok((fixpoint, replan))
    }

    /// Advances one time step.
    pub fn step(&mut self) -> Result<StepReport, EngineError> {
        let time = self.time();
        integrate(&mut self.store, self.config.time_step).map_err(|e| e.at_time(time))?;
        self.steps += 1;
        self.stats.steps += 1;
        let (fixpoint, replanned) = self.settle()?;
        Ok(StepReport { time: self.time(), fixpoint, replanned })
    }

    fn emit(&mut self, observers: &mut [&mut dyn Observer]) -> Result<(), EngineError> {
        let time = self.time();
        for o in observers.iter_mut() {
            o.observe(time, &self.store).map_err(|e| EngineError::Output(e.to_string()))?;
        }
        self.stats.frames += 1;
        Ok(())
    }

    /// Emits the current state, then steps until the end time, emitting after
    /// each step. Observers are not finished.
    pub fn run(&mut self, observers: &mut [&mut dyn Observer]) -> Result<RunStats, EngineError> {
        self.emit(observers)?;
        while !self.is_finished() {
            self.step()?;
            self.emit(observers)?;
        }
        Ok(self.stats)
    }
}

/// Runs `root` from start to end, feeding every frame to `observers` and
/// finishing them. Returns the final store.
pub fn simulate(
    model: &Model,
    root: &str,
    args: Vec<Value>,
    config: SimConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<(ObjectStore, RunStats), EngineError> {
    let mut sim = Simulation::new(model, root, args, config)?;
    let stats = sim.run(observers)?;
    for o in observers.iter_mut() {
        o.finish().map_err(|e| EngineError::Output(e.to_string()))?;
    }
    Ok((sim.store, stats))
}

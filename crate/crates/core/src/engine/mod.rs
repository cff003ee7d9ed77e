//! Hybrid simulation: object instantiation, the discrete fixpoint, continuous
//! equation planning and explicit Euler integration.

mod eval;
mod fixpoint;
mod plan;
mod sim;
mod store;
pub mod trace;

use std::collections::HashMap;

use crate::syntax::{ClassDef, Pos};
use crate::values::{ObjectId, ValueError};

pub use eval::eval_const;
pub use fixpoint::{discrete_fixpoint, FixpointOutcome};
pub use plan::{continuous_step, evaluate_plan, integrate, plan_continuous, Equation, EquationPlan};
pub use sim::{simulate, Observer, ObserverError, RunStats, SimConfig, Simulation, StepReport};
pub use store::{instantiate, instantiate_root, terminate, Field, ObjectInstance, ObjectStore, Slot};
pub use trace::TraceFrame;

/// Class definitions indexed by name.
#[derive(Debug, Clone)]
pub struct Model {
    classes: Vec<ClassDef>,
    index: HashMap<String, usize>,
}

impl Model {
    pub fn new(classes: Vec<ClassDef>) -> Result<Model, EngineError> {
        let mut index = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.name.clone(), i).is_some() {
                return Err(EngineError::DuplicateClass(c.name.clone()));
            }
        }
        Ok(Model { classes, index })
    }

    pub fn class(&self, name: &str) -> Result<&ClassDef, EngineError> {
        self.index.get(name).map(|&i| &self.classes[i]).ok_or_else(|| EngineError::UnknownClass(name.to_string()))
    }

    pub fn classes(&self) -> &[ClassDef] {
        &self.classes
    }

    /// The class a model file runs by default: the last one defined.
    pub fn default_root(&self) -> Option<&str> {
        self.classes.last().map(|c| c.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class `{0}` is defined more than once")]
    DuplicateClass(String),
    #[error("class `{class}` takes {expected} argument(s), got {found}")]
    Arity { class: String, expected: usize, found: usize },
    #[error("`{name}` is declared more than once in class `{class}`")]
    DuplicateDeclaration { class: String, name: String },
    #[error("derivative chain of `{name}` in class `{class}` is missing `{missing}`")]
    IncompleteChain { class: String, name: String, missing: String },
    #[error("undeclared variable `{name}` in {object}")]
    Undeclared { object: String, name: String },
    #[error("dangling object reference {0}")]
    Dangling(ObjectId),
    #[error("expected an object reference, found {0}")]
    NotAnObject(&'static str),
    #[error("condition must be boolean, found {0}")]
    NonBooleanGuard(&'static str),
    #[error("conflicting discrete writers for {}", .0.join(", "))]
    ConflictingDiscreteWriters(Vec<String>),
    #[error("non-convergent discrete behavior: no fixpoint within {0} iterations")]
    NonConvergent(usize),
    #[error("multiple continuous writers for `{0}`")]
    MultipleContinuousWriters(String),
    #[error("algebraic cycle: {}", .0.join(" -> "))]
    AlgebraicCycle(Vec<String>),
    #[error("root cannot be terminated")]
    TerminateRoot,
    #[error("cannot integrate `{path}`: {source}")]
    Integrate { path: String, source: ValueError },
    #[error(transparent)]
    Value(#[from] ValueError),
    /// Error raised while executing a statement of `object`.
    #[error("{object} ({pos}): {source}")]
    At { object: String, pos: Pos, source: Box<EngineError> },
    #[error("at t = {time}: {source}")]
    AtTime { time: f64, source: Box<EngineError> },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("output failed: {0}")]
    Output(String),
}

impl EngineError {
    pub(crate) fn at(self, object: String, pos: Pos) -> EngineError {
        match self {
            // keep the innermost statement context
            e @ EngineError::At { .. } => e,
            e => EngineError::At { object, pos, source: Box::new(e) },
        }
    }

    pub(crate) fn at_time(self, time: f64) -> EngineError {
        match self {
            e @ EngineError::AtTime { .. } => e,
            e => EngineError::AtTime { time, source: Box::new(e) },
        }
    }

    /// The error with statement and time context removed.
    pub fn root_cause(&self) -> &EngineError {
        match self {
            EngineError::At { source, .. } | EngineError::AtTime { source, .. } => source.root_cause(),
            e => e,
        }
    }
}

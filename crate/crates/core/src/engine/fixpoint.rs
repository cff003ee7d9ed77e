use std::collections::HashMap;

use super::eval::{eval, resolve_target};
use super::store::{instantiate, terminate, ObjectStore, Slot};
use super::{EngineError, Model};
use crate::syntax::{Case, Expr, Literal, Stmt, StmtKind};
use crate::values::{ObjectId, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixpointOutcome {
    /// Iterations run, including the final one that changed nothing.
    pub iterations: usize,
    /// Whether any iteration changed the store.
    pub changed: bool,
    /// Discrete actions that changed the store.
    pub fired: usize,
}

enum Action {
    Write { slot: Slot, value: Value, discrete: bool, owner: ObjectId },
    Create { slot: Slot, class: String, args: Vec<Value>, owner: ObjectId },
    Terminate(ObjectId),
}

/// Evaluates a guard to a boolean.
pub(crate) fn guard(store: &ObjectStore, this: ObjectId, cond: &Expr) -> Result<bool, EngineError> {
    match eval(store, this, cond)? {
        Value::Bool(b) => Ok(b),
        other => Err(EngineError::NonBooleanGuard(other.kind_name())),
    }
}

/// Index of the first case whose label equals the subject.
pub(crate) fn select_case(
    store: &ObjectStore,
    this: ObjectId,
    subject: &Expr,
    cases: &[Case],
) -> Result<Option<usize>, EngineError> {
    let value = eval(store, this, subject)?;
    Ok(cases.iter().position(|c| match (&c.label, &value) {
        (Literal::Real(a), Value::Real(b)) => a == b,
        (Literal::Str(a), Value::Str(b)) => a == b,
        (Literal::Bool(a), Value::Bool(b)) => a == b,
        _ => false,
    }))
}

fn collect(
    store: &ObjectStore,
    this: ObjectId,
    stmts: &[Stmt],
    guarded: bool,
    out: &mut Vec<Action>,
) -> Result<(), EngineError> {
    // A taken branch that acts discretely also refreshes its continuous
    // assignments, so values sampled together are held together.
    let refresh = guarded
        && stmts.iter().any(|s| {
            matches!(s.kind, StmtKind::Discrete { .. } | StmtKind::Create { .. } | StmtKind::Terminate { .. })
        });
    for stmt in stmts {
        collect_stmt(store, this, stmt, refresh, out).map_err(|e| e.at(store.describe(this), stmt.pos))?;
    }
    Ok(())
}

fn collect_stmt(
    store: &ObjectStore,
    this: ObjectId,
    stmt: &Stmt,
    refresh: bool,
    out: &mut Vec<Action>,
) -> Result<(), EngineError> {
    match &stmt.kind {
        StmtKind::Continuous { target, rhs } if refresh => {
            let slot = resolve_target(store, this, target)?;
            let value = eval(store, this, rhs)?;
            out.push(Action::Write { slot, value, discrete: false, owner: this });
        }
        StmtKind::Continuous { .. } => {}
        StmtKind::Discrete { target, rhs } => {
            let slot = resolve_target(store, this, target)?;
            let value = eval(store, this, rhs)?;
            out.push(Action::Write { slot, value, discrete: true, owner: this });
        }
        StmtKind::Create { binder, class, args } => {
            let slot = resolve_target(store, this, binder)?;
            let args = args.iter().map(|a| eval(store, this, a)).collect::<Result<_, _>>()?;
            out.push(Action::Create { slot, class: class.clone(), args, owner: this });
        }
        StmtKind::Terminate { object } => match eval(store, this, object)? {
            Value::Obj(id) => out.push(Action::Terminate(id)),
            other => return Err(EngineError::NotAnObject(other.kind_name())),
        },
        StmtKind::If { cond, then_branch, else_branch } => {
            let branch = if guard(store, this, cond)? { then_branch } else { else_branch };
            collect(store, this, branch, true, out)?;
        }
        StmtKind::Switch { subject, cases } => {
            if let Some(i) = select_case(store, this, subject, cases)? {
                collect(store, this, &cases[i].body, true, out)?;
            }
        }
    }
    Ok(())
}

/// One simultaneous discrete iteration: every enabled action reads the store
/// as it was before the iteration. Returns (changed, fired).
fn iterate(model: &Model, store: &mut ObjectStore) -> Result<(bool, usize), EngineError> {
    let mut actions = Vec::new();
    for id in store.traverse() {
        let class = model.class(&store.get(id)?.class)?;
        collect(store, id, &class.body, false, &mut actions)?;
    }

    let mut writers: HashMap<&Slot, Vec<ObjectId>> = HashMap::new();
    for action in &actions {
        if let Action::Write { slot, owner, .. } | Action::Create { slot, owner, .. } = action {
            writers.entry(slot).or_default().push(*owner);
        }
    }
    let mut conflicts: Vec<String> = writers
        .iter()
        .filter(|(_, owners)| owners.len() > 1)
        .map(|(slot, owners)| {
            let who: Vec<String> = owners.iter().map(|&o| store.describe(o)).collect();
            format!("`{}` (written by {})", store.slot_path(slot), who.join(" and "))
        })
        .collect();
    conflicts.sort();
    if !conflicts.is_empty() {
        return Err(EngineError::ConflictingDiscreteWriters(conflicts));
    }

    let mut changed = false;
    let mut fired = 0;
    let mut creates = Vec::new();
    let mut terminates = Vec::new();
    for action in actions {
        match action {
            Action::Write { slot, value, discrete, .. } => {
                if !store.read_slot(&slot)?.same_bits(&value) {
                    store.write(&slot, value)?;
                    changed = true;
                    fired += usize::from(discrete);
                }
            }
            Action::Create { slot, class, args, .. } => creates.push((slot, class, args)),
            Action::Terminate(id) => terminates.push(id),
        }
    }
    for (slot, class, args) in creates {
        let child = instantiate(model, store, &class, args, Some((slot.object, &slot.field.name)))?;
        store.write(&slot, Value::Obj(child))?;
        changed = true;
        fired += 1;
    }
    for id in terminates {
        if store.is_alive(id) {
            terminate(store, id)?;
            changed = true;
            fired += 1;
        }
    }
    Ok((changed, fired))
}

/// Repeats discrete iterations until one leaves the store unchanged.
pub fn discrete_fixpoint(
    model: &Model,
    store: &mut ObjectStore,
    max_iterations: usize,
) -> Result<FixpointOutcome, EngineError> {
    let mut outcome = FixpointOutcome::default();
    while outcome.iterations < max_iterations {
        outcome.iterations += 1;
        let (changed, fired) = iterate(model, store)?;
        outcome.fired += fired;
        if !changed {
            return Ok(outcome);
        }
        outcome.changed = true;
    }
    Err(EngineError::NonConvergent(max_iterations))
}

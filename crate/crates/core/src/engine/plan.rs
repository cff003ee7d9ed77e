use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::eval::{eval, reads, resolve_target};
use super::fixpoint::{guard, select_case};
use super::store::{Field, ObjectStore, Slot};
use super::{EngineError, Model};
use crate::syntax::{BinOp, Expr, Pos, Stmt, StmtKind};
use crate::values::{eval_binary, ObjectId, Value};

/// An active continuous assignment with its target and inputs resolved.
#[derive(Debug, Clone)]
pub struct Equation {
    pub owner: ObjectId,
    pub target: Slot,
    pub rhs: Expr,
    pub reads: Vec<Slot>,
    pub pos: Pos,
}

/// Active continuous equations in dependency order.
#[derive(Debug, Clone)]
pub struct EquationPlan {
    pub equations: Vec<Equation>,
    signature: Signature,
}

/// What a plan depends on besides the class bodies: the object graph and the
/// outcome of every guard it passed through.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Signature {
    generation: u64,
    guards: Vec<usize>,
}

impl EquationPlan {
    /// Whether the plan still describes the active equations of `store`.
    pub fn is_current(&self, model: &Model, store: &ObjectStore) -> Result<bool, EngineError> {
        if self.signature.generation != store.generation() {
            return Ok(false);
        }
        let mut sig = Signature { generation: store.generation(), guards: Vec::new() };
        active(model, store, &mut sig, None)?;
        Ok(sig == self.signature)
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }
}

fn walk(
    store: &ObjectStore,
    this: ObjectId,
    stmts: &[Stmt],
    sig: &mut Signature,
    out: &mut Option<&mut Vec<Equation>>,
) -> Result<(), EngineError> {
    for stmt in stmts {
        walk_stmt(store, this, stmt, sig, out).map_err(|e| e.at(store.describe(this), stmt.pos))?;
    }
    Ok(())
}

fn walk_stmt(
    store: &ObjectStore,
    this: ObjectId,
    stmt: &Stmt,
    sig: &mut Signature,
    out: &mut Option<&mut Vec<Equation>>,
) -> Result<(), EngineError> {
    match &stmt.kind {
        StmtKind::Continuous { target, rhs } => {
            if let Some(eqs) = out {
                let target = resolve_target(store, this, target)?;
                let mut inputs = Vec::new();
                reads(store, this, rhs, &mut inputs)?;
                eqs.push(Equation { owner: this, target, rhs: rhs.clone(), reads: inputs, pos: stmt.pos });
            }
        }
        StmtKind::If { cond, then_branch, else_branch } => {
            let taken = guard(store, this, cond)?;
            sig.guards.push(usize::from(taken));
            walk(store, this, if taken { then_branch } else { else_branch }, sig, out)?;
        }
        StmtKind::Switch { subject, cases } => {
            let i = select_case(store, this, subject, cases)?;
            sig.guards.push(i.unwrap_or(usize::MAX));
            if let Some(i) = i {
                walk(store, this, &cases[i].body, sig, out)?;
            }
        }
        StmtKind::Discrete { .. } | StmtKind::Create { .. } | StmtKind::Terminate { .. } => {}
    }
    Ok(())
}

fn active(
    model: &Model,
    store: &ObjectStore,
    sig: &mut Signature,
    mut out: Option<&mut Vec<Equation>>,
) -> Result<(), EngineError> {
    for id in store.traverse() {
        let class = model.class(&store.get(id)?.class)?;
        walk(store, id, &class.body, sig, &mut out)?;
    }
    Ok(())
}

/// Collects the continuous assignments enabled under the current guards and
/// orders them so every equation runs after the writers of its inputs. Ties
/// keep traversal order.
pub fn plan_continuous(model: &Model, store: &ObjectStore) -> Result<EquationPlan, EngineError> {
    let mut sig = Signature { generation: store.generation(), guards: Vec::new() };
    let mut eqs = Vec::new();
    active(model, store, &mut sig, Some(&mut eqs))?;

    let mut writer: HashMap<&Slot, usize> = HashMap::new();
    for (i, eq) in eqs.iter().enumerate() {
        if writer.insert(&eq.target, i).is_some() {
            return Err(EngineError::MultipleContinuousWriters(store.slot_path(&eq.target)));
        }
    }
    let n = eqs.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (j, eq) in eqs.iter().enumerate() {
        let mut deps: Vec<usize> = eq.reads.iter().filter_map(|r| writer.get(r).copied()).collect();
        deps.sort_unstable();
        deps.dedup();
        for i in deps {
            succ[i].push(j);
            indegree[j] += 1;
        }
    }

    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() < n {
        let cycle = find_cycle(&succ, &indegree);
        let mut names: Vec<String> = cycle.iter().map(|&i| store.slot_path(&eqs[i].target)).collect();
        names.push(names[0].clone());
        return Err(EngineError::AlgebraicCycle(names));
    }

    let mut slots: Vec<Option<Equation>> = eqs.into_iter().map(Some).collect();
    let equations = order.into_iter().map(|i| slots[i].take().expect("each index once")).collect();
    Ok(EquationPlan { equations, signature: sig })
}

/// A cycle among the equations Kahn's algorithm could not schedule.
fn find_cycle(succ: &[Vec<usize>], indegree: &[usize]) -> Vec<usize> {
    let stuck = |i: usize| indegree[i] > 0;
    let start = (0..succ.len()).find(|&i| stuck(i)).expect("some equation is unscheduled");
    // Every stuck node has a stuck predecessor; walk predecessors until one repeats.
    let mut pred: Vec<Option<usize>> = vec![None; succ.len()];
    for (i, next) in succ.iter().enumerate() {
        if stuck(i) {
            for &j in next {
                if stuck(j) && pred[j].is_none() {
                    pred[j] = Some(i);
                }
            }
        }
    }
    let mut seen = vec![usize::MAX; succ.len()];
    let mut path = Vec::new();
    let mut cur = start;
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        cur = pred[cur].expect("stuck equations have stuck inputs");
    }
    let mut cycle = path.split_off(seen[cur]);
    cycle.reverse();
    cycle
}

/// Evaluates the planned equations in order, writing each target.
pub fn evaluate_plan(store: &mut ObjectStore, plan: &EquationPlan) -> Result<(), EngineError> {
    for eq in &plan.equations {
        let value = eval(store, eq.owner, &eq.rhs).map_err(|e| e.at(store.describe(eq.owner), eq.pos))?;
        store.write(&eq.target, value)?;
    }
    Ok(())
}

/// One explicit Euler step over every derivative chain. All levels of a chain
/// are advanced from their values before the step.
pub fn integrate(store: &mut ObjectStore, h: f64) -> Result<(), EngineError> {
    let step = Value::Real(h);
    let mut updates = Vec::new();
    for id in store.traverse() {
        let obj = store.get(id)?;
        for (name, &order) in &obj.chains {
            for k in 0..order {
                let slot = |p| Slot { object: id, field: Field::new(name.clone(), p) };
                let x = store.read_slot(&slot(k))?;
                let dx = store.read_slot(&slot(k + 1))?;
                let next = eval_binary(BinOp::Mul, &step, dx)
                    .and_then(|d| eval_binary(BinOp::Add, x, &d))
                    .map_err(|source| EngineError::Integrate { path: store.slot_path(&slot(k)), source })?;
                updates.push((slot(k), next));
            }
        }
    }
    for (slot, value) in updates {
        store.write(&slot, value)?;
    }
    Ok(())
}

/// Evaluates the plan, then advances every chain by one Euler step of `h`.
pub fn continuous_step(store: &mut ObjectStore, plan: &EquationPlan, h: f64) -> Result<(), EngineError> {
    evaluate_plan(store, plan)?;
    integrate(store, h)
}

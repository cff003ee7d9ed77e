use super::store::{Field, ObjectStore, Slot};
use super::EngineError;
use crate::syntax::{BinOp, Expr};
use crate::values::{eval_binary, eval_call, eval_unary, ObjectId, Value};

/// Evaluates `e` in the scope of object `this`.
pub(crate) fn eval(store: &ObjectStore, this: ObjectId, e: &Expr) -> Result<Value, EngineError> {
    match e {
        Expr::Real(x) => Ok(Value::Real(*x)),
        Expr::Str(s) => Ok(Value::Str(s.clone())),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Vector(items) => {
            Ok(Value::from_elements(items.iter().map(|i| eval(store, this, i)).collect::<Result<_, _>>()?))
        }
        Expr::Var { name, primes } => Ok(store.read(this, &Field::new(name.clone(), *primes))?.clone()),
        Expr::Field { object, field, primes } => {
            let id = object_ref(store, this, object)?;
            Ok(store.read(id, &Field::new(field.clone(), *primes))?.clone())
        }
        Expr::Unary { op, operand } => Ok(eval_unary(*op, &eval(store, this, operand)?)?),
        Expr::Binary { op: op @ (BinOp::And | BinOp::Or), left, right } => {
            let l = eval(store, this, left)?;
            match (op, &l) {
                (BinOp::And, Value::Bool(false)) => Ok(l),
                (BinOp::Or, Value::Bool(true)) => Ok(l),
                _ => {
                    let r = eval(store, this, right)?;
                    Ok(eval_binary(*op, &l, &r)?)
                }
            }
        }
        Expr::Binary { op, left, right } => {
            let l = eval(store, this, left)?;
            let r = eval(store, this, right)?;
            Ok(eval_binary(*op, &l, &r)?)
        }
        Expr::Call { function, args } => {
            let vals = args.iter().map(|a| eval(store, this, a)).collect::<Result<Vec<_>, _>>()?;
            Ok(eval_call(function, &vals)?)
        }
    }
}

/// Evaluates an expression that must denote a live object.
pub(crate) fn object_ref(store: &ObjectStore, this: ObjectId, e: &Expr) -> Result<ObjectId, EngineError> {
    match eval(store, this, e)? {
        Value::Obj(id) => {
            store.get(id)?;
            Ok(id)
        }
        other => Err(EngineError::NotAnObject(other.kind_name())),
    }
}

/// Resolves an assignment target to the slot it names.
pub(crate) fn resolve_target(store: &ObjectStore, this: ObjectId, target: &Expr) -> Result<Slot, EngineError> {
    let (object, field) = match target {
        Expr::Var { name, primes } => (this, Field::new(name.clone(), *primes)),
        Expr::Field { object, field, primes } => (object_ref(store, this, object)?, Field::new(field.clone(), *primes)),
        _ => unreachable!("parser only accepts variable and field targets"),
    };
    let slot = Slot { object, field };
    store.read_slot(&slot)?;
    Ok(slot)
}

/// Slots read by `e` when evaluated in the scope of `this`.
pub(crate) fn reads(store: &ObjectStore, this: ObjectId, e: &Expr, out: &mut Vec<Slot>) -> Result<(), EngineError> {
    match e {
        Expr::Real(_) | Expr::Str(_) | Expr::Bool(_) => {}
        Expr::Vector(items) | Expr::Call { args: items, .. } => {
            for i in items {
                reads(store, this, i, out)?;
            }
        }
        Expr::Var { name, primes } => out.push(Slot { object: this, field: Field::new(name.clone(), *primes) }),
        Expr::Field { object, field, primes } => {
            reads(store, this, object, out)?;
            let id = object_ref(store, this, object)?;
            out.push(Slot { object: id, field: Field::new(field.clone(), *primes) });
        }
        Expr::Unary { operand, .. } => reads(store, this, operand, out)?,
        Expr::Binary { left, right, .. } => {
            reads(store, this, left, out)?;
            reads(store, this, right, out)?;
        }
    }
    Ok(())
}

/// Evaluates an expression that refers to no variables, such as a
/// command-line argument list.
pub fn eval_const(e: &Expr) -> Result<Value, EngineError> {
    let mut found = None;
    e.walk(&mut |sub| {
        if let Expr::Var { name, primes } = sub {
            found.get_or_insert_with(|| Field::new(name.clone(), *primes).to_string());
        }
    });
    if let Some(name) = found {
        return Err(EngineError::Undeclared { object: "a constant expression".into(), name });
    }
    eval(&ObjectStore::default(), ObjectId(0), e)
}

//! Runtime values, operator semantics and the builtin function table.

use std::fmt;

use crate::syntax::{BinOp, UnOp};

/// Identity of a live object instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Real(f64),
    Str(String),
    /// Arithmetic is defined only when every element is `Real`.
    Vec(Vec<Value>),
    /// Rows of equal length. Literal construction, equality and flattening only.
    Mat(Vec<Vec<f64>>),
    Obj(ObjectId),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ValueError {
    #[error("cannot apply `{op}` to {left} and {right}")]
    Kind { op: &'static str, left: &'static str, right: &'static str },
    #[error("cannot apply `{op}` to {operand}")]
    UnaryKind { op: &'static str, operand: &'static str },
    #[error("length mismatch in `{op}`: {left} vs {right}")]
    Length { op: &'static str, left: usize, right: usize },
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("`{name}` takes {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{name}` expects {expected}, got {found}")]
    Argument { name: &'static str, expected: &'static str, found: String },
    #[error("`{name}` argument {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },
}

impl Value {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Real(_) => "real",
            Value::Str(_) => "string",
            Value::Vec(_) => "vector",
            Value::Mat(_) => "matrix",
            Value::Obj(_) => "object reference",
        }
    }

    pub fn real_vector(items: &[f64]) -> Value {
        Value::Vec(items.iter().map(|&x| Value::Real(x)).collect())
    }

    /// Builds the value of a vector literal. A non-empty list of equal-length,
    /// non-empty real vectors becomes a matrix.
    pub fn from_elements(items: Vec<Value>) -> Value {
        let rows: Option<Vec<Vec<f64>>> = items
            .iter()
            .map(|v| match v {
                Value::Vec(row) => reals(row),
                _ => None,
            })
            .collect();
        match rows {
            Some(rows) if !rows.is_empty() && !rows[0].is_empty() && rows.iter().all(|r| r.len() == rows[0].len()) => {
                Value::Mat(rows)
            }
            _ => Value::Vec(items),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    /// Elements of a vector whose entries are all real.
    pub fn as_reals(&self) -> Option<Vec<f64>> {
        match self {
            Value::Vec(items) => reals(items),
            _ => None,
        }
    }

    /// Bitwise identity: distinguishes `0.0` from `-0.0` and treats equal NaN
    /// payloads as identical. Used for change detection.
    pub fn same_bits(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            (Value::Vec(a), Value::Vec(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_bits(y)),
            (Value::Mat(a), Value::Mat(b)) => {
                a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(x, y)| x.to_bits() == y.to_bits()))
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Vec(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Mat(rows) => {
                let rows: Vec<Value> = rows.iter().map(|r| Value::real_vector(r)).collect();
                write!(f, "{}", Value::Vec(rows))
            }
            Value::Obj(id) => write!(f, "{id}"),
        }
    }
}

fn reals(items: &[Value]) -> Option<Vec<f64>> {
    items.iter().map(Value::as_real).collect()
}

fn zip_with(op: BinOp, a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Result<Value, ValueError> {
    if a.len() != b.len() {
        return Err(ValueError::Length { op: op.symbol(), left: a.len(), right: b.len() });
    }
    Ok(Value::Vec(a.iter().zip(b).map(|(&x, &y)| Value::Real(f(x, y))).collect()))
}

fn scale(v: &[f64], f: impl Fn(f64) -> f64) -> Value {
    Value::Vec(v.iter().map(|&x| Value::Real(f(x))).collect())
}

/// Applies a binary operator. `&&` and `||` here are strict; the evaluator
/// short-circuits before calling this.
pub fn eval_binary(op: BinOp, left: &Value, right: &Value) -> Result<Value, ValueError> {
    use Value::*;
    let mismatch = || ValueError::Kind { op: op.symbol(), left: left.kind_name(), right: right.kind_name() };
    let div_zero = || ValueError::DivisionByZero(format!("{left} / {right}"));

    match op {
        BinOp::And | BinOp::Or => match (left, right) {
            (Bool(a), Bool(b)) => Ok(Bool(if op == BinOp::And { *a && *b } else { *a || *b })),
            _ => Err(mismatch()),
        },
        BinOp::Eq => match (left, right) {
            (Real(a), Real(b)) => Ok(Bool(a == b)),
            (Bool(a), Bool(b)) => Ok(Bool(a == b)),
            (Str(a), Str(b)) => Ok(Bool(a == b)),
            (Mat(a), Mat(b)) => Ok(Bool(a == b)),
            (Vec(_), Vec(_)) => match (left.as_reals(), right.as_reals()) {
                (Some(a), Some(b)) => Ok(Bool(a == b)),
                _ => Err(mismatch()),
            },
            _ => Err(mismatch()),
        },
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => match (left, right) {
            (Real(a), Real(b)) => Ok(Bool(match op {
                BinOp::Lt => a < b,
                BinOp::Le => a <= b,
                BinOp::Gt => a > b,
                _ => a >= b,
            })),
            _ => Err(mismatch()),
        },
        BinOp::Pow => match (left, right) {
            (Real(a), Real(b)) => Ok(Real(a.powf(*b))),
            _ => Err(mismatch()),
        },
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => {
            let arith = |a: f64, b: f64| match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                _ => a / b,
            };
            match (left, right) {
                (Real(a), Real(b)) => {
                    if op == BinOp::Div && *b == 0.0 {
                        return Err(div_zero());
                    }
                    Ok(Real(arith(*a, *b)))
                }
                (Vec(a), Vec(b)) if matches!(op, BinOp::Add | BinOp::Sub) => match (reals(a), reals(b)) {
                    (Some(a), Some(b)) => zip_with(op, &a, &b, arith),
                    _ => Err(mismatch()),
                },
                (Real(s), Vec(v)) if op == BinOp::Mul => reals(v).map(|v| scale(&v, |x| s * x)).ok_or_else(mismatch),
                (Vec(v), Real(s)) if matches!(op, BinOp::Mul | BinOp::Div) => {
                    let v = reals(v).ok_or_else(mismatch)?;
                    if op == BinOp::Div {
                        if *s == 0.0 {
                            return Err(div_zero());
                        }
                        Ok(scale(&v, |x| x / s))
                    } else {
                        Ok(scale(&v, |x| x * s))
                    }
                }
                _ => Err(mismatch()),
            }
        }
    }
}

pub fn eval_unary(op: UnOp, operand: &Value) -> Result<Value, ValueError> {
    let err = || ValueError::UnaryKind { op: op.symbol(), operand: operand.kind_name() };
    match (op, operand) {
        (UnOp::Neg, Value::Real(x)) => Ok(Value::Real(-x)),
        (UnOp::Neg, Value::Vec(v)) => reals(v).map(|v| scale(&v, |x| -x)).ok_or_else(err),
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        _ => Err(err()),
    }
}

/// Tolerance beyond ±1 within which `asin` clamps instead of failing.
pub const ASIN_CLAMP: f64 = 1e-9;

const BUILTINS: [(&str, usize); 8] =
    [("sin", 1), ("cos", 1), ("asin", 1), ("sqrt", 1), ("abs", 1), ("floor", 1), ("dot", 2), ("norm", 1)];

/// Arity of a builtin, or `None` if `name` is not one.
pub fn builtin_arity(name: &str) -> Option<usize> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn eval_call(name: &str, args: &[Value]) -> Result<Value, ValueError> {
    let arity = builtin_arity(name).ok_or_else(|| ValueError::UnknownBuiltin(name.to_string()))?;
    if args.len() != arity {
        return Err(ValueError::Arity { name: name.to_string(), expected: arity, found: args.len() });
    }
    let (name, _) = *BUILTINS.iter().find(|(n, _)| *n == name).unwrap();

    let real = |v: &Value| {
        v.as_real().ok_or_else(|| ValueError::Argument { name, expected: "a real", found: v.kind_name().to_string() })
    };
    let vector = |v: &Value| {
        v.as_reals().ok_or_else(|| ValueError::Argument {
            name,
            expected: "a real vector",
            found: v.kind_name().to_string(),
        })
    };

    let x = match name {
        "sin" => real(&args[0])?.sin(),
        "cos" => real(&args[0])?.cos(),
        "sqrt" => real(&args[0])?.sqrt(),
        "abs" => real(&args[0])?.abs(),
        "floor" => real(&args[0])?.floor(),
        "asin" => {
            let x = real(&args[0])?;
            if x.abs() <= 1.0 {
                x.asin()
            } else if x.abs() <= 1.0 + ASIN_CLAMP {
                x.signum() * std::f64::consts::FRAC_PI_2
            } else {
                return Err(ValueError::Domain { name, value: x });
            }
        }
        "dot" => {
            let (a, b) = (vector(&args[0])?, vector(&args[1])?);
            if a.len() != b.len() {
                return Err(ValueError::Length { op: "dot", left: a.len(), right: b.len() });
            }
            dot(&a, &b)
        }
        "norm" => {
            let a = vector(&args[0])?;
            dot(&a, &a).sqrt()
        }
        _ => unreachable!("builtin table and dispatch disagree on `{name}`"),
    };
    Ok(Value::Real(x))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A leaf of a flattened value.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Real(f64),
    Str(String),
    Bool(bool),
}

/// Scalarizes a value into `(path, leaf)` pairs, indexing vectors as `path[i]`.
pub fn flatten(value: &Value, prefix: &str) -> Vec<(String, Scalar)> {
    let mut out = Vec::new();
    flatten_into(value, prefix, &mut out);
    out
}

pub(crate) fn flatten_into(value: &Value, prefix: &str, out: &mut Vec<(String, Scalar)>) {
    match value {
        Value::Real(x) => out.push((prefix.to_string(), Scalar::Real(*x))),
        Value::Bool(b) => out.push((prefix.to_string(), Scalar::Bool(*b))),
        Value::Str(s) => out.push((prefix.to_string(), Scalar::Str(s.clone()))),
        Value::Obj(id) => out.push((prefix.to_string(), Scalar::Str(id.to_string()))),
        Value::Vec(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(v, &format!("{prefix}[{i}]"), out);
            }
        }
        Value::Mat(rows) => {
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out.push((format!("{prefix}[{i}][{j}]"), Scalar::Real(*x)));
                }
            }
        }
    }
}

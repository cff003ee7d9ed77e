//! Abstract syntax for model files.
//!
//! Equality on statements, private declarations and classes is structural:
//! source positions are carried for diagnostics but never compared.

use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl Pos {
    pub fn new(line: u32, column: u32) -> Self {
        Pos { line, column }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
            BinOp::Pow => 7,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
        }
    }
}

/// Precedence of prefix operators: between `*` and `^`.
pub const UNARY_PRECEDENCE: u8 = 6;
/// Precedence of atoms, calls and postfix forms.
pub const ATOM_PRECEDENCE: u8 = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Real(f64),
    Str(String),
    Bool(bool),
    Vector(Vec<Expr>),
    /// `x`, `x'`, `x''`, ...
    Var {
        name: String,
        primes: u32,
    },
    /// `obj.field` with optional trailing primes on the field.
    Field {
        object: Box<Expr>,
        field: String,
        primes: u32,
    },
    Unary {
        op: UnOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
    },
    Call {
        function: String,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>, primes: u32) -> Expr {
        Expr::Var { name: name.into(), primes }
    }

    pub fn field(object: Expr, field: impl Into<String>, primes: u32) -> Expr {
        Expr::Field { object: Box::new(object), field: field.into(), primes }
    }

    pub fn unary(op: UnOp, operand: Expr) -> Expr {
        Expr::Unary { op, operand: Box::new(operand) }
    }

    pub fn binary(op: BinOp, left: Expr, right: Expr) -> Expr {
        Expr::Binary { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn call(function: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call { function: function.into(), args }
    }

    pub fn precedence(&self) -> u8 {
        match self {
            Expr::Unary { .. } => UNARY_PRECEDENCE,
            Expr::Binary { op, .. } => op.precedence(),
            _ => ATOM_PRECEDENCE,
        }
    }

    /// True for the forms allowed on the left of an assignment.
    pub fn is_target(&self) -> bool {
        match self {
            Expr::Var { .. } => true,
            Expr::Field { object, .. } => object.is_target(),
            _ => false,
        }
    }

    /// Calls `f` on this expression and every subexpression, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Vector(items) | Expr::Call { args: items, .. } => items.iter().for_each(|e| e.walk(f)),
            Expr::Field { object, .. } => object.walk(f),
            Expr::Unary { operand, .. } => operand.walk(f),
            Expr::Binary { left, right, .. } => {
                left.walk(f);
                right.walk(f);
            }
            Expr::Real(_) | Expr::Str(_) | Expr::Bool(_) | Expr::Var { .. } => {}
        }
    }
}

/// Label of a `case` arm.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Real(f64),
    Str(String),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub label: Literal,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Stmt {
    pub fn new(kind: StmtKind, pos: Pos) -> Self {
        Stmt { kind, pos }
    }

    /// Statements closed by their own `end` need no `;` before the next one.
    pub fn is_block(&self) -> bool {
        matches!(self.kind, StmtKind::If { .. } | StmtKind::Switch { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `target [=] rhs`
    Continuous {
        target: Expr,
        rhs: Expr,
    },
    /// `target = rhs`
    Discrete {
        target: Expr,
        rhs: Expr,
    },
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    Switch {
        subject: Expr,
        cases: Vec<Case>,
    },
    /// `binder = create class (args)`
    Create {
        binder: Expr,
        class: String,
        args: Vec<Expr>,
    },
    Terminate {
        object: Expr,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Expr(Expr),
    Create { class: String, args: Vec<Expr> },
}

/// One entry of a `private ... end` section.
#[derive(Debug, Clone)]
pub struct Private {
    pub name: String,
    pub primes: u32,
    pub init: Init,
    pub pos: Pos,
}

impl PartialEq for Private {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.primes == other.primes && self.init == other.init
    }
}

#[derive(Debug, Clone)]
pub struct ClassDef {
    pub name: String,
    pub params: Vec<String>,
    pub privates: Vec<Private>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

impl PartialEq for ClassDef {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.privates == other.privates
            && self.body == other.body
    }
}

impl ClassDef {
    /// Highest declared prime order of each private variable, in declaration order.
    pub fn declared_orders(&self) -> Vec<(&str, u32)> {
        let mut orders: Vec<(&str, u32)> = Vec::new();
        for p in &self.privates {
            match orders.iter_mut().find(|(n, _)| *n == p.name) {
                Some((_, o)) => *o = (*o).max(p.primes),
                None => orders.push((&p.name, p.primes)),
            }
        }
        orders
    }

    /// Whether `name` with `primes` is a parameter or private of this class.
    pub fn declares(&self, name: &str, primes: u32) -> bool {
        (primes == 0 && self.params.iter().any(|p| p == name))
            || self.privates.iter().any(|p| p.name == name && p.primes == primes)
    }
}

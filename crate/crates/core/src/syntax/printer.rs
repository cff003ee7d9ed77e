use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

/// Renders classes in concrete syntax. The output re-parses to an equal AST.
pub fn pretty_print(model: &[ClassDef]) -> String {
    let mut out = String::new();
    for (i, class) in model.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_class(&mut out, class);
    }
    out
}

fn print_class(out: &mut String, class: &ClassDef) {
    let _ = writeln!(out, "class {} ({})", class.name, class.params.join(", "));
    if !class.privates.is_empty() {
        let _ = writeln!(out, "{INDENT}private");
        let last = class.privates.len() - 1;
        for (i, p) in class.privates.iter().enumerate() {
            let init = match &p.init {
                Init::Expr(e) => expr_to_string(e),
                Init::Create { class, args } => create_to_string(class, args),
            };
            let sep = if i == last { "" } else { ";" };
            let _ = writeln!(out, "{INDENT}{INDENT}{}{} = {init}{sep}", p.name, primes(p.primes));
        }
        let _ = writeln!(out, "{INDENT}end");
    }
    print_stmts(out, &class.body, 1);
    out.push_str("end\n");
}

fn print_stmts(out: &mut String, stmts: &[Stmt], depth: usize) {
    let pad = INDENT.repeat(depth);
    let last = stmts.len().saturating_sub(1);
    for (i, stmt) in stmts.iter().enumerate() {
        let sep = if i == last { "" } else { ";" };
        match &stmt.kind {
            StmtKind::Continuous { target, rhs } => {
                let _ = writeln!(out, "{pad}{} [=] {}{sep}", expr_to_string(target), expr_to_string(rhs));
            }
            StmtKind::Discrete { target, rhs } => {
                let _ = writeln!(out, "{pad}{} = {}{sep}", expr_to_string(target), expr_to_string(rhs));
            }
            StmtKind::Create { binder, class, args } => {
                let _ = writeln!(out, "{pad}{} = {}{sep}", expr_to_string(binder), create_to_string(class, args));
            }
            StmtKind::Terminate { object } => {
                let _ = writeln!(out, "{pad}terminate {}{sep}", expr_to_string(object));
            }
            StmtKind::If { cond, then_branch, else_branch } => {
                let _ = writeln!(out, "{pad}if ({})", expr_to_string(cond));
                print_stmts(out, then_branch, depth + 1);
                if !else_branch.is_empty() {
                    let _ = writeln!(out, "{pad}else");
                    print_stmts(out, else_branch, depth + 1);
                }
                let _ = writeln!(out, "{pad}end{sep}");
            }
            StmtKind::Switch { subject, cases } => {
                let _ = writeln!(out, "{pad}switch ({})", expr_to_string(subject));
                for case in cases {
                    let _ = writeln!(out, "{pad}case {}", literal_to_string(&case.label));
                    print_stmts(out, &case.body, depth + 1);
                }
                let _ = writeln!(out, "{pad}end{sep}");
            }
        }
    }
}

fn create_to_string(class: &str, args: &[Expr]) -> String {
    format!("create {class} ({})", join(args))
}

fn primes(n: u32) -> String {
    "'".repeat(n as usize)
}

fn join(items: &[Expr]) -> String {
    items.iter().map(expr_to_string).collect::<Vec<_>>().join(", ")
}

fn real_to_string(v: f64) -> String {
    // `Display` for f64 is the shortest string that reads back to the same value.
    format!("{v}")
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn literal_to_string(lit: &Literal) -> String {
    match lit {
        Literal::Real(v) => real_to_string(*v),
        Literal::Str(s) => quote(s),
        Literal::Bool(b) => b.to_string(),
    }
}

/// Renders one expression with the minimum parentheses the grammar needs.
pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

/// Renders one expression with every compound subexpression parenthesized.
pub fn expr_to_string_parenthesized(e: &Expr) -> String {
    match e {
        Expr::Unary { op, operand } => {
            format!("({}{})", op.symbol(), expr_to_string_parenthesized(operand))
        }
        Expr::Binary { op, left, right } => {
            format!("({} {} {})", expr_to_string_parenthesized(left), op.symbol(), expr_to_string_parenthesized(right))
        }
        Expr::Vector(items) => {
            format!("[{}]", items.iter().map(expr_to_string_parenthesized).collect::<Vec<_>>().join(", "))
        }
        Expr::Call { function, args } => {
            format!("{function}({})", args.iter().map(expr_to_string_parenthesized).collect::<Vec<_>>().join(", "))
        }
        Expr::Field { object, field, primes: n } => {
            format!("({}).{field}{}", expr_to_string_parenthesized(object), primes(*n))
        }
        _ => expr_to_string(e),
    }
}

fn write_wrapped(out: &mut String, e: &Expr, wrap: bool) {
    if wrap {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Real(v) => out.push_str(&real_to_string(*v)),
        Expr::Str(s) => out.push_str(&quote(s)),
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Vector(items) => {
            out.push('[');
            out.push_str(&join(items));
            out.push(']');
        }
        Expr::Var { name, primes: n } => {
            out.push_str(name);
            out.push_str(&primes(*n));
        }
        Expr::Field { object, field, primes: n } => {
            write_wrapped(out, object, object.precedence() < ATOM_PRECEDENCE);
            out.push('.');
            out.push_str(field);
            out.push_str(&primes(*n));
        }
        Expr::Call { function, args } => {
            out.push_str(function);
            out.push('(');
            out.push_str(&join(args));
            out.push(')');
        }
        Expr::Unary { op, operand } => {
            out.push_str(op.symbol());
            write_wrapped(out, operand, operand.precedence() < UNARY_PRECEDENCE);
        }
        Expr::Binary { op, left, right } => {
            let prec = op.precedence();
            let (wrap_left, wrap_right) = match op {
                // base is a postfix expression; exponent is a prefix expression
                BinOp::Pow => (left.precedence() < ATOM_PRECEDENCE, right.precedence() < UNARY_PRECEDENCE),
                _ if op.is_comparison() => (left.precedence() <= prec, right.precedence() <= prec),
                _ => (left.precedence() < prec, right.precedence() <= prec),
            };
            write_wrapped(out, left, wrap_left);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_wrapped(out, right, wrap_right);
        }
    }
}

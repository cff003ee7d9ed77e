//! Static checks run before simulation: class and create-site arities,
//! declared-name resolution and duplicate declarations.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::syntax::{ClassDef, Expr, Init, Pos, Stmt, StmtKind};
use crate::values::builtin_arity;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

fn name(n: &str, primes: u32) -> String {
    format!("{n}{}", "'".repeat(primes as usize))
}

struct Checker<'a> {
    classes: HashMap<&'a str, &'a ClassDef>,
    out: Vec<Diagnostic>,
}

/// Scope of one class: declared names and the class each create-bound
/// private holds.
struct Scope<'a> {
    class: &'a ClassDef,
    declared: HashSet<(&'a str, u32)>,
    bound: HashMap<&'a str, &'a str>,
}

impl<'a> Checker<'a> {
    fn report(&mut self, pos: Pos, message: String) {
        self.out.push(Diagnostic { pos, message });
    }

    fn scope(&self, class: &'a ClassDef, upto: Option<usize>) -> Scope<'a> {
        let mut declared: HashSet<(&str, u32)> = class.params.iter().map(|p| (p.as_str(), 0)).collect();
        let mut bound = HashMap::new();
        for p in class.privates.iter().take(upto.unwrap_or(usize::MAX)) {
            declared.insert((p.name.as_str(), p.primes));
            if let Init::Create { class: c, .. } = &p.init {
                if p.primes == 0 {
                    bound.insert(p.name.as_str(), c.as_str());
                }
            }
        }
        Scope { class, declared, bound }
    }

    fn check_class(&mut self, class: &'a ClassDef) {
        let mut seen: HashSet<(&str, u32)> = HashSet::new();
        for p in &class.params {
            if !seen.insert((p, 0)) {
                self.report(class.pos, format!("parameter `{p}` of class `{}` is declared more than once", class.name));
            }
        }
        for p in &class.privates {
            if !seen.insert((&p.name, p.primes)) {
                let what =
                    if p.primes == 0 && class.params.contains(&p.name) { "a parameter" } else { "already declared" };
                self.report(p.pos, format!("`{}` in class `{}` is {what}", name(&p.name, p.primes), class.name));
            }
        }
        for (n, order) in class.declared_orders() {
            for k in 0..order {
                if !seen.contains(&(n, k)) {
                    let pos =
                        class.privates.iter().find(|p| p.name == n && p.primes == order).map_or(class.pos, |p| p.pos);
                    self.report(
                        pos,
                        format!(
                            "`{}` is declared without `{}`; derivative chains must be complete",
                            name(n, order),
                            name(n, k)
                        ),
                    );
                }
            }
        }

        for (i, p) in class.privates.iter().enumerate() {
            let scope = self.scope(class, Some(i));
            match &p.init {
                Init::Expr(e) => self.expr(&scope, e, p.pos),
                Init::Create { class: c, args } => {
                    self.create_site(c, args.len(), p.pos);
                    for a in args {
                        self.expr(&scope, a, p.pos);
                    }
                }
            }
        }
        let scope = self.scope(class, None);
        self.stmts(&scope, &class.body);
    }

    fn create_site(&mut self, class: &str, found: usize, pos: Pos) {
        match self.classes.get(class) {
            None => self.report(pos, format!("unknown class `{class}`")),
            Some(def) if def.params.len() != found => {
                self.report(pos, format!("class `{class}` takes {} argument(s), got {found}", def.params.len()))
            }
            Some(_) => {}
        }
    }

    fn stmts(&mut self, scope: &Scope<'a>, stmts: &'a [Stmt]) {
        for s in stmts {
            match &s.kind {
                StmtKind::Continuous { target, rhs } | StmtKind::Discrete { target, rhs } => {
                    self.expr(scope, target, s.pos);
                    self.expr(scope, rhs, s.pos);
                }
                StmtKind::Create { binder, class, args } => {
                    self.expr(scope, binder, s.pos);
                    self.create_site(class, args.len(), s.pos);
                    for a in args {
                        self.expr(scope, a, s.pos);
                    }
                }
                StmtKind::Terminate { object } => self.expr(scope, object, s.pos),
                StmtKind::If { cond, then_branch, else_branch } => {
                    self.expr(scope, cond, s.pos);
                    self.stmts(scope, then_branch);
                    self.stmts(scope, else_branch);
                }
                StmtKind::Switch { subject, cases } => {
                    self.expr(scope, subject, s.pos);
                    for c in cases {
                        self.stmts(scope, &c.body);
                    }
                }
            }
        }
    }

    fn expr(&mut self, scope: &Scope<'a>, e: &Expr, pos: Pos) {
        match e {
            Expr::Var { name: n, primes } => {
                if !scope.declared.contains(&(n.as_str(), *primes)) {
                    self.report(pos, format!("unresolved name `{}` in class `{}`", name(n, *primes), scope.class.name));
                }
            }
            Expr::Field { object, field, primes } => {
                self.expr(scope, object, pos);
                if let Some(target) = self.static_class(scope, object) {
                    if !target.declares(field, *primes) {
                        self.report(pos, format!("class `{}` has no field `{}`", target.name, name(field, *primes)));
                    }
                }
            }
            Expr::Call { function, args } => {
                match builtin_arity(function) {
                    Some(n) if n != args.len() => {
                        self.report(pos, format!("`{function}` takes {n} argument(s), got {}", args.len()))
                    }
                    None => self.report(pos, format!("unknown function `{function}`")),
                    _ => {}
                }
                for a in args {
                    self.expr(scope, a, pos);
                }
            }
            Expr::Vector(items) => {
                for i in items {
                    self.expr(scope, i, pos);
                }
            }
            Expr::Unary { operand, .. } => self.expr(scope, operand, pos),
            Expr::Binary { left, right, .. } => {
                self.expr(scope, left, pos);
                self.expr(scope, right, pos);
            }
            Expr::Real(_) | Expr::Str(_) | Expr::Bool(_) => {}
        }
    }

    /// The class an object expression refers to, when it is a chain of
    /// create-bound privates.
    fn static_class(&self, scope: &Scope<'a>, e: &Expr) -> Option<&'a ClassDef> {
        match e {
            Expr::Var { name: n, primes: 0 } => scope.bound.get(n.as_str()).and_then(|c| self.classes.get(c).copied()),
            Expr::Field { object, field, primes: 0 } => {
                let owner = self.static_class(scope, object)?;
                let inner = self.scope(owner, None);
                inner.bound.get(field.as_str()).and_then(|c| self.classes.get(c).copied())
            }
            _ => None,
        }
    }
}

/// Diagnostics for a whole model, in source order.
pub fn check_model(classes: &[ClassDef]) -> Vec<Diagnostic> {
    let mut checker = Checker { classes: HashMap::new(), out: Vec::new() };
    for c in classes {
        if checker.classes.insert(&c.name, c).is_some() {
            checker.report(c.pos, format!("class `{}` is defined more than once", c.name));
        }
    }
    for c in classes {
        checker.check_class(c);
    }
    let mut out = checker.out;
    out.sort_by_key(|d| (d.pos.line, d.pos.column));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn diags(src: &str) -> Vec<String> {
        check_model(&parse(src).unwrap()).into_iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn clean_model() {
        let src = "class sphere (m,D) private p = [0,0,0] end p [=] D end\n\
                   class main () private s = create sphere (1, [0,0,0]) end s.p [=] [1,2,3] end";
        assert!(diags(src).is_empty(), "{:?}", diags(src));
    }

    #[test]
    fn create_arity() {
        let src = "class sphere (m,D) end\nclass main () private s = create sphere (5) end end";
        let d = diags(src);
        assert_eq!(d.len(), 1);
        assert!(d[0].starts_with("2:") && d[0].contains("takes 2 argument(s), got 1"), "{d:?}");
    }

    #[test]
    fn unresolved_derivative() {
        let d = diags("class c ()\n x' [=] 1\nend");
        assert_eq!(d, ["2:2: unresolved name `x'` in class `c`"]);
    }

    #[test]
    fn duplicates_and_chains() {
        let d = diags("class c (a) private a = 1; x = 0; x = 1; y'' = 0 end end");
        assert_eq!(d.len(), 4, "{d:?}");
        assert!(d.iter().any(|m| m.contains("`a` in class `c` is a parameter")));
        assert!(d.iter().any(|m| m.contains("`x` in class `c` is already declared")));
        assert!(d.iter().filter(|m| m.contains("derivative chains")).count() == 2);
    }

    #[test]
    fn initializers_see_earlier_privates_only() {
        let d = diags("class c () private a = b; b = 1 end end");
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("unresolved name `b`"));
    }

    #[test]
    fn fields_of_created_objects() {
        let src = "class m () private p = 0 end end\n\
                   class r () private a = create m () end a.q [=] a.p end";
        let d = diags(src);
        assert_eq!(d, ["2:40: class `m` has no field `q`"]);
    }

    #[test]
    fn unknown_class_and_duplicate_class() {
        let d = diags("class a () private x = create b () end end\nclass a () end");
        assert_eq!(d.len(), 2, "{d:?}");
    }
}

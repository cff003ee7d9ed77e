//! Recursive descent parser over the token stream produced by [`lex`](super::lex).
//!
//! Expression precedence, loosest to tightest:
//! `||`, `&&`, comparisons (non-associative), `+ -`, `* /`, prefix `- !`,
//! `^` (right-associative), then postfix `.field` and primes.

use super::ast::*;
use super::lexer::{Keyword, Symbol, Token, TokenKind};
use super::SyntaxError;
use crate::values::builtin_arity;

/// Parses a whole model file.
pub fn parse_model(tokens: &[Token]) -> Result<Vec<ClassDef>, SyntaxError> {
    let mut p = Parser::new(tokens);
    let mut classes = Vec::new();
    while !p.at_eof() {
        classes.push(p.class_def()?);
    }
    Ok(classes)
}

/// Parses exactly one expression.
pub fn parse_expr(tokens: &[Token]) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a comma-separated, possibly empty, list of expressions.
pub fn parse_expr_list(tokens: &[Token]) -> Result<Vec<Expr>, SyntaxError> {
    let mut p = Parser::new(tokens);
    let mut out = Vec::new();
    if !p.at_eof() {
        out.push(p.expr()?);
        while p.eat_symbol(Symbol::Comma) {
            out.push(p.expr()?);
        }
    }
    p.expect_eof()?;
    Ok(out)
}

struct Parser<'t> {
    tokens: &'t [Token],
    idx: usize,
    eof: Pos,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        let eof = tokens.last().map(Token::end_pos).unwrap_or(Pos::new(1, 1));
        Parser { tokens, idx: 0, eof }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.idx)
    }

    fn at_eof(&self) -> bool {
        self.idx >= self.tokens.len()
    }

    fn pos(&self) -> Pos {
        self.peek().map(Token::pos).unwrap_or(self.eof)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.idx);
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of input".to_string()),
        }
    }

    fn at_symbol(&self, sym: Symbol) -> bool {
        self.peek().is_some_and(|t| t.is_symbol(sym))
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn eat_symbol(&mut self, sym: Symbol) -> bool {
        let hit = self.at_symbol(sym);
        if hit {
            self.idx += 1;
        }
        hit
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.idx += 1;
        }
        hit
    }

    fn expect_symbol(&mut self, sym: Symbol) -> Result<(), SyntaxError> {
        if self.eat_symbol(sym) {
            Ok(())
        } else {
            Err(self.error(&[sym.as_str()]))
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<(), SyntaxError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(&[kw.as_str()]))
        }
    }

    fn expect_ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.idx += 1;
                Ok(t.text.clone())
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn primes(&mut self) -> u32 {
        let mut n = 0;
        while self.eat_symbol(Symbol::Prime) {
            n += 1;
        }
        n
    }

    // ---- declarations -------------------------------------------------

    fn class_def(&mut self) -> Result<ClassDef, SyntaxError> {
        let pos = self.pos();
        self.expect_keyword(Keyword::Class)?;
        let name = self.expect_ident()?;
        self.expect_symbol(Symbol::LParen)?;
        let mut params = Vec::new();
        if !self.eat_symbol(Symbol::RParen) {
            loop {
                params.push(self.expect_ident()?);
                if self.eat_symbol(Symbol::RParen) {
                    break;
                }
                if !self.eat_symbol(Symbol::Comma) {
                    return Err(self.error(&[",", ")"]));
                }
            }
        }

        let mut privates = Vec::new();
        if self.eat_keyword(Keyword::Private) {
            while self.eat_symbol(Symbol::Semi) {}
            while !self.eat_keyword(Keyword::End) {
                privates.push(self.private()?);
                if self.eat_symbol(Symbol::Semi) {
                    while self.eat_symbol(Symbol::Semi) {}
                } else if !self.at_keyword(Keyword::End) {
                    return Err(self.error(&[";", "end"]));
                }
            }
        }

        let body = self.stmt_list(&[Keyword::End])?;
        self.expect_keyword(Keyword::End)?;
        Ok(ClassDef { name, params, privates, body, pos })
    }

    fn private(&mut self) -> Result<Private, SyntaxError> {
        let pos = self.pos();
        let name = self.expect_ident()?;
        let primes = self.primes();
        self.expect_symbol(Symbol::Assign)?;
        let init = if self.eat_keyword(Keyword::Create) {
            let (class, args) = self.create_tail()?;
            Init::Create { class, args }
        } else {
            Init::Expr(self.expr()?)
        };
        Ok(Private { name, primes, init, pos })
    }

    /// `class (args)` after the `create` keyword.
    fn create_tail(&mut self) -> Result<(String, Vec<Expr>), SyntaxError> {
        let class = self.expect_ident()?;
        self.expect_symbol(Symbol::LParen)?;
        let args = self.args_after_lparen()?;
        Ok((class, args))
    }

    // ---- statements ---------------------------------------------------

    /// Statements up to (not including) one of `terminators`. A `;` separates
    /// statements; it may be omitted after a block statement and before the
    /// terminator.
    fn stmt_list(&mut self, terminators: &[Keyword]) -> Result<Vec<Stmt>, SyntaxError> {
        let at_term = |p: &Self| terminators.iter().any(|k| p.at_keyword(*k));
        let mut out = Vec::new();
        while self.eat_symbol(Symbol::Semi) {}
        while !at_term(self) {
            let stmt = self.stmt()?;
            let block = stmt.is_block();
            out.push(stmt);
            if self.eat_symbol(Symbol::Semi) {
                while self.eat_symbol(Symbol::Semi) {}
            } else if !block && !at_term(self) {
                let mut expected = vec![";"];
                expected.extend(terminators.iter().map(|k| k.as_str()));
                return Err(self.error(&expected));
            }
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let kind = if self.eat_keyword(Keyword::If) {
            let cond = self.expr()?;
            let then_branch = self.stmt_list(&[Keyword::Else, Keyword::End])?;
            let else_branch =
                if self.eat_keyword(Keyword::Else) { self.stmt_list(&[Keyword::End])? } else { Vec::new() };
            self.expect_keyword(Keyword::End)?;
            StmtKind::If { cond, then_branch, else_branch }
        } else if self.eat_keyword(Keyword::Switch) {
            let subject = self.expr()?;
            let mut cases = Vec::new();
            while self.eat_keyword(Keyword::Case) {
                let label = self.literal()?;
                let body = self.stmt_list(&[Keyword::Case, Keyword::End])?;
                cases.push(Case { label, body });
            }
            if !self.eat_keyword(Keyword::End) {
                return Err(self.error(&["case", "end"]));
            }
            StmtKind::Switch { subject, cases }
        } else if self.eat_keyword(Keyword::Terminate) {
            StmtKind::Terminate { object: self.expr()? }
        } else if self.peek().is_some_and(|t| t.kind == TokenKind::Ident) {
            let target = self.target()?;
            if self.eat_symbol(Symbol::ContAssign) {
                StmtKind::Continuous { target, rhs: self.expr()? }
            } else if self.eat_symbol(Symbol::Assign) {
                if self.eat_keyword(Keyword::Create) {
                    let (class, args) = self.create_tail()?;
                    StmtKind::Create { binder: target, class, args }
                } else {
                    StmtKind::Discrete { target, rhs: self.expr()? }
                }
            } else {
                return Err(self.error(&["[=]", "="]));
            }
        } else {
            return Err(self.error(&["identifier", "if", "switch", "terminate"]));
        };
        Ok(Stmt::new(kind, pos))
    }

    /// `x'..` or `a.b.c'..`
    fn target(&mut self) -> Result<Expr, SyntaxError> {
        let name = self.expect_ident()?;
        let mut e = Expr::Var { name, primes: self.primes() };
        while self.eat_symbol(Symbol::Dot) {
            let field = self.expect_ident()?;
            e = Expr::field(e, field, self.primes());
        }
        Ok(e)
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let neg = self.eat_symbol(Symbol::Minus);
        let tok = self.peek();
        let lit = match tok.map(|t| (&t.kind, t.text.as_str())) {
            Some((TokenKind::Real(v), _)) => Literal::Real(if neg { -v } else { *v }),
            Some((TokenKind::Str(s), _)) if !neg => Literal::Str(s.clone()),
            Some((TokenKind::Ident, text)) if !neg => match bool_literal(text) {
                Some(b) => Literal::Bool(b),
                None => return Err(self.error(&["literal"])),
            },
            _ => return Err(self.error(&["literal"])),
        };
        self.idx += 1;
        Ok(lit)
    }

    // ---- expressions --------------------------------------------------

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.and_expr()?;
        while self.eat_symbol(Symbol::OrOr) {
            e = Expr::binary(BinOp::Or, e, self.and_expr()?);
        }
        Ok(e)
    }

    fn and_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.cmp_expr()?;
        while self.eat_symbol(Symbol::AndAnd) {
            e = Expr::binary(BinOp::And, e, self.cmp_expr()?);
        }
        Ok(e)
    }

    fn cmp_expr(&mut self) -> Result<Expr, SyntaxError> {
        let e = self.add_expr()?;
        let op = match self.peek().map(|t| &t.kind) {
            Some(TokenKind::Symbol(Symbol::Lt)) => BinOp::Lt,
            Some(TokenKind::Symbol(Symbol::Le)) => BinOp::Le,
            Some(TokenKind::Symbol(Symbol::Gt)) => BinOp::Gt,
            Some(TokenKind::Symbol(Symbol::Ge)) => BinOp::Ge,
            Some(TokenKind::Symbol(Symbol::EqEq)) => BinOp::Eq,
            _ => return Ok(e),
        };
        self.idx += 1;
        Ok(Expr::binary(op, e, self.add_expr()?))
    }

    fn add_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.mul_expr()?;
        loop {
            let op = if self.eat_symbol(Symbol::Plus) {
                BinOp::Add
            } else if self.eat_symbol(Symbol::Minus) {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            e = Expr::binary(op, e, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.unary_expr()?;
        loop {
            let op = if self.eat_symbol(Symbol::Star) {
                BinOp::Mul
            } else if self.eat_symbol(Symbol::Slash) {
                BinOp::Div
            } else {
                return Ok(e);
            };
            e = Expr::binary(op, e, self.unary_expr()?);
        }
    }

    fn unary_expr(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat_symbol(Symbol::Minus) {
            Ok(Expr::unary(UnOp::Neg, self.unary_expr()?))
        } else if self.eat_symbol(Symbol::Bang) {
            Ok(Expr::unary(UnOp::Not, self.unary_expr()?))
        } else {
            self.power_expr()
        }
    }

    fn power_expr(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.postfix_expr()?;
        if self.eat_symbol(Symbol::Caret) {
            Ok(Expr::binary(BinOp::Pow, base, self.unary_expr()?))
        } else {
            Ok(base)
        }
    }

    fn postfix_expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.primary()?;
        loop {
            if self.at_symbol(Symbol::Prime) {
                let pos = self.pos();
                let n = self.primes();
                match &mut e {
                    Expr::Var { primes, .. } | Expr::Field { primes, .. } => *primes += n,
                    _ => {
                        return Err(SyntaxError::Invalid {
                            pos,
                            message: "derivative mark must follow a variable or field".into(),
                        })
                    }
                }
            } else if self.eat_symbol(Symbol::Dot) {
                let field = self.expect_ident()?;
                e = Expr::field(e, field, 0);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let Some(tok) = self.peek() else {
            return Err(self.error(&["expression"]));
        };
        match &tok.kind {
            TokenKind::Real(v) => {
                self.bump();
                Ok(Expr::Real(*v))
            }
            TokenKind::Str(s) => {
                self.bump();
                Ok(Expr::Str(s.clone()))
            }
            TokenKind::Ident => {
                self.bump();
                if let Some(b) = bool_literal(&tok.text) {
                    return Ok(Expr::Bool(b));
                }
                if self.eat_symbol(Symbol::LParen) {
                    if builtin_arity(&tok.text).is_none() {
                        return Err(SyntaxError::Invalid {
                            pos: tok.pos(),
                            message: format!("unknown function `{}`", tok.text),
                        });
                    }
                    let args = self.args_after_lparen()?;
                    Ok(Expr::call(tok.text.clone(), args))
                } else {
                    Ok(Expr::var(tok.text.clone(), 0))
                }
            }
            TokenKind::Symbol(Symbol::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect_symbol(Symbol::RParen)?;
                Ok(e)
            }
            TokenKind::Symbol(Symbol::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat_symbol(Symbol::RBracket) {
                    loop {
                        items.push(self.expr()?);
                        if self.eat_symbol(Symbol::RBracket) {
                            break;
                        }
                        if !self.eat_symbol(Symbol::Comma) {
                            return Err(self.error(&[",", "]"]));
                        }
                    }
                }
                Ok(Expr::Vector(items))
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn args_after_lparen(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        let mut args = Vec::new();
        if self.eat_symbol(Symbol::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_symbol(Symbol::RParen) {
                return Ok(args);
            }
            if !self.eat_symbol(Symbol::Comma) {
                return Err(self.error(&[",", ")"]));
            }
        }
    }
}

fn bool_literal(text: &str) -> Option<bool> {
    match text {
        "true" | "True" => Some(true),
        "false" | "False" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{lex, parse, parse_expression};

    fn var(n: &str) -> Expr {
        Expr::var(n, 0)
    }

    #[test]
    fn folds_primes_into_var() {
        let e = parse_expression("p''").unwrap();
        assert_eq!(e, Expr::var("p", 2));
        let e = parse_expression("m.p'").unwrap();
        assert_eq!(e, Expr::field(var("m"), "p", 1));
    }

    #[test]
    fn vector_addition() {
        let e = parse_expression("D+[0,0,1]").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Add, var("D"), Expr::Vector(vec![Expr::Real(0.0), Expr::Real(0.0), Expr::Real(1.0)]))
        );
        assert_eq!(parse_expression("x").unwrap(), var("x"));
    }

    // corpus models write pi to eleven decimals
    #[test]
    #[allow(clippy::approx_constant)]
    fn negated_call_plus_constant() {
        let e = parse_expression("-asin(x/(length*cos(alpha))) +3.14159265359").unwrap();
        let call = Expr::call(
            "asin",
            vec![Expr::binary(
                BinOp::Div,
                var("x"),
                Expr::binary(BinOp::Mul, var("length"), Expr::call("cos", vec![var("alpha")])),
            )],
        );
        assert_eq!(e, Expr::binary(BinOp::Add, Expr::unary(UnOp::Neg, call), Expr::Real(3.14159265359)));
    }

    #[test]
    fn spring_listing_parses_with_standard_precedence() {
        let e = parse_expression("p2-p1 * (1-l0/norm(p2-p1))").unwrap();
        match e {
            Expr::Binary { op: BinOp::Sub, left, right } => {
                assert_eq!(*left, var("p2"));
                match *right {
                    Expr::Binary { op: BinOp::Mul, left, .. } => assert_eq!(*left, var("p1")),
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let e = parse_expression("-x^2").unwrap();
        assert_eq!(e, Expr::unary(UnOp::Neg, Expr::binary(BinOp::Pow, var("x"), Expr::Real(2.0))));
        // right associative
        let e = parse_expression("a^b^c").unwrap();
        assert_eq!(e, Expr::binary(BinOp::Pow, var("a"), Expr::binary(BinOp::Pow, var("b"), var("c"))));
        // exponent may be negated
        let e = parse_expression("2^-1").unwrap();
        assert_eq!(e, Expr::binary(BinOp::Pow, Expr::Real(2.0), Expr::unary(UnOp::Neg, Expr::Real(1.0))));
    }

    #[test]
    fn logical_precedence() {
        let e = parse_expression("a < 0 && b < 0 || c").unwrap();
        let lt = |n| Expr::binary(BinOp::Lt, var(n), Expr::Real(0.0));
        assert_eq!(e, Expr::binary(BinOp::Or, Expr::binary(BinOp::And, lt("a"), lt("b")), var("c")));
    }

    #[test]
    fn scalar_times_negative() {
        let e = parse_expression("m.m * -9.81").unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Mul, Expr::field(var("m"), "m", 0), Expr::unary(UnOp::Neg, Expr::Real(9.81)))
        );
    }

    #[test]
    fn minimal_class() {
        let m = parse("class c () end").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].name, "c");
        assert!(m[0].params.is_empty() && m[0].privates.is_empty() && m[0].body.is_empty());
    }

    #[test]
    fn sphere_listing() {
        let src = r#"
class sphere (m,D)
 private
  p =[0,0,1];
  _3D = [["Sphere", D+[0,0,1],
          0.03*sqrt(m),
          [m/3,2+sin(m),2-m/2],
          [1,1,1]]];
 end
 _3D [=] [["Sphere", D+p,
           0.03*sqrt(m),
           [m/3,2+sin(m),2-m/2],
           [1,1,1]]];
end
"#;
        let m = parse(src).unwrap();
        let c = &m[0];
        assert_eq!(c.name, "sphere");
        assert_eq!(c.params, ["m", "D"]);
        let names: Vec<_> = c.privates.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["p", "_3D"]);
        assert_eq!(c.body.len(), 1);
        match &c.body[0].kind {
            StmtKind::Continuous { target, .. } => assert_eq!(*target, var("_3D")),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(c.body[0].pos, Pos::new(10, 2));
    }

    #[test]
    fn if_block_needs_no_separator() {
        let src = "class c (y) private t = 0 end
          if (y>0) t [=] 1 else t [=] 2 end
          t' [=] 3 end";
        // t' is undeclared but that is a static check, not a syntax error
        let m = parse(src).unwrap();
        assert_eq!(m[0].body.len(), 2);
    }

    #[test]
    fn if_with_trailing_separators() {
        let src = "class c () private t = 0; t' = 0 end
          t' [=] 1;
          if (t>1)
           t=0;
          end;
        end";
        let m = parse(src).unwrap();
        match &m[0].body[1].kind {
            StmtKind::If { then_branch, else_branch, .. } => {
                assert_eq!(then_branch.len(), 1);
                assert!(else_branch.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn switch_and_terminate_and_create() {
        let src = r#"class c () private mode = 0; s = 0 end
          switch mode
            case 0 s = create d (1)
            case -1 terminate s
            case "x"
          end
        end
        class d (a) end"#;
        let m = parse(src).unwrap();
        match &m[0].body[0].kind {
            StmtKind::Switch { cases, .. } => {
                assert_eq!(cases.len(), 3);
                assert_eq!(cases[1].label, Literal::Real(-1.0));
                assert!(matches!(cases[0].body[0].kind, StmtKind::Create { .. }));
                assert!(matches!(cases[1].body[0].kind, StmtKind::Terminate { .. }));
                assert!(cases[2].body.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_separator_reports_position_and_expectations() {
        let err = parse("class c () private x = 0 end\n x = 1\n x = 2 end").unwrap_err();
        match err {
            SyntaxError::Parse { pos, expected, found } => {
                assert_eq!(pos, Pos::new(3, 2));
                assert_eq!(expected, [";", "end"]);
                assert_eq!(found, "`x`");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unexpected_eof() {
        let err = parse("class c ()").unwrap_err();
        assert!(err.to_string().contains("end of input"), "{err}");
    }

    #[test]
    fn rejects_unknown_function() {
        let err = parse_expression("tan(x)").unwrap_err();
        assert!(err.to_string().contains("unknown function"));
    }

    #[test]
    fn rejects_comparison_chain() {
        assert!(parse_expression("a < b < c").is_err());
    }

    #[test]
    fn expression_list() {
        let toks = lex("5,[0,0,0]").unwrap();
        let args = parse_expr_list(&toks).unwrap();
        assert_eq!(args.len(), 2);
        assert!(parse_expr_list(&[]).unwrap().is_empty());
    }

    #[test]
    fn booleans() {
        assert_eq!(parse_expression("True").unwrap(), Expr::Bool(true));
        assert_eq!(parse_expression("false").unwrap(), Expr::Bool(false));
    }
}

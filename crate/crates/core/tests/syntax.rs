use acumen_core::corpus::load_corpus;
use acumen_core::syntax::{
    expr_to_string, expr_to_string_parenthesized, lex, parse, parse_expression, BinOp, Expr, Keyword, UnOp,
};
use proptest::prelude::*;

/// Byte offset of a 1-based line and character column.
fn offset(source: &str, line: u32, column: u32) -> usize {
    let start: usize = source.split_inclusive('\n').take(line as usize - 1).map(str::len).sum();
    start + source[start..].chars().take(column as usize - 1).map(char::len_utf8).sum::<usize>()
}

#[test]
fn deleting_a_token_reports_an_error_in_the_mutated_region() {
    let mut errors = 0;
    for e in load_corpus().unwrap() {
        let tokens = lex(&e.source).unwrap();
        let last_line = e.source.lines().count() as u32 + 1;
        for (i, tok) in tokens.iter().enumerate() {
            let at = offset(&e.source, tok.line, tok.column);
            assert_eq!(&e.source[at..at + tok.text.len()], tok.text);
            let mutated = format!("{}{}", &e.source[..at], &e.source[at + tok.text.len()..]);
            let Err(err) = parse(&mutated) else { continue };
            // the region runs from the end of the token before the gap to the
            // start of the next class
            let first_line = if i == 0 { 1 } else { tokens[i - 1].end_pos().line };
            let next_class =
                tokens[i + 1..].iter().find(|t| t.is_keyword(Keyword::Class)).map_or(last_line, |t| t.line);
            let line = err.pos().line;
            assert!(
                (first_line..=next_class).contains(&line),
                "{}: deleting {} at {}:{} reported line {line}: {err}",
                e.name,
                tok,
                tok.line,
                tok.column
            );
            errors += 1;
        }
    }
    assert!(errors > 1000, "only {errors} mutations failed to parse");
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Real(f64::from(n) / 8.0)),
        any::<bool>().prop_map(Expr::Bool),
        ("[a-z][a-z0-9_]{0,3}", 0u32..3).prop_map(|(n, p)| Expr::var(n, p)),
        Just(Expr::Str("Sphere".into())),
    ]
}

fn binop() -> impl Strategy<Value = BinOp> {
    prop::sample::select(vec![
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Pow,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Eq,
        BinOp::And,
        BinOp::Or,
    ])
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 4, |inner| {
        prop_oneof![
            (binop(), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (prop::sample::select(vec![UnOp::Neg, UnOp::Not]), inner.clone()).prop_map(|(op, e)| Expr::unary(op, e)),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Expr::Vector),
            (prop::sample::select(vec!["sin", "norm", "dot"]), prop::collection::vec(inner.clone(), 1..3)).prop_map(
                |(f, args)| {
                    let n = if f == "dot" { 2 } else { 1 };
                    let mut args = args;
                    args.resize(n, Expr::Real(1.0));
                    Expr::call(f, args)
                }
            ),
            (inner, "[a-z]{1,3}", 0u32..2).prop_map(|(o, f, p)| Expr::field(o, f, p)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn redundant_parentheses_do_not_change_the_tree(e in expr()) {
        let minimal = expr_to_string(&e);
        let full = expr_to_string_parenthesized(&e);
        let a = parse_expression(&minimal).map_err(|err| TestCaseError::fail(format!("{minimal}: {err}")))?;
        let b = parse_expression(&full).map_err(|err| TestCaseError::fail(format!("{full}: {err}")))?;
        prop_assert_eq!(&a, &b, "{} vs {}", minimal, full);
        prop_assert_eq!(&a, &e, "{}", minimal);
    }
}

#[test]
fn precedence_table() {
    let cases = [
        ("a || b && c", "(a || (b && c))"),
        ("a && b < c", "(a && (b < c))"),
        ("a < b + c", "(a < (b + c))"),
        ("a + b * c", "(a + (b * c))"),
        ("a - b - c", "((a - b) - c)"),
        ("-a * b", "((-a) * b)"),
        ("-a ^ b", "(-(a ^ b))"),
        ("a ^ b ^ c", "(a ^ (b ^ c))"),
        ("a ^ -b", "(a ^ (-b))"),
        ("p2-p1 * (1-l0/norm(p2-p1))", "(p2 - (p1 * (1 - (l0 / norm((p2 - p1))))))"),
    ];
    for (src, want) in cases {
        assert_eq!(expr_to_string_parenthesized(&parse_expression(src).unwrap()), want, "{src}");
    }
}

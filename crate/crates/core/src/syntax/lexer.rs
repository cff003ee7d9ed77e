use std::fmt;

use super::ast::Pos;
use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Class,
    Private,
    End,
    Create,
    Terminate,
    If,
    Else,
    Switch,
    Case,
}

impl Keyword {
    pub const ALL: [Keyword; 9] = [
        Keyword::Class,
        Keyword::Private,
        Keyword::End,
        Keyword::Create,
        Keyword::Terminate,
        Keyword::If,
        Keyword::Else,
        Keyword::Switch,
        Keyword::Case,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Class => "class",
            Keyword::Private => "private",
            Keyword::End => "end",
            Keyword::Create => "create",
            Keyword::Terminate => "terminate",
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::Switch => "switch",
            Keyword::Case => "case",
        }
    }

    fn from_ident(s: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// `[=]`
    ContAssign,
    /// `=`
    Assign,
    /// `==`
    EqEq,
    Semi,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Prime,
    Dot,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::ContAssign => "[=]",
            Symbol::Assign => "=",
            Symbol::EqEq => "==",
            Symbol::Semi => ";",
            Symbol::Comma => ",",
            Symbol::LParen => "(",
            Symbol::RParen => ")",
            Symbol::LBracket => "[",
            Symbol::RBracket => "]",
            Symbol::Plus => "+",
            Symbol::Minus => "-",
            Symbol::Star => "*",
            Symbol::Slash => "/",
            Symbol::Caret => "^",
            Symbol::Lt => "<",
            Symbol::Le => "<=",
            Symbol::Gt => ">",
            Symbol::Ge => ">=",
            Symbol::AndAnd => "&&",
            Symbol::OrOr => "||",
            Symbol::Bang => "!",
            Symbol::Prime => "'",
            Symbol::Dot => ".",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident,
    Keyword(Keyword),
    Real(f64),
    /// Literal contents with escapes resolved.
    Str(String),
    Symbol(Symbol),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token.
    pub text: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn pos(&self) -> Pos {
        Pos::new(self.line, self.column)
    }

    pub fn is_symbol(&self, sym: Symbol) -> bool {
        self.kind == TokenKind::Symbol(sym)
    }

    pub fn is_keyword(&self, kw: Keyword) -> bool {
        self.kind == TokenKind::Keyword(kw)
    }

    /// Position just past the end of this token.
    pub fn end_pos(&self) -> Pos {
        match self.text.rfind('\n') {
            Some(i) => Pos::new(
                self.line + self.text.matches('\n').count() as u32,
                self.text[i + 1..].chars().count() as u32 + 1,
            ),
            None => Pos::new(self.line, self.column + self.text.chars().count() as u32),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.text)
    }
}

struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }
}

/// Splits model source into tokens. `//` comments and whitespace are dropped.
pub fn lex(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut cur = Cursor { src: source, offset: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek_nth(1) == Some('/') {
            cur.bump_while(|c| c != '\n');
            continue;
        }

        let (line, column, start) = (cur.line, cur.column, cur.offset);
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            cur.bump_while(|c| c.is_ascii_alphanumeric() || c == '_');
            match Keyword::from_ident(&source[start..cur.offset]) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident,
            }
        } else if c.is_ascii_digit() {
            lex_number(&mut cur)?
        } else if c == '"' {
            lex_string(&mut cur)?
        } else {
            TokenKind::Symbol(lex_symbol(&mut cur)?)
        };

        tokens.push(Token { kind, text: source[start..cur.offset].to_string(), line, column });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<TokenKind, SyntaxError> {
    let (line, column, start) = (cur.line, cur.column, cur.offset);
    cur.bump_while(|c| c.is_ascii_digit());
    if cur.peek() == Some('.') && cur.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
        cur.bump();
        cur.bump_while(|c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let digit_at = if matches!(cur.peek_nth(1), Some('+' | '-')) { 2 } else { 1 };
        if cur.peek_nth(digit_at).is_some_and(|c| c.is_ascii_digit()) {
            for _ in 0..digit_at {
                cur.bump();
            }
            cur.bump_while(|c| c.is_ascii_digit());
        }
    }
    let text = &cur.src[start..cur.offset];
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(TokenKind::Real(v)),
        _ => Err(SyntaxError::lex(Pos::new(line, column), format!("real literal `{text}` is out of range"))),
    }
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<TokenKind, SyntaxError> {
    let start = Pos::new(cur.line, cur.column);
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.bump() {
            Some('"') => return Ok(TokenKind::Str(value)),
            Some('\\') => {
                let esc_pos = Pos::new(cur.line, cur.column - 1);
                match cur.bump() {
                    Some('"') => value.push('"'),
                    Some('\\') => value.push('\\'),
                    Some('n') => value.push('\n'),
                    Some('t') => value.push('\t'),
                    Some(other) => {
                        return Err(SyntaxError::lex(esc_pos, format!("unknown escape `\\{other}` in string literal")))
                    }
                    None => break,
                }
            }
            Some('\n') | None => break,
            Some(c) => value.push(c),
        }
    }
    Err(SyntaxError::lex(start, "unterminated string literal".to_string()))
}

fn lex_symbol(cur: &mut Cursor<'_>) -> Result<Symbol, SyntaxError> {
    let pos = Pos::new(cur.line, cur.column);
    let c = cur.peek().unwrap_or('\0');
    let next = cur.peek_nth(1);
    let (sym, len) = match (c, next) {
        ('[', Some('=')) if cur.peek_nth(2) == Some(']') => (Symbol::ContAssign, 3),
        ('=', Some('=')) => (Symbol::EqEq, 2),
        ('<', Some('=')) => (Symbol::Le, 2),
        ('>', Some('=')) => (Symbol::Ge, 2),
        ('&', Some('&')) => (Symbol::AndAnd, 2),
        ('|', Some('|')) => (Symbol::OrOr, 2),
        ('=', _) => (Symbol::Assign, 1),
        (';', _) => (Symbol::Semi, 1),
        (',', _) => (Symbol::Comma, 1),
        ('(', _) => (Symbol::LParen, 1),
        (')', _) => (Symbol::RParen, 1),
        ('[', _) => (Symbol::LBracket, 1),
        (']', _) => (Symbol::RBracket, 1),
        ('+', _) => (Symbol::Plus, 1),
        ('-', _) => (Symbol::Minus, 1),
        ('*', _) => (Symbol::Star, 1),
        ('/', _) => (Symbol::Slash, 1),
        ('^', _) => (Symbol::Caret, 1),
        ('<', _) => (Symbol::Lt, 1),
        ('>', _) => (Symbol::Gt, 1),
        ('!', _) => (Symbol::Bang, 1),
        ('\'', _) => (Symbol::Prime, 1),
        ('.', _) => (Symbol::Dot, 1),
        _ => return Err(SyntaxError::lex(pos, format!("unexpected character `{c}`"))),
    };
    for _ in 0..len {
        cur.bump();
    }
    Ok(sym)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn empty_input() {
        assert!(lex("").unwrap().is_empty());
        assert!(lex("  \n\t ").unwrap().is_empty());
    }

    #[test]
    fn comment_skipped() {
        assert_eq!(kinds("// x\n5"), vec![TokenKind::Real(5.0)]);
        let toks = lex("// Goal is spring length at rest\n c.g").unwrap();
        assert_eq!(toks[0].line, 2);
        assert_eq!(toks[0].column, 2);
    }

    #[test]
    fn primes_are_separate_tokens() {
        let toks = lex("p'' [=] f/m;").unwrap();
        let texts: Vec<_> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, ["p", "'", "'", "[=]", "f", "/", "m", ";"]);
        assert_eq!(toks[3].kind, TokenKind::Symbol(Symbol::ContAssign));
    }

    #[test]
    fn continuous_assign_versus_vector() {
        assert_eq!(
            kinds("[=] [0]"),
            vec![
                TokenKind::Symbol(Symbol::ContAssign),
                TokenKind::Symbol(Symbol::LBracket),
                TokenKind::Real(0.0),
                TokenKind::Symbol(Symbol::RBracket),
            ]
        );
    }

    #[test]
    fn keywords_and_identifiers() {
        assert_eq!(
            kinds("class _3D end ending"),
            vec![
                TokenKind::Keyword(Keyword::Class),
                TokenKind::Ident,
                TokenKind::Keyword(Keyword::End),
                TokenKind::Ident,
            ]
        );
    }

    // corpus models write pi to eleven decimals
    #[test]
    #[allow(clippy::approx_constant)]
    fn numbers() {
        assert_eq!(kinds("3.14159265359"), vec![TokenKind::Real(3.14159265359)]);
        assert_eq!(kinds("1e-3 2E+2"), vec![TokenKind::Real(1e-3), TokenKind::Real(200.0)]);
        // field access after an integer is not a fraction
        assert_eq!(kinds("1.x"), vec![TokenKind::Real(1.0), TokenKind::Symbol(Symbol::Dot), TokenKind::Ident]);
    }

    #[test]
    fn strings() {
        assert_eq!(kinds(r#""Sphere""#), vec![TokenKind::Str("Sphere".into())]);
        assert_eq!(kinds(r#""a\"b""#), vec![TokenKind::Str("a\"b".into())]);
    }

    #[test]
    fn unterminated_string() {
        let err = lex("x = \"abc").unwrap_err();
        assert_eq!(err.pos(), Pos::new(1, 5));
        assert!(err.to_string().contains("unterminated"));
    }

    #[test]
    fn unknown_character() {
        let err = lex("x\n  y # z").unwrap_err();
        assert_eq!(err.pos(), Pos::new(2, 5));
        assert!(err.to_string().contains('#'));
    }

    #[test]
    fn two_char_operators() {
        assert_eq!(
            kinds("<= >= == && || < >"),
            [Symbol::Le, Symbol::Ge, Symbol::EqEq, Symbol::AndAnd, Symbol::OrOr, Symbol::Lt, Symbol::Gt]
                .into_iter()
                .map(TokenKind::Symbol)
                .collect::<Vec<_>>()
        );
    }
}

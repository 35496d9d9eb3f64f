use super::ast::Span;
use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Int(u32),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    At,
    /// `->`
    Arrow,
    /// `-o`
    Inhibit,
    /// `->>`
    ResetArrow,
    /// `-<>`
    TimingArrow,
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Int(n) => format!("integer `{n}`"),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Semi => "`;`".into(),
            Token::Colon => "`:`".into(),
            Token::At => "`@`".into(),
            Token::Arrow => "`->`".into(),
            Token::Inhibit => "`-o`".into(),
            Token::ResetArrow => "`->>`".into(),
            Token::TimingArrow => "`-<>`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub token: Token,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(source: &str) -> Result<Vec<Spanned>, Diagnostic> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    let peek = |i: usize| chars.get(i).copied();

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && peek(i + 1) == Some('/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (token, len) = match c {
            '{' => (Token::LBrace, 1),
            '}' => (Token::RBrace, 1),
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            ';' => (Token::Semi, 1),
            ':' => (Token::Colon, 1),
            '@' => (Token::At, 1),
            '-' => match (peek(i + 1), peek(i + 2)) {
                (Some('>'), Some('>')) => (Token::ResetArrow, 3),
                (Some('>'), _) => (Token::Arrow, 2),
                (Some('<'), Some('>')) => (Token::TimingArrow, 3),
                (Some('o'), next) if !next.is_some_and(is_ident_continue) => (Token::Inhibit, 2),
                _ => {
                    return Err(Diagnostic::new(
                        span,
                        "expected one of `->`, `->>`, `-o`, `-<>` after `-`",
                    ))
                }
            },
            c if c.is_ascii_digit() => {
                let start = i;
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                let value = text
                    .parse::<u32>()
                    .map_err(|_| Diagnostic::new(span, format!("integer `{text}` out of range")))?;
                (Token::Int(value), j - start)
            }
            c if is_ident_start(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_continue(chars[j]) {
                    j += 1;
                }
                (Token::Ident(chars[start..j].iter().collect()), j - start)
            }
            other => {
                return Err(Diagnostic::new(span, format!("unexpected character `{other}`")));
            }
        };
        tokens.push(Spanned { token, span });
        i += len;
        col += len as u32;
    }
    tokens.push(Spanned {
        token: Token::Eof,
        span: Span::new(line, col),
    });
    Ok(tokens)
}

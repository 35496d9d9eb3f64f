//! Recursive-descent parser from tokens to an unresolved syntax tree.
//!
//! The syntax tree keeps `->` arcs undirected (place-to-transition and
//! transition-to-place share an operator); resolution into [`ArcKind`] needs
//! the declarations and happens in validation.
//!
//! [`ArcKind`]: super::ast::ArcKind

use super::ast::{Scope, ScopeQualifier, Span};
use super::lexer::{tokenize, Spanned, Token};
use super::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Standard(String, Span),
    Timings(Vec<(String, Span)>),
    Places(Vec<PlaceStmt>),
    Transitions(Vec<(String, Span)>),
    Arcs(Vec<ArcStmt>),
    Hierarchy {
        count_param: String,
        name: String,
        items: Vec<Item>,
        span: Span,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceStmt {
    pub name: String,
    pub capacity: Option<u32>,
    pub lifetime: Option<String>,
    pub initial: Option<u32>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcOp {
    Arrow,
    Inhibit,
    Reset,
    Timing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcStmt {
    pub from: String,
    pub op: ArcOp,
    pub to: String,
    pub param: Option<(String, Span)>,
    pub scope: Option<Scope>,
    pub span: Span,
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn peek_at(&self, offset: usize) -> &Token {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].token
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        Diagnostic::new(
            self.span(),
            format!(
                "expected {}, found {}",
                expected.join(" or "),
                self.peek().describe()
            ),
        )
    }

    fn expect(&mut self, token: Token, what: &str) -> PResult<Span> {
        if *self.peek() == token {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Token::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn int(&mut self) -> PResult<u32> {
        match *self.peek() {
            Token::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn items(&mut self, until: Token) -> PResult<Vec<Item>> {
        let mut items = Vec::new();
        while *self.peek() != until {
            items.push(self.item()?);
        }
        Ok(items)
    }

    fn item(&mut self) -> PResult<Item> {
        let (word, span) = match self.peek().clone() {
            Token::Ident(w) => (w, self.span()),
            _ => {
                return Err(self.unexpected(&[
                    "`standard`",
                    "`Timings`",
                    "`Places`",
                    "`Transitions`",
                    "`Arcs`",
                    "hierarchy `<count> : <name> {`",
                ]))
            }
        };
        if *self.peek_at(1) == Token::Colon {
            return self.hierarchy();
        }
        match word.as_str() {
            "standard" => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Token::Semi, "`;`")?;
                Ok(Item::Standard(name, span))
            }
            "Timings" => {
                self.bump();
                Ok(Item::Timings(self.name_block()?))
            }
            "Transitions" => {
                self.bump();
                Ok(Item::Transitions(self.name_block()?))
            }
            "Places" => {
                self.bump();
                self.expect(Token::LBrace, "`{`")?;
                let mut places = Vec::new();
                while *self.peek() != Token::RBrace {
                    places.push(self.place()?);
                }
                self.bump();
                Ok(Item::Places(places))
            }
            "Arcs" => {
                self.bump();
                self.expect(Token::LBrace, "`{`")?;
                let mut arcs = Vec::new();
                while *self.peek() != Token::RBrace {
                    arcs.push(self.arc()?);
                }
                self.bump();
                Ok(Item::Arcs(arcs))
            }
            _ => Err(Diagnostic::new(
                span,
                format!(
                    "expected `standard` or `Timings` or `Places` or `Transitions` or `Arcs` or \
                     hierarchy `<count> : <name> {{`, found identifier `{word}`"
                ),
            )),
        }
    }

    fn hierarchy(&mut self) -> PResult<Item> {
        let (count_param, span) = self.ident()?;
        self.expect(Token::Colon, "`:`")?;
        let (name, _) = self.ident()?;
        self.expect(Token::LBrace, "`{`")?;
        let items = self.items(Token::RBrace)?;
        self.bump();
        Ok(Item::Hierarchy {
            count_param,
            name,
            items,
            span,
        })
    }

    fn name_block(&mut self) -> PResult<Vec<(String, Span)>> {
        self.expect(Token::LBrace, "`{`")?;
        let mut names = Vec::new();
        while *self.peek() != Token::RBrace {
            names.push(self.ident()?);
            self.expect(Token::Semi, "`;`")?;
        }
        self.bump();
        Ok(names)
    }

    fn place(&mut self) -> PResult<PlaceStmt> {
        let (name, span) = self.ident()?;
        let mut stmt = PlaceStmt {
            name,
            capacity: None,
            lifetime: None,
            initial: None,
            span,
        };
        loop {
            let annot_span = self.span();
            match self.peek().clone() {
                Token::Semi => {
                    self.bump();
                    return Ok(stmt);
                }
                Token::Ident(a) if a == "capacity" || a == "init" || a == "lifetime" => {
                    self.bump();
                    self.expect(Token::LParen, "`(`")?;
                    let dup = match a.as_str() {
                        "capacity" => stmt.capacity.replace(self.int()?).is_some(),
                        "init" => stmt.initial.replace(self.int()?).is_some(),
                        _ => stmt.lifetime.replace(self.ident()?.0).is_some(),
                    };
                    self.expect(Token::RParen, "`)`")?;
                    if dup {
                        return Err(Diagnostic::new(
                            annot_span,
                            format!("duplicate `{a}` annotation on place `{}`", stmt.name),
                        ));
                    }
                }
                _ => return Err(self.unexpected(&["`capacity`", "`lifetime`", "`init`", "`;`"])),
            }
        }
    }

    fn arc(&mut self) -> PResult<ArcStmt> {
        let (from, span) = self.ident()?;
        let op = match self.peek() {
            Token::Arrow => ArcOp::Arrow,
            Token::Inhibit => ArcOp::Inhibit,
            Token::ResetArrow => ArcOp::Reset,
            Token::TimingArrow => ArcOp::Timing,
            _ => return Err(self.unexpected(&["`->`", "`-o`", "`->>`", "`-<>`"])),
        };
        self.bump();
        let (to, _) = self.ident()?;
        let param = if *self.peek() == Token::LParen {
            self.bump();
            let p = self.ident()?;
            self.expect(Token::RParen, "`)`")?;
            Some(p)
        } else {
            None
        };
        let scope = if *self.peek() == Token::At {
            self.bump();
            let (word, wspan) = self.ident()?;
            let qualifier = match word.as_str() {
                "same" => ScopeQualifier::SameInstance,
                "sibling" => ScopeQualifier::SiblingInstance,
                "all" => ScopeQualifier::AllInstances,
                _ => {
                    return Err(Diagnostic::new(
                        wspan,
                        format!("expected `same` or `sibling` or `all`, found identifier `{word}`"),
                    ))
                }
            };
            let level = if *self.peek() == Token::LParen {
                self.bump();
                let (l, _) = self.ident()?;
                self.expect(Token::RParen, "`)`")?;
                Some(l)
            } else {
                None
            };
            Some(Scope { qualifier, level })
        } else {
            None
        };
        if *self.peek() != Token::Semi {
            let mut expected = vec!["`;`"];
            if param.is_none() && scope.is_none() {
                expected.insert(0, "`(`");
            }
            if scope.is_none() {
                expected.insert(expected.len() - 1, "`@`");
            }
            return Err(self.unexpected(&expected));
        }
        self.bump();
        Ok(ArcStmt {
            from,
            op,
            to,
            param,
            scope,
            span,
        })
    }
}

/// Parse DRAMml text into a syntax tree without resolving any names.
///
/// Fragments that reference undeclared places or transitions are accepted
/// here; [`super::parse`] rejects them.
pub fn parse_document(source: &str) -> Result<Document, Diagnostic> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let items = parser.items(Token::Eof)?;
    Ok(Document { items })
}

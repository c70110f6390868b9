use super::{Ltl, LtlError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Until,
    Finally,
    Globally,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, LtlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '!' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push(Lexed {
                    tok: match word.as_str() {
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "X" => Tok::Next,
                        "U" => Tok::Until,
                        "F" => Tok::Finally,
                        "G" => Tok::Globally,
                        _ => Tok::Ident(word),
                    },
                    column,
                });
                continue;
            }
            other => {
                return Err(LtlError::Syntax {
                    column,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Lexed { tok, column });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |l| l.column)
    }

    fn error(&self, message: impl Into<String>) -> LtlError {
        LtlError::Syntax {
            column: self.column(),
            message: message.into(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            Ok(lhs.until(self.until()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Ltl, LtlError> {
        let op = match self.peek() {
            Some(Tok::Not) => Ltl::not,
            Some(Tok::Next) => Ltl::next,
            Some(Tok::Finally) => Ltl::finally,
            Some(Tok::Globally) => Ltl::globally,
            _ => return self.primary(),
        };
        self.pos += 1;
        Ok(op(self.unary()?))
    }

    fn primary(&mut self) -> Result<Ltl, LtlError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.error("unexpected end of formula"))?;
        let node = match tok {
            Tok::True => Ltl::True,
            Tok::False => Ltl::False,
            Tok::Ident(name) => Ltl::Atom(name),
            Tok::LParen => {
                self.pos += 1;
                let inner = self.or()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                return Ok(inner);
            }
            other => return Err(self.error(format!("unexpected token {other:?}"))),
        };
        self.pos += 1;
        Ok(node)
    }
}

/// Parses the concrete syntax: atoms are identifiers; operators are `!`,
/// `X`, `F`, `G` (unary, tightest), `U` (right-associative), `&`, `|`.
pub fn parse_ltl(text: &str) -> Result<Ltl, LtlError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_column: text.chars().count() + 1,
    };
    let f = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

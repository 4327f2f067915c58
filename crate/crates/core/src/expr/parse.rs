//! Recursive-descent parser for the scalar expression grammar.
//!
//! Precedence, lowest to highest: `+ -`, `* /`, unary `-`, `^` (right
//! associative). Function calls take a single parenthesized argument.

use super::{BinOp, Func, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                pos: start,
            });
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                // report the full (possibly multi-byte) character
                let ch = text[start..].chars().next().unwrap_or(c);
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, pos: start });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        pos: text.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn additive(&mut self) -> Result<Node> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Node::pow(base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.additive()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                    self.bump();
                    let arg = self.additive()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                if Func::from_name(&name).is_some() {
                    return Err(syntax(t.pos, format!("function `{name}` needs an argument")));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(Error::UnknownIdentifier(name)),
                }
            }
            Tok::End => Err(syntax(t.pos, "unexpected end of input")),
            Tok::RParen => Err(syntax(t.pos, "unexpected `)`")),
            Tok::Op(c) => Err(syntax(t.pos, format!("unexpected operator `{c}`"))),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            _ => Err(syntax(t.pos, "expected `)`")),
        }
    }
}

pub(super) fn parse_tree(text: &str, vars: &[String]) -> Result<Node> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, vars };
    let node = p.additive()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.pos, "unexpected trailing input"));
    }
    Ok(node)
}

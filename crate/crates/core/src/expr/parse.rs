use super::{ExprError, Func, Node};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
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
            let s = &text[start..i];
            let v: f64 = s.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                msg: format!("malformed number `{s}`"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ExprError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

pub(super) fn parse(text: &str, vars: &[String]) -> Result<Node, ExprError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ExprError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vars,
    };
    let node = p.expr()?;
    if let Some((_, at)) = p.toks.get(p.pos) {
        return Err(ExprError::Syntax {
            pos: *at,
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(node)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let at = self.at();
        match self.bump() {
            Some(Tok::RParen) => Ok(()),
            _ => Err(ExprError::Syntax {
                pos: at,
                msg: "expected `)`".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.bump();
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let mut base = self.primary()?;
        while let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let n = self.exponent()?;
            base = Node::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let at = self.at();
        let paren = matches!(self.peek(), Some(Tok::LParen));
        if paren {
            self.bump();
        }
        let negative = matches!(self.peek(), Some(Tok::Op('-')));
        if negative {
            self.bump();
        }
        let lit_at = self.at();
        let value = match self.bump() {
            Some(Tok::Num(v)) => v,
            Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                return Err(ExprError::BadExponent {
                    pos: lit_at,
                    msg: "exponent must be a constant integer literal".into(),
                })
            }
            _ => {
                return Err(ExprError::Syntax {
                    pos: lit_at,
                    msg: "expected exponent".into(),
                })
            }
        };
        if value.fract() != 0.0 || value > i32::MAX as f64 {
            return Err(ExprError::BadExponent {
                pos: at,
                msg: format!("`{value}` is not an integer"),
            });
        }
        if paren {
            if !matches!(self.peek(), Some(Tok::RParen)) {
                return Err(ExprError::BadExponent {
                    pos: self.at(),
                    msg: "exponent must be a constant integer literal".into(),
                });
            }
            self.bump();
        }
        let n = value as i32;
        Ok(if negative { -n } else { n })
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let at = self.at();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                if name == "pi" {
                    return Ok(Node::Pi);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(i));
                }
                if let Some(f) = Func::from_name(&name) {
                    let lp = self.at();
                    if !matches!(self.bump(), Some(Tok::LParen)) {
                        return Err(ExprError::Syntax {
                            pos: lp,
                            msg: format!("expected `(` after `{name}`"),
                        });
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                if matches!(self.peek(), Some(Tok::LParen)) {
                    return Err(ExprError::Syntax {
                        pos: at,
                        msg: format!("unknown function `{name}`"),
                    });
                }
                Err(ExprError::UndeclaredVariable { name, pos: at })
            }
            Some(tok) => Err(ExprError::Syntax {
                pos: at,
                msg: format!("unexpected token {tok:?}"),
            }),
            None => Err(ExprError::Syntax {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

//! Concrete syntax: `true`, `false`, identifiers, `!` (atoms only), `&`,
//! `|`, `X`, `F`, `U`, parentheses. Precedence from tightest:
//! `!`, then `X`/`F`, then `U` (right-associative), `&`, `|`.

use super::formula::{Expr, Formula};
use super::ScltlError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Next,
    Eventually,
    Until,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ScltlError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'!' => Some(Token::Not),
            b'&' => Some(Token::And),
            b'|' => Some(Token::Or),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let token = match &text[start..i] {
                "true" => Token::True,
                "false" => Token::False,
                "X" => Token::Next,
                "F" => Token::Eventually,
                "U" => Token::Until,
                word => Token::Ident(word.to_string()),
            };
            out.push((start, token));
        } else {
            return Err(ScltlError::Syntax {
                pos: i,
                message: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
            });
        }
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    at: usize,
    props: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].1.clone();
        if t != Token::End {
            self.at += 1;
        }
        t
    }

    fn or(&mut self) -> Result<Expr, ScltlError> {
        let mut e = self.and()?;
        while *self.peek() == Token::Or {
            self.bump();
            e = Expr::or(e, self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<Expr, ScltlError> {
        let mut e = self.until()?;
        while *self.peek() == Token::And {
            self.bump();
            e = Expr::and(e, self.until()?);
        }
        Ok(e)
    }

    fn until(&mut self) -> Result<Expr, ScltlError> {
        let lhs = self.unary()?;
        if *self.peek() == Token::Until {
            self.bump();
            return Ok(Expr::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ScltlError> {
        let pos = self.pos();
        match self.peek() {
            Token::Not => {
                self.bump();
                match self.unary()? {
                    Expr::True => Ok(Expr::False),
                    Expr::False => Ok(Expr::True),
                    Expr::Prop(p) => Ok(Expr::NotProp(p)),
                    Expr::NotProp(p) => Ok(Expr::Prop(p)),
                    _ => Err(ScltlError::NegatedCompound { pos }),
                }
            }
            Token::Next => {
                self.bump();
                Ok(Expr::next(self.unary()?))
            }
            Token::Eventually => {
                self.bump();
                Ok(Expr::eventually(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ScltlError> {
        let pos = self.pos();
        match self.bump() {
            Token::True => Ok(Expr::True),
            Token::False => Ok(Expr::False),
            Token::Ident(name) => self
                .props
                .iter()
                .position(|p| *p == name)
                .map(Expr::Prop)
                .ok_or(ScltlError::UndeclaredProp { name, pos }),
            Token::LParen => {
                let e = self.or()?;
                match self.bump() {
                    Token::RParen => Ok(e),
                    _ => Err(ScltlError::Syntax {
                        pos: self.tokens[self.at.saturating_sub(1)].0,
                        message: "expected `)`".into(),
                    }),
                }
            }
            Token::End => Err(ScltlError::Syntax {
                pos,
                message: "unexpected end of formula".into(),
            }),
            other => Err(ScltlError::Syntax {
                pos,
                message: format!("unexpected {other:?}"),
            }),
        }
    }
}

/// Parses `text` against the declared propositions `ap`.
pub fn parse<S: AsRef<str>>(text: &str, ap: &[S]) -> Result<Formula, ScltlError> {
    let props: Vec<String> = ap.iter().map(|p| p.as_ref().to_string()).collect();
    for (i, p) in props.iter().enumerate() {
        let valid = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !matches!(p.as_str(), "true" | "false" | "X" | "F" | "U");
        if !valid || props[..i].contains(p) {
            return Err(ScltlError::BadProposition(p.clone()));
        }
    }
    let expr = {
        let mut parser = Parser {
            tokens: lex(text)?,
            at: 0,
            props: &props,
        };
        let e = parser.or()?;
        if *parser.peek() != Token::End {
            return Err(ScltlError::Syntax {
                pos: parser.pos(),
                message: "trailing input".into(),
            });
        }
        e
    };
    Ok(Formula::new(props, expr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: usize) -> Expr {
        Expr::Prop(i)
    }

    #[test]
    fn eventually_conjunction() {
        let f = parse("F FLAG1 & F FLAG2", &["FLAG1", "FLAG2"]).unwrap();
        assert_eq!(f.expr, Expr::and(Expr::eventually(p(0)), Expr::eventually(p(1))));
    }

    #[test]
    fn until_binds_tighter_than_and() {
        let f = parse(
            "(!FLAG2 & !collide) U FLAG1 & !collide U FLAG2",
            &["FLAG1", "FLAG2", "collide"],
        )
        .unwrap();
        let first = Expr::until(Expr::and(Expr::NotProp(1), Expr::NotProp(2)), p(0));
        let second = Expr::until(Expr::NotProp(2), p(1));
        assert_eq!(f.expr, Expr::and(first, second));
    }

    #[test]
    fn until_is_right_associative() {
        let f = parse("a U b U c", &["a", "b", "c"]).unwrap();
        assert_eq!(f.expr, Expr::until(p(0), Expr::until(p(1), p(2))));
        let f = parse("a | b & c", &["a", "b", "c"]).unwrap();
        assert_eq!(f.expr, Expr::or(p(0), Expr::and(p(1), p(2))));
        let f = parse("X a U b", &["a", "b"]).unwrap();
        assert_eq!(f.expr, Expr::until(Expr::next(p(0)), p(1)));
    }

    #[test]
    fn negation_only_on_atoms() {
        assert!(matches!(
            parse("!(a U b)", &["a", "b"]),
            Err(ScltlError::NegatedCompound { pos: 0 })
        ));
        assert!(matches!(parse("!X a", &["a"]), Err(ScltlError::NegatedCompound { .. })));
        assert_eq!(parse("!(a)", &["a"]).unwrap().expr, Expr::NotProp(0));
        assert_eq!(parse("!!a", &["a"]).unwrap().expr, p(0));
        assert_eq!(parse("!true", &["a"]).unwrap().expr, Expr::False);
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse("a & zz", &["a"]),
            Err(ScltlError::UndeclaredProp { pos: 4, .. })
        ));
        assert!(matches!(parse("a &", &["a"]), Err(ScltlError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("(a", &["a"]), Err(ScltlError::Syntax { .. })));
        assert!(matches!(parse("a b", &["a", "b"]), Err(ScltlError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("a # b", &["a", "b"]), Err(ScltlError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("a", &["U"]), Err(ScltlError::BadProposition(_))));
    }

    #[test]
    fn display_reparses() {
        let ap = ["a", "b", "c"];
        for text in ["F a & X (b | !c)", "(a | b) U X c", "true U false", "!a U (b & c)"] {
            let f = parse(text, &ap).unwrap();
            assert_eq!(parse(&f.to_string(), &ap).unwrap(), f);
        }
    }
}

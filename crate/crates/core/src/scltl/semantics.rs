//! Direct recursive evaluation of finite-word satisfaction, used as the
//! reference for the compiler.

use super::formula::{Expr, Formula};
use super::ScltlError;

/// Whether `w` is a good prefix of `f`: `f` holds at position 0 of `w`
/// under the finitary semantics (atoms and `X` need a letter, `U` needs its
/// witness inside the word, `true` holds even past the end).
pub fn semantic_oracle(f: &Formula, w: &[u32]) -> Result<bool, ScltlError> {
    let limit = 1u64 << f.props.len();
    if let Some(&sym) = w.iter().find(|&&s| u64::from(s) >= limit) {
        return Err(ScltlError::SymbolOutOfRange(sym));
    }
    Ok(holds(&f.expr, w, 0))
}

fn holds(e: &Expr, w: &[u32], i: usize) -> bool {
    let letter = w.get(i).copied();
    match e {
        Expr::True => true,
        Expr::False => false,
        Expr::Prop(p) => letter.is_some_and(|s| s >> p & 1 == 1),
        Expr::NotProp(p) => letter.is_some_and(|s| s >> p & 1 == 0),
        Expr::And(l, r) => holds(l, w, i) && holds(r, w, i),
        Expr::Or(l, r) => holds(l, w, i) || holds(r, w, i),
        Expr::Next(e) => letter.is_some() && holds(e, w, i + 1),
        Expr::Until(l, r) => {
            for j in i..=w.len() {
                if holds(r, w, j) {
                    return true;
                }
                if !holds(l, w, j) {
                    return false;
                }
            }
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scltl::parse;

    #[test]
    fn phi1_words() {
        let f = parse("F a & F b", &["a", "b"]).unwrap();
        assert!(semantic_oracle(&f, &[0b01, 0b10]).unwrap());
        assert!(!semantic_oracle(&f, &[0]).unwrap());
        assert!(semantic_oracle(&f, &[0b11]).unwrap());
        assert!(!semantic_oracle(&f, &[]).unwrap());
        assert!(matches!(semantic_oracle(&f, &[4]), Err(ScltlError::SymbolOutOfRange(4))));
    }

    #[test]
    fn next_needs_a_letter() {
        let f = parse("X true", &["a"]).unwrap();
        assert!(!semantic_oracle(&f, &[]).unwrap());
        assert!(semantic_oracle(&f, &[0]).unwrap());
        let t = parse("true", &["a"]).unwrap();
        assert!(semantic_oracle(&t, &[]).unwrap());
    }
}

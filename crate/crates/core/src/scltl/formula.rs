use std::fmt;

/// Positive-normal-form scLTL syntax. Propositions index into the owning
/// [`Formula`]'s declared list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    True,
    False,
    Prop(usize),
    NotProp(usize),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Next(Box<Expr>),
    Until(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn next(e: Expr) -> Expr {
        Expr::Next(Box::new(e))
    }

    pub fn until(l: Expr, r: Expr) -> Expr {
        Expr::Until(Box::new(l), Box::new(r))
    }

    /// `true U e`.
    pub fn eventually(e: Expr) -> Expr {
        Expr::until(Expr::True, e)
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Prop(_) | Expr::NotProp(_) => 0,
            Expr::Next(e) => 1 + e.depth(),
            Expr::And(l, r) | Expr::Or(l, r) | Expr::Until(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn is_temporal(&self) -> bool {
        match self {
            Expr::True | Expr::False | Expr::Prop(_) | Expr::NotProp(_) => false,
            Expr::Next(_) | Expr::Until(..) => true,
            Expr::And(l, r) | Expr::Or(l, r) => l.is_temporal() || r.is_temporal(),
        }
    }

    /// Propositional value on a symbol (bit `i` set iff proposition `i`
    /// holds). `None` for temporal expressions.
    pub fn eval(&self, symbol: u32) -> Option<bool> {
        Some(match self {
            Expr::True => true,
            Expr::False => false,
            Expr::Prop(p) => symbol >> p & 1 == 1,
            Expr::NotProp(p) => symbol >> p & 1 == 0,
            Expr::And(l, r) => l.eval(symbol)? && r.eval(symbol)?,
            Expr::Or(l, r) => l.eval(symbol)? || r.eval(symbol)?,
            Expr::Next(_) | Expr::Until(..) => return None,
        })
    }
}

/// A parsed formula together with its declared propositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub props: Vec<String>,
    pub expr: Expr,
}

impl Formula {
    pub fn new(props: Vec<String>, expr: Expr) -> Self {
        Formula { props, expr }
    }

    /// Symbol (bitmask over `props`) of a set of true propositions;
    /// unknown names are ignored.
    pub fn symbol_of<S: AsRef<str>>(&self, labels: &[S]) -> u32 {
        symbol_of(&self.props, labels)
    }
}

pub(crate) fn symbol_of<S: AsRef<str>>(props: &[String], labels: &[S]) -> u32 {
    props
        .iter()
        .enumerate()
        .filter(|(_, p)| labels.iter().any(|l| l.as_ref() == p.as_str()))
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

struct Show<'a> {
    props: &'a [String],
    expr: &'a Expr,
}

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| Show { props: self.props, expr: e };
        match self.expr {
            Expr::True => write!(f, "true"),
            Expr::False => write!(f, "false"),
            Expr::Prop(p) => write!(f, "{}", self.props[*p]),
            Expr::NotProp(p) => write!(f, "!{}", self.props[*p]),
            Expr::And(l, r) => write!(f, "({} & {})", sub(l), sub(r)),
            Expr::Or(l, r) => write!(f, "({} | {})", sub(l), sub(r)),
            Expr::Next(e) => write!(f, "X {}", sub(e)),
            Expr::Until(l, r) => write!(f, "({} U {})", sub(l), sub(r)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Show {
            props: &self.props,
            expr: &self.expr,
        }
        .fmt(f)
    }
}

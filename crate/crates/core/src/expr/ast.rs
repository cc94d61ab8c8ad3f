use std::fmt;

use crate::classes::BasePresentation;

/// A parsed query together with the base it was declared against. The tree
/// mirrors the grammar, so printing it yields text that parses back to the
/// same tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleAst {
    pub base: BasePresentation,
    pub query: Query,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Class(ClassExpr),
    Integrate(ClassExpr),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AddOp {
    Plus,
    Minus,
}

/// `term (('+' | '-') term)*`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassExpr {
    pub first: Term,
    pub rest: Vec<(AddOp, Term)>,
}

/// `factor ('*' factor)*`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Class { func: ClassFn, bundle: BundleExpr },
    Power(Box<Factor>, u32),
    Group(Box<ClassExpr>),
}

/// `c`, `ck`, `s` or `sk`; `None` selects the total class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassFn {
    Chern(Option<u32>),
    Segre(Option<u32>),
}

/// `bterm ('(+)' bterm)*`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleExpr {
    pub terms: Vec<BundleTerm>,
}

/// `batom ('(x)' batom)*`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleTerm {
    pub atoms: Vec<BundleAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleAtom {
    Tangent,
    Cotangent,
    Line(Vec<i64>),
    Det(Box<BundleExpr>),
    Dual(Box<BundleExpr>),
}

impl fmt::Display for BundleAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.query)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Class(e) => write!(f, "{e}"),
            Query::Integrate(e) => write!(f, "integrate({e})"),
        }
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.first)?;
        for (op, t) in &self.rest {
            let sym = match op {
                AddOp::Plus => '+',
                AddOp::Minus => '-',
            };
            write!(f, " {sym} {t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fac) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{fac}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Class { func, bundle } => write!(f, "{func}({bundle})"),
            Factor::Power(b, k) => write!(f, "{b}^{k}"),
            Factor::Group(e) => write!(f, "({e})"),
        }
    }
}

impl fmt::Display for ClassFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, k) = match self {
            ClassFn::Chern(k) => ('c', k),
            ClassFn::Segre(k) => ('s', k),
        };
        match k {
            Some(k) => write!(f, "{name}{k}"),
            None => write!(f, "{name}"),
        }
    }
}

impl fmt::Display for BundleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" (+) ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BundleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" (x) ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BundleAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleAtom::Tangent => f.write_str("T"),
            BundleAtom::Cotangent => f.write_str("T*"),
            BundleAtom::Line(d) => {
                let ds: Vec<String> = d.iter().map(i64::to_string).collect();
                write!(f, "O({})", ds.join(","))
            }
            BundleAtom::Det(b) => write!(f, "det({b})"),
            BundleAtom::Dual(b) => write!(f, "dual({b})"),
        }
    }
}

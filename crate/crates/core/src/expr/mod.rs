//! A small language for characteristic-class queries on a product of
//! projective spaces, e.g. `integrate(s2(T (x) O(-1)))`.
//!
//! ```text
//! expr      := classexpr | 'integrate' '(' classexpr ')'
//! classexpr := term (('+'|'-') term)*
//! term      := factor ('*' factor)*
//! factor    := classfn '(' bundle ')' | factor '^' int | '(' classexpr ')'
//! classfn   := 'c' int? | 's' int?
//! bundle    := bterm ('(+)' bterm)*
//! bterm     := batom ('(x)' batom)*
//! batom     := 'T' | 'T*' | 'O' '(' int (',' int)* ')'
//!            | 'det' '(' bundle ')' | 'dual' '(' bundle ')'
//! ```
//!
//! Whitespace is insignificant. The base is supplied out of band.

mod ast;
mod eval;
mod parse;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::classes::{BasePresentation, ClassError};

pub use ast::*;
pub use eval::{evaluate, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("{line}:{column}: unknown token {token:?}")]
    UnknownToken { line: usize, column: usize, token: char },
    #[error("{line}:{column}: expected one of {}, found {found}", join(expected))]
    Syntax { line: usize, column: usize, expected: BTreeSet<String>, found: String },
    #[error("{line}:{column}: O(...) takes {expected} degrees on this base, found {found}")]
    Arity { line: usize, column: usize, expected: usize, found: usize },
    #[error("{line}:{column}: integer {text} out of range")]
    IntegerRange { line: usize, column: usize, text: String },
    #[error("{line}:{column}: nesting deeper than {limit}")]
    TooDeep { line: usize, column: usize, limit: usize },
    #[error("semantic error: {0}")]
    Semantic(#[from] ClassError),
}

impl ExprError {
    /// 1-based position for syntax errors; `None` for semantic ones.
    pub fn position(&self) -> Option<(usize, usize)> {
        match *self {
            ExprError::UnknownToken { line, column, .. }
            | ExprError::Syntax { line, column, .. }
            | ExprError::Arity { line, column, .. }
            | ExprError::IntegerRange { line, column, .. }
            | ExprError::TooDeep { line, column, .. } => Some((line, column)),
            ExprError::Semantic(_) => None,
        }
    }
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(", ")
}

pub fn parse(text: &str, base: &BasePresentation) -> Result<BundleAst, ExprError> {
    let query = parse::Parser::new(text, base.num_factors()).parse_query()?;
    Ok(BundleAst { base: base.clone(), query })
}

/// Parses and evaluates in one step.
pub fn run(text: &str, base: &BasePresentation) -> Result<Value, ExprError> {
    evaluate(&parse(text, base)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::BasePresentation;

    fn p2() -> BasePresentation {
        BasePresentation::projective(2)
    }

    #[test]
    fn parses_the_counterexample_bundle() {
        let ast = parse("s2(T (x) O(-1))", &p2()).unwrap();
        assert_eq!(ast.to_string(), "s2(T (x) O(-1))");
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse("s2(T(x)O(-1))", &p2()).unwrap();
        let b = parse("  s 2 ( T ( x ) O ( - 1 ) )\n", &p2()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cotangent_and_products() {
        let ast = parse("c1(T*)*c1(T*) - c2(dual(T)) + (s(T))^2", &p2()).unwrap();
        assert_eq!(ast.to_string(), "c1(T*) * c1(T*) - c2(dual(T)) + (s(T))^2");
    }

    #[test]
    fn reports_position_and_expected_tokens() {
        let err = parse("c1(T) +\n  q(T)", &p2()).unwrap_err();
        match err {
            ExprError::Syntax { line, column, expected, .. } => {
                assert_eq!((line, column), (2, 3));
                assert!(expected.contains("'c'") && expected.contains("'('"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("c1(T) $", &p2()), Err(ExprError::UnknownToken { column: 7, .. })));
    }

    #[test]
    fn line_bundle_arity_is_checked() {
        let base: BasePresentation = "P1xP1".parse().unwrap();
        assert!(parse("c(O(1,2))", &base).is_ok());
        assert!(matches!(parse("c(O(1))", &base), Err(ExprError::Arity { expected: 2, found: 1, .. })));
    }

    #[test]
    fn huge_inputs_fail_cleanly() {
        let deep = format!("{}c(T){}", "(".repeat(100_000), ")".repeat(100_000));
        assert!(matches!(parse(&deep, &p2()), Err(ExprError::TooDeep { .. })));
        assert!(matches!(parse("c(O(99999999999999999999))", &p2()), Err(ExprError::IntegerRange { .. })));
        assert!(matches!(parse("c99999999999(T)", &p2()), Err(ExprError::IntegerRange { .. })));
    }
}

use std::fmt;

use num_rational::BigRational;

use super::ast::*;
use super::ExprError;
use crate::classes::{format_rational, total_chern, BasePresentation, BundleDesc, GradedClass};

/// Result of evaluating a query: a class, or a number under `integrate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Class(GradedClass),
    Number(BigRational),
}

impl Value {
    pub fn as_number(&self) -> Option<&BigRational> {
        match self {
            Value::Number(q) => Some(q),
            Value::Class(_) => None,
        }
    }

    pub fn as_class(&self) -> Option<&GradedClass> {
        match self {
            Value::Class(c) => Some(c),
            Value::Number(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Class(c) => write!(f, "{c}"),
            Value::Number(q) => f.write_str(&format_rational(q)),
        }
    }
}

pub fn evaluate(ast: &BundleAst) -> Result<Value, ExprError> {
    let base = &ast.base;
    Ok(match &ast.query {
        Query::Class(e) => Value::Class(class_expr(base, e)?),
        Query::Integrate(e) => Value::Number(class_expr(base, e)?.integrate()),
    })
}

fn class_expr(base: &BasePresentation, e: &ClassExpr) -> Result<GradedClass, ExprError> {
    let mut acc = term(base, &e.first)?;
    for (op, t) in &e.rest {
        let v = term(base, t)?;
        acc = match op {
            AddOp::Plus => &acc + &v,
            AddOp::Minus => &acc - &v,
        };
    }
    Ok(acc)
}

fn term(base: &BasePresentation, t: &Term) -> Result<GradedClass, ExprError> {
    let mut acc = GradedClass::one(base);
    for f in &t.factors {
        acc = &acc * &factor(base, f)?;
    }
    Ok(acc)
}

fn factor(base: &BasePresentation, f: &Factor) -> Result<GradedClass, ExprError> {
    Ok(match f {
        Factor::Group(e) => class_expr(base, e)?,
        Factor::Power(inner, k) => factor(base, inner)?.pow(*k),
        Factor::Class { func, bundle: b } => {
            let bundle = total_chern(base, &bundle_desc(b))?;
            match *func {
                ClassFn::Chern(None) => bundle.total_chern().clone(),
                ClassFn::Chern(Some(k)) => bundle.chern(k),
                ClassFn::Segre(None) => bundle.segre(),
                ClassFn::Segre(Some(k)) => bundle.segre_part(k),
            }
        }
    })
}

fn bundle_desc(b: &BundleExpr) -> BundleDesc {
    let mut terms: Vec<BundleDesc> = b.terms.iter().map(bterm_desc).collect();
    if terms.len() == 1 {
        terms.pop().expect("one term")
    } else {
        BundleDesc::Sum(terms)
    }
}

fn bterm_desc(t: &BundleTerm) -> BundleDesc {
    let mut atoms: Vec<BundleDesc> = t.atoms.iter().map(batom_desc).collect();
    if atoms.len() == 1 {
        atoms.pop().expect("one atom")
    } else {
        BundleDesc::Tensor(atoms)
    }
}

fn batom_desc(a: &BundleAtom) -> BundleDesc {
    match a {
        BundleAtom::Tangent => BundleDesc::Tangent,
        BundleAtom::Cotangent => BundleDesc::Cotangent,
        BundleAtom::Line(d) => BundleDesc::Line(d.clone()),
        BundleAtom::Det(b) => BundleDesc::Det(Box::new(bundle_desc(b))),
        BundleAtom::Dual(b) => BundleDesc::Dual(Box::new(bundle_desc(b))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::run;
    use super::*;
    use crate::classes::ClassError;
    use num_traits::{One, Zero};

    fn p2() -> BasePresentation {
        BasePresentation::projective(2)
    }

    fn number(text: &str, base: &BasePresentation) -> BigRational {
        run(text, base).unwrap().as_number().unwrap().clone()
    }

    #[test]
    fn counterexample_has_vanishing_top_segre() {
        assert!(number("integrate(s2(T (x) O(-1)))", &p2()).is_zero());
    }

    #[test]
    fn trivial_line_bundle() {
        let v = run("c(O(0))", &p2()).unwrap();
        assert_eq!(v, Value::Class(GradedClass::one(&p2())));
        assert_eq!(v.to_string(), "1");
    }

    #[test]
    fn determinant_of_tangent() {
        assert_eq!(number("integrate(c1(det(T))^2)", &p2()), BigRational::from_integer(9.into()));
    }

    #[test]
    fn tangent_segre_on_quadric() {
        let base: BasePresentation = "P1xP1".parse().unwrap();
        assert_eq!(number("integrate(s2(T))", &base), BigRational::from_integer(4.into()));
    }

    #[test]
    fn tensor_of_two_higher_rank_bundles_is_rejected() {
        let err = run("s2(T (x) T)", &p2()).unwrap_err();
        assert_eq!(err, ExprError::Semantic(ClassError::UnsupportedTensor));
        assert!(err.to_string().contains("tensor of two higher-rank bundles"));
    }

    #[test]
    fn chern_times_segre_is_one() {
        let v = run("c(T (+) O(2)) * s(T (+) O(2))", &p2()).unwrap();
        assert!(v.as_class().unwrap() == &GradedClass::one(&p2()));
        assert!(number("integrate(c(T) * s(T) - c(O(0)))", &p2()).is_zero());
        assert!(BigRational::one() == number("integrate(c1(O(1))^2)", &p2()));
    }

    #[test]
    fn huge_exponent_terminates() {
        assert!(number("integrate(c(T)^4000000000)", &p2()) > BigRational::zero());
    }
}

//! Exact arithmetic substrate: rationals, sparse multivariate polynomials,
//! rational functions and monomial orders.

mod monomial;
mod order;
mod poly;
mod ratfun;
mod rational;
mod var;

pub use monomial::Monomial;
pub use order::{mono_cmp, Layout, OrderBlock, OrderKind, TermOrder};
pub use poly::{gcd, grevlex_cmp, lex_cmp, Poly};
pub use ratfun::{ratfun_normalize, RatFun};
pub use rational::{int, rat, Rational};
pub use var::{Name, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("zero denominator")]
    ZeroDenominator,
}

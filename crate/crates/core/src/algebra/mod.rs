//! Exact arithmetic over the rationals and over fields of rational functions
//! in a finite set of named symbols.
//!
//! Both solvers in this crate must produce bit-exact canonical results, so
//! every value is either an arbitrary-precision [`Rational`] or a
//! [`RationalFunction`] whose numerator and denominator are sparse
//! multivariate polynomials over a [`SymbolTable`]. No floating point exists
//! anywhere in the pipeline.

pub mod expr;
pub mod matrix;
mod monomial;
mod poly;
mod ratfun;
mod scalar;
pub mod trig;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use monomial::Monomial;
pub use poly::Polynomial;
pub use ratfun::RationalFunction;
pub use scalar::{Bindings, Scalar};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator (zero is 0/1). `num::BigRational` maintains exactly that
/// canonical form.
pub type Rational = num::BigRational;

/// Arbitrary-precision integer.
pub type Integer = num::BigInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("denominator vanishes at the given binding")]
    ZeroDenominator,
    #[error("invalid symbol name `{0}`")]
    InvalidSymbolName(String),
    #[error("singular system: rows {0:?} are dependent on the others")]
    SingularSystem(Vec<usize>),
    #[error("internal error: solution failed back-substitution verification")]
    VerificationFailed,
}

/// Index of a symbol in its [`SymbolTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

/// Interned symbol names, unique within one mechanism or one solver run.
///
/// A [`Scalar`] only stores symbol indices; the table that created it is
/// needed again to print it or to bind values by name.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, interning it if new. Names must start with
    /// a letter and contain only letters, digits and underscores.
    pub fn intern(&mut self, name: &str) -> Result<SymbolId, AlgebraError> {
        if !valid_symbol_name(name) {
            return Err(AlgebraError::InvalidSymbolName(name.to_string()));
        }
        if let Some(&i) = self.index.get(name) {
            return Ok(SymbolId(i));
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        Ok(SymbolId(i))
    }

    pub fn get(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).map(|&i| SymbolId(i))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Symbol names in declaration order.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }
}

fn valid_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a standalone rational: `7`, `-3/2` or a plain decimal like `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::InvalidSymbolName(format!("not a rational: `{text}`"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: Integer = num.trim().parse().map_err(|_| bad())?;
        let d: Integer = den.trim().parse().map_err(|_| bad())?;
        if d == Integer::from(0) {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Rational::new(n, d))
    } else if let Some((whole, frac)) = text.split_once('.') {
        let digits = format!("{whole}{frac}");
        let n: Integer = digits.parse().map_err(|_| bad())?;
        let d = Integer::from(10u32).pow(frac.len() as u32);
        Ok(Rational::new(n, d))
    } else {
        let n: Integer = text.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

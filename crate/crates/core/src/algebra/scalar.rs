use std::fmt;

use num::{One, Signed, Zero};

use super::poly::Polynomial;
use super::ratfun::RationalFunction;
use super::{AlgebraError, Rational, SymbolId, SymbolTable};

/// A value in the exact field: either a plain rational or a rational
/// function in the symbols of one table.
///
/// The symbolic variant never holds a value whose numerator and denominator
/// are both constants — operations demote those to `Rational`. Values are
/// immutable and all operations are pure; values from different symbol
/// tables must not be mixed (the table is needed again only for printing
/// and binding names).
#[derive(Debug, Clone)]
pub enum Scalar {
    Rational(Rational),
    Symbolic(RationalFunction),
}

// Equality is semantic: a symbolic value that happens to be a non-reduced
// constant (e.g. (x+1)/(x+1) from cancellation outside the monomial domain)
// still compares equal to the rational it denotes.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Symbolic(a), Scalar::Symbolic(b)) => a == b,
            (Scalar::Rational(a), Scalar::Symbolic(b)) => {
                RationalFunction::from_rational(a.clone()) == *b
            }
            (Scalar::Symbolic(a), Scalar::Rational(b)) => {
                *a == RationalFunction::from_rational(b.clone())
            }
        }
    }
}

impl Eq for Scalar {}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::Rational(Rational::from_integer(n.into()))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Rational(r)
    }

    pub fn symbol(id: SymbolId) -> Self {
        Scalar::Symbolic(RationalFunction::symbol(id))
    }

    pub fn from_ratfun(rf: RationalFunction) -> Self {
        match rf.as_constant() {
            Some(c) => Scalar::Rational(c),
            None => Scalar::Symbolic(rf),
        }
    }

    pub fn to_ratfun(&self) -> RationalFunction {
        match self {
            Scalar::Rational(r) => RationalFunction::from_rational(r.clone()),
            Scalar::Symbolic(rf) => rf.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            // A symbolic value has a nonzero numerator polynomial, so it is
            // a nonzero field element.
            Scalar::Symbolic(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Symbolic(rf) => rf.numerator() == rf.denominator(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Symbolic(_) => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => Self::from_ratfun(self.to_ratfun().add(&other.to_ratfun())),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => Self::from_ratfun(self.to_ratfun().sub(&other.to_ratfun())),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Symbolic(rf) => Scalar::Symbolic(rf.neg()),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => Self::from_ratfun(self.to_ratfun().mul(&other.to_ratfun())),
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a / b)),
            _ => Ok(Self::from_ratfun(
                self.to_ratfun().checked_div(&other.to_ratfun())?,
            )),
        }
    }

    /// Exact value at a full binding of the symbols.
    pub fn eval(&self, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        match self {
            Scalar::Rational(r) => Ok(r.clone()),
            Scalar::Symbolic(rf) => rf.eval(bindings),
        }
    }

    /// Transports the value into another symbol table (old index -> new id).
    pub fn rename(&self, map: &[SymbolId]) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.clone()),
            Scalar::Symbolic(rf) => Self::from_ratfun(rf.rename(map)),
        }
    }

    pub fn symbols(&self) -> Vec<SymbolId> {
        match self {
            Scalar::Rational(_) => Vec::new(),
            Scalar::Symbolic(rf) => rf.symbols(),
        }
    }

    /// Pivot-selection key: rationals are the smallest, symbolic entries are
    /// ordered by term count then total degree.
    pub fn structural_size(&self) -> (usize, u64) {
        match self {
            Scalar::Rational(_) => (2, 0),
            Scalar::Symbolic(rf) => rf.structural_size(),
        }
    }

    /// Sign of a value that is a rational or a single signed monomial
    /// quotient; `None` for multi-term values, whose sign depends on the
    /// symbol values.
    pub fn monomial_sign(&self) -> Option<i8> {
        match self {
            Scalar::Rational(r) => Some(if r.is_negative() {
                -1
            } else if r.is_zero() {
                0
            } else {
                1
            }),
            Scalar::Symbolic(rf) => {
                let (_, cn) = rf.numerator().as_single_term()?;
                let (_, cd) = rf.denominator().as_single_term()?;
                Some(if cn.is_negative() == cd.is_negative() { 1 } else { -1 })
            }
        }
    }

    /// Canonical display string, e.g. `-3/2`, `-d4/2`, `-(d4*d5)/(d1*d2)`.
    pub fn render(&self, table: &SymbolTable) -> String {
        match self {
            Scalar::Rational(r) => render_rational(r),
            Scalar::Symbolic(rf) => render_ratfun(rf, table),
        }
    }
}

fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_ratfun(rf: &RationalFunction, table: &SymbolTable) -> String {
    // Single-term numerator: pull the sign out and fold the coefficient's
    // denominator into the printed denominator, giving shapes like `-d4/2`
    // and `-(d4*d5)/(d1*d2)`.
    if let Some((mon, coeff)) = rf.numerator().as_single_term() {
        let sign = if coeff.is_negative() { "-" } else { "" };
        let mut num_factors: Vec<String> = Vec::new();
        let p = coeff.numer().abs();
        if !p.is_one() || mon.is_one() {
            num_factors.push(p.to_string());
        }
        num_factors.extend(monomial_factors(mon, table));
        let num_str = join_factors(&num_factors);

        let mut den_factors: Vec<String> = Vec::new();
        let q = coeff.denom().clone();
        if !q.is_one() {
            den_factors.push(q.to_string());
        }
        let den_poly = rf.denominator();
        if den_poly.as_constant() != Some(Rational::one()) {
            // A single-term denominator is split into its factors so the
            // whole product gets one pair of parentheses.
            if let Some((mon, c)) = den_poly.as_single_term() {
                if !c.is_one() {
                    den_factors.push(render_rational(c));
                }
                den_factors.extend(monomial_factors(mon, table));
            } else {
                den_factors.push(render_poly(den_poly, table, true));
            }
        }
        if den_factors.is_empty() {
            return format!("{sign}{num_str}");
        }
        let den_str = join_factors(&den_factors);
        return format!("{sign}{num_str}/{den_str}");
    }
    // General case: (sum)/(sum).
    let num_str = render_poly(rf.numerator(), table, true);
    if rf.denominator().as_constant() == Some(Rational::one()) {
        num_str
    } else {
        format!("{}/{}", num_str, render_poly(rf.denominator(), table, true))
    }
}

fn monomial_factors(mon: &super::monomial::Monomial, table: &SymbolTable) -> Vec<String> {
    mon.factors()
        .map(|(sym, pow)| {
            if pow == 1 {
                table.name(sym).to_string()
            } else {
                format!("{}^{}", table.name(sym), pow)
            }
        })
        .collect()
}

fn join_factors(factors: &[String]) -> String {
    match factors.len() {
        0 => "1".to_string(),
        1 => factors[0].clone(),
        _ => format!("({})", factors.join("*")),
    }
}

/// Renders a polynomial as a sum, terms in descending monomial order.
pub fn render_poly(p: &Polynomial, table: &SymbolTable, parenthesize_sums: bool) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (i, (mon, coeff)) in terms.iter().rev().enumerate() {
        let neg = coeff.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        let c = coeff.abs();
        if !c.is_one() || mon.is_one() {
            factors.push(render_rational(&c));
        }
        factors.extend(monomial_factors(mon, table));
        out.push_str(&factors.join("*"));
    }
    if parenthesize_sums && terms.len() > 1 {
        format!("({out})")
    } else {
        out
    }
}

/// Values for every symbol of one table, addressed by id or name.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    names: Vec<String>,
    values: Vec<Option<Rational>>,
}

impl Bindings {
    pub fn new(table: &SymbolTable) -> Self {
        Bindings {
            names: table.names().map(str::to_string).collect(),
            values: vec![None; table.len()],
        }
    }

    pub fn set(&mut self, id: SymbolId, value: Rational) {
        self.values[id.0 as usize] = Some(value);
    }

    pub fn set_by_name(&mut self, name: &str, value: Rational) -> Result<(), AlgebraError> {
        match self.names.iter().position(|n| n == name) {
            Some(i) => {
                self.values[i] = Some(value);
                Ok(())
            }
            None => Err(AlgebraError::UnboundSymbol(name.to_string())),
        }
    }

    pub fn value(&self, id: SymbolId) -> Result<&Rational, AlgebraError> {
        self.values
            .get(id.0 as usize)
            .and_then(|v| v.as_ref())
            .ok_or_else(|| {
                let name = self
                    .names
                    .get(id.0 as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("#{}", id.0));
                AlgebraError::UnboundSymbol(name)
            })
    }

    /// First symbol of the table that has no value, if any.
    pub fn missing(&self) -> Option<&str> {
        self.values
            .iter()
            .position(|v| v.is_none())
            .map(|i| self.names[i].as_str())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.names
            .iter()
            .zip(self.values.iter())
            .filter_map(|(n, v)| v.as_ref().map(|v| (n.as_str(), v)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", render_rational(r)),
            Scalar::Symbolic(_) => write!(f, "<symbolic>"),
        }
    }
}

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::monomial::Monomial;
use super::scalar::Bindings;
use super::{AlgebraError, Rational, SymbolId};

/// Sparse multivariate polynomial with rational coefficients.
///
/// Canonical form: the term map never stores a zero coefficient, so two equal
/// polynomials have identical term maps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn symbol(id: SymbolId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::symbol(id), Rational::one());
        Polynomial { terms }
    }

    pub fn term(mon: Monomial, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mon, coeff);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// `Some((monomial, coeff))` if the polynomial has exactly one term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Leading term under the graded-lex monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Polynomial { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let entry = terms.entry(m.clone()).or_insert_with(Rational::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&m);
                }
            }
        }
        Polynomial { terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    /// Positive gcd of all coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut it = self.terms.values();
        let first = match it.next() {
            Some(c) => c.abs(),
            None => return Rational::zero(),
        };
        it.fold(first, |acc, c| rational_gcd(&acc, &c.abs()))
    }

    /// Greatest monomial dividing every term; 1 for the zero polynomial.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }

    /// Divides every term by `mon`; panics if some term is not divisible
    /// (callers divide only by the monomial content).
    pub fn div_monomial(&self, mon: &Monomial) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        m.checked_div(mon).expect("monomial divides every term"),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (sym, pow) in m.factors() {
                let v = bindings.value(sym)?;
                for _ in 0..pow {
                    t *= v;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Transports the polynomial into another symbol table via `map`
    /// (old index -> new id).
    pub fn rename(&self, map: &[SymbolId]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out = out.add(&Self::term(m.rename(map), c.clone()));
        }
        out
    }

    /// Symbols that actually occur.
    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut ids: Vec<SymbolId> = Vec::new();
        for m in self.terms.keys() {
            for (sym, _) in m.factors() {
                if !ids.contains(&sym) {
                    ids.push(sym);
                }
            }
        }
        ids.sort();
        ids
    }
}

pub(crate) fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    use num::Integer as _;
    // gcd(p1/q1, p2/q2) = gcd(p1, p2) / lcm(q1, q2)
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

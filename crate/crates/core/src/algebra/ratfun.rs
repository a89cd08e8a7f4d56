use num::{Signed, Zero};

use super::poly::Polynomial;
use super::scalar::Bindings;
use super::{AlgebraError, Rational, SymbolId};

/// Quotient of two sparse polynomials.
///
/// Normalization divides numerator and denominator by their common monomial
/// factor and scales both so the denominator has content 1 and a positive
/// leading coefficient. Gear-train eliminations only ever produce monomial
/// denominators, for which this is a full canonical form; equality is decided
/// by cross-multiplication regardless, so the representation never lies.
#[derive(Debug, Clone)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_polynomial(num: Polynomial) -> Self {
        Self::normalized(num, Polynomial::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn symbol(id: SymbolId) -> Self {
        Self::from_polynomial(Polynomial::symbol(id))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Polynomial::one(),
            };
        }
        // Common monomial factor.
        let mg = num.monomial_content().gcd(&den.monomial_content());
        let (mut num, mut den) = if mg.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&mg), den.div_monomial(&mg))
        };
        // Scale so den has content 1 and positive leading coefficient.
        let mut scale = den.content();
        let (_, lead) = den.leading().expect("nonzero denominator");
        if lead.is_negative() {
            scale = -scale;
        }
        let inv = scale.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
        RationalFunction { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(c)` when the value is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::normalized(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn checked_recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<Rational, AlgebraError> {
        let den = self.den.eval(bindings)?;
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(self.num.eval(bindings)? / den)
    }

    pub fn rename(&self, map: &[SymbolId]) -> Self {
        Self::normalized(self.num.rename(map), self.den.rename(map))
    }

    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut ids = self.num.symbols();
        for id in self.den.symbols() {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids.sort();
        ids
    }

    /// Structural size used by the solver's pivot heuristic:
    /// (term count, total degree) across numerator and denominator.
    pub fn structural_size(&self) -> (usize, u64) {
        (
            self.num.term_count() + self.den.term_count(),
            self.num.total_degree() + self.den.total_degree(),
        )
    }
}

// Semantic equality by cross-multiplication: exact even if two equal values
// were reduced differently.
impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.num == other.num && self.den == other.den {
            return true;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunction {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(i: u32) -> RationalFunction {
        RationalFunction::symbol(SymbolId(i))
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn monomial_quotients_cancel() {
        // (d4/d1) * (d1/d4) == 1
        let a = sym(0).checked_div(&sym(1)).unwrap();
        let b = sym(1).checked_div(&sym(0)).unwrap();
        let one = a.mul(&b);
        assert_eq!(one.as_constant(), Some(rat(1, 1)));
    }

    #[test]
    fn canonical_denominator_is_positive() {
        // x / (-2y) normalizes to (-1/2 x) / y
        let f = RationalFunction::new(
            Polynomial::symbol(SymbolId(0)),
            Polynomial::symbol(SymbolId(1)).scale(&rat(-2, 1)),
        )
        .unwrap();
        assert_eq!(f.denominator(), &Polynomial::symbol(SymbolId(1)));
        assert_eq!(
            f.numerator(),
            &Polynomial::symbol(SymbolId(0)).scale(&rat(-1, 2))
        );
    }

    #[test]
    fn division_by_zero_is_explicit() {
        let z = RationalFunction::from_rational(rat(0, 1));
        assert!(sym(0).checked_div(&z).is_err());
        assert!(RationalFunction::new(Polynomial::one(), Polynomial::zero()).is_err());
    }

    #[test]
    fn cross_multiplied_equality() {
        // (x^2 - y^2)/(x - y) == (x + y)/1 even though reps differ
        let x = Polynomial::symbol(SymbolId(0));
        let y = Polynomial::symbol(SymbolId(1));
        let a = RationalFunction::new(x.mul(&x).sub(&y.mul(&y)), x.sub(&y)).unwrap();
        let b = RationalFunction::from_polynomial(x.add(&y));
        assert_eq!(a, b);
    }
}

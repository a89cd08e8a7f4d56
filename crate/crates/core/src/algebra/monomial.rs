use std::cmp::Ordering;

use super::SymbolId;

/// Power product of symbols, stored as a dense exponent vector with trailing
/// zeros trimmed. Symbol tables here are small (a couple of dozen entries at
/// most), so the dense form keeps ordering and comparison cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(id: SymbolId) -> Self {
        let mut exps = vec![0; id.0 as usize + 1];
        exps[id.0 as usize] = 1;
        Monomial(exps)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn exponent(&self, id: SymbolId) -> u32 {
        self.0.get(id.0 as usize).copied().unwrap_or(0)
    }

    /// Non-zero exponents as `(symbol, power)` pairs in table order.
    pub fn factors(&self) -> impl Iterator<Item = (SymbolId, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (SymbolId(i as u32), e))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut exps = vec![0; n];
        for (i, e) in exps.iter_mut().enumerate() {
            *e = self.exponent(SymbolId(i as u32)) + other.exponent(SymbolId(i as u32));
        }
        Self::trimmed(exps)
    }

    /// Exact division; `None` when some exponent of `other` exceeds ours.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let n = self.0.len().max(other.0.len());
        let mut exps = vec![0; n];
        for (i, e) in exps.iter_mut().enumerate() {
            let a = self.exponent(SymbolId(i as u32));
            let b = other.exponent(SymbolId(i as u32));
            if b > a {
                return None;
            }
            *e = a - b;
        }
        Some(Self::trimmed(exps))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let n = self.0.len().min(other.0.len());
        let exps = (0..n)
            .map(|i| self.0[i].min(other.0[i]))
            .collect::<Vec<_>>();
        Self::trimmed(exps)
    }

    /// Re-indexes every symbol through `map` (old index -> new id).
    pub fn rename(&self, map: &[SymbolId]) -> Self {
        let mut out = Monomial::one();
        for (sym, pow) in self.factors() {
            let new = map[sym.0 as usize];
            let mut m = Monomial::symbol(new);
            for _ in 1..pow {
                m = m.mul(&Monomial::symbol(new));
            }
            out = out.mul(&m);
        }
        out
    }

    fn trimmed(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }
}

// Graded lexicographic order: first by total degree, then lexicographically
// by exponents in table order. Any fixed total order would do; this one makes
// printed polynomials read naturally.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let n = self.0.len().max(other.0.len());
                for i in 0..n {
                    let a = self.exponent(SymbolId(i as u32));
                    let b = other.exponent(SymbolId(i as u32));
                    match a.cmp(&b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_div_roundtrip() {
        let a = Monomial::symbol(SymbolId(0)).mul(&Monomial::symbol(SymbolId(2)));
        let b = Monomial::symbol(SymbolId(2));
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q, Monomial::symbol(SymbolId(0)));
        assert_eq!(q.mul(&b), a);
        assert!(b.checked_div(&a).is_none());
    }

    #[test]
    fn trailing_zeros_are_canonical() {
        let a = Monomial::symbol(SymbolId(3));
        let q = a.checked_div(&a).unwrap();
        assert!(q.is_one());
        assert_eq!(q, Monomial::one());
    }

    #[test]
    fn graded_lex_order() {
        let x = Monomial::symbol(SymbolId(0));
        let y = Monomial::symbol(SymbolId(1));
        let xy = x.mul(&y);
        assert!(xy > x);
        assert!(x > y); // same degree, earlier symbol has the larger exponent
        assert!(y < x.mul(&x));
    }
}

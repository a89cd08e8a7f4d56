//! Parser for the coordinate/diameter expression strings of the mechanism
//! file: rationals, symbols, `+ - * /`, unary minus and parentheses. Just
//! expressive enough for entries like `-(d1 + d4)/2` or `A1 - d2/2`.

use thiserror::Error;

use super::{AlgebraError, Integer, Rational, Scalar, SymbolTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("expression error at byte {pos}: {msg}")]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

/// Parses `text` into a [`Scalar`], interning any new symbol names.
pub fn parse(text: &str, table: &mut SymbolTable) -> Result<Scalar, ExprError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        table,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    table: &'a mut SymbolTable,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek() {
            match op {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ExprError> {
        let mut acc = self.factor()?;
        while let Some(op) = self.peek() {
            match op {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                b'/' => {
                    self.pos += 1;
                    let pos = self.pos;
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).map_err(|e| match e {
                        AlgebraError::DivisionByZero => ExprError {
                            pos,
                            msg: "division by zero".to_string(),
                        },
                        other => ExprError {
                            pos,
                            msg: other.to_string(),
                        },
                    })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Scalar, ExprError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.symbol(),
            _ => Err(self.error("expected a number, symbol or `(`")),
        }
    }

    fn number(&mut self) -> Result<Scalar, ExprError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        let whole: Integer = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("invalid integer"))?;
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let fstart = self.pos;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_digit())
            {
                self.pos += 1;
            }
            if self.pos == fstart {
                return Err(self.error("expected digits after `.`"));
            }
            let frac_str = std::str::from_utf8(&self.bytes[fstart..self.pos]).unwrap();
            let frac: Integer = frac_str.parse().map_err(|_| self.error("invalid number"))?;
            let scale = Integer::from(10u32).pow(frac_str.len() as u32);
            let value = Rational::from_integer(whole) + Rational::new(frac, scale);
            return Ok(Scalar::from_rational(value));
        }
        Ok(Scalar::from_rational(Rational::from_integer(whole)))
    }

    fn symbol(&mut self) -> Result<Scalar, ExprError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let id = self.table.intern(name).map_err(|e| ExprError {
            pos: start,
            msg: e.to_string(),
        })?;
        Ok(Scalar::symbol(id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_table_style_entries() {
        let mut t = SymbolTable::new();
        let v = parse("-(d1 + d4)/2", &mut t).unwrap();
        let d1 = Scalar::symbol(t.get("d1").unwrap());
        let d4 = Scalar::symbol(t.get("d4").unwrap());
        let expected = d1
            .add(&d4)
            .neg()
            .checked_div(&Scalar::from_integer(2))
            .unwrap();
        assert_eq!(v, expected);

        let v = parse("A1 - d2/2", &mut t).unwrap();
        let a1 = Scalar::symbol(t.get("A1").unwrap());
        let d2 = Scalar::symbol(t.get("d2").unwrap());
        assert_eq!(
            v,
            a1.sub(&d2.checked_div(&Scalar::from_integer(2)).unwrap())
        );
    }

    #[test]
    fn parses_numbers() {
        let mut t = SymbolTable::new();
        assert_eq!(parse("0", &mut t).unwrap(), Scalar::zero());
        assert_eq!(
            parse("3/4", &mut t).unwrap(),
            Scalar::from_rational(rat(3, 4))
        );
        assert_eq!(
            parse("2.5", &mut t).unwrap(),
            Scalar::from_rational(rat(5, 2))
        );
        assert_eq!(parse("-2*3", &mut t).unwrap(), Scalar::from_integer(-6));
    }

    #[test]
    fn rejects_garbage() {
        let mut t = SymbolTable::new();
        assert!(parse("", &mut t).is_err());
        assert!(parse("d1 +", &mut t).is_err());
        assert!(parse("(d1", &mut t).is_err());
        assert!(parse("d1 d2", &mut t).is_err());
        assert!(parse("1/0", &mut t).is_err());
    }

    #[test]
    fn symbols_are_interned_in_encounter_order() {
        let mut t = SymbolTable::new();
        parse("B2 + A1", &mut t).unwrap();
        let names: Vec<_> = t.names().collect();
        assert_eq!(names, vec!["B2", "A1"]);
    }
}

//! Numeric parameters written as small arithmetic expressions such as
//! `pi/2`, `3*pi/4` or `sqrt(2)`.

use std::f64::consts::PI;
use std::iter::Peekable;
use std::str::Chars;

struct Parser<'a> {
    chars: Peekable<Chars<'a>>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.peek() {
            Some(d) if d == c => {
                self.chars.next();
                Ok(())
            }
            other => Err(format!("expected '{c}', found {other:?}")),
        }
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.chars.next();
            let rhs = self.term()?;
            v = if op == '+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    v *= self.factor()?;
                }
                Some('/') => {
                    self.chars.next();
                    v /= self.factor()?;
                }
                // implicit product, as in `3pi`
                Some(c) if c.is_ascii_alphabetic() || c == '(' => v *= self.factor()?,
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('-') => {
                self.chars.next();
                Ok(-self.factor()?)
            }
            Some('+') => {
                self.chars.next();
                self.factor()
            }
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = self.chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                    name.push(c);
                    self.chars.next();
                }
                match name.as_str() {
                    "pi" | "PI" => Ok(PI),
                    "sqrt" => {
                        self.expect('(')?;
                        let v = self.expr()?;
                        self.expect(')')?;
                        Ok(v.sqrt())
                    }
                    _ => Err(format!("unknown name '{name}'")),
                }
            }
            other => Err(format!("unexpected {other:?}")),
        }
    }

    fn number(&mut self) -> Result<f64, String> {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            let exponent_sign = (c == '-' || c == '+') && s.ends_with(['e', 'E']);
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exponent_sign {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        s.parse().map_err(|_| format!("bad number '{s}'"))
    }
}

/// Evaluates an expression over numbers, `pi`, `sqrt(.)`, `+ - * /` and
/// parentheses.
pub fn eval(text: &str) -> Result<f64, String> {
    let mut p = Parser {
        chars: text.chars().peekable(),
    };
    let v = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(format!("trailing input at '{c}'"));
    }
    if !v.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn common_angles() {
        assert_eq!(eval("pi/2").unwrap(), PI / 2.0);
        assert_eq!(eval("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(eval("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(eval("sqrt(2)").unwrap(), 2f64.sqrt());
        assert_eq!(eval("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(eval(" -0.5 + 2e-1 ").unwrap(), -0.3);
        assert_eq!(eval("2*(pi - 1)").unwrap(), 2.0 * (PI - 1.0));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pi/", "tau", "1/0", "sqrt(2", "2 3", "1..2"] {
            assert!(eval(bad).is_err(), "{bad}");
        }
    }
}

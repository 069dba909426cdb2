//! Literal grammar shared by polynomials, boundary points and the CLI.
//!
//! A coefficient list is a comma-separated sequence of complex literals,
//! highest degree first. A complex literal is one of `a`, `ai`, `a+bi`,
//! `a-bi` where `a` and `b` are decimal reals (optional sign, fraction and
//! exponent). A bare `i` or `-i` is accepted as the unit imaginary.
//! Whitespace around items is ignored.

use std::fmt;

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input where the problem was found.
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }

    pub fn shifted(mut self, offset: usize) -> Self {
        self.position += offset;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// Unsigned decimal real: digits[.digits][e[+-]digits], or .digits...
    fn unsigned_real(&mut self) -> Option<f64> {
        let start = self.pos;
        let mut digits = 0;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
            digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            self.pos = start;
            return None;
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
    }

    /// Optional sign followed by a real magnitude or a bare `i`.
    /// Returns (value, is_imaginary).
    fn signed_term(&mut self) -> Result<(f64, bool), ParseError> {
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                sign = -1.0;
                self.pos += 1;
            }
            _ => {}
        }
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok((sign, true));
        }
        let at = self.pos;
        let mag = self
            .unsigned_real()
            .ok_or_else(|| ParseError::new(at, "expected a number"))?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok((sign * mag, true));
        }
        Ok((sign * mag, false))
    }

    fn complex(&mut self) -> Result<Complex64, ParseError> {
        let (first, first_im) = self.signed_term()?;
        if first_im {
            return Ok(Complex64::new(0.0, first));
        }
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            let at = self.pos;
            let (second, second_im) = self.signed_term()?;
            if !second_im {
                return Err(ParseError::new(at, "imaginary part must end with 'i'"));
            }
            return Ok(Complex64::new(first, second));
        }
        Ok(Complex64::new(first, 0.0))
    }
}

/// Parses a single complex literal, requiring the whole input to be consumed.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let mut cur = Cursor {
        src: s.as_bytes(),
        pos: 0,
    };
    cur.skip_ws();
    let value = cur.complex()?;
    cur.skip_ws();
    if cur.pos != s.len() {
        return Err(ParseError::new(cur.pos, "unexpected trailing input"));
    }
    check_finite(value, 0)?;
    Ok(value)
}

/// Parses a comma-separated coefficient list.
pub fn parse_coefficient_list(s: &str) -> Result<Vec<Complex64>, ParseError> {
    let mut cur = Cursor {
        src: s.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() || cur.peek() == Some(b',') {
            return Err(ParseError::new(cur.pos, "empty coefficient"));
        }
        let at = cur.pos;
        let value = cur.complex()?;
        check_finite(value, at)?;
        out.push(value);
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(b',') => cur.pos += 1,
            Some(c) => {
                return Err(ParseError::new(
                    cur.pos,
                    format!("unexpected character '{}'", c as char),
                ))
            }
        }
    }
    Ok(out)
}

fn check_finite(z: Complex64, at: usize) -> Result<(), ParseError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(ParseError::new(at, "coefficient is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), Complex64::new(0.0, -2.5));
        assert_eq!(parse_complex("1e-3+4i").unwrap(), Complex64::new(1e-3, 4.0));
        assert_eq!(parse_complex("1-i").unwrap(), Complex64::new(1.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex(" .5 ").unwrap(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_coefficient_list("1,x,2").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_coefficient_list("1,,2").unwrap_err();
        assert_eq!(e.position, 2);
        let e = parse_coefficient_list("1,2+3").unwrap_err();
        assert_eq!(e.position, 3);
        let e = parse_coefficient_list("1,2;").unwrap_err();
        assert_eq!(e.position, 3);
        assert!(parse_coefficient_list("").is_err());
    }

    #[test]
    fn list_with_spaces() {
        let v = parse_coefficient_list(" 1 , 0 ,-6").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], Complex64::new(-6.0, 0.0));
    }
}

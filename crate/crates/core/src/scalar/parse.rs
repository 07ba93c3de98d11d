use std::fmt;

use super::Scalar;

/// A parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }

    /// Shifts the position, for errors raised on a substring.
    pub fn offset(mut self, by: usize) -> Self {
        self.position += by;
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn parse_scalar(input: &str) -> Result<Scalar, ParseError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let value = p.scalar()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ParseError::new(
            p.pos,
            format!("unexpected character {:?}", p.src[p.pos] as char),
        ));
    }
    Ok(value)
}

// scalar  := factor ('*' factor)*
// factor  := '-'? atom ('^' integer)?
// atom    := 'u(' integer '/' positive_integer ')' | identifier | '1' | '(' scalar ')'
//
// A leading '-' negates the whole factor, so `-z^2` is `-(z^2)`.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(ParseError::new(
                self.pos,
                format!("expected {:?}, found {:?}", c as char, x as char),
            )),
            None => Err(ParseError::new(
                self.pos,
                format!("expected {:?}, found end of input", c as char),
            )),
        }
    }

    fn scalar(&mut self) -> Result<Scalar, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc *= &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Scalar, ParseError> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut value = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            value = value.pow(self.integer()?);
        }
        if negate {
            value *= &Scalar::minus_one();
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<Scalar, ParseError> {
        let start = match self.peek() {
            None => return Err(ParseError::new(self.pos, "unexpected end of input")),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let inner = self.scalar()?;
            self.expect(b')')?;
            return Ok(inner);
        }
        if c.is_ascii_digit() {
            let digits = self.digits();
            if digits != "1" {
                return Err(ParseError::new(
                    start,
                    format!("integer literal {digits} is not a unit; only 1 and -1 are admissible"),
                ));
            }
            return Ok(Scalar::one());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let ident = self.identifier();
            if ident == "u" && self.peek() == Some(b'(') {
                self.pos += 1;
                let p = self.integer()?;
                self.expect(b'/')?;
                self.skip_ws();
                let den_pos = self.pos;
                let r = self.integer()?;
                if r <= 0 {
                    return Err(ParseError::new(
                        den_pos,
                        "root denominator must be positive",
                    ));
                }
                self.expect(b')')?;
                return Ok(Scalar::root_of_unity(p, r as u64));
            }
            return Ok(Scalar::param(&ident));
        }
        Err(ParseError::new(
            start,
            format!("unexpected character {:?}", c as char),
        ))
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits = self.digits();
        if digits.is_empty() {
            return Err(ParseError::new(start, "expected an integer"));
        }
        let value: i64 = digits
            .parse()
            .map_err(|_| ParseError::new(start, format!("integer {digits} out of range")))?;
        Ok(if negative { -value } else { value })
    }
}

//! Operator-expression parser. Grammar:
//!   expr   := ['-'] term (('+' | '-') term)*
//!   term   := factor factor*            (juxtaposition = composition)
//!   factor := INT | INT '/' INT | 'z' IDX? ('^' INT)? | 'd' IDX? ('^' INT)?
//!           | '(' expr ')' | '(1/z)'
//! Composition is non-commutative and left-associative; the result is a
//! normal-ordered operator. The (1/z) token is admitted only when Laurent
//! coefficients are allowed (the classify context).

use lefschetz_core::weyl::FormalDiffOp;
use lefschetz_core::Cyclotomic;
use std::fmt;

#[derive(Debug, Clone)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Rat(i64, i64),
    Z(Option<usize>),
    D(Option<usize>),
    Pow,
    Plus,
    Minus,
    LParen,
    RParen,
    InvZ,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Pow, i));
                i += 1;
            }
            '(' => {
                if src[i..].starts_with("(1/z)") {
                    out.push((Tok::InvZ, i));
                    i += 5;
                } else {
                    out.push((Tok::LParen, i));
                    i += 1;
                }
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            'z' | 'd' => {
                let start = i;
                i += 1;
                let idx = if i < b.len() && (b[i] as char).is_ascii_digit() {
                    let v = (b[i] - b'0') as usize;
                    i += 1;
                    Some(v)
                } else {
                    None
                };
                out.push((if c == 'z' { Tok::Z(idx) } else { Tok::D(idx) }, start));
            }
            '0'..='9' => {
                let start = i;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = src[start..i].parse().map_err(|_| ParseError {
                    pos: start,
                    msg: "integer literal overflows".into(),
                })?;
                if i < b.len() && b[i] == b'/' {
                    let dstart = i + 1;
                    let mut j = dstart;
                    while j < b.len() && (b[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    if j == dstart {
                        return Err(ParseError {
                            pos: i,
                            msg: "expected digits after '/'".into(),
                        });
                    }
                    let d: i64 = src[dstart..j].parse().map_err(|_| ParseError {
                        pos: dstart,
                        msg: "integer literal overflows".into(),
                    })?;
                    if d == 0 {
                        return Err(ParseError {
                            pos: dstart,
                            msg: "zero denominator".into(),
                        });
                    }
                    out.push((Tok::Rat(n, d), start));
                    i = j;
                } else {
                    out.push((Tok::Int(n), start));
                }
            }
            _ => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character '{}'", c),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    at: usize,
    end: usize,
    allow_inv_z: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<FormalDiffOp, ParseError> {
        let negate = matches!(self.peek(), Some(Tok::Minus));
        if negate {
            self.bump();
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.scale(&Cyclotomic::from_int(-1));
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<FormalDiffOp, ParseError> {
        let mut acc = self.factor()?;
        while matches!(
            self.peek(),
            Some(Tok::Int(_) | Tok::Rat(_, _) | Tok::Z(_) | Tok::D(_) | Tok::LParen | Tok::InvZ)
        ) {
            let f = self.factor()?;
            acc = acc.compose(&f).map_err(|e| ParseError {
                pos: self.pos(),
                msg: format!("composition failed: {}", e),
            })?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if matches!(self.peek(), Some(Tok::Pow)) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(n)) if n >= 0 => Ok(n as u32),
                _ => Err(self.err("expected a non-negative integer exponent")),
            }
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<FormalDiffOp, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(FormalDiffOp::constant(1, Cyclotomic::from_int(n))),
            Some(Tok::Rat(n, d)) => Ok(FormalDiffOp::constant(1, Cyclotomic::from_ratio(n, d))),
            Some(Tok::Z(idx)) => {
                if matches!(idx, Some(i) if i != 1) {
                    return Err(ParseError {
                        pos,
                        msg: "only one variable is supported here".into(),
                    });
                }
                let e = self.exponent()?;
                Ok(FormalDiffOp::scalar_monomial(
                    1,
                    vec![e as i64],
                    vec![0],
                    Cyclotomic::one(),
                ))
            }
            Some(Tok::D(idx)) => {
                if matches!(idx, Some(i) if i != 1) {
                    return Err(ParseError {
                        pos,
                        msg: "only one variable is supported here".into(),
                    });
                }
                let e = self.exponent()?;
                Ok(FormalDiffOp::scalar_monomial(
                    1,
                    vec![0],
                    vec![e],
                    Cyclotomic::one(),
                ))
            }
            Some(Tok::InvZ) => {
                if !self.allow_inv_z {
                    return Err(ParseError {
                        pos,
                        msg: "(1/z) is only admitted under classify".into(),
                    });
                }
                Ok(FormalDiffOp::scalar_monomial(
                    1,
                    vec![-1],
                    vec![0],
                    Cyclotomic::one(),
                ))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError {
                        pos,
                        msg: "unclosed parenthesis".into(),
                    }),
                }
            }
            _ => Err(ParseError {
                pos,
                msg: "expected a factor".into(),
            }),
        }
    }
}

/// Parses an operator expression; set `allow_inv_z` in the classify context.
pub fn parse_operator(src: &str, allow_inv_z: bool) -> Result<FormalDiffOp, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks: &toks,
        at: 0,
        end: src.len(),
        allow_inv_z,
    };
    let op = p.expr()?;
    if p.at != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(op)
}

/// Prints a normal-ordered scalar operator in the CLI grammar; errors if some
/// coefficient is not rational.
pub fn print_operator(op: &FormalDiffOp) -> Result<String, String> {
    if op.is_zero() {
        return Ok("0".into());
    }
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (m, c) in op.terms() {
        let s = c.get(0, 0);
        let r = s
            .as_rational()
            .ok_or_else(|| format!("non-rational coefficient {}", s))?;
        let neg = r < num::rational::BigRational::from_integer(0.into());
        let mag = if neg { -r.clone() } else { r.clone() };
        let mut piece = String::new();
        let coeff_is_one = mag == num::rational::BigRational::from_integer(1.into());
        if !coeff_is_one || m.is_identity() {
            if mag.is_integer() {
                piece.push_str(&mag.numer().to_string());
            } else {
                piece.push_str(&format!("{}/{}", mag.numer(), mag.denom()));
            }
            if !m.is_identity() {
                piece.push(' ');
            }
        }
        if m.pos[0] != 0 {
            piece.push('z');
            if m.pos[0] != 1 {
                piece.push_str(&format!("^{}", m.pos[0]));
            }
            if m.der[0] != 0 {
                piece.push(' ');
            }
        }
        if m.der[0] != 0 {
            piece.push('d');
            if m.der[0] != 1 {
                piece.push_str(&format!("^{}", m.der[0]));
            }
        }
        parts.push((neg, piece));
    }
    let mut out = String::new();
    for (i, (neg, piece)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(piece);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zd() -> FormalDiffOp {
        FormalDiffOp::scalar_monomial(1, vec![1], vec![1], Cyclotomic::one())
    }

    #[test]
    fn basic_forms() {
        assert_eq!(parse_operator("z d", false).unwrap(), zd());
        let want = FormalDiffOp::scalar_monomial(1, vec![2], vec![2], Cyclotomic::one()).add(&zd());
        assert_eq!(parse_operator("z^2 d^2 + z d", false).unwrap(), want);
    }

    #[test]
    fn normal_ordering() {
        // d z = z d + 1
        let want = zd().add(&FormalDiffOp::identity(1, 1));
        assert_eq!(parse_operator("d z", false).unwrap(), want);
    }

    #[test]
    fn rationals_and_negation() {
        let half_d = FormalDiffOp::scalar_monomial(1, vec![0], vec![1], Cyclotomic::from_ratio(1, 2));
        assert_eq!(parse_operator("1/2 d", false).unwrap(), half_d);
        let neg = parse_operator("-z d", false).unwrap();
        assert_eq!(neg, zd().scale(&Cyclotomic::from_int(-1)));
    }

    #[test]
    fn inv_z_gating() {
        assert!(parse_operator("(1/z) d", false).is_err());
        let p = parse_operator("(1/z) d", true).unwrap();
        assert_eq!(
            p,
            FormalDiffOp::scalar_monomial(1, vec![-1], vec![1], Cyclotomic::one())
        );
    }

    #[test]
    fn error_positions() {
        let e = parse_operator("z ?", false).unwrap_err();
        assert_eq!(e.pos, 2);
        let e = parse_operator("(z d", false).unwrap_err();
        assert!(e.msg.contains("unclosed") || e.msg.contains("factor"));
    }

    #[test]
    fn print_round_trip() {
        for src in [
            "z d",
            "z^2 d^2 + z d",
            "d z",
            "2 z^3 d - 1/2 d^2 + 5",
            "- z + d",
        ] {
            let op = parse_operator(src, false).unwrap();
            let printed = print_operator(&op).unwrap();
            let reparsed = parse_operator(&printed, false).unwrap();
            assert_eq!(op, reparsed, "src={} printed={}", src, printed);
        }
    }
}

//! Text grammar for polynomials.
//!
//! Terms are separated by `+`/`-`; a term is an optional rational, decimal or
//! `a/b` literal (suffix `i` for imaginary), followed by factors `z<i>` or
//! `z<i>^<e>` separated by whitespace or `*`. Variables are `z1..zd`.

use num_traits::One;

use super::{HomogeneousPolynomial, MultiIndex, Polynomial};
use crate::scalar::{parse_rat, GaussRat, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Number(GaussRat),
    Var(usize, u32),
}

fn tokenize(text: &str, d: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut pos = 0usize;
    while pos < chars.len() {
        let c = chars[pos];
        match c {
            ' ' | '\t' | '\n' | '\r' | '*' => {
                pos += 1;
            }
            '+' => {
                out.push(Token::Plus);
                pos += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                pos += 1;
            }
            'i' => {
                if pos + 1 < chars.len() && chars[pos + 1].is_ascii_alphanumeric() {
                    return Err(Error::Parse(format!(
                        "unexpected identifier at position {pos}"
                    )));
                }
                out.push(Token::Number(GaussRat::new(
                    Rat::from_integer(0.into()),
                    Rat::one(),
                )));
                pos += 1;
            }
            'z' => {
                pos += 1;
                let start = pos;
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(Error::Parse(
                        "variable without an index (expected z1..zd)".into(),
                    ));
                }
                let idx: usize = chars[start..pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("bad variable index".into()))?;
                if idx == 0 || idx > d {
                    return Err(Error::IndexOutOfRange(format!(
                        "variable z{idx} outside z1..z{d}"
                    )));
                }
                let mut exp = 1u32;
                if pos < chars.len() && chars[pos] == '^' {
                    pos += 1;
                    let estart = pos;
                    while pos < chars.len() && chars[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if estart == pos {
                        return Err(Error::Parse("missing exponent after ^".into()));
                    }
                    exp = chars[estart..pos]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| Error::Parse("bad exponent".into()))?;
                }
                out.push(Token::Var(idx, exp));
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = pos;
                while pos < chars.len()
                    && (chars[pos].is_ascii_digit()
                        || chars[pos] == '.'
                        || chars[pos] == '/'
                        || (chars[pos] == 'e'
                            && pos + 1 < chars.len()
                            && (chars[pos + 1].is_ascii_digit()
                                || chars[pos + 1] == '+'
                                || chars[pos + 1] == '-'))
                        || ((chars[pos] == '+' || chars[pos] == '-')
                            && pos > start
                            && chars[pos - 1] == 'e'))
                {
                    pos += 1;
                }
                let lit: String = chars[start..pos].iter().collect();
                let value = parse_number(&lit)?;
                let imag = pos < chars.len() && chars[pos] == 'i';
                if imag {
                    pos += 1;
                }
                out.push(Token::Number(if imag {
                    GaussRat::new(Rat::from_integer(0.into()), value)
                } else {
                    GaussRat::from_rat(value)
                }));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} at position {pos}"
                )));
            }
        }
    }
    Ok(out)
}

/// Rational literal with optional exponent part, parsed exactly.
fn parse_number(lit: &str) -> Result<Rat> {
    if let Some(epos) = lit.find('e') {
        let mantissa = parse_rat(&lit[..epos])?;
        let exp: i32 = lit[epos + 1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {lit:?}")))?;
        let ten = Rat::from_integer(10.into());
        let mut scale = Rat::one();
        for _ in 0..exp.unsigned_abs() {
            scale *= ten.clone();
        }
        Ok(if exp >= 0 {
            mantissa * scale
        } else {
            mantissa / scale
        })
    } else {
        parse_rat(lit)
    }
}

/// Parses a general polynomial over exact scalars; degrees may be mixed.
pub fn parse_any(text: &str, d: usize) -> Result<Polynomial<GaussRat>> {
    if d == 0 {
        return Err(Error::Dimension("need d >= 1".into()));
    }
    let tokens = tokenize(text, d)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut poly = Polynomial::zero(d);
    let mut it = tokens.into_iter().peekable();
    let mut first = true;
    while it.peek().is_some() {
        let mut negative = false;
        let mut saw_sign = false;
        while matches!(it.peek(), Some(Token::Plus) | Some(Token::Minus)) {
            if matches!(it.next().unwrap(), Token::Minus) {
                negative = !negative;
            }
            saw_sign = true;
        }
        if !first && !saw_sign {
            return Err(Error::Parse("missing +/- between terms".into()));
        }
        first = false;

        let mut coeff = GaussRat::one();
        let mut saw_content = false;
        if let Some(Token::Number(_)) = it.peek() {
            let Some(Token::Number(v)) = it.next() else {
                unreachable!()
            };
            coeff = v;
            saw_content = true;
        }
        let mut exps = vec![0u32; d];
        while let Some(Token::Var(_, _)) = it.peek() {
            let Some(Token::Var(idx, e)) = it.next() else {
                unreachable!()
            };
            exps[idx - 1] += e;
            saw_content = true;
        }
        if !saw_content {
            return Err(Error::Parse("empty term".into()));
        }
        if negative {
            coeff = -coeff;
        }
        poly.add_term(MultiIndex(exps), coeff);
    }
    Ok(poly)
}

/// Parses a homogeneous polynomial; mixed degrees are an error.
pub fn parse_poly(text: &str, d: usize) -> Result<HomogeneousPolynomial<GaussRat>> {
    parse_any(text, d)?.into_homogeneous()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{exact_poly, kvh_polynomial};
    use crate::scalar::parse_gauss;

    #[test]
    fn parses_the_kv_polynomial() {
        let p = parse_poly("z1^2+z2^2+z3^2-2 z1 z2-2 z1 z3-2 z2 z3", 3).unwrap();
        assert_eq!(p, kvh_polynomial(3, GaussRat::from_int(-2)));
        assert_eq!(p.num_terms(), 6);
    }

    #[test]
    fn parses_monomials_and_rejects_mixed_degree() {
        let m = parse_poly("z1^3", 1).unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.num_terms(), 1);
        assert!(matches!(
            parse_poly("z1 + z2^2", 2),
            Err(Error::MixedDegree(_))
        ));
        assert!(matches!(
            parse_poly("z1 + z3", 2),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(parse_poly("z1 + $", 2).is_err());
    }

    #[test]
    fn parses_rational_decimal_and_imaginary_coefficients() {
        let p = parse_poly("3/2 z1 z2 - 0.25 z2^2 + 2i z1^2 - i z2^2", 2).unwrap();
        assert_eq!(
            p.coeff(&MultiIndex(vec![1, 1])),
            parse_gauss("3/2").unwrap()
        );
        assert_eq!(
            p.coeff(&MultiIndex(vec![0, 2])),
            parse_gauss("-1/4-i").unwrap()
        );
        assert_eq!(p.coeff(&MultiIndex(vec![2, 0])), parse_gauss("2i").unwrap());
    }

    #[test]
    fn star_separator_and_merged_terms() {
        let p = parse_poly("2*z1*z2 + z1 z2", 2).unwrap();
        assert_eq!(p.coeff(&MultiIndex(vec![1, 1])), GaussRat::from_int(3));
        // cancelling terms vanish from the map
        let q = parse_poly("z1 z2 - z1 z2 + z1^2", 2).unwrap();
        assert_eq!(q.num_terms(), 1);
    }

    #[test]
    fn constant_polynomials_parse() {
        let c = parse_poly("3/4", 2).unwrap();
        assert_eq!(c.degree(), 0);
        assert_eq!(
            c.coeff(&MultiIndex(vec![0, 0])),
            parse_gauss("3/4").unwrap()
        );
    }

    #[test]
    fn display_roundtrip() {
        let polys = [
            exact_poly(
                3,
                &[("1", &[2, 0, 0]), ("-2", &[1, 1, 0]), ("1/2", &[0, 1, 1])],
            ),
            exact_poly(2, &[("-3/7", &[3, 0]), ("2i", &[1, 2]), ("1-i", &[0, 3])]),
            exact_poly(1, &[("1", &[4])]),
        ];
        for p in polys {
            let shown = p.to_float().to_string();
            let back = parse_poly(&shown, p.d()).unwrap().to_float();
            for (m, c) in p.to_float().terms() {
                assert!((back.coeff(m) - c).norm() < 1e-12, "{shown}");
            }
        }
    }
}

//! Scalar types shared by the polynomial and matrix layers.
//!
//! Two scalar modes exist throughout the crate: exact Gaussian rationals for
//! certificate work and `Complex<f64>` for solver work. Conversion is always
//! explicit via [`Scalar::to_c64`] / [`GaussRat::to_c64`]; nothing converts
//! implicitly.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Gaussian rational: a complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(v)))
    }

    /// num/den with den != 0.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rat(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Exact division; error only on a zero divisor.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let denom = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        if denom.is_zero() {
            return Err(Error::Dimension("division by zero scalar".into()));
        }
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &denom;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &denom;
        Ok(GaussRat { re, im })
    }

    pub fn abs_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // falls back to a quotient of approximations for huge numerators
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses a rational literal: integer, `a/b`, or finite decimal (exactly).
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty numeric literal".into()));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator {num:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator {den:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') {
            -1
        } else {
            1
        };
        let i: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {t:?}")))?
        };
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {t:?}")));
        }
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let f: BigInt = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            frac_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {t:?}")))?
        };
        let f = if sign < 0 { -f } else { f };
        return Ok(Rat::new(i * &scale + f, scale));
    }
    let n: BigInt = t
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {t:?}")))?;
    Ok(Rat::from_integer(n))
}

/// Formats a rational as `num` or `num/den`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a Gaussian rational: `a`, `bi`, or `a+bi` / `a-bi` with rational parts.
pub fn parse_gauss(text: &str) -> Result<GaussRat> {
    let t = text.trim();
    if let Some(body) = t.strip_suffix('i') {
        // split an `a+bi` form at the last top-level +/- that is not the leading sign
        let bytes = body.as_bytes();
        let mut split = None;
        for pos in (1..bytes.len()).rev() {
            let c = bytes[pos] as char;
            if (c == '+' || c == '-') && bytes[pos - 1] as char != '/' {
                split = Some(pos);
                break;
            }
        }
        return match split {
            Some(pos) => {
                let re = parse_rat(&body[..pos])?;
                let im_text = &body[pos..];
                let im = if im_text == "+" || im_text == "-" {
                    if im_text == "-" {
                        -Rat::one()
                    } else {
                        Rat::one()
                    }
                } else {
                    parse_rat(im_text)?
                };
                Ok(GaussRat::new(re, im))
            }
            None => {
                let im = if body.is_empty() {
                    Rat::one()
                } else if body == "-" {
                    -Rat::one()
                } else {
                    parse_rat(body)?
                };
                Ok(GaussRat::new(Rat::zero(), im))
            }
        };
    }
    Ok(GaussRat::from_rat(parse_rat(t)?))
}

/// Formats a Gaussian rational compatibly with [`parse_gauss`].
pub fn format_gauss(g: &GaussRat) -> String {
    if g.im.is_zero() {
        format_rat(&g.re)
    } else if g.re.is_zero() {
        format!("{}i", format_rat(&g.im))
    } else if g.im.is_negative() {
        format!("{}{}i", format_rat(&g.re), format_rat(&g.im))
    } else {
        format!("{}+{}i", format_rat(&g.re), format_rat(&g.im))
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_gauss(self))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_gauss(self))
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: Self) -> Self {
        GaussRat {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl AddAssign for GaussRat {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: Self) -> Self {
        GaussRat {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussRat { re, im }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> Self {
        GaussRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat {
            re: Rat::zero(),
            im: Rat::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat {
            re: Rat::one(),
            im: Rat::zero(),
        }
    }
}

/// Scalar operations required by the shared polynomial/matrix code.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + Zero
    + One
{
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    fn from_rat(r: &Rat) -> Self;
    fn from_f64_pair(re: f64, im: f64) -> Self;
}

impl Scalar for GaussRat {
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        GaussRat::to_c64(self)
    }
    fn from_rat(r: &Rat) -> Self {
        GaussRat::from_rat(r.clone())
    }
    fn from_f64_pair(_re: f64, _im: f64) -> Self {
        panic!("no implicit float -> exact conversion")
    }
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn from_rat(r: &Rat) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn from_f64_pair(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn parses_rational_literals() {
        assert_eq!(rat("3"), Rat::from_integer(BigInt::from(3)));
        assert_eq!(rat("-7/2"), Rat::new(BigInt::from(-7), BigInt::from(2)));
        assert_eq!(rat("0.25"), Rat::new(BigInt::from(1), BigInt::from(4)));
        assert_eq!(rat("-1.5"), Rat::new(BigInt::from(-3), BigInt::from(2)));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn gauss_roundtrip_and_ops() {
        for s in ["3/5", "-2i", "1+1/2i", "-3/4-2/7i", "i", "0"] {
            let g = parse_gauss(s).unwrap();
            let back = parse_gauss(&format_gauss(&g)).unwrap();
            assert_eq!(g, back, "roundtrip {s}");
        }
        let a = parse_gauss("1+2i").unwrap();
        let b = parse_gauss("3-1/2i").unwrap();
        let prod = a.clone() * b.clone();
        // (1+2i)(3-i/2) = 3 - i/2 + 6i + 1 = 4 + 11/2 i
        assert_eq!(prod, parse_gauss("4+11/2i").unwrap());
        let q = prod.div(&b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn conjugation_is_involutive() {
        let a = parse_gauss("2/3-5i").unwrap();
        assert_eq!(a.conj().conj(), a);
        let c = a.to_c64();
        assert!((c.re - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.im + 5.0).abs() < 1e-15);
    }
}

//! Scalars that are either exact or floating.
//!
//! Exact scalars live in a real quadratic field `ℚ(√d)`: a rational number, or
//! `a + c·√d` with `c ≠ 0` and `d > 1` squarefree (hence irrational). Floating
//! scalars carry no exactness information and are treated as irrational by the
//! set-membership oracles.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    /// `rational + coef·√radicand`, `coef ≠ 0`, `radicand` squarefree and `> 1`.
    Quadratic {
        rational: BigRational,
        coef: BigRational,
        radicand: u64,
    },
    Real(f64),
}

/// Element of `ℚ(√d)`; `d == 1` encodes a plain rational with `c == 0`.
#[derive(Clone, Debug, PartialEq)]
struct Quad {
    a: BigRational,
    c: BigRational,
    d: u64,
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Splits `d` into `s²·f` with `f` squarefree; returns `(s, f)`.
fn squarefree_split(mut d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut f = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        let mut e = 0;
        while d.is_multiple_of(p) {
            d /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, f * d)
}

impl Quad {
    fn rational(q: BigRational) -> Self {
        Quad { a: q, c: BigRational::zero(), d: 1 }
    }

    fn normalized(a: BigRational, c: BigRational, d: u64) -> Self {
        if c.is_zero() || d == 1 {
            // d == 1 only arises with c folded already
            Quad { a, c: BigRational::zero(), d: 1 }
        } else {
            Quad { a, c, d }
        }
    }

    fn common_radicand(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (1, d) | (d, 1) => Ok(d),
            (d1, d2) if d1 == d2 => Ok(d1),
            (d1, d2) => Err(Error::invalid(format!(
                "cannot combine sqrt({d1}) and sqrt({d2}) exactly"
            ))),
        }
    }

    fn add(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        Ok(Self::normalized(&self.a + &o.a, &self.c + &o.c, d))
    }

    fn neg(&self) -> Self {
        Quad { a: -&self.a, c: -&self.c, d: self.d }
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        let dd = rat_int(d as i64);
        let a = &self.a * &o.a + &self.c * &o.c * &dd;
        let c = &self.a * &o.c + &self.c * &o.a;
        Ok(Self::normalized(a, c, d))
    }

    fn norm(&self) -> BigRational {
        // (a + c√d)(a − c√d)
        &self.a * &self.a - &self.c * &self.c * rat_int(self.d as i64)
    }

    fn conj(&self) -> Self {
        Quad { a: self.a.clone(), c: -&self.c, d: self.d }
    }

    fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        let cj = self.conj();
        Ok(Self::normalized(&cj.a / &n, &cj.c / &n, cj.d))
    }

    fn signum(&self) -> Ordering {
        let zero = BigRational::zero();
        if self.c.is_zero() {
            return self.a.cmp(&zero);
        }
        let a_sign = self.a.cmp(&zero);
        let c_sign = self.c.cmp(&zero);
        if a_sign != Ordering::Less && c_sign == Ordering::Greater {
            return Ordering::Greater;
        }
        if a_sign != Ordering::Greater && c_sign == Ordering::Less {
            return Ordering::Less;
        }
        // opposite signs: compare a² with c²d
        let a2 = &self.a * &self.a;
        let c2d = &self.c * &self.c * rat_int(self.d as i64);
        if a_sign == Ordering::Greater {
            a2.cmp(&c2d)
        } else {
            c2d.cmp(&a2)
        }
    }

    fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.c) * (self.d as f64).sqrt()
    }

    /// `√q` for a non-negative rational `q`.
    fn sqrt_of(q: &BigRational) -> Result<Self> {
        if q.is_negative() {
            return Err(Error::invalid("square root of a negative number"));
        }
        // √(p/r) = √(p·r)/r
        let pr = q.numer() * q.denom();
        let pr = pr
            .to_u64()
            .ok_or_else(|| Error::invalid("radicand too large"))?;
        let (s, f) = squarefree_split(pr);
        let coef = BigRational::new(BigInt::from(s), q.denom().clone());
        if f == 1 {
            Ok(Quad::rational(coef))
        } else {
            Ok(Quad::normalized(BigRational::zero(), coef, f))
        }
    }
}

impl Scalar {
    pub fn integer(n: i64) -> Self {
        Scalar::Rational(rat_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rational(rat(num, den))
    }

    pub fn real(x: f64) -> Self {
        Scalar::Real(x)
    }

    /// `coef·√radicand` with exact coefficient `num/den`.
    pub fn surd(num: i64, den: i64, radicand: u64) -> Self {
        let root = Quad::sqrt_of(&rat_int(radicand as i64)).expect("non-negative radicand");
        Self::from_quad(root.mul(&Quad::rational(rat(num, den))).expect("same field"))
    }

    fn from_quad(q: Quad) -> Self {
        if q.d == 1 || q.c.is_zero() {
            Scalar::Rational(q.a)
        } else {
            Scalar::Quadratic { rational: q.a, coef: q.c, radicand: q.d }
        }
    }

    fn as_quad(&self) -> Option<Quad> {
        match self {
            Scalar::Rational(q) => Some(Quad::rational(q.clone())),
            Scalar::Quadratic { rational, coef, radicand } => Some(Quad {
                a: rational.clone(),
                c: coef.clone(),
                d: *radicand,
            }),
            Scalar::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(q) => rat_to_f64(q),
            Scalar::Quadratic { .. } => self.as_quad().map(|q| q.to_f64()).unwrap_or(f64::NAN),
            Scalar::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    /// Known to be irrational (exact quadratic surd).
    pub fn is_certified_irrational(&self) -> bool {
        matches!(self, Scalar::Quadratic { .. })
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Real(_))
    }

    fn binary(&self, other: &Self, exact: impl Fn(&Quad, &Quad) -> Result<Quad>, float: impl Fn(f64, f64) -> f64) -> Result<Self> {
        match (self.as_quad(), other.as_quad()) {
            (Some(a), Some(b)) => match exact(&a, &b) {
                Ok(q) => Ok(Self::from_quad(q)),
                // mixed radicands: fall back to floating
                Err(Error::InvalidInput(msg)) if msg.starts_with("cannot combine") => {
                    Ok(Scalar::Real(float(self.to_f64(), other.to_f64())))
                }
                Err(e) => Err(e),
            },
            _ => Ok(Scalar::Real(float(self.to_f64(), other.to_f64()))),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.add(b), |x, y| x + y).expect("addition is total")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.add(&b.neg()), |x, y| x - y).expect("subtraction is total")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.mul(b), |x, y| x * y).expect("multiplication is total")
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::invalid("division by zero"));
        }
        self.binary(other, |a, b| a.mul(&b.recip()?), |x, y| x / y)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Real(x) => *x == 0.0,
            _ => self.as_quad().map(|q| q.signum() == Ordering::Equal).unwrap_or(false),
        }
    }

    /// Total order between exact scalars; floating comparison otherwise.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        match (self.as_quad(), other.as_quad()) {
            (Some(a), Some(b)) => match a.add(&b.neg()) {
                Ok(diff) => Some(diff.signum()),
                Err(_) => self.to_f64().partial_cmp(&other.to_f64()),
            },
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }

    pub fn lt(&self, other: &Self) -> bool {
        self.compare(other) == Some(Ordering::Less)
    }

    pub fn gt(&self, other: &Self) -> bool {
        self.compare(other) == Some(Ordering::Greater)
    }

    /// `α/(α−1)`, the scalar map of the hyperbolic reflection.
    pub fn hyperbolic_image(&self) -> Result<Self> {
        let one = Scalar::integer(1);
        self.div(&self.sub(&one))
    }

    /// Distance from `self·k` to the nearest integer, with a certified lower
    /// bound for exact scalars.
    pub fn integer_distance(&self, k: u64) -> IntegerDistance {
        let kk = Scalar::integer(k as i64);
        let prod = self.mul(&kk);
        match &prod {
            Scalar::Rational(q) => {
                let floor = q.floor();
                let frac = q - &floor;
                let other = BigRational::one() - &frac;
                let d = if frac <= other { frac } else { other };
                let f = rat_to_f64(&d);
                IntegerDistance { value: f, certified_lower_bound: Some(f), exact: Some(d) }
            }
            Scalar::Quadratic { rational, coef, radicand } => {
                let x = prod.to_f64();
                let value = (x - x.round()).abs();
                // For any integer j, x − j = r + s√d with s ≠ 0 has nonzero norm
                // r² − s²d whose denominator divides lcm(den(r)², den(s)²); and
                // |x − j| = |norm| / |conj(x − j)|.
                let den_r = rational.denom() * rational.denom();
                let den_s = coef.denom() * coef.denom();
                let lcm = den_r.lcm(&den_s);
                let min_norm = 1.0 / lcm.to_f64().unwrap_or(f64::INFINITY);
                let conj_bound = 0.5 + 2.0 * rat_to_f64(coef).abs() * (*radicand as f64).sqrt();
                let bound = (min_norm / conj_bound).min(0.5);
                IntegerDistance { value, certified_lower_bound: Some(bound), exact: None }
            }
            Scalar::Real(x) => IntegerDistance {
                value: (x - x.round()).abs(),
                certified_lower_bound: None,
                exact: None,
            },
        }
    }
}

/// Distance of a scalar multiple to the integers.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerDistance {
    pub value: f64,
    /// Rigorous lower bound (exact scalars only).
    pub certified_lower_bound: Option<f64>,
    /// Exact value for rationals.
    pub exact: Option<BigRational>,
}

impl IntegerDistance {
    pub fn is_integer(&self) -> bool {
        self.exact.as_ref().map(|d| d.is_zero()).unwrap_or(false)
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{}", fmt_rat(q)),
            Scalar::Quadratic { rational, coef, radicand } => {
                let c_abs = coef.abs();
                let term = if c_abs.is_one() {
                    format!("sqrt({radicand})")
                } else {
                    format!("{}*sqrt({radicand})", fmt_rat(&c_abs))
                };
                if rational.is_zero() {
                    if coef.is_negative() {
                        write!(f, "-{term}")
                    } else {
                        write!(f, "{term}")
                    }
                } else {
                    let op = if coef.is_negative() { "-" } else { "+" };
                    write!(f, "{} {op} {term}", fmt_rat(rational))
                }
            }
            Scalar::Real(x) => write!(f, "real:{x}"),
        }
    }
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("cannot parse number `{s}`"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::invalid(format!("expected `{}` at offset {}", c as char, self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Quad> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg())?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Quad> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?)?;
                }
                b'/' => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?.recip()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Quad> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Quad> {
        if self.src[self.pos..].starts_with(b"sqrt") {
            self.pos += 4;
            self.expect(b'(')?;
            let inner = self.expr()?;
            self.expect(b')')?;
            if inner.d != 1 {
                return Err(Error::invalid("nested square roots are not supported"));
            }
            return Quad::sqrt_of(&inner.a);
        }
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(b')')?;
            return Ok(inner);
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            let in_exponent = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || in_exponent {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(Error::invalid(format!("expected a number at offset {start}")));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(Quad::rational(parse_decimal(text)?))
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts integers, fractions, decimals, expressions in one square root
    /// such as `1/sqrt(2)` or `3 - sqrt(5)/2`, and `real:<float>`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(rest) = compact.strip_prefix("real:") {
            let x: f64 = rest
                .parse()
                .map_err(|_| Error::invalid(format!("cannot parse real `{rest}`")))?;
            return Ok(Scalar::Real(x));
        }
        let mut p = Parser { src: compact.as_bytes(), pos: 0 };
        let q = p.expr()?;
        if p.pos != compact.len() {
            return Err(Error::invalid(format!("trailing input in `{s}`")));
        }
        Ok(Scalar::from_quad(q))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            // shortest round-trip decimal of the float, read back exactly
            Repr::Number(x) => x.to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

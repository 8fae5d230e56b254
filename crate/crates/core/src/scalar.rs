//! Numbers with an explicit backend: exact rationals, IEEE doubles, or binary
//! floats whose precision is given in decimal digits.
//!
//! Backends never mix. The checked operations return
//! [`Error::BackendMismatch`]; the operator impls panic on mismatch and are
//! meant for code that has already validated its inputs.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Exponent, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 60;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;
const LOG10_2: f64 = std::f64::consts::LOG10_2;
/// Decimal digits kept by the deterministic square-root approximation on the
/// exact backend.
const EXACT_SQRT_DIGITS: u32 = 40;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Double,
    Extended { digits: u32 },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Extended {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl Backend {
    pub fn is_exact(self) -> bool {
        matches!(self, Backend::Exact)
    }

    /// Decimal digits carried by a float backend; `None` for exact.
    pub fn precision_digits(self) -> Option<u32> {
        match self {
            Backend::Exact => None,
            Backend::Double => Some(15),
            Backend::Extended { digits } => Some(digits),
        }
    }

    /// Canonical keys round float parameters to a grid of `10^-g`.
    pub fn key_grid_digits(self) -> Option<u32> {
        match self {
            Backend::Exact => None,
            Backend::Double => Some(12),
            Backend::Extended { digits } => Some(digits.saturating_sub(15).max(12)),
        }
    }

    /// Default equality tolerance: zero on exact, the key grid otherwise.
    pub fn tolerance(self) -> Scalar {
        match self.key_grid_digits() {
            None => Scalar::zero(self),
            Some(g) => Scalar::pow10(-(g as i32), self),
        }
    }

    fn bits(digits: u32) -> usize {
        let raw = (digits.max(1) as f64 * LOG2_10).ceil() as usize + 64;
        raw.div_ceil(64) * 64
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Double => write!(f, "double"),
            Backend::Extended { digits } => write!(f, "float({digits})"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::Parse {
            text: s.to_string(),
            reason: "expected exact, double, float or float(DIGITS)".into(),
        };
        match t.as_str() {
            "exact" | "rational" => return Ok(Backend::Exact),
            "double" | "f64" => return Ok(Backend::Double),
            "float" | "extended" => return Ok(Backend::default()),
            _ => {}
        }
        let inner = t
            .strip_prefix("float(")
            .or_else(|| t.strip_prefix("extended("))
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let digits: u32 = inner.trim().parse().map_err(|_| bad())?;
        if !(1..=100_000).contains(&digits) {
            return Err(bad());
        }
        Ok(Backend::Extended { digits })
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    /// Always in lowest terms with positive denominator (maintained by `Ratio`).
    Exact(BigRational),
    Double(f64),
    /// Value and its decimal precision.
    Extended(BigFloat, u32),
}

use Scalar::{Double, Exact, Extended};

#[derive(Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// Component of a canonical map key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyAtom {
    Rational(BigInt, BigInt),
    Grid(BigInt),
}

pub(crate) fn bigint_to_bigfloat(n: &BigInt, p: usize) -> BigFloat {
    if n.is_zero() {
        return BigFloat::from_i64(0, p);
    }
    let words = n.magnitude().to_u64_digits();
    let sign = if n.sign() == IntSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, sign, (64 * words.len()) as Exponent)
}

pub(crate) fn rational_to_bigfloat(q: &BigRational, p: usize) -> BigFloat {
    let n = bigint_to_bigfloat(q.numer(), p);
    if q.denom().is_one() {
        return n.add(&BigFloat::from_i64(0, p), p, RM);
    }
    n.div(&bigint_to_bigfloat(q.denom(), p), p, RM)
}

/// Exact value of a finite binary float.
pub(crate) fn bigfloat_to_rational(x: &BigFloat) -> Option<BigRational> {
    if x.is_nan() || x.is_inf() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let (words, _, sign, e, _) = x.as_raw_parts()?;
    let mut mag = BigUint::zero();
    for w in words.iter().rev() {
        mag = (mag << 64u32) + BigUint::from(*w);
    }
    let shift = e as i64 - 64 * words.len() as i64;
    let mut q = BigRational::from_integer(BigInt::from(mag));
    if shift >= 0 {
        q *= BigRational::from_integer(BigInt::one() << shift as usize);
    } else {
        q /= BigRational::from_integer(BigInt::one() << (-shift) as usize);
    }
    if sign == Sign::Neg {
        q = -q;
    }
    Some(q)
}

fn bigfloat_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let top = words[words.len() - 1];
    let next = if words.len() > 1 {
        words[words.len() - 2]
    } else {
        0
    };
    // Two leading words; the result is within one ulp.
    let mant = (top as f64) * 2f64.powi(64) + next as f64;
    let shift = e as i64 - 128;
    let half = (shift / 2) as i32;
    let v = mant * 2f64.powi(half) * 2f64.powi(shift as i32 - half);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn parse_bigint(text: &str) -> Option<BigInt> {
    let t = text.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    if t.is_empty() {
        return None;
    }
    let digits = t.strip_prefix('-').unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_bigint(n)?;
            let d = parse_bigint(d)?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => parse_bigint(text).map(BigRational::from_integer),
    }
}

/// Decimal literal `[+-]digits[.digits][e[+-]exp]` as its exact value.
fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty()
        || !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit())
        || exp.unsigned_abs() > 100_000
    {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().ok()? / 10;
    let e = exp as i64 - frac.len() as i64;
    let mut q = if e >= 0 {
        BigRational::from_integer(digits * pow10_big(e as u32))
    } else {
        BigRational::new(digits, pow10_big((-e) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

fn pow10_big(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

/// `q` to `sig` significant decimal digits: plain notation for moderate
/// exponents, scientific otherwise. Trailing zeros are dropped.
pub fn format_significant(q: &BigRational, sig: u32) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let sig = sig.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    let bits = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = ((bits as f64) * LOG10_2).floor() as i64 - 1;
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow10_big(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow10_big((-k) as u32))
        }
    };
    while pow(e + 1) <= a {
        e += 1;
    }
    while pow(e) > a {
        e -= 1;
    }
    let scaled = &a * pow(sig as i64 - 1 - e);
    let mut m = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    if m == pow10_big(sig) {
        m /= 10;
        e += 1;
    }
    let mut digits = m.to_string();
    while digits.len() > 1 && digits.ends_with('0') {
        digits.pop();
    }
    let sign = if neg { "-" } else { "" };
    if (-5..=20).contains(&e) {
        let out = if e < 0 {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
        } else {
            let int_len = e as usize + 1;
            if digits.len() <= int_len {
                format!("{}{}", digits, "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        };
        format!("{sign}{out}")
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        }
    }
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Exact(_) => Backend::Exact,
            Double(_) => Backend::Double,
            Extended(_, digits) => Backend::Extended { digits: *digits },
        }
    }

    pub fn zero(b: Backend) -> Self {
        Self::from_i64(0, b)
    }

    pub fn one(b: Backend) -> Self {
        Self::from_i64(1, b)
    }

    pub fn from_i64(v: i64, b: Backend) -> Self {
        match b {
            Backend::Exact => Exact(BigRational::from_integer(BigInt::from(v))),
            Backend::Double => Double(v as f64),
            Backend::Extended { digits } => {
                Extended(BigFloat::from_i64(v, Backend::bits(digits)), digits)
            }
        }
    }

    /// `n/d` rounded once into the backend.
    pub fn from_ratio(n: i64, d: i64, b: Backend) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)), b)
    }

    pub fn from_rational(q: &BigRational, b: Backend) -> Self {
        match b {
            Backend::Exact => Exact(q.clone()),
            Backend::Double => Double(q.to_f64().unwrap_or(f64::NAN)),
            Backend::Extended { digits } => {
                Extended(rational_to_bigfloat(q, Backend::bits(digits)), digits)
            }
        }
    }

    /// Exact conversion of a finite double (its binary value, not its shortest
    /// decimal form).
    pub fn from_f64(x: f64, b: Backend) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::Parse {
                text: x.to_string(),
                reason: "non-finite".into(),
            });
        }
        Ok(match b {
            Backend::Double => Double(x),
            Backend::Extended { digits } => {
                Extended(BigFloat::from_f64(x, Backend::bits(digits)), digits)
            }
            Backend::Exact => Exact(BigRational::from_float(x).expect("finite")),
        })
    }

    /// `10^k` in the backend.
    pub fn pow10(k: i32, b: Backend) -> Self {
        let q = if k >= 0 {
            BigRational::from_integer(pow10_big(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow10_big((-k) as u32))
        };
        Self::from_rational(&q, b)
    }

    /// Parses `p/q`, an integer, or (float backends only) a decimal literal.
    pub fn parse(text: &str, b: Backend) -> Result<Self> {
        let t = text.trim();
        if let Some(q) = parse_rational(t) {
            return Ok(Self::from_rational(&q, b));
        }
        let err = |reason: &str| Error::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if t.contains('/') {
            return Err(err("malformed fraction"));
        }
        match b {
            Backend::Exact => Err(err(
                "decimal literals are not accepted on the exact backend; write p/q",
            )),
            Backend::Double => {
                let v: f64 = t.parse().map_err(|_| err("not a number"))?;
                if !v.is_finite() {
                    return Err(err("non-finite"));
                }
                Ok(Double(v))
            }
            Backend::Extended { digits } => {
                if !t.bytes().all(|c| c.is_ascii_digit() || b"+-.eE".contains(&c)) {
                    return Err(err("not a number"));
                }
                let p = Backend::bits(digits);
                let v = with_consts(|cc| BigFloat::parse(t, Radix::Dec, p, RM, cc));
                if v.is_nan() || v.is_inf() {
                    return Err(err("not a number"));
                }
                Ok(Extended(v, digits))
            }
        }
    }

    /// Like [`Scalar::parse`], but a decimal literal on the exact backend
    /// is taken at its exact decimal value. Meant for command-line options
    /// such as `1e-2`; specification files keep the strict rule.
    pub fn parse_literal(text: &str, b: Backend) -> Result<Self> {
        match Self::parse(text, b) {
            Err(e) if b.is_exact() => match parse_decimal(text.trim()) {
                Some(q) => Ok(Exact(q)),
                None => Err(e),
            },
            r => r,
        }
    }

    /// Moves the value to another backend, rounding when the target is a float.
    pub fn convert(&self, b: Backend) -> Self {
        if self.backend() == b {
            return self.clone();
        }
        match self {
            Double(x) => Self::from_f64(*x, b).unwrap_or(Double(f64::NAN)),
            _ => match self.to_rational() {
                Some(q) => Self::from_rational(&q, b),
                None => Double(f64::NAN),
            },
        }
    }

    /// Exact value as a rational; `None` for non-finite floats.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Exact(q) => Some(q.clone()),
            Double(x) => BigRational::from_float(*x),
            Extended(x, _) => bigfloat_to_rational(x),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Double(x) => *x,
            Extended(x, _) => bigfloat_to_f64(x),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Exact(_) => true,
            Double(x) => x.is_finite(),
            Extended(x, _) => !(x.is_nan() || x.is_inf()),
        }
    }

    fn binop(&self, rhs: &Scalar, op: Op) -> Result<Scalar> {
        let div_zero = || Error::Invalid("division by zero".into());
        match (self, rhs) {
            (Exact(a), Exact(b)) => Ok(Exact(match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => {
                    if b.is_zero() {
                        return Err(div_zero());
                    }
                    a / b
                }
            })),
            (Double(a), Double(b)) => Ok(Double(match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => {
                    if *b == 0.0 {
                        return Err(div_zero());
                    }
                    a / b
                }
            })),
            (Extended(a, da), Extended(b, db)) if da == db => {
                let p = Backend::bits(*da);
                let v = match op {
                    Op::Add => a.add(b, p, RM),
                    Op::Sub => a.sub(b, p, RM),
                    Op::Mul => a.mul(b, p, RM),
                    Op::Div => {
                        if b.is_zero() {
                            return Err(div_zero());
                        }
                        a.div(b, p, RM)
                    }
                };
                Ok(Extended(v, *da))
            }
            _ => Err(Error::BackendMismatch(self.backend(), rhs.backend())),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binop(rhs, Op::Add)
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binop(rhs, Op::Sub)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binop(rhs, Op::Mul)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binop(rhs, Op::Div)
    }

    pub fn checked_cmp(&self, rhs: &Scalar) -> Result<Ordering> {
        let mismatch = || Error::BackendMismatch(self.backend(), rhs.backend());
        match (self, rhs) {
            (Exact(a), Exact(b)) => Ok(a.cmp(b)),
            (Double(a), Double(b)) => a
                .partial_cmp(b)
                .ok_or_else(|| Error::Invalid("comparison with NaN".into())),
            (Extended(a, da), Extended(b, db)) if da == db => a
                .cmp(b)
                .map(|s| s.cmp(&0))
                .ok_or_else(|| Error::Invalid("comparison with NaN".into())),
            _ => Err(mismatch()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Exact(q) => q.is_zero(),
            Double(x) => *x == 0.0,
            Extended(x, _) => x.is_zero(),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Exact(q) => {
                if q.is_zero() {
                    0
                } else if q.is_negative() {
                    -1
                } else {
                    1
                }
            }
            Double(x) => {
                if *x == 0.0 {
                    0
                } else if *x < 0.0 {
                    -1
                } else {
                    1
                }
            }
            Extended(x, _) => {
                if x.is_zero() {
                    0
                } else if x.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one(self.backend()).checked_div(self)
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, k: i32) -> Result<Scalar> {
        let mut base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one(self.backend());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Square root. On the exact backend the result is exact for squares of
    /// rationals and otherwise a deterministic rational approximation with
    /// 40 decimal digits after the point.
    pub fn sqrt(&self) -> Result<Scalar> {
        if self.is_negative() {
            return Err(Error::Invalid(format!("sqrt of negative value {self}")));
        }
        Ok(match self {
            Exact(q) => {
                let (n, d) = (q.numer(), q.denom());
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &(&rn * &rn) == n && &(&rd * &rd) == d {
                    Exact(BigRational::new(rn, rd))
                } else {
                    let scale = pow10_big(EXACT_SQRT_DIGITS);
                    let root = (n * d * &scale * &scale).sqrt();
                    Exact(BigRational::new(root, d * scale))
                }
            }
            Double(x) => Double(x.sqrt()),
            Extended(x, digits) => Extended(x.sqrt(Backend::bits(*digits), RM), *digits),
        })
    }

    pub fn floor(&self) -> Scalar {
        match self {
            Exact(q) => Exact(q.floor()),
            Double(x) => Double(x.floor()),
            Extended(x, d) => Extended(x.floor(), *d),
        }
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        match self {
            Exact(q) => q.is_integer(),
            Double(x) => x.fract() == 0.0,
            Extended(..) => self.to_rational().is_some_and(|q| q.is_integer()),
        }
    }

    /// Representative in `[0, m)` of the class of `self` modulo `m > 0`.
    pub fn rem_euclid(&self, m: &Scalar) -> Result<Scalar> {
        let q = self.checked_div(m)?.floor();
        let r = self.checked_sub(&q.checked_mul(m)?)?;
        if r.checked_cmp(m)? != Ordering::Less {
            return r.checked_sub(m);
        }
        Ok(r)
    }

    /// `(cos, sin)` of an angle in degrees. The exact backend only admits
    /// multiples of 90°; float backends are exact at those angles too.
    pub fn cos_sin_degrees(&self) -> Result<(Scalar, Scalar)> {
        let b = self.backend();
        let full = Scalar::from_i64(360, b);
        let a = self.rem_euclid(&full)?;
        let quarter = a.checked_div(&Scalar::from_i64(90, b))?;
        if quarter.is_integer() {
            let (c, s) = match quarter.to_f64() as i64 {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return Ok((Scalar::from_i64(c, b), Scalar::from_i64(s, b)));
        }
        match &a {
            Exact(_) => Err(Error::InexactTrig(self.to_string())),
            Double(x) => {
                let r = x.to_radians();
                Ok((Double(r.cos()), Double(r.sin())))
            }
            Extended(x, digits) => {
                let p = Backend::bits(*digits);
                let (c, s) = with_consts(|cc| {
                    let pi = cc.pi(p, RM);
                    let r = x.mul(&pi, p, RM).div(&BigFloat::from_i64(180, p), p, RM);
                    (r.cos(p, RM, cc), r.sin(p, RM, cc))
                });
                Ok((Extended(c, *digits), Extended(s, *digits)))
            }
        }
    }

    /// Rough `log10 |x|` that stays meaningful far outside the f64 range.
    pub fn approx_log10_abs(&self) -> f64 {
        match self {
            _ if self.is_zero() => f64::NEG_INFINITY,
            Exact(q) => {
                let f = q.abs().to_f64().unwrap_or(0.0);
                if f.is_normal() {
                    f.log10()
                } else {
                    (q.numer().bits() as f64 - q.denom().bits() as f64) * LOG10_2
                }
            }
            Double(x) => x.abs().log10(),
            Extended(x, _) => {
                let f = bigfloat_to_f64(x).abs();
                if f.is_normal() {
                    f.log10()
                } else {
                    x.exponent().unwrap_or(0) as f64 * LOG10_2
                }
            }
        }
    }

    /// Canonical key atom: exact parameters on the exact backend, otherwise
    /// the value rounded to the backend's key grid.
    pub fn key(&self) -> KeyAtom {
        match self {
            Exact(q) => KeyAtom::Rational(q.numer().clone(), q.denom().clone()),
            _ => {
                let g = self.backend().key_grid_digits().unwrap_or(12);
                let q = self.to_rational().unwrap_or_else(BigRational::zero);
                let scaled = q * BigRational::from_integer(pow10_big(g));
                KeyAtom::Grid(scaled.round().to_integer())
            }
        }
    }

    /// Decimal rendering to `sig` significant digits on any backend.
    pub fn to_decimal_string(&self, sig: u32) -> String {
        match self.to_rational() {
            Some(q) => format_significant(&q, sig),
            None => self.to_f64().to_string(),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exact(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Double(x) => {
                let a = x.abs();
                if a == 0.0 || (1e-5..1e16).contains(&a) {
                    write!(f, "{x}")
                } else {
                    write!(f, "{x:e}")
                }
            }
            Extended(_, digits) => write!(f, "{}", self.to_decimal_string(*digits)),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.checked_cmp(other), Ok(Ordering::Equal))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.checked_cmp(other).ok()
    }
}

macro_rules! scalar_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar operation")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar operation")
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$checked(rhs).expect("scalar operation")
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$checked(&rhs).expect("scalar operation")
            }
        }
    };
}

scalar_op!(Add, add, checked_add);
scalar_op!(Sub, sub, checked_sub);
scalar_op!(Mul, mul, checked_mul);
scalar_op!(Div, div, checked_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Exact(q) => Exact(-q),
            Double(x) => Double(-x),
            Extended(x, d) => Extended(x.neg(), *d),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

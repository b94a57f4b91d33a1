//! Truncated Laurent series with explicit precision.
//!
//! A [`Laurent`] stores coefficients for exponents `valuation..precision`; every
//! coefficient at or beyond the precision is unknown and is never reported as
//! zero. Binary operations propagate precision conservatively:
//!
//! - sum: `min(prec(a), prec(b))`
//! - product: `min(prec(a) + val(b), prec(b) + val(a))`
//! - inverse: `prec(a) - 2 val(a)`
//!
//! A precision of `None` marks an exact (finite) series such as a polynomial.
//! The coefficient ring is generic: [`QLaurent`] has rational coefficients and
//! [`BiSeries`] nests a `QLaurent` inside every `z`-coefficient.

mod bivariate;
pub mod json;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{rat, Rat};

pub use bivariate::BiSeries;

/// Laurent series in `q` with rational coefficients.
pub type QLaurent = Laurent<Rat>;

/// Operations a coefficient ring must provide to the series engine.
pub trait Coefficient: Clone + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Rat) -> Self;
    fn try_inverse(&self) -> Result<Self>;
    /// Equality on everything both operands claim to know.
    fn agrees(&self, other: &Self) -> bool;
}

impl Coefficient for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, c: &Rat) -> Self {
        self * c
    }
    fn try_inverse(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::NotInvertible("zero leading coefficient".into()))
        } else {
            Ok(self.recip())
        }
    }
    fn agrees(&self, other: &Self) -> bool {
        self == other
    }
}

pub(crate) fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Truncated Laurent series `sum_{n >= val} c_n t^n + O(t^prec)`.
#[derive(Clone, Debug)]
pub struct Laurent<C> {
    val: i64,
    coeffs: Vec<C>,
    prec: Option<i64>,
}

impl<C: Coefficient> Laurent<C> {
    /// Builds a canonical series: entries at or beyond `prec` are dropped and
    /// leading/trailing zeros are trimmed.
    pub fn new(val: i64, mut coeffs: Vec<C>, prec: Option<i64>) -> Self {
        if let Some(p) = prec {
            let keep = (p - val).max(0) as usize;
            coeffs.truncate(keep);
        }
        let lead = coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Self::zero_with(prec),
            Some(i) => {
                let end = coeffs.iter().rposition(|c| !c.is_zero()).unwrap() + 1;
                coeffs.truncate(end);
                coeffs.drain(..i);
                Laurent {
                    val: val + i as i64,
                    coeffs,
                    prec,
                }
            }
        }
    }

    fn zero_with(prec: Option<i64>) -> Self {
        Laurent {
            val: prec.unwrap_or(0),
            coeffs: Vec::new(),
            prec,
        }
    }

    /// The exact zero series.
    pub fn zero() -> Self {
        Self::zero_with(None)
    }

    /// Zero known only below `prec`.
    pub fn zero_to(prec: i64) -> Self {
        Self::zero_with(Some(prec))
    }

    pub fn one() -> Self {
        Self::monomial(C::one(), 0)
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// The exact series `c t^exp`.
    pub fn monomial(c: C, exp: i64) -> Self {
        Self::new(exp, vec![c], None)
    }

    /// An exact Laurent polynomial.
    pub fn polynomial(val: i64, coeffs: Vec<C>) -> Self {
        Self::new(val, coeffs, None)
    }

    /// Builds `sum_{val <= n < prec} f(n) t^n + O(t^prec)`.
    pub fn from_fn(val: i64, prec: i64, mut f: impl FnMut(i64) -> C) -> Self {
        let coeffs = (val..prec).map(&mut f).collect();
        Self::new(val, coeffs, Some(prec))
    }

    /// Lowest exponent with a nonzero coefficient; equals the precision for a
    /// series that is zero up to its precision (and 0 for the exact zero).
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    /// Stored coefficients, for exponents `valuation()..`.
    pub fn coefficients(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// One past the highest stored exponent.
    fn end(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    fn get(&self, n: i64) -> Option<&C> {
        if n < self.val {
            None
        } else {
            self.coeffs.get((n - self.val) as usize)
        }
    }

    /// The coefficient of `t^n`. Exponents below the valuation give zero;
    /// exponents at or beyond the precision are an error.
    pub fn coeff(&self, n: i64) -> Result<C> {
        if let Some(p) = self.prec {
            if n >= p {
                return Err(Error::InsufficientPrecision {
                    requested: n,
                    precision: p,
                });
            }
        }
        Ok(self.get(n).cloned().unwrap_or_else(C::zero))
    }

    /// Lowers the precision to `min(prec, p)`.
    pub fn truncate(&self, p: i64) -> Self {
        let prec = min_prec(self.prec, Some(p));
        Self::new(self.val, self.coeffs.clone(), prec)
    }

    pub fn map(&self, f: impl FnMut(&C) -> C) -> Self {
        Self::new(self.val, self.coeffs.iter().map(f).collect(), self.prec)
    }

    fn combine(&self, other: &Self, f: impl Fn(Option<&C>, Option<&C>) -> C) -> Self {
        let prec = min_prec(self.prec, other.prec);
        let lo = match (self.is_zero(), other.is_zero()) {
            (true, true) => return Self::zero_with(prec),
            (true, false) => other.val,
            (false, true) => self.val,
            (false, false) => self.val.min(other.val),
        };
        let mut hi = self.end().max(other.end());
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let coeffs = (lo..hi.max(lo))
            .map(|n| f(self.get(n), other.get(n)))
            .collect();
        Self::new(lo, coeffs, prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| match (a, b) {
            (Some(x), Some(y)) => x.plus(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => C::zero(),
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| match (a, b) {
            (Some(x), Some(y)) => x.minus(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.negated(),
            (None, None) => C::zero(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(C::negated)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(|x| x.scaled(c))
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn scale_by(&self, c: &C) -> Self {
        self.map(|x| x.times(c))
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Laurent {
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let exact_zero = |s: &Self| s.is_zero() && s.prec.is_none();
        if exact_zero(self) || exact_zero(other) {
            return Self::zero();
        }
        let prec = min_prec(
            self.prec.map(|p| p + other.val),
            other.prec.map(|p| p + self.val),
        );
        if self.is_zero() || other.is_zero() {
            return Self::zero_with(prec);
        }
        let lo = self.val + other.val;
        let mut hi = lo + (self.coeffs.len() + other.coeffs.len() - 1) as i64;
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let (la, lb) = (self.coeffs.len() as i64, other.coeffs.len() as i64);
        let coeffs = (lo..hi.max(lo))
            .map(|n| {
                let d = n - lo;
                let i_lo = (d - (lb - 1)).max(0);
                let i_hi = d.min(la - 1);
                let mut acc = C::zero();
                for i in i_lo..=i_hi {
                    let t = self.coeffs[i as usize].times(&other.coeffs[(d - i) as usize]);
                    acc = acc.plus(&t);
                }
                acc
            })
            .collect();
        Self::new(lo, coeffs, prec)
    }

    /// Multiplicative inverse by the coefficient recurrence
    /// `b_n = -c_0^{-1} sum_{i=1}^{n} c_i b_{n-i}`.
    pub fn invert(&self) -> Result<Self> {
        let (val, coeffs, prec) = self.invert_raw()?;
        Ok(Self::new(val, coeffs, prec))
    }

    /// The inverse before canonicalization: every coefficient the recurrence
    /// produced, zeros included.
    pub(crate) fn invert_raw(&self) -> Result<(i64, Vec<C>, Option<i64>)> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        let c0_inv = self.coeffs[0].try_inverse()?;
        let v = self.val;
        let Some(p) = self.prec else {
            if self.coeffs.len() == 1 {
                return Ok((-v, vec![c0_inv], None));
            }
            return Err(Error::UnboundedExpansion);
        };
        let terms = (p - v) as usize;
        let mut b: Vec<C> = Vec::with_capacity(terms);
        for n in 0..terms {
            if n == 0 {
                b.push(c0_inv.clone());
                continue;
            }
            let mut acc = C::zero();
            for i in 1..=n.min(self.coeffs.len() - 1) {
                acc = acc.plus(&self.coeffs[i].times(&b[n - i]));
            }
            b.push(acc.times(&c0_inv).negated());
        }
        Ok((-v, b, Some(p - 2 * v)))
    }

    /// Integer power; negative exponents go through [`Laurent::invert`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `sum_n a^n / n!`, truncated at the precision of `a`.
    pub fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(match self.prec {
                Some(p) => Self::one().truncate(p),
                None => Self::one(),
            });
        }
        if self.val <= 0 {
            return Err(Error::PositiveValuationRequired(self.val));
        }
        let Some(p) = self.prec else {
            return Err(Error::UnboundedExpansion);
        };
        let mut sum = Self::one().truncate(p);
        let mut term = Self::one();
        let mut n = 1i64;
        while n * self.val < p {
            term = term.mul(self).scale(&rat(n).recip());
            sum = sum.add(&term);
            n += 1;
        }
        Ok(sum)
    }

    /// Formal derivative `d/dt`.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero_with(self.prec.map(|p| p - 1));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scaled(&rat(self.val + i as i64)))
            .collect();
        Self::new(self.val - 1, coeffs, self.prec.map(|p| p - 1))
    }

    /// The Euler operator `t d/dt`: multiplies the coefficient of `t^n` by `n`.
    pub fn euler(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scaled(&rat(self.val + i as i64)))
            .collect();
        Self::new(self.val, coeffs, self.prec)
    }

    /// The substitution `t -> t^k`.
    pub fn substitute_power(&self, k: u32) -> Self {
        assert!(k >= 1, "substitute_power needs k >= 1");
        let k = k as i64;
        if k == 1 {
            return self.clone();
        }
        let prec = self.prec.map(|p| k * p - (k - 1) * (-self.val).max(0));
        if self.is_zero() {
            return Self::zero_with(prec);
        }
        let mut coeffs = vec![C::zero(); (k as usize) * (self.coeffs.len() - 1) + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        Self::new(self.val * k, coeffs, prec)
    }

    /// True when both series have equal coefficients at every exponent below
    /// the smaller of the two precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let prec = min_prec(self.prec, other.prec);
        let lo = self.val.min(other.val);
        let mut hi = self.end().max(other.end());
        if let Some(p) = prec {
            hi = hi.min(p);
        }
        let zero = C::zero();
        (lo..hi).all(|n| {
            let a = self.get(n).unwrap_or(&zero);
            let b = other.get(n).unwrap_or(&zero);
            a.agrees(b)
        })
    }
}

impl<C: Coefficient + PartialEq> PartialEq for Laurent<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.val == other.val && self.prec == other.prec && self.coeffs == other.coeffs
    }
}

impl Coefficient for QLaurent {
    fn zero() -> Self {
        Laurent::zero()
    }
    fn one() -> Self {
        Laurent::one()
    }
    fn is_zero(&self) -> bool {
        Laurent::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scaled(&self, c: &Rat) -> Self {
        self.scale(c)
    }
    fn try_inverse(&self) -> Result<Self> {
        self.invert()
    }
    fn agrees(&self, other: &Self) -> bool {
        self.agrees_with(other)
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            let n = self.val + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})q")?,
                _ => write!(f, "({c})q^{n}")?,
            }
        }
        match self.prec {
            Some(p) if first => write!(f, "O(q^{p})"),
            Some(p) => write!(f, " + O(q^{p})"),
            None if first => write!(f, "0"),
            None => Ok(()),
        }
    }
}

//! Series in `z` whose coefficients are `q`-series ("z-outer, q-inner").

use num_traits::Zero;

use super::{min_prec, Coefficient, Laurent, QLaurent};
use crate::error::{Error, Result};
use crate::rat::{rat, Rat};

/// A truncated Laurent series in `z` with [`QLaurent`] coefficients.
///
/// All `z`-coefficients share one `q`-precision, stored once in `q_prec`;
/// construction truncates every inner series to it.
#[derive(Clone, Debug)]
pub struct BiSeries {
    z: Laurent<QLaurent>,
    q_prec: Option<i64>,
}

fn inner_min_prec(coeffs: &[QLaurent]) -> Option<i64> {
    coeffs
        .iter()
        .fold(None, |acc, c| min_prec(acc, c.precision()))
}

impl BiSeries {
    /// Builds a series from `z`-coefficients for exponents `z_val..`.
    /// The shared `q`-precision is the minimum of `q_prec` and the
    /// precisions of the supplied coefficients.
    pub fn new(
        z_val: i64,
        coeffs: Vec<QLaurent>,
        z_prec: Option<i64>,
        q_prec: Option<i64>,
    ) -> Self {
        let q = min_prec(q_prec, inner_min_prec(&coeffs));
        let coeffs = coeffs
            .into_iter()
            .map(|c| match q {
                Some(p) => c.truncate(p),
                None => c,
            })
            .collect();
        BiSeries {
            z: Laurent::new(z_val, coeffs, z_prec),
            q_prec: q,
        }
    }

    fn from_laurent(z: Laurent<QLaurent>, q_prec: Option<i64>) -> Self {
        let coeffs = z.coefficients().to_vec();
        Self::new(z.valuation(), coeffs, z.precision(), q_prec)
    }

    /// `sum_{z_val <= n < z_prec} f(n) z^n`, with `q`-precision `q_prec`.
    pub fn from_fn(z_val: i64, z_prec: i64, q_prec: i64, f: impl FnMut(i64) -> QLaurent) -> Self {
        let coeffs = (z_val..z_prec).map(f).collect();
        Self::new(z_val, coeffs, Some(z_prec), Some(q_prec))
    }

    pub fn zero() -> Self {
        BiSeries {
            z: Laurent::zero(),
            q_prec: None,
        }
    }

    /// Zero known for `z`-exponents below `z_prec` and `q`-exponents below `q_prec`.
    pub fn zero_to(z_prec: i64, q_prec: i64) -> Self {
        BiSeries {
            z: Laurent::zero_to(z_prec),
            q_prec: Some(q_prec),
        }
    }

    pub fn one() -> Self {
        Self::from_q(QLaurent::one())
    }

    /// A series constant in `z` (exact in `z`).
    pub fn from_q(c: QLaurent) -> Self {
        let q = c.precision();
        Self::new(0, vec![c], None, q)
    }

    /// The exact monomial `z^exp`.
    pub fn z_monomial(exp: i64) -> Self {
        Self::new(exp, vec![QLaurent::one()], None, None)
    }

    pub fn z_valuation(&self) -> i64 {
        self.z.valuation()
    }

    pub fn z_precision(&self) -> Option<i64> {
        self.z.precision()
    }

    pub fn q_precision(&self) -> Option<i64> {
        self.q_prec
    }

    pub fn is_zero(&self) -> bool {
        self.z.is_zero()
    }

    /// Stored `z`-coefficients for exponents `z_valuation()..`.
    pub fn z_coefficients(&self) -> &[QLaurent] {
        self.z.coefficients()
    }

    /// The `q`-series multiplying `z^n`.
    pub fn z_coeff(&self, n: i64) -> Result<QLaurent> {
        let c = self.z.coeff(n)?;
        Ok(match (c.is_zero(), self.q_prec) {
            (true, Some(p)) => QLaurent::zero_to(p),
            _ => c,
        })
    }

    /// The rational coefficient of `z^z_exp q^q_exp`.
    pub fn coeff(&self, z_exp: i64, q_exp: i64) -> Result<Rat> {
        self.z_coeff(z_exp)?.coeff(q_exp)
    }

    /// The `z`-series formed by the coefficients of `q^q_exp`.
    pub fn q_slice(&self, q_exp: i64) -> Result<Laurent<Rat>> {
        if let Some(p) = self.q_prec {
            if q_exp >= p {
                return Err(Error::InsufficientPrecision {
                    requested: q_exp,
                    precision: p,
                });
            }
        }
        let coeffs = self
            .z
            .coefficients()
            .iter()
            .map(|c| c.coeff(q_exp))
            .collect::<Result<Vec<_>>>()?;
        Ok(Laurent::new(self.z.valuation(), coeffs, self.z.precision()))
    }

    /// Lowest `q`-valuation over all `z`-coefficients; `None` for the exact zero.
    fn min_q_val(&self) -> Option<i64> {
        let v = self
            .z
            .coefficients()
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.valuation())
            .min();
        v.or(self.q_prec)
    }

    fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.z.precision().is_none()
    }

    pub fn truncate(&self, z_prec: i64, q_prec: i64) -> Self {
        Self::from_laurent(self.z.truncate(z_prec), min_prec(self.q_prec, Some(q_prec)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_laurent(self.z.add(&other.z), min_prec(self.q_prec, other.q_prec))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_laurent(self.z.sub(&other.z), min_prec(self.q_prec, other.q_prec))
    }

    pub fn neg(&self) -> Self {
        Self::from_laurent(self.z.neg(), self.q_prec)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_laurent(self.z.scale(c), self.q_prec)
    }

    /// Multiplication by `z^k`.
    pub fn shift_z(&self, k: i64) -> Self {
        Self::from_laurent(self.z.shift(k), self.q_prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let q = match (self.min_q_val(), other.min_q_val()) {
            (Some(va), Some(vb)) => {
                min_prec(self.q_prec.map(|p| p + vb), other.q_prec.map(|p| p + va))
            }
            _ => min_prec(self.q_prec, other.q_prec),
        };
        Self::from_laurent(self.z.mul(&other.z), q)
    }

    /// Inverse; the leading `z`-coefficient must be an invertible `q`-series.
    pub fn invert(&self) -> Result<Self> {
        let (val, coeffs, prec) = self.z.invert_raw()?;
        let q = inner_min_prec(&coeffs);
        Ok(Self::new(val, coeffs, prec, q))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.invert()?.pow(-e);
        }
        let mut result = Self::one();
        for _ in 0..e {
            result = result.mul(self);
        }
        Ok(result)
    }

    /// `exp` in the outer variable; needs strictly positive `z`-valuation.
    pub fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            let one = match self.z.precision() {
                Some(zp) => Laurent::one().truncate(zp),
                None => Laurent::one(),
            };
            return Ok(Self::from_laurent(one, self.q_prec));
        }
        let v = self.z_valuation();
        if v <= 0 {
            return Err(Error::PositiveValuationRequired(v));
        }
        let Some(p) = self.z.precision() else {
            return Err(Error::UnboundedExpansion);
        };
        let mut sum = Self::from_laurent(Laurent::one().truncate(p), self.q_prec);
        let mut term = Self::one();
        let mut n = 1i64;
        while n * v < p {
            term = term.mul(self).scale(&rat(n).recip());
            sum = sum.add(&term);
            n += 1;
        }
        Ok(sum)
    }

    /// `D_q = q d/dq` applied to every `z`-coefficient.
    pub fn dq(&self) -> Self {
        Self::from_laurent(self.z.map(|c| c.euler()), self.q_prec)
    }

    /// Formal `d/dz`; the `z`-precision drops by one.
    pub fn dz(&self) -> Self {
        Self::from_laurent(self.z.derivative(), self.q_prec)
    }

    /// Applies `f` to every `z`-coefficient.
    pub fn map_q(&self, f: impl FnMut(&QLaurent) -> QLaurent) -> Self {
        Self::from_laurent(self.z.map(f), self.q_prec)
    }

    /// The substitution `z -> -z`.
    pub fn reflect_z(&self) -> Self {
        let v = self.z_valuation();
        let coeffs = self
            .z
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (v + i as i64) % 2 == 0 {
                    c.clone()
                } else {
                    c.neg()
                }
            })
            .collect();
        Self::new(v, coeffs, self.z.precision(), self.q_prec)
    }

    fn parity_vanishes(&self, odd: bool) -> bool {
        let v = self.z_valuation();
        self.z
            .coefficients()
            .iter()
            .enumerate()
            .all(|(i, c)| ((v + i as i64).rem_euclid(2) == 1) != odd || c.is_zero())
    }

    /// All odd `z`-coefficients vanish.
    pub fn is_z_even(&self) -> bool {
        self.parity_vanishes(true)
    }

    /// All even `z`-coefficients vanish.
    pub fn is_z_odd(&self) -> bool {
        self.parity_vanishes(false)
    }

    /// Equality of all coefficients inside the common precision window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let zp = min_prec(self.z_precision(), other.z_precision());
        let qp = min_prec(self.q_prec, other.q_prec);
        let cut = |s: &Self| {
            let z = match zp {
                Some(p) => s.z.truncate(p),
                None => s.z.clone(),
            };
            Self::from_laurent(z, min_prec(s.q_prec, qp))
        };
        let (a, b) = (cut(self), cut(other));
        let d = a.sub(&b);
        d.is_zero()
    }
}

impl PartialEq for BiSeries {
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.q_prec == other.q_prec && self.z == other.z
    }
}

impl Coefficient for BiSeries {
    fn zero() -> Self {
        BiSeries::zero()
    }
    fn one() -> Self {
        BiSeries::one()
    }
    fn is_zero(&self) -> bool {
        BiSeries::is_zero(self)
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

impl BiSeries {
    /// Number of stored `(z, q)` coefficients that are nonzero.
    pub fn nonzero_terms(&self) -> usize {
        self.z
            .coefficients()
            .iter()
            .map(|c| {
                c.coefficients()
                    .iter()
                    .filter(|x| !Zero::is_zero(*x))
                    .count()
            })
            .sum()
    }
}

//! The signed multiple cover transform for stable-pairs invariants.
//!
//! Coefficient form:
//! `<..>_{ch3, beta} = sum_{k | (ch3, beta)} (-1)^{(k-1) ch3/k} k^nu <..>_{ch3/k, phi_k(beta/k)}`.
//!
//! Series form, for partition functions `Z(p) = sum_{ch3} (-p)^{ch3} <..>_{ch3}`:
//! `Z_beta(p) = sum_{k | r} k^e Z_{phi_k(beta/k)}(p^k)`; the sign of the
//! coefficient form is absorbed by the `(-p)` convention.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{int_pow, sign_pow, Rat};
use crate::surface::divisors;

/// Whether coefficient data holds invariants `<..>_{ch3}` or coefficients of
/// `p^{ch3}` in the partition function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignConvention {
    CoefficientLevel,
    SeriesLevel,
}

/// Coefficients indexed by `ch3` on the window `[lo, hi)`; everything outside
/// the window is unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLaurent {
    lo: i64,
    coeffs: Vec<Rat>,
}

impl PLaurent {
    pub fn new(lo: i64, coeffs: Vec<Rat>) -> Self {
        PLaurent { lo, coeffs }
    }

    pub fn from_fn(lo: i64, hi: i64, f: impl FnMut(i64) -> Rat) -> Self {
        PLaurent::new(lo, (lo..hi.max(lo)).map(f).collect())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, ch3: i64) -> Option<&Rat> {
        if ch3 < self.lo {
            return None;
        }
        self.coeffs.get((ch3 - self.lo) as usize)
    }

    /// Multiplies the coefficient at `ch3` by `(-1)^{ch3}`; converts between
    /// the two sign conventions in either direction.
    pub fn flip_signs(&self) -> Self {
        PLaurent::from_fn(self.lo, self.hi(), |c| {
            sign_pow(c) * &self.coeffs[(c - self.lo) as usize]
        })
    }

    fn in_convention(&self, from: SignConvention, to: SignConvention) -> Self {
        if from == to {
            self.clone()
        } else {
            self.flip_signs()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtContext {
    pub r: u64,
    /// The exponent `nu` for each `k | r`.
    pub nu: BTreeMap<u64, i64>,
    /// Convention of the supplied primitive data.
    pub convention: SignConvention,
}

impl PtContext {
    pub fn new(r: u64, nu: BTreeMap<u64, i64>, convention: SignConvention) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("divisibility must be >= 1".into()));
        }
        Ok(PtContext { r, nu, convention })
    }

    /// The same exponent for every divisor of `r`.
    pub fn uniform(r: u64, nu: i64, convention: SignConvention) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("divisibility must be >= 1".into()));
        }
        let nu = divisors(r).into_iter().map(|k| (k, nu)).collect();
        Self::new(r, nu, convention)
    }

    fn nu_for(&self, k: u64) -> Result<i64> {
        self.nu
            .get(&k)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("no exponent nu supplied for k = {k}")))
    }

    /// The common exponent, if `nu` does not depend on `k`.
    pub fn uniform_exponent(&self) -> Result<i64> {
        let mut values = divisors(self.r).into_iter().map(|k| self.nu_for(k));
        let first = values.next().expect("1 divides r")?;
        for v in values {
            if v? != first {
                return Err(Error::InvalidInput(
                    "the series form needs an exponent independent of k".into(),
                ));
            }
        }
        Ok(first)
    }
}

/// The divisors `k` of `gcd(r, ch3)` (all `k | r` when `ch3 = 0`) with their
/// weights `(-1)^{(k-1) ch3/k} k^{nu(k)}`.
pub fn pt_mcf_weights(ch3: i64, ctx: &PtContext) -> Result<Vec<(u64, Rat)>> {
    let g = (ctx.r as i64).gcd(&ch3) as u64;
    divisors(g)
        .into_iter()
        .map(|k| {
            let ki = k as i64;
            let sign = sign_pow((ki - 1) * (ch3 / ki));
            Ok((k, sign * int_pow(ki, ctx.nu_for(k)?)))
        })
        .collect()
}

/// Coefficient-level transform: the imprimitive invariant at `ch3`.
pub fn pt_mcf_coefficient(
    ch3: i64,
    ctx: &PtContext,
    primitive: &BTreeMap<u64, PLaurent>,
) -> Result<Rat> {
    let mut total = Rat::zero();
    for (k, weight) in pt_mcf_weights(ch3, ctx)? {
        let data = primitive
            .get(&k)
            .ok_or(Error::MissingPrimitiveValue { k, at: Some(ch3) })?;
        let at = ch3 / k as i64;
        let raw = data
            .coeff(at)
            .ok_or(Error::MissingPrimitiveValue { k, at: Some(ch3) })?;
        let value = match ctx.convention {
            SignConvention::CoefficientLevel => raw.clone(),
            SignConvention::SeriesLevel => sign_pow(at) * raw,
        };
        total += weight * value;
    }
    Ok(total)
}

/// The widest window `[lo, hi)` on which every term `Z_k(p^k)` is known.
pub fn output_window(r: u64, primitive: &BTreeMap<u64, PLaurent>) -> Result<(i64, i64)> {
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for k in divisors(r) {
        let data = primitive
            .get(&k)
            .ok_or(Error::MissingPrimitiveValue { k, at: None })?;
        if data.hi() <= data.lo() {
            return Err(Error::WindowMismatch(format!(
                "primitive data for k = {k} is empty"
            )));
        }
        let ki = k as i64;
        // exponents that are not multiples of k are known zeros of Z_k(p^k)
        lo = lo.max(ki * (data.lo() - 1) + 1);
        hi = hi.min(ki * data.hi());
    }
    if lo >= hi {
        return Err(Error::WindowMismatch(format!(
            "primitive windows have empty intersection [{lo}, {hi})"
        )));
    }
    Ok((lo, hi))
}

/// Series-level transform `sum_{k | r} k^e Z_k(p^k)`, returned in the series
/// convention. `target`, when given, must lie inside the computable window.
pub fn pt_mcf_series(
    ctx: &PtContext,
    primitive: &BTreeMap<u64, PLaurent>,
    target: Option<(i64, i64)>,
) -> Result<PLaurent> {
    let e = ctx.uniform_exponent()?;
    let (mut lo, mut hi) = output_window(ctx.r, primitive)?;
    if let Some((tlo, thi)) = target {
        if tlo < lo || thi > hi {
            return Err(Error::WindowMismatch(format!(
                "target [{tlo}, {thi}) exceeds the computable window [{lo}, {hi})"
            )));
        }
        (lo, hi) = (tlo, thi);
    }
    let series: BTreeMap<u64, PLaurent> = primitive
        .iter()
        .map(|(&k, p)| {
            (
                k,
                p.in_convention(ctx.convention, SignConvention::SeriesLevel),
            )
        })
        .collect();
    let ks = divisors(ctx.r);
    Ok(PLaurent::from_fn(lo, hi, |n| {
        let mut acc = Rat::zero();
        for &k in &ks {
            let ki = k as i64;
            if n % ki == 0 {
                let c = series[&k].coeff(n / ki).expect("inside the output window");
                acc += int_pow(ki, e) * c;
            }
        }
        acc
    }))
}

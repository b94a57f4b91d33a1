//! Point/Hodge invariants `<tau_0(p)^m lambda_{g-m}>_{g, beta}` of K3 and
//! abelian surfaces, and the multiple cover formula for imprimitive classes.
//!
//! Primitive classes `beta_{2h-2,1}` are read off closed generating series:
//! the invariant is the coefficient of `z^{2g-2} q^{h-1}` in
//! `S^m / (Theta^2 Delta)` (K3) or `m S^{m-1}` (abelian).

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{fit, FormRequest, Forms, SMethod};
use crate::rat::{int_pow, rat, Rat};
use crate::series::BiSeries;
use crate::surface::{
    divisors, is_effective_primitive_image, mcf_exponent, CohDegree, CurveClass, SurfaceKind,
};

/// `<tau_0(p)^points lambda_{g-points}>` in the class of square `r^2 (2h - 2)`
/// and divisibility `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointHodgeQuery {
    #[serde(rename = "surface", with = "kind_serde")]
    pub kind: SurfaceKind,
    #[serde(rename = "genus")]
    pub g: i64,
    pub points: i64,
    pub h: i64,
    #[serde(rename = "div", default = "one")]
    pub r: u64,
}

fn one() -> u64 {
    1
}

mod kind_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::surface::SurfaceKind;

    pub fn serialize<S: Serializer>(k: &SurfaceKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&k.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SurfaceKind, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PointHodgeQuery {
    pub fn new(kind: SurfaceKind, g: i64, points: i64, h: i64, r: u64) -> Result<Self> {
        let q = PointHodgeQuery {
            kind,
            g,
            points,
            h,
            r,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g < 0 {
            return Err(Error::InvalidInput(format!(
                "genus {} must be >= 0",
                self.g
            )));
        }
        if self.points < 0 {
            return Err(Error::InvalidInput(format!(
                "number of points {} must be >= 0",
                self.points
            )));
        }
        if self.r == 0 {
            return Err(Error::InvalidInput("divisibility must be >= 1".into()));
        }
        Ok(())
    }
}

/// `S^m / (Theta^2 Delta)` to the requested orders.
pub fn k3_point_hodge_series(
    forms: &Forms,
    m: i64,
    z_order: i64,
    q_order: i64,
) -> Result<BiSeries> {
    if m < 0 {
        return Err(Error::InvalidInput(format!(
            "number of points {m} must be >= 0"
        )));
    }
    let req = FormRequest::new(q_order, z_order)?;
    let inner = FormRequest::new(q_order + 2, z_order + 3)?;
    let theta = forms.theta(inner)?;
    let delta = forms.delta(inner.q_order)?;
    let base = theta.pow(-2)?.mul(&BiSeries::from_q(delta.invert()?));
    let s = forms.s_series(inner, SMethod::DivisorSum)?;
    fit(&s.pow(m)?.mul(&base), req)
}

/// `m S^{m-1}` to the requested orders.
pub fn abelian_point_hodge_series(
    forms: &Forms,
    m: i64,
    z_order: i64,
    q_order: i64,
) -> Result<BiSeries> {
    let req = FormRequest::new(q_order, z_order)?;
    match m {
        _ if m < 0 => Err(Error::InvalidInput(format!(
            "number of points {m} must be >= 0"
        ))),
        0 => Ok(BiSeries::zero_to(z_order, q_order)),
        1 => fit(&BiSeries::one(), req),
        _ => {
            let s = forms.s_series(req, SMethod::DivisorSum)?;
            fit(&s.pow(m - 1)?.scale(&rat(m)), req)
        }
    }
}

pub fn point_hodge_series(
    forms: &Forms,
    kind: SurfaceKind,
    m: i64,
    z_order: i64,
    q_order: i64,
) -> Result<BiSeries> {
    match kind {
        SurfaceKind::K3 => k3_point_hodge_series(forms, m, z_order, q_order),
        SurfaceKind::Abelian => abelian_point_hodge_series(forms, m, z_order, q_order),
    }
}

/// The invariant of a primitive class (`r = 1`).
pub fn primitive_point_hodge(forms: &Forms, query: &PointHodgeQuery) -> Result<Rat> {
    query.validate()?;
    if query.r != 1 {
        return Err(Error::InvalidInput(format!(
            "primitive evaluation needs divisibility 1, got {}",
            query.r
        )));
    }
    // lambda_{g-m} with m > g is zero
    if query.points > query.g {
        return Ok(Rat::zero());
    }
    let z_exp = 2 * query.g - 2;
    let q_exp = query.h - 1;
    let mut z_order = 2 * query.g + 2;
    let mut q_order = (query.h + 2).max(1);
    let mut retried = false;
    loop {
        let attempt = point_hodge_series(forms, query.kind, query.points, z_order, q_order)
            .and_then(|s| s.coeff(z_exp, q_exp));
        match attempt {
            Err(Error::InsufficientPrecision { .. }) if !retried => {
                retried = true;
                z_order *= 2;
                q_order *= 2;
            }
            other => return other,
        }
    }
}

/// One summand `k^e <...>_{beta_{(r/k)^2 (2h-2), 1}}` of the multiple cover formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McfSummand {
    pub k: u64,
    pub effective: bool,
    /// `h'` of the primitive class, `2h' - 2 = (r/k)^2 (2h - 2)`.
    pub primitive_h: i64,
    pub weight: Rat,
    /// The primitive invariant; zero for non-effective summands.
    pub primitive_value: Rat,
}

/// All summands of the multiple cover formula, one per divisor of `r`.
pub fn mcf_point_hodge_terms(forms: &Forms, query: &PointHodgeQuery) -> Result<Vec<McfSummand>> {
    query.validate()?;
    let m = 2 * query.h - 2;
    let exponent = 2 * query.g - 3 + 2 * query.points;
    divisors(query.r)
        .into_iter()
        .map(|k| {
            let k_ratio = query.r / k;
            let square = (k_ratio * k_ratio) as i64 * m;
            if square % 2 != 0 {
                return Err(Error::NonIntegralSquare { k });
            }
            let primitive_h = square / 2 + 1;
            let effective = is_effective_primitive_image(query.kind, m, k_ratio);
            let primitive_value = if effective {
                let prim = PointHodgeQuery {
                    h: primitive_h,
                    r: 1,
                    ..*query
                };
                primitive_point_hodge(forms, &prim)?
            } else {
                Rat::zero()
            };
            Ok(McfSummand {
                k,
                effective,
                primitive_h,
                weight: int_pow(k as i64, exponent),
                primitive_value,
            })
        })
        .collect()
}

/// `<tau_0(p)^m lambda_{g-m}>_{g, beta_{2h-2, r}} = sum_{k | r} k^{2g-3+2m} <...>_{g, beta_{(r/k)^2 (2h-2), 1}}`.
pub fn mcf_point_hodge(forms: &Forms, query: &PointHodgeQuery) -> Result<Rat> {
    Ok(mcf_point_hodge_terms(forms, query)?
        .iter()
        .map(|t| &t.weight * &t.primitive_value)
        .sum())
}

/// The multiple cover formula for arbitrary insertions with caller-supplied
/// primitive invariants `values[k]` (the invariant of `phi_k(beta/k)`).
/// Summands whose primitive class is not effective vanish and need no value.
pub fn general_mcf_transform(
    class: &CurveClass,
    g: i64,
    degrees: &[CohDegree],
    values: &BTreeMap<u64, Rat>,
) -> Result<Rat> {
    let exponent = mcf_exponent(g, degrees);
    let mut total = Rat::zero();
    for k in divisors(class.divisibility()) {
        let k_ratio = class.divisibility() / k;
        if !is_effective_primitive_image(class.kind, class.m(), k_ratio) {
            continue;
        }
        let value = values
            .get(&k)
            .ok_or(Error::MissingPrimitiveValue { k, at: None })?;
        if !exponent.is_integer() {
            return Err(Error::NonIntegralExponent(format!(
                "k = {k} survives but the exponent 2g - 3 + sum deg = {exponent} is fractional"
            )));
        }
        let e = crate::rat::as_i64(&exponent).expect("exponent fits in i64");
        total += int_pow(k as i64, e) * value;
    }
    Ok(total)
}

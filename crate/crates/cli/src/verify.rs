//! The built-in identity suite behind `surfgw verify`.

use std::collections::BTreeMap;

use surfgw::forms::{FormRequest, Forms, SMethod};
use surfgw::gw::{mcf_point_hodge, primitive_point_hodge, PointHodgeQuery};
use surfgw::pt::{pt_mcf_coefficient, pt_mcf_series, PLaurent, PtContext, SignConvention};
use surfgw::rat::{rat, ratio, sign_pow};
use surfgw::surface::SurfaceKind;
use surfgw::Result;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<bool>) -> Check {
    match outcome {
        Ok(passed) => Check {
            name,
            passed,
            detail: String::new(),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn s_agreement(f: &Forms) -> Result<bool> {
    let req = FormRequest::new(8, 9)?;
    Ok(*f.s_series(req, SMethod::LogDerivative)? == *f.s_series(req, SMethod::DivisorSum)?)
}

fn phi_one_is_theta(f: &Forms) -> Result<bool> {
    let req = FormRequest::new(6, 7)?;
    Ok(*f.phi(1, req)? == *f.theta(req)?)
}

fn phi_nonpositive_vanish(f: &Forms) -> Result<bool> {
    let req = FormRequest::new(6, 7)?;
    for m in [0, -1, -2] {
        if !f.phi(m, req)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn ode_residuals(f: &Forms) -> Result<bool> {
    let req = FormRequest::new(6, 7)?;
    for m in 1..=2 {
        for n in 1..=2 {
            let phi2 = f.phi2(m, n, req)?;
            if !phi2.dq().sub(&f.phi2_rhs(m, n, req)?).is_zero() || !phi2.q_slice(0)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn mcf_identity(f: &Forms) -> Result<bool> {
    for kind in [SurfaceKind::K3, SurfaceKind::Abelian] {
        for g in 0..3 {
            for points in 0..3 {
                for h in -1..4 {
                    let q = PointHodgeQuery::new(kind, g, points, h, 1)?;
                    if mcf_point_hodge(f, &q)? != primitive_point_hodge(f, &q)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    let q = PointHodgeQuery::new(SurfaceKind::K3, 0, 0, 0, 2)?;
    Ok(mcf_point_hodge(f, &q)? == ratio(1, 8))
}

fn pt_coherence() -> Result<bool> {
    for r in [1u64, 2, 3, 4, 6] {
        for nu in [-1, 0, 3] {
            let ctx = PtContext::uniform(r, nu, SignConvention::CoefficientLevel)?;
            // deterministic but irregular data
            let primitive: BTreeMap<u64, PLaurent> = surfgw::surface::divisors(r)
                .into_iter()
                .map(|k| {
                    let kk = k as i64;
                    (
                        k,
                        PLaurent::from_fn(-1, 8, |c| ratio((c * 7 + kk * 3) % 11 - 5, kk + 1)),
                    )
                })
                .collect();
            let series = pt_mcf_series(&ctx, &primitive, None)?;
            for n in series.lo()..series.hi() {
                let unwound = sign_pow(n) * series.coeff(n).expect("inside window");
                if unwound != pt_mcf_coefficient(n, &ctx, &primitive)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn kkv_row(f: &Forms) -> Result<bool> {
    let s = surfgw::gw::k3_point_hodge_series(f, 0, 1, 5)?;
    let row = (-1..5)
        .map(|n| s.coeff(-2, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(row == [1, 24, 324, 3200, 25650, 176256].map(rat))
}

pub fn run_all() -> Vec<Check> {
    let f = Forms::global();
    vec![
        check("s-two-formulas", s_agreement(f)),
        check("phi1-equals-theta", phi_one_is_theta(f)),
        check("phi-nonpositive-vanish", phi_nonpositive_vanish(f)),
        check("phi2-ode-residuals", ode_residuals(f)),
        check("kkv-row", kkv_row(f)),
        check("mcf-r1-identity", mcf_identity(f)),
        check("pt-convention-coherence", pt_coherence()),
    ]
}

//! Modular and quasi-Jacobi forms as exact expansions.
//!
//! All bivariate forms are series in `z` (outer) with `q`-series coefficients.
//! Every public constructor returns a series known exactly for `z`-exponents
//! below `z_order` and `q`-exponents below `q_order`; internal working orders
//! are raised as needed and the result is cut back, so callers never see a
//! silently truncated coefficient.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{binomial, factorial, rat, Rat};
use crate::series::{BiSeries, Laurent, QLaurent};
use crate::surface::divisors;

/// Requested output orders: coefficients for `q^k`, `k < q_order` and
/// `z^n`, `n < z_order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormRequest {
    pub q_order: i64,
    pub z_order: i64,
}

impl FormRequest {
    pub fn new(q_order: i64, z_order: i64) -> Result<Self> {
        if q_order < 1 || z_order < 1 {
            return Err(Error::InvalidInput(format!(
                "form orders must be >= 1 (q_order = {q_order}, z_order = {z_order})"
            )));
        }
        Ok(FormRequest { q_order, z_order })
    }

    fn widen(self, dz: i64, dq: i64) -> Self {
        FormRequest {
            q_order: self.q_order + dq,
            z_order: self.z_order + dz,
        }
    }
}

/// How to expand `S(z, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SMethod {
    /// `-D_q(Theta) / Theta`.
    LogDerivative,
    /// The divisor double sum with `e^{dz} - 2 + e^{-dz}` Taylor-expanded.
    DivisorSum,
}

/// Cuts `s` down to the requested orders, failing if it is not known that far.
pub fn fit(s: &BiSeries, req: FormRequest) -> Result<BiSeries> {
    let out = s.truncate(req.z_order, req.q_order);
    if let Some(p) = out.z_precision() {
        if p < req.z_order {
            return Err(Error::InsufficientPrecision {
                requested: req.z_order - 1,
                precision: p,
            });
        }
    }
    if let Some(p) = out.q_precision() {
        if p < req.q_order {
            return Err(Error::InsufficientPrecision {
                requested: req.q_order - 1,
                precision: p,
            });
        }
    }
    Ok(out)
}

/// `sigma_k(n) = sum_{d | n} d^k`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| num_traits::pow(BigInt::from(d), k as usize))
        .sum()
}

/// Divides the coefficient of `q^k` by `k`; the inverse of `D_q` on `O(q)` series.
fn integrate_q(c: &QLaurent) -> QLaurent {
    let v = c.valuation();
    let coeffs = c
        .coefficients()
        .iter()
        .enumerate()
        .map(|(i, x)| x / rat(v + i as i64))
        .collect();
    Laurent::new(v, coeffs, c.precision())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Eisenstein(u32, i64),
    Delta(i64),
    Theta(FormRequest),
    S(SMethod, FormRequest),
    ThetaRatio(FormRequest),
    Phi(i64, FormRequest),
    Phi2(i64, i64, FormRequest),
}

#[derive(Clone)]
enum Cached {
    Q(Arc<QLaurent>),
    Bi(Arc<BiSeries>),
}

/// Memoizing factory for the forms. Values are immutable and shared; the
/// cache tolerates concurrent readers and racing writers (a race only costs a
/// duplicate computation).
#[derive(Default)]
pub struct Forms {
    memo: RwLock<HashMap<Key, Cached>>,
    bernoulli: RwLock<Vec<Rat>>,
}

impl Forms {
    pub fn new() -> Self {
        Self::default()
    }

    /// A process-wide shared instance.
    pub fn global() -> &'static Forms {
        static GLOBAL: OnceLock<Forms> = OnceLock::new();
        GLOBAL.get_or_init(Forms::new)
    }

    fn lookup(&self, key: &Key) -> Option<Cached> {
        self.memo
            .read()
            .expect("form cache poisoned")
            .get(key)
            .cloned()
    }

    fn store(&self, key: Key, value: Cached) -> Cached {
        let mut memo = self.memo.write().expect("form cache poisoned");
        memo.entry(key).or_insert(value).clone()
    }

    fn memo_q(&self, key: Key, f: impl FnOnce() -> Result<QLaurent>) -> Result<Arc<QLaurent>> {
        if let Some(Cached::Q(v)) = self.lookup(&key) {
            return Ok(v);
        }
        match self.store(key, Cached::Q(Arc::new(f()?))) {
            Cached::Q(v) => Ok(v),
            Cached::Bi(_) => unreachable!("key kinds are disjoint"),
        }
    }

    fn memo_bi(&self, key: Key, f: impl FnOnce() -> Result<BiSeries>) -> Result<Arc<BiSeries>> {
        if let Some(Cached::Bi(v)) = self.lookup(&key) {
            return Ok(v);
        }
        match self.store(key, Cached::Bi(Arc::new(f()?))) {
            Cached::Bi(v) => Ok(v),
            Cached::Q(_) => unreachable!("key kinds are disjoint"),
        }
    }

    /// Bernoulli number `B_n` (with `B_1 = -1/2`) from
    /// `sum_{j=0}^{m} binom(m+1, j) B_j = 0`.
    pub fn bernoulli(&self, n: usize) -> Rat {
        if let Some(b) = self
            .bernoulli
            .read()
            .expect("bernoulli cache poisoned")
            .get(n)
        {
            return b.clone();
        }
        let mut table = self.bernoulli.write().expect("bernoulli cache poisoned");
        if table.is_empty() {
            table.push(Rat::one());
        }
        while table.len() <= n {
            let m = table.len() as u64;
            let s: Rat = table
                .iter()
                .enumerate()
                .map(|(j, b)| b * Rat::from_integer(binomial(m + 1, j as u64)))
                .sum();
            table.push(-s / rat(m as i64 + 1));
        }
        table[n].clone()
    }

    /// `G_{2k}(q) = -B_{2k}/(2 * 2k) + sum_{n>=1} sigma_{2k-1}(n) q^n`, known below `q_order`.
    pub fn eisenstein(&self, weight: u32, q_order: i64) -> Result<Arc<QLaurent>> {
        if weight < 2 || weight % 2 == 1 {
            return Err(Error::InvalidInput(format!(
                "Eisenstein weight must be even and >= 2, got {weight}"
            )));
        }
        self.memo_q(Key::Eisenstein(weight, q_order), || {
            let constant = -self.bernoulli(weight as usize) / rat(2 * weight as i64);
            Ok(Laurent::from_fn(0, q_order, |n| {
                if n == 0 {
                    constant.clone()
                } else {
                    Rat::from_integer(sigma(weight - 1, n as u64))
                }
            }))
        })
    }

    /// `Delta(q) = q prod_{n>=1} (1 - q^n)^24`, known below `q_order`.
    pub fn delta(&self, q_order: i64) -> Result<Arc<QLaurent>> {
        self.memo_q(Key::Delta(q_order), || {
            let inner = q_order - 1;
            let mut euler = QLaurent::one().truncate(inner);
            for n in 1..inner {
                let factor = QLaurent::one().sub(&QLaurent::monomial(Rat::one(), n));
                euler = euler.mul(&factor);
            }
            Ok(euler.pow(24)?.shift(1))
        })
    }

    /// The normalized odd theta function
    /// `Theta = z exp(-2 sum_{k>=1} G_{2k} z^{2k} / (2k)!)`.
    pub fn theta(&self, req: FormRequest) -> Result<Arc<BiSeries>> {
        self.memo_bi(Key::Theta(req), || {
            let z_inner = req.z_order - 1;
            let mut terms: Vec<QLaurent> = vec![QLaurent::zero(); z_inner.max(0) as usize];
            for k2 in (2..z_inner).step_by(2) {
                let g = self.eisenstein(k2 as u32, req.q_order)?;
                let c = rat(-2) / Rat::from_integer(factorial(k2 as u64));
                terms[k2 as usize] = g.scale(&c);
            }
            let arg = BiSeries::new(0, terms, Some(z_inner), Some(req.q_order));
            Ok(arg.exp()?.shift_z(1))
        })
    }

    /// `S(z, q) = -q d/dq log Theta(z, q)`.
    pub fn s_series(&self, req: FormRequest, method: SMethod) -> Result<Arc<BiSeries>> {
        self.memo_bi(Key::S(method, req), || match method {
            SMethod::LogDerivative => {
                let theta = self.theta(req.widen(1, 0))?;
                let s = theta.dq().mul(&theta.invert()?).neg();
                fit(&s, req)
            }
            SMethod::DivisorSum => Ok(s_divisor_sum(req)),
        })
    }

    /// `D_q^2(Theta) / Theta`; its `q^0` part vanishes.
    pub fn dq2_theta_over_theta(&self, req: FormRequest) -> Result<Arc<BiSeries>> {
        self.memo_bi(Key::ThetaRatio(req), || {
            let theta = self.theta(req.widen(1, 0))?;
            let r = theta.dq().dq().mul(&theta.invert()?);
            fit(&r, req)
        })
    }

    /// `phi_m(z) = Res_{x=0} (Theta(x+z) / Theta(x))^m`.
    ///
    /// With `Theta(x) = x u(x)` the residue is the coefficient of `x^{m-1}` in
    /// `(Theta(x+z) / u(x))^m`, an `x`-power series whose constant term
    /// `Theta(z)` is a unit; for `m <= 0` that coefficient lies below the
    /// valuation and the form vanishes.
    pub fn phi(&self, m: i64, req: FormRequest) -> Result<Arc<BiSeries>> {
        self.memo_bi(Key::Phi(m, req), || {
            let x_order = m.max(1);
            let theta = self.theta(req.widen(x_order, 0))?;

            // Theta(x + z) = sum_i Theta^{(i)}(z) x^i / i!
            let mut shifted = Vec::with_capacity(x_order as usize);
            let mut deriv = (*theta).clone();
            for i in 0..x_order {
                if i > 0 {
                    deriv = deriv.dz();
                }
                let c = Rat::from_integer(factorial(i as u64)).recip();
                shifted.push(deriv.scale(&c));
            }
            let shifted = Laurent::new(0, shifted, Some(x_order));

            // u(x) = Theta(x) / x, with coefficients independent of z
            let unit = (1..=x_order)
                .map(|j| theta.z_coeff(j).map(BiSeries::from_q))
                .collect::<Result<Vec<_>>>()?;
            let unit = Laurent::new(0, unit, Some(x_order));

            let ratio = shifted.mul(&unit.invert()?);
            let residue = ratio.pow(m)?.coeff(m - 1)?;
            fit(&residue, req)
        })
    }

    /// The right-hand side `m n phi_m phi_n D_q^2(Theta)/Theta + D_q(phi_m) D_q(phi_n)`
    /// of the differential equation defining `phi_{m,n}`.
    pub fn phi2_rhs(&self, m: i64, n: i64, req: FormRequest) -> Result<BiSeries> {
        let pm = self.phi(m, req)?;
        let pn = self.phi(n, req)?;
        let ratio = self.dq2_theta_over_theta(req)?;
        let first = pm.mul(&pn).mul(&ratio).scale(&rat(m * n));
        let second = pm.dq().mul(&pn.dq());
        fit(&first.add(&second), req)
    }

    /// `phi_{m,n}`: the solution of `D_q phi_{m,n} = R(m, n)` with `phi_{m,n} = O(q)`.
    pub fn phi2(&self, m: i64, n: i64, req: FormRequest) -> Result<Arc<BiSeries>> {
        let (a, b) = if m <= n { (m, n) } else { (n, m) };
        self.memo_bi(Key::Phi2(a, b, req), || {
            let rhs = self.phi2_rhs(a, b, req)?;
            let v = rhs.z_valuation();
            for (i, c) in rhs.z_coefficients().iter().enumerate() {
                if !c.is_zero() && c.valuation() <= 0 {
                    return Err(Error::InconsistentOde(format!(
                        "(m, n) = ({m}, {n}): coefficient of z^{} q^{} is {}",
                        v + i as i64,
                        c.valuation(),
                        c.coefficients()[0]
                    )));
                }
            }
            Ok(rhs.map_q(integrate_q))
        })
    }
}

fn s_divisor_sum(req: FormRequest) -> BiSeries {
    // coefficient of z^{2j} q^n is sum_{d | n} (n/d) * 2 d^{2j} / (2j)!
    BiSeries::from_fn(0, req.z_order, req.q_order, |zexp| {
        if zexp < 2 || zexp % 2 == 1 {
            return QLaurent::zero();
        }
        let fact = Rat::from_integer(factorial(zexp as u64));
        Laurent::from_fn(0, req.q_order, |n| {
            if n < 1 {
                return Rat::zero();
            }
            let total: BigInt = divisors(n as u64)
                .into_iter()
                .map(|d| {
                    BigInt::from(n as u64 / d) * 2 * num_traits::pow(BigInt::from(d), zexp as usize)
                })
                .sum();
            Rat::from_integer(total) / &fact
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn req(q: i64, z: i64) -> FormRequest {
        FormRequest::new(q, z).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        let f = Forms::new();
        assert_eq!(f.bernoulli(1), ratio(-1, 2));
        assert_eq!(f.bernoulli(2), ratio(1, 6));
        assert_eq!(f.bernoulli(4), ratio(-1, 30));
        assert_eq!(f.bernoulli(12), ratio(-691, 2730));
        assert_eq!(f.bernoulli(5), rat(0));
    }

    #[test]
    fn eisenstein_examples() {
        let f = Forms::new();
        let g2 = f.eisenstein(2, 4).unwrap();
        assert_eq!(
            *g2,
            Laurent::new(0, vec![ratio(-1, 24), rat(1), rat(3), rat(4)], Some(4))
        );
        let g4 = f.eisenstein(4, 1).unwrap();
        assert_eq!(g4.coeff(0).unwrap(), ratio(1, 240));
        assert!(f.eisenstein(3, 4).is_err());
        assert!(f.eisenstein(0, 4).is_err());
    }

    #[test]
    fn delta_leading_terms() {
        let f = Forms::new();
        let d = f.delta(5).unwrap();
        assert_eq!(d.valuation(), 1);
        assert_eq!(d.precision(), Some(5));
        let cs: Vec<Rat> = (1..5).map(|n| d.coeff(n).unwrap()).collect();
        assert_eq!(cs, vec![rat(1), rat(-24), rat(252), rat(-1472)]);
        assert_eq!(d.coeff(0).unwrap(), rat(0));
        let inv = d.invert().unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_eq!(inv.coeff(-1).unwrap(), rat(1));
        assert_eq!(f.delta(1).unwrap().precision(), Some(1));
    }

    #[test]
    fn theta_shape() {
        let f = Forms::new();
        let t = f.theta(req(4, 8)).unwrap();
        assert_eq!(t.z_valuation(), 1);
        assert_eq!(t.z_precision(), Some(8));
        assert_eq!(t.q_precision(), Some(4));
        assert_eq!(t.coeff(1, 0).unwrap(), rat(1));
        assert_eq!(t.coeff(1, 2).unwrap(), rat(0));
        assert_eq!(t.coeff(3, 0).unwrap(), ratio(1, 24));
        assert_eq!(t.coeff(3, 1).unwrap(), rat(-1));
        assert!(t.is_z_odd());
        assert_eq!(t.reflect_z(), t.neg());
    }

    #[test]
    fn s_structure() {
        let f = Forms::new();
        let s = f.s_series(req(5, 7), SMethod::DivisorSum).unwrap();
        assert_eq!(s.z_valuation(), 2);
        assert!(s.is_z_even());
        assert_eq!(s.coeff(2, 1).unwrap(), rat(1));
        assert_eq!(s.coeff(4, 1).unwrap(), ratio(1, 12));
        for n in 0..5 {
            assert_eq!(s.coeff(0, n).unwrap(), rat(0));
        }
        let l = f.s_series(req(5, 7), SMethod::LogDerivative).unwrap();
        assert_eq!(*l, *s);
    }

    #[test]
    fn phi_small_cases() {
        let f = Forms::new();
        let r = req(4, 6);
        assert!(f.phi(0, r).unwrap().is_zero());
        assert!(f.phi(-1, r).unwrap().is_zero());
        assert_eq!(*f.phi(1, r).unwrap(), *f.theta(r).unwrap());
        // phi_2 = d/dz Theta^2 since Theta has no z^2 term
        let t = f.theta(req(4, 7)).unwrap();
        let expect = fit(&t.mul(&t).dz(), r).unwrap();
        assert_eq!(*f.phi(2, r).unwrap(), expect);
    }

    #[test]
    fn phi2_basics() {
        let f = Forms::new();
        let r = req(4, 5);
        assert!(f.phi2(0, 3, r).unwrap().is_zero());
        let p = f.phi2(1, 2, r).unwrap();
        let rhs = f.phi2_rhs(1, 2, r).unwrap();
        assert!(p.dq().agrees_with(&rhs));
        for c in p.z_coefficients() {
            assert!(c.is_zero() || c.valuation() >= 1);
        }
    }

    #[test]
    fn request_validation() {
        assert!(FormRequest::new(0, 3).is_err());
        assert!(FormRequest::new(3, 0).is_err());
    }
}

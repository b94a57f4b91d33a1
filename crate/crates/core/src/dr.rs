//! Conjectural evaluation of K3 rubber invariants through quasi-Jacobi forms.
//!
//! For legs `(a_i, gamma_i)` with `sum a_i = 0` and a primitive class `beta`
//! with `beta^2 = 2h - 2`, the right-hand side is
//!
//! ```text
//! (prod_i a_i^{deg gamma_i})^{-1} Coeff_{q^{h-1}} sum_P 1/(Theta^2 Delta)
//!     prod_{singletons j} (gamma_j, beta) phi_{a_j}
//!     prod_{pairs {k,l}}  (gamma_k, gamma_l) phi_{a_k, a_l}
//! ```
//!
//! summed over set partitions `P` of the leg indices into blocks of size one
//! or two, with `( , )` the Mukai pairing. The result is a `z`-series whose
//! coefficient of `z^{2g-2+n}` is `(-1)^{g+n}` times the genus-`g` invariant.
//! Nothing here computes the rubber side independently.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::Forms;
use crate::gw::k3_point_hodge_series;
use crate::rat::{int_pow, sign_pow, Rat};
use crate::series::{BiSeries, Laurent};
use crate::surface::{CohDegree, K3Class, TranscendentalGram};

/// A Mukai vector `(r, D, n)` in `H^0 + H^2 + H^4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub rank: Rat,
    pub divisor: K3Class,
    pub degree: Rat,
}

impl MukaiVector {
    pub fn new(rank: Rat, divisor: K3Class, degree: Rat) -> Self {
        MukaiVector {
            rank,
            divisor,
            degree,
        }
    }

    /// `(0, D, 0)`.
    pub fn from_divisor(divisor: K3Class) -> Self {
        Self::new(Rat::zero(), divisor, Rat::zero())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(&self.rank * c, self.divisor.scale(c), &self.degree * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            &self.rank + &other.rank,
            self.divisor.add(&other.divisor),
            &self.degree + &other.degree,
        )
    }
}

/// `((r1, D1, n1), (r2, D2, n2)) = r1 n2 + r2 n1 - D1 . D2`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector, gram: &TranscendentalGram) -> Rat {
    &v.rank * &w.degree + &w.rank * &v.degree - v.divisor.pairing(&w.divisor, gram)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedLeg {
    pub a: i64,
    pub gamma: MukaiVector,
    /// Complex degree of `gamma` as a cohomology class.
    pub gamma_degree: CohDegree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrQuery {
    pub legs: Vec<MarkedLeg>,
    pub beta: K3Class,
    pub h: i64,
    pub gram: TranscendentalGram,
    pub z_order: i64,
}

impl DrQuery {
    pub fn new(
        legs: Vec<MarkedLeg>,
        beta: K3Class,
        h: i64,
        gram: TranscendentalGram,
        z_order: i64,
    ) -> Result<Self> {
        if legs.is_empty() {
            return Err(Error::InvalidInput("at least one leg is required".into()));
        }
        if let Some(l) = legs.iter().find(|l| l.a == 0) {
            return Err(Error::InvalidInput(format!(
                "leg multiplicity must be nonzero: {l:?}"
            )));
        }
        let total: i64 = legs.iter().map(|l| l.a).sum();
        if total != 0 {
            return Err(Error::InvalidInput(format!(
                "leg multiplicities sum to {total}, not 0"
            )));
        }
        let square = beta.pairing(&beta, &gram);
        if square != crate::rat::rat(2 * h - 2) {
            return Err(Error::InvalidInput(format!(
                "beta^2 = {square} does not match 2h - 2 = {}",
                2 * h - 2
            )));
        }
        if z_order < 1 {
            return Err(Error::InvalidInput("z_order must be >= 1".into()));
        }
        Ok(DrQuery {
            legs,
            beta,
            h,
            gram,
            z_order,
        })
    }

    /// The same query with the model class `beta = s + h f`.
    pub fn with_model_beta(
        legs: Vec<MarkedLeg>,
        h: i64,
        gram: TranscendentalGram,
        z_order: i64,
    ) -> Result<Self> {
        let beta = K3Class::new(Rat::one(), crate::rat::rat(h));
        Self::new(legs, beta, h, gram, z_order)
    }
}

/// A set partition of `0..n` into blocks of size one or two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmallBlockPartition {
    pub singletons: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

/// All set partitions of `{0, .., n-1}` whose blocks have size at most two.
/// Their number is the involution number `I(n)`.
pub fn partitions_le2(n: usize) -> Vec<SmallBlockPartition> {
    fn go(rest: &[usize], cur: &mut SmallBlockPartition, out: &mut Vec<SmallBlockPartition>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        cur.singletons.push(first);
        go(tail, cur, out);
        cur.singletons.pop();
        for (i, &other) in tail.iter().enumerate() {
            let remaining: Vec<usize> = tail
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &x)| x)
                .collect();
            cur.pairs.push((first, other));
            go(&remaining, cur, out);
            cur.pairs.pop();
        }
    }
    let idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    go(
        &idx,
        &mut SmallBlockPartition {
            singletons: vec![],
            pairs: vec![],
        },
        &mut out,
    );
    out
}

/// One entry of the decoded table: the coefficient of `z^{2g-2+n}` times `(-1)^{g+n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedInvariant {
    pub z_exp: i64,
    pub genus: i64,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrResult {
    /// The right-hand side as a `z`-series, known below `z_order`.
    pub series: Laurent<Rat>,
    pub invariants: Vec<DecodedInvariant>,
}

/// Maps `z`-exponents `2g - 2 + n` back to genus-`g` invariants.
pub fn decode(series: &Laurent<Rat>, n: usize, z_order: i64) -> Result<Vec<DecodedInvariant>> {
    let n = n as i64;
    let mut out = Vec::new();
    for z_exp in (2 - n).max(-2 + n)..z_order {
        let shifted = z_exp + 2 - n;
        if shifted < 0 || shifted % 2 != 0 {
            continue;
        }
        let genus = shifted / 2;
        let value = series.coeff(z_exp)? * sign_pow(genus + n);
        out.push(DecodedInvariant {
            z_exp,
            genus,
            value,
        });
    }
    Ok(out)
}

struct Budget {
    z_order: i64,
    q_order: i64,
}

fn budget(query: &DrQuery) -> Budget {
    // 1/(Theta^2 Delta) starts at z^-2 q^-1; all phi factors have nonnegative valuations
    Budget {
        z_order: query.z_order + 2,
        q_order: (query.h + 2).max(1),
    }
}

fn prefactor(query: &DrQuery) -> Result<Rat> {
    let mut p = Rat::one();
    for leg in &query.legs {
        let deg = leg.gamma_degree.integral().ok_or_else(|| {
            Error::NonIntegralPrefactor(format!(
                "a = {} with deg(gamma) = {}",
                leg.a, leg.gamma_degree
            ))
        })?;
        p *= int_pow(leg.a, deg);
    }
    Ok(p)
}

/// The bivariate summand of one partition, without the `1/(Theta^2 Delta)` factor
/// or the prefactor.
pub fn partition_term(
    forms: &Forms,
    query: &DrQuery,
    part: &SmallBlockPartition,
) -> Result<BiSeries> {
    let b = budget(query);
    let req = crate::forms::FormRequest::new(b.q_order, b.z_order)?;
    let beta = MukaiVector::from_divisor(query.beta.clone());
    let mut weight = Rat::one();
    for &j in &part.singletons {
        weight *= mukai_pairing(&query.legs[j].gamma, &beta, &query.gram);
    }
    for &(k, l) in &part.pairs {
        weight *= mukai_pairing(&query.legs[k].gamma, &query.legs[l].gamma, &query.gram);
    }
    if weight.is_zero() {
        return Ok(BiSeries::zero_to(b.z_order, b.q_order));
    }
    let mut term = BiSeries::one();
    for &j in &part.singletons {
        term = term.mul(&*forms.phi(query.legs[j].a, req)?);
    }
    for &(k, l) in &part.pairs {
        term = term.mul(&*forms.phi2(query.legs[k].a, query.legs[l].a, req)?);
    }
    Ok(term.scale(&weight))
}

/// Evaluates the conjectural right-hand side and decodes it by genus.
pub fn dr_rhs(forms: &Forms, query: &DrQuery) -> Result<DrResult> {
    let prefactor = prefactor(query)?;
    let b = budget(query);
    let base = k3_point_hodge_series(forms, 0, b.z_order, b.q_order)?;
    let mut total = BiSeries::zero_to(b.z_order, b.q_order);
    for part in partitions_le2(query.legs.len()) {
        total = total.add(&partition_term(forms, query, &part)?);
    }
    let full = total.mul(&base).scale(&prefactor.recip());
    let series = full.q_slice(query.h - 1)?.truncate(query.z_order);
    if series.precision().is_some_and(|p| p < query.z_order) {
        return Err(Error::InsufficientPrecision {
            requested: query.z_order - 1,
            precision: series.precision().unwrap(),
        });
    }
    let invariants = decode(&series, query.legs.len(), query.z_order)?;
    Ok(DrResult { series, invariants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn mv(r: i64, d: &str, n: i64) -> MukaiVector {
        MukaiVector::new(rat(r), d.parse().unwrap(), rat(n))
    }

    #[test]
    fn pairing_examples() {
        let g = TranscendentalGram::new();
        assert_eq!(mukai_pairing(&mv(1, "0", 0), &mv(0, "0", 1), &g), rat(1));
        assert_eq!(mukai_pairing(&mv(0, "s", 0), &mv(0, "s", 0), &g), rat(2));
        let (v, w) = (mv(2, "s+3f", -1), mv(-1, "2f", 5));
        assert_eq!(mukai_pairing(&v, &w, &g), mukai_pairing(&w, &v, &g));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=4).map(|n| partitions_le2(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10]);
        let two = partitions_le2(2);
        assert!(two.contains(&SmallBlockPartition {
            singletons: vec![0, 1],
            pairs: vec![]
        }));
        assert!(two.contains(&SmallBlockPartition {
            singletons: vec![],
            pairs: vec![(0, 1)]
        }));
        assert_eq!(partitions_le2(0).len(), 1);
    }

    fn leg(a: i64, gamma: MukaiVector, deg: CohDegree) -> MarkedLeg {
        MarkedLeg {
            a,
            gamma,
            gamma_degree: deg,
        }
    }

    #[test]
    fn query_validation() {
        let g = TranscendentalGram::new();
        let l = leg(1, mv(0, "f", 0), CohDegree::DIVISOR);
        assert!(DrQuery::with_model_beta(vec![l.clone()], 1, g.clone(), 3).is_err());
        assert!(DrQuery::with_model_beta(vec![], 1, g.clone(), 3).is_err());
        let m = leg(-1, mv(0, "f", 0), CohDegree::DIVISOR);
        assert!(DrQuery::with_model_beta(vec![l.clone(), m.clone()], 1, g.clone(), 3).is_ok());
        assert!(DrQuery::new(vec![l, m], "s+f".parse().unwrap(), 2, g, 3).is_err());
    }

    #[test]
    fn two_legs_reduce_to_the_pair_term() {
        let forms = Forms::new();
        let g = TranscendentalGram::new();
        let legs = vec![
            leg(1, mv(0, "f", 0), CohDegree::DIVISOR),
            leg(-1, mv(0, "s", 0), CohDegree::DIVISOR),
        ];
        let q = DrQuery::with_model_beta(legs, 1, g.clone(), 4).unwrap();
        let res = dr_rhs(&forms, &q).unwrap();
        // (gamma_1, gamma_2) = -<f, s> = -1; prefactor 1^1 (-1)^1 = -1
        let req = crate::forms::FormRequest::new(3, 6).unwrap();
        let phi = forms.phi2(1, -1, req).unwrap();
        let base = k3_point_hodge_series(&forms, 0, 6, 3).unwrap();
        let expect = phi.mul(&base).q_slice(0).unwrap().truncate(4);
        assert!(res.series.agrees_with(&expect));
        assert_eq!(res.series.precision(), Some(4));
    }

    #[test]
    fn decode_signs() {
        let s = Laurent::from_fn(-2, 3, |n| rat(n + 10));
        let d = decode(&s, 2, 3).unwrap();
        // n = 2: z^{2g}
        assert_eq!(
            d[0],
            DecodedInvariant {
                z_exp: 0,
                genus: 0,
                value: rat(10)
            }
        );
        assert_eq!(
            d[1],
            DecodedInvariant {
                z_exp: 2,
                genus: 1,
                value: rat(-12)
            }
        );
        let d3 = decode(&s, 3, 3).unwrap();
        assert_eq!(
            d3[0],
            DecodedInvariant {
                z_exp: 1,
                genus: 0,
                value: rat(-11)
            }
        );
    }

    #[test]
    fn vanishing_pairings_give_zero() {
        let forms = Forms::new();
        let mut gram = TranscendentalGram::new();
        gram.set("u", "u", rat(0));
        gram.set("w", "w", rat(0));
        let legs = vec![
            leg(
                2,
                MukaiVector::from_divisor(K3Class::transcendental("u", rat(1))),
                CohDegree::DIVISOR,
            ),
            leg(
                -1,
                MukaiVector::from_divisor(K3Class::transcendental("w", rat(1))),
                CohDegree::DIVISOR,
            ),
            leg(
                -1,
                MukaiVector::from_divisor(K3Class::transcendental("w", rat(3))),
                CohDegree::DIVISOR,
            ),
        ];
        let q = DrQuery::with_model_beta(legs, 1, gram, 3).unwrap();
        assert!(dr_rhs(&forms, &q).unwrap().series.is_zero());
    }
}

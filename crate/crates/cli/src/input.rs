//! JSON query files for `dr-vertex` and `pt-transform`.

use std::collections::BTreeMap;

use serde::Deserialize;
use surfgw::dr::{DrQuery, MarkedLeg, MukaiVector};
use surfgw::pt::{PLaurent, PtContext, SignConvention};
use surfgw::rat::{self, Rat};
use surfgw::surface::{
    nu_exponent, partition_degree_doubled, CohDegree, Descendent, K3Class, TranscendentalGram,
    WeightedPartition,
};
use surfgw::{Error, Result};

/// A rational written as a JSON integer or a `"num/den"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RatField {
    Int(i64),
    Text(String),
}

impl RatField {
    pub fn value(&self) -> Result<Rat> {
        match self {
            RatField::Int(n) => Ok(rat::rat(*n)),
            RatField::Text(s) => rat::parse(s),
        }
    }
}

impl Default for RatField {
    fn default() -> Self {
        RatField::Int(0)
    }
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------------
// dr-vertex

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaJson {
    #[serde(default)]
    rank: RatField,
    #[serde(default)]
    s: RatField,
    #[serde(default)]
    f: RatField,
    #[serde(default)]
    transcendental: BTreeMap<String, RatField>,
    /// The `H^4` component.
    #[serde(default)]
    n: RatField,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LegJson {
    a: i64,
    gamma: GammaJson,
    /// Complex degree of `gamma`.
    degree: RatField,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaJson {
    h: i64,
    /// Defaults to `s + h f`.
    class: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GramEntry {
    a: String,
    b: String,
    value: RatField,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DrJson {
    legs: Vec<LegJson>,
    beta: BetaJson,
    #[serde(default)]
    gram: Vec<GramEntry>,
    z_order: i64,
}

pub fn dr_query(text: &str) -> Result<DrQuery> {
    let j: DrJson = parse_json(text)?;
    let mut gram = TranscendentalGram::new();
    for e in &j.gram {
        gram.set(&e.a, &e.b, e.value.value()?);
    }
    let legs = j
        .legs
        .iter()
        .map(|l| {
            let g = &l.gamma;
            let mut divisor = K3Class::new(g.s.value()?, g.f.value()?);
            for (label, c) in &g.transcendental {
                divisor = divisor.add(&K3Class::transcendental(label, c.value()?));
            }
            Ok(MarkedLeg {
                a: l.a,
                gamma: MukaiVector::new(g.rank.value()?, divisor, g.n.value()?),
                gamma_degree: CohDegree::from_rat(&l.degree.value()?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    match &j.beta.class {
        Some(c) => DrQuery::new(legs, c.parse()?, j.beta.h, gram, j.z_order),
        None => DrQuery::with_model_beta(legs, j.beta.h, gram, j.z_order),
    }
}

// ---------------------------------------------------------------------------
// pt-transform

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrimitiveJson {
    lo: i64,
    hi: Option<i64>,
    coeffs: Vec<RatField>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NuJson {
    Uniform(i64),
    PerK(BTreeMap<String, i64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescendentJson {
    a: i64,
    degree: RatField,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NuFromJson {
    /// Weighted partition such as `(2:p)(1:1)`.
    partition: String,
    #[serde(default)]
    descendents: Vec<DescendentJson>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ConventionJson {
    Coefficient,
    Series,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PtJson {
    r: u64,
    nu: Option<NuJson>,
    nu_from: Option<NuFromJson>,
    primitive: BTreeMap<String, PrimitiveJson>,
    convention: ConventionJson,
}

pub struct PtInput {
    pub ctx: PtContext,
    pub primitive: BTreeMap<u64, PLaurent>,
}

fn parse_k(key: &str) -> Result<u64> {
    key.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("divisor key {key:?} is not a positive integer")))
}

fn nu_from(spec: &NuFromJson) -> Result<i64> {
    let lambda: WeightedPartition = spec.partition.parse()?;
    let descendents = spec
        .descendents
        .iter()
        .map(|d| {
            Ok(Descendent {
                a: d.a,
                degree: CohDegree::from_rat(&d.degree.value()?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    nu_exponent(
        partition_degree_doubled(&lambda),
        &descendents,
        lambda.size(),
    )
}

pub fn pt_input(text: &str) -> Result<PtInput> {
    let j: PtJson = parse_json(text)?;
    let convention = match j.convention {
        ConventionJson::Coefficient => SignConvention::CoefficientLevel,
        ConventionJson::Series => SignConvention::SeriesLevel,
    };
    let ctx = match (&j.nu, &j.nu_from) {
        (Some(NuJson::Uniform(nu)), None) => PtContext::uniform(j.r, *nu, convention)?,
        (Some(NuJson::PerK(map)), None) => {
            let nu = map
                .iter()
                .map(|(k, v)| Ok((parse_k(k)?, *v)))
                .collect::<Result<_>>()?;
            PtContext::new(j.r, nu, convention)?
        }
        (None, Some(spec)) => PtContext::uniform(j.r, nu_from(spec)?, convention)?,
        _ => {
            return Err(Error::InvalidInput(
                "give exactly one of \"nu\" and \"nu_from\"".into(),
            ))
        }
    };
    let mut primitive = BTreeMap::new();
    for (key, p) in &j.primitive {
        let coeffs = p
            .coeffs
            .iter()
            .map(RatField::value)
            .collect::<Result<Vec<_>>>()?;
        let data = PLaurent::new(p.lo, coeffs);
        if let Some(hi) = p.hi {
            if hi != data.hi() {
                return Err(Error::InvalidInput(format!(
                    "primitive[{key}]: hi = {hi} but lo + len(coeffs) = {}",
                    data.hi()
                )));
            }
        }
        primitive.insert(parse_k(key)?, data);
    }
    Ok(PtInput { ctx, primitive })
}

//! JSON form of series: valuation, precision (`null` when exact) and
//! coefficients as `"num/den"` strings. Parsing re-canonicalizes, so a
//! serialize/parse round trip is bit-exact.

use serde::{Deserialize, Serialize};

use super::{BiSeries, Laurent, QLaurent};
use crate::error::{Error, Result};
use crate::rat::{self, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnivariateJson {
    pub variables: Vec<String>,
    pub valuation: i64,
    pub precision: Option<i64>,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerJson {
    pub valuation: i64,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BivariateJson {
    pub variables: Vec<String>,
    pub valuation: i64,
    pub precision: Option<i64>,
    pub q_precision: Option<i64>,
    pub coefficients: Vec<InnerJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesJson {
    Bivariate(BivariateJson),
    Univariate(UnivariateJson),
}

fn strings(cs: &[Rat]) -> Vec<String> {
    cs.iter().map(rat::to_string).collect()
}

fn parse_all(cs: &[String]) -> Result<Vec<Rat>> {
    cs.iter().map(|c| rat::parse(c)).collect()
}

pub fn univariate(s: &Laurent<Rat>, variable: &str) -> UnivariateJson {
    UnivariateJson {
        variables: vec![variable.to_string()],
        valuation: s.valuation(),
        precision: s.precision(),
        coefficients: strings(s.coefficients()),
    }
}

pub fn bivariate(s: &BiSeries) -> BivariateJson {
    BivariateJson {
        variables: vec!["z".into(), "q".into()],
        valuation: s.z_valuation(),
        precision: s.z_precision(),
        q_precision: s.q_precision(),
        coefficients: s
            .z_coefficients()
            .iter()
            .map(|c| InnerJson {
                valuation: c.valuation(),
                coefficients: strings(c.coefficients()),
            })
            .collect(),
    }
}

impl UnivariateJson {
    pub fn to_series(&self) -> Result<Laurent<Rat>> {
        if self.variables.len() != 1 {
            return Err(Error::Parse(
                "univariate series needs exactly one variable".into(),
            ));
        }
        Ok(Laurent::new(
            self.valuation,
            parse_all(&self.coefficients)?,
            self.precision,
        ))
    }
}

impl BivariateJson {
    pub fn to_series(&self) -> Result<BiSeries> {
        if self.variables != ["z", "q"] {
            return Err(Error::Parse(format!(
                "bivariate series must use variable order [\"z\", \"q\"], got {:?}",
                self.variables
            )));
        }
        let coeffs = self
            .coefficients
            .iter()
            .map(|c| {
                Ok(QLaurent::new(
                    c.valuation,
                    parse_all(&c.coefficients)?,
                    self.q_precision,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BiSeries::new(
            self.valuation,
            coeffs,
            self.precision,
            self.q_precision,
        ))
    }
}

pub fn qlaurent_to_string(s: &QLaurent) -> String {
    serde_json::to_string(&univariate(s, "q")).expect("series JSON is always serializable")
}

pub fn qlaurent_from_str(text: &str) -> Result<QLaurent> {
    let j: UnivariateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.to_series()
}

pub fn biseries_to_string(s: &BiSeries) -> String {
    serde_json::to_string(&bivariate(s)).expect("series JSON is always serializable")
}

pub fn biseries_from_str(text: &str) -> Result<BiSeries> {
    let j: BivariateJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.to_series()
}

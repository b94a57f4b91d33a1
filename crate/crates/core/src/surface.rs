//! Deformation data of the model surfaces: curve classes `beta_{m,r}`,
//! the cohomology isomorphisms used by the multiple cover formula,
//! cohomology-weighted partitions and exponent bookkeeping.
//!
//! Complex degrees are stored doubled ([`CohDegree`]) so the half-integral
//! degrees of odd classes on abelian surfaces stay exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, rat, ratio, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SurfaceKind {
    K3,
    Abelian,
}

impl FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k3" => Ok(SurfaceKind::K3),
            "abelian" | "ab" => Ok(SurfaceKind::Abelian),
            _ => Err(Error::Parse(format!(
                "unknown surface {s:?} (expected k3 or abelian)"
            ))),
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::K3 => "k3",
            SurfaceKind::Abelian => "abelian",
        })
    }
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors of 0 are not defined");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The class `beta_{m,r}`: divisibility `r`, self-intersection `r^2 m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub kind: SurfaceKind,
    m: i64,
    r: u64,
}

impl CurveClass {
    pub fn new(kind: SurfaceKind, m: i64, r: u64) -> Result<Self> {
        if m % 2 != 0 {
            return Err(Error::InvalidInput(format!("m = {m} must be even")));
        }
        if r == 0 {
            return Err(Error::InvalidInput("divisibility must be >= 1".into()));
        }
        Ok(CurveClass { kind, m, r })
    }

    /// The class with `beta^2 = 2h - 2` times `r^2`, i.e. `m = 2h - 2`.
    pub fn from_h(kind: SurfaceKind, h: i64, r: u64) -> Result<Self> {
        Self::new(kind, 2 * h - 2, r)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn self_intersection(&self) -> i64 {
        (self.r * self.r) as i64 * self.m
    }

    pub fn divisibility(&self) -> u64 {
        self.r
    }
}

/// Whether the primitive class `phi(beta/k)` appearing in the summand with
/// `r/k = k_ratio` is effective.
///
/// K3: effective iff `m >= 0` or `(m, r/k) = (-2, 1)`. Abelian: iff `m >= 0`.
pub fn is_effective_primitive_image(kind: SurfaceKind, m: i64, k_ratio: u64) -> bool {
    match kind {
        SurfaceKind::K3 => m >= 0 || (m == -2 && k_ratio == 1),
        SurfaceKind::Abelian => m >= 0,
    }
}

/// Twice the complex degree of a cohomology class, in `0..=4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CohDegree(u8);

impl CohDegree {
    pub const UNIT: CohDegree = CohDegree(0);
    pub const DIVISOR: CohDegree = CohDegree(2);
    pub const POINT: CohDegree = CohDegree(4);

    pub fn from_doubled(doubled: u8) -> Result<Self> {
        if doubled > 4 {
            return Err(Error::InvalidInput(format!(
                "complex degree {} is outside [0, 2]",
                ratio(doubled as i64, 2)
            )));
        }
        Ok(CohDegree(doubled))
    }

    /// From a complex degree such as `1`, `3/2`.
    pub fn from_rat(deg: &Rat) -> Result<Self> {
        let doubled = rat::as_i64(&(deg * rat(2)))
            .ok_or_else(|| Error::InvalidInput(format!("degree {deg} is not a multiple of 1/2")))?;
        if !(0..=4).contains(&doubled) {
            return Err(Error::InvalidInput(format!(
                "complex degree {deg} is outside [0, 2]"
            )));
        }
        Ok(CohDegree(doubled as u8))
    }

    pub fn doubled(self) -> u8 {
        self.0
    }

    pub fn as_rat(self) -> Rat {
        ratio(self.0 as i64, 2)
    }

    /// The degree as an integer, if it is one.
    pub fn integral(self) -> Option<i64> {
        self.0.is_multiple_of(2).then_some((self.0 / 2) as i64)
    }
}

impl FromStr for CohDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CohDegree::from_rat(&rat::parse(s)?)
    }
}

impl fmt::Display for CohDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_rat())
    }
}

// ---------------------------------------------------------------------------
// Abelian surfaces: H^*(A) = exterior algebra on dx1, dy1, dx2, dy2.

/// Index of a generator of `H^1` of `E_1 x E_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Dx1 = 0,
    Dy1 = 1,
    Dx2 = 2,
    Dy2 = 3,
}

/// An element of `Lambda^* H^1(A, Q)`; basis monomials are indexed by the
/// bitmask of the generators they contain, in the order dx1, dy1, dx2, dy2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianClass([Rat; 16]);

fn wedge_sign(a: usize, b: usize) -> i64 {
    // (-1)^{#{(i in a, j in b) : i > j}}
    let mut swaps = 0;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            swaps += (b & ((1 << i) - 1)).count_ones();
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

impl AbelianClass {
    pub fn zero() -> Self {
        AbelianClass(std::array::from_fn(|_| Rat::zero()))
    }

    pub fn unit() -> Self {
        Self::monomial(0, Rat::one())
    }

    pub fn monomial(mask: usize, c: Rat) -> Self {
        assert!(mask < 16, "monomial mask out of range");
        let mut v = Self::zero();
        v.0[mask] = c;
        v
    }

    pub fn generator(g: Generator) -> Self {
        Self::monomial(1 << g as usize, Rat::one())
    }

    /// The point class `dx1 ^ dy1 ^ dx2 ^ dy2`.
    pub fn point() -> Self {
        Self::monomial(0b1111, Rat::one())
    }

    /// `f_1 = dx1 ^ dy1`.
    pub fn f1() -> Self {
        Self::monomial(0b0011, Rat::one())
    }

    /// `f_2 = dx2 ^ dy2`.
    pub fn f2() -> Self {
        Self::monomial(0b1100, Rat::one())
    }

    pub fn coefficient(&self, mask: usize) -> &Rat {
        &self.0[mask]
    }

    pub fn coefficients(&self) -> &[Rat; 16] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        AbelianClass(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        AbelianClass(std::array::from_fn(|i| &self.0[i] * c))
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.0.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.0.iter().enumerate() {
                if cb.is_zero() || a & b != 0 {
                    continue;
                }
                let term = ca * cb;
                if wedge_sign(a, b) < 0 {
                    out.0[a | b] -= term;
                } else {
                    out.0[a | b] += term;
                }
            }
        }
        out
    }

    /// The complex degree if the class is homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<CohDegree> {
        let mut deg = None;
        for (mask, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = (mask as u32).count_ones() as u8;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg.map(CohDegree)
    }

    /// The algebra isomorphism `phi_r`: `dx1 -> dx1`, `dy1 -> dy1 / r`,
    /// `dx2 -> dx2`, `dy2 -> r dy2`, extended multiplicatively.
    pub fn phi_r(&self, r: u64) -> Self {
        assert!(r >= 1, "phi_r needs r >= 1");
        let r = rat(r as i64);
        AbelianClass(std::array::from_fn(|mask| {
            let mut c = self.0[mask].clone();
            if mask & (1 << Generator::Dy1 as usize) != 0 {
                c /= &r;
            }
            if mask & (1 << Generator::Dy2 as usize) != 0 {
                c *= &r;
            }
            c
        }))
    }
}

pub fn phi_r_abelian(c: &AbelianClass, r: u64) -> AbelianClass {
    c.phi_r(r)
}

// ---------------------------------------------------------------------------
// K3 surfaces: H^2 = span(s, f) + V, with V orthogonal to the Picard lattice.

/// Gram data of the transcendental part `V`, keyed by label pairs.
/// Unlisted pairs pair to zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranscendentalGram(BTreeMap<(String, String), Rat>);

impl TranscendentalGram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `<a, b> = <b, a> = value`.
    pub fn set(&mut self, a: &str, b: &str, value: Rat) {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.0.insert(key, value);
    }

    pub fn get(&self, a: &str, b: &str) -> Rat {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.0.get(&key).cloned().unwrap_or_else(Rat::zero)
    }
}

/// A class `a s + b f + v` in `H^2` of the elliptic K3 surface.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct K3Class {
    pub s: Rat,
    pub f: Rat,
    pub transcendental: BTreeMap<String, Rat>,
}

impl K3Class {
    pub fn new(s: Rat, f: Rat) -> Self {
        K3Class {
            s,
            f,
            transcendental: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn section() -> Self {
        Self::new(Rat::one(), Rat::zero())
    }

    pub fn fiber() -> Self {
        Self::new(Rat::zero(), Rat::one())
    }

    pub fn transcendental(label: &str, c: Rat) -> Self {
        let mut k = Self::zero();
        k.transcendental.insert(label.to_string(), c);
        k
    }

    /// `beta_{m,r} = r s + r (m/2 + 1) f`.
    pub fn beta(m: i64, r: u64) -> Self {
        let r = rat(r as i64);
        let f = &r * rat(m / 2 + 1);
        Self::new(r, f)
    }

    pub fn is_zero(&self) -> bool {
        self.s.is_zero() && self.f.is_zero() && self.transcendental.values().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.transcendental.clone();
        for (k, v) in &other.transcendental {
            *t.entry(k.clone()).or_insert_with(Rat::zero) += v;
        }
        K3Class {
            s: &self.s + &other.s,
            f: &self.f + &other.f,
            transcendental: t,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        K3Class {
            s: &self.s * c,
            f: &self.f * c,
            transcendental: self
                .transcendental
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// Intersection pairing: `<s,s> = -2`, `<s,f> = 1`, `<f,f> = 0`, `V` by its
    /// Gram data and orthogonal to `s`, `f`.
    pub fn pairing(&self, other: &Self, gram: &TranscendentalGram) -> Rat {
        let pic = rat(-2) * &self.s * &other.s + &self.s * &other.f + &self.f * &other.s;
        let mut v = Rat::zero();
        for (a, ca) in &self.transcendental {
            for (b, cb) in &other.transcendental {
                v += ca * cb * gram.get(a, b);
            }
        }
        pic + v
    }

    /// The isomorphism `phi_{m,r}`: `beta_{m,r} -> s + (r^2 m/2 + 1) f`,
    /// `f -> r f`, identity on `V`, extended linearly.
    pub fn phi_mr(&self, m: i64, r: u64) -> Self {
        assert!(r >= 1, "phi_{{m,r}} needs r >= 1");
        let rr = rat(r as i64);
        // s = (beta - c f) / r with c = r (m/2 + 1)
        let c = &rr * rat(m / 2 + 1);
        let image_beta = K3Class::new(Rat::one(), &rr * &rr * rat(m) / rat(2) + Rat::one());
        let image_f = K3Class::new(Rat::zero(), rr.clone());
        let image_s = image_beta.add(&image_f.scale(&-c)).scale(&rr.recip());
        let mut out = image_s.scale(&self.s).add(&image_f.scale(&self.f));
        out.transcendental = self.transcendental.clone();
        out
    }

    /// `gcd` of the integral coordinates on `span(s, f)`; `None` if not integral
    /// or if the class has a transcendental part.
    pub fn picard_divisibility(&self) -> Option<u64> {
        if self.transcendental.values().any(|c| !c.is_zero()) {
            return None;
        }
        let a = rat::as_i64(&self.s)?;
        let b = rat::as_i64(&self.f)?;
        Some(num_integer::gcd(a, b).unsigned_abs())
    }
}

pub fn phi_mr_k3(c: &K3Class, m: i64, r: u64) -> K3Class {
    c.phi_mr(m, r)
}

impl FromStr for K3Class {
    type Err = Error;

    /// Parses sums like `s+3f`, `-1/2 s + 2*f - v1`. Identifiers other than
    /// `s` and `f` name transcendental basis vectors.
    fn from_str(text: &str) -> Result<Self> {
        let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() || src == "0" {
            return Ok(K3Class::zero());
        }
        let mut out = K3Class::zero();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = Rat::one();
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
                i += 1;
            }
            let coeff = if i > start {
                rat::parse(&src[start..i])?
            } else {
                Rat::one()
            };
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
            }
            let name_start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if name_start == i {
                return Err(Error::Parse(format!("expected a class name in {text:?}")));
            }
            let c = sign * coeff;
            let term = match &src[name_start..i] {
                "s" => K3Class::new(c, Rat::zero()),
                "f" => K3Class::new(Rat::zero(), c),
                label => K3Class::transcendental(label, c),
            };
            out = out.add(&term);
        }
        Ok(out)
    }
}

impl fmt::Display for K3Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        let mut push = |c: &Rat, name: &str| {
            if !c.is_zero() {
                terms.push(format!("{c}*{name}"));
            }
        };
        push(&self.s, "s");
        push(&self.f, "f");
        for (k, v) in &self.transcendental {
            push(v, k);
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+").replace("+-", "-"))
        }
    }
}

// ---------------------------------------------------------------------------
// Cohomology-weighted partitions.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightedPart {
    pub size: u64,
    pub degree: CohDegree,
}

/// A partition with a cohomology weight (recorded by its degree) on each part,
/// sorted so sizes are weakly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightedPartition {
    parts: Vec<WeightedPart>,
}

impl WeightedPartition {
    pub fn new(mut parts: Vec<WeightedPart>) -> Result<Self> {
        if parts.iter().any(|p| p.size == 0) {
            return Err(Error::InvalidInput(
                "partition parts must be positive".into(),
            ));
        }
        parts.sort_by_key(|p| std::cmp::Reverse(p.size));
        Ok(WeightedPartition { parts })
    }

    pub fn parts(&self) -> &[WeightedPart] {
        &self.parts
    }

    /// The partitioned integer `n`.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|p| p.size).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        WeightedPartition::new(parts).expect("parts already validated")
    }
}

/// `deg(lambda) = n - l + sum_i deg(delta_i)`, returned doubled.
pub fn partition_degree_doubled(lambda: &WeightedPartition) -> i64 {
    let n = lambda.size() as i64;
    let l = lambda.len() as i64;
    2 * (n - l)
        + lambda
            .parts
            .iter()
            .map(|p| p.degree.doubled() as i64)
            .sum::<i64>()
}

/// `deg(lambda)` as an exact rational.
pub fn partition_degree(lambda: &WeightedPartition) -> Rat {
    ratio(partition_degree_doubled(lambda), 2)
}

/// Degree of a named weight in the partition grammar.
fn weight_degree(name: &str) -> Result<CohDegree> {
    if let Some(d) = name.strip_prefix("deg=") {
        return d.parse();
    }
    Ok(match name {
        "1" => CohDegree::UNIT,
        "p" => CohDegree::POINT,
        "s" | "f" | "f1" | "f2" | "D" => CohDegree::DIVISOR,
        "dx1" | "dy1" | "dx2" | "dy2" => CohDegree(1),
        _ => {
            return Err(Error::Parse(format!(
                "unknown weight {name:?} (use 1, p, s, f, f1, f2, D, dx1, dy1, dx2, dy2 or deg=<q>)"
            )))
        }
    })
}

/// Parses `(a:w)(b:w)...` into `(integer, degree)` pairs in input order.
pub fn parse_weighted_list(text: &str) -> Result<Vec<(i64, CohDegree)>> {
    let src: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = src.as_str();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| Error::Parse(format!("expected '(size:weight)' in {text:?}")))?;
        let (inner, tail) = body;
        let (size, weight) = inner
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in ({inner})")))?;
        let size: i64 = size
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {size:?}")))?;
        out.push((size, weight_degree(weight)?));
        rest = tail;
    }
    Ok(out)
}

impl FromStr for WeightedPartition {
    type Err = Error;

    /// `(2:p)(1:1)` is the partition `2 + 1` with a point class on the part
    /// of size 2 and the unit on the part of size 1.
    fn from_str(text: &str) -> Result<Self> {
        let parts = parse_weighted_list(text)?
            .into_iter()
            .map(|(size, degree)| {
                if size < 1 {
                    return Err(Error::InvalidInput(format!(
                        "part size {size} must be positive"
                    )));
                }
                Ok(WeightedPart {
                    size: size as u64,
                    degree,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedPartition::new(parts)
    }
}

// ---------------------------------------------------------------------------
// Exponents.

/// The multiple cover exponent `2g - 3 + sum_i deg(gamma_i)`.
pub fn mcf_exponent(g: i64, degrees: &[CohDegree]) -> Rat {
    let doubled: i64 = 2 * (2 * g - 3) + degrees.iter().map(|d| d.doubled() as i64).sum::<i64>();
    ratio(doubled, 2)
}

/// A stable-pairs descendent `ch_a(gamma)` recorded by `a` and `deg(gamma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Descendent {
    pub a: i64,
    pub degree: CohDegree,
}

/// `nu = deg(lambda) + sum_i (a_i - 2 + deg(gamma_i)) - 2n - 1`, with the
/// partition degree given doubled.
pub fn nu_exponent(partition_deg_doubled: i64, descendents: &[Descendent], n: u64) -> Result<i64> {
    if let Some(d) = descendents.iter().find(|d| d.a < 2) {
        return Err(Error::InvalidInput(format!(
            "descendent index a = {} must be >= 2",
            d.a
        )));
    }
    let doubled = partition_deg_doubled
        + descendents
            .iter()
            .map(|d| 2 * (d.a - 2) + d.degree.doubled() as i64)
            .sum::<i64>()
        - 4 * n as i64
        - 2;
    if doubled % 2 != 0 {
        return Err(Error::NonIntegralExponent(format!(
            "nu = {}",
            ratio(doubled, 2)
        )));
    }
    Ok(doubled / 2)
}

//! `surfgw`: exact generating series and invariants of K3 and abelian surfaces.
//!
//! Results go to stdout as JSON (default) or CSV; diagnostics go to stderr.
//! Exit status: 0 success, 1 failed `verify`, 2 usage or input error,
//! 3 insufficient precision, 4 other mathematical error.

mod input;
mod report;
mod verify;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use surfgw::dr::dr_rhs;
use surfgw::forms::{fit, FormRequest, Forms, SMethod};
use surfgw::gw::{
    general_mcf_transform, mcf_point_hodge_terms, point_hodge_series, primitive_point_hodge,
    PointHodgeQuery,
};
use surfgw::pt::{output_window, pt_mcf_coefficient, pt_mcf_series, SignConvention};
use surfgw::rat::{self, sign_pow};
use surfgw::surface::{mcf_exponent, CohDegree, CurveClass, SurfaceKind};
use surfgw::{Error, Result};

use report::{bi_series, q_series, r, Format, Report};

#[derive(Parser)]
#[command(
    name = "surfgw",
    version,
    about = "Exact invariants of K3 and abelian surfaces"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a modular or Jacobi form.
    Series(SeriesArgs),
    /// Invariants of primitive classes.
    #[command(subcommand)]
    Invariant(InvariantCommand),
    /// Multiple cover formula for imprimitive classes.
    #[command(subcommand)]
    Mcf(McfCommand),
    /// Evaluate the conjectural double-ramification vertex from a JSON query.
    DrVertex {
        #[arg(long)]
        query: PathBuf,
    },
    /// Apply the stable-pairs multiple cover transform to JSON data.
    PtTransform {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the built-in identity suite.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    Eisenstein,
    Delta,
    Theta,
    S,
    Phi,
    Phi2,
    K3PointHodge,
    AbelianPointHodge,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    LogDerivative,
    DivisorSum,
}

#[derive(Args)]
struct SeriesArgs {
    kind: SeriesKind,
    #[arg(long, default_value_t = 5)]
    q_order: i64,
    #[arg(long, default_value_t = 5)]
    z_order: i64,
    /// Weight of the Eisenstein series.
    #[arg(long)]
    weight: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    n: Option<i64>,
    #[arg(long, value_enum, default_value = "divisor-sum")]
    method: MethodArg,
    /// Number of point insertions for the point/Hodge series.
    #[arg(long)]
    points: Option<i64>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, required_unless_present = "batch")]
    surface: Option<SurfaceKind>,
    #[arg(long, required_unless_present = "batch")]
    genus: Option<i64>,
    #[arg(long, required_unless_present = "batch")]
    points: Option<i64>,
    #[arg(long, required_unless_present = "batch", allow_negative_numbers = true)]
    h: Option<i64>,
    #[arg(long, default_value_t = 1)]
    div: u64,
    /// JSON array of queries `{"surface","genus","points","h","div"}`.
    #[arg(long, conflicts_with_all = ["surface", "genus", "points", "h"])]
    batch: Option<PathBuf>,
}

#[derive(Subcommand)]
enum InvariantCommand {
    /// `<tau_0(p)^points lambda_{genus - points}>` in a primitive class.
    PointHodge(QueryArgs),
}

#[derive(Subcommand)]
enum McfCommand {
    /// Point/Hodge invariants in imprimitive classes.
    PointHodge(QueryArgs),
    /// The transform applied to user-supplied primitive invariants.
    General {
        #[arg(long)]
        surface: SurfaceKind,
        #[arg(long)]
        genus: i64,
        #[arg(long, allow_negative_numbers = true)]
        h: i64,
        #[arg(long)]
        div: u64,
        /// Complex degrees of the insertions, e.g. `2,2` or `1/2,3/2`.
        #[arg(long, default_value = "")]
        degrees: String,
        /// Primitive invariants per divisor, e.g. `1:5,2:7`.
        #[arg(long)]
        values: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, success)) => {
            print!("{}", report.render(cli.format));
            if success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(report::exit_code(&e) as u8)
        }
    }
}

fn run(command: Command) -> Result<(Report, bool)> {
    let forms = Forms::global();
    Ok(match command {
        Command::Series(a) => (series(forms, &a)?, true),
        Command::Invariant(InvariantCommand::PointHodge(a)) => {
            (point_hodge(forms, &a, false)?, true)
        }
        Command::Mcf(McfCommand::PointHodge(a)) => (point_hodge(forms, &a, true)?, true),
        Command::Mcf(McfCommand::General {
            surface,
            genus,
            h,
            div,
            degrees,
            values,
        }) => (
            mcf_general(surface, genus, h, div, &degrees, &values)?,
            true,
        ),
        Command::DrVertex { query } => (dr_vertex(forms, &query)?, true),
        Command::PtTransform { input } => (pt_transform(&input)?, true),
        Command::Verify => {
            let checks = verify::run_all();
            let ok = checks.iter().all(|c| c.passed);
            let body = json!({
                "passed": ok,
                "checks": checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
            });
            let rows = checks
                .iter()
                .map(|c| vec![c.name.to_string(), c.passed.to_string()])
                .collect();
            (
                Report::new("verify", body).table(vec!["check", "passed"], rows),
                ok,
            )
        }
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn need<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidInput(format!("series {kind} needs --{flag}")))
}

fn series(forms: &Forms, a: &SeriesArgs) -> Result<Report> {
    let req = FormRequest::new(a.q_order, a.z_order)?;
    let name = a
        .kind
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string();
    let bi = match a.kind {
        SeriesKind::Eisenstein => {
            let w = need(a.weight, "weight", &name)?;
            let g = forms.eisenstein(w, a.q_order)?;
            let (j, rows) = q_series(&g, "q");
            return Ok(
                Report::new("series", json!({"form": name, "weight": w, "series": j}))
                    .table(vec!["q_exp", "coefficient"], rows),
            );
        }
        SeriesKind::Delta => {
            let d = forms.delta(a.q_order)?;
            let (j, rows) = q_series(&d, "q");
            return Ok(Report::new("series", json!({"form": name, "series": j}))
                .table(vec!["q_exp", "coefficient"], rows));
        }
        SeriesKind::Theta => (*forms.theta(req)?).clone(),
        SeriesKind::S => {
            let method = match a.method {
                MethodArg::LogDerivative => SMethod::LogDerivative,
                MethodArg::DivisorSum => SMethod::DivisorSum,
            };
            (*forms.s_series(req, method)?).clone()
        }
        SeriesKind::Phi => (*forms.phi(need(a.m, "m", &name)?, req)?).clone(),
        SeriesKind::Phi2 => {
            (*forms.phi2(need(a.m, "m", &name)?, need(a.n, "n", &name)?, req)?).clone()
        }
        SeriesKind::K3PointHodge => point_hodge_series(
            forms,
            SurfaceKind::K3,
            need(a.points, "points", &name)?,
            a.z_order,
            a.q_order,
        )?,
        SeriesKind::AbelianPointHodge => point_hodge_series(
            forms,
            SurfaceKind::Abelian,
            need(a.points, "points", &name)?,
            a.z_order,
            a.q_order,
        )?,
    };
    let bi = fit(&bi, req)?;
    let (j, rows) = bi_series(&bi);
    let mut body = json!({"form": name, "series": j});
    for (key, v) in [("m", a.m), ("n", a.n), ("points", a.points)] {
        if let Some(v) = v {
            body[key] = json!(v);
        }
    }
    Ok(Report::new("series", body).table(vec!["z_exp", "q_exp", "coefficient"], rows))
}

fn queries(a: &QueryArgs) -> Result<Vec<PointHodgeQuery>> {
    if let Some(path) = &a.batch {
        let qs: Vec<PointHodgeQuery> = serde_json::from_str(&read(path)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        for q in &qs {
            q.validate()?;
        }
        return Ok(qs);
    }
    let missing = |f: &str| Error::InvalidInput(format!("--{f} is required without --batch"));
    Ok(vec![PointHodgeQuery::new(
        a.surface.ok_or_else(|| missing("surface"))?,
        a.genus.ok_or_else(|| missing("genus"))?,
        a.points.ok_or_else(|| missing("points"))?,
        a.h.ok_or_else(|| missing("h"))?,
        a.div,
    )?])
}

fn point_hodge(forms: &Forms, a: &QueryArgs, mcf: bool) -> Result<Report> {
    let qs = queries(a)?;
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for q in &qs {
        let mut entry = json!({"query": q});
        let value = if mcf {
            let terms = mcf_point_hodge_terms(forms, q)?;
            entry["summands"] = Value::Array(
                terms
                    .iter()
                    .map(|t| {
                        json!({
                            "k": t.k,
                            "effective": t.effective,
                            "primitive_h": t.primitive_h,
                            "weight": r(&t.weight),
                            "primitive_value": r(&t.primitive_value),
                        })
                    })
                    .collect(),
            );
            terms.iter().map(|t| &t.weight * &t.primitive_value).sum()
        } else {
            primitive_point_hodge(forms, q)?
        };
        entry["value"] = json!(r(&value));
        rows.push(vec![
            q.kind.to_string(),
            q.g.to_string(),
            q.points.to_string(),
            q.h.to_string(),
            q.r.to_string(),
            r(&value),
        ]);
        results.push(entry);
    }
    let command = if mcf {
        "mcf point-hodge"
    } else {
        "invariant point-hodge"
    };
    let body = if a.batch.is_some() {
        json!({"results": results})
    } else {
        results.pop().expect("one query")
    };
    Ok(Report::new(command, body).table(
        vec!["surface", "genus", "points", "h", "div", "value"],
        rows,
    ))
}

fn mcf_general(
    surface: SurfaceKind,
    genus: i64,
    h: i64,
    div: u64,
    degrees: &str,
    values: &str,
) -> Result<Report> {
    let class = CurveClass::from_h(surface, h, div)?;
    let degrees = degrees
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<CohDegree>>>()?;
    let mut map = BTreeMap::new();
    for item in values.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected k:value in {item:?}")))?;
        let k: u64 = k
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad divisor {k:?}")))?;
        map.insert(k, rat::parse(v)?);
    }
    let value = general_mcf_transform(&class, genus, &degrees, &map)?;
    let body = json!({
        "surface": surface.to_string(),
        "genus": genus,
        "h": h,
        "div": div,
        "degrees": degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "exponent": r(&mcf_exponent(genus, &degrees)),
        "value": r(&value),
    });
    Ok(Report::new("mcf general", body).table(vec!["value"], vec![vec![r(&value)]]))
}

fn dr_vertex(forms: &Forms, path: &Path) -> Result<Report> {
    let query = input::dr_query(&read(path)?)?;
    let result = dr_rhs(forms, &query)?;
    let (series, _) = q_series(&result.series, "z");
    let invariants: Vec<Value> = result
        .invariants
        .iter()
        .map(|i| json!({"genus": i.genus, "z_exp": i.z_exp, "value": r(&i.value)}))
        .collect();
    let rows = result
        .invariants
        .iter()
        .map(|i| vec![i.genus.to_string(), i.z_exp.to_string(), r(&i.value)])
        .collect();
    let body = json!({
        "metadata": {
            "status": "conjectural",
            "partitions": "set partitions of leg indices, no symmetry factors",
            "phi_nonpositive": "phi_m = 0 for m <= 0",
        },
        "h": query.h,
        "legs": query.legs.len(),
        "series": series,
        "invariants": invariants,
    });
    Ok(Report::new("dr-vertex", body).table(vec!["genus", "z_exp", "value"], rows))
}

fn pt_transform(path: &Path) -> Result<Report> {
    let inp = input::pt_input(&read(path)?)?;
    let (lo, hi) = output_window(inp.ctx.r, &inp.primitive)?;
    let mut coefficients = Vec::new();
    let mut rows = Vec::new();
    // the series form needs a k-independent exponent; fall back to coefficients only
    let series = match inp.ctx.uniform_exponent() {
        Ok(_) => Some(pt_mcf_series(&inp.ctx, &inp.primitive, None)?),
        Err(_) => None,
    };
    for ch3 in lo..hi {
        let invariant = pt_mcf_coefficient(ch3, &inp.ctx, &inp.primitive)?;
        let series_coeff = sign_pow(ch3) * &invariant;
        if let Some(s) = &series {
            // both forms are computed independently; refuse to print a disagreement
            if s.coeff(ch3) != Some(&series_coeff) {
                return Err(Error::InvalidInput(format!(
                    "series and coefficient forms disagree at ch3 = {ch3}"
                )));
            }
        }
        coefficients.push(
            json!({"ch3": ch3, "invariant": r(&invariant), "series_coefficient": r(&series_coeff)}),
        );
        rows.push(vec![ch3.to_string(), r(&invariant), r(&series_coeff)]);
    }
    let convention = match inp.ctx.convention {
        SignConvention::CoefficientLevel => "coefficient",
        SignConvention::SeriesLevel => "series",
    };
    let body = json!({
        "r": inp.ctx.r,
        "nu": inp.ctx.nu.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "input_convention": convention,
        "window": {"lo": lo, "hi": hi},
        "coefficients": coefficients,
        "boundary_relabeling": "boundary and insertion classes are transported by phi_k; only numeric data is transformed",
    });
    Ok(Report::new("pt-transform", body)
        .table(vec!["ch3", "invariant", "series_coefficient"], rows))
}

//! `supermum`: JSON front end for the supermum library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use supermum::berezin::{berezin_integral, jacobian_berezinian, Box as SuperBox, PolyChange, PolySuperFunction};
use supermum::mumford::{
    mumford_ns_punctured_with, mumford_ns_with, mumford_ramond_with, LeftInversePolicy, LocalCoeff, NSLocalData,
    RamondLocalData, RamondPolicies,
};
use supermum::ranks::{moduli_dim, ramond_rank_table};
use supermum::supermatrix::{ber, berezinian, sm_exp_nilpotent, supertrace, supertranspose, Route, SuperMatrix};
use supermum::supernum::format_rational;
use supermum::susydisk::{is_superconformal, ramond_change_audit, residue, transform_section, BerSection, DiskChange, Series};
use supermum::Error;

#[derive(Parser)]
#[command(name = "supermum", version, about = "Exact supergeometry computations on JSON inputs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    output: Output,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Args)]
struct InputArg {
    /// JSON input file.
    input: PathBuf,
    /// Truncate every input series at this exponent.
    #[arg(long, allow_negative_numbers = true)]
    precision: Option<i64>,
}

#[derive(Args)]
struct MumfordArgs {
    #[command(flatten)]
    io: InputArg,
    /// `lex`, or `rows=i,j,...` (Ramond: `rows=A-rows/B-rows`, either side may be empty for lex).
    #[arg(long = "left-inverse", default_value = "lex")]
    left_inverse: String,
}

#[derive(Subcommand)]
enum Verb {
    /// Berezinian of an even square supermatrix.
    Ber {
        #[command(flatten)]
        io: InputArg,
        /// viaD, viaA or both; by default whichever factorisation is defined.
        #[arg(long)]
        route: Option<String>,
    },
    /// Supertrace.
    Strace(InputArg),
    /// Supertranspose.
    Stranspose(InputArg),
    /// Exponential of a nilpotent even supermatrix.
    Sexp(InputArg),
    /// Berezin integral of {"f", "box"}; with "change" also the pulled-back integral.
    BerezinInt(InputArg),
    /// Residue of {"weight": 1, "f"}; with "change" also after the change.
    Residue(InputArg),
    /// Superconformality of a disk change.
    CheckSc(InputArg),
    /// Ramond coordinate-change audit.
    RamondAudit(InputArg),
    /// Ramond super Mumford scalar.
    MumfordRamond(MumfordArgs),
    /// NS super Mumford scalar.
    MumfordNs(MumfordArgs),
    /// Punctured NS super Mumford scalar.
    MumfordNsPunctured(MumfordArgs),
    /// Rank of R^i π_* ω^j with Ramond punctures.
    #[command(allow_negative_numbers = true)]
    Ranks {
        #[arg(long)]
        g: i64,
        #[arg(long = "nR")]
        n_r: i64,
        #[arg(long)]
        i: i64,
        #[arg(long)]
        j: i64,
    },
    /// Dimension of the moduli space.
    ModuliDim {
        #[arg(long)]
        g: i64,
        #[arg(long = "nNS", default_value_t = 0)]
        n_ns: i64,
        #[arg(long = "nR", default_value_t = 0)]
        n_r: i64,
    },
}

enum Failure {
    Parse(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Value, Failure>;

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        match Error::from_serde_message(&msg) {
            Some(lib) => Failure::Lib(lib),
            None => Failure::Parse(msg),
        }
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn cap(s: &Series, k: Option<i64>) -> Result<Series, Error> {
    match k {
        Some(k) if k < s.k_max() => s.truncate(k),
        _ => Ok(s.clone()),
    }
}

fn cap_change(c: &DiskChange, k: Option<i64>) -> Result<DiskChange, Error> {
    DiskChange::new(cap(&c.z_image, k)?, cap(&c.theta_image, k)?, c.model)
}

fn cap_coeff(c: &LocalCoeff, k: Option<i64>) -> Result<LocalCoeff, Error> {
    Ok(match c {
        LocalCoeff::Series(s) => LocalCoeff::Series(cap(s, k)?),
        other => other.clone(),
    })
}

fn cap_table(t: &mut [Vec<LocalCoeff>], k: Option<i64>) -> Result<(), Error> {
    for c in t.iter_mut().flatten() {
        *c = cap_coeff(c, k)?;
    }
    Ok(())
}

fn parse_rows(s: &str) -> Result<LeftInversePolicy, Failure> {
    if s.is_empty() {
        return Ok(LeftInversePolicy::LexFirst);
    }
    let rows = s
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Parse(format!("bad row list {s:?}")))?;
    Ok(LeftInversePolicy::GivenRows(rows))
}

/// (policy for the first residue matrix, policy for the second).
fn parse_policy(s: &str) -> Result<(LeftInversePolicy, LeftInversePolicy), Failure> {
    if s == "lex" {
        return Ok((LeftInversePolicy::LexFirst, LeftInversePolicy::LexFirst));
    }
    let Some(lists) = s.strip_prefix("rows=") else {
        return Err(Failure::Parse(format!("--left-inverse expects lex or rows=..., got {s:?}")));
    };
    let (a, b) = lists.split_once('/').unwrap_or((lists, ""));
    Ok((parse_rows(a)?, parse_rows(b)?))
}

#[derive(Deserialize)]
struct IntegralInput {
    f: PolySuperFunction,
    #[serde(rename = "box")]
    bx: SuperBox,
    #[serde(default)]
    change: Option<PolyChange>,
}

#[derive(Deserialize)]
struct ResidueInput {
    weight: i64,
    f: Series,
    #[serde(default)]
    change: Option<DiskChange>,
}

fn run(verb: &Verb) -> Outcome {
    match verb {
        Verb::Ber { io, route } => {
            let m: SuperMatrix = read(&io.input)?;
            let v = match route {
                None => ber(&m)?,
                Some(r) => berezinian(&m, r.parse::<Route>()?)?,
            };
            Ok(json!({ "ber": to_value(&v) }))
        }
        Verb::Strace(io) => {
            let m: SuperMatrix = read(&io.input)?;
            Ok(json!({ "str": to_value(&supertrace(&m)?) }))
        }
        Verb::Stranspose(io) => {
            let m: SuperMatrix = read(&io.input)?;
            Ok(json!({ "matrix": to_value(&supertranspose(&m)) }))
        }
        Verb::Sexp(io) => {
            let m: SuperMatrix = read(&io.input)?;
            Ok(json!({ "matrix": to_value(&sm_exp_nilpotent(&m)?) }))
        }
        Verb::BerezinInt(io) => {
            let inp: IntegralInput = read(&io.input)?;
            let integral = berezin_integral(&inp.f, &inp.bx)?;
            let mut out = json!({ "integral": format_rational(&integral) });
            if let Some(c) = inp.change {
                c.validate()?;
                let jac = jacobian_berezinian(&c)?;
                let pulled = berezin_integral(&inp.f.compose(&c)?.mul(&jac), &inp.bx)?;
                out["jacobian_ber"] = to_value(&jac);
                out["pulled_back_integral"] = json!(format_rational(&pulled));
            }
            Ok(out)
        }
        Verb::Residue(io) => {
            let inp: ResidueInput = read(&io.input)?;
            let s = BerSection { weight: inp.weight, f: cap(&inp.f, io.precision)? };
            let mut out = json!({ "residue": to_value(&residue(&s)?) });
            if let Some(c) = inp.change {
                c.validate()?;
                let t = transform_section(&s, &cap_change(&c, io.precision)?)?;
                out["transformed_residue"] = to_value(&residue(&t)?);
            }
            Ok(out)
        }
        Verb::CheckSc(io) => {
            let c: DiskChange = read(&io.input)?;
            c.validate()?;
            Ok(to_value(&is_superconformal(&cap_change(&c, io.precision)?)?))
        }
        Verb::RamondAudit(io) => {
            let c: DiskChange = read(&io.input)?;
            c.validate()?;
            Ok(to_value(&ramond_change_audit(&cap_change(&c, io.precision)?)?))
        }
        Verb::MumfordRamond(args) => {
            let mut d: RamondLocalData = read(&args.io.input)?;
            let k = args.io.precision;
            for t in d.t_series.iter_mut() {
                *t = cap(t, k)?;
            }
            for t in [&mut d.phi, &mut d.xi, &mut d.sigma, &mut d.tau, &mut d.eta, &mut d.psi] {
                cap_table(t, k)?;
            }
            let (a, b) = parse_policy(&args.left_inverse)?;
            Ok(to_value(&mumford_ramond_with(&d, &RamondPolicies { a, b })?))
        }
        Verb::MumfordNs(args) | Verb::MumfordNsPunctured(args) => {
            let mut d: NSLocalData = read(&args.io.input)?;
            let k = args.io.precision;
            if let Some(nu) = d.nu.as_mut() {
                for s in nu.iter_mut() {
                    *s = cap(s, k)?;
                }
            }
            for t in [&mut d.phi, &mut d.chi, &mut d.psi, &mut d.sigma, &mut d.rho, &mut d.alpha, &mut d.beta] {
                cap_table(t, k)?;
            }
            for c in d.xi.iter_mut() {
                *c = cap_coeff(c, k)?;
            }
            let (p, _) = parse_policy(&args.left_inverse)?;
            let res = if matches!(verb, Verb::MumfordNs(_)) {
                mumford_ns_with(&d, &p)?
            } else {
                mumford_ns_punctured_with(&d, &p)?
            };
            Ok(to_value(&res))
        }
        Verb::Ranks { g, n_r, i, j } => Ok(to_value(&ramond_rank_table(*g, *n_r, *i, *j)?)),
        Verb::ModuliDim { g, n_ns, n_r } => Ok(to_value(&moduli_dim(*g, *n_ns, *n_r)?)),
    }
}

fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            map.iter()
                .map(|(k, x)| {
                    let val = match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    format!("{k:<width$}  {val}\n")
                })
                .collect()
        }
        other => format!("{other}\n"),
    }
}

fn emit(v: &Value, output: Output) {
    match output {
        Output::Json => println!("{v}"),
        Output::Text => print!("{}", render_text(v)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.verb) {
        Ok(v) => {
            emit(&v, cli.output);
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            emit(&json!({ "error": "ParseError", "detail": msg }), cli.output);
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            emit(&json!({ "error": e.name(), "detail": e.detail() }), cli.output);
            ExitCode::from(2)
        }
    }
}

//! Command line front end.
//!
//! Exit codes: `0` success, `1` usage or configuration error, `2` mathematical
//! failure (divergence, non-convergence or a violated bound).

use crate::error::{Error, Result};
use crate::fock::{build_space, FockSpec};
use crate::hankel::{self, CPrimeReport, HankelReport};
use crate::integral::{self, Atom, DiscreteMeasure};
use crate::multiplier::{self, kraus, Component, EigenOptions, Variant};
use crate::symbol::RadialSymbol;
use crate::wire::{parse_complex, JsonComplex, SCHEMA};
use crate::C64;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Largest index used for the lower bound `sup |φ(n)|`.
pub const LOWER_BOUND_HORIZON: usize = 32;

#[derive(Debug, Parser)]
#[command(name = "radial-mult", version, about = "Radial multiplier norms and truncated Fock space checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Symbol: geometric:<s>, indicator:<n>, truncated-geometric:<r>:<n>,
    /// constant:<c>, finite:@file, @file or inline JSON
    #[arg(short = 's', long, global = true)]
    pub symbol: Option<String>,
    /// Space: <dims>:<N> (e.g. 1,1:5), @file or inline JSON
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Measure: delta:<s>, random:<count>, @file or inline JSON
    #[arg(long, global = true)]
    pub measure: Option<String>,
    #[arg(long, global = true, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,
    /// Also compute the second-difference norm
    #[arg(long, global = true)]
    pub cprime: bool,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest word length in eigen checks (default min(2, N))
    #[arg(long, global = true)]
    pub max_word: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Class norm of a symbol via trace norms of its difference Hankel matrices
    Norm,
    /// Eigen-action of the multiplier on word operators of a truncated space
    FockVerify,
    /// Christensen–Sinclair bounds of the plan's maps against sup |φ(n)|
    CsBound,
    /// Measure-side checks: membership bound, headroom and doubling
    IntegralCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parsed and validated command configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub symbol: Option<RadialSymbol>,
    pub space: Option<FockSpec>,
    pub measure: Option<(C64, DiscreteMeasure)>,
    pub tol: f64,
    pub cprime: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub max_word: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        if !(cli.tol > 0.0 && cli.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", cli.tol)));
        }
        let symbol = cli.symbol.as_deref().map(parse_symbol).transpose()?;
        let space = cli.space.as_deref().map(parse_space).transpose()?;
        let measure = cli.measure.as_deref().map(|m| parse_measure(m, cli.seed)).transpose()?;
        let config = RunConfig {
            command: cli.command,
            symbol,
            space,
            measure,
            tol: cli.tol,
            cprime: cli.cprime,
            out: cli.out,
            format: cli.format,
            seed: cli.seed,
            max_word: cli.max_word,
        };
        match config.command {
            Command::Norm => {
                config.require_symbol()?;
            }
            Command::FockVerify | Command::CsBound => {
                config.require_symbol()?;
                config.require_space()?;
            }
            Command::IntegralCheck => {
                if config.symbol.is_none() && config.measure.is_none() {
                    return Err(Error::Config("integral-check needs --measure or --symbol".into()));
                }
            }
        }
        Ok(config)
    }

    fn require_symbol(&self) -> Result<&RadialSymbol> {
        self.symbol.as_ref().ok_or_else(|| Error::Config("--symbol is required".into()))
    }

    fn require_space(&self) -> Result<&FockSpec> {
        self.space.as_ref().ok_or_else(|| Error::Config("--space is required".into()))
    }
}

fn read_source(text: &str) -> Result<String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(Path::new(path))
            .map_err(|e| Error::Config(format!("cannot read {path}: {e}"))),
        None => Ok(text.to_string()),
    }
}

fn complex_arg(text: &str, what: &str) -> Result<C64> {
    parse_complex(text).ok_or_else(|| Error::Config(format!("cannot parse {what} '{text}' as a complex number")))
}

fn usize_arg(text: &str, what: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| Error::Config(format!("cannot parse {what} '{text}' as a non-negative integer")))
}

#[derive(Deserialize)]
struct FiniteData {
    values: Vec<JsonComplex>,
    tail: JsonComplex,
}

/// Parses the symbol shorthand grammar.
pub fn parse_symbol(text: &str) -> Result<RadialSymbol> {
    let text = text.trim();
    if text.starts_with('@') || text.starts_with('{') {
        return Ok(serde_json::from_str(&read_source(text)?)?);
    }
    let (family, args) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("symbol '{text}' is not of the form family:args")))?;
    match family {
        "geometric" => RadialSymbol::geometric(complex_arg(args, "s")?),
        "indicator" => Ok(RadialSymbol::indicator(usize_arg(args, "n")?)),
        "truncated-geometric" => {
            let (r, n) = args
                .split_once(':')
                .ok_or_else(|| Error::Config("truncated-geometric needs <r>:<n>".into()))?;
            let r: f64 = r.trim().parse().map_err(|_| Error::Config(format!("cannot parse r '{r}'")))?;
            RadialSymbol::truncated_geometric(r, usize_arg(n, "n")?)
        }
        "constant" => Ok(RadialSymbol::constant(complex_arg(args, "c")?)),
        "finite" => {
            let data: FiniteData = serde_json::from_str(&read_source(args)?)?;
            RadialSymbol::finite(data.values.into_iter().map(|v| v.0).collect(), data.tail.0)
        }
        other => Err(Error::Config(format!("unknown symbol family '{other}'"))),
    }
}

/// Parses `<dims>:<N>` (e.g. `2,2,2:3`), `@file` or inline JSON.
pub fn parse_space(text: &str) -> Result<FockSpec> {
    let text = text.trim();
    let spec: FockSpec = if text.starts_with('@') || text.starts_with('{') {
        serde_json::from_str(&read_source(text)?)?
    } else {
        let (dims, n) = text
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("space '{text}' is not of the form dims:N")))?;
        let factor_dims = dims.split(',').map(|d| usize_arg(d, "factor dimension")).collect::<Result<_>>()?;
        FockSpec::new(factor_dims, usize_arg(n, "max_len")?)
    };
    spec.validate()?;
    Ok(spec)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MeasureFile {
    Atoms(DiscreteMeasure),
    WithConstant {
        #[serde(default)]
        c: Option<JsonComplex>,
        atoms: DiscreteMeasure,
    },
}

/// Atom radius and weight bounds of `random:<count>` measures.
pub const RANDOM_MEASURE_RADIUS: f64 = 0.9;
pub const RANDOM_MEASURE_WEIGHT: f64 = 1.0;

/// Parses `delta:<s>`, `random:<count>`, `@file` or inline JSON (a list of
/// atoms, or `{"c": .., "atoms": [..]}`).
pub fn parse_measure(text: &str, seed: u64) -> Result<(C64, DiscreteMeasure)> {
    let text = text.trim();
    if let Some(s) = text.strip_prefix("delta:") {
        return Ok((C64::default(), DiscreteMeasure::delta(complex_arg(s, "atom")?)?));
    }
    if let Some(count) = text.strip_prefix("random:") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let measure = DiscreteMeasure::random(&mut rng, usize_arg(count, "atom count")?, RANDOM_MEASURE_RADIUS, RANDOM_MEASURE_WEIGHT)?;
        return Ok((C64::default(), measure));
    }
    let source = read_source(text)?;
    match serde_json::from_str::<MeasureFile>(&source) {
        Ok(MeasureFile::Atoms(m)) => Ok((C64::default(), m)),
        Ok(MeasureFile::WithConstant { c, atoms }) => Ok((c.map_or(C64::default(), |c| c.0), atoms)),
        Err(_) => {
            // re-parse strictly for a precise diagnostic
            serde_json::from_str::<Vec<Atom>>(&source)?;
            Err(Error::InvalidMeasure("unrecognised measure document".into()))
        }
    }
}

/// Result of a command: the report and whether every asserted check held.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub csv: Vec<Vec<String>>,
    pub ok: bool,
}

fn envelope(command: &str, mut body: Value) -> Value {
    body["schema"] = json!(SCHEMA);
    body["command"] = json!(command);
    body
}

fn sigma_rows(rows: &mut Vec<Vec<String>>, matrix: &str, sigma: &[f64]) {
    rows.extend(sigma.iter().enumerate().map(|(i, s)| vec![matrix.to_string(), i.to_string(), s.to_string()]));
}

pub fn cmd_norm(config: &RunConfig) -> Result<Outcome> {
    let sym = config.require_symbol()?;
    let report: HankelReport = hankel::c_norm(sym, config.tol)?;
    let mut csv = vec![vec!["matrix".into(), "index".into(), "sigma".into()]];
    sigma_rows(&mut csv, "h", &report.singular_values_h);
    sigma_rows(&mut csv, "k", &report.singular_values_k);
    let mut ok = report.converged;
    let mut body = json!({ "symbol": sym, "c_norm": report });
    if config.cprime {
        let prime: CPrimeReport = hankel::cprime_norm(sym, config.tol)?;
        sigma_rows(&mut csv, "hhat", &prime.singular_values_hhat);
        ok &= prime.converged;
        body["cprime_norm"] = serde_json::to_value(&prime)?;
    }
    Ok(Outcome { json: envelope("norm", body), csv, ok })
}

fn effective_max_word(config: &RunConfig, spec: &FockSpec) -> usize {
    config.max_word.unwrap_or(spec.max_len.min(2))
}

pub fn cmd_fock_verify(config: &RunConfig) -> Result<Outcome> {
    let sym = config.require_symbol()?;
    let spec = config.require_space()?;
    let max_word = effective_max_word(config, spec);
    if max_word > spec.max_len {
        return Err(Error::Config(format!("max_word {max_word} exceeds max_len {}", spec.max_len)));
    }
    let space = build_space(spec.clone())?;
    let plan = multiplier::build_plan(sym, config.tol, None)?;
    let eigen = multiplier::verify_eigenaction(&plan, &space, &EigenOptions { max_word, max_total: None, component: Component::Full, tol: config.tol })?;
    let shifts = multiplier::verify_shift_identities(&space, 2 * max_word, space.max_len())?;
    let ok = eigen.worst_residual <= config.tol && shifts.holds(config.tol);
    let mut csv = Vec::new();
    let mut buf = Vec::new();
    eigen.write_csv(&mut buf)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(buf.as_slice());
    for record in reader.records() {
        csv.push(record?.iter().map(String::from).collect());
    }
    let body = json!({
        "symbol": sym,
        "space": spec,
        "dim": space.dim(),
        "max_word": max_word,
        "plan": {
            "truncation": plan.truncation,
            "rank_h": plan.decomposition_h.rank(),
            "rank_k": plan.decomposition_k.rank(),
            "c": JsonComplex(plan.c),
            "vector_horizon": plan.vector_horizon,
            "beyond_horizon_mass": plan.beyond_horizon_mass,
            "cb_bound": multiplier::plan_cb_bound(&plan),
        },
        "eigen": eigen,
        "shift_identities": shifts,
        "holds": ok,
    });
    Ok(Outcome { json: envelope("fock-verify", body), csv, ok })
}

/// `sup_{n ≤ 32} |φ(n)|`, a lower bound for the cb norm of the multiplier.
pub fn eigenvalue_lower_bound(sym: &RadialSymbol) -> f64 {
    (0..=LOWER_BOUND_HORIZON).map(|n| sym.eval(n).norm()).fold(0.0, f64::max)
}

pub fn cmd_cs_bound(config: &RunConfig) -> Result<Outcome> {
    let sym = config.require_symbol()?;
    let spec = config.require_space()?;
    let space = build_space(spec.clone())?;
    let plan = multiplier::build_plan(sym, config.tol, None)?;
    let mut terms = Vec::new();
    let mut csv = vec![["matrix", "index", "row", "col", "bound", "cb"].map(String::from).to_vec()];
    let mut kraus_sum = 0.0;
    for (name, dec, variant) in [("h", &plan.decomposition_h, Variant::First), ("k", &plan.decomposition_k, Variant::Second)] {
        for (i, term) in dec.terms.iter().enumerate() {
            let b = kraus::cs_bound(&space, &term.x, &term.y, variant)?;
            kraus_sum += b.cb;
            csv.push(vec![name.into(), i.to_string(), b.row.to_string(), b.col.to_string(), b.bound.to_string(), b.cb.to_string()]);
            terms.push(json!({ "matrix": name, "index": i, "row": b.row, "col": b.col, "bound": b.bound, "cb": b.cb }));
        }
    }
    let c_norm_total = hankel::c_norm(sym, config.tol)?.total;
    let plan_bound = multiplier::plan_cb_bound(&plan);
    let lower = eigenvalue_lower_bound(sym);
    let ok = lower <= plan_bound + config.tol;
    let body = json!({
        "symbol": sym,
        "space": spec,
        "terms": terms,
        "kraus_cb_sum": kraus_sum + plan.c.norm(),
        "plan_cb_bound": plan_bound,
        "c_norm_total": c_norm_total,
        "lower_bound": lower,
        "holds": ok,
    });
    Ok(Outcome { json: envelope("cs-bound", body), csv, ok })
}

/// Largest `|eval_measure(c, ν, n) − φ(n)|` for `n ≤ 64`.
fn representation_error(sym: &RadialSymbol, c: C64, measure: &DiscreteMeasure) -> f64 {
    (0..=64).map(|n| (integral::eval_measure(c, measure, n) - sym.eval(n)).norm()).fold(0.0, f64::max)
}

pub fn cmd_integral_check(config: &RunConfig) -> Result<Outcome> {
    let tol = config.tol;
    let mut body = json!({});
    let mut csv = vec![["check", "lhs", "rhs", "holds"].map(String::from).to_vec()];
    let mut ok = true;
    let row = |csv: &mut Vec<Vec<String>>, name: &str, lhs: f64, rhs: f64, holds: bool| {
        csv.push(vec![name.into(), lhs.to_string(), rhs.to_string(), holds.to_string()]);
    };

    if let Some((c, measure)) = &config.measure {
        let membership = integral::verify_membership_bound(*c, measure, tol)?;
        row(&mut csv, "membership", membership.lhs, membership.rhs, membership.holds);
        ok &= membership.holds;
        let sym = RadialSymbol::from_measure(*c, measure.clone())?;
        let doubling = integral::verify_doubling(&sym, tol)?;
        row(&mut csv, "doubling", doubling.cprime_norm, doubling.c_norm, doubling.holds);
        ok &= doubling.holds;
        // a given measure need not be the economical one, so this is reported only
        let headroom = integral::verify_headroom(&sym, tol)?;
        row(&mut csv, "headroom_reported", headroom.representation_mass, headroom.bound, headroom.holds);
        body["measure"] = json!({
            "c": JsonComplex(*c),
            "atoms": measure,
            "weight": integral::weight(measure),
            "membership": membership,
            "doubling": doubling,
            "headroom": headroom,
        });
    }

    if let Some(sym) = &config.symbol {
        let doubling = integral::verify_doubling(sym, tol)?;
        row(&mut csv, "doubling", doubling.cprime_norm, doubling.c_norm, doubling.holds);
        ok &= doubling.holds;
        let mut entry = json!({ "symbol": sym, "doubling": doubling });
        match integral::representation_for(sym) {
            Ok((c, measure)) => {
                let error = representation_error(sym, c, &measure);
                row(&mut csv, "representation", error, tol, error <= tol);
                ok &= error <= tol;
                let membership = integral::verify_membership_bound(c, &measure, tol)?;
                row(&mut csv, "membership", membership.lhs, membership.rhs, membership.holds);
                ok &= membership.holds;
                let headroom = integral::verify_headroom(sym, tol)?;
                row(&mut csv, "headroom", headroom.representation_mass, headroom.bound, headroom.holds);
                ok &= headroom.holds;
                entry["representation"] = json!({
                    "c": JsonComplex(c),
                    "atoms": measure,
                    "max_eval_error": error,
                    "membership": membership,
                    "headroom": headroom,
                });
            }
            Err(Error::Unsupported(_)) => entry["representation"] = Value::Null,
            Err(e) => return Err(e),
        }
        body["symbol_checks"] = entry;
    }
    body["holds"] = json!(ok);
    Ok(Outcome { json: envelope("integral-check", body), csv, ok })
}

pub fn execute(config: &RunConfig) -> Result<Outcome> {
    match config.command {
        Command::Norm => cmd_norm(config),
        Command::FockVerify => cmd_fock_verify(config),
        Command::CsBound => cmd_cs_bound(config),
        Command::IntegralCheck => cmd_integral_check(config),
    }
}

/// Exit code for an error: `1` for configuration problems, `2` for mathematical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NonConvergent { .. }
        | Error::NotInClassC(_)
        | Error::NotInClassCPrime(_)
        | Error::NumericalFailure(_)
        | Error::UnsupportedTail { .. } => 2,
        _ => 1,
    }
}

fn write_outcome(config: &RunConfig, outcome: &Outcome) -> Result<()> {
    let mut sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match config.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &outcome.json)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(&mut sink);
            for record in &outcome.csv {
                writer.write_record(record)?;
            }
            writer.flush()?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let outcome = execute(&config)?;
        write_outcome(&config, &outcome)?;
        Ok(outcome.ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("radial-mult: a checked bound or convergence criterion failed");
            2
        }
        Err(e) => {
            eprintln!("radial-mult: {e}");
            exit_code(&e)
        }
    }
}

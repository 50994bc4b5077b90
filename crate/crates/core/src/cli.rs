//! Command-line front end.
//!
//! Exit codes: 0 success, 1 parse/usage error, 2 precondition violation,
//! 3 resource cap exceeded, 4 corpus reproduction failure. Errors print one
//! line `error: <Kind>: <message>` on stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::blowup::{chart, charts, ChartReport};
use crate::bracket::BracketSpace;
use crate::config::Limits;
use crate::corpus::{
    any_failed, classify, monotonicity_experiment, reproduce_corpus, ClassifyConfig, Corpus,
};
use crate::criteria::{
    fedder_is_fpure, isolated_singularity_certify, sfr_search, IsolatedOutcome, SfrHypotheses,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::invariants::{invariant_series, InvariantReport};
use crate::parse::{parse_poly, parse_vars};
use crate::poly::SparsePolynomial;

#[derive(Debug, Parser)]
#[command(
    name = "charp",
    version,
    about = "Frobenius invariants of hypersurface singularities over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fedder's F-purity test at the origin.
    Fpure {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        e: u32,
    },
    /// Search for a strong F-regularity certificate.
    Sfr {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        search: Search,
    },
    /// F-signature estimates s_e for e = 1..e_max.
    Fsig {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "CHARP_E_MAX", default_value_t = 2)]
        e_max: u32,
        /// Write the operator used for the e = 1 row to this file.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Hilbert-Kunz estimates e_HK,e for e = 1..e_max.
    Hk {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "CHARP_E_MAX", default_value_t = 2)]
        e_max: u32,
        /// Write the operator used for the e = 1 row to this file.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Standard affine charts of the blowup at the origin.
    Blowup {
        #[command(flatten)]
        input: Input,
        /// 1-based chart index; all charts when omitted.
        #[arg(long)]
        chart: Option<usize>,
    },
    /// Smoothness, isolated singularity, F-purity, SFR search and invariants.
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        search: Search,
        /// Largest iterate for the invariant rows (defaults to --e-max).
        #[arg(long)]
        inv_e_max: Option<u32>,
    },
    /// Run the example corpus and compare against recorded expectations.
    Paper {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "CHARP_CORPUS")]
        corpus: Option<PathBuf>,
    },
    /// Compare s_e at the singular point with s_e at the chart origins.
    Monotone {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        e: u32,
        /// Vouch for the smallness or discrepancy hypotheses.
        #[arg(long)]
        assert_hypotheses: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, env = "CHARP_FORMAT", default_value_t = Format::Json)]
    format: Format,
    #[arg(long, env = "CHARP_DENSE_THRESHOLD", default_value_t = 4096)]
    dense_threshold: usize,
    #[arg(long, env = "CHARP_TERM_CAP", default_value_t = 1 << 26)]
    term_cap: usize,
    #[arg(long, env = "CHARP_DIM_CAP", default_value_t = 1 << 24)]
    dim_cap: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "CHARP_JOBS")]
    jobs: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, env = "CHARP_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Input {
    #[arg(long, env = "CHARP_PRIME")]
    prime: u64,
    /// Comma-separated variable names.
    #[arg(long, env = "CHARP_VARS")]
    vars: String,
    #[arg(long, env = "CHARP_POLY", allow_hyphen_values = true)]
    poly: String,
    /// Analyze at this rational point (comma-separated) instead of the origin.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Search {
    #[arg(long, env = "CHARP_E_MAX", default_value_t = 2)]
    e_max: u32,
    #[arg(long, env = "CHARP_D_MAX", default_value_t = 30)]
    d_max: u32,
    /// Witness polynomial; defaults to the first variable nonzero modulo f.
    #[arg(long, allow_hyphen_values = true)]
    witness: Option<String>,
    /// Assert that S/(f) is a domain.
    #[arg(long)]
    domain: bool,
    /// Skip the isolated-singularity certification.
    #[arg(long)]
    skip_isolated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Common {
    fn limits(&self) -> Result<Limits> {
        if self.dense_threshold == 0 || self.term_cap == 0 || self.dim_cap == 0 {
            return Err(Error::InvalidArgument("caps must be positive".into()));
        }
        Ok(Limits {
            term_cap: self.term_cap,
            dim_cap: self.dim_cap,
            dense_threshold: self.dense_threshold,
        })
    }
}

impl Input {
    fn polynomial(&self) -> Result<SparsePolynomial> {
        let field = FieldSpec::new(self.prime)?;
        let vars = parse_vars(&self.vars)?;
        let f = parse_poly(&self.poly, &vars, field)?;
        match &self.at {
            None => Ok(f),
            Some(at) => {
                let point: Vec<i64> = at
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<i64>().map_err(|_| {
                            Error::InvalidArgument(format!("bad point coordinate `{s}`"))
                        })
                    })
                    .collect::<Result<_>>()?;
                if point.len() != f.nvars() {
                    return Err(Error::InvalidArgument(format!(
                        "point has {} coordinates, expected {}",
                        point.len(),
                        f.nvars()
                    )));
                }
                f.translate(&point)
            }
        }
    }

    fn witness(&self, text: Option<&str>) -> Result<Option<SparsePolynomial>> {
        let field = FieldSpec::new(self.prime)?;
        let vars = parse_vars(&self.vars)?;
        text.map(|w| parse_poly(w, &vars, field)).transpose()
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("error: UsageError: {first}");
            return 1;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e);
            e.exit_code()
        }
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Fpure { input, .. }
        | Command::Sfr { input, .. }
        | Command::Fsig { input, .. }
        | Command::Hk { input, .. }
        | Command::Blowup { input, .. }
        | Command::Classify { input, .. }
        | Command::Monotone { input, .. } => &input.common,
        Command::Paper { common, .. } => common,
    }
}

fn run(cli: Cli) -> Result<i32> {
    let common = common(&cli.command);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Error::Io(e.to_string()))?;
    let (text, code) = pool.install(|| execute(&cli.command))?;
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(e.to_string()))?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn unsupported(format: Format, what: &str) -> Error {
    Error::InvalidArgument(format!("format {format:?} is not supported for {what}").to_lowercase())
}

fn execute(cmd: &Command) -> Result<(String, i32)> {
    let common = common(cmd);
    let limits = common.limits()?;
    let format = common.format;
    match cmd {
        Command::Fpure { input, e } => {
            let f = input.polynomial()?;
            let v = fedder_is_fpure(&f, *e, &limits)?;
            let text = match format {
                Format::Json => to_json(&json!({ "fpure": v })),
                Format::Text => format!("fpure:{v}\n"),
                Format::Csv => format!("fpure\n{v}\n"),
            };
            Ok((text, 0))
        }
        Command::Sfr { input, search } => {
            let f = input.polynomial()?;
            let witness = input.witness(search.witness.as_deref())?;
            let isolated = if search.skip_isolated {
                None
            } else {
                Some(isolated_singularity_certify(&f, search.d_max, &limits)?)
            };
            let hypotheses = SfrHypotheses {
                domain_asserted: search.domain,
                isolated_certified: matches!(isolated, Some(IsolatedOutcome::Certified { .. })),
            };
            let out = sfr_search(&f, search.e_max, witness.as_ref(), hypotheses, &limits)?;
            let text = match format {
                Format::Json => to_json(&json!({
                    "sfr": out.status.to_string(),
                    "outcome": out,
                    "isolated": isolated.map(|i| i.to_string()),
                    "note": "inconclusive never means \"not strongly F-regular\": a finite search cannot refute",
                })),
                Format::Text => {
                    let mut s = format!("{}\nwitness: {}\n", out.status, out.witness);
                    for step in &out.transcript {
                        writeln!(s, "e={}: survives={}", step.e, step.survives).unwrap();
                    }
                    for w in &out.warnings {
                        writeln!(s, "warning: {w}").unwrap();
                    }
                    s
                }
                Format::Csv => return Err(unsupported(format, "sfr")),
            };
            Ok((text, 0))
        }
        Command::Fsig {
            input,
            e_max,
            dump_matrix,
        }
        | Command::Hk {
            input,
            e_max,
            dump_matrix,
        } => {
            let f = input.polynomial()?;
            let report = invariant_series(&f, *e_max, &limits)?;
            if let Some(path) = dump_matrix {
                let is_fsig = matches!(cmd, Command::Fsig { .. });
                dump_operator(&f, is_fsig, path, &limits)?;
            }
            let text = match format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
                Format::Text => report_text(&report),
            };
            Ok((text, 0))
        }
        Command::Blowup {
            input,
            chart: which,
        } => {
            let f = input.polynomial()?;
            let rings = match which {
                Some(0) => {
                    return Err(Error::InvalidChartIndex {
                        index: 0,
                        n: f.nvars(),
                    })
                }
                Some(i) => vec![chart(&f, i - 1)?],
                None => charts(&f)?,
            };
            let reports: Vec<ChartReport> = rings.iter().map(|c| c.report()).collect();
            let text = match (format, which) {
                (Format::Json, Some(_)) => to_json(&reports[0]),
                (Format::Json, None) => to_json(&reports),
                (Format::Text, _) => {
                    let mut s = String::new();
                    for (r, c) in reports.iter().zip(&rings) {
                        writeln!(
                            s,
                            "chart {}: {} (dropped {}^{}, origin on strict transform: {}; {})",
                            r.chart,
                            r.poly,
                            c.chart_poly.vars()[c.index],
                            r.dropped_power,
                            r.origin_on_strict_transform,
                            c.substitution.join(", ")
                        )
                        .unwrap();
                    }
                    s
                }
                (Format::Csv, _) => return Err(unsupported(format, "blowup")),
            };
            Ok((text, 0))
        }
        Command::Classify {
            input,
            search,
            inv_e_max,
        } => {
            let f = input.polynomial()?;
            let witness = input.witness(search.witness.as_deref())?;
            let config = ClassifyConfig {
                e_max: search.e_max,
                inv_e_max: inv_e_max.unwrap_or(search.e_max),
                d_max: search.d_max,
                domain_asserted: search.domain,
                limits,
            };
            let c = classify(&f, witness.as_ref(), &config)?;
            let text = match format {
                Format::Json => to_json(&c),
                Format::Text => {
                    let mut s = c.verdicts.join("\n");
                    s.push('\n');
                    s.push_str(&report_text(&c.invariants));
                    s
                }
                Format::Csv => return Err(unsupported(format, "classify")),
            };
            Ok((text, 0))
        }
        Command::Paper { corpus, .. } => {
            let corpus = match corpus {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    Corpus::from_json(&text)?
                }
                None => Corpus::builtin(),
            };
            let records = reproduce_corpus(&corpus, &limits)?;
            let code = if any_failed(&records) { 4 } else { 0 };
            let text = match format {
                Format::Json => to_json(&records),
                Format::Csv | Format::Text => {
                    let mut s = String::new();
                    if format == Format::Csv {
                        s.push_str("name,check,status\n");
                    }
                    for r in &records {
                        if format == Format::Csv {
                            writeln!(s, "{},{},{:?}", r.name, r.check, r.status).unwrap();
                        } else {
                            writeln!(
                                s,
                                "{:<10} {:<24} {:<13} expected={} actual={}",
                                r.name,
                                r.check,
                                serde_json::to_string(&r.status).unwrap().trim_matches('"'),
                                r.expected,
                                r.actual
                            )
                            .unwrap();
                        }
                    }
                    s
                }
            };
            Ok((text, code))
        }
        Command::Monotone {
            input,
            e,
            assert_hypotheses,
        } => {
            let f = input.polynomial()?;
            let result = monotonicity_experiment(&f, *e, *assert_hypotheses, &limits)?;
            let text = match format {
                Format::Json => to_json(&result),
                Format::Text => {
                    let mut s = format!("base s_{} = {}\n", result.e, result.base.s_e);
                    for c in &result.charts {
                        match &c.row {
                            Some(r) => {
                                writeln!(s, "chart {}: {} s_{} = {}", c.chart, c.poly, r.e, r.s_e)
                                    .unwrap()
                            }
                            None => writeln!(
                                s,
                                "chart {}: {} (origin not on strict transform)",
                                c.chart, c.poly
                            )
                            .unwrap(),
                        }
                    }
                    writeln!(s, "verdict: {}", result.verdict_label).unwrap();
                    s
                }
                Format::Csv => return Err(unsupported(format, "monotone")),
            };
            Ok((text, 0))
        }
    }
}

fn report_text(report: &InvariantReport) -> String {
    let mut s = format!("p={} n={} f={}\n", report.p, report.n, report.poly);
    for r in &report.rows {
        write!(
            s,
            "e={} q={} colength_Ie={} colength_bracket={} s_e={} ehk_e={}",
            r.e, r.q, r.colength_ie, r.colength_bracket, r.s_e, r.ehk_e
        )
        .unwrap();
        if let Some(d) = r.mult2_deviation {
            write!(s, " mult2_deviation={d}").unwrap();
        }
        s.push('\n');
    }
    for n in &report.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

fn dump_operator(f: &SparsePolynomial, fsig: bool, path: &PathBuf, limits: &Limits) -> Result<()> {
    let space = BracketSpace::new(f.field(), f.nvars(), 1, limits)?;
    let g = if fsig {
        f.truncated_pow(space.q() - 1, space.q(), limits)?
    } else {
        f.clone()
    };
    let op = space.mult_operator(&g, limits)?;
    std::fs::write(path, op.dump()).map_err(|e| Error::Io(e.to_string()))
}

//! The `critbase` command line.
//!
//! Every command produces a list of flat records rendered as text, CSV or
//! JSON. Numbers are rounded to 15 significant digits before rendering, so
//! all three formats carry identical values.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::critical::{self, Descent, Params, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::numerics::{self, Extremes, DEFAULT_TAU, DEFAULT_TOL};
use crate::uniqueness::{self, Certificate};
use crate::words::{self, Directive, EpWord, FiniteWord};

#[derive(Debug, Parser)]
#[command(name = "critbase", version, about = "Critical bases for unique expansions over {0, 1, m}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Root-finding tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Slack for interval membership and boundary verdicts.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Maximal depth of the substitution-tree descent.
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write records to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Params {
        Params { tol: self.tol, tau: self.tau, max_depth: self.max_depth }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical form and orbit extremes of a word, optionally its image.
    Word {
        #[arg(long)]
        word: String,
        /// Apply this directive to the word.
        #[arg(long)]
        directive: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The parameter μ at which f and g of a word coincide.
    Mu {
        /// Word literal; defaults to σ(0̄) when only --directive is given.
        #[arg(long)]
        word: Option<String>,
        /// Directive in {L,R}*M: also evaluate the closed form for σ(0̄).
        #[arg(long)]
        directive: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// f_u(m) and g_u(m).
    Fg {
        #[arg(long)]
        word: String,
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        common: Common,
    },
    /// The critical bases L(m) and G(m).
    Critical {
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep of G and L over a grid of m.
    Scan {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Emit the columns m, G, L, sqrt_bound, upper.
        #[arg(long)]
        figure: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Uniqueness of a word over {0, 1, m} (digit 2 stands for m).
    Unique {
        #[arg(long)]
        word: String,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Certify that all concatenations of two blocks are unique.
    Certify {
        #[arg(long)]
        m: f64,
        /// Base; defaults to L(m) + --offset.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        offset: f64,
        /// First block; when omitted the plateau family of L(m) is searched.
        #[arg(long)]
        v: Option<String>,
        #[arg(long)]
        w: Option<String>,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        /// Largest block exponent tried in the family search.
        #[arg(long, default_value_t = 12)]
        max_h: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Prefix of the limit word of a directive.
    Limitword {
        #[arg(long)]
        directive: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Descent trace for L(m).
    Classify {
        #[arg(long)]
        m: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Census of binary prefixes not yet excluded by the holes.
    Count {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 16)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Word { common, .. }
            | Command::Mu { common, .. }
            | Command::Fg { common, .. }
            | Command::Critical { common, .. }
            | Command::Scan { common, .. }
            | Command::Unique { common, .. }
            | Command::Certify { common, .. }
            | Command::Limitword { common, .. }
            | Command::Classify { common, .. }
            | Command::Count { common, .. } => common,
        }
    }

    /// Whether JSON output is an array even for a single record.
    fn is_table(&self) -> bool {
        matches!(self, Command::Scan { .. } | Command::Classify { .. } | Command::Count { .. })
    }
}

type Record = Map<String, Value>;

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round15(x)).map(Value::Number).unwrap_or(Value::Null)
}

struct RecordBuilder(Record);

impl RecordBuilder {
    fn new() -> Self {
        RecordBuilder(Map::new())
    }

    fn num(mut self, k: &str, x: f64) -> Self {
        self.0.insert(k.into(), num(x));
        self
    }

    fn opt_num(mut self, k: &str, x: Option<f64>) -> Self {
        self.0.insert(k.into(), x.map(num).unwrap_or(Value::Null));
        self
    }

    fn int(mut self, k: &str, x: u64) -> Self {
        self.0.insert(k.into(), Value::from(x));
        self
    }

    fn opt_int(mut self, k: &str, x: Option<usize>) -> Self {
        self.0.insert(k.into(), x.map(|x| Value::from(x as u64)).unwrap_or(Value::Null));
        self
    }

    fn str(mut self, k: &str, s: impl ToString) -> Self {
        self.0.insert(k.into(), Value::String(s.to_string()));
        self
    }

    fn opt_str(mut self, k: &str, s: Option<impl ToString>) -> Self {
        self.0.insert(k.into(), s.map(|s| Value::String(s.to_string())).unwrap_or(Value::Null));
        self
    }

    fn done(self) -> Record {
        self.0
    }
}

fn parse_word(s: &str) -> Result<EpWord> {
    words::parse_word(s)
}

fn parse_directive(s: &str) -> Result<Directive> {
    s.parse()
}

fn execute(cmd: &Command) -> Result<Vec<Record>> {
    match cmd {
        Command::Word { word, directive, .. } => {
            let u = parse_word(word)?;
            let image = match directive {
                Some(d) => Some(parse_directive(d)?.morphism().apply(&u)?),
                None => None,
            };
            Ok(vec![RecordBuilder::new()
                .str("word", &u)
                .str("inf", u.orbit_inf())
                .str("sup", u.orbit_sup())
                .opt_str("inf1", u.orbit_inf1().ok())
                .opt_str("sup0", u.orbit_sup0().ok())
                .opt_str("image", image)
                .done()])
        }
        Command::Mu { word, directive, common } => {
            let d = directive.as_deref().map(parse_directive).transpose()?;
            let u = match (word, &d) {
                (Some(w), _) => parse_word(w)?,
                (None, Some(d)) => d.morphism().apply(&EpWord::constant(0))?,
                (None, None) => {
                    return Err(Error::Precondition("mu needs --word or --directive".into()))
                }
            };
            let mu = numerics::solve_mu(&u, common.tol)?;
            let closed = match &d {
                Some(d) => Some(numerics::mu_periodic_closed_form(d, common.tol)?),
                None => numerics::sturmian_tail(&u)
                    .map(|v| numerics::mu_sturmian_closed_form(&v, common.tol))
                    .transpose()?,
            };
            Ok(vec![RecordBuilder::new()
                .str("word", &u)
                .num("mu", mu)
                .num("bracket_width", common.tol)
                .opt_num("closed_form", closed)
                .done()])
        }
        Command::Fg { word, m, common } => {
            let u = parse_word(word)?;
            numerics::check_m(*m)?;
            let f = if u.at_least_two(1) { Some(numerics::solve_f(&u, *m, common.tol)?) } else { None };
            let g = numerics::solve_g(&u, *m, common.tol)?;
            let ext = Extremes::of(&u);
            Ok(vec![RecordBuilder::new()
                .str("word", &u)
                .num("m", *m)
                .opt_num("f", f)
                .num("g", g)
                .str("inf", ext.inf)
                .str("sup", ext.sup)
                .done()])
        }
        Command::Critical { m, common } => {
            let mut descent = Descent::new(common.params())?;
            let l = descent.critical_l(*m)?;
            let g = descent.critical_g(*m)?;
            Ok(vec![RecordBuilder::new()
                .num("m", *m)
                .num("L", l.beta)
                .str("case", l.case.kind)
                .str("directive", &l.case.directive)
                .str("witness", &l.case.witness)
                .num("bracket_width", l.bracket_width)
                .int("depth_used", l.depth_used as u64)
                .num("G", g.beta)
                .str("caseG", g.case.summary())
                .done()])
        }
        Command::Scan { from, to, step, figure, common } => {
            let rows = critical::scan(*from, *to, *step, common.params())?;
            Ok(rows
                .into_iter()
                .map(|r| {
                    let b = RecordBuilder::new().num("m", r.m).num("G", r.g).num("L", r.l);
                    if *figure {
                        b.num("sqrt_bound", 1.0 + r.m.sqrt()).num("upper", 1.0 + r.m).done()
                    } else {
                        b.str("caseG", r.case_g).str("caseL", r.case_l).done()
                    }
                })
                .collect())
        }
        Command::Unique { word, beta, m, common } => {
            let u = parse_word(word)?;
            let verdict = uniqueness::is_unique_with(&u, *beta, *m, common.tau)?;
            let via_fg = if u.is_binary() && u.at(0) == 1 && u.at_least_two(1) {
                Some(uniqueness::binary_membership_via_fg(&u, *beta, *m, common.tau)?.status)
            } else {
                None
            };
            let status = |s: uniqueness::Status| serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from));
            Ok(vec![RecordBuilder::new()
                .str("word", &u)
                .num("beta", *beta)
                .num("m", *m)
                .opt_str("status", status(verdict.status))
                .opt_int("witness_position", verdict.witness_position)
                .opt_str("status_fg", via_fg.and_then(status))
                .done()])
        }
        Command::Certify { m, beta, offset, v, w, horizon, max_h, common } => {
            let (beta, case) = match beta {
                Some(b) => (*b, None),
                None => {
                    let l = critical::critical_l(*m, common.params())?;
                    (l.beta + offset, Some(l.case))
                }
            };
            let found = match (v, w) {
                (Some(v), Some(w)) => {
                    let (v, w): (FiniteWord, FiniteWord) = (v.parse()?, w.parse()?);
                    let cert = uniqueness::pair_certificate(&v, &w, beta, *m, *horizon)?;
                    let dim = match cert {
                        Certificate::Certified => Some(uniqueness::hutchinson_dim(v.len(), w.len(), beta)?),
                        Certificate::Unknown => None,
                    };
                    (None, Some(v), Some(w), cert, dim)
                }
                (None, None) => {
                    let case = match case {
                        Some(c) => c,
                        None => critical::critical_l(*m, common.params())?.case,
                    };
                    match uniqueness::search_certificate(&case, beta, *m, *max_h, *horizon)? {
                        Some(p) => (Some(p.h), Some(p.v), Some(p.w), Certificate::Certified, Some(p.dimension)),
                        None => (None, None, None, Certificate::Unknown, None),
                    }
                }
                _ => return Err(Error::Precondition("give both --v and --w or neither".into())),
            };
            let (h, v, w, cert, dim) = found;
            Ok(vec![RecordBuilder::new()
                .num("m", *m)
                .num("beta", beta)
                .opt_int("h", h)
                .opt_str("v", v)
                .opt_str("w", w)
                .str("status", if cert == Certificate::Certified { "certified" } else { "unknown" })
                .opt_num("dimension", dim)
                .done()])
        }
        Command::Limitword { directive, n, .. } => {
            let d = parse_directive(directive)?;
            let prefix = words::limit_word_prefix(&d, *n)?;
            Ok(vec![RecordBuilder::new()
                .str("directive", &d)
                .int("n", *n as u64)
                .str("prefix", prefix)
                .done()])
        }
        Command::Classify { m, common } => {
            let trace = critical::classify(*m, common.params())?;
            Ok(trace
                .into_iter()
                .enumerate()
                .map(|(depth, node)| {
                    let bp = |i: usize| node.breakpoints.get(i).copied();
                    RecordBuilder::new()
                        .int("depth", depth as u64)
                        .str("node", &node.directive)
                        .opt_num("mu1", bp(0))
                        .opt_num("mu2", bp(1))
                        .opt_num("mu3", bp(2))
                        .opt_num("mu4", bp(3))
                        .str("decision", node.decision)
                        .done()
                })
                .collect())
        }
        Command::Count { beta, m, depth, .. } => {
            if *depth == 0 || *depth > 28 {
                return Err(Error::Domain(format!("depth must lie in 1..=28, got {depth}")));
            }
            let counts = uniqueness::census(*beta, *m, *depth)?;
            Ok(counts
                .into_iter()
                .enumerate()
                .map(|(i, c)| RecordBuilder::new().int("n", i as u64 + 1).int("count", c).done())
                .collect())
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn render(records: &[Record], format: Format, table: bool) -> String {
    let mut out = String::new();
    match format {
        Format::Json => {
            let text = if table || records.len() != 1 {
                serde_json::to_string(records)
            } else {
                serde_json::to_string(&records[0])
            };
            out.push_str(&text.expect("records serialise"));
            out.push('\n');
        }
        Format::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<_> = first.keys().cloned().map(csv_field).collect();
                out.push_str(&header.join(","));
                out.push('\n');
            }
            for r in records {
                let row: Vec<_> = r.values().map(|v| csv_field(scalar_text(v))).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        Format::Text => {
            if table {
                if let Some(first) = records.first() {
                    out.push_str(&first.keys().cloned().collect::<Vec<_>>().join("\t"));
                    out.push('\n');
                }
                for r in records {
                    let row: Vec<_> = r.values().map(scalar_text).collect();
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            } else {
                for r in records {
                    let width = r.keys().map(|k| k.len()).max().unwrap_or(0);
                    for (k, v) in r {
                        out.push_str(&format!("{k:<width$}  {}\n", scalar_text(v)));
                    }
                }
            }
        }
    }
    out
}

fn error_record(e: &Error) -> String {
    let kind = match e {
        Error::Parse(_) | Error::EmptyPeriod => "parse",
        Error::Domain(_) => "domain",
        Error::Precondition(_) | Error::NotBinary | Error::MissingLetter(_) => "precondition",
        Error::NoStabilisation { .. } | Error::PrefixTooShort { .. } => "unattainable",
        Error::NoDecoding(_) | Error::NoBracket { .. } => "numerics",
    };
    let mut rec = Map::new();
    rec.insert("error".into(), Value::String(kind.into()));
    rec.insert("detail".into(), Value::String(e.to_string()));
    serde_json::to_string(&rec).expect("error record serialises")
}

/// Runs the CLI on `argv` (including the program name). Records go to `out`
/// (or `--out FILE`), diagnostics to `err`. Returns the exit status:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let common = cli.command.common();
    match execute(&cli.command) {
        Ok(records) => {
            let text = render(&records, common.format, cli.command.is_table());
            let written = match &common.out {
                Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
                None => out.write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "{}", error_record(&Error::Domain(format!("write failed: {e}"))));
                    1
                }
            }
        }
        Err(e) => {
            let _ = writeln!(out, "{}", error_record(&e));
            // grid errors are usage errors of the sweep
            if matches!(cli.command, Command::Scan { .. }) && matches!(e, Error::Domain(_)) {
                2
            } else {
                1
            }
        }
    }
}

pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("critbase").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn round15_keeps_fifteen_digits() {
        assert_eq!(round15(2.0), 2.0);
        assert_eq!(round15(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round15(0.0), 0.0);
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = call(&["critical", "--m", "2", "--bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&[]).0, 2);
    }

    #[test]
    fn domain_errors_exit_one_with_record() {
        let (code, out, _) = call(&["fg", "--word", "1()", "--m", "1.5"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["error"], "parse");
        let (code, out, _) = call(&["mu", "--word", "1(0)"]);
        assert_eq!(code, 1);
        assert!(out.contains("\"error\":\"precondition\""));
    }

    #[test]
    fn word_command_text() {
        let (code, out, _) = call(&["word", "--word", "0(10)", "--directive", "M"]);
        assert_eq!(code, 0);
        assert!(out.contains("word"));
        assert!(out.contains("(01)"));
        assert!(out.contains("(0110)"));
    }
}

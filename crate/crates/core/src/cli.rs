//! Command-line front end.  Every subcommand delegates to one library call.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dist::{Conjugator, DistError, Distribution, RadiusParam, SemidirectElement};
use crate::format::{self, ParseError};
use crate::graded::{Ambient, GradedError, GradedIdeal, GradedPoly};
use crate::group::{GroupElement, GroupError, GroupModel};
use crate::mahler::{self, FunctionSpec, MahlerError, MahlerTable};
use crate::padic::{floor_i64, PadicError, Rational};
use crate::verify::{self, ReportFormat, SuiteConfig, VerifyError};

/// Largest truncation weight accepted on the command line.
pub const MAX_TRUNC: i64 = 64;

pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const PRECISION: i32 = 4;
    pub const RADIUS: i32 = 5;
    pub const RANGE: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("invalid radius exponent `{0}`: need a rational s with 0 < s <= 1")]
    Radius(String),
    #[error("{0}")]
    Range(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::USAGE,
            CliError::Parse { .. } => exit::PARSE,
            CliError::Radius(_) => exit::RADIUS,
            CliError::Range(_) => exit::RANGE,
            CliError::Precision(_) => exit::PRECISION,
        }
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        match e {
            PadicError::PrecisionRange { .. } | PadicError::InvalidPrime(_) => CliError::Range(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::Padic(p) => p.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::Group(g) => g.into(),
            DistError::Padic(p) => p.into(),
            DistError::InvalidRadius(s) => CliError::Radius(s.to_string()),
            DistError::NegativeTruncation => CliError::Range(e.to_string()),
            DistError::InsufficientPrecision(_) | DistError::UnboundedTail(_) => CliError::Precision(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<MahlerError> for CliError {
    fn from(e: MahlerError) -> Self {
        match e {
            MahlerError::Dist(d) => d.into(),
            MahlerError::Padic(p) => p.into(),
            MahlerError::UnboundedTail(_) => CliError::Precision(e.to_string()),
            MahlerError::Level(_) => CliError::Range(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<GradedError> for CliError {
    fn from(e: GradedError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Group(g) => g.into(),
            VerifyError::Dist(d) => d.into(),
            VerifyError::Mahler(m) => m.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "padist", version, about = "Exact arithmetic in p-adic distribution algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Group id: abelian:<d>:<p>, heisenberg:<p>, semidirect:<p>.
    #[arg(long)]
    pub group: Option<String>,
    /// Precision cap N (scalars are kept mod p^N).
    #[arg(short = 'N', default_value_t = 12)]
    pub cap: u32,
    /// Truncation weight T (integer or n/d).
    #[arg(short = 'T', default_value = "12")]
    pub trunc: String,
    /// Radius exponent s as n/d; the radius is r = p^{-s}.
    #[arg(long = "r")]
    pub radius: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a distribution: a Dirac delta, a monomial b^α, log(1+b_i) or a constant.
    Expand {
        #[command(flatten)]
        common: Common,
        /// Chart coordinates of g (comma separated, may be negative).
        #[arg(long, conflicts_with_all = ["mono", "lie", "constant"])]
        elem: Option<String>,
        #[arg(long, conflicts_with_all = ["lie", "constant"])]
        mono: Option<String>,
        /// 1-based axis i for log(1+b_i).
        #[arg(long, conflicts_with = "constant")]
        lie: Option<usize>,
        #[arg(long = "const")]
        constant: Option<i128>,
    },
    /// Multiply two distribution files.
    Mul {
        #[command(flatten)]
        common: Common,
        left: PathBuf,
        right: PathBuf,
    },
    /// Interval for the r-norm.
    Norm {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Principal symbol in the graded ring at radius r.
    Symbol {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Pair a distribution with a builtin function or a Mahler table file.
    Pair {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        /// const:c, coord:i, mono:a,b, exp1p:i, ind:a1,..:n
        #[arg(long = "fn", conflicts_with = "table")]
        function: Option<String>,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Mahler table cutoff |α| <= A (default floor(T)).
        #[arg(short = 'A')]
        a_cap: Option<u32>,
    },
    /// Mahler coefficients of a builtin function, optionally with an Amice report.
    Mahler {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn")]
        function: String,
        #[arg(short = 'A', default_value_t = 12)]
        a_cap: u32,
        /// Comma-separated exponents sigma (rho = p^sigma) for the decay report.
        #[arg(long)]
        amice: Option<String>,
    },
    /// Image in the finite group algebra at level n.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// Coset representative a: compare with the Mahler indicator pairing instead.
        #[arg(long)]
        crosscheck: Option<String>,
        #[arg(short = 'A')]
        a_cap: Option<u32>,
    },
    /// Grade of the cyclic graded module given by generators (or the log symbols of --group).
    Grade {
        #[command(flatten)]
        common: Common,
        /// File with a `graded` header line and one generator per line.
        #[arg(long = "in", conflicts_with = "log")]
        input: Option<PathBuf>,
        /// Use the symbols of log(1+b_i), i = 1..d, for --group at --r.
        #[arg(long)]
        log: bool,
    },
    /// Rewrite a distribution in another ordered basis.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        /// New basis elements in canonical coordinates: `x,y;u,v;…`.
        #[arg(long)]
        basis: String,
    },
    /// Conjugate by a group element or by sigma.
    Conj {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "sigma", required_unless_present = "sigma")]
        by: Option<String>,
        #[arg(long)]
        sigma: bool,
    },
    /// q_r of λ + μ·δ_σ in the semidirect model.
    Qnorm {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        twisted: Option<PathBuf>,
    },
    /// Threshold radius r(a) for an integral element.
    Rthresh {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a verification suite (or `all`).
    Verify {
        #[command(flatten)]
        common: Common,
        suite: String,
        /// Override the suite's sample count.
        #[arg(long)]
        samples: Option<usize>,
        /// Prime for the default groups when --group is absent.
        #[arg(long, default_value_t = 5)]
        prime: u64,
    },
}

pub struct Outcome {
    pub output: String,
    pub status: i32,
}

fn ok(output: String) -> Result<Outcome, CliError> {
    Ok(Outcome { output, status: exit::PASS })
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load(path: &PathBuf) -> Result<Distribution, CliError> {
    let text = read_file(path)?;
    format::read_distribution(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn parse_trunc(s: &str) -> Result<Rational, CliError> {
    let t = format::parse_rational(s).ok_or_else(|| CliError::Range(format!("bad truncation weight `{s}`")))?;
    if t < Rational::from(0) || t > Rational::from(MAX_TRUNC) {
        return Err(CliError::Range(format!("truncation weight {t} outside [0, {MAX_TRUNC}]")));
    }
    Ok(t)
}

fn parse_radius(s: Option<&str>) -> Result<RadiusParam, CliError> {
    let s = s.ok_or_else(|| CliError::Usage("--r <num>/<den> is required".into()))?;
    let v = format::parse_rational(s).ok_or_else(|| CliError::Radius(s.to_string()))?;
    RadiusParam::new(v).map_err(|_| CliError::Radius(s.to_string()))
}

fn parse_ints(s: &str) -> Result<Vec<i128>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<i128>().map_err(|_| CliError::Usage(format!("bad integer list `{s}`"))))
        .collect()
}

fn model(common: &Common) -> Result<Arc<GroupModel>, CliError> {
    let id = common.group.as_deref().ok_or_else(|| CliError::Usage("--group is required".into()))?;
    Ok(Arc::new(GroupModel::parse(id, common.cap)?))
}

fn function(s: &str) -> Result<FunctionSpec, CliError> {
    s.parse::<FunctionSpec>().map_err(|e| CliError::Usage(e.to_string()))
}

pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Expand { common, elem, mono, lie, constant } => {
            let m = model(&common)?;
            let t = parse_trunc(&common.trunc)?;
            let d = if let Some(e) = elem {
                Distribution::dirac(&GroupElement::from_ints(&m, &parse_ints(&e)?)?, t)?
            } else if let Some(a) = mono {
                let alpha = parse_ints(&a)?
                    .into_iter()
                    .map(|x| u32::try_from(x).map_err(|_| CliError::Usage(format!("bad multi-index `{a}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if alpha.len() != m.dim() {
                    return Err(CliError::Usage(format!("multi-index needs {} entries", m.dim())));
                }
                Distribution::monomial(&m, alpha, t)?
            } else if let Some(i) = lie {
                if i == 0 || i > m.dim() {
                    return Err(CliError::Usage(format!("axis {i} outside 1..={}", m.dim())));
                }
                Distribution::lie_generator(&m, i - 1, t)?
            } else {
                Distribution::constant(&m, m.int(constant.unwrap_or(1)), t)?
            };
            ok(format::write_distribution(&d))
        }
        Command::Mul { left, right, .. } => {
            let (a, b) = (load(&left)?, load(&right)?);
            ok(format::write_distribution(&a.mul(&b)?))
        }
        Command::Norm { common, input } => {
            let r = parse_radius(common.radius.as_deref())?;
            ok(format!("{}\n", load(&input)?.norm(&r)))
        }
        Command::Symbol { common, input } => {
            let r = parse_radius(common.radius.as_deref())?;
            let sym = load(&input)?.principal_symbol(&r)?;
            ok(format!("degree={}\n{}", sym.degree, format::write_graded(&sym.poly)))
        }
        Command::Pair { common, input, function: f, table, a_cap } => {
            let lam = load(&input)?;
            let tab: MahlerTable = match (f, table) {
                (Some(f), None) => {
                    let a = a_cap.unwrap_or_else(|| floor_i64(lam.trunc()).max(0) as u32);
                    let m = lam.model();
                    mahler::mahler_coeffs(&function(&f)?, m.prime(), m.cap(), m.dim(), a)?
                }
                (None, Some(path)) => {
                    let text = read_file(&path)?;
                    format::read_mahler(&text)
                        .map_err(|source| CliError::Parse { path: path.display().to_string(), source })?
                }
                _ => return Err(CliError::Usage("give exactly one of --fn or --table".into())),
            };
            let pr = mahler::pair(&lam, &tab)?;
            let _ = common;
            ok(format!("value={} error={} known_to={}\n", pr.value, pr.error, pr.known_to()))
        }
        Command::Mahler { common, function: f, a_cap, amice } => {
            let m = model(&common)?;
            let tab = mahler::mahler_coeffs(&function(&f)?, m.prime(), m.cap(), m.dim(), a_cap)?;
            let Some(grid) = amice else {
                return ok(format::write_mahler(&tab));
            };
            let sigmas = grid
                .split(',')
                .map(|s| format::parse_rational(s).ok_or_else(|| CliError::Usage(format!("bad sigma `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut out = String::new();
            for row in mahler::amice_report(&tab, &sigmas) {
                let levels: Vec<String> =
                    row.levels.iter().map(|l| format!("{}{}", l.value, if l.exact { "" } else { "?" })).collect();
                out.push_str(&format!("sigma={} verdict={} levels={}\n", row.sigma, row.verdict, levels.join(",")));
            }
            ok(out)
        }
        Command::Project { input, level, crosscheck, a_cap, .. } => {
            let lam = load(&input)?;
            match crosscheck {
                None => ok(format!("{}\n", mahler::finite_level_project(&lam, level)?)),
                Some(a) => {
                    let a_cap = a_cap.unwrap_or(3 * lam.model().prime() as u32);
                    let c = mahler::indicator_crosscheck(&lam, &parse_ints(&a)?, level, a_cap)?;
                    let pairing = c.pairing.map_or("none".to_string(), |p| format!("{} (error {})", p.value, p.error));
                    ok(format!("verdict={} projected={} pairing={pairing}\n", c.verdict, c.projected))
                }
            }
        }
        Command::Grade { common, input, log } => {
            let ideal = if log {
                let m = model(&common)?;
                let r = parse_radius(common.radius.as_deref())?;
                let t = parse_trunc(&common.trunc)?;
                let amb = Ambient::new(m.prime(), m.omega_values().to_vec(), r.s());
                let mut gens = Vec::new();
                for i in 0..m.dim() {
                    let sym = Distribution::lie_generator(&m, i, t)?.principal_symbol(&r)?;
                    let low = sym.poly.min_eps_exponent().unwrap_or(0).min(0);
                    gens.push(sym.poly.shift_eps(-low));
                }
                GradedIdeal::new(&amb, gens)?
            } else {
                let path = input.ok_or_else(|| CliError::Usage("give --in or --log".into()))?;
                read_ideal(&path)?
            };
            let gb: Vec<String> = ideal.groebner().generators().iter().map(GradedPoly::to_string).collect();
            ok(format!("grade={}\nkrull_dim={}\ngroebner={}\n", ideal.grade_cyclic(), ideal.krull_dim(), gb.join("; ")))
        }
        Command::Basis { input, basis, .. } => {
            let lam = load(&input)?;
            let m = lam.model().clone();
            let elems = basis
                .split(';')
                .map(|row| Ok(GroupElement::from_ints(&m, &parse_ints(row)?)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            let target = m.rebase(&elems, m.omega_values())?;
            ok(format::write_distribution(&lam.change_basis(&target)?))
        }
        Command::Conj { input, by, sigma, .. } => {
            let lam = load(&input)?;
            let c = if sigma {
                Conjugator::Sigma
            } else {
                let g = by.expect("clap enforces --by or --sigma");
                Conjugator::Inner(GroupElement::from_ints(lam.model(), &parse_ints(&g)?)?)
            };
            ok(format::write_distribution(&lam.conjugate(&c)?))
        }
        Command::Qnorm { common, input, twisted } => {
            let r = parse_radius(common.radius.as_deref())?;
            let a = load(&input)?;
            let b = match twisted {
                Some(path) => load(&path)?,
                None => Distribution::zero(a.model(), a.trunc())?,
            };
            ok(format!("{}\n", SemidirectElement::new(a, b)?.q_norm(&r)))
        }
        Command::Rthresh { input, .. } => {
            let r = load(&input)?.r_threshold()?;
            ok(format!("s={} r=p^-{}\n", r.s(), r.s()))
        }
        Command::Verify { common, suite, samples, prime } => {
            let p = match &common.group {
                Some(g) => GroupModel::parse(g, common.cap)?.prime(),
                None => prime,
            };
            crate::padic::check_context(p, common.cap)?;
            let cfg = SuiteConfig {
                p,
                cap: common.cap,
                trunc: parse_trunc(&common.trunc)?,
                seed: common.seed,
                samples,
                group: common.group.clone(),
            };
            let fmt = match common.format {
                OutputFormat::Text => ReportFormat::Text,
                OutputFormat::Tsv => ReportFormat::Tsv,
            };
            let ids: Vec<&str> = if suite == "all" {
                verify::SUITES.iter().map(|(s, _)| *s).collect()
            } else {
                vec![suite.as_str()]
            };
            let mut output = String::new();
            let mut status = exit::PASS;
            for id in ids {
                let report = verify::run_suite(id, &cfg)?;
                output.push_str(&report.render(fmt));
                if !report.passed() {
                    status = exit::CHECK_FAILED;
                }
            }
            Ok(Outcome { output, status })
        }
    }
}

fn read_ideal(path: &PathBuf) -> Result<GradedIdeal, CliError> {
    let text = read_file(path)?;
    let perr = |source| CliError::Parse { path: path.display().to_string(), source };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(perr(ParseError { line: 1, column: 1, message: "empty input".into() }));
    };
    let mut gens = Vec::new();
    let mut ambient = None;
    for (i, line) in lines {
        // each generator is read as its own single-polynomial file
        let g = format::read_graded(&format!("{header}\n{line}\n"), true).map_err(|mut e| {
            if e.line == 2 {
                e.line = i + 1;
            }
            perr(e)
        })?;
        ambient = Some(g.ambient().clone());
        gens.push(g);
    }
    let ambient = match ambient {
        Some(a) => a,
        None => format::read_graded(&format!("{header}\n0\n"), true).map_err(perr)?.ambient().clone(),
    };
    Ok(GradedIdeal::new(&ambient, gens)?)
}

/// Parses `args`, runs the command and writes its output; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let _ = e.print();
            return code;
        }
    };
    let out = match &cli.command {
        Command::Expand { common, .. }
        | Command::Mul { common, .. }
        | Command::Norm { common, .. }
        | Command::Symbol { common, .. }
        | Command::Pair { common, .. }
        | Command::Mahler { common, .. }
        | Command::Project { common, .. }
        | Command::Grade { common, .. }
        | Command::Basis { common, .. }
        | Command::Conj { common, .. }
        | Command::Qnorm { common, .. }
        | Command::Rthresh { common, .. }
        | Command::Verify { common, .. } => common.out.clone(),
    };
    match execute(cli) {
        Ok(o) => {
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, &o.output) {
                        eprintln!("error: {}: {e}", path.display());
                        return exit::USAGE;
                    }
                }
                None => print!("{}", o.output),
            }
            o.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

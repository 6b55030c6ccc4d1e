//! One handler per subcommand. Each returns the resolved configuration it ran
//! with and the artifact to emit.

use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};

use bergman_hs::checks::{
    default_validation_domains, run_acceptance, run_validation, AcceptanceConfig, ValidationConfig,
};
use bergman_hs::domain::{enumerate_up_to_order, DomainSpec, MultiIndex};
use bergman_hs::error::Error;
use bergman_hs::hankel::{
    dbar_solution_hs_diagnostic, disc_dirichlet_check, hankel_row_norm_squared, hs_norm_squared_partial,
    SymbolCoefficients,
};
use bergman_hs::norms::{log_ratio, NormCache};
use bergman_hs::oracles::{monte_carlo_c_squared, radial_quadrature_c_squared, OracleEstimate, OracleMethod};
use bergman_hs::series::{divergence_fit, series_trace, NGrid, SeriesKind};
use clap::{Args, ValueEnum};

use crate::artifact::{Artifact, Cell};

pub type Config = Vec<(&'static str, String)>;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag value or combination; names the flag.
    Usage { flag: &'static str, message: String },
    /// A computation refused or failed (capability, accuracy, sampling).
    Failure(Error),
}

impl CliError {
    pub fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }

    /// Attributes argument-shaped library errors to `flag`; other errors pass through.
    fn from_lib(flag: &'static str, e: Error) -> Self {
        match e {
            Error::Usage(m) | Error::Domain(m) | Error::Parse(m) => CliError::usage(flag, m),
            other => CliError::Failure(other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Failure(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "invalid {flag}: {message}"),
            CliError::Failure(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct OrderArgs {
    /// Truncation order N.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Grid of truncation orders: `start:stop:xR`, `start:stop:+step` or `N1,N2,...`.
    #[arg(long = "N-grid")]
    pub n_grid: Option<NGrid>,
}

impl OrderArgs {
    fn values(&self) -> Vec<u64> {
        match (&self.n_grid, self.n) {
            (Some(g), _) => g.values().to_vec(),
            (None, Some(n)) => vec![n],
            (None, None) => unreachable!("clap requires --N or --N-grid"),
        }
    }

    fn echo(&self, config: &mut Config) {
        let flag = if self.n_grid.is_some() { "N_grid" } else { "N" };
        config.push((flag, join(&self.values())));
    }
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn check_index(flag: &'static str, index: &MultiIndex, domain: &DomainSpec) -> CliResult<()> {
    if index.dim() != domain.dimension() {
        return Err(CliError::usage(
            flag,
            format!(
                "({index}) has {} entries but domain {domain} has dimension {}",
                index.dim(),
                domain.dimension()
            ),
        ));
    }
    Ok(())
}

fn check_nonzero(flag: &'static str, index: &MultiIndex) -> CliResult<()> {
    if index.is_zero() {
        return Err(CliError::usage(flag, "must be a nonzero multi-index"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("which").required(true).args(["gamma", "max_order"]))]
pub struct NormsArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    /// A single multi-index γ, e.g. `2,1`.
    #[arg(long)]
    pub gamma: Option<MultiIndex>,
    /// Tabulate every γ with |γ| ≤ this order.
    #[arg(long = "max-order")]
    pub max_order: Option<u32>,
    /// Also integrate each norm numerically.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleChoice>,
    /// Relative tolerance for quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn norms(a: &NormsArgs, cache_path: Option<PathBuf>) -> CliResult<(Config, Artifact)> {
    let gammas = match (&a.gamma, a.max_order) {
        (Some(g), _) => {
            check_index("--gamma", g, &a.domain)?;
            vec![g.clone()]
        }
        (None, Some(k)) => enumerate_up_to_order(a.domain.dimension(), k),
        (None, None) => unreachable!("clap requires --gamma or --max-order"),
    };
    let mut config: Config = vec![("domain", a.domain.key())];
    match (&a.gamma, a.max_order) {
        (Some(g), _) => config.push(("gamma", g.to_string())),
        (None, Some(k)) => config.push(("max_order", k.to_string())),
        _ => {}
    }
    config.push((
        "oracle",
        a.oracle
            .map_or("none", |o| match o {
                OracleChoice::Quadrature => "quadrature",
                OracleChoice::MonteCarlo => "monte-carlo",
            })
            .to_string(),
    ));
    match a.oracle {
        Some(OracleChoice::Quadrature) => config.push(("tol", a.tol.to_string())),
        Some(OracleChoice::MonteCarlo) => {
            config.push(("samples", a.samples.to_string()));
            config.push(("seed", a.seed.to_string()));
        }
        None => {}
    }

    let cache = match &cache_path {
        Some(p) => {
            NormCache::load(p).map_err(|e| CliError::usage("BERGMAN_HS_CACHE", format!("{}: {e}", p.display())))?
        }
        None => NormCache::new(),
    };
    let mut columns = vec!["domain", "gamma", "log_c_squared", "c_squared"];
    if a.oracle.is_some() {
        columns.extend([
            "oracle_value",
            "abs_error",
            "method",
            "sample_count",
            "seed",
            "within_error",
        ]);
    }
    let mut art = Artifact::new(columns);
    for g in &gammas {
        let log = cache
            .log_c_squared(&a.domain, g)
            .map_err(|e| CliError::from_lib("--gamma", e))?;
        let mut row: Vec<Cell> = vec![
            a.domain.key().into(),
            g.to_string().into(),
            log.log_c_squared.into(),
            log.c_squared().into(),
        ];
        if let Some(choice) = a.oracle {
            let est = run_oracle(choice, a, g)?;
            let c_squared = log.c_squared();
            let covered = match est.method {
                OracleMethod::RadialQuadrature => (est.value - c_squared).abs() <= est.abs_error.max(a.tol * c_squared),
                OracleMethod::MonteCarlo => est.covers(c_squared),
            };
            art.passed &= covered;
            row.extend([
                est.value.into(),
                est.abs_error.into(),
                format!("{:?}", est.method).into(),
                est.sample_count.into(),
                est.seed.into(),
                covered.into(),
            ]);
        }
        art.push(row);
    }
    if let Some(p) = &cache_path {
        save_cache(&cache, p)?;
    }
    Ok((config, art))
}

fn run_oracle(choice: OracleChoice, a: &NormsArgs, g: &MultiIndex) -> CliResult<OracleEstimate> {
    let result = match choice {
        OracleChoice::Quadrature => radial_quadrature_c_squared(&a.domain, g, a.tol),
        OracleChoice::MonteCarlo => monte_carlo_c_squared(&a.domain, g, a.samples, a.seed),
    };
    result.map_err(|e| match e {
        Error::Usage(m) if m.contains("tolerance") => CliError::usage("--tol", m),
        Error::Usage(m) if m.contains("samples") => CliError::usage("--samples", m),
        other => CliError::from_lib("--domain", other),
    })
}

fn save_cache(cache: &NormCache, path: &Path) -> CliResult<()> {
    cache
        .save(path)
        .map_err(|e| CliError::usage("BERGMAN_HS_CACHE", format!("{}: {e}", path.display())))
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    #[arg(long)]
    pub gamma: MultiIndex,
    #[arg(long)]
    pub alpha: MultiIndex,
}

pub fn ratio(a: &RatioArgs) -> CliResult<(Config, Artifact)> {
    check_index("--gamma", &a.gamma, &a.domain)?;
    check_index("--alpha", &a.alpha, &a.domain)?;
    let config = vec![
        ("domain", a.domain.key()),
        ("gamma", a.gamma.to_string()),
        ("alpha", a.alpha.to_string()),
    ];
    let lr = log_ratio(&a.domain, &a.gamma, &a.alpha)?;
    let row_norm = hankel_row_norm_squared(&a.domain, &a.gamma, &a.alpha)?;
    let mut art = Artifact::new(vec![
        "domain",
        "gamma",
        "alpha",
        "log_ratio",
        "ratio",
        "row_norm_squared",
    ]);
    art.push(vec![
        a.domain.key().into(),
        a.gamma.to_string().into(),
        a.alpha.to_string().into(),
        lr.into(),
        lr.exp().into(),
        row_norm.into(),
    ]);
    Ok((config, art))
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    /// Nonzero multi-index α, e.g. `1,1`.
    #[arg(long)]
    pub alpha: MultiIndex,
    #[command(flatten)]
    pub order: OrderArgs,
}

pub fn series(a: &SeriesArgs, kind: SeriesKind) -> CliResult<(Config, Artifact)> {
    check_index("--alpha", &a.alpha, &a.domain)?;
    check_nonzero("--alpha", &a.alpha)?;
    let mut config = vec![("domain", a.domain.key()), ("alpha", a.alpha.to_string())];
    a.order.echo(&mut config);
    let trace = series_trace(&a.domain, &a.alpha, &a.order.values(), kind)?;
    Ok((config, trace_artifact(trace.points(), &a.alpha, &a.domain, kind)))
}

fn trace_artifact(points: &[(u64, f64)], alpha: &MultiIndex, domain: &DomainSpec, kind: SeriesKind) -> Artifact {
    let mut art = Artifact::new(vec!["N", "value", "alpha", "domain", "kind"]);
    for &(n, v) in points {
        art.push(vec![
            n.into(),
            v.into(),
            alpha.to_string().into(),
            domain.key().into(),
            kind.to_string().into(),
        ]);
    }
    art
}

fn read_symbol(path: &Path) -> CliResult<SymbolCoefficients> {
    let file = File::open(path).map_err(|e| CliError::usage("--symbol", format!("{}: {e}", path.display())))?;
    SymbolCoefficients::read_from(file).map_err(|e| CliError::from_lib("--symbol", e))
}

#[derive(Debug, Args)]
pub struct HsNormArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    /// Tab-separated coefficients: `alpha<TAB>re[<TAB>im]`, `#` comments.
    #[arg(long)]
    pub symbol: PathBuf,
    #[command(flatten)]
    pub order: OrderArgs,
}

pub fn hs_norm(a: &HsNormArgs) -> CliResult<(Config, Artifact)> {
    let f = read_symbol(&a.symbol)?;
    if f.dimension() != a.domain.dimension() {
        return Err(CliError::usage(
            "--symbol",
            format!(
                "symbol has dimension {} but domain {} has dimension {}",
                f.dimension(),
                a.domain,
                a.domain.dimension()
            ),
        ));
    }
    let mut config = vec![("domain", a.domain.key()), ("symbol", a.symbol.display().to_string())];
    a.order.echo(&mut config);
    let mut art = Artifact::new(vec!["N", "hs_norm_squared", "terms"]);
    for n in a.order.values() {
        let v = hs_norm_squared_partial(&a.domain, &f, n)?;
        art.push(vec![n.into(), v.into(), f.len().into()]);
    }
    Ok((config, art))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindChoice {
    Partial,
    Diagonal,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    #[arg(long)]
    pub alpha: MultiIndex,
    /// At least 8 orders spanning a factor of 4, ideally geometric.
    #[arg(long = "N-grid")]
    pub n_grid: NGrid,
    /// Which truncation to fit.
    #[arg(long, value_enum, default_value_t = KindChoice::Diagonal)]
    pub kind: KindChoice,
}

pub fn divergence(a: &DivergenceArgs) -> CliResult<(Config, Artifact)> {
    check_index("--alpha", &a.alpha, &a.domain)?;
    check_nonzero("--alpha", &a.alpha)?;
    let kind = match a.kind {
        KindChoice::Partial => SeriesKind::PartialSum,
        KindChoice::Diagonal => SeriesKind::DiagonalSum,
    };
    let config = vec![
        ("domain", a.domain.key()),
        ("alpha", a.alpha.to_string()),
        ("N_grid", join(a.n_grid.values())),
        ("kind", kind.to_string()),
    ];
    let trace = series_trace(&a.domain, &a.alpha, a.n_grid.values(), kind)?;
    let fit = divergence_fit(&trace).map_err(|e| CliError::from_lib("--N-grid", e))?;
    let mut art = trace_artifact(trace.points(), &a.alpha, &a.domain, kind);
    art.summary = vec![
        ("verdict", format!("{:?}", fit.verdict).into()),
        ("slope", fit.slope.into()),
        ("intercept", fit.intercept.into()),
        ("r_squared", fit.r_squared.into()),
        (
            "fit_window",
            format!("{}..{}", fit.fit_window.0, fit.fit_window.1).into(),
        ),
        ("tail_increment", fit.tail_increment.into()),
    ];
    Ok((config, art))
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    /// Only the disc is supported.
    #[arg(long, default_value = "disc")]
    pub domain: DomainSpec,
    #[arg(long)]
    pub symbol: PathBuf,
}

pub fn disc_dirichlet(a: &DirichletArgs) -> CliResult<(Config, Artifact)> {
    if a.domain.dimension() != 1 {
        return Err(CliError::usage(
            "--domain",
            format!("the Dirichlet check needs the disc, got {}", a.domain),
        ));
    }
    let f = read_symbol(&a.symbol)?;
    let config = vec![("domain", a.domain.key()), ("symbol", a.symbol.display().to_string())];
    let (hs, dirichlet) = disc_dirichlet_check(&f).map_err(|e| CliError::from_lib("--symbol", e))?;
    let mut art = Artifact::new(vec!["hs_norm_squared", "dirichlet_integral", "abs_difference"]);
    art.push(vec![hs.into(), dirichlet.into(), (hs - dirichlet).abs().into()]);
    Ok((config, art))
}

#[derive(Debug, Args)]
pub struct DbarArgs {
    #[arg(long)]
    pub domain: DomainSpec,
    #[command(flatten)]
    pub order: OrderArgs,
}

pub fn dbar(a: &DbarArgs) -> CliResult<(Config, Artifact)> {
    let mut config = vec![("domain", a.domain.key())];
    a.order.echo(&mut config);
    let mut art = Artifact::new(vec!["N", "direction", "s_alpha"]);
    for n in a.order.values() {
        for (j, v) in dbar_solution_hs_diagnostic(&a.domain, n)? {
            art.push(vec![n.into(), j.into(), v.into()]);
        }
    }
    Ok((config, art))
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Domain to check [default: a built-in set of disc, polydisc and ellipsoids].
    #[arg(long)]
    pub domain: Option<DomainSpec>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest |γ| checked.
    #[arg(long = "max-order", default_value_t = 3)]
    pub max_order: u32,
}

pub fn validate(a: &ValidateArgs) -> CliResult<(Config, Artifact)> {
    let domains = match &a.domain {
        Some(d) => vec![d.clone()],
        None => default_validation_domains(),
    };
    let cfg = ValidationConfig {
        tol: a.tol,
        samples: a.samples,
        seed: a.seed,
        max_order: a.max_order,
    };
    let config = vec![
        (
            "domain",
            domains.iter().map(DomainSpec::key).collect::<Vec<_>>().join(" "),
        ),
        ("tol", a.tol.to_string()),
        ("samples", a.samples.to_string()),
        ("seed", a.seed.to_string()),
        ("max_order", a.max_order.to_string()),
    ];
    let records = run_validation(&domains, &cfg).map_err(|e| match e {
        Error::Usage(m) if m.contains("tolerance") => CliError::usage("--tol", m),
        Error::Usage(m) if m.contains("samples") => CliError::usage("--samples", m),
        other => CliError::Failure(other),
    })?;
    let mut art = Artifact::new(vec![
        "check",
        "domain",
        "gamma",
        "alpha",
        "closed_form",
        "oracle",
        "tolerance",
        "passed",
    ]);
    for r in &records {
        art.passed &= r.passed;
        art.push(vec![
            r.check.into(),
            r.domain.clone().into(),
            r.gamma.clone().into(),
            r.alpha.clone().unwrap_or_default().into(),
            r.closed_form.into(),
            r.oracle.into(),
            r.tolerance.into(),
            r.passed.into(),
        ]);
    }
    let failures = records.iter().filter(|r| !r.passed).count();
    art.summary = vec![
        ("checks", records.len().into()),
        ("failures", failures.into()),
        ("all_passed", (failures == 0).into()),
    ];
    Ok((config, art))
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Monte Carlo samples for the oracle criteria.
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn report(a: &ReportArgs, timings: bool) -> CliResult<(Config, Artifact)> {
    let defaults = AcceptanceConfig::default();
    let cfg = AcceptanceConfig {
        mc_samples: a.samples,
        seed: a.seed,
        ..defaults
    };
    if a.samples < 10_000 {
        return Err(CliError::usage("--samples", "Monte Carlo needs at least 10000 samples"));
    }
    let config = vec![
        ("samples", cfg.mc_samples.to_string()),
        ("coverage_samples", cfg.coverage_samples.to_string()),
        ("coverage_seeds", cfg.coverage_seeds.to_string()),
        ("seed", cfg.seed.to_string()),
    ];
    let outcomes = run_acceptance(&cfg);
    let mut columns = vec!["criterion", "name", "passed", "detail"];
    if timings {
        columns.extend(["elapsed_secs", "budget_secs"]);
    }
    let mut art = Artifact::new(columns);
    for o in &outcomes {
        art.passed &= o.passed;
        let mut row: Vec<Cell> = vec![
            u64::from(o.id).into(),
            o.name.into(),
            o.passed.into(),
            o.detail.clone().into(),
        ];
        if timings {
            row.extend([o.elapsed_secs.into(), o.budget_secs.into()]);
        }
        art.push(row);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    art.summary = vec![("passed", passed.into()), ("total", outcomes.len().into())];
    Ok((config, art))
}

//! The `qic` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or parse error, 3 failed
//! invariant. Option values resolve as command-line flag, then `--config`
//! file (`key=value` lines, keys spelled like the long flags), then default.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use crate::algebra::SuBasis;
use crate::error::QicError;
use crate::gaussian::{self, GaussianState};
use crate::lattice::{self, FigureData, LatticeConfig};
use crate::linalg::{CMatrix, C64};
use crate::plot::{LinePlot, Series};
use crate::qudit::{self, VirtualQudit, WriteOperation};
use crate::random::{rng_from_seed, PRNG_NAME};
use crate::record::{self, fmt_f64, join_reals, StateRecord};
use crate::suite::{self, CheckOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qic", version, about = "Quantum information capsules and partner modes")]
pub struct Cli {
    /// Flat key=value file supplying defaults for any long option.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the conjugate QIC of a site write on the periodic lattice vacuum.
    LatticeEvolve(LatticeArgs),
    /// Random-ensemble checks of QIC construction, SWAP retrieval and partners.
    QuditSuite(SuiteArgs),
    /// Conjugate QIC operators for shift writes on a Gaussian state file.
    GaussianConj(GaussianArgs),
    /// Run every invariant check at fixed seeds.
    Verify(VerifyArgs),
    /// Walk through the two-qubit Bell example.
    QuditDemo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub write_site: Option<usize>,
    /// Comma-separated times.
    #[arg(long)]
    pub times: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,svg.
    #[arg(long)]
    pub formats: Option<String>,
    /// Recorded in the report; the lattice run itself draws no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Weighting vector as comma-separated reals; repeat for several writes.
    #[arg(long = "v", value_name = "CSV_LIST")]
    pub v: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Additional state file whose covariance is checked against the
    /// GaussianState invariants.
    #[arg(long, value_name = "FILE")]
    pub extra_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Invariant(m) | CliError::Io(m) => m,
        }
    }
}

impl From<QicError> for CliError {
    fn from(e: QicError) -> Self {
        match e {
            QicError::Io { .. } => CliError::Io(e.to_string()),
            QicError::Parse { .. }
            | QicError::InvalidDimension(_)
            | QicError::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Key/value pairs from a `--config` file.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> crate::Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| QicError::parse(i + 1, "expected key=value"))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(QicError::parse(i + 1, "empty key"));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QicError::io(path, e))?;
        Self::parse(&text)
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: invalid value for {key}: {raw:?}"))),
        }
    }

    /// Flag, then config entry, then default.
    fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid {what} entry {:?}", t.trim())))
        })
        .collect()
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Labels a time for file names: `25` → `t25`, `2.5` → `t2.5`, `-1` → `tm1`.
fn time_label(t: f64) -> String {
    format!("t{}", t).replace('-', "m")
}

/// Runs the CLI; `stdout` receives the human-readable summary.
pub fn run_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

fn dispatch(cli: &Cli, out: &mut dyn std::io::Write) -> CliResult<()> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path).map_err(|e| match e {
            QicError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(format!("{}: {other}", path.display())),
        })?,
        None => ConfigFile::default(),
    };
    let summary = match &cli.command {
        Command::LatticeEvolve(a) => cmd_lattice_evolve(a, &config)?,
        Command::QuditSuite(a) => cmd_qudit_suite(a, &config)?,
        Command::GaussianConj(a) => cmd_gaussian_conj(a, &config)?,
        Command::Verify(a) => cmd_verify(a, &config)?,
        Command::QuditDemo(a) => cmd_qudit_demo(a, &config)?,
    };
    out.write_all(summary.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

/// Resolved lattice-evolve parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub sites: usize,
    pub eta: f64,
    pub write_site: usize,
    pub times: Vec<f64>,
    pub out: PathBuf,
    pub csv: bool,
    pub svg: bool,
    pub seed: u64,
}

pub fn resolve_lattice(a: &LatticeArgs, config: &ConfigFile) -> CliResult<LatticeSpec> {
    let sites = config.resolve(a.sites, "sites", 30)?;
    let eta = config.resolve(a.eta, "eta", 0.4)?;
    let write_site = config.resolve(a.write_site, "write-site", 15)?;
    let times_raw = config.resolve(a.times.clone(), "times", "0,25,50".to_string())?;
    let times: Vec<f64> = parse_list(&times_raw, "time")?;
    if times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Usage("times must be finite".into()));
    }
    let formats_raw = config.resolve(a.formats.clone(), "formats", "csv,svg".to_string())?;
    let mut csv = false;
    let mut svg = false;
    for f in formats_raw.split(',').map(str::trim) {
        match f {
            "csv" => csv = true,
            "svg" => svg = true,
            other => return Err(CliError::Usage(format!("unknown format {other:?}"))),
        }
    }
    if sites < 1 || sites > 512 {
        return Err(CliError::Usage(format!("--sites must be in 1..=512, got {sites}")));
    }
    if write_site < 1 || write_site > sites {
        return Err(CliError::Usage(format!(
            "--write-site must be in 1..={sites}, got {write_site}"
        )));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CliError::Usage(format!("--eta must be positive, got {eta}")));
    }
    Ok(LatticeSpec {
        sites,
        eta,
        write_site,
        times,
        out: config.resolve(a.out.clone(), "out", PathBuf::from("qic_out"))?,
        csv,
        svg,
        seed: config.resolve(a.seed, "seed", 0)?,
    })
}

pub fn profile_csv(data: &FigureData, slice: usize) -> String {
    let mut s = String::from("site,v_q,v_p,u_q,u_p\n");
    for r in &data.slices[slice].rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.site,
            fmt_f64(r.v_q),
            fmt_f64(r.v_p),
            fmt_f64(r.u_q),
            fmt_f64(r.u_p)
        );
    }
    s
}

fn profile_svg(data: &FigureData, slice: usize) -> String {
    let ts = &data.slices[slice];
    let mut plot = LinePlot::new(
        format!(
            "QIC weighting functions at t = {} (N = {}, eta = {}, Q = q_{})",
            ts.t,
            data.config.n_sites(),
            data.config.eta(),
            data.write_site
        ),
        "site n",
        "weight",
    );
    let col = |f: fn(&lattice::ProfileRow) -> f64| {
        ts.rows.iter().map(|r| (r.site as f64, f(r))).collect::<Vec<_>>()
    };
    plot.add(Series::new("v_q", col(|r| r.v_q)));
    plot.add(Series::new("v_p", col(|r| r.v_p)));
    plot.add(Series::new("u_q", col(|r| r.u_q)));
    plot.add(Series::new("u_p", col(|r| r.u_p)));
    plot.to_svg()
}

fn lattice_report(spec: &LatticeSpec, data: &FigureData) -> (String, Vec<String>) {
    let mut s = String::new();
    let _ = writeln!(s, "# qic lattice-evolve invariants");
    let _ = writeln!(s, "# prng: {PRNG_NAME}; seed: {} (unused by this run)", spec.seed);
    let _ = writeln!(
        s,
        "# sites={} eta={} write_site={}",
        spec.sites,
        fmt_f64(spec.eta),
        spec.write_site
    );
    let _ = writeln!(s, "# mode matrix inverse residual={}", fmt_f64(data.inverse_residual));
    let _ = writeln!(s, "# vacuum purity residual={}", fmt_f64(data.vacuum_purity_residual));
    s.push_str("t,pairing,det_m,imaginary_residue,u_support_1e-3,max_off_site_u\n");
    let mut violations = Vec::new();
    if data.vacuum_purity_residual >= 1e-8 {
        violations.push(format!(
            "vacuum purity residual {:e} >= 1e-8",
            data.vacuum_purity_residual
        ));
    }
    for ts in &data.slices {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(ts.t),
            fmt_f64(ts.pairing),
            fmt_f64(ts.det_m),
            fmt_f64(ts.imaginary_residue),
            ts.u_support(1e-3),
            fmt_f64(ts.max_off_site_u(spec.write_site))
        );
        if (ts.pairing - 1.0).abs() > 1e-9 {
            violations.push(format!("symplectic pairing at t={}: {}", ts.t, ts.pairing));
        }
        if (ts.det_m - 0.25).abs() > 1e-8 {
            violations.push(format!("det m at t={}: {}", ts.t, ts.det_m));
        }
        if ts.imaginary_residue >= 1e-9 {
            violations.push(format!("imaginary residue at t={}: {:e}", ts.t, ts.imaginary_residue));
        }
    }
    (s, violations)
}

fn cmd_lattice_evolve(a: &LatticeArgs, config: &ConfigFile) -> CliResult<String> {
    let spec = resolve_lattice(a, config)?;
    let lc = LatticeConfig::new(spec.sites, spec.eta)?;
    let data = lattice::figure_experiment(&lc, spec.write_site, &spec.times)?;
    create_dir(&spec.out)?;
    let mut written = Vec::new();
    for (i, ts) in data.slices.iter().enumerate() {
        let stem = format!("lattice_{}", time_label(ts.t));
        if spec.csv {
            let p = spec.out.join(format!("{stem}.csv"));
            write_file(&p, &profile_csv(&data, i))?;
            written.push(p);
        }
        if spec.svg {
            let p = spec.out.join(format!("{stem}.svg"));
            write_file(&p, &profile_svg(&data, i))?;
            written.push(p);
        }
    }
    let (report, violations) = lattice_report(&spec, &data);
    let p = spec.out.join("lattice_report.csv");
    write_file(&p, &report)?;
    written.push(p);
    if !violations.is_empty() {
        return Err(CliError::Invariant(format!(
            "lattice_field invariant violated: {}",
            violations.join("; ")
        )));
    }
    let mut s = String::new();
    for p in written {
        let _ = writeln!(s, "wrote {}", p.display());
    }
    Ok(s)
}

fn outcome_failures(outcomes: &[CheckOutcome]) -> Vec<String> {
    outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| format!("{}: {} (worst {:e}, tolerance {:e})", o.module, o.invariant, o.worst, o.tolerance))
        .collect()
}

fn cmd_qudit_suite(a: &SuiteArgs, config: &ConfigFile) -> CliResult<String> {
    let d = config.resolve(a.d, "d", 2)?;
    let n = config.resolve(a.n, "n", 2)?;
    let trials = config.resolve(a.trials, "trials", 50)?;
    let seed = config.resolve(a.seed, "seed", 7)?;
    let out = config.resolve(a.out.clone(), "out", PathBuf::from("qic_out"))?;
    if !(2..=4).contains(&d) {
        return Err(CliError::Usage(format!("--d must be 2, 3 or 4, got {d}")));
    }
    if !(2..=3).contains(&n) {
        return Err(CliError::Usage(format!("--n must be 2 or 3, got {n}")));
    }
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let outcomes = suite::qudit_checks(&mut rng, d, n, trials)?;
    let report = suite::format_report(
        &format!("qic qudit-suite d={d} N={n} trials={trials}"),
        seed,
        &outcomes,
    );
    create_dir(&out)?;
    let path = out.join("qudit_suite.csv");
    write_file(&path, &report)?;
    let failures = outcome_failures(&outcomes);
    if !failures.is_empty() {
        return Err(CliError::Invariant(failures.join("; ")));
    }
    Ok(format!(
        "{} checks passed over {trials} trials\nwrote {}\n",
        outcomes.len(),
        path.display()
    ))
}

fn cmd_gaussian_conj(a: &GaussianArgs, config: &ConfigFile) -> CliResult<String> {
    let state_path: PathBuf = match &a.state {
        Some(p) => p.clone(),
        None => config
            .get::<PathBuf>("state")?
            .ok_or_else(|| CliError::Usage("--state FILE is required".into()))?,
    };
    let out = config.resolve(a.out.clone(), "out", PathBuf::from("qic_out"))?;
    let mut v_lists = a.v.clone();
    if v_lists.is_empty() {
        if let Some(v) = config.get::<String>("v")? {
            v_lists = v.split(';').map(str::to_string).collect();
        }
    }
    if v_lists.is_empty() {
        return Err(CliError::Usage("at least one --v list is required".into()));
    }
    let text = std::fs::read_to_string(&state_path)
        .map_err(|e| CliError::Io(format!("{}: {e}", state_path.display())))?;
    let state = StateRecord::parse(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", state_path.display())))?
        .into_state()
        .map_err(|e| CliError::Invariant(format!("{}: {e}", state_path.display())))?;
    let residual = state.purity_residual();
    if residual >= gaussian::PURITY_TOL {
        return Err(CliError::Invariant(format!(
            "input state is not pure: purity residual {residual:e} >= {:e}",
            gaussian::PURITY_TOL
        )));
    }
    let mut vectors = Vec::new();
    for raw in &v_lists {
        let values: Vec<f64> = parse_list(raw, "--v")?;
        if values.len() != 2 * state.n_modes() {
            return Err(CliError::Usage(format!(
                "--v {raw:?} has {} entries, state has {} canonical variables",
                values.len(),
                2 * state.n_modes()
            )));
        }
        vectors.push(DVector::from_vec(values));
    }

    create_dir(&out)?;
    let mut summary = String::new();
    let mut table = String::from("index,det_m,m_qq,m_qp,m_pp,entropy,fisher\n");
    for (i, v) in vectors.iter().enumerate() {
        let pair = gaussian::conjugate_qic_vector(v, &state)?;
        let m = gaussian::mode_covariance(&pair, &state);
        let entropy = gaussian::mode_entropy(&m)?;
        let fisher = 4.0 * state.covariance_form(v, v);
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{}",
            i + 1,
            fmt_f64(m.det()),
            fmt_f64(m.matrix[(0, 0)]),
            fmt_f64(m.matrix[(0, 1)]),
            fmt_f64(m.matrix[(1, 1)]),
            fmt_f64(entropy),
            fmt_f64(fisher)
        );
        let p = out.join(format!("mode_pair_{}.txt", i + 1));
        write_file(&p, &record::format_mode_pair(&pair))?;
        let _ = writeln!(summary, "v{}: u = {}", i + 1, join_reals(pair.u.iter()));
        let _ = writeln!(summary, "v{}: det m = {}, entropy = {}", i + 1, fmt_f64(m.det()), fmt_f64(entropy));
        let p = out.join(format!("swap_{}.txt", i + 1));
        write_file(&p, &record::format_swap_coupling(&gaussian::cv_swap_generator(&pair)))?;
    }
    write_file(&out.join("gaussian_conj.csv"), &table)?;

    if vectors.len() > 1 {
        let report = gaussian::multiparam_conditions(&vectors, &state)?;
        let mut s = String::from("i,j,v_i^T Omega v_j,v_i^T M v_j,v_i^T Omega u_j\n");
        let k = vectors.len();
        for i in 0..k {
            for j in 0..k {
                let cross = report
                    .cross_pairing
                    .as_ref()
                    .map(|c| fmt_f64(c[(i, j)]))
                    .unwrap_or_else(|| "nan".into());
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    i + 1,
                    j + 1,
                    fmt_f64(report.symplectic[(i, j)]),
                    fmt_f64(report.covariance[(i, j)]),
                    cross
                );
            }
        }
        let mut status = String::new();
        let _ = writeln!(status, "# commuting: {}", report.commuting);
        let _ = writeln!(status, "# independent: {}", report.independent);
        if let Some((i, j)) = report.first_non_commuting() {
            let _ = writeln!(status, "# non-commuting pair: {},{}", i + 1, j + 1);
            let _ = writeln!(summary, "writes {} and {} do not commute", i + 1, j + 1);
        }
        if let Some((i, j)) = report.first_dependent() {
            let _ = writeln!(status, "# dependent pair: {},{}", i + 1, j + 1);
            let _ = writeln!(summary, "writes {} and {} are not independent", i + 1, j + 1);
        }
        if let Ok(f) = gaussian::shift_fisher_matrix(&vectors, &state) {
            let diag: Vec<f64> = (0..k).map(|i| f[(i, i)]).collect();
            let _ = writeln!(status, "# fisher diagonal: {}", join_reals(diag.iter()));
        }
        write_file(&out.join("multiparam.csv"), &(status + &s))?;
        let _ = writeln!(
            summary,
            "multi-parameter conditions: commuting={}, independent={}",
            report.commuting, report.independent
        );
    }
    let _ = writeln!(summary, "wrote {}", out.display());
    Ok(summary)
}

fn cmd_verify(a: &VerifyArgs, config: &ConfigFile) -> CliResult<String> {
    let seed = config.resolve(a.seed, "seed", 20240601)?;
    let mut outcomes = suite::verify_all(seed)?;
    let extra = match &a.extra_state {
        Some(p) => Some(p.clone()),
        None => config.get::<PathBuf>("extra-state")?,
    };
    if let Some(path) = extra {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let rec = StateRecord::parse(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        outcomes.extend(suite::state_record_checks(&rec));
    }
    let report = suite::format_report("qic verify", seed, &outcomes);
    let out = match &a.out {
        Some(p) => Some(p.clone()),
        None => config.get::<PathBuf>("out")?,
    };
    if let Some(dir) = &out {
        create_dir(dir)?;
        write_file(&dir.join("verify.csv"), &report)?;
    }
    let mut s = String::new();
    for (module, checks, failed) in suite::module_counts(&outcomes) {
        let _ = writeln!(s, "{module}: {checks} checks, {failed} failed");
    }
    let failures = outcome_failures(&outcomes);
    if !failures.is_empty() {
        return Err(CliError::Invariant(format!(
            "{}verification failed: {}",
            s,
            failures.join("; ")
        )));
    }
    s.push_str("all invariants hold\n");
    Ok(s)
}

fn cmd_qudit_demo(a: &DemoArgs, config: &ConfigFile) -> CliResult<String> {
    let state = qudit::ghz_state(2, 2)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let sz = CMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
    let write = WriteOperation::local(sz, 2)?;
    let qic = qudit::construct_qic(&write, &state)?;
    let mut s = String::new();
    let _ = writeln!(s, "Bell state, t = sigma_z, U = I");
    let _ = writeln!(s, "Fisher information: {}", fmt_f64(qudit::fisher_information(&write, &state)?));
    let fmt_c = |z: &C64| format!("{}{:+}i", fmt_f64(z.re), z.im);
    let _ = writeln!(
        s,
        "capsule state: [{}]",
        qic.capsule.iter().map(fmt_c).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(s, "capsule purity: {}", fmt_f64(qic.purity()));
    let before = qudit::retrieve_by_swap(&qic.qudit, &write.apply(&state, 0.0)?)?;
    let after = qudit::retrieve_by_swap(&qic.qudit, &write.apply(&state, 1.0)?)?;
    let _ = writeln!(
        s,
        "residual trace distance (theta 0 vs 1): {}",
        fmt_f64(crate::linalg::trace_distance(&before.residual, &after.residual))
    );
    let pair = qudit::construct_partner(
        &VirtualQudit::first_real_qudit(SuBasis::new(2)?, 2),
        &state,
    )?;
    let _ = writeln!(s, "partner pair purity: {}", fmt_f64(pair.purity()));
    if let Some(dir) = a.out.clone().or(config.get::<PathBuf>("out")?) {
        create_dir(&dir)?;
        write_file(&dir.join("qudit_demo.txt"), &s)?;
    }
    Ok(s)
}

/// Writes a state file for `state`; used by tests and examples.
pub fn write_state_file(path: &Path, state: &GaussianState) -> CliResult<()> {
    write_file(path, &record::format_state(state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_precedence() {
        let cfg = ConfigFile::parse("sites = 12\neta=0.9\n# note\nwrite_site=3\n").unwrap();
        let args = LatticeArgs {
            sites: Some(20),
            eta: None,
            write_site: None,
            times: None,
            out: None,
            formats: None,
            seed: None,
        };
        let spec = resolve_lattice(&args, &cfg).unwrap();
        assert_eq!(spec.sites, 20);
        assert_eq!(spec.eta, 0.9);
        assert_eq!(spec.write_site, 3);
        assert_eq!(spec.times, vec![0.0, 25.0, 50.0]);
        assert!(spec.csv && spec.svg);
    }

    #[test]
    fn config_errors_carry_lines() {
        match ConfigFile::parse("a=1\nbroken\n") {
            Err(QicError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn time_labels() {
        assert_eq!(time_label(0.0), "t0");
        assert_eq!(time_label(25.0), "t25");
        assert_eq!(time_label(2.5), "t2.5");
        assert_eq!(time_label(-1.0), "tm1");
    }

    #[test]
    fn csv_values_round_trip() {
        let lc = LatticeConfig::new(8, 0.4).unwrap();
        let data = lattice::figure_experiment(&lc, 3, &[4.0]).unwrap();
        let csv = profile_csv(&data, 0);
        for (line, row) in csv.lines().skip(1).zip(&data.slices[0].rows) {
            let vals: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
            assert_eq!(vals, vec![row.v_q, row.v_p, row.u_q, row.u_p]);
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(["qic", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run_with(["qic", "qudit-suite", "--trials", "0"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(run_with(["qic", "--help"], &mut out, &mut err), EXIT_OK);
    }
}

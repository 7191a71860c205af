//! Batch command-line front end.
//!
//! Every subcommand reads the shared flags of [`RunConfig`], validates the
//! ones it needs, renders its whole output into memory and only then writes
//! it to `--output` (or stdout). Identical flags and seed produce identical
//! bytes, whatever `--threads` is.

use std::cmp::Ordering;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::energy::{self, EnergyReport};
use crate::error::{Error, Result};
use crate::io::{num, read_points_csv, write_points_csv, PointsHeader, Table};
use crate::kernels::{count_projection_kernels, enumerate_projection_kernels, Kernel, KernelSpec, ProjectionKernel};
use crate::sampling::{run_trials, sample_dpp, sample_uniform, PointConfiguration, RngStream};
use crate::specfun::gamma;
use crate::stats::{self, CapSpec, StatReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// `C_{s,2}` against `2^{−s} Γ(1 − s/2)` on an s-grid.
    Constants,
    /// Expected 2-energy of every kernel with a given trace.
    Optimality,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Draw one configuration and write it as a point set.
    Sample,
    /// Discrete energies of sampled (or `--input`) configurations.
    Energy,
    /// Expected energies from the closed forms and from quadrature.
    Expect,
    /// Cap-count and linear-statistic variances.
    Variance,
    /// Spherical cap discrepancy estimates.
    Discrepancy,
    /// Separation distance, close pairs and the Jacobi bound.
    Separation,
    /// Expected 2-energies of all kernels sharing a trace.
    CompareKernels,
    /// Data series for plots.
    FigData {
        #[arg(value_enum, default_value = "constants")]
        figure: Figure,
    },
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "sphere-dpp", version, about = "Determinantal point processes on spheres")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Sphere dimension(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub d: Vec<usize>,

    /// Maximal degree(s) of the harmonic ensemble, comma separated.
    #[arg(long = "L", global = true, value_delimiter = ',')]
    pub big_l: Vec<usize>,

    /// JSON kernel file: {"d": 4, "degrees": [0, 2]} or {"d": 2, "L": 8}.
    #[arg(long, global = true)]
    pub kernel: Option<PathBuf>,

    /// Riesz exponent(s); 0 selects the logarithmic energy.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Vec<f64>,

    #[arg(long, global = true, default_value_t = 1)]
    pub trials: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Defaults to csv for sample, compare-kernels and fig-data, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads; 0 or absent uses all cores.
    #[arg(long, global = true, env = "SPHERE_DPP_THREADS")]
    pub threads: Option<usize>,

    #[arg(long = "max-degree", global = true, default_value_t = 40)]
    pub max_degree: usize,

    /// Number of points (kernel trace) for compare-kernels.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Sweep every trace up to this value in compare-kernels.
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,

    /// Point-set file for the energy command.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Normalized cap area for the variance command.
    #[arg(long, global = true, default_value_t = 0.3)]
    pub measure: f64,

    /// Geodesic cap radius; overrides --measure.
    #[arg(long, global = true)]
    pub radius: Option<f64>,

    /// Random cap centers per configuration for discrepancy.
    #[arg(long, global = true, default_value_t = 64)]
    pub probes: usize,

    /// Scales α for the separation tail P(sep ≤ α n^{-3/4}).
    #[arg(long, global = true, value_delimiter = ',', default_values_t = [0.5, 1.0])]
    pub alpha: Vec<f64>,

    /// Quadrature nodes per axis for the cap variance.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,

    /// Also report the i.i.d. uniform baseline (discrepancy, separation).
    #[arg(long, global = true)]
    pub uniform: bool,
}

/// Process exit status for an error: 2 for bad parameters, 3 for numerical
/// failures, 4 for a stalled sampler.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_)
        | Error::Pole { .. }
        | Error::DivergentEnergy { .. }
        | Error::Incomparable(_)
        | Error::Parse(_)
        | Error::Io(_) => 2,
        Error::SamplerStall { .. } => 4,
        Error::Overflow(_)
        | Error::Numerical(_)
        | Error::SingularConfiguration { .. }
        | Error::Degeneracy { .. }
        | Error::EnumerationLimit { .. }
        | Error::Accuracy(_) => 3,
    }
}

/// Parses `args` (including the program name), runs, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sphere-dpp: {e}");
            exit_code(&e)
        }
    }
}

/// Executes `cfg`, writing to `--output` or stdout.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let bytes = render(cfg)?;
    match &cfg.output {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

/// Executes `cfg` and returns the output bytes.
pub fn render(cfg: &RunConfig) -> Result<Vec<u8>> {
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cfg.command {
        Command::Sample => cmd_sample(cfg),
        Command::Energy => cmd_energy(cfg),
        Command::Expect => cmd_expect(cfg),
        Command::Variance => cmd_variance(cfg),
        Command::Discrepancy => cmd_discrepancy(cfg),
        Command::Separation => cmd_separation(cfg),
        Command::CompareKernels => cmd_compare(cfg, cfg.d.first().copied(), cfg.max_degree),
        Command::FigData { figure: Figure::Constants } => cmd_constants(cfg),
        Command::FigData { figure: Figure::Optimality } => {
            cmd_compare(cfg, Some(cfg.d.first().copied().unwrap_or(4)), cfg.max_degree.min(12))
        }
    })
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn format_or(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

/// Kernels named on the command line: the `--kernel` file, or every
/// harmonic ensemble in `--d × --L`.
fn kernels(cfg: &RunConfig) -> Result<Vec<Kernel>> {
    if let Some(path) = &cfg.kernel {
        if !cfg.d.is_empty() || !cfg.big_l.is_empty() {
            return Err(usage("--kernel cannot be combined with --d/--L"));
        }
        let text = fs::read_to_string(path)?;
        let spec: KernelSpec = serde_json::from_str(&text)?;
        return Ok(vec![spec.build()?]);
    }
    if cfg.d.is_empty() || cfg.big_l.is_empty() {
        return Err(usage("specify --d and --L, or --kernel"));
    }
    let mut out = Vec::new();
    for &d in &cfg.d {
        for &l in &cfg.big_l {
            out.push(KernelSpec::Harmonic { d, big_l: l }.build()?);
        }
    }
    Ok(out)
}

fn single_kernel(cfg: &RunConfig) -> Result<Kernel> {
    let mut ks = kernels(cfg)?;
    if ks.len() != 1 {
        return Err(usage("this command takes exactly one kernel"));
    }
    Ok(ks.remove(0))
}

fn degree_of(k: &Kernel) -> Value {
    match k.as_harmonic() {
        Some(h) => json!(h.degree()),
        None => Value::Null,
    }
}

fn degrees_label(degrees: &[usize]) -> String {
    degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

fn emit_table(table: &Table, format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &table.to_json())?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn cmd_sample(cfg: &RunConfig) -> Result<Vec<u8>> {
    if cfg.trials != 1 {
        return Err(usage("sample writes a single configuration; use --seed to vary it"));
    }
    let k = single_kernel(cfg)?;
    let rng = RngStream::new(cfg.seed, 0);
    let x = if cfg.uniform {
        sample_uniform(k.dim(), k.trace(), rng)
    } else {
        sample_dpp(&k, rng)?
    };
    let header = PointsHeader {
        d: k.dim(),
        kernel: (!cfg.uniform).then(|| k.spec()),
        seed: Some(cfg.seed),
    };
    let mut buf = Vec::new();
    match format_or(cfg, Format::Csv) {
        Format::Csv => write_points_csv(&mut buf, &x, &header)?,
        Format::Json => {
            let doc = json!({
                "d": header.d,
                "kernel": header.kernel,
                "seed": header.seed,
                "points": x.to_vecs(),
            });
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn discrete_energy(x: &PointConfiguration, s: f64) -> Result<f64> {
    if s == 0.0 {
        energy::discrete_log(x)
    } else {
        energy::discrete_riesz(x, s)
    }
}

/// Closed-form expectation, quadrature expectation and asymptotic prediction.
fn expectations(k: &Kernel, s: f64) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    let d = k.dim();
    let df = d as f64;
    let n = k.trace();
    let harmonic = k.as_harmonic();
    if s < 0.0 {
        return Err(usage(format!("negative exponent {s} is not supported")));
    }
    if s >= df + 2.0 {
        return Err(Error::DivergentEnergy { s, limit: df + 2.0 });
    }
    if s == 0.0 {
        return match harmonic {
            Some(h) => Ok((
                Some(energy::expected_log_harmonic(d, h.degree())?),
                None,
                Some(energy::asymptotic_log(d, n)?),
            )),
            None => Ok((None, None, None)),
        };
    }
    let quadrature = Some(energy::expected_riesz_quadrature(k, s)?);
    let (closed, asymptotic) = match &harmonic {
        Some(h) if s < df => (
            Some(energy::expected_riesz_harmonic(d, h.degree(), s)?),
            Some(energy::asymptotic_riesz(d, n, s)?),
        ),
        Some(_) if s == df => (None, Some(energy::asymptotic_singular(d, n)?)),
        None if s == 2.0 && d >= 3 => (Some(energy::expected_e2_closed_form(&k.as_isotropic())?), None),
        _ => (None, None),
    };
    Ok((closed, quadrature, asymptotic))
}

fn require_s(cfg: &RunConfig) -> Result<&[f64]> {
    if cfg.s.is_empty() {
        return Err(usage("specify at least one exponent with --s"));
    }
    Ok(&cfg.s)
}

const ENERGY_COLUMNS: [&str; 10] = [
    "d",
    "L",
    "n",
    "s",
    "trials",
    "E_discrete_mean",
    "E_discrete_se",
    "E_expected_closed_form",
    "E_expected_quadrature",
    "E_asymptotic",
];

/// Energy rows: CSV uses descriptive column names, JSON the report keys.
struct EnergyRows {
    table: Table,
    json: Vec<Value>,
}

impl EnergyRows {
    fn new(meta: Value) -> Self {
        Self {
            table: Table::new(meta, &ENERGY_COLUMNS),
            json: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        k: Option<&Kernel>,
        d: usize,
        n: usize,
        s: f64,
        trials: usize,
        discrete: Option<(f64, Option<f64>)>,
        expectation: (Option<f64>, Option<f64>, Option<f64>),
    ) {
        let (closed, quad, asym) = expectation;
        let big_l = k.map_or(Value::Null, degree_of);
        self.table.push(vec![
            json!(d),
            big_l.clone(),
            json!(n),
            json!(s),
            json!(trials),
            num(discrete.map(|v| v.0)),
            num(discrete.and_then(|v| v.1)),
            num(closed),
            num(quad),
            num(asym),
        ]);
        let report = EnergyReport {
            s,
            n,
            discrete: discrete.map(|v| v.0),
            expected: closed.or(quad),
            asymptotic: asym,
        };
        let mut obj = serde_json::to_value(report).expect("report serializes");
        let map = obj.as_object_mut().expect("object");
        map.insert("d".into(), json!(d));
        map.insert("L".into(), big_l);
        map.insert("trials".into(), json!(trials));
        map.insert("discrete_se".into(), num(discrete.and_then(|v| v.1)));
        map.insert("expected_quadrature".into(), num(quad));
        if let Some(k) = k {
            map.insert("kernel".into(), serde_json::to_value(k.spec()).expect("spec serializes"));
        }
        self.json.push(obj);
    }

    fn emit(self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => emit_table(&self.table, Format::Csv),
            Format::Json => {
                let mut buf = serde_json::to_vec_pretty(&Value::Array(self.json))?;
                buf.push(b'\n');
                Ok(buf)
            }
        }
    }
}

fn cmd_energy(cfg: &RunConfig) -> Result<Vec<u8>> {
    let s_list = require_s(cfg)?;
    if let Some(path) = &cfg.input {
        let file = fs::File::open(path)?;
        let (header, x) = read_points_csv(BufReader::new(file))?;
        let kernel = header.and_then(|h| h.kernel).map(|k| k.build()).transpose()?;
        let kernel = kernel.filter(|k| k.trace() == x.len() && k.dim() == x.d());
        let mut rows = EnergyRows::new(json!({"command": "energy", "input": path}));
        for &s in s_list {
            let value = discrete_energy(&x, s)?;
            let expectation = match &kernel {
                Some(k) => expectations(k, s)?,
                None => (None, None, None),
            };
            rows.push(kernel.as_ref(), x.d(), x.len(), s, 1, Some((value, None)), expectation);
        }
        return rows.emit(format_or(cfg, Format::Json));
    }
    if cfg.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut rows = EnergyRows::new(json!({"command": "energy", "seed": cfg.seed, "trials": cfg.trials}));
    for k in kernels(cfg)? {
        let expectations: Vec<_> = s_list.iter().map(|&s| expectations(&k, s)).collect::<Result<_>>()?;
        let samples = run_trials(cfg.trials, cfg.seed, |rng| {
            let x = sample_dpp(&k, rng)?;
            s_list.iter().map(|&s| discrete_energy(&x, s)).collect::<Result<Vec<f64>>>()
        })?;
        for (i, &s) in s_list.iter().enumerate() {
            let values: Vec<f64> = samples.iter().map(|v| v[i]).collect();
            let report = StatReport::mean_of("energy", &values);
            rows.push(
                Some(&k),
                k.dim(),
                k.trace(),
                s,
                cfg.trials,
                Some((report.estimate, report.standard_error)),
                expectations[i],
            );
        }
    }
    rows.emit(format_or(cfg, Format::Json))
}

fn cmd_expect(cfg: &RunConfig) -> Result<Vec<u8>> {
    let s_list = require_s(cfg)?;
    let mut rows = EnergyRows::new(json!({"command": "expect"}));
    for k in kernels(cfg)? {
        for &s in s_list {
            rows.push(Some(&k), k.dim(), k.trace(), s, 0, None, expectations(&k, s)?);
        }
    }
    rows.emit(format_or(cfg, Format::Json))
}

const STAT_COLUMNS: [&str; 9] = [
    "d",
    "L",
    "n",
    "statistic",
    "parameter",
    "estimate",
    "standard_error",
    "trials",
    "reference",
];

fn push_stat(table: &mut Table, k: &Kernel, parameter: Option<f64>, r: &StatReport) {
    table.push(vec![
        json!(k.dim()),
        degree_of(k),
        json!(k.trace()),
        json!(r.statistic),
        num(parameter),
        num(Some(r.estimate)),
        num(r.standard_error),
        json!(r.trials),
        num(r.reference),
    ]);
}

fn cmd_variance(cfg: &RunConfig) -> Result<Vec<u8>> {
    let mut table = Table::new(
        json!({"command": "variance", "seed": cfg.seed, "trials": cfg.trials}),
        &STAT_COLUMNS,
    );
    for k in kernels(cfg)? {
        let d = k.dim();
        let cap = match cfg.radius {
            Some(r) => CapSpec::polar(d, r)?,
            None => CapSpec::polar_with_measure(d, cfg.measure)?,
        };
        let mu = stats::cap_measure(d, cap.radius());
        let m = cfg.nodes.unwrap_or(2 * (k.max_degree() + d) + 24);
        let semi = stats::variance_cap_semianalytic(&k, &cap, m)?;
        let coord = stats::variance_coordinate_statistic(&k)?;
        let radius = Some(cap.radius());
        if cfg.trials >= 2 {
            let draws = run_trials(cfg.trials, cfg.seed, |rng| {
                let x = sample_dpp(&k, rng)?;
                let count = stats::count_in_cap(&x, &cap) as f64;
                let sum = x.iter().map(|p| p[d]).sum::<f64>();
                Ok((count, sum))
            })?;
            let counts: Vec<f64> = draws.iter().map(|v| v.0).collect();
            let sums: Vec<f64> = draws.iter().map(|v| v.1).collect();
            let mean = StatReport::mean_of("cap_count_mean", &counts).with_reference(k.trace() as f64 * mu);
            let var = StatReport {
                statistic: "cap_count_variance".into(),
                estimate: stats::sample_variance(&counts),
                standard_error: Some(stats::jackknife_variance_se(&counts)),
                trials: cfg.trials,
                reference: Some(semi),
            };
            let cvar = StatReport {
                statistic: "coordinate_sum_variance".into(),
                estimate: stats::sample_variance(&sums),
                standard_error: Some(stats::jackknife_variance_se(&sums)),
                trials: cfg.trials,
                reference: Some(coord),
            };
            push_stat(&mut table, &k, radius, &mean);
            push_stat(&mut table, &k, radius, &var);
            push_stat(&mut table, &k, None, &cvar);
        } else {
            push_stat(&mut table, &k, radius, &StatReport::analytic("cap_count_variance", semi));
            push_stat(&mut table, &k, None, &StatReport::analytic("coordinate_sum_variance", coord));
        }
    }
    emit_table(&table, format_or(cfg, Format::Json))
}

/// `sqrt(π/2) σ/√n`, the large-sample standard error of a median.
fn median_report(statistic: &str, xs: &[f64]) -> StatReport {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let se = (n > 1).then(|| (std::f64::consts::FRAC_PI_2 * stats::sample_variance(xs) / n as f64).sqrt());
    StatReport {
        statistic: statistic.into(),
        estimate: median,
        standard_error: se,
        trials: n,
        reference: None,
    }
}

fn cmd_discrepancy(cfg: &RunConfig) -> Result<Vec<u8>> {
    if cfg.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut table = Table::new(
        json!({"command": "discrepancy", "seed": cfg.seed, "trials": cfg.trials, "probes": cfg.probes}),
        &STAT_COLUMNS,
    );
    let probes = Some(cfg.probes as f64);
    for k in kernels(cfg)? {
        let dpp = run_trials(cfg.trials, cfg.seed, |rng| {
            let x = sample_dpp(&k, rng)?;
            stats::discrepancy_estimate(&x, cfg.probes, rng.substream(1))
        })?;
        push_stat(&mut table, &k, probes, &median_report("discrepancy_median", &dpp));
        push_stat(&mut table, &k, probes, &StatReport::mean_of("discrepancy_mean", &dpp));
        if cfg.uniform {
            let iid = run_trials(cfg.trials, cfg.seed, |rng| {
                let x = sample_uniform(k.dim(), k.trace(), rng.substream(2));
                stats::discrepancy_estimate(&x, cfg.probes, rng.substream(3))
            })?;
            push_stat(&mut table, &k, probes, &median_report("discrepancy_median_uniform", &iid));
            push_stat(&mut table, &k, probes, &StatReport::mean_of("discrepancy_mean_uniform", &iid));
        }
    }
    emit_table(&table, format_or(cfg, Format::Json))
}

fn cmd_separation(cfg: &RunConfig) -> Result<Vec<u8>> {
    if cfg.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut table = Table::new(
        json!({"command": "separation", "seed": cfg.seed, "trials": cfg.trials}),
        &STAT_COLUMNS,
    );
    for k in kernels(cfg)? {
        let d = k.dim();
        let n = k.trace();
        if n < 2 {
            return Err(usage("separation needs at least two points"));
        }
        let harmonic = k.as_harmonic().filter(|h| h.degree() > 0);
        let t_close = harmonic.as_ref().map(|h| 0.8 * stats::close_pairs_threshold(h));
        let draws = run_trials(cfg.trials, cfg.seed, |rng| {
            let x = sample_dpp(&k, rng)?;
            let sep = stats::separation(&x)?;
            let pairs = t_close.map(|t| stats::close_pair_count(&x, t) as f64);
            Ok((sep, pairs))
        })?;
        let seps: Vec<f64> = draws.iter().map(|v| v.0).collect();
        push_stat(&mut table, &k, None, &StatReport::mean_of("separation_mean", &seps));

        let nf = n as f64;
        for &alpha in &cfg.alpha {
            let t = alpha * nf.powf(-0.75);
            let hits: Vec<f64> = seps.iter().map(|&s| if s <= t { 1.0 } else { 0.0 }).collect();
            let mut r = StatReport::mean_of("separation_tail", &hits);
            if d == 2 {
                r.reference = Some(alpha.powi(4) / 64.0);
            }
            push_stat(&mut table, &k, Some(alpha), &r);
        }
        if let (Some(h), Some(t)) = (&harmonic, t_close) {
            let pairs: Vec<f64> = draws.iter().filter_map(|v| v.1).collect();
            let r = StatReport::mean_of("close_pairs_mean", &pairs).with_reference(stats::expected_close_pairs_bound(h, t)?);
            push_stat(&mut table, &k, Some(t), &r);
            let exact = StatReport::analytic("close_pairs_expected", stats::expected_close_pairs(&k, t)?);
            push_stat(&mut table, &k, Some(t), &exact);
            let check = stats::jacobi_bound_check(d, h.degree(), 10_000)?;
            let violation = check.lower_violation.max(check.square_violation);
            push_stat(&mut table, &k, None, &StatReport::analytic("jacobi_bound_violation", violation));
        }
    }
    emit_table(&table, format_or(cfg, Format::Json))
}

fn cmd_compare(cfg: &RunConfig, d: Option<usize>, max_degree: usize) -> Result<Vec<u8>> {
    let d = d.ok_or_else(|| usage("compare-kernels needs --d"))?;
    let targets: Vec<usize> = match (cfg.n, cfg.n_max, &cfg.command) {
        (Some(n), None, _) => vec![n],
        (None, Some(top), _) => (1..=top)
            .map(|n| Ok((n, count_projection_kernels(d, n, max_degree)?)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&(_, c)| c >= 2)
            .map(|(n, _)| n)
            .collect(),
        (None, None, Command::FigData { .. }) => {
            return cmd_compare(
                &RunConfig {
                    n_max: Some(600),
                    ..cfg.clone()
                },
                Some(d),
                max_degree,
            )
        }
        _ => return Err(usage("specify exactly one of --n and --n-max")),
    };
    let mut table = Table::new(
        json!({"command": "compare-kernels", "d": d, "max_degree": max_degree}),
        &["n", "degrees", "harmonic", "F_quadratic_form", "E2_expected", "rank", "gap_condition"],
    );
    for n in targets {
        let list = enumerate_projection_kernels(d, n, max_degree)?;
        let harmonic = list.iter().find(|k| k.is_harmonic()).cloned();
        let mut rows = Vec::with_capacity(list.len());
        for k in &list {
            let f = energy::kernel_quadratic_form(k)?;
            let e2 = energy::expected_e2_closed_form(k)?;
            let gap = match &harmonic {
                Some(h) => Some(energy::compare_kernels(h, k)?.gap_condition),
                None => None,
            };
            rows.push((k, f, e2, gap));
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&a, &b| rows[a].2.partial_cmp(&rows[b].2).unwrap_or(Ordering::Equal));
        let mut rank = vec![0; rows.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r + 1;
        }
        for (i, (k, f, e2, gap)) in rows.into_iter().enumerate() {
            table.push(vec![
                json!(n),
                json!(degrees_label(k.degree_set())),
                json!(k.is_harmonic()),
                num(Some(f)),
                num(Some(e2)),
                json!(rank[i]),
                gap.map_or(Value::Null, Value::from),
            ]);
        }
    }
    emit_table(&table, format_or(cfg, Format::Csv))
}

fn cmd_constants(cfg: &RunConfig) -> Result<Vec<u8>> {
    let d = cfg.d.first().copied().unwrap_or(2);
    let grid: Vec<f64> = if cfg.s.is_empty() {
        (1..(20 * d)).map(|i| i as f64 * 0.05).collect()
    } else {
        cfg.s.clone()
    };
    let mut table = Table::new(
        json!({"command": "fig-data constants", "d": d}),
        &["s", "C_s_d_asymptotic_constant", "upper_2pow_neg_s_gamma_1_minus_half_s"],
    );
    for s in grid {
        let c = energy::asymptotic_riesz_constant(d, s)?;
        let bound = (d == 2).then(|| 2f64.powf(-s) * gamma(1.0 - s / 2.0));
        table.push(vec![json!(s), num(Some(c)), num(bound)]);
    }
    emit_table(&table, format_or(cfg, Format::Csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("sphere-dpp").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_lists_and_defaults() {
        let cfg = parse(&["expect", "--d", "2,3", "--L", "4", "--s", "0.5,1"]);
        assert_eq!(cfg.d, vec![2, 3]);
        assert_eq!(cfg.big_l, vec![4]);
        assert_eq!(cfg.s, vec![0.5, 1.0]);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.max_degree, 40);
        assert_eq!(cfg.alpha, vec![0.5, 1.0]);
        let fig = parse(&["fig-data", "optimality"]);
        assert_eq!(fig.command, Command::FigData { figure: Figure::Optimality });
    }

    #[test]
    fn expectation_rows() {
        let cfg = parse(&["expect", "--d", "2", "--L", "8", "--s", "1", "--format", "json"]);
        let out: Value = serde_json::from_slice(&render(&cfg).unwrap()).unwrap();
        let row = &out[0];
        let direct = energy::expected_riesz_harmonic(2, 8, 1.0).unwrap();
        assert_eq!(row["expected"].as_f64().unwrap(), direct);
        assert_eq!(row["n"], json!(81));
        assert_eq!(row["discrete"], Value::Null);
        assert!(row["asymptotic"].is_f64());
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(render(&parse(&["expect", "--d", "2"])), Err(Error::Domain(_))));
        assert!(matches!(render(&parse(&["expect", "--d", "2", "--L", "3"])), Err(Error::Domain(_))));
        assert!(matches!(
            render(&parse(&["expect", "--d", "2", "--L", "3", "--s", "5"])),
            Err(Error::DivergentEnergy { .. })
        ));
        assert_eq!(exit_code(&Error::SamplerStall { index: 0, proposals: 1 }), 4);
        assert_eq!(exit_code(&Error::Accuracy("x".into())), 3);
        assert_eq!(main_with_args(["sphere-dpp", "bogus"]), 2);
        assert_eq!(main_with_args(["sphere-dpp", "compare-kernels", "--d", "4"]), 2);
    }
}

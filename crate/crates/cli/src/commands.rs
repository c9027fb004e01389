//! Command definitions and implementations.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spatial_decay_core::{
    chi_squared_independence, default_grid, estimate_curve, find_amplitude_boundary,
    find_boundary, find_boundary_on, fit_exponential, generate_dgp, logistic_fit, nearest_source_distance_with,
    ols_fit, parametric_boundary_with, pct_change_per_10_miles, select_bandwidth, spearman,
    binned_means, Bandwidth, BandwidthGrid, BandwidthMode, BoundaryKind, CurveOptions, CvResult,
    DgpKind, DgpSpec, DistanceMetric, HumpBoundaryRule, ParametricBoundaryOptions,
    ParametricModel, ReferenceMode, SpatialSample, StudyOptions,
};

use crate::csvio;
use crate::error::CliError;
use crate::report::{
    boundary_section, cv_section, method_section, reference_mode_name, write_output, Report,
};
use crate::runner::{resolve_threads, run_study_parallel};

#[derive(Parser, Debug)]
#[command(
    name = "spatial-decay",
    version,
    about = "Spatial decay-curve estimation, boundary detection, and Monte Carlo comparison"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a seeded sample from a reference data-generating process.
    Simulate(SimulateArgs),
    /// Monte Carlo comparison of parametric and nonparametric boundary
    /// estimation over repeated samples.
    McStudy(McStudyArgs),
    /// Estimate the decay curve of a distance/outcome CSV and locate its
    /// boundary.
    Estimate(EstimateArgs),
    /// Locate the boundary of an already-estimated curve CSV.
    Boundary(BoundaryArgs),
    /// Distance-decay analysis of a tract outcome against source
    /// locations: OLS, rank correlation, binned means, and the
    /// nonparametric curve.
    AnalyzeDecay(AnalyzeDecayArgs),
    /// Branch survival analysis: income-quartile table, independence test,
    /// and standardized logistic regression.
    AnalyzeSurvival(AnalyzeSurvivalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum DgpArg {
    StrongDecay,
    WeakDecay,
    Hump,
    Flat,
}

impl DgpArg {
    fn kind(self) -> DgpKind {
        match self {
            DgpArg::StrongDecay => DgpKind::StrongDecay,
            DgpArg::WeakDecay => DgpKind::WeakDecay,
            DgpArg::Hump => DgpKind::Hump,
            DgpArg::Flat => DgpKind::Flat,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum StudyDgpArg {
    StrongDecay,
    WeakDecay,
    Hump,
    Flat,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum ReferenceArg {
    AtOrigin,
    AtMaximum,
}

impl ReferenceArg {
    fn mode(self) -> ReferenceMode {
        match self {
            ReferenceArg::AtOrigin => ReferenceMode::AtOrigin,
            ReferenceArg::AtMaximum => ReferenceMode::AtMaximum,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum OutcomeModeArg {
    /// Analyze the natural log of the outcome (decay in percent terms).
    Log,
    /// Analyze the outcome on its original scale.
    Level,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
pub enum DistanceFormulaArg {
    /// 69 miles per decimal degree, longitude treated like latitude.
    Flat,
    /// Haversine great-circle miles.
    GreatCircle,
}

impl DistanceFormulaArg {
    fn metric(self) -> DistanceMetric {
        match self {
            DistanceFormulaArg::Flat => DistanceMetric::FlatDegrees,
            DistanceFormulaArg::GreatCircle => DistanceMetric::GreatCircle,
        }
    }
    fn name(self) -> &'static str {
        match self {
            DistanceFormulaArg::Flat => "flat",
            DistanceFormulaArg::GreatCircle => "great-circle",
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Data-generating process to sample from.
    #[arg(long, value_enum)]
    pub dgp: DgpArg,
    /// Number of observations.
    #[arg(short = 'n', long = "n-obs", default_value_t = 5000)]
    pub n_obs: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Noise standard deviation.
    #[arg(long, default_value_t = 0.1)]
    pub noise_sd: f64,
    /// Output CSV path (stdout when omitted).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct McStudyArgs {
    /// Process(es) to study.
    #[arg(long, value_enum, default_value_t = StudyDgpArg::All)]
    pub dgp: StudyDgpArg,
    /// Number of Monte Carlo replications.
    #[arg(short = 'R', long, default_value_t = 500)]
    pub replications: usize,
    #[arg(short = 'n', long = "n-obs", default_value_t = 5000)]
    pub n_obs: usize,
    /// Base seed; replication r uses seed + r.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub decay_threshold: f64,
    /// Candidate bandwidths for cross-validation, in miles.
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 15.0, 20.0])]
    pub bandwidth_grid: Vec<f64>,
    /// Skip cross-validation and use this bandwidth everywhere (fast mode).
    #[arg(long)]
    pub fixed_bandwidth: Option<f64>,
    /// Evaluation grid size for the nonparametric curve.
    #[arg(long, default_value_t = 200)]
    pub eval_grid_size: usize,
    /// Noise standard deviation of the processes.
    #[arg(long, default_value_t = 0.1)]
    pub noise_sd: f64,
    /// Boundary convention for the hump process: `amplitude:<fraction>`
    /// or `relative-max`.
    #[arg(long, default_value = "amplitude:0.2")]
    pub hump_rule: String,
    /// Guarded parametric mode: apply the degeneracy floor and require
    /// convergence instead of accepting any fitted rate.
    #[arg(long, default_value_t = false)]
    pub guarded_parametric: bool,
    /// Worker threads (default: SPATIAL_DECAY_THREADS or all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report output path (stdout when omitted).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Directory for per-process plot-ready CSVs of one replication.
    #[arg(long)]
    pub plot_data_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input CSV with distance,outcome columns.
    #[arg(long, short = 'i')]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 15.0, 20.0])]
    pub bandwidth_grid: Vec<f64>,
    /// Skip cross-validation and use this bandwidth.
    #[arg(long)]
    pub fixed_bandwidth: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub decay_threshold: f64,
    #[arg(long, value_enum, default_value_t = ReferenceArg::AtOrigin)]
    pub reference: ReferenceArg,
    #[arg(long, default_value_t = 200)]
    pub eval_grid_size: usize,
    /// Fitted curve CSV output path.
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
    /// Report output path (stdout when omitted).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundaryArgs {
    /// Curve CSV with distance, estimate, and optional valid columns.
    #[arg(long)]
    pub curve: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub decay_threshold: f64,
    #[arg(long, value_enum, default_value_t = ReferenceArg::AtOrigin)]
    pub reference: ReferenceArg,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeDecayArgs {
    /// Tract CSV with id,lat,lon,outcome columns.
    #[arg(long)]
    pub tracts: PathBuf,
    /// Source CSV with lat,lon columns.
    #[arg(long)]
    pub sources: PathBuf,
    #[arg(long, value_enum, default_value_t = OutcomeModeArg::Log)]
    pub outcome_mode: OutcomeModeArg,
    /// Keep tracts within this many miles of the nearest source.
    #[arg(long, default_value_t = 100.0)]
    pub cutoff: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 25.0, 50.0, 100.0])]
    pub bin_edges: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 15.0, 20.0])]
    pub bandwidth_grid: Vec<f64>,
    #[arg(long)]
    pub fixed_bandwidth: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub decay_threshold: f64,
    #[arg(long, default_value_t = 200)]
    pub eval_grid_size: usize,
    #[arg(long, value_enum, default_value_t = DistanceFormulaArg::Flat)]
    pub distance_formula: DistanceFormulaArg,
    #[arg(long)]
    pub curve_out: Option<PathBuf>,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeSurvivalArgs {
    /// Branch CSV with survived,income[,covariate...] columns.
    #[arg(long)]
    pub branches: PathBuf,
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::McStudy(args) => cmd_mc_study(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Boundary(args) => cmd_boundary(&args),
        Command::AnalyzeDecay(args) => cmd_analyze_decay(&args),
        Command::AnalyzeSurvival(args) => cmd_analyze_survival(&args),
    }
}

fn dgp_spec(kind: DgpKind, noise_sd: f64) -> DgpSpec {
    DgpSpec::new(kind).with_noise_sd(noise_sd)
}

fn parse_hump_rule(text: &str) -> Result<HumpBoundaryRule, CliError> {
    if text == "relative-max" {
        return Ok(HumpBoundaryRule::RelativeToMax);
    }
    if let Some(rest) = text.strip_prefix("amplitude:") {
        let fraction: f64 = rest.parse().map_err(|_| {
            CliError::Config(format!("invalid amplitude fraction '{rest}' in --hump-rule"))
        })?;
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(CliError::Config(
                "--hump-rule amplitude fraction must lie in (0, 1)".to_string(),
            ));
        }
        return Ok(HumpBoundaryRule::AmplitudeFraction(fraction));
    }
    Err(CliError::Config(format!(
        "--hump-rule must be 'relative-max' or 'amplitude:<fraction>', got '{text}'"
    )))
}

fn bandwidth_grid(values: &[f64]) -> Result<BandwidthGrid, CliError> {
    BandwidthGrid::new(values).map_err(|e| CliError::Config(e.to_string()))
}

fn bandwidth_mode(
    fixed: Option<f64>,
    grid: &[f64],
) -> Result<(BandwidthMode, BandwidthGrid), CliError> {
    let grid = bandwidth_grid(grid)?;
    match fixed {
        Some(h) => {
            let h = Bandwidth::new(h)
                .map_err(|e| CliError::Config(format!("--fixed-bandwidth: {e}")))?;
            Ok((BandwidthMode::Fixed(h), grid))
        }
        None => Ok((BandwidthMode::CrossValidated, grid)),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let spec = dgp_spec(args.dgp.kind(), args.noise_sd);
    let sample = generate_dgp(&spec, args.n_obs, args.seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_output(args.out.as_deref(), &csvio::sample_to_csv(&sample))
}

fn study_options(args: &McStudyArgs) -> Result<StudyOptions, CliError> {
    let (mode, grid) = bandwidth_mode(args.fixed_bandwidth, &args.bandwidth_grid)?;
    Ok(StudyOptions {
        decay_threshold: args.decay_threshold,
        bandwidth_grid: grid,
        bandwidth_mode: mode,
        eval_grid_size: args.eval_grid_size,
        unguarded_parametric: !args.guarded_parametric,
        hump_rule: parse_hump_rule(&args.hump_rule)?,
    })
}

fn cmd_mc_study(args: &McStudyArgs) -> Result<(), CliError> {
    let kinds: Vec<DgpKind> = match args.dgp {
        StudyDgpArg::All => DgpKind::all().to_vec(),
        StudyDgpArg::StrongDecay => vec![DgpKind::StrongDecay],
        StudyDgpArg::WeakDecay => vec![DgpKind::WeakDecay],
        StudyDgpArg::Hump => vec![DgpKind::Hump],
        StudyDgpArg::Flat => vec![DgpKind::Flat],
    };
    let options = study_options(args)?;
    let threads = resolve_threads(args.threads);

    let mut report = Report::new("mc-study");
    report.section("config");
    report.kv("dgp", match args.dgp {
        StudyDgpArg::All => "all".to_string(),
        other => {
            let kind = match other {
                StudyDgpArg::StrongDecay => DgpKind::StrongDecay,
                StudyDgpArg::WeakDecay => DgpKind::WeakDecay,
                StudyDgpArg::Hump => DgpKind::Hump,
                StudyDgpArg::Flat => DgpKind::Flat,
                StudyDgpArg::All => unreachable!(),
            };
            kind.name().to_string()
        }
    });
    report.kv("n_replications", args.replications);
    report.kv("n_obs", args.n_obs);
    report.kv("base_seed", args.seed);
    report.kv("decay_threshold", args.decay_threshold);
    report.kv(
        "bandwidth_grid",
        args.bandwidth_grid
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.kv_opt("fixed_bandwidth", args.fixed_bandwidth);
    report.kv("eval_grid_size", args.eval_grid_size);
    report.kv("noise_sd", args.noise_sd);
    report.kv("hump_rule", &args.hump_rule);
    report.kv(
        "parametric_mode",
        if args.guarded_parametric {
            "guarded"
        } else {
            "unguarded"
        },
    );
    report.kv("threads", threads);

    for kind in kinds {
        let spec = dgp_spec(kind, args.noise_sd);
        let study = run_study_parallel(
            &spec,
            args.replications,
            args.n_obs,
            args.seed,
            &options,
            threads,
        )?;
        report.section(&format!("study {}", kind.name()));
        report.kv("n_replications", study.n_replications);
        report.kv("n_obs", study.n_obs);
        report.kv("base_seed", study.base_seed);
        report.kv_opt("true_boundary", spec.true_boundary);
        method_section(&mut report, kind.name(), &study.parametric);
        method_section(&mut report, kind.name(), &study.nonparametric);

        if let Some(dir) = &args.plot_data_dir {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let path = dir.join(format!("plot_{}.csv", kind.name()));
            let csv = plot_data_csv(&spec, args.n_obs, args.seed, &options)?;
            std::fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
        }
    }
    write_output(args.out.as_deref(), &report.finish())
}

/// Long-format plot data for one replication: the raw sample, the true
/// mean curve, both fitted curves, and both boundary verdicts.
fn plot_data_csv(
    spec: &DgpSpec,
    n: usize,
    seed: u64,
    options: &StudyOptions,
) -> Result<String, CliError> {
    let sample = generate_dgp(spec, n, seed).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = default_grid(&sample, options.eval_grid_size);

    let mut out = String::from("series,x,y\n");
    for (d, y) in sample.pairs() {
        let _ = writeln!(out, "sample,{d},{y}");
    }
    for &d in &grid {
        let _ = writeln!(out, "true_mean,{d},{}", spec.mean(d));
    }

    if let Ok(fit) = fit_exponential(&sample) {
        if let ParametricModel::Exponential { amplitude, rate } = fit.model {
            for &d in &grid {
                let _ = writeln!(out, "parametric_fit,{d},{}", amplitude * (-rate * d).exp());
            }
        }
        let boundary_options = ParametricBoundaryOptions {
            degeneracy_floor: if options.unguarded_parametric {
                None
            } else {
                Some(spatial_decay_core::nls::DEGENERACY_FLOOR)
            },
            require_convergence: !options.unguarded_parametric,
            ..Default::default()
        };
        if let Ok(b) = parametric_boundary_with(&fit, options.decay_threshold, &boundary_options) {
            if let BoundaryKind::Finite(d) = b.kind {
                let _ = writeln!(out, "parametric_boundary,{d},{}", b.threshold_level);
            }
        }
    }

    let h = match options.bandwidth_mode {
        BandwidthMode::Fixed(h) => h,
        BandwidthMode::CrossValidated => {
            select_bandwidth(&sample, &options.bandwidth_grid)
                .map_err(|e| CliError::Numeric(e.to_string()))?
                .selected
        }
    };
    let curve = estimate_curve(&sample, &grid, h, &CurveOptions::default())
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    for (d, v) in curve.valid_points() {
        let _ = writeln!(out, "nonparametric_fit,{d},{v}");
    }
    let boundary = match spec.kind {
        DgpKind::Hump => match options.hump_rule {
            HumpBoundaryRule::AmplitudeFraction(f) => find_amplitude_boundary(&curve, f),
            HumpBoundaryRule::RelativeToMax => {
                find_boundary(&curve, options.decay_threshold, ReferenceMode::AtMaximum)
            }
        },
        _ => find_boundary(&curve, options.decay_threshold, ReferenceMode::AtOrigin),
    };
    if let Ok(b) = boundary {
        if let BoundaryKind::Finite(d) = b.kind {
            let _ = writeln!(out, "nonparametric_boundary,{d},{}", b.threshold_level);
        }
    }
    Ok(out)
}

/// Shared estimation pipeline: bandwidth (cross-validated or fixed), curve
/// on the default grid, boundary at the requested reference.
fn estimate_pipeline(
    sample: &SpatialSample,
    fixed: Option<f64>,
    grid_values: &[f64],
    eval_grid_size: usize,
    decay_threshold: f64,
    reference: ReferenceMode,
) -> Result<(Option<CvResult>, spatial_decay_core::CurveEstimate, spatial_decay_core::BoundaryResult), CliError> {
    let (mode, grid) = bandwidth_mode(fixed, grid_values)?;
    let (cv, h) = match mode {
        BandwidthMode::Fixed(h) => (None, h),
        BandwidthMode::CrossValidated => {
            let cv = select_bandwidth(sample, &grid).map_err(|e| CliError::Numeric(e.to_string()))?;
            let h = cv.selected;
            (Some(cv), h)
        }
    };
    let eval = default_grid(sample, eval_grid_size);
    let curve = estimate_curve(sample, &eval, h, &CurveOptions::default())
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let boundary = find_boundary(&curve, decay_threshold, reference)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok((cv, curve, boundary))
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let sample = csvio::read_sample(&args.input)?;
    let (cv, curve, boundary) = estimate_pipeline(
        &sample,
        args.fixed_bandwidth,
        &args.bandwidth_grid,
        args.eval_grid_size,
        args.decay_threshold,
        args.reference.mode(),
    )?;

    let mut report = Report::new("estimate");
    report.section("config");
    report.kv("input", args.input.display());
    report.kv(
        "bandwidth_grid",
        args.bandwidth_grid
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.kv_opt("fixed_bandwidth", args.fixed_bandwidth);
    report.kv("decay_threshold", args.decay_threshold);
    report.kv("reference", reference_mode_name(args.reference.mode()));
    report.kv("eval_grid_size", args.eval_grid_size);
    report.kv("n_obs", sample.len());

    if let Some(cv) = &cv {
        cv_section(&mut report, cv);
    } else {
        report.section("bandwidth");
        report.kv("selected", curve.bandwidth().get());
    }
    boundary_section(&mut report, "boundary", &boundary);
    report.section("curve");
    report.kv("points", curve.len());
    report.kv("valid_points", curve.n_valid());
    match &args.curve_out {
        Some(p) => report.kv("output", p.display()),
        None => report.kv("output", "none"),
    }

    if let Some(path) = &args.curve_out {
        std::fs::write(path, csvio::curve_to_csv(&curve)).map_err(|e| CliError::io(path, e))?;
    }
    write_output(args.out.as_deref(), &report.finish())
}

fn cmd_boundary(args: &BoundaryArgs) -> Result<(), CliError> {
    let (grid, values, mask) = csvio::read_curve(&args.curve)?;
    // The grid must be strictly increasing for the scan.
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(CliError::Config(format!(
                "{}: curve distances must be strictly increasing",
                args.curve.display()
            )));
        }
    }
    let boundary = find_boundary_on(
        &grid,
        &values,
        &mask,
        args.decay_threshold,
        args.reference.mode(),
    )
    .map_err(|e| CliError::Numeric(e.to_string()))?;

    let mut report = Report::new("boundary");
    report.section("config");
    report.kv("curve", args.curve.display());
    report.kv("decay_threshold", args.decay_threshold);
    report.kv("reference", reference_mode_name(args.reference.mode()));
    report.kv("points", grid.len());
    boundary_section(&mut report, "boundary", &boundary);
    write_output(args.out.as_deref(), &report.finish())
}

fn cmd_analyze_decay(args: &AnalyzeDecayArgs) -> Result<(), CliError> {
    let tracts = csvio::read_tracts(&args.tracts)?;
    let sources = csvio::read_sources(&args.sources)?;
    let points: Vec<_> = tracts.iter().map(|t| t.point).collect();
    let distances = nearest_source_distance_with(&points, &sources, args.distance_formula.metric())
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut kept_d = Vec::new();
    let mut kept_raw = Vec::new();
    for (tract, &d) in tracts.iter().zip(distances.iter()) {
        if d <= args.cutoff {
            if args.outcome_mode == OutcomeModeArg::Log && tract.outcome <= 0.0 {
                return Err(CliError::Config(format!(
                    "tract {}: outcome {} is not positive; log mode needs positive outcomes",
                    tract.id, tract.outcome
                )));
            }
            kept_d.push(d);
            kept_raw.push(tract.outcome);
        }
    }
    if kept_d.len() < 3 {
        return Err(CliError::Config(format!(
            "only {} tracts within the {}-mile cutoff; need at least 3",
            kept_d.len(),
            args.cutoff
        )));
    }
    let analyzed: Vec<f64> = match args.outcome_mode {
        OutcomeModeArg::Log => kept_raw.iter().map(|&v| v.ln()).collect(),
        OutcomeModeArg::Level => kept_raw.clone(),
    };

    let ols = ols_fit(&[("distance", &kept_d)], &analyzed)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let slope = ols.coefficient("distance").unwrap();
    let rho = spearman(&kept_d, &analyzed).map_err(|e| CliError::Numeric(e.to_string()))?;
    let binned = binned_means(&kept_d, &kept_raw, &args.bin_edges)
        .map_err(|e| CliError::Numeric(e.to_string()))?;

    let sample = SpatialSample::new(kept_d.clone(), analyzed.clone())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let (cv, curve, boundary) = estimate_pipeline(
        &sample,
        args.fixed_bandwidth,
        &args.bandwidth_grid,
        args.eval_grid_size,
        args.decay_threshold,
        ReferenceMode::AtOrigin,
    )?;

    let mut report = Report::new("analyze-decay");
    report.section("config");
    report.kv("tracts", args.tracts.display());
    report.kv("sources", args.sources.display());
    report.kv(
        "outcome_mode",
        match args.outcome_mode {
            OutcomeModeArg::Log => "log",
            OutcomeModeArg::Level => "level",
        },
    );
    report.kv("cutoff_miles", args.cutoff);
    report.kv("distance_formula", args.distance_formula.name());
    report.kv(
        "bin_edges",
        args.bin_edges
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.kv(
        "bandwidth_grid",
        args.bandwidth_grid
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    report.kv_opt("fixed_bandwidth", args.fixed_bandwidth);
    report.kv("decay_threshold", args.decay_threshold);
    report.kv("eval_grid_size", args.eval_grid_size);

    report.section("distances");
    report.kv("n_tracts", tracts.len());
    report.kv("n_sources", sources.len());
    report.kv("n_within_cutoff", kept_d.len());
    let max_d = kept_d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean_d = kept_d.iter().sum::<f64>() / kept_d.len() as f64;
    report.kv("mean_distance", mean_d);
    report.kv("max_distance", max_d);

    report.table("ols", &["name", "coefficient", "std_error"]);
    for i in 0..ols.names.len() {
        report.row(&[
            ols.names[i].clone(),
            ols.coefficients[i].to_string(),
            ols.standard_errors[i].to_string(),
        ]);
    }
    report.section("ols_summary");
    report.kv("r_squared", ols.r_squared);
    report.kv("n", ols.n);
    report.kv("slope_t_statistic", slope / ols.standard_error("distance").unwrap());

    report.section("decay");
    report.kv("pct_change_per_10_miles", pct_change_per_10_miles(slope));
    report.kv("spearman_rho", rho);

    report.table(
        "binned_means",
        &["lower", "upper", "mean", "ci_half_width", "count"],
    );
    for bin in &binned.bins {
        report.row(&[
            bin.lower.to_string(),
            bin.upper.to_string(),
            bin.mean.to_string(),
            bin.ci_half_width.to_string(),
            bin.count.to_string(),
        ]);
    }

    if let Some(cv) = &cv {
        cv_section(&mut report, cv);
    } else {
        report.section("bandwidth");
        report.kv("selected", curve.bandwidth().get());
    }
    boundary_section(&mut report, "boundary", &boundary);

    if let Some(path) = &args.curve_out {
        std::fs::write(path, csvio::curve_to_csv(&curve)).map_err(|e| CliError::io(path, e))?;
    }
    write_output(args.out.as_deref(), &report.finish())
}

fn cmd_analyze_survival(args: &AnalyzeSurvivalArgs) -> Result<(), CliError> {
    let table = csvio::read_branches(&args.branches)?;
    let n = table.survived.len();
    if n < 8 {
        return Err(CliError::Config(format!(
            "survival analysis needs at least 8 branches, got {n}"
        )));
    }

    // Income quartiles by rank.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        table.income[a]
            .partial_cmp(&table.income[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut quartile = vec![0usize; n];
    for (rank, &idx) in order.iter().enumerate() {
        quartile[idx] = (rank * 4 / n).min(3);
    }

    let mut counts = [[0u64; 2]; 4]; // [quartile][survived? 1 : 0]
    let mut income_sums = [0.0f64; 4];
    for i in 0..n {
        counts[quartile[i]][table.survived[i] as usize] += 1;
        income_sums[quartile[i]] += table.income[i];
    }

    let mut report = Report::new("analyze-survival");
    report.section("config");
    report.kv("branches", args.branches.display());
    report.kv("n_branches", n);
    report.kv(
        "covariates",
        std::iter::once("income".to_string())
            .chain(table.extras.iter().map(|(name, _)| name.clone()))
            .collect::<Vec<_>>()
            .join(","),
    );

    report.table(
        "quartiles",
        &[
            "quartile",
            "mean_income",
            "survived",
            "total",
            "survival_rate",
            "ci_half_width",
        ],
    );
    for q in 0..4 {
        let total = counts[q][0] + counts[q][1];
        let survived = counts[q][1];
        let rate = survived as f64 / total as f64;
        let ci = 1.96 * (rate * (1.0 - rate) / total as f64).sqrt();
        report.row(&[
            format!("Q{}", q + 1),
            (income_sums[q] / total as f64).to_string(),
            survived.to_string(),
            total.to_string(),
            rate.to_string(),
            ci.to_string(),
        ]);
    }

    report.section("chi_squared");
    let chi_table: Vec<Vec<u64>> = (0..4).map(|q| vec![counts[q][1], counts[q][0]]).collect();
    let mut failure: Option<CliError> = None;
    match chi_squared_independence(&chi_table) {
        Ok(chi) => {
            report.kv("statistic", chi.statistic);
            report.kv("dof", chi.dof);
            report.kv("p_value", chi.p_value);
        }
        Err(e) => {
            report.kv("error", &e);
            failure.get_or_insert(CliError::Numeric(e.to_string()));
        }
    }

    // Standardize covariates (sample standard deviation).
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    columns.push(("income".to_string(), table.income.clone()));
    for (name, values) in &table.extras {
        columns.push((name.clone(), values.clone()));
    }
    let mut standardized: Vec<(String, Vec<f64>)> = Vec::new();
    for (name, values) in &columns {
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        let sd = var.sqrt();
        if sd <= 0.0 {
            report.section("logistic");
            report.kv("error", format!("covariate '{name}' is constant"));
            let err = CliError::Numeric(format!("covariate '{name}' is constant"));
            write_output(args.out.as_deref(), &report.finish())?;
            return Err(failure.unwrap_or(err));
        }
        standardized.push((name.clone(), values.iter().map(|v| (v - mean) / sd).collect()));
    }
    let design: Vec<(&str, &[f64])> = standardized
        .iter()
        .map(|(name, values)| (name.as_str(), values.as_slice()))
        .collect();

    match logistic_fit(&design, &table.survived) {
        Ok(fit) => {
            report.table(
                "logistic",
                &["name", "coefficient", "std_error", "odds_ratio"],
            );
            for i in 0..fit.names.len() {
                report.row(&[
                    fit.names[i].clone(),
                    fit.coefficients[i].to_string(),
                    fit.standard_errors[i].to_string(),
                    fit.odds_ratios[i].to_string(),
                ]);
            }
            report.section("logistic_summary");
            report.kv("converged", fit.converged);
            report.kv("iterations", fit.iterations);
            report.kv("auc", fit.auc);
            report.kv("log_likelihood", fit.log_likelihood);
            report.kv("n", fit.n);
        }
        Err(e) => {
            report.section("logistic");
            report.kv("error", &e);
            failure.get_or_insert(CliError::Numeric(e.to_string()));
        }
    }

    write_output(args.out.as_deref(), &report.finish())?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

//! Command-line front end: risk queries, sampler application, and experiment
//! runs.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 triviality regime
//! detected (identity sampler, risk 0), 3 input outside the neighborhood.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ldp_sampler::distributions::{
    DiscretePmf, LaplaceMixture, Neighborhood, ReferenceDist, UniverseSpec,
};
use ldp_sampler::divergence::FDivergence;
use ldp_sampler::error::Error;
use ldp_sampler::experiments::{
    run_finite, run_laplace_sweep, run_visual, SweepConfig, SweepPrivacy, VisualConfig,
};
use ldp_sampler::numerics::special::chi_square_sf;
use ldp_sampler::risk::{local_risk_pure, minimax_risk, widen_c1_to_integral, RiskReport};
use ldp_sampler::samplers::{ClipSampler, Draws, LinearSampler, SamplerOutput};
use ldp_sampler::tradeoff::TradeoffFunction;
use ldp_sampler::QuadratureConfig;

#[derive(Parser)]
#[command(
    name = "ldp-sampler",
    about = "Minimax-optimal locally private sampling: risks, samplers, experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print worst-case risk reports for a distribution class and privacy notion.
    Risk(RiskArgs),
    /// Privatize an input distribution and write draws from the output.
    Sample(SampleArgs),
    /// Run a named experiment with paper defaults (overridable) and write CSV/JSON.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct PrivacyFlags {
    /// Pure privacy at this epsilon.
    #[arg(long, value_name = "EPS", conflicts_with_all = ["approx", "gldp"])]
    pure: Option<f64>,
    /// Approximate privacy: epsilon followed by delta.
    #[arg(long, num_args = 2, value_names = ["EPS", "DELTA"], conflicts_with = "gldp")]
    approx: Option<Vec<f64>>,
    /// Gaussian privacy at this nu.
    #[arg(long, value_name = "NU")]
    gldp: Option<f64>,
}

impl PrivacyFlags {
    fn resolve(&self) -> Result<TradeoffFunction, Error> {
        match (self.pure, &self.approx, self.gldp) {
            (Some(eps), None, None) => TradeoffFunction::pure(eps),
            (None, Some(pair), None) => TradeoffFunction::approx(pair[0], pair[1]),
            (None, None, Some(nu)) => TradeoffFunction::gaussian(nu),
            _ => Err(Error::Config(
                "choose exactly one of --pure, --approx, --gldp".into(),
            )),
        }
    }
}

#[derive(Args)]
struct RiskArgs {
    #[command(flatten)]
    privacy: PrivacyFlags,
    /// Full simplex over [k] (class bounds (0, k) around the uniform).
    #[arg(long, conflicts_with_all = ["gamma", "c1", "c2"])]
    k: Option<usize>,
    /// Neighborhood bounds (1/gamma, gamma).
    #[arg(long)]
    gamma: Option<u32>,
    /// Lower class bound (with --c2).
    #[arg(long, requires = "c2")]
    c1: Option<f64>,
    /// Upper class bound (with --c1).
    #[arg(long, requires = "c1")]
    c2: Option<f64>,
    /// Interpret --gamma as a local neighborhood query.
    #[arg(long)]
    local: bool,
    /// With --local and --pure: report the clipping sampler's local risk.
    #[arg(long, requires = "local")]
    nonlinear: bool,
    /// Decrease c1 to the nearest value making (c2-c1)/(1-c1) integral.
    #[arg(long)]
    widen: bool,
    /// Comma-separated divergences: kl, tv, hellinger, chi2, hs:<gamma>.
    #[arg(long, value_delimiter = ',', default_value = "kl,tv,hellinger")]
    div: Vec<String>,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    privacy: PrivacyFlags,
    /// Input distribution file: pmf JSON {"probs": [...]} or mixture JSON
    /// {dim, scale, weights, means}.
    #[arg(long)]
    input: PathBuf,
    /// Neighborhood radius around the uniform pmf / zero-mean reference.
    #[arg(long)]
    gamma: Option<f64>,
    /// Lower class bound (global sampler; with --c2).
    #[arg(long, requires = "c2")]
    c1: Option<f64>,
    /// Upper class bound (global sampler; with --c1).
    #[arg(long, requires = "c1")]
    c2: Option<f64>,
    /// Use the clipping sampler (pure privacy only); default is linear.
    #[arg(long)]
    nonlinear: bool,
    /// Number of draws.
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference scale for continuous inputs (defaults to the input's scale).
    #[arg(long)]
    ref_scale: Option<f64>,
    /// Half-width of the continuous solve grid.
    #[arg(long, default_value_t = 30.0)]
    grid_half: f64,
    /// Points per axis of the continuous solve grid.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Chi-square self-test of discrete draws against the output pmf.
    #[arg(long)]
    chi2_check: bool,
    /// Write draws + output distribution here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of: finite-pure, finite-gldp, laplace1d-pure, laplace1d-gldp,
    /// laplacend-pure, visual.
    id: String,
    /// Finite-space size (even; default 20).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sweep clients (default 100).
    #[arg(long)]
    clients: Option<usize>,
    /// Privacy grid override, comma separated.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Quadrature points per axis override.
    #[arg(long)]
    points: Option<usize>,
    /// Quadrature half-width override.
    #[arg(long)]
    half_width: Option<f64>,
    /// Output directory (default $LDP_SAMPLER_OUT_DIR or ./ldp-out).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reserves exit code 2 for itself; this tool uses 1 for
            // usage errors.
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    let code = match cli.command {
        Command::Risk(args) => cmd_risk(&args),
        Command::Sample(args) => cmd_sample(&args),
        Command::Experiment(args) => cmd_experiment(&args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Membership { .. } => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn parse_divergences(names: &[String]) -> Result<Vec<FDivergence>, Error> {
    names
        .iter()
        .map(|name| match name.as_str() {
            "kl" => Ok(FDivergence::Kl),
            "tv" => Ok(FDivergence::TotalVariation),
            "hellinger" => Ok(FDivergence::SquaredHellinger),
            "chi2" => Ok(FDivergence::ChiSquared),
            other => {
                if let Some(gamma) = other.strip_prefix("hs:") {
                    let gamma: f64 = gamma
                        .parse()
                        .map_err(|_| Error::Config(format!("bad hockey-stick gamma in {other}")))?;
                    FDivergence::hockey_stick(gamma)
                } else {
                    Err(Error::Config(format!(
                        "unknown divergence {other}; use kl, tv, hellinger, chi2, hs:<gamma>"
                    )))
                }
            }
        })
        .collect()
}

fn echo_config(value: &serde_json::Value) {
    eprintln!("# config {value}");
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            eprintln!("# wrote {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_risk(args: &RiskArgs) -> Result<u8, Error> {
    let privacy = args.privacy.resolve()?;
    let divergences = parse_divergences(&args.div)?;
    let (mut c1, c2) = match (args.k, args.gamma, args.c1, args.c2) {
        (Some(k), None, None, None) => (0.0, k as f64),
        (None, Some(g), None, None) => (1.0 / g as f64, g as f64),
        (None, None, Some(c1), Some(c2)) => (c1, c2),
        _ => {
            return Err(Error::Config(
                "choose exactly one of --k, --gamma, or --c1/--c2".into(),
            ))
        }
    };
    if args.widen {
        c1 = widen_c1_to_integral(c1, c2)?;
    }
    let config = json!({
        "command": "risk",
        "privacy": privacy,
        "c1": c1,
        "c2": c2,
        "local": args.local,
        "nonlinear": args.nonlinear,
        "divergences": args.div,
        "format": args.format,
    });
    echo_config(&config);

    let mut reports: Vec<RiskReport> = Vec::new();
    for f in divergences {
        let report = if args.nonlinear {
            let gamma = args
                .gamma
                .ok_or_else(|| Error::Config("--nonlinear needs --gamma".into()))?;
            match privacy {
                TradeoffFunction::PureLdp { epsilon } => local_risk_pure(gamma, epsilon, f)?,
                _ => {
                    return Err(Error::Config(
                        "the non-linear sampler exists only under pure privacy".into(),
                    ))
                }
            }
        } else {
            minimax_risk(c1, c2, &privacy, f)?
        };
        reports.push(report);
    }

    let trivial = reports.iter().all(|r| r.trivial);
    let body = match args.format.as_str() {
        "json" => {
            let mut v = serde_json::to_value(&reports)?;
            if let serde_json::Value::Array(items) = &mut v {
                for item in items {
                    item["config"] = config.clone();
                }
            }
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        "text" => {
            let mut s = String::from(
                "divergence  lambda_star     r1            r2            risk            trivial\n",
            );
            for r in &reports {
                s.push_str(&format!(
                    "{:<10}  {:<14.10}  {:<12.8}  {:<12.8}  {:<14.10}  {}\n",
                    r.divergence.name(),
                    r.lambda_star,
                    r.r1,
                    r.r2,
                    r.risk,
                    r.trivial
                ));
            }
            s
        }
        other => return Err(Error::Config(format!("unknown format {other}"))),
    };
    write_or_print(&args.out, &body)?;
    if trivial {
        eprintln!("# triviality regime: the identity sampler is already private (risk 0)");
        return Ok(2);
    }
    Ok(0)
}

enum InputDist {
    Pmf(DiscretePmf),
    Mixture(LaplaceMixture),
}

fn read_input(path: &PathBuf) -> Result<InputDist, Error> {
    let raw = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&raw)?;
    if value.get("probs").is_some() {
        #[derive(serde::Deserialize)]
        struct PmfFile {
            probs: Vec<f64>,
        }
        let parsed: PmfFile = serde_json::from_value(value)?;
        Ok(InputDist::Pmf(DiscretePmf::new(parsed.probs)?))
    } else {
        let parsed: LaplaceMixture = serde_json::from_value(value)?;
        // Re-validate through the constructor.
        Ok(InputDist::Mixture(LaplaceMixture::new(
            parsed.dim,
            parsed.scale,
            parsed.weights,
            parsed.means,
        )?))
    }
}

fn cmd_sample(args: &SampleArgs) -> Result<u8, Error> {
    let privacy = args.privacy.resolve()?;
    let input = read_input(&args.input)?;

    let universe = |reference: ReferenceDist| -> Result<UniverseSpec, Error> {
        match (args.gamma, args.c1, args.c2) {
            (Some(g), None, None) => Neighborhood::new(reference, g)?.as_universe(),
            (None, Some(c1), Some(c2)) => UniverseSpec::new(c1, c2, reference),
            _ => Err(Error::Config(
                "choose exactly one of --gamma or --c1/--c2".into(),
            )),
        }
    };

    let epsilon_for_clip = match privacy {
        TradeoffFunction::PureLdp { epsilon } => Some(epsilon),
        _ => None,
    };
    if args.nonlinear && epsilon_for_clip.is_none() {
        return Err(Error::Config(
            "the non-linear sampler exists only under pure privacy".into(),
        ));
    }

    let config = json!({
        "command": "sample",
        "input": args.input.display().to_string(),
        "privacy": privacy,
        "gamma": args.gamma,
        "c1": args.c1,
        "c2": args.c2,
        "nonlinear": args.nonlinear,
        "count": args.count,
        "seed": args.seed,
    });
    echo_config(&config);

    let (output, grid): (SamplerOutput, Option<QuadratureConfig>) = match &input {
        InputDist::Pmf(p) => {
            let reference = ReferenceDist::Discrete {
                pmf: DiscretePmf::uniform(p.len())?,
            };
            let u = universe(reference)?;
            let out = if args.nonlinear {
                ClipSampler::new(u, epsilon_for_clip.unwrap())?.apply_pmf(p)?
            } else {
                LinearSampler::minimax(u, privacy)?.apply_pmf(p)?
            };
            (out, None)
        }
        InputDist::Mixture(m) => {
            let scale = args.ref_scale.unwrap_or(m.scale);
            let reference = ReferenceDist::Continuous {
                mixture: LaplaceMixture::reference(m.dim, scale)?,
            };
            let points = args
                .grid_points
                .unwrap_or(if m.dim == 1 { 4096 } else { 512 });
            let grid = QuadratureConfig::symmetric(m.dim, args.grid_half, points)?;
            let u = universe(reference)?;
            let out = if args.nonlinear {
                ClipSampler::new(u, epsilon_for_clip.unwrap())?.apply_mixture(m, &grid)?
            } else {
                LinearSampler::minimax(u, privacy)?.apply_mixture(m, &grid)?
            };
            (out, Some(grid))
        }
    };

    let draws = output.draw(args.seed, args.count);
    let draws_json = match &draws {
        Draws::Indices(v) => serde_json::to_value(v)?,
        Draws::Points(v) => serde_json::to_value(v)?,
    };

    let mut chi2_note = serde_json::Value::Null;
    if args.chi2_check {
        if let (Draws::Indices(idx), Some(pmf)) = (&draws, output.as_pmf()) {
            let mut counts = vec![0.0f64; pmf.len()];
            for &i in idx {
                counts[i] += 1.0;
            }
            let n = idx.len() as f64;
            let stat: f64 = counts
                .iter()
                .zip(pmf.probs())
                .filter(|(_, &p)| p > 0.0)
                .map(|(&o, &p)| {
                    let e = p * n;
                    (o - e) * (o - e) / e
                })
                .sum();
            let dof = (pmf.probs().iter().filter(|&&p| p > 0.0).count() - 1) as f64;
            let p_value = chi_square_sf(stat, dof);
            chi2_note = json!({"stat": stat, "dof": dof, "p_value": p_value});
            eprintln!("# chi2 self-test: stat {stat:.4}, dof {dof}, p {p_value:.4}");
            if p_value < 0.01 {
                eprintln!("error: chi2 self-test rejected the draws at the 1% level");
                return Ok(1);
            }
        } else {
            return Err(Error::Config("--chi2-check requires a discrete input".into()));
        }
    }

    let body = format!(
        "{}\n",
        serde_json::to_string_pretty(&json!({
            "config": config,
            "output": output.to_json(grid.as_ref())?,
            "chi2": chi2_note,
            "draws": draws_json,
        }))?
    );
    write_or_print(&args.out, &body)?;
    Ok(0)
}

fn out_dir(args: &ExperimentArgs) -> PathBuf {
    args.out_dir.clone().unwrap_or_else(|| {
        std::env::var_os("LDP_SAMPLER_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("ldp-out"))
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<u8, Error> {
    let dir = out_dir(args);
    fs::create_dir_all(&dir)?;
    let grid_override = args.grid.clone();

    let write_result = |res: &ldp_sampler::experiments::ExperimentResult| -> Result<(), Error> {
        echo_config(&res.config);
        let csv_path = dir.join(format!("{}.csv", res.experiment_id));
        fs::write(&csv_path, res.to_csv())?;
        let json_path = dir.join(format!("{}.json", res.experiment_id));
        fs::write(&json_path, res.to_json()?)?;
        eprintln!("# wrote {} and {}", csv_path.display(), json_path.display());
        Ok(())
    };

    match args.id.as_str() {
        "finite-pure" | "finite-gldp" => {
            let privacy = if args.id == "finite-pure" {
                SweepPrivacy::Pure
            } else {
                SweepPrivacy::Gldp
            };
            let k = args.k.unwrap_or(20);
            let grid = grid_override.unwrap_or_else(SweepPrivacy::default_grid);
            let res = run_finite(privacy, k, &grid, &FDivergence::STANDARD)?;
            write_result(&res)?;
        }
        "laplace1d-pure" | "laplace1d-gldp" | "laplacend-pure" => {
            let mut cfg = match args.id.as_str() {
                "laplace1d-pure" => SweepConfig::paper_1d(SweepPrivacy::Pure, args.seed),
                "laplace1d-gldp" => SweepConfig::paper_1d(SweepPrivacy::Gldp, args.seed),
                _ => SweepConfig::paper_2d(args.seed),
            };
            if let Some(grid) = grid_override {
                cfg.privacy_grid = grid;
            }
            if let Some(clients) = args.clients {
                cfg.clients = clients;
            }
            if let Some(points) = args.points {
                cfg.quadrature.points_per_axis = points;
            }
            if let Some(half) = args.half_width {
                cfg.quadrature.bounds_per_axis = vec![(-half, half); cfg.dim];
            }
            let res = run_laplace_sweep(&cfg)?;
            write_result(&res)?;
        }
        "visual" => {
            let mut cfg = VisualConfig {
                seed: args.seed,
                ..VisualConfig::default()
            };
            if let Some(points) = args.points {
                cfg.solve_points = points;
            }
            if let Some(half) = args.half_width {
                cfg.solve_half = half;
            }
            let res = run_visual(&cfg)?;
            echo_config(&res.config);
            for grid in &res.grids {
                let path = dir.join(format!("visual-{}.csv", grid.name));
                fs::write(&path, grid.to_csv(cfg.seed))?;
                eprintln!("# wrote {}", path.display());
            }
            let json_path = dir.join("visual.json");
            fs::write(
                &json_path,
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "config": res.config,
                        "grids": res.grids.iter().map(|g| json!({
                            "name": g.name,
                            "points": g.points,
                            "half_width": g.half_width,
                            "mass_on_solve_grid": g.mass_on_solve_grid,
                        })).collect::<Vec<_>>(),
                    }))?
                ),
            )?;
            eprintln!("# wrote {}", json_path.display());
        }
        other => {
            return Err(Error::Config(format!(
                "unknown experiment id {other}; expected finite-pure, finite-gldp, \
                 laplace1d-pure, laplace1d-gldp, laplacend-pure, visual"
            )))
        }
    }
    Ok(0)
}

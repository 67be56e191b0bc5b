use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use loewner_cli::pipeline::{self, Input, RunConfig, Tolerances};
use loewner_cli::spec::{Record, Spec};
use loewner_core::criteria::GridSpec;

/// Univalence criteria, Loewner chains and quasiconformal extensions.
#[derive(Parser)]
#[command(name = "loewner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a criterion, then verify its chain, extension bound and univalence.
    Check(CheckArgs),
    /// Verify the Loewner chain conditions on a grid of points and times.
    Chain(ChainArgs),
    /// Sample the Beltrami coefficient of the Becker extension.
    Extend(ExtendArgs),
    /// Re-render plots from the output directory of an earlier run.
    Plot(PlotArgs),
    /// Reparametrize a chain to a standard one and report h'(0, t).
    Normalize(NormalizeArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Spec files (`key = value` records); flags below override their values.
    specs: Vec<PathBuf>,
    /// Function shorthand: identity, koebe, half-plane, spiral-koebe:α, polynomial:c0,c1,…, series:c0,c1,…
    #[arg(long = "fn", value_name = "NAME[:PARAMS]")]
    function: Option<String>,
    /// Criterion kind: convexity, spirallike, spiral, starlike, bazilevic1, bazilevic2, sheil-small.
    #[arg(long)]
    kind: Option<String>,
    /// Chain variant: convex-combination, spirallike, exponential, sheil-small, bazilevic-integral.
    #[arg(long)]
    variant: Option<String>,
    /// α (complex for the convex-combination chain, real otherwise).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Exponent c of the exponential chain e^{ct} f.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Starlike g of a Bazilevič pair.
    #[arg(long)]
    g: Option<String>,
    /// Coefficients of h for a Bazilevič pair, from z^0 up.
    #[arg(long, allow_hyphen_values = true)]
    h_coeffs: Option<String>,
    /// Series truncation order.
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    /// Largest sampled radius (< 1).
    #[arg(long)]
    r_max: Option<f64>,
    /// Angles per circle.
    #[arg(long)]
    angles: Option<usize>,
    /// Local refinement factor around the extremum (1 disables refinement).
    #[arg(long)]
    refinement: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for reports, samples and plots.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit SVG plots (needs --out).
    #[arg(long)]
    plots: bool,
    /// Chain times, comma separated.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Offset of the low-discrepancy sequence used by the univalence oracle.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count of the univalence oracle.
    #[arg(long, default_value_t = 4000)]
    samples: usize,
    /// Allowed excess of sup |μ| over the criterion's k.
    #[arg(long, default_value_t = 1e-9)]
    bound_tol: f64,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Also require p(z, t) ∈ U(k).
    #[arg(long)]
    disk_k: Option<f64>,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Exterior radii, comma separated (each >= 1).
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Angles per exterior circle.
    #[arg(long)]
    angles: Option<usize>,
    /// Boundary radius ρ in (0, 1]: the extension glues f(ρ z/|z|, log|z|).
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Angular half-width skipped around boundary singularities.
    #[arg(long)]
    exclusion: Option<f64>,
    /// Fail unless sup |μ| <= k (plus --bound-tol).
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    bound_tol: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// Output directory of an earlier `chain`, `extend` or `check --plots` run.
    #[arg(long)]
    from: PathBuf,
    /// Where to write the plots (defaults to --from).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    times: Vec<f64>,
    /// Radius of the image curves.
    #[arg(long, default_value_t = 0.95)]
    radius: f64,
}

#[derive(Args)]
struct NormalizeArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Time of the standard chain.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SpecArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut o = Vec::new();
        let mut put = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                o.push((k, v.clone()));
            }
        };
        put("function", &self.function);
        put("kind", &self.kind);
        put("variant", &self.variant);
        put("alpha", &self.alpha);
        put("beta", &self.beta);
        put("c", &self.c);
        put("g", &self.g);
        put("h_coeffs", &self.h_coeffs);
        if let Some(n) = self.order {
            o.push(("order", n.to_string()));
        }
        o
    }

    fn inputs(&self) -> Result<Vec<Input>> {
        let apply = |mut rec: Record| -> Result<Spec> {
            for (k, v) in self.overrides() {
                if k == "function" {
                    rec.remove("coeffs");
                }
                rec.set(k, v);
            }
            Spec::from_record(rec)
        };
        if self.specs.is_empty() {
            let spec = apply(Record::default())?;
            return Ok(vec![Input {
                name: "check".into(),
                spec,
            }]);
        }
        let mut inputs = Vec::new();
        for path in &self.specs {
            let rec = Record::read(path)?;
            let spec = apply(rec).with_context(|| format!("in {}", path.display()))?;
            let name = path.file_stem().map_or_else(
                || format!("spec{}", inputs.len()),
                |s| s.to_string_lossy().into_owned(),
            );
            if inputs.iter().any(|i: &Input| i.name == name) {
                bail!("two spec files share the name '{name}'");
            }
            inputs.push(Input { name, spec });
        }
        Ok(inputs)
    }
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec> {
        let base = GridSpec::default();
        let angles = self.angles.unwrap_or(base.angles_per_circle());
        let refinement = match self.refinement {
            Some(1) => None,
            Some(n) => Some(n),
            None => base.refinement(),
        };
        Ok(match self.r_max {
            Some(r) => {
                if !(r > 0.0 && r < 1.0) {
                    bail!("--r-max must lie in (0, 1), found {r}");
                }
                GridSpec::up_to(r, angles, refinement)?
            }
            None => GridSpec::new(base.radii().to_vec(), angles, refinement)?,
        })
    }
}

fn config(spec: &SpecArgs, output: Option<&OutputArgs>) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(spec.inputs().context("stage 'spec' failed")?);
    if let Some(o) = output {
        cfg.out_dir = o.out.clone();
        cfg.plots = o.plots;
        if o.plots && o.out.is_none() {
            bail!("stage 'spec' failed: --plots needs --out");
        }
        if let Some(t) = &o.times {
            if t.is_empty() || t.iter().any(|t| !(*t >= 0.0)) {
                bail!("stage 'spec' failed: times must be non-negative");
            }
            cfg.times = t.clone();
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<pipeline::Outcome> {
    match cli.command {
        Command::Check(a) => {
            let mut cfg = config(&a.spec, Some(&a.output))?;
            cfg.grid = a.grid.grid().context("stage 'spec' failed")?;
            cfg.seed = a.seed;
            cfg.oracle_samples = a.samples;
            cfg.tolerances.bound = a.bound_tol;
            pipeline::run_check(&cfg)
        }
        Command::Chain(a) => {
            let mut cfg = config(&a.spec, Some(&a.output))?;
            cfg.grid = a.grid.grid().context("stage 'spec' failed")?;
            pipeline::run_chain(&cfg, a.disk_k)
        }
        Command::Extend(a) => {
            let mut cfg = config(&a.spec, Some(&a.output))?;
            if let Some(r) = a.radii {
                cfg.radii = r;
            }
            if let Some(n) = a.angles {
                cfg.angles = n;
            }
            cfg.rho = a.rho;
            cfg.tolerances = Tolerances {
                bound: a.bound_tol,
                exclusion: a.exclusion.unwrap_or(cfg.tolerances.exclusion),
            };
            pipeline::run_extend(&cfg, a.k)
        }
        Command::Normalize(a) => {
            let mut cfg = config(&a.spec, None)?;
            cfg.out_dir = a.out;
            pipeline::run_normalize(&cfg, a.t)
        }
        Command::Plot(a) => {
            let out = a.out.unwrap_or_else(|| a.from.clone());
            if !(a.radius > 0.0 && a.radius < 1.0) {
                bail!("stage 'spec' failed: --radius must lie in (0, 1)");
            }
            pipeline::run_plot(&a.from, &out, &a.times, a.radius)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|outcome| outcome.write().map(|_| outcome)) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

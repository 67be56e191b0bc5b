//! The `check`, `chain`, `extend`, `plot` and `normalize` pipelines.
//!
//! Every pipeline is a pure function from its configuration to an
//! [`Outcome`]: the rendered report plus the files to write. The caller does
//! all writing from one thread, so output never depends on scheduling.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use loewner_core::chains::{normalize_chain, verify_chain, DEFAULT_TIMES};
use loewner_core::criteria::{evaluate_criterion, CriterionKind, GridSpec, Subject};
use loewner_core::extension::{
    describe_sample, DilatationReport, DEFAULT_ANGLES, DEFAULT_EXCLUSION, DEFAULT_RADII,
};
use loewner_core::functions::bazilevic_construct;
use loewner_core::oracle::{describe_witness, univalence_scan, DEFAULT_CONTOUR_POINTS};
use loewner_core::report::{fmt_complex, Document};
use loewner_core::{AnalyticFunction, BeckerExtension, ChainReport, DiskSpec, LoewnerChain};

use crate::plot;
use crate::spec::Spec;

pub const SPEC_FILE: &str = "input.spec";
pub const SAMPLES_FILE: &str = "mu_samples.csv";
pub const CURVES_FILE: &str = "curves.svg";
pub const MU_FILE: &str = "mu.svg";

/// A spec together with the name its report is filed under.
#[derive(Debug, Clone)]
pub struct Input {
    pub name: String,
    pub spec: Spec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed excess of `sup |μ|` over the criterion's minimal dilatation.
    pub bound: f64,
    /// Half-width of the angular window skipped around boundary singularities.
    pub exclusion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            bound: 1e-9,
            exclusion: DEFAULT_EXCLUSION,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<Input>,
    pub grid: GridSpec,
    pub out_dir: Option<PathBuf>,
    pub plots: bool,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub oracle_samples: usize,
    pub times: Vec<f64>,
    /// Exterior radii and angles of the extension samples.
    pub radii: Vec<f64>,
    pub angles: usize,
    /// Boundary radius `ρ` of the extension (1 samples the true boundary).
    pub rho: f64,
    /// Radius of the image curves in plots.
    pub curve_radius: f64,
}

impl RunConfig {
    pub fn new(inputs: Vec<Input>) -> Self {
        Self {
            inputs,
            grid: GridSpec::default(),
            out_dir: None,
            plots: false,
            tolerances: Tolerances::default(),
            seed: 0,
            oracle_samples: 4000,
            times: DEFAULT_TIMES.to_vec(),
            radii: DEFAULT_RADII.to_vec(),
            angles: DEFAULT_ANGLES,
            rho: 1.0,
            curve_radius: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerances.bound > 0.0 && self.tolerances.exclusion > 0.0) {
            bail!("tolerances must be positive");
        }
        if !(self.grid.r_max() < 1.0) {
            bail!("r_max must be below 1");
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            bail!("boundary radius must lie in (0, 1]");
        }
        if !(self.curve_radius > 0.0 && self.curve_radius < 1.0) {
            bail!("curve radius must lie in (0, 1)");
        }
        if self.oracle_samples < 2 {
            bail!("the oracle needs at least two samples");
        }
        Ok(())
    }

    fn file(&self, name: &str) -> Option<PathBuf> {
        self.out_dir.as_ref().map(|d| d.join(name))
    }
}

/// Rendered report, files to write, and the verdict.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub passed: bool,
}

impl Outcome {
    pub fn write(&self) -> Result<()> {
        for (path, bytes) in &self.files {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.with_context(|| format!("stage '{name}' failed"))
}

fn core<T>(r: loewner_core::Result<T>) -> Result<T> {
    r.map_err(anyhow::Error::from)
}

fn describe_input(doc: &mut Document, input: &Input) {
    doc.section("input").text("name", input.name.clone());
    for line in input.spec.record.render().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            doc.text(&format!("spec_{k}"), v);
        }
    }
}

/// The function whose univalence the oracle probes.
fn oracle_subject(
    kind: &CriterionKind,
    subject: &Subject,
    chain: Option<&LoewnerChain>,
    order: usize,
) -> Result<AnalyticFunction> {
    if let Some(ch) = chain {
        return Ok(ch.subject().clone());
    }
    match (subject, *kind) {
        (Subject::Function(f), _) => Ok(f.clone()),
        (Subject::Pair { g, h }, CriterionKind::Bazilevic2 { alpha, beta }) => {
            core(bazilevic_construct(g, h, alpha, beta, order))
        }
        (Subject::Pair { .. }, k) => Err(anyhow!("{} needs a single function", k.name())),
    }
}

fn chain_witness(rep: &ChainReport) -> String {
    if let Some(v) = rep.subordination_violations.first() {
        return format!(
            "subordination: f({} e^(i{}), {}) = {} has no preimage at time {}",
            rep.grid.r_max().min(0.9),
            v.theta,
            v.s,
            fmt_complex(v.target),
            v.t
        );
    }
    let (z, t, p) = rep.herglotz_witness;
    format!("herglotz: p({}, {t}) = {}", fmt_complex(z), fmt_complex(p))
}

/// Criterion, matching chain, extension bound and univalence oracle for one spec.
fn check_one(cfg: &RunConfig, input: &Input) -> Result<Outcome> {
    let spec = &input.spec;
    let mut doc = Document::new();
    describe_input(&mut doc, input);
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut files = Vec::new();

    let kind = stage("spec", spec.criterion())?;
    let crit = stage(
        "criterion",
        core(evaluate_criterion(&kind, &spec.subject, &cfg.grid)),
    )?;
    doc.append(&crit.to_document());
    if !crit.passed {
        failures.push((
            "criterion".into(),
            format!(
                "z = {} (quantity {})",
                fmt_complex(crit.worst_point),
                fmt_complex(crit.worst_quantity)
            ),
        ));
    }

    let chain = if crit.passed {
        stage(
            "chain",
            core(LoewnerChain::for_criterion(
                &kind,
                &spec.subject,
                spec.order,
            )),
        )?
    } else {
        None
    };
    if let Some(ch) = &chain {
        let rep = stage("chain", core(verify_chain(ch, &cfg.grid, &cfg.times, None)))?;
        doc.append(&rep.to_document());
        if !rep.passed() {
            failures.push(("chain".into(), chain_witness(&rep)));
        }
        if let Some(k) = crit.min_dilatation {
            let ext = stage(
                "extension",
                core(
                    BeckerExtension::new(ch.clone())
                        .with_boundary_radius(cfg.grid.r_max())
                        .and_then(|e| e.with_exclusion_window(cfg.tolerances.exclusion)),
                ),
            )?;
            let dil = stage(
                "extension",
                core(ext.dilatation_report(&cfg.radii, cfg.grid.angles_per_circle())),
            )?;
            doc.append(&dil.to_document());
            let holds = dil.sup_modulus <= k + cfg.tolerances.bound;
            doc.section("bound")
                .real("criterion_k", k)
                .real("sup_mu", dil.sup_modulus)
                .real("tolerance", cfg.tolerances.bound)
                .flag("holds", holds);
            if !holds {
                failures.push(("bound".into(), describe_sample(&dil.worst)));
            }
            if cfg.plots {
                files.extend(sample_files(cfg, &dil, &input.name)?);
            }
        }
        if cfg.plots {
            if let Some(path) = cfg.file(&format!("{}.{CURVES_FILE}", input.name)) {
                let svg = stage(
                    "plot",
                    plot::curves_svg(ch, &plot_times(&cfg.times), cfg.curve_radius, 720),
                )?;
                files.push((path, svg.into_bytes()));
            }
        }
    }

    let f = stage(
        "oracle",
        oracle_subject(&kind, &spec.subject, chain.as_ref(), spec.order),
    )?;
    let r_oracle = cfg.grid.r_max().min(0.99);
    let verdict = stage(
        "oracle",
        core(univalence_scan(
            &f,
            r_oracle,
            cfg.oracle_samples,
            DEFAULT_CONTOUR_POINTS,
            cfg.seed,
        )),
    )?;
    doc.append(&verdict.to_document());
    if verdict.falsified {
        let w = verdict
            .witness
            .map_or_else(|| "no witness pair".to_string(), |w| describe_witness(&w));
        failures.push(("oracle".into(), w));
    }

    let passed = failures.is_empty();
    doc.section("summary").flag("passed", passed);
    if let Some((stage_name, witness)) = failures.first() {
        doc.text("failed_stage", stage_name.clone())
            .text("witness", witness.clone());
    }
    for (i, (stage_name, witness)) in failures.iter().enumerate().skip(1) {
        doc.text(
            &format!("also_failed_{i}"),
            format!("{stage_name}: {witness}"),
        );
    }
    let report = doc.render();
    if let Some(path) = cfg.file(&format!("{}.report", input.name)) {
        files.push((path, report.clone().into_bytes()));
    }
    Ok(Outcome {
        report,
        files,
        passed,
    })
}

fn mu_title(chain: Option<&str>) -> String {
    match chain {
        Some(label) => format!("|mu| of the extension of {label}"),
        None => "|mu| on the exterior annulus".to_string(),
    }
}

fn plot_times(times: &[f64]) -> Vec<f64> {
    // Curves for late times dwarf the early ones; keep those up to t = 1.
    let early: Vec<f64> = times.iter().copied().filter(|t| *t <= 1.0).collect();
    if early.is_empty() {
        times[..1].to_vec()
    } else {
        early
    }
}

fn sample_files(
    cfg: &RunConfig,
    dil: &DilatationReport,
    prefix: &str,
) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut csv = Vec::new();
    dil.write_csv(&mut csv)?;
    let name = |f: &str| {
        if prefix.is_empty() {
            f.to_string()
        } else {
            format!("{prefix}.{f}")
        }
    };
    if cfg.plots {
        let rows = plot::read_mu_csv(std::str::from_utf8(&csv)?)?;
        if let Some(p) = cfg.file(&name(MU_FILE)) {
            out.push((
                p,
                plot::mu_svg(&rows, &mu_title(Some(&dil.chain)))?.into_bytes(),
            ));
        }
    }
    if let Some(p) = cfg.file(&name(SAMPLES_FILE)) {
        out.push((p, csv));
    }
    Ok(out)
}

fn merge(outcomes: Vec<Outcome>) -> Outcome {
    let mut all = Outcome {
        passed: true,
        ..Outcome::default()
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        if i > 0 {
            all.report.push('\n');
        }
        all.report.push_str(&o.report);
        all.files.extend(o.files);
        all.passed &= o.passed;
    }
    all
}

pub fn run_check(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let outcomes = cfg
        .inputs
        .iter()
        .map(|i| check_one(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(outcomes))
}

fn single(cfg: &RunConfig) -> Result<&Input> {
    match cfg.inputs.as_slice() {
        [one] => Ok(one),
        _ => bail!("this command takes exactly one spec"),
    }
}

fn spec_file(cfg: &RunConfig, input: &Input) -> Option<(PathBuf, Vec<u8>)> {
    cfg.file(SPEC_FILE)
        .map(|p| (p, input.spec.record.render().into_bytes()))
}

pub fn run_chain(cfg: &RunConfig, disk_k: Option<f64>) -> Result<Outcome> {
    cfg.validate()?;
    let input = single(cfg)?;
    let ch = stage("chain", input.spec.chain())?;
    let disk = disk_k
        .map(DiskSpec::untilted)
        .transpose()
        .map_err(anyhow::Error::from);
    let disk = stage("chain", disk)?;
    let rep = stage(
        "chain",
        core(verify_chain(&ch, &cfg.grid, &cfg.times, disk.as_ref())),
    )?;
    let mut doc = Document::new();
    describe_input(&mut doc, input);
    doc.append(&rep.to_document());
    let passed = rep.passed();
    doc.section("summary").flag("passed", passed);
    if !passed {
        doc.text("failed_stage", "chain")
            .text("witness", chain_witness(&rep));
    }
    let report = doc.render();
    let mut files: Vec<_> = spec_file(cfg, input).into_iter().collect();
    if let Some(p) = cfg.file("chain.report") {
        files.push((p, report.clone().into_bytes()));
    }
    if cfg.plots {
        if let Some(p) = cfg.file(CURVES_FILE) {
            files.push((
                p,
                stage(
                    "plot",
                    plot::curves_svg(&ch, &plot_times(&cfg.times), cfg.curve_radius, 720),
                )?
                .into_bytes(),
            ));
        }
    }
    Ok(Outcome {
        report,
        files,
        passed,
    })
}

pub fn run_extend(cfg: &RunConfig, k_bound: Option<f64>) -> Result<Outcome> {
    cfg.validate()?;
    let input = single(cfg)?;
    let ch = stage("chain", input.spec.chain())?;
    let ext = stage(
        "extension",
        core(
            BeckerExtension::new(ch.clone())
                .with_boundary_radius(cfg.rho)
                .and_then(|e| e.with_exclusion_window(cfg.tolerances.exclusion)),
        ),
    )?;
    let dil = stage(
        "extension",
        core(ext.dilatation_report(&cfg.radii, cfg.angles)),
    )?;
    let mut doc = Document::new();
    describe_input(&mut doc, input);
    doc.append(&dil.to_document());
    let passed = match k_bound {
        Some(k) => {
            let holds = dil.sup_modulus <= k + cfg.tolerances.bound;
            doc.section("bound")
                .real("k", k)
                .real("sup_mu", dil.sup_modulus)
                .real("tolerance", cfg.tolerances.bound)
                .flag("holds", holds);
            holds
        }
        None => dil.sup_modulus < 1.0,
    };
    doc.section("summary").flag("passed", passed);
    if !passed {
        doc.text("failed_stage", "extension")
            .text("witness", describe_sample(&dil.worst));
    }
    let report = doc.render();
    let mut files: Vec<_> = spec_file(cfg, input).into_iter().collect();
    if let Some(p) = cfg.file("extension.report") {
        files.push((p, report.clone().into_bytes()));
    }
    files.extend(sample_files(cfg, &dil, "")?);
    if cfg.plots {
        if let Some(p) = cfg.file(CURVES_FILE) {
            files.push((
                p,
                stage(
                    "plot",
                    plot::curves_svg(&ch, &plot_times(&cfg.times), cfg.curve_radius, 720),
                )?
                .into_bytes(),
            ));
        }
    }
    Ok(Outcome {
        report,
        files,
        passed,
    })
}

pub fn run_normalize(cfg: &RunConfig, t: f64) -> Result<Outcome> {
    cfg.validate()?;
    let input = single(cfg)?;
    let ch = stage("chain", input.spec.chain())?;
    let n = stage("normalize", core(normalize_chain(&ch, t)))?;
    let d = stage("normalize", core(n.derivative_at_origin()))?;
    let mut doc = Document::new();
    describe_input(&mut doc, input);
    doc.append(&n.to_document());
    let err = (d - t.exp()).norm();
    let passed = err <= 1e-10 * t.exp();
    doc.section("summary")
        .real("standard_error", err)
        .flag("passed", passed);
    let report = doc.render();
    let files = cfg
        .file("normalize.report")
        .map(|p| (p, report.clone().into_bytes()))
        .into_iter()
        .collect();
    Ok(Outcome {
        report,
        files,
        passed,
    })
}

/// Re-renders the plots of a previous `chain`, `extend` or `check --plots`
/// run found in `from`.
pub fn run_plot(from: &Path, out: &Path, times: &[f64], curve_radius: f64) -> Result<Outcome> {
    let spec_path = from.join(SPEC_FILE);
    let samples_path = from.join(SAMPLES_FILE);
    let has_spec = spec_path.is_file();
    let has_samples = samples_path.is_file();
    if !has_spec && !has_samples {
        bail!(
            "stage 'artifact' failed: {} holds neither {SPEC_FILE} nor {SAMPLES_FILE}",
            from.display()
        );
    }
    let mut doc = Document::new();
    doc.section("plot")
        .text("source", from.display().to_string());
    let mut files = Vec::new();
    let mut label = None;
    if has_spec {
        let record = crate::spec::Record::read(&spec_path)?;
        let spec = stage("spec", Spec::from_record(record))?;
        let ch = stage("chain", spec.chain())?;
        let svg = stage("plot", plot::curves_svg(&ch, times, curve_radius, 720))?;
        label = Some(ch.label());
        doc.text("curves", CURVES_FILE)
            .reals("times", times)
            .real("curve_radius", curve_radius);
        files.push((out.join(CURVES_FILE), svg.into_bytes()));
    }
    if has_samples {
        let text = std::fs::read_to_string(&samples_path)
            .with_context(|| format!("reading {}", samples_path.display()))?;
        let rows = stage("artifact", plot::read_mu_csv(&text))?;
        let svg = plot::mu_svg(&rows, &mu_title(label.as_deref()))?;
        doc.text("heat_map", MU_FILE).integer("samples", rows.len());
        files.push((out.join(MU_FILE), svg.into_bytes()));
        if out.join(SAMPLES_FILE) != samples_path {
            files.push((out.join(SAMPLES_FILE), text.into_bytes()));
        }
    }
    Ok(Outcome {
        report: doc.render(),
        files,
        passed: true,
    })
}

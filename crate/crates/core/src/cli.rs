//! Command-line front end.
//!
//! Every subcommand fills a [`RunReport`] and prints it as plain text, or
//! as JSON with `--json`. Exit codes: 0 when every verdict passes, 1 when a
//! verification fails, 2 on argument errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{self, OverlapParams};
use crate::error::{Error, Result};
use crate::ontic::{self, Label, OnticModel, EQUIVALENT_PAIRS, STRUCTURAL_TOL};
use crate::quantum::{self, NoiseLevel, EQUIVALENCE_PAIRS};
use crate::scan::{self, CMode, CurveSeries, ErrMode, Mode};

#[derive(Debug, Parser)]
#[command(
    name = "nc-cloning",
    version,
    about = "Quantum versus noncontextual bounds for state-dependent cloning"
)]
pub struct Cli {
    /// Print the whole report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ModeArgs {
    #[arg(long, default_value = "thm2-direct")]
    pub err_mode: ErrMode,
    #[arg(long, default_value = "observed-confusability")]
    pub c_mode: CMode,
}

impl From<ModeArgs> for Mode {
    fn from(m: ModeArgs) -> Self {
        Mode::new(m.err_mode, m.c_mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum fidelity and every noncontextual bound at one overlap.
    Bounds {
        #[arg(long, value_parser = unit_interval)]
        c: f64,
        #[arg(long, value_parser = unit_interval)]
        v: Option<f64>,
    },
    /// Optimize the clones numerically and compare with the closed form.
    Clones {
        #[arg(long, value_parser = unit_interval)]
        c: f64,
    },
    /// Simulate the depolarized experiment and tabulate its statistics.
    Noise {
        #[arg(long, value_parser = unit_interval)]
        v: f64,
        #[arg(long, value_parser = unit_interval)]
        c: f64,
    },
    /// Range of overlaps with a quantum advantage at fixed noise.
    Region {
        #[arg(long, value_parser = unit_interval)]
        v: f64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Largest noise level that keeps the quantum advantage.
    CriticalNoise {
        #[arg(long, value_parser = unit_interval)]
        c: f64,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Write tradeoff and noise-resistance data files.
    Curves {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 500, value_parser = point_count)]
        points: usize,
    },
    /// Build the saturating noncontextual model and run every check on it.
    VerifyOntic {
        #[arg(long, value_parser = unit_interval)]
        c: f64,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Seed of the Monte-Carlo fidelity estimate.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Check equivalences, epsilons and fidelity of the noisy experiment.
    VerifyQuantum {
        #[arg(long, value_parser = unit_interval)]
        v: f64,
        #[arg(long, value_parser = unit_interval)]
        c: f64,
    },
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

fn point_count(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 3 {
        Ok(n)
    } else {
        Err("at least 3 points are needed".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: IndexMap<String, Value>,
    pub outputs: IndexMap<String, Value>,
    pub residuals: IndexMap<String, f64>,
    pub verdicts: IndexMap<String, Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    fn new(command: String) -> Self {
        Self {
            command,
            inputs: IndexMap::new(),
            outputs: IndexMap::new(),
            residuals: IndexMap::new(),
            verdicts: IndexMap::new(),
            warnings: Vec::new(),
            wall_time_ms: None,
        }
    }

    fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.into(), to_value(value));
    }

    fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.into(), to_value(value));
    }

    /// Records `residual` and a pass verdict when it is within `tol`.
    fn check(&mut self, key: &str, residual: f64, tol: f64) {
        self.residuals.insert(key.into(), residual);
        self.verdict(key, residual <= tol);
    }

    fn verdict(&mut self, key: &str, ok: bool) {
        self.verdicts.insert(key.into(), Verdict::from_bool(ok));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|v| *v != Verdict::Fail)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("command: {}\n", self.command);
        let section = |s: &mut String, title: &str, rows: Vec<(String, String)>| {
            if rows.is_empty() {
                return;
            }
            s.push_str(&format!("[{title}]\n"));
            for (k, v) in rows {
                s.push_str(&format!("  {k}: {v}\n"));
            }
        };
        let values = |m: &IndexMap<String, Value>| {
            m.iter()
                .map(|(k, v)| (k.clone(), render_value(v)))
                .collect::<Vec<_>>()
        };
        section(&mut s, "inputs", values(&self.inputs));
        section(&mut s, "outputs", values(&self.outputs));
        section(
            &mut s,
            "residuals",
            self.residuals
                .iter()
                .map(|(k, v)| (k.clone(), format!("{v:e}")))
                .collect(),
        );
        section(
            &mut s,
            "verdicts",
            self.verdicts
                .iter()
                .map(|(k, v)| (k.clone(), v.as_str().to_string()))
                .collect(),
        );
        section(
            &mut s,
            "warnings",
            self.warnings
                .iter()
                .enumerate()
                .map(|(i, w)| (i.to_string(), w.clone()))
                .collect(),
        );
        if let Some(ms) = self.wall_time_ms {
            s.push_str(&format!("wall_time_ms: {ms:.3}\n"));
        }
        s.push_str(&format!(
            "result: {}\n",
            if self.passed() { "pass" } else { "fail" }
        ));
        s
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values are plain data")
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    if !text.contains("Usage:") {
                        use clap::CommandFactory;
                        let usage = Cli::command().render_usage().to_string();
                        let _ = writeln!(err, "\n{usage}");
                    }
                    2
                }
            };
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .filter(|a| a != "--json" && a != "--timing")
        .collect::<Vec<_>>()
        .join(" ");

    let started = Instant::now();
    let mut report = RunReport::new(echo);
    if let Err(e) = execute(&cli.command, &mut report) {
        let _ = writeln!(err, "error: {e}");
        return match e {
            Error::Domain { .. } | Error::Resolution { .. } => 2,
            _ => 1,
        };
    }
    if cli.timing {
        report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.render_text()
    };
    if out.write_all(text.as_bytes()).is_err() {
        return 1;
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn execute(command: &Command, r: &mut RunReport) -> Result<()> {
    match *command {
        Command::Bounds { c, v } => bounds_report(r, c, v),
        Command::Clones { c } => clones_report(r, c),
        Command::Noise { v, c } => noise_report(r, v, c),
        Command::Region { v, mode } => region_report(r, v, mode.into()),
        Command::CriticalNoise { c, mode } => critical_noise_report(r, c, mode.into()),
        Command::Curves {
            ref out,
            format,
            points,
        } => curves_report(r, out, format, points),
        Command::VerifyOntic {
            c,
            resolution,
            seed,
            samples,
        } => verify_ontic_report(r, c, resolution, seed, samples),
        Command::VerifyQuantum { v, c } => verify_quantum_report(r, v, c),
    }
}

fn bounds_report(r: &mut RunReport, c: f64, v: Option<f64>) -> Result<()> {
    r.input("c", c);
    r.input("v", v);
    let quantum = bounds::quantum_optimal_fidelity(c)?;
    let nc = bounds::nc_bound_ideal(c, c * c)?;
    r.output("quantum_optimal", quantum);
    r.output("noncontextual_ideal", nc);
    r.output(
        "discrimination_ideal",
        bounds::nc_discrimination_bound(c, 0.0)?,
    );
    r.verdict("quantum_at_least_noncontextual", quantum >= nc - 1e-15);
    let Some(v) = v else { return Ok(()) };

    let eb = bounds::depolarizing_epsilons(v)?;
    let observed = bounds::depolarized_overlaps(v, c)?;
    r.output("quantum_noisy", bounds::quantum_noisy_fidelity(v, c)?);
    r.output("epsilons", eb);
    r.output("err_terms", bounds::err_terms(v)?);
    r.output("observed_overlaps", observed);
    r.output(
        "noncontextual_noisy_ideal_overlaps",
        bounds::nc_bound_noisy(&OverlapParams::symmetric(c)?, &eb)?,
    );
    r.output(
        "noncontextual_noisy_observed",
        bounds::nc_bound_noisy(&observed, &eb)?,
    );
    r.output(
        "noncontextual_symmetric_observed",
        bounds::nc_bound_noisy_symmetric(&observed, &eb)?,
    );
    r.output(
        "discrimination_noisy",
        bounds::nc_discrimination_bound(observed.c_ab, eb.eps_b)?,
    );
    let mut per_mode = IndexMap::new();
    for mode in Mode::all() {
        per_mode.insert(mode.to_string(), scan::advantage(v, c, mode)?);
    }
    r.output("advantage_by_mode", per_mode);
    Ok(())
}

fn clones_report(r: &mut RunReport, c: f64) -> Result<()> {
    r.input("c", c);
    let sol = quantum::construct_optimal_clones(c)?;
    let closed = bounds::quantum_optimal_fidelity(c)?;
    r.output("fidelity", sol.fidelity);
    r.output("closed_form", closed);
    r.output("overlap", sol.overlap);
    r.output(
        "alpha",
        sol.alpha
            .amplitudes()
            .iter()
            .map(|z| z.re)
            .collect::<Vec<_>>(),
    );
    r.output(
        "beta",
        sol.beta
            .amplitudes()
            .iter()
            .map(|z| z.re)
            .collect::<Vec<_>>(),
    );
    r.check(
        "fidelity_vs_closed_form",
        (sol.fidelity - closed).abs(),
        1e-7,
    );
    r.check("overlap_constraint", (sol.overlap - c.sqrt()).abs(), 1e-9);
    Ok(())
}

fn noise_report(r: &mut RunReport, v: f64, c: f64) -> Result<()> {
    r.input("v", v);
    r.input("c", c);
    let rec = quantum::simulate_confusabilities(NoiseLevel::new(v)?, c)?;
    r.output("overlaps", rec.overlaps);
    r.output("budget", rec.budget);
    r.output("f_global", rec.f_global);
    r.output("c_a", 1.0 - rec.budget.eps_a);
    r.output("c_aa", 1.0 - rec.budget.eps_aa);
    r.check("o2", rec.o2_residual, 1e-12);
    Ok(())
}

fn region_report(r: &mut RunReport, v: f64, mode: Mode) -> Result<()> {
    r.input("v", v);
    r.input("err_mode", mode.err_mode);
    r.input("c_mode", mode.c_mode);
    let region = scan::violation_interval(v, mode)?;
    r.output("mode", mode.to_string());
    r.output("interval", interval_text(region.c_lo, region.c_hi));
    r.output("c_lo", region.c_lo);
    r.output("c_hi", region.c_hi);
    r.output(
        "observed_interval",
        interval_text(region.observed_lo, region.observed_hi),
    );
    r.output("roots", &region.roots);
    if region.anomaly {
        r.warnings.push(format!(
            "{} separate violating intervals",
            region.roots.len() / 2 + 1
        ));
    }

    let rows = scan::compare_modes(v)?;
    let mut table = IndexMap::new();
    for row in &rows {
        table.insert(
            row.region.mode.to_string(),
            interval_text(row.region.c_lo, row.region.c_hi),
        );
    }
    r.output("all_modes", table);
    let best = &rows[0];
    r.output(
        "reference_interval",
        interval_text(
            Some(scan::REFERENCE_INTERVAL.0),
            Some(scan::REFERENCE_INTERVAL.1),
        ),
    );
    r.output("best_matching_mode", best.region.mode.to_string());
    r.output("best_matching_error", best.error);
    if v == scan::REFERENCE_NOISE {
        r.verdict(
            "reference_interval_within_0.05",
            best.error.is_some_and(|e| e <= 0.05),
        );
    } else {
        r.verdicts
            .insert("reference_interval_within_0.05".into(), Verdict::Skipped);
    }
    Ok(())
}

fn interval_text(lo: Option<f64>, hi: Option<f64>) -> String {
    match (lo, hi) {
        (Some(lo), Some(hi)) => format!("[{lo:.6}, {hi:.6}]"),
        _ => "empty".into(),
    }
}

fn critical_noise_report(r: &mut RunReport, c: f64, mode: Mode) -> Result<()> {
    r.input("c", c);
    r.input("err_mode", mode.err_mode);
    r.input("c_mode", mode.c_mode);
    let cn = scan::critical_noise(c, mode)?;
    r.output("v_star", cn.v_star);
    r.output("monotone_in_v", cn.monotone);
    if !cn.monotone {
        r.warnings
            .push("advantage is not monotone in v; grid fallback used".into());
    }
    let region = scan::violation_interval(cn.v_star, mode)?;
    let boundary = match (region.c_lo, region.c_hi) {
        (Some(lo), Some(hi)) => (lo - c).abs().min((hi - c).abs()),
        _ => f64::INFINITY,
    };
    if boundary.is_finite() {
        r.check("boundary_consistency", boundary, 1e-3);
    } else {
        r.verdicts
            .insert("boundary_consistency".into(), Verdict::Skipped);
    }
    Ok(())
}

fn curves_report(r: &mut RunReport, out: &Path, format: Format, points: usize) -> Result<()> {
    r.input("out", out.display().to_string());
    r.input("format", format!("{format:?}").to_lowercase());
    r.input("points", points);
    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    let grid = scan::unit_grid(points);
    let (quantum, nc) = scan::fidelity_curves(&grid)?;
    let interior_gap = quantum.points[1..points - 1]
        .iter()
        .zip(&nc.points[1..points - 1])
        .map(|(q, n)| q[1] - n[1])
        .fold(f64::INFINITY, f64::min);
    r.verdict("quantum_above_noncontextual", interior_gap > 0.0);

    let mut written = Vec::new();
    let mut write_series = |name: &str, s: &CurveSeries| -> Result<()> {
        let (ext, body) = match format {
            Format::Csv => ("csv", s.to_csv()),
            Format::Json => ("json", s.to_json()),
        };
        let path = out.join(format!("{name}.{ext}"));
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        written.push(path.display().to_string());
        Ok(())
    };
    write_series("tradeoff_quantum", &quantum)?;
    write_series("tradeoff_noncontextual", &nc)?;
    for mode in Mode::all() {
        let curve = scan::noise_resistance_curve(&grid, mode)?;
        write_series(
            &format!("noise_resistance_{}_{}", mode.err_mode, mode.c_mode),
            &curve,
        )?;
    }

    let v_grid: Vec<f64> = scan::unit_grid(51).into_iter().map(|x| 0.05 * x).collect();
    let regions = scan::sweep_regions(&scan::SweepSpec::new(grid, v_grid, Mode::default())?)?;
    let failures = scan::antitonicity_failures(&regions);
    if !failures.is_empty() {
        r.warnings.push(format!(
            "regions not nested between noise levels {failures:?}"
        ));
    }
    r.verdict("regions_antitone", failures.is_empty());
    let (ext, body) = match format {
        Format::Csv => ("csv", scan::regions_to_csv(&regions)),
        Format::Json => (
            "json",
            serde_json::to_string_pretty(&regions).expect("regions serialize"),
        ),
    };
    let path = out.join(format!(
        "regions_{}_{}.{ext}",
        Mode::default().err_mode,
        Mode::default().c_mode
    ));
    fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    written.push(path.display().to_string());
    r.output("files", written);
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Precondition(format!("{}: {e}", path.display()))
}

fn verify_ontic_report(
    r: &mut RunReport,
    c: f64,
    resolution: usize,
    seed: u64,
    samples: usize,
) -> Result<()> {
    r.input("c", c);
    r.input("resolution", resolution);
    r.input("seed", seed);
    r.input("samples", samples);
    let model = ontic::build_saturating_model(c, resolution)?;
    r.warnings.extend(model.warnings.iter().cloned());
    let h = model.input_grid().cell_width();
    r.output("h", h);
    r.output("c_snapped", model.c_ab());

    let o1 = ontic::check_o1(&model, STRUCTURAL_TOL)?;
    r.check("o1", o1.max_residual, STRUCTURAL_TOL);
    let o2 = ontic::check_o2(&model, STRUCTURAL_TOL)?;
    r.check("o2", o2.max_residual, STRUCTURAL_TOL);

    let f_g = model.global_fidelity()?;
    let bound = bounds::nc_bound_ideal(c, c * c)?;
    r.output("f_global", f_g);
    r.output("nc_bound", bound);
    r.check("f_global_vs_bound", (f_g - bound).abs(), 4.0 * h);
    let mc = model.sample_global_fidelity(samples, seed)?;
    r.output("f_global_monte_carlo", mc);
    r.check("monte_carlo_vs_quadrature", (mc - f_g).abs(), 0.01);

    let conf_ab = model.predict(Label::A, Label::B)?;
    let direct = model
        .state(Label::A)
        .mass_where(&model.state(Label::B).support())?;
    r.output("c_ab_model", conf_ab);
    r.check("c_ab_vs_requested", (conf_ab - c).abs(), 2.0 * h);
    r.check("maximal_psi_epistemic", (conf_ab - direct).abs(), 2.0 * h);

    let d_ab = ontic::l1_distance(model.state(Label::A), model.state(Label::B))?;
    r.check(
        "discrimination",
        (0.5 + d_ab / 4.0 - bounds::nc_discrimination_bound(c, 0.0)?).abs(),
        h,
    );

    let product = {
        let n = resolution;
        let mu_b = model.state(Label::B).density();
        let cells = (0..n * n).map(|x| mu_b[x / n] * mu_b[x % n]).collect();
        ontic::EpistemicState::new(model.output_grid(), cells)?
    };
    r.check(
        "beta_is_product",
        model.state(Label::Beta).max_abs_diff(&product)?,
        STRUCTURAL_TOL,
    );

    for pair in EQUIVALENT_PAIRS {
        let s = ontic::verify_sandwich_ideal(&model, pair)?;
        r.check(
            &format!("sandwich_ideal_{}_{}", pair.0.name(), pair.1.name()),
            s.residual,
            s.tolerance,
        );
    }
    let mut worst_margin = f64::INFINITY;
    let mut all_hold = true;
    for w in [0.01, 0.05, 0.1] {
        let mixed = model.mixed_with_uniform(w)?;
        for pair @ (s, s2) in EQUIVALENT_PAIRS {
            let res = ontic::verify_sandwich_noisy(
                &mixed,
                pair,
                mixed.measured_epsilon(s)?,
                mixed.measured_epsilon(s2)?,
            )?;
            all_hold &= res.pass;
            worst_margin = worst_margin.min(res.lower_margin.min(res.upper_margin));
        }
    }
    r.output("sandwich_noisy_worst_margin", worst_margin);
    r.verdict("sandwich_noisy", all_hold);

    let clone = model.clone_map();
    r.verdict(
        "data_processing",
        ontic::dpi_check(clone, model.state(Label::A), model.state(Label::B))?,
    );
    let back = OnticModel::from_json(&model.to_json())?;
    r.verdict(
        "json_round_trip",
        back.to_document() == model.to_document() && back.clone_map() == clone,
    );
    Ok(())
}

fn verify_quantum_report(r: &mut RunReport, v: f64, c: f64) -> Result<()> {
    r.input("v", v);
    r.input("c", c);
    let level = NoiseLevel::new(v)?;
    let ens = quantum::noisy_ensemble(level, c)?;
    if ens.degenerate {
        r.warnings.extend(ens.warnings.iter().cloned());
    }
    for (name, res) in EQUIVALENCE_PAIRS.iter().zip(ens.equivalence_residuals()) {
        r.check(&format!("o2_{}", name.replace(',', "_")), res, 1e-12);
    }
    let rec = quantum::simulate_confusabilities(level, c)?;
    let expected = bounds::depolarizing_epsilons(v)?;
    let names = ["a", "b", "alpha", "beta", "aa", "bb"];
    for ((name, got), want) in names
        .iter()
        .zip(rec.budget.as_array())
        .zip(expected.as_array())
    {
        r.check(&format!("eps_{name}"), (got - want).abs(), 1e-12);
    }
    r.output("budget", rec.budget);
    r.output("c_a", 1.0 - rec.budget.eps_a);
    r.output("c_aa", 1.0 - rec.budget.eps_aa);

    let closed = bounds::quantum_noisy_fidelity(v, c)?;
    r.output("f_global", rec.f_global);
    r.output("f_global_closed_form", closed);
    r.check("f_global", (rec.f_global - closed).abs(), 1e-12);

    let observed = bounds::depolarized_overlaps(v, c)?;
    r.output("overlaps", rec.overlaps);
    r.check(
        "observed_overlaps",
        [
            (rec.overlaps.c_ab - observed.c_ab).abs(),
            (rec.overlaps.c_ba - observed.c_ba).abs(),
            (rec.overlaps.c_aabb - observed.c_aabb).abs(),
            (rec.overlaps.c_bbaa - observed.c_bbaa).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max),
        1e-12,
    );
    Ok(())
}

//! Command-line front end. Every command renders to a string so that the
//! binary only decides where the bytes go.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decoherence::{build_encoding, EncodingKind, NoiseModel, NoiseStudy, SWEEP_CSV_HEADER};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{
    build_graph, enumerate_contexts, independence_number, ofnc_penalty_denominator,
};
use crate::interferometer::{appendix_circuits, PhiBranch};
use crate::ofnc::{epsilon_bound, epsilon_bound_exact, ThresholdProblem, CURVE_CSV_HEADER};
use crate::photonic::{
    beta_from_runs, compatibility_check, make_schedule, run_context, sample, sampled_beta,
    CompatibilityReport, DetectorModel, SampleCounts,
};
use crate::states::builtin_measurements;

#[derive(Debug, Parser)]
#[command(
    name = "ctxlab",
    version,
    about = "Qudit contextuality tests: bounds, precision thresholds, decoherence sweeps and photonic simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Disable the parallel sweeps.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical and quantum bounds of the size-n inequality.
    Bounds(BoundsArgs),
    /// Precision threshold on the beam-splitter transmissions.
    Ofnc(OfncArgs),
    /// β under amplitude or phase damping.
    Decohere(DecohereArgs),
    /// Path/time-delay simulation of one context, or of every context.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    /// Replace the quantum value, e.g. by a measured one.
    #[arg(long = "beta-q")]
    pub beta_q: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OfncArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "beta-q")]
    pub beta_q: Option<f64>,
    /// Fixed φ flags as an integer bit mask (bit k = k-th splitter); default
    /// takes the worst case over all flags.
    #[arg(long)]
    pub phi: Option<u32>,
    /// δ grid for the curve CSV.
    #[arg(long, default_value = "-0.03:0.03:0.0005", allow_hyphen_values = true)]
    pub grid: Grid,
}

#[derive(Debug, Args)]
pub struct DecohereArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long, value_enum)]
    pub encoding: EncodingArg,
    #[arg(long, default_value = "0:1:0.01")]
    pub grid: Grid,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated vertices; the last one is measured without a delay.
    /// Omit to run every context.
    #[arg(long, value_delimiter = ',')]
    pub context: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// φ flags as an integer bit mask, applied to every circuit.
    #[arg(long, default_value_t = 0)]
    pub phi: u32,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Photon loss probability for sampled shots.
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
    /// Dark-click probability per sampled shot.
    #[arg(long, default_value_t = 0.0)]
    pub dark: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Amp,
    Phase,
}

impl From<ModelArg> for NoiseModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Amp => NoiseModel::Amplitude,
            ModelArg::Phase => NoiseModel::Phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EncodingArg {
    Qudit,
    Qubits,
    Symmetric,
}

impl From<EncodingArg> for EncodingKind {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Qudit => EncodingKind::SingleQudit,
            EncodingArg::Qubits => EncodingKind::QubitRegister,
            EncodingArg::Symmetric => EncodingKind::Symmetric,
        }
    }
}

/// `start:stop:step`, inclusive of `stop` when it lies on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let g = Grid {
            start: num(a)?,
            stop: num(b)?,
            step: num(c)?,
        };
        if ![g.start, g.stop, g.step].iter().all(|x| x.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if g.step <= 0.0 || g.stop < g.start {
            return Err("grid needs step > 0 and stop >= start".into());
        }
        if (g.stop - g.start) / g.step > 1e7 {
            return Err("grid has too many points".into());
        }
        Ok(g)
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| {
                let x = self.start + k as f64 * self.step;
                // snap lattice values so 0.1 + 2*0.1 prints as 0.3
                let r = (x / self.step).round() * self.step;
                let snapped = if (x - r).abs() < 1e-9 * self.step {
                    r
                } else {
                    x
                };
                (snapped * 1e12).round() / 1e12
            })
            .collect()
    }
}

impl Cli {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

/// Runs the command and returns the rendered artifact.
pub fn run(cli: &Cli) -> Result<String> {
    let exec = cli.execution();
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(a, cli.format),
        Command::Ofnc(a) => cmd_ofnc(a, cli.format, exec),
        Command::Decohere(a) => cmd_decohere(a, cli.format, exec),
        Command::Simulate(a) => cmd_simulate(a, cli.format, exec),
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn render_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `β_Q` from the override or the built-in vectors, with its exact form if known.
fn quantum_value(n: usize, beta_q: Option<f64>) -> Result<Option<(f64, Option<String>)>> {
    if let Some(b) = beta_q {
        if !b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "--beta-q {b} is not finite"
            )));
        }
        return Ok(Some((b, None)));
    }
    match builtin_measurements(n) {
        Ok(ms) => {
            let exact = ms.exact_beta_quantum();
            let value = match exact {
                Some(r) => *r.numer() as f64 / *r.denom() as f64,
                None => {
                    let rho = ms.state_density();
                    crate::states::vertex_probabilities(&ms, &rho).iter().sum()
                }
            };
            Ok(Some((value, exact.map(|r| r.to_string()))))
        }
        Err(Error::NoBuiltinVectors(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn cmd_bounds(a: &BoundsArgs, format: Format) -> Result<String> {
    if !(5..=12).contains(&a.n) {
        return Err(Error::InvalidArgument(format!(
            "bounds needs 5 <= n <= 12, got {}",
            a.n
        )));
    }
    let graph = build_graph(a.n)?;
    let contexts = enumerate_contexts(&graph);
    let beta_cl = independence_number(&graph)?;
    let denom = ofnc_penalty_denominator(&contexts);
    let quantum = quantum_value(a.n, a.beta_q)?;
    let epsilon = match &quantum {
        Some((b, _)) => Some(epsilon_bound(*b, beta_cl as f64, denom)?.epsilon),
        None => None,
    };
    let epsilon_exact = match (&quantum, a.beta_q) {
        (Some(_), None) => builtin_measurements(a.n)?
            .exact_beta_quantum()
            .map(|b| epsilon_bound_exact(b, beta_cl as i64, denom))
            .transpose()?
            .map(|r| r.to_string()),
        _ => None,
    };
    match format {
        Format::Json => Ok(render_json(&json!({
            "n": a.n,
            "beta_cl": beta_cl,
            "beta_q": quantum.as_ref().map(|q| q.0),
            "beta_q_exact": quantum.as_ref().and_then(|q| q.1.clone()),
            "denominator": denom,
            "epsilon": epsilon,
            "epsilon_exact": epsilon_exact,
            "contexts": contexts.contexts,
        }))),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            render_csv(
                &["n", "beta_cl", "beta_q", "denominator", "epsilon"],
                vec![vec![
                    a.n.to_string(),
                    beta_cl.to_string(),
                    opt(quantum.map(|q| q.0)),
                    denom.to_string(),
                    opt(epsilon),
                ]],
            )
        }
    }
}

pub fn cmd_ofnc(a: &OfncArgs, format: Format, exec: Execution) -> Result<String> {
    let problem = ThresholdProblem::builtin(a.n)?.with_phi(a.phi.map(PhiBranch));
    let graph = build_graph(a.n)?;
    let beta_cl = independence_number(&graph)?;
    let denom = ofnc_penalty_denominator(&enumerate_contexts(&graph));
    let (beta_q, _) = quantum_value(a.n, a.beta_q)?.ok_or(Error::NoBuiltinVectors(a.n))?;
    let bound = epsilon_bound(beta_q, beta_cl as f64, denom)?;
    let threshold = problem.delta_threshold(bound.epsilon, exec)?;
    match format {
        Format::Json => Ok(render_json(&json!({
            "n": a.n,
            "beta_cl": beta_cl,
            "beta_q": beta_q,
            "beta_q_source": if a.beta_q.is_some() { "override" } else { "builtin" },
            "denominator": denom,
            "epsilon": bound.epsilon,
            "phi": a.phi.map_or_else(|| "max".to_string(), |p| p.to_string()),
            "delta_th": threshold.delta_th,
            "binding_vertex": threshold.binding_vertex,
            "binding_branch": threshold.binding_branch,
            "solver_tolerance": threshold.solver_tolerance,
            "max_delta": problem.max_delta(),
        }))),
        Format::Csv => {
            let grid = a.grid.points();
            let curves = problem.distance_curves(&grid, exec)?;
            let mut rows: Vec<(f64, usize, String, f64)> = curves
                .iter()
                .flat_map(|c| {
                    c.samples
                        .iter()
                        .map(move |&(d, x)| (d, c.vertex, c.phi_branch.clone(), x))
                })
                .collect();
            rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            render_csv(
                &CURVE_CSV_HEADER,
                rows.into_iter()
                    .map(|(d, v, b, x)| vec![d.to_string(), v.to_string(), b, x.to_string()])
                    .collect(),
            )
        }
    }
}

pub fn cmd_decohere(a: &DecohereArgs, format: Format, exec: Execution) -> Result<String> {
    let ms = builtin_measurements(a.n)?;
    let kind = EncodingKind::from(a.encoding);
    let model = NoiseModel::from(a.model);
    let enc = build_encoding(kind, ms.dim)?;
    let study = NoiseStudy::new(&ms, &enc, model)?;
    let points = study.epsilon_th_curve(&a.grid.points(), exec)?;
    match format {
        Format::Csv => render_csv(
            &SWEEP_CSV_HEADER,
            points
                .iter()
                .map(|p| {
                    vec![
                        model.name().to_string(),
                        kind.name().to_string(),
                        a.n.to_string(),
                        p.noise_param.to_string(),
                        p.beta.to_string(),
                        p.epsilon_th.to_string(),
                    ]
                })
                .collect(),
        ),
        Format::Json => {
            let threshold = study.threshold(exec)?;
            Ok(render_json(&json!({
                "n": a.n,
                "model": model.name(),
                "encoding": kind.name(),
                "beta_cl": study.beta_classical,
                "denominator": study.denominator,
                "threshold": threshold.threshold,
                "beta_at_threshold": threshold.beta_at_threshold,
                "monotone_on_grid": threshold.monotone_on_grid,
                "crossings": threshold.crossings,
                "sweep": points,
            })))
        }
    }
}

fn fired_map(m: &BTreeMap<usize, f64>) -> Value {
    Value::Object(
        m.iter()
            .map(|(v, p)| (format!("X_{v}=1"), json!(p)))
            .collect(),
    )
}

fn compatibility_json(rep: &CompatibilityReport) -> Value {
    json!({
        "max_tv_distance": rep.max_tv_distance,
        "orderings": rep
            .orderings
            .iter()
            .map(|o| json!({ "order": o.order, "marginals": fired_map(&o.marginals) }))
            .collect::<Vec<_>>(),
    })
}

fn sampled_json(s: &SampleCounts) -> Value {
    let freqs: BTreeMap<String, Option<f64>> = s
        .context
        .iter()
        .map(|&v| (format!("X_{v}=1"), s.frequency(v)))
        .collect();
    let mut v = s.to_json();
    v["frequencies"] = json!(freqs);
    v
}

pub fn cmd_simulate(a: &SimulateArgs, format: Format, exec: Execution) -> Result<String> {
    let ms = builtin_measurements(a.n)?;
    let circuits = appendix_circuits(a.n)?;
    let seed = match (a.shots, a.seed) {
        (0, _) => None,
        (_, Some(s)) => Some(s),
        (_, None) => return Err(Error::InvalidArgument("--shots needs --seed".into())),
    };
    let detector = DetectorModel {
        loss: a.loss,
        dark: a.dark,
    };
    let contexts: Vec<Vec<usize>> = match &a.context {
        Some(c) => vec![c.clone()],
        None => enumerate_contexts(&ms.graph()).contexts,
    };
    let phis: BTreeMap<usize, PhiBranch> = (1..=a.n).map(|v| (v, PhiBranch(a.phi))).collect();

    let mut runs = Vec::new();
    let mut rendered = Vec::new();
    let mut samples = Vec::new();
    for (k, ctx) in contexts.iter().enumerate() {
        let schedule = make_schedule(ctx)?;
        let run = run_context(&ms, ctx, &circuits, a.delta, &phis, &schedule)?;
        let compat = compatibility_check(&ms, ctx, &circuits, a.delta, &phis, &schedule, exec)?;
        let mut v = run.to_json();
        v["compatibility"] = compatibility_json(&compat);
        if let Some(seed) = seed {
            let s = sample(&run, a.shots, seed.wrapping_add(k as u64), detector)?;
            v["sampled"] = sampled_json(&s);
            samples.push(s);
        }
        rendered.push(v);
        runs.push(run);
    }

    if format == Format::Csv {
        let mut rows = Vec::new();
        for run in &runs {
            let ctx = run
                .context
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            for b in &run.outcome_distribution {
                let mask = b
                    .mask
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                rows.push(vec![
                    ctx.clone(),
                    b.path.to_string(),
                    mask,
                    b.delay.to_string(),
                    b.prob.to_string(),
                ]);
            }
        }
        return render_csv(&["context", "path", "mask", "delay", "prob"], rows);
    }

    let mut out = if a.context.is_some() {
        rendered.pop().expect("one context")
    } else {
        let mut all = json!({ "runs": rendered, "beta": beta_from_runs(&runs, a.n)? });
        if seed.is_some() {
            all["beta_sampled"] = json!(sampled_beta(&samples, a.n)?);
        }
        all
    };
    out["n"] = json!(a.n);
    out["delta"] = json!(a.delta);
    out["phi"] = json!(a.phi);
    if let Some(s) = seed {
        out["seed"] = json!(s);
        out["shots"] = json!(a.shots);
    }
    Ok(render_json(&out))
}

//! Single-binary command-line front end.
//!
//! Graph documents come in as JSON (see `cablekit::io`); results go out
//! as JSON reports or CSV tables with a `# op=...` header. Exit codes:
//! 0 success, 1 validation failure, 2 usage or input errors. All
//! randomness is seeded through `--seed` and echoed in the output, and
//! identical invocations produce byte-identical output.

mod output;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cablekit::correspondence::{default_intrinsic_weight, discretize, realize};
use cablekit::io::{self, GraphDocument};
use cablekit::metrics::{
    ball_discrete, ball_metric, combinatorial_metric, is_intrinsic, jump_size, path_metric,
    quasi_isometry_check, restrict_metric, MetricOnVertices,
};
use cablekit::operators::{
    equilateral_correspondence_check, heat_semigroup, spectrum_discrete, spectrum_metric,
    spectrum_metric_full, SpectralResult, DEFAULT_MAX_DOFS,
};
use cablekit::stochastic::{
    cayley_graph, classify_recurrence, growth_function, monte_carlo_walk, recurrence_indicator,
    return_probability, return_probability_dp, transition_kernel, ultracontractivity_fit,
    unit_equilateral_model, volume_growth_test, GroupSpec, GrowthKind, WalkKernel,
};
use cablekit::{DiscreteGraph, MetricGraphModel, VertexId};

use output::{emit, json_text, sig, Csv, DEFAULT_DIGITS};

#[derive(Parser)]
#[command(
    name = "cablekit",
    version,
    about = "Discrete and metric graph Laplacian toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits for CSV numbers.
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph document; exits 1 when invariants are violated.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Induced vertex data (V, m; b) of a metric model.
    Discretize {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cable-system realization of a discrete graph (default intrinsic weight).
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distances, balls, the intrinsic inequality, and quasi-isometry checks.
    Metric {
        #[command(subcommand)]
        cmd: MetricCmd,
    },
    /// Discrete and Kirchhoff spectra; equilateral reduction check.
    Spectrum {
        #[command(subcommand)]
        cmd: SpectrumCmd,
    },
    /// Heat-semigroup evolution of a vertex delta.
    Heat {
        #[arg(long = "in")]
        input: PathBuf,
        /// Evolution time.
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        /// Vertex carrying the initial delta.
        #[arg(long)]
        f0: String,
        /// Mesh size (metric models only).
        #[arg(long = "h", allow_negative_numbers = true)]
        h: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Random-walk return probabilities, exact or Monte Carlo.
    Walk {
        #[command(subcommand)]
        cmd: WalkCmd,
    },
    /// Cayley-graph truncations, growth functions, and classification.
    Cayley {
        #[command(subcommand)]
        cmd: CayleyCmd,
    },
    /// Recurrence diagnostics at finite scale.
    Recurrence {
        #[command(subcommand)]
        cmd: RecurrenceCmd,
    },
}

#[derive(Subcommand)]
enum MetricCmd {
    /// All-pairs vertex distances as CSV (u, v, d).
    Distances {
        #[arg(long = "in")]
        input: PathBuf,
        /// Use the combinatorial weight p = 1 on discrete inputs.
        #[arg(long)]
        combinatorial: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ball report around a vertex.
    Ball {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        center: String,
        #[arg(long = "r", allow_negative_numbers = true)]
        r: f64,
        #[arg(long)]
        combinatorial: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the intrinsic inequality for a discrete graph's metric.
    IntrinsicCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        combinatorial: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify the vertex inclusion is a quasi-isometry (a=1, b=0, R=eta*).
    QuasiIsometry {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum SpectrumCmd {
    /// Eigenvalues of the discrete Laplacian in l2(V; m).
    Discrete {
        #[arg(long = "in")]
        input: PathBuf,
        /// Keep only the lowest k eigenvalues.
        #[arg(long = "k")]
        k: Option<usize>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lowest k Kirchhoff eigenvalues via P1 elements at mesh size h.
    Metric {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "h", allow_negative_numbers = true)]
        h: f64,
        #[arg(long = "k")]
        k: usize,
        /// Comma-separated Dirichlet vertex ids.
        #[arg(long)]
        dirichlet: Option<String>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check 1 - cos(sqrt(lambda) l) against the normalized spectrum.
    EquilateralCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "h", allow_negative_numbers = true)]
        h: f64,
        /// Largest Kirchhoff eigenvalue to test.
        #[arg(long, default_value_t = 50.0)]
        cap: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum WalkCmd {
    /// Exact return probabilities p_n(o, o) by distribution DP.
    Dp {
        /// Catalog group (Z, Z2, Z3, F2, H3, C12, ...).
        #[arg(long, conflicts_with = "input")]
        group: Option<String>,
        /// Discrete graph document to walk on instead.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Walk origin (required with --in).
        #[arg(long)]
        origin: Option<String>,
        /// Comma-separated boundary vertex ids (with --in).
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Seeded Monte-Carlo walk statistics on a Cayley truncation.
    Mc {
        #[arg(long)]
        group: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Truncation radius; defaults to the step budget.
        #[arg(long)]
        radius: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum CayleyCmd {
    /// Materialize the word-metric ball as a discrete graph document.
    Generate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Growth function gamma(n) for n = 0..=radius.
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Catalog recurrence classification with growth evidence.
    Classify {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum RecurrenceCmd {
    /// Decay-exponent fit and Green's-sum plateau test.
    Indicator {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 400)]
        n_max: usize,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Riemann sums of the volume integral r dr / vol(B_r).
    VolumeTest {
        /// Catalog group; the unit equilateral cable system is built over it.
        #[arg(long, conflicts_with = "input")]
        group: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Ball center (required with --in).
        #[arg(long)]
        center: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        r_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        dr: f64,
        /// Truncation radius for --group; defaults to ceil(r_max) + 4.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Log-log fit of on-diagonal decay against n^(-d/2).
    Ultrafit {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 400)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

enum CliError {
    Core(cablekit::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<cablekit::Error> for CliError {
    fn from(e: cablekit::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn max_dofs() -> usize {
    std::env::var("CABLEKIT_MAX_DOFS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_DOFS)
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::Io)
}

fn load_graph(path: &PathBuf) -> Result<GraphDocument, CliError> {
    Ok(io::parse_graph(&read_file(path)?)?)
}

fn load_discrete(path: &PathBuf) -> Result<DiscreteGraph, CliError> {
    Ok(io::parse_discrete(&read_file(path)?)?)
}

fn load_model(path: &PathBuf) -> Result<MetricGraphModel, CliError> {
    Ok(io::parse_model(&read_file(path)?)?)
}

fn parse_group(text: &str) -> Result<GroupSpec, CliError> {
    Ok(GroupSpec::parse(text)?)
}

fn id_set(list: &Option<String>) -> BTreeSet<VertexId> {
    list.as_deref()
        .map(|s| {
            s.split(',')
                .filter(|t| !t.is_empty())
                .map(VertexId::from)
                .collect()
        })
        .unwrap_or_default()
}

/// Distance table for a discrete graph under the chosen weight.
fn discrete_metric(g: &DiscreteGraph, combinatorial: bool) -> Result<MetricOnVertices, CliError> {
    if combinatorial {
        Ok(combinatorial_metric(g)?)
    } else {
        let p = default_intrinsic_weight(g)?;
        Ok(path_metric(g, &p)?)
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Validate { input, output } => {
            let (kind, report) = match load_graph(&input)? {
                GraphDocument::Discrete(g) => ("discrete", cablekit::validate_discrete(&g)),
                GraphDocument::Metric { model, .. } => ("metric", cablekit::validate_model(&model)),
            };
            let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            let doc = json!({
                "op": "validate",
                "kind": kind,
                "valid": report.is_valid(),
                "violations": violations,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Discretize { input, output } => {
            let model = load_model(&input)?;
            let g = discretize(&model)?;
            emit(&output.out, &json_text(&io::discrete_to_json(&g)))?;
            Ok(0)
        }
        Command::Realize { input, output } => {
            let g = load_discrete(&input)?;
            let p = default_intrinsic_weight(&g)?;
            let cs = realize(&g, &p)?;
            emit(&output.out, &json_text(&io::cable_system_to_json(&cs)))?;
            Ok(0)
        }
        Command::Metric { cmd } => run_metric(cmd),
        Command::Spectrum { cmd } => run_spectrum(cmd),
        Command::Heat {
            input,
            t,
            f0,
            h,
            output,
        } => run_heat(input, t, f0, h, output),
        Command::Walk { cmd } => run_walk(cmd),
        Command::Cayley { cmd } => run_cayley(cmd),
        Command::Recurrence { cmd } => run_recurrence(cmd),
    }
}

fn run_metric(cmd: MetricCmd) -> Result<u8, CliError> {
    match cmd {
        MetricCmd::Distances {
            input,
            combinatorial,
            output,
        } => {
            let (metric, source) = match load_graph(&input)? {
                GraphDocument::Metric { model, .. } => {
                    (restrict_metric(&model)?, "eta-restriction")
                }
                GraphDocument::Discrete(g) => (
                    discrete_metric(&g, combinatorial)?,
                    if combinatorial {
                        "combinatorial"
                    } else {
                        "default-intrinsic-weight"
                    },
                ),
            };
            let mut csv = Csv::new(
                "metric-distances",
                &[("source", source.into())],
                &["u", "v", "d"],
            );
            let ids = metric.vertices();
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len() {
                    csv.row(&[
                        ids[i].to_string(),
                        ids[j].to_string(),
                        sig(metric.d_idx(i, j), output.digits),
                    ]);
                }
            }
            emit(&output.out, &csv.finish())?;
            Ok(0)
        }
        MetricCmd::Ball {
            input,
            center,
            r,
            combinatorial,
            output,
        } => {
            let center = VertexId::from(center.as_str());
            let report = match load_graph(&input)? {
                GraphDocument::Metric { model, .. } => ball_metric(&model, &center, r)?,
                GraphDocument::Discrete(g) => {
                    let metric = discrete_metric(&g, combinatorial)?;
                    ball_discrete(&g, &metric, &center, r)?
                }
            };
            let doc = json!({
                "op": "metric-ball",
                "center": report.center.as_str(),
                "radius": report.radius,
                "measure": report.measure,
                "inside": report.inside.iter().map(|v| v.as_str()).collect::<Vec<_>>(),
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
        MetricCmd::IntrinsicCheck {
            input,
            combinatorial,
            output,
        } => {
            let g = load_discrete(&input)?;
            let metric = discrete_metric(&g, combinatorial)?;
            let check = is_intrinsic(&g, &metric)?;
            let jump = jump_size(&g, &metric)?;
            let doc = json!({
                "op": "metric-intrinsic-check",
                "metric": if combinatorial { "combinatorial" } else { "default-intrinsic-weight" },
                "ok": check.ok,
                "worst_vertex": check.worst_vertex.as_str(),
                "min_slack": check.min_slack,
                "jump_size": jump,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
        MetricCmd::QuasiIsometry {
            input,
            samples,
            seed,
            output,
        } => {
            let model = load_model(&input)?;
            let report = quasi_isometry_check(&model, samples, seed)?;
            let doc = json!({
                "op": "metric-quasi-isometry",
                "a": report.a,
                "b": report.b,
                "r": report.r,
                "seed": report.seed,
                "vertex_pairs_checked": report.vertex_pairs_checked,
                "edge_points_checked": report.edge_points_checked,
                "violations": report.violations,
                "ok": report.ok(),
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
    }
}

fn spectrum_csv(
    op: &str,
    params: &[(&str, String)],
    spec: &SpectralResult,
    digits: usize,
) -> String {
    let mut csv = Csv::new(op, params, &["index", "eigenvalue"]);
    for (i, lambda) in spec.eigenvalues.iter().enumerate() {
        csv.row(&[i.to_string(), sig(*lambda, digits)]);
    }
    csv.finish()
}

fn spectrum_json(op: &str, spec: &SpectralResult) -> serde_json::Value {
    json!({
        "op": op,
        "eigenvalues": spec.eigenvalues,
        "matrix_size": spec.meta.matrix_size,
        "mesh_h": spec.meta.mesh_h,
    })
}

fn check_format(format: &str) -> Result<(), CliError> {
    match format {
        "csv" | "json" => Ok(()),
        other => Err(CliError::Usage(format!(
            "unknown format '{other}' (expected csv or json)"
        ))),
    }
}

fn run_spectrum(cmd: SpectrumCmd) -> Result<u8, CliError> {
    match cmd {
        SpectrumCmd::Discrete {
            input,
            k,
            format,
            output,
        } => {
            check_format(&format)?;
            let g = load_discrete(&input)?;
            let mut spec = spectrum_discrete(&g, max_dofs())?;
            if let Some(k) = k {
                if k > spec.eigenvalues.len() {
                    return Err(CliError::Usage(format!(
                        "k = {k} exceeds the {} eigenvalues available",
                        spec.eigenvalues.len()
                    )));
                }
                spec.eigenvalues.truncate(k);
            }
            let text = if format == "json" {
                json_text(&spectrum_json("spectrum-discrete", &spec))
            } else {
                spectrum_csv("spectrum-discrete", &[], &spec, output.digits)
            };
            emit(&output.out, &text)?;
            Ok(0)
        }
        SpectrumCmd::Metric {
            input,
            h,
            k,
            dirichlet,
            format,
            output,
        } => {
            check_format(&format)?;
            let model = load_model(&input)?;
            let set = id_set(&dirichlet);
            let dirichlet_ref = (!set.is_empty()).then_some(&set);
            let spec = spectrum_metric(&model, h, k, dirichlet_ref, max_dofs())?;
            let params = [("h", sig(h, 6)), ("k", k.to_string())];
            let text = if format == "json" {
                json_text(&spectrum_json("spectrum-metric", &spec))
            } else {
                spectrum_csv("spectrum-metric", &params, &spec, output.digits)
            };
            emit(&output.out, &text)?;
            Ok(0)
        }
        SpectrumCmd::EquilateralCheck {
            input,
            h,
            cap,
            output,
        } => {
            let model = load_model(&input)?;
            let report = equilateral_correspondence_check(&model, h, cap, max_dofs())?;
            let rows: Vec<serde_json::Value> = report
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "lambda": r.lambda,
                        "mapped": r.mapped,
                        "nearest": r.nearest,
                        "distance": r.distance,
                        "exempt": r.exempt,
                    })
                })
                .collect();
            let doc = json!({
                "op": "spectrum-equilateral-check",
                "edge_length": report.edge_length,
                "mesh_h": report.mesh_h,
                "lambda_cap": report.lambda_cap,
                "ok": report.ok,
                "worst_distance": report.worst_distance(),
                "normalized_spectrum": report.normalized_spectrum,
                "rows": rows,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
    }
}

fn run_heat(
    input: PathBuf,
    t: f64,
    f0: String,
    h: Option<f64>,
    output: OutputArgs,
) -> Result<u8, CliError> {
    let f0 = VertexId::from(f0.as_str());
    let mut csv = Csv::new(
        "heat",
        &[("t", sig(t, 6)), ("f0", f0.to_string())],
        &["id", "value"],
    );
    match load_graph(&input)? {
        GraphDocument::Discrete(g) => {
            let origin = g
                .index_of(&f0)
                .ok_or_else(|| cablekit::Error::UnknownVertex(f0.to_string()))?;
            let spec = spectrum_discrete(&g, max_dofs())?;
            let mut init = vec![0.0; g.len()];
            init[origin] = 1.0;
            let values = heat_semigroup(&spec, t, &init)?;
            for (v, value) in g.vertices().iter().zip(values) {
                csv.row(&[v.to_string(), sig(value, output.digits)]);
            }
        }
        GraphDocument::Metric { model, .. } => {
            let h =
                h.ok_or_else(|| CliError::Usage("metric heat flow needs a mesh size --h".into()))?;
            let origin = model
                .index_of(&f0)
                .ok_or_else(|| cablekit::Error::UnknownVertex(f0.to_string()))?;
            let (spec, sys) = spectrum_metric_full(&model, h, None, max_dofs())?;
            let mut init = vec![0.0; sys.dof_count()];
            let dof = sys.vertex_dof[origin].expect("no constraints here");
            init[dof] = 1.0;
            let values = heat_semigroup(&spec, t, &init)?;
            for (v, slot) in model.vertices().iter().zip(&sys.vertex_dof) {
                let value = slot.map_or(0.0, |i| values[i]);
                csv.row(&[v.to_string(), sig(value, output.digits)]);
            }
        }
    }
    emit(&output.out, &csv.finish())?;
    Ok(0)
}

fn run_walk(cmd: WalkCmd) -> Result<u8, CliError> {
    match cmd {
        WalkCmd::Dp {
            group,
            input,
            origin,
            boundary,
            n_max,
            output,
        } => {
            let (seq, label) = match (group, input) {
                (Some(name), None) => {
                    let spec = parse_group(&name)?;
                    (return_probability(&spec, n_max)?, spec.to_string())
                }
                (None, Some(path)) => {
                    let g = load_discrete(&path)?;
                    let origin = origin
                        .ok_or_else(|| CliError::Usage("--origin is required with --in".into()))?;
                    let kernel = WalkKernel::from_graph(
                        &g,
                        &VertexId::from(origin.as_str()),
                        &id_set(&boundary),
                    )?;
                    (return_probability_dp(&kernel, n_max)?, "file".to_string())
                }
                _ => {
                    return Err(CliError::Usage(
                        "walk dp needs exactly one of --group or --in".into(),
                    ))
                }
            };
            let mut csv = Csv::new(
                "walk-dp",
                &[("source", label), ("n_max", n_max.to_string())],
                &["n", "p"],
            );
            for (n, p) in seq.p.iter().enumerate() {
                csv.row(&[n.to_string(), sig(*p, output.digits)]);
            }
            emit(&output.out, &csv.finish())?;
            Ok(0)
        }
        WalkCmd::Mc {
            group,
            steps,
            trials,
            seed,
            radius,
            output,
        } => {
            let spec = parse_group(&group)?;
            let truncation = cayley_graph(&spec, radius.unwrap_or(steps))?;
            let kernel = transition_kernel(&truncation)?;
            let stats = monte_carlo_walk(&kernel, steps, trials, seed);
            let doc = json!({
                "op": "walk-mc",
                "group": spec.to_string(),
                "steps": stats.steps,
                "trials": stats.trials,
                "seed": stats.seed,
                "at_origin_final": stats.at_origin_final,
                "frequency_at_origin": stats.frequency_at_origin,
                "trials_returned": stats.trials_returned,
                "total_returns": stats.total_returns,
                "mean_first_return": stats.mean_first_return,
                "boundary_hits": stats.boundary_hits,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
    }
}

fn run_cayley(cmd: CayleyCmd) -> Result<u8, CliError> {
    match cmd {
        CayleyCmd::Generate {
            group,
            radius,
            output,
        } => {
            let spec = parse_group(&group)?;
            let t = cayley_graph(&spec, radius)?;
            emit(&output.out, &json_text(&io::discrete_to_json(&t.graph)))?;
            Ok(0)
        }
        CayleyCmd::Growth {
            group,
            radius,
            output,
        } => {
            let spec = parse_group(&group)?;
            let table = growth_function(&spec, radius)?;
            let mut csv = Csv::new(
                "cayley-growth",
                &[("group", spec.to_string()), ("radius", radius.to_string())],
                &["n", "gamma"],
            );
            for (n, gamma) in table.radii.iter().zip(&table.counts) {
                csv.row(&[n.to_string(), gamma.to_string()]);
            }
            emit(&output.out, &csv.finish())?;
            Ok(0)
        }
        CayleyCmd::Classify { group, output } => {
            let spec = parse_group(&group)?;
            let class = classify_recurrence(&spec)?;
            let growth = match class.growth {
                GrowthKind::Polynomial(d) => format!("polynomial({d})"),
                GrowthKind::Exponential => "exponential".into(),
                GrowthKind::Finite => "finite".into(),
            };
            let doc = json!({
                "op": "cayley-classify",
                "group": spec.to_string(),
                "verdict": class.verdict.to_string(),
                "growth": growth,
                "note": class.note,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
    }
}

fn run_recurrence(cmd: RecurrenceCmd) -> Result<u8, CliError> {
    match cmd {
        RecurrenceCmd::Indicator {
            group,
            n_max,
            format,
            output,
        } => {
            check_format(&format)?;
            let spec = parse_group(&group)?;
            let seq = return_probability(&spec, n_max)?;
            let report = recurrence_indicator(&seq)?;
            if format == "csv" {
                let mut csv = Csv::new(
                    "recurrence-indicator",
                    &[("group", spec.to_string()), ("n_max", n_max.to_string())],
                    &["n", "partial_sum"],
                );
                for &(n, s) in &report.partial_sums {
                    csv.row(&[n.to_string(), sig(s, output.digits)]);
                }
                emit(&output.out, &csv.finish())?;
            } else {
                let doc = json!({
                    "op": "recurrence-indicator",
                    "group": spec.to_string(),
                    "n_max": n_max,
                    "alpha": report.alpha,
                    "residual": report.residual,
                    "green_sum": report.green_sum,
                    "plateau_rel_increase": report.plateau_rel_increase,
                    "boundary_case": report.boundary_case,
                    "verdict": report.verdict.to_string(),
                });
                emit(&output.out, &json_text(&doc))?;
            }
            Ok(0)
        }
        RecurrenceCmd::VolumeTest {
            group,
            input,
            center,
            r_max,
            dr,
            radius,
            format,
            output,
        } => {
            check_format(&format)?;
            let (model, center, boundary) = match (group, input) {
                (Some(name), None) => {
                    let spec = parse_group(&name)?;
                    let radius = radius.unwrap_or(r_max.ceil() as usize + 4);
                    let t = cayley_graph(&spec, radius)?;
                    let model = unit_equilateral_model(&t.graph)?;
                    (model, t.origin.clone(), Some(t.boundary))
                }
                (None, Some(path)) => {
                    let model = load_model(&path)?;
                    let center = center
                        .ok_or_else(|| CliError::Usage("--center is required with --in".into()))?;
                    (model, VertexId::from(center.as_str()), None)
                }
                _ => {
                    return Err(CliError::Usage(
                        "volume-test needs exactly one of --group or --in".into(),
                    ))
                }
            };
            let report = volume_growth_test(&model, &center, r_max, dr, boundary.as_ref())?;
            if format == "csv" {
                let mut csv = Csv::new(
                    "recurrence-volume-test",
                    &[
                        ("center", center.to_string()),
                        ("r_max", sig(r_max, 6)),
                        ("dr", sig(dr, 6)),
                    ],
                    &["r", "volume", "integral"],
                );
                for i in 0..report.radii.len() {
                    csv.row(&[
                        sig(report.radii[i], output.digits),
                        sig(report.volumes[i], output.digits),
                        sig(report.integral[i], output.digits),
                    ]);
                }
                emit(&output.out, &csv.finish())?;
            } else {
                let doc = json!({
                    "op": "recurrence-volume-test",
                    "center": center.as_str(),
                    "r_max": report.r_max,
                    "dr": report.dr,
                    "integral_final": report.integral.last(),
                    "last_doubling_rel_increase": report.last_doubling_rel_increase,
                    "increment_ratio": report.increment_ratio,
                    "verdict": report.verdict.to_string(),
                });
                emit(&output.out, &json_text(&doc))?;
            }
            Ok(0)
        }
        RecurrenceCmd::Ultrafit {
            group,
            n_max,
            output,
        } => {
            let spec = parse_group(&group)?;
            let fit = ultracontractivity_fit(&spec, n_max)?;
            let doc = json!({
                "op": "recurrence-ultrafit",
                "group": spec.to_string(),
                "n_max": fit.n_max,
                "window": [fit.window.0, fit.window.1],
                "exponent": fit.exponent,
                "residual": fit.residual,
                "target": fit.target,
            });
            emit(&output.out, &json_text(&doc))?;
            Ok(0)
        }
    }
}

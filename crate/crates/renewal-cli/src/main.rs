//! Command-line front end: computes waiting laws, state panels, memory
//! kernels, expected arrivals, Sibuya tables, walk panels, Monte Carlo runs,
//! continuous-time convergence studies, and defect matrices, emitting CSV or
//! JSON tables suitable for plotting and regression baselines.
//!
//! Exit codes: 0 success, 1 domain error (a machine-readable
//! `{"error": CODE, "message": ...}` record goes to stderr), 2 usage error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use renewal_core::counting::{self, PdtpParams};
use renewal_core::ctlimit;
use renewal_core::dtrw;
use renewal_core::graph::{
    spectral_decompose_allow_bipartite, transition_matrix, Graph,
};
use renewal_core::simulate::{self, SimConfig, WaitingLaw};

// ---------------------------------------------------------------------------
// Error handling and exit codes
// ---------------------------------------------------------------------------

enum CliError {
    /// Numerical / domain failure from the library: exit 1.
    Domain(renewal_core::Error),
    /// Filesystem failure: exit 1 with code "IO".
    Io(std::io::Error),
    /// Inconsistent or incomplete flags not caught by the parser: exit 2.
    Usage(String),
}

impl From<renewal_core::Error> for CliError {
    fn from(e: renewal_core::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ---------------------------------------------------------------------------
// Output tables
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// A self-describing numeric table: ordered parameter header, column names,
/// and one row of f64 cells per record.
struct Table {
    params: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            params: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl std::fmt::Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV: `# key=value` header block, then a header row and one record per
    /// cell. Floats use the shortest decimal that round-trips bitwise.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}={v}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)
            .expect("in-memory csv write cannot fail");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))
                .expect("in-memory csv write cannot fail");
        }
        out.push_str(
            std::str::from_utf8(&w.into_inner().expect("in-memory flush cannot fail"))
                .expect("csv output is ascii"),
        );
        out
    }

    /// JSON with the `{"params": ..., "columns": ..., "rows": ...}` schema;
    /// numbers serialize with shortest round-trip decimals as well.
    fn to_json(&self) -> String {
        let params: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let value = serde_json::json!({
            "params": params,
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_string_pretty(&value).expect("table serialization cannot fail")
    }

    fn emit(&self, opts: &OutputOpts) -> Result<(), CliError> {
        let mut text = match opts.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &opts.output {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Shared flag groups
// ---------------------------------------------------------------------------

/// Process parameters: either `--xi` directly or the well-scaled pair
/// `--xi0 --step` (with `xi = xi0 * step^alpha`); giving all three demands
/// consistency.
#[derive(Args)]
struct ProcessArgs {
    /// Memory exponent alpha in (0, 1].
    #[arg(long)]
    alpha: f64,
    /// Shape exponent nu > 0.
    #[arg(long)]
    nu: f64,
    /// Dimensionless rate parameter xi > 0.
    #[arg(long)]
    xi: Option<f64>,
    /// Continuous-time rate xi0 > 0 (use with --step).
    #[arg(long, requires = "step")]
    xi0: Option<f64>,
    /// Time-grid step h > 0 (use with --xi0).
    #[arg(long, requires = "xi0")]
    step: Option<f64>,
}

impl ProcessArgs {
    fn build(&self) -> Result<PdtpParams, CliError> {
        let params = match (self.xi, self.xi0, self.step) {
            (Some(xi), None, None) => PdtpParams::new(self.alpha, self.nu, xi)?,
            (None, Some(xi0), Some(h)) => {
                PdtpParams::with_scaling(self.alpha, self.nu, xi0, h)?
            }
            (Some(xi), Some(xi0), Some(h)) => {
                PdtpParams::with_explicit(self.alpha, self.nu, xi, xi0, h)?
            }
            _ => {
                return Err(usage(
                    "provide --xi, or --xi0 together with --step (or all three, consistently)",
                ))
            }
        };
        Ok(params)
    }

    fn describe(&self, table: &mut Table, params: &PdtpParams) {
        table.param("alpha", params.alpha);
        table.param("nu", params.nu);
        table.param("xi", params.xi);
        if let Some(xi0) = params.xi0 {
            table.param("xi0", xi0);
            table.param("step", params.step_h);
        }
    }
}

/// Parses a graph source: `complete:N`, `star:N`, `er:N:P:SEED`, or a path
/// to an edge-list file (`i j` per line, 0-based, `#` comments).
fn load_graph(source: &str) -> Result<Graph, CliError> {
    if let Some(n) = source.strip_prefix("complete:") {
        let n: usize = n
            .parse()
            .map_err(|e| usage(format!("complete:<n>: {e}")))?;
        return Ok(Graph::complete(n)?);
    }
    if let Some(n) = source.strip_prefix("star:") {
        let n: usize = n.parse().map_err(|e| usage(format!("star:<n>: {e}")))?;
        return Ok(Graph::star(n)?);
    }
    if let Some(rest) = source.strip_prefix("er:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(usage("er:<n>:<p>:<seed>"));
        }
        let n: usize = parts[0]
            .parse()
            .map_err(|e| usage(format!("er node count: {e}")))?;
        let p: f64 = parts[1]
            .parse()
            .map_err(|e| usage(format!("er edge probability: {e}")))?;
        let seed: u64 = parts[2]
            .parse()
            .map_err(|e| usage(format!("er seed: {e}")))?;
        return Ok(Graph::erdos_renyi(n, p, seed)?);
    }
    let text = std::fs::read_to_string(source)?;
    Ok(Graph::from_edge_list_str(&text)?)
}

// ---------------------------------------------------------------------------
// Command definitions
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "renewal",
    version,
    about = "Discrete-time renewal processes, their continuous-time limits, \
             and subordinated random walks on graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    /// Cox series over matrix powers.
    Cox,
    /// Spectral sum over eigenvalue relaxation functions.
    Spectral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawKind {
    Pdtp,
    Sibuya,
    Fixed,
}

#[derive(Subcommand)]
enum Command {
    /// Waiting-time pmf theta(t), t = 0..=t-max.
    Pmf {
        #[command(flatten)]
        params: ProcessArgs,
        /// Horizon T >= 1.
        #[arg(long)]
        t_max: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// State probabilities Phi^(n)(t) for n <= n-max, t <= t-max.
    States {
        #[command(flatten)]
        params: ProcessArgs,
        #[arg(long)]
        t_max: usize,
        /// Largest arrival count; defaults to t-max.
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Memory kernels M, K0, B and the reciprocal-series D.
    Memory {
        #[command(flatten)]
        params: ProcessArgs,
        #[arg(long)]
        t_max: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Expected arrivals <n>(t).
    Arrivals {
        #[command(flatten)]
        params: ProcessArgs,
        #[arg(long)]
        t_max: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Sibuya family: pmf, survival, and expected hitting numbers.
    Sibuya {
        /// Tail exponent alpha in (0, 1].
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t_max: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Walk transition panel P(t) on a graph.
    Walk {
        #[command(flatten)]
        params: ProcessArgs,
        /// Graph source: complete:N, star:N, er:N:P:SEED, or an edge-list file.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        t_max: usize,
        /// Evaluation route; both produce the same panel.
        #[arg(long, value_enum, default_value = "cox")]
        route: Route,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Seeded Monte Carlo: state frequencies, or node occupations with --graph.
    Simulate {
        /// Waiting-time law.
        #[arg(long, value_enum)]
        law: LawKind,
        /// Alpha for pdtp/sibuya laws.
        #[arg(long)]
        alpha: Option<f64>,
        /// Nu for the pdtp law.
        #[arg(long)]
        nu: Option<f64>,
        /// Xi for the pdtp law.
        #[arg(long)]
        xi: Option<f64>,
        /// Period for the fixed law.
        #[arg(long)]
        period: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long)]
        t_max: usize,
        /// Sampler table cap; defaults to 4 * t-max.
        #[arg(long)]
        table_cap: Option<usize>,
        /// Simulate a walk on this graph instead of bare counts.
        #[arg(long)]
        graph: Option<String>,
        /// Start node for walk simulation.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Discrete-to-continuous convergence study over a list of grid steps.
    Converge {
        /// Memory exponent alpha in (0, 1].
        #[arg(long)]
        alpha: f64,
        /// Shape exponent nu > 0.
        #[arg(long)]
        nu: f64,
        /// Continuous-time rate xi0 > 0.
        #[arg(long)]
        xi0: f64,
        /// Continuous times to probe (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<f64>,
        /// Grid steps to compare (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        h_list: Vec<f64>,
        /// Largest state index entering the state-error norm.
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Relaxed initial-condition (defect) matrix on a graph.
    Defect {
        /// Graph source: complete:N, star:N, er:N:P:SEED, or an edge-list file.
        #[arg(long)]
        graph: String,
        /// Defect strength epsilon in (0, 1]; 1 gives the identity.
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        out: OutputOpts,
    },
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pmf { params, t_max, out } => {
            let p = params.build()?;
            let pmf = counting::pdtp_waiting_pmf(&p, t_max)?;
            let mut table = Table::new(vec!["t", "theta"]);
            table.param("command", "pmf");
            params.describe(&mut table, &p);
            table.param("t_max", t_max);
            for (t, &x) in pmf.coeffs.iter().enumerate() {
                table.push(vec![t as f64, x]);
            }
            table.emit(&out)
        }
        Command::States {
            params,
            t_max,
            n_max,
            out,
        } => {
            let p = params.build()?;
            let n_max = n_max.unwrap_or(t_max);
            let panel = counting::pdtp_state_panel(&p, n_max, t_max)?;
            let mut table = Table::new(vec!["n", "t", "phi"]);
            table.param("command", "states");
            params.describe(&mut table, &p);
            table.param("t_max", t_max);
            table.param("n_max", n_max);
            for n in 0..=panel.n_max {
                for t in 0..=panel.t_max {
                    table.push(vec![n as f64, t as f64, panel.value(n, t)]);
                }
            }
            table.emit(&out)
        }
        Command::Memory { params, t_max, out } => {
            let p = params.build()?;
            let kernels = counting::memory_kernels(&p, t_max)?;
            let mut table = Table::new(vec!["t", "m", "k0", "b", "d"]);
            table.param("command", "memory");
            params.describe(&mut table, &p);
            table.param("t_max", t_max);
            for t in 0..=t_max {
                table.push(vec![
                    t as f64,
                    kernels.m.coeffs[t],
                    kernels.k0.coeffs[t],
                    kernels.b.coeffs[t],
                    kernels.d.coeffs[t],
                ]);
            }
            table.emit(&out)
        }
        Command::Arrivals { params, t_max, out } => {
            let p = params.build()?;
            let mean = counting::expected_arrivals(&p, t_max)?;
            let mut table = Table::new(vec!["t", "mean"]);
            table.param("command", "arrivals");
            params.describe(&mut table, &p);
            table.param("t_max", t_max);
            for (t, &x) in mean.coeffs.iter().enumerate() {
                table.push(vec![t as f64, x]);
            }
            table.emit(&out)
        }
        Command::Sibuya { alpha, t_max, out } => {
            let pmf = counting::sibuya_pmf(alpha, t_max)?;
            let survival = counting::sibuya_survival(alpha, t_max)?;
            let hitting = counting::sibuya_hitting(alpha, t_max)?;
            let mut table = Table::new(vec!["t", "pmf", "survival", "hitting"]);
            table.param("command", "sibuya");
            table.param("alpha", alpha);
            table.param("t_max", t_max);
            for t in 0..=t_max {
                table.push(vec![t as f64, pmf.coeffs[t], survival.coeffs[t], hitting[t]]);
            }
            table.emit(&out)
        }
        Command::Walk {
            params,
            graph,
            t_max,
            route,
            out,
        } => {
            let p = params.build()?;
            let g = load_graph(&graph)?;
            let panel = match route {
                Route::Cox => {
                    let (h, _) = transition_matrix(&g)?;
                    let states = counting::pdtp_state_panel(&p, t_max, t_max)?;
                    dtrw::cox_transition(&states, &h, t_max)?
                }
                Route::Spectral => {
                    let decomp = spectral_decompose_allow_bipartite(&g)?;
                    dtrw::walk_panel_spectral(&p, &decomp, t_max)?
                }
            };
            let mut table = Table::new(vec!["t", "i", "j", "p"]);
            table.param("command", "walk");
            params.describe(&mut table, &p);
            table.param("graph", &graph);
            table.param("t_max", t_max);
            table.param(
                "route",
                match route {
                    Route::Cox => "cox",
                    Route::Spectral => "spectral",
                },
            );
            let n = g.node_count();
            for t in 0..=t_max {
                let pt = panel.value(t);
                for i in 0..n {
                    for j in 0..n {
                        table.push(vec![t as f64, i as f64, j as f64, pt[(i, j)]]);
                    }
                }
            }
            table.emit(&out)
        }
        Command::Simulate {
            law,
            alpha,
            nu,
            xi,
            period,
            seed,
            paths,
            t_max,
            table_cap,
            graph,
            start,
            out,
        } => {
            let waiting = match law {
                LawKind::Pdtp => {
                    let (Some(alpha), Some(nu), Some(xi)) = (alpha, nu, xi) else {
                        return Err(usage("law pdtp needs --alpha, --nu and --xi"));
                    };
                    WaitingLaw::Pdtp(PdtpParams::new(alpha, nu, xi)?)
                }
                LawKind::Sibuya => {
                    let Some(alpha) = alpha else {
                        return Err(usage("law sibuya needs --alpha"));
                    };
                    WaitingLaw::Sibuya { alpha }
                }
                LawKind::Fixed => {
                    let Some(period) = period else {
                        return Err(usage("law fixed needs --period"));
                    };
                    WaitingLaw::Fixed { period }
                }
            };
            let config = SimConfig {
                seed,
                n_paths: paths,
                t_max,
                table_cap: table_cap.unwrap_or(4 * t_max),
            };
            let mut table;
            match &graph {
                Some(source) => {
                    let g = load_graph(source)?;
                    let (h, _) = transition_matrix(&g)?;
                    let walk = simulate::simulate_walk(&waiting, &h, start, &config)?;
                    table = Table::new(vec!["t", "node", "freq", "stderr"]);
                    describe_simulation(&mut table, law, alpha, nu, xi, period, &config);
                    table.param("graph", source);
                    table.param("start", start);
                    for t in 0..=t_max {
                        for node in 0..g.node_count() {
                            table.push(vec![
                                t as f64,
                                node as f64,
                                walk.freq[t][node],
                                walk.stderr[t][node],
                            ]);
                        }
                    }
                }
                None => {
                    let states = simulate::simulate_states(&waiting, &config)?;
                    table = Table::new(vec!["n", "t", "freq", "stderr"]);
                    describe_simulation(&mut table, law, alpha, nu, xi, period, &config);
                    for n in 0..states.freq.len() {
                        for t in 0..=t_max {
                            table.push(vec![
                                n as f64,
                                t as f64,
                                states.freq[n][t],
                                states.stderr[n][t],
                            ]);
                        }
                    }
                }
            }
            table.emit(&out)
        }
        Command::Converge {
            alpha,
            nu,
            xi0,
            targets,
            h_list,
            n_max,
            out,
        } => {
            let rows = ctlimit::convergence_study(alpha, nu, xi0, &targets, &h_list, n_max)?;
            let mut table = Table::new(vec!["t", "h", "state_err", "density_err"]);
            table.param("command", "converge");
            table.param("alpha", alpha);
            table.param("nu", nu);
            table.param("xi0", xi0);
            table.param("n_max", n_max);
            for row in rows {
                table.push(vec![row.t, row.h, row.state_err, row.density_err]);
            }
            table.emit(&out)
        }
        Command::Defect { graph, eps, out } => {
            let g = load_graph(&graph)?;
            let decomp = spectral_decompose_allow_bipartite(&g)?;
            let defect = dtrw::initial_defect(&decomp, eps)?;
            let mut table = Table::new(vec!["i", "j", "p"]);
            table.param("command", "defect");
            table.param("graph", &graph);
            table.param("eps", eps);
            let n = g.node_count();
            for i in 0..n {
                for j in 0..n {
                    table.push(vec![i as f64, j as f64, defect[(i, j)]]);
                }
            }
            table.emit(&out)
        }
    }
}

fn describe_simulation(
    table: &mut Table,
    law: LawKind,
    alpha: Option<f64>,
    nu: Option<f64>,
    xi: Option<f64>,
    period: Option<usize>,
    config: &SimConfig,
) {
    table.param("command", "simulate");
    table.param(
        "law",
        match law {
            LawKind::Pdtp => "pdtp",
            LawKind::Sibuya => "sibuya",
            LawKind::Fixed => "fixed",
        },
    );
    if let Some(alpha) = alpha {
        table.param("alpha", alpha);
    }
    if let Some(nu) = nu {
        table.param("nu", nu);
    }
    if let Some(xi) = xi {
        table.param("xi", xi);
    }
    if let Some(period) = period {
        table.param("period", period);
    }
    table.param("seed", config.seed);
    table.param("paths", config.n_paths);
    table.param("t_max", config.t_max);
    table.param("table_cap", config.table_cap);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": e.code(), "message": e.to_string() })
            );
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": "IO", "message": e.to_string() })
            );
            ExitCode::from(1)
        }
    }
}

//! `corrlab`: command line front end. Every command prints one JSON document
//! and exits with 0 (ok), 2 (check failed), 3 (infeasible) or 4 (bad input).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use corrlab::channels::{self, SchurChannel};
use corrlab::linalg::{cmat_serde, CMat};
use corrlab::moments;
use corrlab::pipeline::{self, PipelineConfig};
use corrlab::runlog::{self, ArtifactHash, RunRecord, RUN_LOG_ENV};
use corrlab::spectra::{self, SigmaQuery};
use corrlab::tuples::{self, ProjectionTuple, RankFeasibility, RankVector, SeedKind, SolverConfig, SymmetrizeOptions, SymmetryGroup};
use corrlab::unitaries::{self, CorrelationMatrix, UnitaryTuple};
use corrlab::{Error, Scalar};

#[derive(Parser, Debug)]
#[command(name = "corrlab", version, about = "Projection tuples, moment matrices, correlation matrices and Schur channels")]
struct Cli {
    /// Compact single-line JSON instead of pretty output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance for checks.
    #[arg(long, global = true, default_value_t = tuples::DEFAULT_TOL)]
    tol: f64,
    /// Solver restarts.
    #[arg(long, global = true, default_value_t = 50)]
    restarts: usize,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Append a run record to this JSON-lines file.
    #[arg(long, global = true, env = RUN_LOG_ENV)]
    run_log: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Membership of α in Σ_n.
    Sigma {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: Scalar,
        #[arg(long, default_value_t = spectra::DEFAULT_ENDPOINT_TOL)]
        endpoint_tol: f64,
    },
    /// Explicit tuple with Σ p_i = α·1.
    Seed {
        #[arg(long, value_enum)]
        kind: SeedArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: Scalar,
    },
    /// Alternating solver for Σ p_i = α·1 in dimension k.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: Scalar,
        #[arg(long)]
        k: usize,
        /// Comma-separated ranks; defaults to the balanced vector.
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<usize>>,
        #[arg(long, default_value_t = 5000)]
        max_iterations: usize,
        #[arg(long, default_value_t = tuples::DEFAULT_RESIDUAL_TARGET)]
        target: f64,
    },
    /// Apply the reflection S (α ↦ α/(α−1)) or T (α ↦ n−α) to a tuple file.
    Functor {
        #[arg(long, value_enum)]
        kind: FunctorArg,
        #[command(flatten)]
        input: InputArg,
    },
    /// Direct sum over a permutation group.
    Symmetrize {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value = "full")]
        group: GroupArg,
    },
    /// Projection and sum residuals of a tuple file.
    Verify {
        #[command(flatten)]
        input: InputArg,
        /// Defaults to the α recorded in the file.
        #[arg(long)]
        alpha: Option<Scalar>,
    },
    /// Moment matrix of a tuple file, or A_{t,s} with --n/--t.
    Moments {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<Scalar>,
        #[arg(long)]
        s: Option<Scalar>,
    },
    /// Admissible interval I_t; with --s, decide and optionally realize (t, s).
    Admissible {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: Scalar,
        #[arg(long)]
        s: Option<Scalar>,
        #[arg(long)]
        realize: bool,
    },
    /// Check max{0, s+t−1} ≤ u ≤ min{s, t} and give the four weights.
    D2 {
        #[arg(long)]
        s: Scalar,
        #[arg(long)]
        t: Scalar,
        #[arg(long)]
        u: Scalar,
    },
    /// Synchronous correlation table of a tuple file.
    SyncExport {
        #[command(flatten)]
        input: InputArg,
    },
    /// Projections ↔ unitaries.
    Bridge {
        #[command(subcommand)]
        direction: BridgeCmd,
    },
    /// Explicit correlation matrix B_t (or the 3×3 matrix with --b3).
    #[command(name = "buildB")]
    BuildB {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<Scalar>,
        /// α of the 3×3 two-point matrix.
        #[arg(long)]
        b3: Option<Scalar>,
    },
    /// Repeat the first row and column of a correlation matrix file.
    Pad {
        #[command(flatten)]
        input: InputArg,
    },
    /// Round the spectrum of a unitary (matrix file) to m-th roots of unity.
    Discretize {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        m: usize,
    },
    /// Schur-multiplier channels.
    Channel {
        #[command(subcommand)]
        action: ChannelCmd,
    },
    /// Full witness bundle for (n, t), or re-check a saved bundle.
    Witness {
        #[arg(long, required_unless_present = "check")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "check")]
        t: Option<Scalar>,
        #[arg(long, value_enum, default_value = "full")]
        group: GroupArg,
        /// Bundle file to reload and verify.
        #[arg(long, conflicts_with_all = ["n", "t"])]
        check: Option<PathBuf>,
    },
    /// Best residual over a grid of t and dimensions.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        t: Vec<Scalar>,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
    },
}

#[derive(Args, Debug)]
struct InputArg {
    /// JSON input file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum BridgeCmd {
    ToUnitaries {
        #[command(flatten)]
        input: InputArg,
    },
    ToProjections {
        #[command(flatten)]
        input: InputArg,
    },
}

#[derive(Subcommand, Debug)]
enum ChannelCmd {
    /// Choi matrix, unitality, trace preservation of T_B (B from a file or B_t).
    Analyze {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<Scalar>,
    },
    /// Certificate for the block-diagonal factorization of a unitary tuple file.
    Factorize {
        #[command(flatten)]
        input: InputArg,
    },
    /// Smallest ancilla dimension allowed for T_{B_t}.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: Scalar,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeedArg {
    IntegerCover,
    PlanarHalf,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FunctorArg {
    S,
    T,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GroupArg {
    Full,
    Affine,
}

impl From<GroupArg> for SymmetrizeOptions {
    fn from(g: GroupArg) -> Self {
        let group = match g {
            GroupArg::Full => SymmetryGroup::Full,
            GroupArg::Affine => SymmetryGroup::Affine,
        };
        SymmetrizeOptions { group, ..Default::default() }
    }
}

/// Result of one command: the document, residuals for the log, the exit code.
struct Outcome {
    doc: Value,
    residuals: Value,
    code: i32,
}

impl Outcome {
    fn ok<T: Serialize>(doc: &T) -> Result<Self, Error> {
        Ok(Outcome { doc: serde_json::to_value(doc)?, residuals: Value::Null, code: 0 })
    }

    fn with_residuals(mut self, residuals: Value) -> Self {
        self.residuals = residuals;
        self
    }
}

struct Ctx {
    tol: f64,
    seed: u64,
    restarts: usize,
    inputs: Vec<ArtifactHash>,
}

impl Ctx {
    fn read<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Error> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(ArtifactHash::of_bytes(path.display().to_string(), &bytes));
        Ok(serde_json::from_slice(&bytes)?)
    }

    fn tuple(&mut self, path: &Path) -> Result<ProjectionTuple, Error> {
        let mut t: ProjectionTuple = self.read(path)?;
        t.check_shape()?;
        t.tol = self.tol;
        Ok(t)
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig { restarts: self.restarts, rng_seed: self.seed, tol: self.tol, ..Default::default() }
    }
}

fn need<T>(x: Option<T>, name: &str) -> Result<T, Error> {
    x.ok_or_else(|| Error::InvalidInput(format!("--{name} is required here")))
}

fn run(cmd: Command, ctx: &mut Ctx) -> Result<Outcome, Error> {
    match cmd {
        Command::Sigma { n, alpha, endpoint_tol } => {
            let v = spectra::sigma_membership(&SigmaQuery { n, alpha, tol: endpoint_tol })?;
            Outcome::ok(&v)
        }
        Command::Seed { kind, n, alpha } => {
            let kind = match kind {
                SeedArg::IntegerCover => SeedKind::IntegerCover,
                SeedArg::PlanarHalf => SeedKind::PlanarHalf,
            };
            let t = tuples::seed(kind, n, &alpha)?;
            Ok(Outcome::ok(&t)?.with_residuals(json!(t.residual)))
        }
        Command::Solve { n, alpha, k, ranks, max_iterations, target } => {
            let ranks = match ranks {
                Some(r) => RankVector(r),
                None => match tuples::rank_feasible(n, &alpha, k) {
                    RankFeasibility::Feasible { rank_vectors, .. } => rank_vectors[0].clone(),
                    infeasible => {
                        return Ok(Outcome { doc: serde_json::to_value(&infeasible)?, residuals: Value::Null, code: 3 });
                    }
                },
            };
            let cfg = SolverConfig { max_iterations, residual_target: target, ..ctx.solver() };
            let res = tuples::solve(n, &alpha, k, &ranks, &cfg)?;
            let code = if res.report.success { 0 } else { 2 };
            let doc = json!({ "report": res.report, "tuple": res.tuple });
            Ok(Outcome { doc, residuals: json!({ "sum": res.report.best_residual }), code })
        }
        Command::Functor { kind, input } => {
            let t = ctx.tuple(&input.input)?;
            match kind {
                FunctorArg::T => {
                    let out = tuples::functor_t(&t);
                    Outcome::ok(&out)
                }
                FunctorArg::S => {
                    let (out, report) = tuples::functor_s(&t)?;
                    let doc = json!({ "report": report, "tuple": out });
                    Ok(Outcome { doc, residuals: json!({ "sum": report.residual }), code: 0 })
                }
            }
        }
        Command::Symmetrize { input, group } => {
            let t = ctx.tuple(&input.input)?;
            let out = tuples::symmetrize(&t, &group.into())?;
            Outcome::ok(&out)
        }
        Command::Verify { input, alpha } => {
            let t = ctx.tuple(&input.input)?;
            let a = alpha.map(|a| a.to_f64()).unwrap_or_else(|| t.alpha_f64());
            let r = tuples::verify_tuple(&t, a, ctx.tol);
            let code = if r.pass { 0 } else { 2 };
            Ok(Outcome { doc: serde_json::to_value(r)?, residuals: json!({ "max": r.max_deviation() }), code })
        }
        Command::Moments { input, n, t, s } => {
            let m = match input {
                Some(path) => moments::moments_of(&ctx.tuple(&path)?)?,
                None => moments::build_a(need(n, "n")?, &need(t, "t")?, s.as_ref())?,
            };
            let doc = json!({ "moments": m, "min_eigenvalue": m.min_eigenvalue() });
            Ok(Outcome { doc, residuals: Value::Null, code: 0 })
        }
        Command::Admissible { n, t, s, realize } => {
            let interval = moments::classify_admissible(n, &t)?;
            let Some(s) = s else { return Outcome::ok(&interval) };
            let admissible = interval.contains(&s);
            let mut doc = json!({ "interval": interval, "s": s, "admissible": admissible });
            let mut residuals = Value::Null;
            if realize {
                let tuple = moments::realize_ats(n, &t, &s, &ctx.solver())?;
                let m = moments::moments_of(&tuple)?;
                let dev = m.max_abs_diff(&moments::build_a(n, &t, Some(&s))?);
                doc["moments_residual"] = json!(dev);
                doc["tuple"] = serde_json::to_value(&tuple)?;
                residuals = json!({ "moments": dev });
            }
            let code = if admissible == Some(false) { 3 } else { 0 };
            Ok(Outcome { doc, residuals, code })
        }
        Command::D2 { s, t, u } => {
            let p = moments::d2_check_and_realize(&s, &t, &u)?;
            Ok(Outcome::ok(&p)?.with_residuals(json!({ "matrix": p.residual })))
        }
        Command::SyncExport { input } => {
            let table = moments::synchronous_export(&ctx.tuple(&input.input)?)?;
            let residuals = json!({
                "synchronicity": table.synchronicity,
                "normalization": table.normalization,
            });
            Ok(Outcome::ok(&table)?.with_residuals(residuals))
        }
        Command::Bridge { direction } => match direction {
            BridgeCmd::ToUnitaries { input } => {
                let u = unitaries::projections_to_unitaries(&ctx.tuple(&input.input)?)?;
                let dev = u.unitarity_deviation();
                Ok(Outcome::ok(&u)?.with_residuals(json!({ "unitarity": dev })))
            }
            BridgeCmd::ToProjections { input } => {
                let u: UnitaryTuple = ctx.read(&input.input)?;
                let t = unitaries::unitaries_to_projections(&u, ctx.tol)?;
                Outcome::ok(&t)
            }
        },
        Command::BuildB { n, t, b3 } => {
            let b = match b3 {
                Some(a) => unitaries::build_b3(&a)?,
                None => unitaries::build_b(need(n, "n")?, &need(t, "t")?)?,
            };
            let report = b.report();
            let doc = json!({ "B": b, "report": report });
            Ok(Outcome { doc, residuals: json!({ "min_eigenvalue": report.min_eigenvalue }), code: 0 })
        }
        Command::Pad { input } => {
            let b: CorrelationMatrix = ctx.read(&input.input)?;
            Outcome::ok(&unitaries::pad_correlation(&b)?)
        }
        Command::Discretize { input, m } => {
            #[derive(serde::Deserialize)]
            struct M(#[serde(with = "cmat_serde")] CMat);
            let M(u) = ctx.read(&input.input)?;
            let d = unitaries::discretize_unitary(&u, m, ctx.tol)?;
            let code = if d.distance <= d.bound + 1e-12 { 0 } else { 2 };
            let residuals = json!({ "distance": d.distance, "bound": d.bound });
            Ok(Outcome { doc: serde_json::to_value(&d)?, residuals, code })
        }
        Command::Channel { action } => match action {
            ChannelCmd::Analyze { input, n, t } => {
                let b = match input {
                    Some(path) => ctx.read::<CorrelationMatrix>(&path)?,
                    None => unitaries::build_b(need(n, "n")?, &need(t, "t")?)?,
                };
                let r = channels::analyze_channel(&SchurChannel::unchecked(b))?;
                let code = if r.unital && r.trace_preserving && r.completely_positive { 0 } else { 2 };
                let residuals = json!({ "choi_min_eigenvalue": r.choi_min_eigenvalue });
                Ok(Outcome { doc: serde_json::to_value(&r)?, residuals, code })
            }
            ChannelCmd::Factorize { input } => {
                let u: UnitaryTuple = ctx.read(&input.input)?;
                let cert = channels::build_factorization(&u)?;
                Ok(Outcome::ok(&cert)?.with_residuals(json!({ "factorization": cert.residual })))
            }
            ChannelCmd::Bound { n, t } => {
                let b = channels::ancilla_bound(n, &t)?;
                Outcome::ok(&json!({ "n": n, "t": t, "dim_lower_bound": b }))
            }
        },
        Command::Witness { n, t, group, check } => {
            if let Some(path) = check {
                let bytes = std::fs::read(&path)?;
                ctx.inputs.push(ArtifactHash::of_bytes(path.display().to_string(), &bytes));
                let text = String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))?;
                let (_, check) = pipeline::load_and_verify(&text)?;
                let code = if check.pass { 0 } else { 2 };
                return Ok(Outcome { doc: serde_json::to_value(&check)?, residuals: Value::Null, code });
            }
            let cfg = PipelineConfig { solver: ctx.solver(), symmetry: group.into() };
            match pipeline::pipeline_witness(need(n, "n")?, &need(t, "t")?, &cfg) {
                Ok(bundle) => Ok(Outcome::ok(&bundle)?.with_residuals(serde_json::to_value(&bundle.residuals)?)),
                Err(failure) => Ok(Outcome {
                    doc: serde_json::to_value(&failure)?,
                    residuals: json!({ "stage": failure.stage, "residual": failure.residual }),
                    code: failure.exit_code,
                }),
            }
        }
        Command::Sweep { n, t, dims, max_iterations } => {
            let cfg = SolverConfig { max_iterations, ..ctx.solver() };
            let table = pipeline::sweep(n, &t, &dims, &cfg);
            Outcome::ok(&table)
        }
    }
}

fn render(doc: &Value, compact: bool) -> String {
    let mut s = if compact {
        serde_json::to_string(doc)
    } else {
        serde_json::to_string_pretty(doc)
    }
    .expect("values serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx { tol: cli.tol, seed: cli.seed, restarts: cli.restarts, inputs: Vec::new() };
    let config = json!({ "tol": cli.tol, "seed": cli.seed, "restarts": cli.restarts });
    let outcome = run(cli.command, &mut ctx).unwrap_or_else(|e| {
        eprintln!("corrlab: {e}");
        Outcome {
            doc: json!({ "error": e.to_string(), "exit_code": e.exit_code() }),
            residuals: Value::Null,
            code: e.exit_code(),
        }
    });
    let text = render(&outcome.doc, cli.json);
    let mut code = outcome.code;
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("corrlab: cannot write {}: {e}", path.display());
                code = 4;
            }
        }
        None => print!("{text}"),
    }
    if let Some(log) = &cli.run_log {
        let name = cli.output.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into());
        let record = RunRecord {
            argv,
            config,
            inputs: ctx.inputs,
            outputs: vec![ArtifactHash::of_bytes(name, text.as_bytes())],
            residuals: outcome.residuals,
            exit_code: code,
            duration_ms: start.elapsed().as_secs_f64() * 1e3,
            finished_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        if let Err(e) = runlog::append(log, &record) {
            eprintln!("corrlab: cannot append run log: {e}");
        }
    }
    ExitCode::from(code as u8)
}

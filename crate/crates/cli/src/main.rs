//! Command-line front end: channel/strategy file ingestion and the five
//! workflows (decide, simulate, sweep, reduce, nogo-audit).
//!
//! Exit codes: 0 success (and "feasible" for decide), 1 validation or parse
//! error, 2 reference channel not isometric on the requested subspace
//! (reduce), 3 infeasible pair (decide), 4 audit not applicable because the
//! pair is discriminable (nogo-audit).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use vacuumlab::channels::{decide_discriminability_with_tol, WhichChannel};
use vacuumlab::json::{ChannelJson, MatrixJson, SubspaceJson, SuperchannelJson};
use vacuumlab::kwiat::{
    decay_rate_fit, hamiltonian_half_pi_y, resolvent_bound_constant, simulate_kwiat,
    spectral_diagnostics, KwiatConfig,
};
use vacuumlab::linops::{CMat, Ket, Subspace};
use vacuumlab::nogo::{nogo_inequality_audit, rate_limit_audit};
use vacuumlab::random;
use vacuumlab::reduction::{apply_superchannel, build_reduction};
use vacuumlab::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "vacuumlab",
    version,
    about = "Interaction-free channel discrimination toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized quantity (required for reproducibility)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance for restriction-equality decisions
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Output format for tabular results
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two channels with a common vacuum admit
    /// interaction-free discrimination
    Decide {
        channel_a: PathBuf,
        channel_b: PathBuf,
    },
    /// Simulate the Zeno-style probing protocol against one channel
    Simulate {
        channel: PathBuf,
        /// Number of probing steps per run
        #[arg(long, short = 'n')]
        steps: usize,
        /// Number of protocol repetitions
        #[arg(long, short = 'k', default_value_t = 1)]
        repeats: usize,
        /// Hamiltonian file; the default is the half-pi sigma-y preset
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Sweep the probing protocol over a grid of step counts
    Sweep {
        channel: PathBuf,
        /// Grid "start:stop:points:log" or "start:stop:points:lin"
        #[arg(long, default_value = "8:512:7:log")]
        n_grid: String,
        #[arg(long, short = 'k', default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Reduce a probe channel to a qubit channel relative to a reference
    Reduce {
        reference: PathBuf,
        probe: PathBuf,
        /// Subspace file, or "full" for the whole space
        #[arg(long, default_value = "full")]
        subspace: String,
        /// Also write the pre/post superchannel realization here
        #[arg(long)]
        emit_superchannel: Option<PathBuf>,
    },
    /// Audit the no-go and rate-limit inequalities on random strategies
    NogoAudit {
        channel_a: PathBuf,
        channel_b: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::new(1, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(1, format!("malformed JSON: {}", e))
    }
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which this tool reserves for the
    // non-isometric-reference condition; remap them to 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            return ExitCode::from(code);
        }
    };
    init_thread_pool();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("VACUUMLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decide {
            ref channel_a,
            ref channel_b,
        } => cmd_decide(channel_a, channel_b, cli.tol, &cli),
        Command::Simulate {
            ref channel,
            steps,
            repeats,
            ref hamiltonian,
        } => cmd_simulate(channel, steps, repeats, hamiltonian.as_deref(), &cli),
        Command::Sweep {
            ref channel,
            ref n_grid,
            repeats,
            ref hamiltonian,
        } => cmd_sweep(channel, n_grid, repeats, hamiltonian.as_deref(), &cli),
        Command::Reduce {
            ref reference,
            ref probe,
            ref subspace,
            ref emit_superchannel,
        } => cmd_reduce(
            reference,
            probe,
            subspace,
            emit_superchannel.as_deref(),
            &cli,
        ),
        Command::NogoAudit {
            ref channel_a,
            ref channel_b,
            trials,
        } => cmd_nogo_audit(channel_a, channel_b, trials, &cli),
    }
}

fn read_channel_file(path: &std::path::Path) -> Result<ChannelJson, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(1, format!("{}: {}", path.display(), e)))?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

/// 17 significant digits, round-trip exact.
fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", x)
    }
}

fn cmd_decide(
    path_a: &std::path::Path,
    path_b: &std::path::Path,
    tol: f64,
    cli: &Cli,
) -> Result<(), Failure> {
    let a = read_channel_file(path_a)?.to_channel_with_vacuum()?;
    let b = read_channel_file(path_b)?.to_channel_with_vacuum()?;
    let decision = decide_discriminability_with_tol(&a, &b, tol)?;
    let witness = decision
        .witness
        .as_ref()
        .map(|s| SubspaceJson::from_subspace(s).basis);
    let verdict = json!({
        "feasible": decision.feasible,
        "witness_basis": witness,
        "which_isometric": decision.which_isometric.map(|w| match w {
            WhichChannel::A => "A",
            WhichChannel::B => "B",
        }),
    });
    emit(
        cli,
        &format!("{}\n", serde_json::to_string_pretty(&verdict)?),
    )?;
    if decision.feasible {
        Ok(())
    } else {
        Err(Failure::new(
            3,
            "the pair cannot be discriminated in an interaction-free manner",
        ))
    }
}

fn load_hamiltonian(path: Option<&std::path::Path>, vacuum: &Ket) -> Result<CMat, Failure> {
    match path {
        None => Ok(hamiltonian_half_pi_y(vacuum)),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::new(1, format!("{}: {}", p.display(), e)))?;
            let js: MatrixJson = serde_json::from_str(&text)?;
            Ok(js.to_matrix()?)
        }
    }
}

fn cmd_simulate(
    path: &std::path::Path,
    steps: usize,
    repeats: usize,
    hamiltonian: Option<&std::path::Path>,
    cli: &Cli,
) -> Result<(), Failure> {
    let js = read_channel_file(path)?;
    let t = js.to_channel()?;
    let vacuum = js
        .vacuum_ket()?
        .unwrap_or_else(|| Ket::basis(t.dim_in(), 0));
    let h = load_hamiltonian(hamiltonian, &vacuum)?;
    let cfg = KwiatConfig::new(h, steps, repeats, vacuum)?;
    let diag = spectral_diagnostics(&t)?;
    if !diag.mixing {
        eprintln!(
            "warning: the channel is not mixing (eigenvalue 1 simple: {}, gap radius {:.6}); \
             the probing protocol has no decay guarantee for it",
            diag.one_is_simple, diag.gap_r
        );
    }
    let outcome = simulate_kwiat(&cfg, &t)?;
    let report = json!({
        "steps": steps,
        "repeats": repeats,
        "p_error": outcome.p_error,
        "p_interaction": outcome.p_interaction,
        "transmission": outcome.transmission,
        "mixing": diag.mixing,
        "gap_r": diag.gap_r,
        "one_is_simple": diag.one_is_simple,
    });
    emit(
        cli,
        &format!("{}\n", serde_json::to_string_pretty(&report)?),
    )
}

fn parse_grid(spec: &str) -> Result<Vec<usize>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(Failure::new(1, "grid must be start:stop:points:log|lin"));
    }
    let start: usize = parts[0]
        .parse()
        .map_err(|_| Failure::new(1, "bad grid start"))?;
    let stop: usize = parts[1]
        .parse()
        .map_err(|_| Failure::new(1, "bad grid stop"))?;
    let points: usize = parts[2]
        .parse()
        .map_err(|_| Failure::new(1, "bad grid point count"))?;
    if start < 2 {
        return Err(Failure::new(1, "grid step counts below 2 are rejected"));
    }
    if stop < start || points < 2 {
        return Err(Failure::new(
            1,
            "grid needs stop >= start and at least 2 points",
        ));
    }
    let mut grid = Vec::new();
    for i in 0..points {
        let frac = i as f64 / (points - 1) as f64;
        let n = match parts[3] {
            "log" => ((start as f64).ln() + frac * ((stop as f64).ln() - (start as f64).ln()))
                .exp()
                .round() as usize,
            "lin" => (start as f64 + frac * (stop - start) as f64).round() as usize,
            _ => return Err(Failure::new(1, "grid kind must be log or lin")),
        };
        grid.push(n.max(2));
    }
    grid.dedup();
    Ok(grid)
}

type SweepRow = (usize, f64, Option<f64>, Option<f64>);

fn cmd_sweep(
    path: &std::path::Path,
    n_grid: &str,
    repeats: usize,
    hamiltonian: Option<&std::path::Path>,
    cli: &Cli,
) -> Result<(), Failure> {
    let js = read_channel_file(path)?;
    let t = js.to_channel()?;
    let vacuum = js
        .vacuum_ket()?
        .unwrap_or_else(|| Ket::basis(t.dim_in(), 0));
    let h = load_hamiltonian(hamiltonian, &vacuum)?;
    let grid = parse_grid(n_grid)?;

    // one bound constant for the whole sweep, when the spectrum permits it
    let diag = spectral_diagnostics(&t)?;
    let bound_c = if diag.mixing {
        let delta = ((1.0 - diag.gap_r) * 2.0 / 3.0).clamp(1e-3, 0.999);
        resolvent_bound_constant(&t, &h, 0.25, delta, 256).ok()
    } else {
        None
    };

    use rayon::prelude::*;
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&n| {
            let cfg = KwiatConfig::new(h.clone(), n, repeats, vacuum.clone())
                .expect("config was validated for the smallest grid point");
            let out = simulate_kwiat(&cfg, &t).expect("dimensions validated");
            (n, out.p_error, out.p_interaction, out.transmission)
        })
        .collect();

    let mut text =
        String::from("N,p_error,p_interaction,transmission,bound_C_over_N2,bound_C_over_N\n");
    for &(n, pe, pi, tt) in &rows {
        let nf = n as f64;
        let (b2, b1) = match bound_c {
            Some(c) => (fmt17(c / (nf * nf)), fmt17(c / nf)),
            None => ("nan".into(), "nan".into()),
        };
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            n,
            fmt17(pe),
            pi.map(fmt17).unwrap_or_else(|| "nan".into()),
            tt.map(fmt17).unwrap_or_else(|| "nan".into()),
            b2,
            b1
        ));
    }

    let fit_col = |sel: &dyn Fn(&SweepRow) -> Option<f64>| {
        let pts: Vec<(usize, f64)> = rows
            .iter()
            .filter_map(|r| sel(r).filter(|&y| y > 0.0).map(|y| (r.0, y)))
            .collect();
        decay_rate_fit(&pts).map(|f| f.slope).ok()
    };
    let s_err = fit_col(&|r| Some(r.1));
    let s_int = fit_col(&|r| r.2);
    let s_tt = fit_col(&|r| r.3);
    let slope_str = |s: Option<f64>| s.map(fmt17).unwrap_or_else(|| "nan".into());
    text.push_str(&format!(
        "slope,{},{},{},nan,nan\n",
        slope_str(s_err),
        slope_str(s_int),
        slope_str(s_tt)
    ));

    if cli.format == Format::Json {
        let mut out = Vec::new();
        for &(n, pe, pi, tt) in &rows {
            out.push(json!({"N": n, "p_error": pe, "p_interaction": pi, "transmission": tt}));
        }
        let doc = json!({
            "rows": out,
            "bound_c": bound_c,
            "slopes": {"p_error": s_err, "p_interaction": s_int, "transmission": s_tt},
        });
        return emit(cli, &format!("{}\n", serde_json::to_string_pretty(&doc)?));
    }
    emit(cli, &text)
}

fn cmd_reduce(
    reference: &std::path::Path,
    probe: &std::path::Path,
    subspace: &str,
    emit_superchannel: Option<&std::path::Path>,
    cli: &Cli,
) -> Result<(), Failure> {
    let ref_js = read_channel_file(reference)?;
    let t_ref = ref_js.to_channel()?;
    let vacuum = ref_js
        .vacuum_ket()?
        .unwrap_or_else(|| Ket::basis(t_ref.dim_in(), 0));
    let sub = if subspace == "full" {
        Subspace::full(t_ref.dim_in())
    } else {
        let text = std::fs::read_to_string(subspace)
            .map_err(|e| Failure::new(1, format!("{}: {}", subspace, e)))?;
        let js: SubspaceJson = serde_json::from_str(&text)?;
        js.to_subspace()?
    };
    let t_probe = read_channel_file(probe)?.to_channel()?;

    let r = build_reduction(&t_ref, &sub, &vacuum).map_err(|e| match e {
        CoreError::NotIsometricOnSubspace => Failure::new(
            2,
            "reference channel is not isometric on the requested subspace",
        ),
        other => Failure::from(other),
    })?;
    let reduced = apply_superchannel(&r, &t_probe)?;
    if let Some(path) = emit_superchannel {
        let js = SuperchannelJson::from_superchannel(&r);
        std::fs::write(path, serde_json::to_string_pretty(&js)?)?;
    }
    let out = ChannelJson::from_channel(&reduced);
    emit(cli, &format!("{}\n", serde_json::to_string_pretty(&out)?))
}

fn cmd_nogo_audit(
    path_a: &std::path::Path,
    path_b: &std::path::Path,
    trials: usize,
    cli: &Cli,
) -> Result<(), Failure> {
    let a = read_channel_file(path_a)?.to_channel_with_vacuum()?;
    let b = read_channel_file(path_b)?.to_channel_with_vacuum()?;
    let decision = decide_discriminability_with_tol(&a, &b, cli.tol)?;
    if decision.feasible {
        return Err(Failure::new(
            4,
            "the pair is discriminable; the no-go audit does not apply",
        ));
    }
    let dim = a.dim();

    use rayon::prelude::*;
    let results: Vec<Result<[vacuumlab::nogo::NoGoAudit; 2], CoreError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            // per-trial stream: identical output for any thread count
            let mut rng =
                random::seeded_rng(cli.seed ^ 0x9e3779b97f4a7c15u64.wrapping_mul(trial as u64 + 1));
            let steps = 1 + trial % 4;
            let anc = 1 + trial % 2;
            let d = random::random_strategy(dim, anc, steps, &mut rng);
            let povm = random::random_povm(dim * anc, &mut rng);
            let nogo = nogo_inequality_audit(&a, &b, &d, &povm)?;
            let rate = rate_limit_audit(&a, &b, &d, &povm)?;
            Ok([nogo, rate])
        })
        .collect();

    let mut text = String::from("trial_id,lhs,rhs,constant_used,holds\n");
    let mut json_rows = Vec::new();
    for (trial, res) in results.into_iter().enumerate() {
        let audits = res?;
        for audit in audits {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                trial,
                fmt17(audit.lhs),
                fmt17(audit.rhs),
                fmt17(audit.constant_used),
                audit.holds
            ));
            json_rows.push(json!({
                "trial_id": trial,
                "lhs": audit.lhs,
                "rhs": audit.rhs,
                "constant_used": audit.constant_used,
                "holds": audit.holds,
            }));
        }
    }
    if cli.format == Format::Json {
        return emit(
            cli,
            &format!("{}\n", serde_json::to_string_pretty(&json_rows)?),
        );
    }
    emit(cli, &text)
}

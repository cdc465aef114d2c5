//! Command-line front end for the traveling-wave toolkit: critical-speed
//! search, speed classification, profile reconstruction, limit-cycle
//! search, phase portraits, tail-law reports, and the analytic check suite,
//! with deterministic JSON/CSV emitters for external plotting.
//!
//! Exit codes: 0 success; 1 flag/parameter validation failure (the message
//! names the violated constraint); 2 numerical anomaly (no bracket, escape,
//! budget) ; 3 verification failure (a reconstructed profile or the check
//! suite contradicts its claims).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wavefront::classify::{
    classify_speed, fit_end, periodic_class, periodic_profile, reconstruct_profile,
    verify_profile, Profile, ReconstructError, TailDescriptor, VerifyReport, WaveClass,
};
use wavefront::cycles::{calculus_checks, find_limit_cycle, lienard_curves, CycleError};
use wavefront::integrate::{integrate, Direction, EventKind, IntegrateError, StopRule, Trajectory};
use wavefront::local::{seed_l0, seed_l1, tail_shift, Branch, End, TailKind, TailLaw};
use wavefront::model::{ParamError, PhasePoint, WaveParams};
use wavefront::shoot::{
    direct_connection_margin, find_cstar, monotone_front_margin, scan_gap, ShootConfig,
    ShootError,
};

#[derive(Parser)]
#[command(
    name = "wavefront",
    version,
    about = "Traveling-wave classification for u_t = u_xx + k(u^n)_x + u^p - u^q"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Locate the critical speed c* where the two special orbits connect.
    Cstar {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
    },
    /// Name the bounded wave carried at speed c and its asymptotics.
    Classify {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Previously computed critical speed; skips the c* search.
        #[arg(long, allow_negative_numbers = true)]
        cstar: Option<f64>,
    },
    /// Reconstruct the translation-normalized profile at speed c.
    Profile {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Previously computed critical speed; skips the c* search.
        #[arg(long, allow_negative_numbers = true)]
        cstar: Option<f64>,
        /// Replay the periodic wave over this many periods instead of
        /// reconstructing the decaying profile.
        #[arg(long, allow_negative_numbers = true)]
        periods: Option<usize>,
    },
    /// Search for the limit cycle around the state u = 1 at speed c.
    Cycle {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Also write the closed orbit as CSV to this path.
        #[arg(long, allow_negative_numbers = true)]
        orbit_out: Option<PathBuf>,
    },
    /// Emit the phase portrait at speed c: the special orbit pair plus a
    /// seed grid, one CSV per trajectory and an index file, into --out
    /// (default ./portrait).
    Portrait {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Number of context seeds along each horizontal edge.
        #[arg(long, default_value_t = 6)]
        grid: usize,
    },
    /// Run the analytic check suite: calculus lemmas, Lienard curve gap,
    /// crossing monotonicity scans, and flow-sign margins.
    Checks {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Grid resolution for the lemma and margin scans.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// Report the predicted tail laws at both ends for speed c; --fit also
    /// measures them on a reconstructed profile.
    Tails {
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        tol: TolFlags,
        #[command(flatten)]
        out: OutFlags,
        /// Wave speed.
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Previously computed critical speed; skips the c* search.
        #[arg(long, allow_negative_numbers = true)]
        cstar: Option<f64>,
        /// Reconstruct the profile and fit the laws against it.
        #[arg(long)]
        fit: bool,
    },
}

#[derive(Args)]
struct ParamFlags {
    /// Convection exponent (n >= 1).
    #[arg(long, allow_negative_numbers = true)]
    n: f64,
    /// Source exponent (p > q).
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    /// Sink exponent (q >= 1).
    #[arg(long, allow_negative_numbers = true)]
    q: f64,
    /// Convection coefficient (k > 0).
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
}

#[derive(Args)]
struct TolFlags {
    /// Bisection tolerance on c*.
    #[arg(long, allow_negative_numbers = true)]
    ctol: Option<f64>,
    /// Relative integration tolerance.
    #[arg(long, allow_negative_numbers = true)]
    rtol: Option<f64>,
    /// Absolute integration tolerance.
    #[arg(long, allow_negative_numbers = true)]
    atol: Option<f64>,
    /// Seed distance from the origin equilibrium.
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
}

#[derive(Args)]
struct OutFlags {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path (stdout when absent; a directory for `portrait`).
    #[arg(long, allow_negative_numbers = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure classes mapped onto the exit codes 1/2/3.
enum CmdError {
    Usage(String),
    Anomaly(String),
    Verification(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Anomaly(_) => 2,
            CmdError::Verification(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Usage(m) | CmdError::Anomaly(m) | CmdError::Verification(m) => m,
        }
    }
}

impl From<ParamError> for CmdError {
    fn from(e: ParamError) -> Self {
        CmdError::Usage(e.to_string())
    }
}

impl From<ShootError> for CmdError {
    fn from(e: ShootError) -> Self {
        match e {
            ShootError::OutOfRegime { .. } => CmdError::Usage(e.to_string()),
            _ => CmdError::Anomaly(e.to_string()),
        }
    }
}

impl From<IntegrateError> for CmdError {
    fn from(e: IntegrateError) -> Self {
        CmdError::Anomaly(e.to_string())
    }
}

impl From<CycleError> for CmdError {
    fn from(e: CycleError) -> Self {
        match e {
            CycleError::OutOfRegime { .. } => CmdError::Usage(e.to_string()),
            _ => CmdError::Anomaly(e.to_string()),
        }
    }
}

impl From<ReconstructError> for CmdError {
    fn from(e: ReconstructError) -> Self {
        CmdError::Anomaly(e.to_string())
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Anomaly(format!("i/o failure: {e}"))
    }
}

fn main() -> ExitCode {
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message());
        return ExitCode::from(e.code());
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// WAVEFRONT_THREADS caps the rayon pool used for scans.
fn configure_threads() -> Result<(), CmdError> {
    match std::env::var("WAVEFRONT_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CmdError::Usage(format!(
                    "WAVEFRONT_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Err(CmdError::Usage(
                    "WAVEFRONT_THREADS must be a positive integer, got 0".to_string(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CmdError::Anomaly(format!("thread pool setup failed: {e}")))
        }
    }
}

fn run(cmd: Cmd) -> Result<(), CmdError> {
    match cmd {
        Cmd::Cstar { params, tol, out } => cmd_cstar(&params, &tol, &out),
        Cmd::Classify {
            params,
            tol,
            out,
            c,
            cstar,
        } => cmd_classify(&params, &tol, &out, c, cstar),
        Cmd::Profile {
            params,
            tol,
            out,
            c,
            cstar,
            periods,
        } => cmd_profile(&params, &tol, &out, c, cstar, periods),
        Cmd::Cycle {
            params,
            tol,
            out,
            c,
            orbit_out,
        } => cmd_cycle(&params, &tol, &out, c, orbit_out.as_deref()),
        Cmd::Portrait {
            params,
            tol,
            out,
            c,
            grid,
        } => cmd_portrait(&params, &tol, &out, c, grid),
        Cmd::Checks {
            params,
            tol,
            out,
            grid,
        } => cmd_checks(&params, &tol, &out, grid),
        Cmd::Tails {
            params,
            tol,
            out,
            c,
            cstar,
            fit,
        } => cmd_tails(&params, &tol, &out, c, cstar, fit),
    }
}

fn wave_params(flags: &ParamFlags) -> Result<WaveParams, CmdError> {
    Ok(WaveParams::new(flags.n, flags.p, flags.q, flags.k)?)
}

fn shoot_config(tol: &TolFlags) -> Result<ShootConfig, CmdError> {
    let mut cfg = ShootConfig::default();
    if let Some(v) = tol.ctol {
        if !(v > 0.0 && v.is_finite()) {
            return Err(CmdError::Usage(format!("ctol > 0 violated (got {v})")));
        }
        cfg.c_tol = v;
    }
    if let Some(v) = tol.eps {
        if !(v > 0.0 && v < 0.1) {
            return Err(CmdError::Usage(format!(
                "eps in (0, 0.1) violated (got {v})"
            )));
        }
        cfg.eps = v;
    }
    if let Some(v) = tol.rtol {
        cfg.integrator.rel_tol = v;
    }
    if let Some(v) = tol.atol {
        cfg.integrator.abs_tol = v;
    }
    cfg.integrator
        .validate()
        .map_err(|e| CmdError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// JSON emission with every float at 15 significant digits, so outputs are
/// byte-identical across reruns and faithful to the computed values.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.14e}")
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    buf
}

fn emit(out: &OutFlags, bytes: &[u8]) -> Result<(), CmdError> {
    match &out.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// A float CSV cell: 15 significant digits, empty for missing values.
fn cell(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.14e}"),
        None => String::new(),
    }
}

fn cmd_cstar(params: &ParamFlags, tol: &TolFlags, out: &OutFlags) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let result = find_cstar(&params, &cfg)?;
    let bytes = match out.format {
        Format::Json => to_json_bytes(&result),
        Format::Csv => format!(
            "c_star,bracket_lo,bracket_hi,iterations,kn,upper_bound\n{:.14e},{:.14e},{:.14e},{},{:.14e},{:.14e}\n",
            result.c_star,
            result.bracket[0],
            result.bracket[1],
            result.iterations,
            result.kn,
            result.upper_bound
        )
        .into_bytes(),
    };
    emit(out, &bytes)
}

/// The wire form of one tail entry in classification output.
#[derive(Serialize)]
struct TailEntry {
    end: &'static str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oscillatory: Option<bool>,
}

impl TailEntry {
    fn from_law(law: &TailLaw) -> TailEntry {
        TailEntry {
            end: end_name(law.end),
            kind: match law.kind {
                TailKind::Exponential => "exp",
                TailKind::Algebraic => "alg",
            },
            rate: Some(law.rate),
            constant: law.constant,
            oscillatory: None,
        }
    }

    fn from_descriptor(slot: usize, descriptor: &TailDescriptor) -> TailEntry {
        let end = if slot == 0 { "-inf" } else { "+inf" };
        match descriptor {
            TailDescriptor::Zero(law) => TailEntry::from_law(law),
            TailDescriptor::One { oscillatory } => TailEntry {
                end,
                kind: "one",
                rate: None,
                constant: None,
                oscillatory: Some(*oscillatory),
            },
            TailDescriptor::Periodic => TailEntry {
                end,
                kind: "periodic",
                rate: None,
                constant: None,
                oscillatory: None,
            },
        }
    }
}

fn end_name(end: End) -> &'static str {
    match end {
        End::MinusInfinity => "-inf",
        End::PlusInfinity => "+inf",
    }
}

#[derive(Serialize)]
struct ClassificationOut {
    c: f64,
    class: &'static str,
    monotone: Option<bool>,
    tails: [TailEntry; 2],
}

fn classification_out(c: f64, class: &WaveClass) -> ClassificationOut {
    ClassificationOut {
        c,
        class: class.class_name(),
        monotone: class.monotone,
        tails: [
            TailEntry::from_descriptor(0, &class.tails[0]),
            TailEntry::from_descriptor(1, &class.tails[1]),
        ],
    }
}

fn resolve_cstar(
    params: &WaveParams,
    cfg: &ShootConfig,
    over: Option<f64>,
) -> Result<f64, CmdError> {
    match over {
        Some(v) => {
            if !v.is_finite() {
                return Err(CmdError::Usage(format!(
                    "cstar must be finite (got {v})"
                )));
            }
            Ok(v)
        }
        None => Ok(find_cstar(params, cfg)?.c_star),
    }
}

fn cmd_classify(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    c: f64,
    cstar: Option<f64>,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let c_star = resolve_cstar(&params, &cfg, cstar)?;
    let class = classify_speed(&params, c, c_star);
    let bytes = match out.format {
        Format::Json => to_json_bytes(&classification_out(c, &class)),
        Format::Csv => format!(
            "c,class,monotone\n{:.14e},{},{}\n",
            c,
            class.class_name(),
            match class.monotone {
                Some(m) => m.to_string(),
                None => String::new(),
            }
        )
        .into_bytes(),
    };
    emit(out, &bytes)
}

#[derive(Serialize)]
struct ProfileOut<'a> {
    c: f64,
    c_star: f64,
    class: &'static str,
    anchor: &'static str,
    verified: bool,
    samples: &'a [wavefront::integrate::Sample],
}

/// Thin a dense profile for emission. Stiffness caps the integrator step
/// along algebraic tails, so a single profile can carry millions of
/// near-identical rows; keep every visible change of f or f' (the head,
/// oscillations, anchor neighborhood) and collapse the featureless creep.
/// The first and last samples always survive.
fn thin_samples(samples: &[wavefront::integrate::Sample]) -> Vec<wavefront::integrate::Sample> {
    if samples.len() <= 2 {
        return samples.to_vec();
    }
    let span = (samples[samples.len() - 1].xi - samples[0].xi).abs();
    let yscale = samples
        .iter()
        .map(|s| s.y.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let dxi = span / 5000.0;
    let mut out = vec![samples[0]];
    for s in &samples[1..samples.len() - 1] {
        let kept = out[out.len() - 1];
        if (s.xi - kept.xi).abs() >= dxi
            || (s.x - kept.x).abs() >= 2e-4
            || (s.y - kept.y).abs() >= 2e-4 * yscale
        {
            out.push(*s);
        }
    }
    out.push(samples[samples.len() - 1]);
    out
}

fn cmd_profile(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    c: f64,
    cstar: Option<f64>,
    periods: Option<usize>,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let c_star = resolve_cstar(&params, &cfg, cstar)?;
    let (profile, class) = match periods {
        Some(periods) => (
            periodic_profile(&params, c, periods, &cfg)?,
            periodic_class(),
        ),
        None => (
            reconstruct_profile(&params, c, c_star, &cfg)?,
            classify_speed(&params, c, c_star),
        ),
    };
    let report = verify_profile(&profile, &class, &params, c);
    let thinned = Profile {
        samples: thin_samples(&profile.samples),
        anchor: profile.anchor,
    };
    let bytes = match out.format {
        Format::Json => to_json_bytes(&ProfileOut {
            c,
            c_star,
            class: class.class_name(),
            anchor: thinned.anchor.name(),
            verified: report.pass(),
            samples: &thinned.samples,
        }),
        Format::Csv => {
            let mut buf = Vec::new();
            thinned.to_csv(&mut buf)?;
            buf
        }
    };
    emit(out, &bytes)?;
    if report.pass() {
        Ok(())
    } else {
        Err(CmdError::Verification(verification_summary(&report)))
    }
}

fn verification_summary(report: &VerifyReport) -> String {
    let failed: Vec<String> = report
        .items
        .iter()
        .filter(|i| !i.pass)
        .map(|i| format!("{} ({})", i.name, i.detail))
        .collect();
    format!("profile verification failed: {}", failed.join("; "))
}

fn cmd_cycle(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    c: f64,
    orbit_out: Option<&Path>,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let result = find_limit_cycle(&params, c, &cfg)?;
    if let (Some(path), Some(orbit)) = (orbit_out, result.orbit.as_ref()) {
        let mut buf = Vec::new();
        orbit.to_csv(&mut buf)?;
        fs::write(path, buf)?;
    }
    let bytes = match out.format {
        Format::Json => to_json_bytes(&result),
        Format::Csv => format!(
            "found,c,fixed_point_x,period,stability\n{},{:.14e},{},{},{}\n",
            result.found,
            result.c,
            cell(&result.fixed_point_x),
            cell(&result.period),
            result
                .stability
                .map(|s| format!("{s:?}").to_lowercase())
                .unwrap_or_default()
        )
        .into_bytes(),
    };
    emit(out, &bytes)
}

#[derive(Serialize)]
struct PortraitEntry {
    file: String,
    x0: f64,
    y0: f64,
    direction: &'static str,
    samples: usize,
    terminal: String,
}

#[derive(Serialize)]
struct PortraitIndex {
    c: f64,
    params: WaveParams,
    entries: Vec<PortraitEntry>,
}

fn cmd_portrait(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    c: f64,
    grid: usize,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let dir = out
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("portrait"));
    fs::create_dir_all(&dir)?;

    let mut entries = Vec::new();
    let mut write_traj =
        |name: String, traj: &Trajectory, seed: PhasePoint| -> Result<(), CmdError> {
            let thinned = Trajectory {
                direction: traj.direction,
                samples: thin_samples(&traj.samples),
                events: traj.events.clone(),
            };
            let mut buf = Vec::new();
            thinned.to_csv(&mut buf)?;
            fs::write(dir.join(&name), buf)?;
            entries.push(PortraitEntry {
                file: name,
                x0: seed.x,
                y0: seed.y,
                direction: match traj.direction {
                    Direction::Forward => "forward",
                    Direction::Backward => "backward",
                },
                samples: thinned.samples.len(),
                terminal: traj
                    .final_event()
                    .map(|e| e.kind.name().to_string())
                    .unwrap_or_default(),
            });
            Ok(())
        };

    // The special pair: the orbit leaving the origin state and the orbit
    // entering it, each followed in its numerically stable direction. On
    // algebraic tails the seed sits a long creep away from the visible
    // head, so the budget is padded with the creep span.
    let padded = |branch: Branch| {
        let mut ic = cfg.integrator;
        let span = tail_shift(&params, c, branch, cfg.eps);
        ic.xi_budget = ic.xi_budget.max(4.0 * span + 200.0);
        ic
    };

    let l1 = seed_l1(&params, c, cfg.eps).point;
    let t1 = integrate(
        &params,
        c,
        l1,
        Direction::Forward,
        &StopRule::first(&[EventKind::ConvergedP2]),
        &padded(Branch::Unstable),
    )?;
    write_traj("l1.csv".to_string(), &t1, l1)?;

    // Cap the crossing count so speeds whose entering orbit winds onto the
    // limit cycle still emit a finite spiral; convergence into the state
    // u = 1 is terminal and stops the run earlier when it happens.
    let l0 = seed_l0(&params, c, cfg.eps).point;
    let t0 = integrate(
        &params,
        c,
        l0,
        Direction::Backward,
        &StopRule::nth(&[EventKind::YZeroUp, EventKind::YZeroDown], 60),
        &padded(Branch::Stable),
    )?;
    write_traj("l0.csv".to_string(), &t0, l0)?;

    // Context orbits from a deterministic seed grid on two horizontal
    // lines bracketing the equilibria.
    let short = {
        let mut ic = cfg.integrator;
        ic.xi_budget = ic.xi_budget.min(60.0);
        ic
    };
    for (row, y) in [(0usize, 0.75), (1usize, -0.75)] {
        for i in 0..grid {
            let x = 0.15 + 1.5 * i as f64 / (grid.max(2) - 1) as f64;
            let seed = PhasePoint::new(x, y);
            let traj = integrate(
                &params,
                c,
                seed,
                Direction::Forward,
                &StopRule::none(),
                &short,
            )?;
            write_traj(format!("grid_{row}_{i}.csv"), &traj, seed)?;
        }
    }

    let index = PortraitIndex {
        c,
        params,
        entries,
    };
    match out.format {
        Format::Json => fs::write(dir.join("index.json"), to_json_bytes(&index))?,
        Format::Csv => {
            let mut buf = String::from("file,x0,y0,direction,samples,terminal\n");
            for e in &index.entries {
                buf.push_str(&format!(
                    "{},{:.14e},{:.14e},{},{},{}\n",
                    e.file, e.x0, e.y0, e.direction, e.samples, e.terminal
                ));
            }
            fs::write(dir.join("index.csv"), buf)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LienardOut {
    c: f64,
    /// None when the comparison argument does not apply at these parameters.
    min_gap: Option<f64>,
    applicable: bool,
}

#[derive(Serialize)]
struct MonotonicityOut {
    c_lo: f64,
    c_hi: f64,
    step: f64,
    x1_nondecreasing: bool,
    x0_nonincreasing: bool,
    gap_sign_changes: usize,
}

#[derive(Serialize)]
struct MarginOut {
    check: &'static str,
    c: f64,
    margin: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ChecksOut {
    calculus: wavefront::cycles::CalculusReport,
    lienard: Vec<LienardOut>,
    monotonicity: MonotonicityOut,
    flow_margins: Vec<MarginOut>,
    pass: bool,
}

fn cmd_checks(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    grid: usize,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let mut pass = true;

    let calculus = calculus_checks(&params, grid);
    pass &= calculus.pass;

    let kn = params.kn();
    let mut lienard = Vec::new();
    for c in [kn, kn + 1.0] {
        match lienard_curves(&params, c, grid) {
            Ok(curves) => {
                pass &= curves.min_gap > 0.0;
                lienard.push(LienardOut {
                    c,
                    min_gap: Some(curves.min_gap),
                    applicable: true,
                });
            }
            Err(CycleError::OutOfRegime { .. }) => lienard.push(LienardOut {
                c,
                min_gap: None,
                applicable: false,
            }),
            Err(e) => return Err(e.into()),
        }
    }

    let root_pq = (params.p() - params.q()).sqrt();
    let (c_lo, c_hi, step) = (-2.0 * root_pq - 1.0, params.node_speed_upper() + 1.0, 0.1);
    let scan = scan_gap(&params, c_lo, c_hi, step, &cfg);
    let mut x1_nondecreasing = true;
    let mut x0_nonincreasing = true;
    for w in scan.windows(2) {
        if let (Some(a), Some(b)) = (w[0].x1, w[1].x1) {
            x1_nondecreasing &= b >= a - 1e-9;
            if a > 1.0 + 1e-6 {
                x1_nondecreasing &= b > a;
            }
        }
        if let (Some(a), Some(b)) = (w[0].x0, w[1].x0) {
            x0_nonincreasing &= b <= a + 1e-9;
            if b > 1.0 + 1e-6 {
                x0_nonincreasing &= b < a;
            }
        }
    }
    let signs: Vec<f64> = scan
        .iter()
        .filter_map(|s| s.gap)
        .filter(|g| *g != 0.0)
        .map(f64::signum)
        .collect();
    let gap_sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    pass &= x1_nondecreasing && x0_nonincreasing && gap_sign_changes == 1;
    let monotonicity = MonotonicityOut {
        c_lo,
        c_hi,
        step,
        x1_nondecreasing,
        x0_nonincreasing,
        gap_sign_changes,
    };

    let mut flow_margins = Vec::new();
    let upper = params.node_speed_upper();
    for c in [upper, upper + 1.0] {
        let margin = direct_connection_margin(&params, c, grid)?;
        let ok = margin >= -1e-12;
        pass &= ok;
        flow_margins.push(MarginOut {
            check: "direct_connection",
            c,
            margin,
            pass: ok,
        });
    }
    for c in [-2.0 * root_pq - 1.0, -2.0 * root_pq - 2.0] {
        let margin = monotone_front_margin(&params, c, grid)?;
        let ok = margin > 0.0;
        pass &= ok;
        flow_margins.push(MarginOut {
            check: "monotone_front",
            c,
            margin,
            pass: ok,
        });
    }

    let report = ChecksOut {
        calculus,
        lienard,
        monotonicity,
        flow_margins,
        pass,
    };
    let bytes = match out.format {
        Format::Json => to_json_bytes(&report),
        Format::Csv => {
            let mut buf = String::from("item,pass,value\n");
            buf.push_str(&format!("calculus,{},\n", report.calculus.pass));
            for l in &report.lienard {
                buf.push_str(&format!(
                    "lienard_min_gap(c={}),{},{}\n",
                    l.c,
                    !l.applicable || l.min_gap.unwrap_or(-1.0) > 0.0,
                    cell(&l.min_gap)
                ));
            }
            buf.push_str(&format!(
                "x1_nondecreasing,{},\nx0_nonincreasing,{},\ngap_sign_changes,{},{}\n",
                report.monotonicity.x1_nondecreasing,
                report.monotonicity.x0_nonincreasing,
                report.monotonicity.gap_sign_changes == 1,
                report.monotonicity.gap_sign_changes
            ));
            for m in &report.flow_margins {
                buf.push_str(&format!(
                    "{}(c={:.4}),{},{:.14e}\n",
                    m.check, m.c, m.pass, m.margin
                ));
            }
            buf.push_str(&format!("all,{pass},\n"));
            buf.into_bytes()
        }
    };
    emit(out, &bytes)?;
    if pass {
        Ok(())
    } else {
        Err(CmdError::Verification(
            "one or more analytic checks failed; see the report".to_string(),
        ))
    }
}

#[derive(Serialize)]
struct TailFitOut {
    end: &'static str,
    predicted_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    predicted_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct TailsOut {
    c: f64,
    c_star: f64,
    class: &'static str,
    predicted: [TailEntry; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    measured: Option<Vec<TailFitOut>>,
}

fn cmd_tails(
    params: &ParamFlags,
    tol: &TolFlags,
    out: &OutFlags,
    c: f64,
    cstar: Option<f64>,
    fit: bool,
) -> Result<(), CmdError> {
    let params = wave_params(params)?;
    let cfg = shoot_config(tol)?;
    let c_star = resolve_cstar(&params, &cfg, cstar)?;
    let class = classify_speed(&params, c, c_star);
    let predicted = [
        TailEntry::from_descriptor(0, &class.tails[0]),
        TailEntry::from_descriptor(1, &class.tails[1]),
    ];

    let measured = if fit {
        let profile = reconstruct_profile(&params, c, c_star, &cfg)?;
        let mut fits = Vec::new();
        for descriptor in &class.tails {
            let law = match descriptor {
                TailDescriptor::Zero(law) => law,
                _ => continue,
            };
            let entry = match fit_end(&profile, law, &params, c) {
                Ok(f) => TailFitOut {
                    end: end_name(law.end),
                    predicted_rate: law.rate,
                    predicted_constant: law.constant,
                    measured_rate: Some(f.measured),
                    measured_constant: law.constant.map(|_| f.constant),
                    residual: Some(f.residual),
                    samples: f.samples,
                    error: None,
                },
                Err(e) => TailFitOut {
                    end: end_name(law.end),
                    predicted_rate: law.rate,
                    predicted_constant: law.constant,
                    measured_rate: None,
                    measured_constant: None,
                    residual: None,
                    samples: 0,
                    error: Some(e.to_string()),
                },
            };
            fits.push(entry);
        }
        Some(fits)
    } else {
        None
    };

    let report = TailsOut {
        c,
        c_star,
        class: class.class_name(),
        predicted,
        measured,
    };
    let bytes = match out.format {
        Format::Json => to_json_bytes(&report),
        Format::Csv => {
            let mut buf = String::from("end,kind,rate,constant,oscillatory\n");
            for t in &report.predicted {
                buf.push_str(&format!(
                    "{},{},{},{},{}\n",
                    t.end,
                    t.kind,
                    cell(&t.rate),
                    cell(&t.constant),
                    t.oscillatory.map(|b| b.to_string()).unwrap_or_default()
                ));
            }
            buf.into_bytes()
        }
    };
    emit(out, &bytes)?;
    Ok(())
}

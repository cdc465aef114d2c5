//! The speed-axis decision table and profile reconstruction.
//!
//! For fixed parameters the bounded waves sort themselves along the speed
//! axis by the position of c relative to the critical speed c* (from the
//! shooting argument) and the Hopf speed kn:
//!
//! * above both: a front from 1 down to 0, monotone once c clears
//!   kn + 2 sqrt(p-q) and with damped oscillations around 1 otherwise;
//! * strictly between them: a periodic wave around 1 and, coexisting with
//!   it, a wave that oscillates around 1 without damping as xi -> -inf and
//!   decays to 0 as xi -> +inf;
//! * at c = c*: the solitary pulse (0 at both ends, single maximum);
//! * below both: a front from 0 up to 1, provably monotone for
//!   c <= -2 sqrt(p-q).
//!
//! Which of c* and kn is the larger pivot is decided by the sign of
//! n - (p+q+1); the table itself does not change.
//!
//! [`classify_speed`] names the wave and its predicted asymptotics at both
//! ends; [`reconstruct_profile`] realizes it numerically from the
//! distinguished orbits of P1 (or the homoclinic splice), normalized so a
//! nameable feature sits at xi = 0; [`verify_profile`] replays every claim
//! of the classification against the samples and reports item by item.

use crate::cycles::{find_limit_cycle, CycleError};
use crate::integrate::{
    integrate, CsvError, Direction, EventKind, IntegrateError, IntegratorConfig, Sample, StopRule,
    Trajectory,
};
use crate::local::{fit_tail, seed_l0, seed_l1, tail_law, tail_shift, Branch, End, FitError, FitResult, TailKind, TailLaw};
use crate::model::WaveParams;
use crate::shoot::{departure_span, extract_homoclinic, padded_config, ShootConfig, ShootError};
use serde::Serialize;
use std::io::{BufRead, Write};
use thiserror::Error;

/// Relative tolerance deciding that a requested speed *is* c*.
const SPEED_EQ_TOL: f64 = 1e-12;
/// Endpoint values must sit this close to their rest state.
const ENDPOINT_TOL: f64 = 1e-3;
/// Measured tail rates/exponents must match the law this tightly (relative).
const RATE_FIT_TOL: f64 = 0.02;
/// Measured tail constants must match the law this tightly (relative).
const CONSTANT_FIT_TOL: f64 = 0.05;
/// Slack allowed against a claimed monotone profile (absolute, per step).
const MONOTONE_SLACK: f64 = 1e-10;
/// The anchor value must hold at xi = 0 within this.
const ANCHOR_TOL: f64 = 1e-3;
/// Axis crossings kept when the backward head spirals out to a cycle.
const OSC_CROSSING_CAP: usize = 12;

/// Which bounded wave a speed carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WaveKind {
    /// Monotone front with f(-inf) = 1, f(+inf) = 0.
    #[serde(rename = "FrontOneToZero_Monotone")]
    FrontOneToZeroMonotone,
    /// The same front, but with damped oscillations around 1 at -inf.
    #[serde(rename = "FrontOneToZero_DampedOsc")]
    FrontOneToZeroDampedOsc,
    /// Closed orbit around P2: a wave oscillating around 1 forever.
    PeriodicWave,
    /// Non-damped oscillations around 1 at -inf, decay to 0 at +inf.
    OscillatoryToZero,
    /// The homoclinic pulse at c*: 0 at both ends, one interior maximum.
    Soliton,
    /// Front with f(-inf) = 0, f(+inf) = 1 (monotone flag kept separate).
    FrontZeroToOne,
}

impl WaveKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveKind::FrontOneToZeroMonotone => "FrontOneToZero_Monotone",
            WaveKind::FrontOneToZeroDampedOsc => "FrontOneToZero_DampedOsc",
            WaveKind::PeriodicWave => "PeriodicWave",
            WaveKind::OscillatoryToZero => "OscillatoryToZero",
            WaveKind::Soliton => "Soliton",
            WaveKind::FrontZeroToOne => "FrontZeroToOne",
        }
    }
}

/// Predicted asymptotics at one end of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailDescriptor {
    /// The end decays to 0 along the given law.
    Zero(TailLaw),
    /// The end approaches the level 1; `oscillatory` when the local approach
    /// spirals (P2 is a focus on that side) rather than settling directly.
    One { oscillatory: bool },
    /// The end tracks the periodic orbit: oscillation around 1 that never
    /// damps out, so there is no pointwise limit.
    Periodic,
}

/// The wave class at one speed: the kind, what is known about monotonicity,
/// and the asymptotics at xi -> -inf and xi -> +inf (in that order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveClass {
    pub kind: WaveKind,
    /// `Some(true)`: proven monotone. `Some(false)`: provably oscillating.
    /// `None`: not settled either way (fronts with c in (-2 sqrt(p-q), c*)).
    pub monotone: Option<bool>,
    /// Asymptotics at -inf (index 0) and +inf (index 1).
    pub tails: [TailDescriptor; 2],
    /// True when a periodic wave coexists at this speed (speeds strictly
    /// between c* and kn); the decaying wave is the one described by `kind`.
    pub periodic_companion: bool,
}

impl WaveClass {
    /// The wire name of the kind.
    pub fn class_name(&self) -> &'static str {
        self.kind.name()
    }
}

/// The decay law of the departing branch (the xi -> -inf end).
fn departing_law(params: &WaveParams, c: f64, c_star: f64) -> TailLaw {
    tail_law(params, c, Some(c_star), End::MinusInfinity, Branch::Unstable)
        .expect("the departing branch decays at -inf for every speed")
}

/// The decay law of the arriving branch (the xi -> +inf end). Only called
/// for c > 0, where the law always exists.
fn arriving_law(params: &WaveParams, c: f64, c_star: f64) -> TailLaw {
    tail_law(params, c, Some(c_star), End::PlusInfinity, Branch::Stable)
        .expect("the arriving branch decays at +inf for positive speeds")
}

/// The decision table: which bounded wave the speed `c` carries, given the
/// critical speed `c_star` previously computed for these parameters.
///
/// Transitions happen at c*, kn and kn + 2 sqrt(p-q) (kind), at
/// kn - 2 sqrt(p-q) (the approach-to-1 flag), and at -2 sqrt(p-q) (the
/// monotonicity guarantee). For n > p+q+1 the pivots c* and kn trade places;
/// the speed exactly at the Hopf point then carries the 0 -> 1 front, since
/// P2 is there a (weakly) stable focus that the departing branch falls into.
pub fn classify_speed(params: &WaveParams, c: f64, c_star: f64) -> WaveClass {
    let kn = params.kn();
    let upper = params.node_speed_upper();

    if (c - c_star).abs() <= SPEED_EQ_TOL * c_star.abs().max(1.0) {
        return WaveClass {
            kind: WaveKind::Soliton,
            monotone: Some(false),
            tails: [
                TailDescriptor::Zero(departing_law(params, c_star, c_star)),
                TailDescriptor::Zero(arriving_law(params, c_star, c_star)),
            ],
            periodic_companion: false,
        };
    }

    if c >= kn && c > c_star {
        let monotone = c >= upper;
        return WaveClass {
            kind: if monotone {
                WaveKind::FrontOneToZeroMonotone
            } else {
                WaveKind::FrontOneToZeroDampedOsc
            },
            monotone: Some(monotone),
            tails: [
                TailDescriptor::One { oscillatory: !monotone },
                TailDescriptor::Zero(arriving_law(params, c, c_star)),
            ],
            periodic_companion: false,
        };
    }

    if c > c_star.min(kn) && c < c_star.max(kn) {
        return WaveClass {
            kind: WaveKind::OscillatoryToZero,
            monotone: Some(false),
            tails: [
                TailDescriptor::Periodic,
                TailDescriptor::Zero(arriving_law(params, c, c_star)),
            ],
            periodic_companion: true,
        };
    }

    WaveClass {
        kind: WaveKind::FrontZeroToOne,
        monotone: if c <= -params.focus_halfwidth() {
            Some(true)
        } else {
            None
        },
        tails: [
            TailDescriptor::Zero(departing_law(params, c, c_star)),
            TailDescriptor::One {
                oscillatory: c > params.node_speed_lower(),
            },
        ],
        periodic_companion: false,
    }
}

/// The class record of the periodic wave that coexists with the decaying
/// one at speeds strictly between c* and kn.
pub fn periodic_class() -> WaveClass {
    WaveClass {
        kind: WaveKind::PeriodicWave,
        monotone: Some(false),
        tails: [TailDescriptor::Periodic, TailDescriptor::Periodic],
        periodic_companion: true,
    }
}

/// How a reconstructed profile is pinned against translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Anchor {
    /// The profile's maximum sits at xi = 0 (solitons, periodic waves).
    MaxAtZero,
    /// f(0) = 1/2, halfway between the rest states (fronts).
    HalfLevelAtZero,
    /// f(0) = 1, the last crossing before the decay (oscillatory waves).
    CrossingAtZero,
}

impl Anchor {
    pub fn name(self) -> &'static str {
        match self {
            Anchor::MaxAtZero => "MaxAtZero",
            Anchor::HalfLevelAtZero => "HalfLevelAtZero",
            Anchor::CrossingAtZero => "CrossingAtZero",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "MaxAtZero" => Some(Anchor::MaxAtZero),
            "HalfLevelAtZero" => Some(Anchor::HalfLevelAtZero),
            "CrossingAtZero" => Some(Anchor::CrossingAtZero),
            _ => None,
        }
    }
}

/// A reconstructed, translation-normalized wave profile.
#[derive(Debug, Clone, Serialize)]
pub struct Profile {
    /// (xi, f, f') with strictly increasing xi.
    pub samples: Vec<Sample>,
    pub anchor: Anchor,
}

#[derive(Debug, Clone, Error)]
pub enum ProfileCsvError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("profile CSV lacks the `# anchor,...` comment line")]
    MissingAnchor,
}

impl Profile {
    /// Write the CSV form: header `xi,f,fprime`, one row per sample at 15
    /// significant digits, then the anchor as a comment line.
    pub fn to_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "xi,f,fprime")?;
        for s in &self.samples {
            writeln!(w, "{:.14e},{:.14e},{:.14e}", s.xi, s.x, s.y)?;
        }
        writeln!(w, "# anchor,{}", self.anchor.name())?;
        Ok(())
    }

    /// Parse the CSV form written by [`Profile::to_csv`].
    pub fn from_csv<R: BufRead>(r: R) -> Result<Profile, ProfileCsvError> {
        let mut samples = Vec::new();
        let mut anchor = None;
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| CsvError::Io(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line == "xi,f,fprime" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() != 2 || parts[0] != "anchor" {
                    return Err(CsvError::Malformed { line: idx + 1 }.into());
                }
                anchor = Some(
                    Anchor::from_name(parts[1])
                        .ok_or(CsvError::Malformed { line: idx + 1 })?,
                );
            } else {
                let nums: Result<Vec<f64>, _> =
                    line.split(',').map(|s| s.trim().parse::<f64>()).collect();
                let nums = nums.map_err(|_| CsvError::Malformed { line: idx + 1 })?;
                if nums.len() != 3 {
                    return Err(CsvError::Malformed { line: idx + 1 }.into());
                }
                samples.push(Sample {
                    xi: nums[0],
                    x: nums[1],
                    y: nums[2],
                });
            }
        }
        if samples.is_empty() {
            return Err(CsvError::Empty.into());
        }
        Ok(Profile {
            samples,
            anchor: anchor.ok_or(ProfileCsvError::MissingAnchor)?,
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Shoot(#[from] ShootError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("no limit cycle found at c = {c}; there is no periodic profile to replay")]
    NoCycle { c: f64 },
    #[error("the periodic wave has no decaying profile; use `periodic_profile` instead")]
    PeriodicClass,
    #[error("the orbit never crosses the anchor level {level}")]
    NoAnchor { level: f64 },
    #[error("unexpected orbit behavior at c = {c}: {detail}")]
    Unexpected { c: f64, detail: String },
}

/// The value of the cubic Hermite interpolant between two adjacent samples,
/// which uses the stored slopes f' and so stays accurate on the coarse
/// deep-tail steps where linear interpolation drifts.
fn hermite_value(s0: &Sample, s1: &Sample, xi: f64) -> f64 {
    let h = s1.xi - s0.xi;
    if h == 0.0 {
        return s0.x;
    }
    let t = (xi - s0.xi) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * s0.x
        + (t3 - 2.0 * t2 + t) * h * s0.y
        + (-2.0 * t3 + 3.0 * t2) * s1.x
        + (t3 - t2) * h * s1.y
}

/// xi where the Hermite interpolant between two adjacent samples crosses
/// `level`: the secant guess polished by a few Newton steps.
fn hermite_crossing(s0: &Sample, s1: &Sample, level: f64) -> f64 {
    let h = s1.xi - s0.xi;
    let (p0, p1) = (s0.x - level, s1.x - level);
    if p0 == p1 {
        return s0.xi;
    }
    let mut xi = s0.xi + h * p0 / (p0 - p1);
    for _ in 0..3 {
        let t = (xi - s0.xi) / h;
        let t2 = t * t;
        let val = hermite_value(s0, s1, xi) - level;
        let dval = ((6.0 * t2 - 6.0 * t) * (s0.x - s1.x)) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * s0.y
            + (3.0 * t2 - 2.0 * t) * s1.y;
        if dval.abs() < 1e-300 {
            break;
        }
        xi = (xi - val / dval).clamp(s0.xi.min(s1.xi), s0.xi.max(s1.xi));
    }
    xi
}

/// Interpolated xi of every crossing of f = level, in sample order.
fn level_crossings(samples: &[Sample], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in samples.windows(2) {
        let a = w[0].x - level;
        let b = w[1].x - level;
        if a == 0.0 {
            out.push(w[0].xi);
        } else if a * b < 0.0 {
            out.push(hermite_crossing(&w[0], &w[1], level));
        }
    }
    out
}

/// Seed amplitude for whole-profile runs. Deeper than the shooting seed so
/// the run's own endpoint clears [`ENDPOINT_TOL`] with a wide margin; the
/// extra decay span costs only O(log) steps under the lifted step cap.
const PROFILE_EPS: f64 = 1e-6;

/// Integration settings for whole-profile runs. The decay side of a profile
/// is a long algebraic creep that error control covers with steps
/// proportional to the distance from the virtual blow-up origin, so the
/// fixed step cap is lifted to the budget scale and the budget extended to
/// the creep length.
fn profile_config(cfg: &IntegratorConfig, span: f64) -> IntegratorConfig {
    let mut out = padded_config(cfg, span);
    out.max_step = out.max_step.max(out.xi_budget / 50.0);
    out
}

fn expect_terminal(
    c: f64,
    traj: &Trajectory,
    allowed: &[EventKind],
) -> Result<(), ReconstructError> {
    match traj.final_event() {
        Some(ev) if allowed.contains(&ev.kind) => Ok(()),
        Some(ev) => Err(ReconstructError::Unexpected {
            c,
            detail: format!(
                "arc ended with {} at (X, Y) = ({:.6e}, {:.6e})",
                ev.kind.name(),
                ev.x,
                ev.y
            ),
        }),
        None => Err(ReconstructError::Unexpected {
            c,
            detail: "arc recorded no event at all".to_string(),
        }),
    }
}

/// How far the backward (head) run of an arriving-branch profile goes.
enum HeadStop {
    /// Ride the spiral/node into P2 (fronts from 1).
    IntoP2,
    /// Cap at a number of axis crossings (heads that wind onto a cycle).
    CrossingCap(usize),
}

/// Profile track seeded deep on the arriving branch and integrated backward
/// only: the run retraces the decay (where the transverse direction
/// contracts backward, so the creep is self-correcting) and continues into
/// the interior head, up to P2 or a crossing cap. Reversing the samples
/// yields the whole profile; the seed itself is the +inf endpoint.
///
/// Integrating the decay *forward* instead would follow a non-dominant
/// manifold whose transverse error grows like exp(c xi), and the arc is
/// thrown off long before the tail develops.
fn arriving_track(
    params: &WaveParams,
    c: f64,
    cfg: &ShootConfig,
    head_stop: HeadStop,
) -> Result<Vec<Sample>, ReconstructError> {
    let seed = seed_l0(params, c, PROFILE_EPS).point;
    let run_cfg = profile_config(&cfg.integrator, departure_span(params, c, PROFILE_EPS));
    let stop = match head_stop {
        HeadStop::IntoP2 => StopRule::first(&[EventKind::ConvergedP2]),
        HeadStop::CrossingCap(cap) => {
            StopRule::nth(&[EventKind::YZeroUp, EventKind::YZeroDown], cap)
        }
    };
    let run = integrate(params, c, seed, Direction::Backward, &stop, &run_cfg)?;
    expect_terminal(
        c,
        &run,
        &[
            EventKind::ConvergedP2,
            EventKind::BudgetExhausted,
            EventKind::YZeroUp,
            EventKind::YZeroDown,
        ],
    )?;
    Ok(run.samples.iter().rev().copied().collect())
}

/// Profile track seeded deep on the departing branch and integrated forward
/// only, from the decay (transversally contracting forward) through the
/// rise into P2. The seed itself is the -inf endpoint.
fn departing_track(
    params: &WaveParams,
    c: f64,
    cfg: &ShootConfig,
) -> Result<Vec<Sample>, ReconstructError> {
    let seed = seed_l1(params, c, PROFILE_EPS).point;
    let run_cfg = profile_config(&cfg.integrator, departure_span(params, c, PROFILE_EPS));
    let run = integrate(
        params,
        c,
        seed,
        Direction::Forward,
        &StopRule::first(&[EventKind::ConvergedP2]),
        &run_cfg,
    )?;
    expect_terminal(c, &run, &[EventKind::ConvergedP2, EventKind::BudgetExhausted])?;
    Ok(run.samples.clone())
}

/// Shift the track so the picked crossing of `level` lands at xi = 0.
fn anchored(
    samples: Vec<Sample>,
    level: f64,
    pick_first: bool,
    anchor: Anchor,
) -> Result<Profile, ReconstructError> {
    let crossings = level_crossings(&samples, level);
    let xi0 = *(if pick_first {
        crossings.first()
    } else {
        crossings.last()
    })
    .ok_or(ReconstructError::NoAnchor { level })?;
    Ok(Profile {
        samples: samples
            .into_iter()
            .map(|s| Sample {
                xi: s.xi - xi0,
                ..s
            })
            .collect(),
        anchor,
    })
}

/// Build the wave's profile at speed `c`, normalized per class: fronts put
/// f = 1/2 at xi = 0 (the crossing nearest their decaying end), oscillatory
/// waves the last crossing of f = 1, and the soliton its maximum.
///
/// Periodic waves have no decaying profile; ask [`periodic_profile`] for a
/// replay of the closed orbit over a number of periods.
pub fn reconstruct_profile(
    params: &WaveParams,
    c: f64,
    c_star: f64,
    cfg: &ShootConfig,
) -> Result<Profile, ReconstructError> {
    let class = classify_speed(params, c, c_star);
    match class.kind {
        WaveKind::PeriodicWave => Err(ReconstructError::PeriodicClass),
        WaveKind::Soliton => {
            let hom = extract_homoclinic(params, c_star, cfg)?;
            Ok(Profile {
                samples: hom.samples,
                anchor: Anchor::MaxAtZero,
            })
        }
        WaveKind::FrontOneToZeroMonotone | WaveKind::FrontOneToZeroDampedOsc => {
            let track = arriving_track(params, c, cfg, HeadStop::IntoP2)?;
            anchored(track, 0.5, false, Anchor::HalfLevelAtZero)
        }
        WaveKind::OscillatoryToZero => {
            let track =
                arriving_track(params, c, cfg, HeadStop::CrossingCap(OSC_CROSSING_CAP))?;
            anchored(track, 1.0, false, Anchor::CrossingAtZero)
        }
        WaveKind::FrontZeroToOne => {
            let track = departing_track(params, c, cfg)?;
            anchored(track, 0.5, true, Anchor::HalfLevelAtZero)
        }
    }
}

/// The periodic wave at `c` as the closed cycle orbit replayed over
/// `periods` periods, with a maximum at xi = 0 (the replay is re-centered
/// on the middle copy so both sides of the anchor are populated).
pub fn periodic_profile(
    params: &WaveParams,
    c: f64,
    periods: usize,
    cfg: &ShootConfig,
) -> Result<Profile, ReconstructError> {
    let cycle = find_limit_cycle(params, c, cfg)?;
    if !cycle.found {
        return Err(ReconstructError::NoCycle { c });
    }
    let orbit = cycle
        .orbit
        .as_ref()
        .expect("a found cycle carries its orbit");
    let period = cycle.period.expect("a found cycle carries its period");
    let periods = periods.max(1);
    let mid = (periods / 2) as f64 * period;
    let mut samples = Vec::with_capacity(periods * orbit.samples.len());
    for rep in 0..periods {
        let off = rep as f64 * period - mid;
        let skip = if rep == 0 { 0 } else { 1 };
        samples.extend(orbit.samples.iter().skip(skip).map(|s| Sample {
            xi: s.xi + off,
            x: s.x,
            y: s.y,
        }));
    }
    Ok(Profile {
        samples,
        anchor: Anchor::MaxAtZero,
    })
}

/// One pass/fail entry of a profile verification.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The outcome of replaying a classification's claims against a profile.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub items: Vec<CheckItem>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    fn push(&mut self, name: impl Into<String>, pass: bool, detail: String) {
        self.items.push(CheckItem {
            name: name.into(),
            pass,
            detail,
        });
    }
}

/// Peak |f - 1| of each full oscillation arc (between consecutive crossings
/// of f = 1), in sample order.
fn oscillation_amplitudes(samples: &[Sample]) -> Vec<f64> {
    let mut cross_idx = Vec::new();
    for (i, w) in samples.windows(2).enumerate() {
        let a = w[0].x - 1.0;
        let b = w[1].x - 1.0;
        if a == 0.0 || a * b < 0.0 {
            cross_idx.push(i);
        }
    }
    let mut amps = Vec::new();
    for pair in cross_idx.windows(2) {
        let mut amp = 0.0f64;
        for s in &samples[pair[0] + 1..=pair[1]] {
            amp = amp.max((s.x - 1.0).abs());
        }
        amps.push(amp);
    }
    amps
}

/// Fit the claimed decay law over the quarter of the profile nearest the
/// law's end. Exponential laws are fitted directly; algebraic laws are
/// first re-expressed against the law's virtual blow-up origin (calibrated
/// from the end sample via [`tail_shift`]), so the window need not reach
/// asymptopia on its own — the creep toward an algebraic tail is orders of
/// magnitude longer than the seeded arc.
pub fn fit_end(
    profile: &Profile,
    law: &TailLaw,
    params: &WaveParams,
    c: f64,
) -> Result<FitResult, FitError> {
    let xf: Vec<(f64, f64)> = profile.samples.iter().map(|s| (s.xi, s.x)).collect();
    let first = xf.first().copied().unwrap_or((0.0, 0.0));
    let last = xf.last().copied().unwrap_or((0.0, 0.0));
    let minus = law.end == End::MinusInfinity;
    let window = if minus {
        (first.0, 0.75 * first.0)
    } else {
        (0.75 * last.0, last.0)
    };
    match law.kind {
        TailKind::Exponential => fit_tail(&xf, law, window),
        TailKind::Algebraic => {
            let (branch, end_sample) = if minus {
                (Branch::Unstable, first)
            } else {
                (Branch::Stable, last)
            };
            let shift = tail_shift(params, c, branch, end_sample.1);
            let origin = if minus {
                end_sample.0 + shift
            } else {
                end_sample.0 - shift
            };
            let shifted: Vec<(f64, f64)> = xf.iter().map(|&(xi, f)| (xi - origin, f)).collect();
            fit_tail(&shifted, law, (window.0 - origin, window.1 - origin))
        }
    }
}

fn push_fit_items(
    report: &mut VerifyReport,
    tag: &str,
    law: &TailLaw,
    fit: Result<FitResult, FitError>,
) {
    match fit {
        Ok(fit) => {
            let rate_ok = (fit.measured - law.rate).abs() <= RATE_FIT_TOL * law.rate;
            report.push(
                format!("tail_rate({tag})"),
                rate_ok,
                format!(
                    "measured {:.6} vs predicted {:.6} ({} samples)",
                    fit.measured, law.rate, fit.samples
                ),
            );
            if let Some(constant) = law.constant {
                let const_ok = (fit.constant - constant).abs() <= CONSTANT_FIT_TOL * constant;
                report.push(
                    format!("tail_constant({tag})"),
                    const_ok,
                    format!("measured {:.6} vs predicted {:.6}", fit.constant, constant),
                );
            }
        }
        Err(e) => report.push(format!("tail_rate({tag})"), false, e.to_string()),
    }
}

/// Replay the classification's claims against a reconstructed profile:
/// endpoint levels, the anchor, monotonicity or oscillation as claimed,
/// tail laws by least-squares fits, and the integrated energy identity.
pub fn verify_profile(
    profile: &Profile,
    class: &WaveClass,
    params: &WaveParams,
    c: f64,
) -> VerifyReport {
    let mut report = VerifyReport { items: Vec::new() };
    let samples = &profile.samples;
    if samples.len() < 2 {
        report.push("nonempty", false, "profile has fewer than 2 samples".into());
        return report;
    }
    let first = samples[0];
    let last = *samples.last().unwrap();
    let (lo, hi) = (first.xi, last.xi);

    // f >= 0 throughout.
    let min_f = samples.iter().map(|s| s.x).fold(f64::INFINITY, f64::min);
    report.push(
        "nonnegative",
        min_f >= -1e-12,
        format!("min f = {min_f:.3e}"),
    );

    // The anchor value at xi = 0.
    match samples.windows(2).find(|w| w[0].xi <= 0.0 && 0.0 <= w[1].xi) {
        Some(w) => {
            let f0 = hermite_value(&w[0], &w[1], 0.0);
            let (want, got_ok) = match profile.anchor {
                Anchor::MaxAtZero => {
                    let fmax = samples.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max);
                    (fmax, (f0 - fmax).abs() <= 1e-7 * fmax.max(1.0))
                }
                Anchor::HalfLevelAtZero => (0.5, (f0 - 0.5).abs() <= ANCHOR_TOL),
                Anchor::CrossingAtZero => (1.0, (f0 - 1.0).abs() <= ANCHOR_TOL),
            };
            report.push(
                "anchor",
                got_ok,
                format!("f(0) = {f0:.6} vs {want:.6} for {}", profile.anchor.name()),
            );
        }
        None => report.push("anchor", false, "xi = 0 lies outside the span".into()),
    }

    // Per-end claims.
    for slot in 0..2 {
        let tag = if slot == 0 { "-inf" } else { "+inf" };
        let end_sample = if slot == 0 { first } else { last };
        match &class.tails[slot] {
            TailDescriptor::Zero(law) => {
                report.push(
                    format!("endpoint({tag})"),
                    end_sample.x.abs() <= ENDPOINT_TOL,
                    format!("f -> {:.3e}, want 0 within {ENDPOINT_TOL:.0e}", end_sample.x),
                );
                if (slot == 0 && lo >= 0.0) || (slot == 1 && hi <= 0.0) {
                    report.push(
                        format!("tail_rate({tag})"),
                        false,
                        "no decay side beyond the anchor".into(),
                    );
                    continue;
                }
                push_fit_items(&mut report, tag, law, fit_end(profile, law, params, c));
            }
            TailDescriptor::One { oscillatory } => {
                report.push(
                    format!("endpoint({tag})"),
                    (end_sample.x - 1.0).abs() <= ENDPOINT_TOL,
                    format!(
                        "f -> {:.6}, want 1 within {ENDPOINT_TOL:.0e}",
                        end_sample.x
                    ),
                );
                if *oscillatory {
                    let crossings = level_crossings(samples, 1.0).len();
                    report.push(
                        format!("oscillation({tag})"),
                        crossings >= 2,
                        format!("{crossings} crossings of f = 1, want >= 2"),
                    );
                }
            }
            TailDescriptor::Periodic => {
                let side: Vec<Sample> = samples
                    .iter()
                    .filter(|s| if slot == 0 { s.xi <= 0.0 } else { s.xi >= 0.0 })
                    .copied()
                    .collect();
                let side = if side.len() >= 8 { side } else { samples.clone() };
                let smin = side.iter().map(|s| s.x).fold(f64::INFINITY, f64::min);
                let smax = side.iter().map(|s| s.x).fold(f64::NEG_INFINITY, f64::max);
                let crossings = level_crossings(&side, 1.0).len();
                report.push(
                    format!("oscillation({tag})"),
                    smin < 1.0 && 1.0 < smax && crossings >= 2,
                    format!(
                        "f straddles 1 on [{smin:.4}, {smax:.4}] with {crossings} crossings"
                    ),
                );
            }
        }
    }

    // Monotonicity, when claimed.
    if class.monotone == Some(true) {
        let decreasing = matches!(class.tails[0], TailDescriptor::One { .. });
        let mut worst = f64::NEG_INFINITY;
        for w in samples.windows(2) {
            let d = w[1].x - w[0].x;
            worst = worst.max(if decreasing { d } else { -d });
        }
        report.push(
            "monotone",
            worst <= MONOTONE_SLACK,
            format!(
                "{}; worst counter-step {worst:.3e} vs slack {MONOTONE_SLACK:.0e}",
                if decreasing {
                    "non-increasing"
                } else {
                    "non-decreasing"
                }
            ),
        );
    }

    // Damped oscillation: amplitudes must shrink toward -inf, i.e. grow in
    // forward xi. Successive arcs alternate above/below the level 1 with
    // systematically different sizes, so compare same-side arcs (stride 2).
    if class.kind == WaveKind::FrontOneToZeroDampedOsc {
        let amps = oscillation_amplitudes(samples);
        let growing = amps.len() >= 3
            && (0..amps.len() - 2).all(|i| amps[i] < amps[i + 2] + 1e-9);
        report.push(
            "damped_amplitudes",
            growing,
            format!(
                "{} oscillation arcs, same-side amplitudes growing away from -inf: {growing}",
                amps.len()
            ),
        );
    }

    // The soliton has exactly one interior maximum.
    if class.kind == WaveKind::Soliton {
        let mut maxima = 0;
        for w in samples.windows(2) {
            if w[0].y > 0.0 && w[1].y <= 0.0 {
                maxima += 1;
            }
        }
        report.push(
            "single_max",
            maxima == 1,
            format!("{maxima} downward crossings of f' = 0, want exactly 1"),
        );
    }

    // The integrated energy identity holds on any accurate solution arc; the
    // bound allows for trapezoid quadrature error over long spiral heads.
    let (_, normalizer) = crate::shoot::energy_residual(samples, params, c);
    let gap = crate::shoot::energy_identity_gap(samples, params, c);
    let bound = 1e-2 * normalizer.max(1.0);
    report.push(
        "energy_identity",
        gap.abs() <= bound,
        format!("defect {:.3e} vs bound {:.3e}", gap, bound),
    );

    report
}

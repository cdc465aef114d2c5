//! Shooting for the critical speed c* and the homoclinic orbit.
//!
//! The special orbit l1 leaves P1 into the first quadrant; X1(c) is the
//! abscissa of its first return to the X axis (or 1 when it sinks into P2
//! without crossing). The orbit l0 enters P1 through the fourth quadrant, so
//! sweeping it backward yields X0(c), the abscissa of its own first axis
//! crossing - possibly 1 (it emanates from P2) or unbounded (it escapes).
//! The gap g(c) = X1(c) - X0(c) grows with c and changes sign exactly once;
//! at the root c* the two orbits coincide and form a homoclinic loop, the
//! solitary wave. Everything here reduces to locating that sign change by a
//! parallel scan plus bisection, then splicing the two arcs together.
//!
//! Near P1 the passage of an orbit along the center manifold is slow: it
//! consumes roughly |c| eps^(1-q) / (q-1) units of xi to leave the
//! eps-neighborhood when q > 1. Budgets are padded with that estimate so
//! the slowness is paid for in steps, not reported as an anomaly.

use crate::integrate::{
    integrate, Direction, EventKind, IntegrateError, IntegratorConfig, Sample, StopRule,
    Trajectory,
};
use crate::local::{blowup_case, seed_l0, seed_l1, BlowupCase};
use crate::model::{powx, WaveParams};
use crate::par;
use serde::Serialize;
use thiserror::Error;

/// Seed offset and root tolerance for the shooting argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootConfig {
    /// Distance from P1 at which the special orbits are seeded.
    pub eps: f64,
    /// Bisection stops when the c-bracket is at most this wide.
    pub c_tol: f64,
    pub integrator: IntegratorConfig,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            eps: 1e-4,
            c_tol: 1e-6,
            integrator: IntegratorConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum ShootError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("no sign change of X1 - X0 for c in [{lo}, {hi}] after {expansions} left expansions")]
    NoBracket { lo: f64, hi: f64, expansions: u32 },
    #[error("unexpected orbit behavior at c = {c}: {detail}")]
    Anomaly { c: f64, detail: String },
    #[error("axis crossings differ by {mismatch:.3e} (tolerance {tol:.3e}) at c = {c}")]
    MatchFailure { c: f64, mismatch: f64, tol: f64 },
    #[error("speed bound violated: {detail}")]
    BoundViolation { detail: String },
    #[error("c = {c} is outside the regime of this check: needs {needed}")]
    OutOfRegime { c: f64, needed: String },
}

/// xi-length scale of the departure from the eps-neighborhood of P1.
pub(crate) fn departure_span(params: &WaveParams, c: f64, eps: f64) -> f64 {
    let q = params.q();
    if q == 1.0 {
        // Saddle: both rates are exponential; the slow one dominates.
        let disc = (c * c + 4.0).sqrt();
        let slow = ((c + disc) / 2.0).min((disc - c) / 2.0);
        return (1.0 / eps).ln() / slow;
    }
    let mut span = if c != 0.0 {
        c.abs() * powx(eps, 1.0 - q) / (q - 1.0)
    } else {
        0.0
    };
    if c.abs() < 0.5 {
        // Close to (or at) c = 0 the orbits hug the zero-speed tangencies
        // Y = a X^m instead; traversing one costs the integral of dX/(aX^m).
        let ba = blowup_case(params);
        let n = params.n();
        let tangencies: [(f64, f64); 2] = match ba.case {
            BlowupCase::ConvectionDominated => {
                [(1.0 / params.kn(), q + 1.0 - n), (params.k(), n)]
            }
            _ => [
                (ba.v_out.abs(), ba.tangency_power),
                (ba.v_in.abs(), ba.tangency_power),
            ],
        };
        for (a, m) in tangencies {
            let t = if (m - 1.0).abs() < 1e-12 {
                (1.0 / eps).ln() / a
            } else {
                powx(eps, 1.0 - m) / (a * (m - 1.0))
            };
            span = span.max(t);
        }
    }
    span
}

/// Extend the xi budget so a center-manifold departure fits comfortably.
pub(crate) fn padded_config(cfg: &IntegratorConfig, span: f64) -> IntegratorConfig {
    cfg.with_budget(cfg.xi_budget.max(4.0 * span + 200.0))
}

/// Where one of the special orbits first meets the X axis.
#[derive(Debug, Clone)]
pub struct AxisHit {
    /// Crossing abscissa, or exactly 1.0 when the orbit sank into P2.
    pub x: f64,
    /// xi of the crossing relative to the seed.
    pub xi: f64,
    pub at_p2: bool,
    pub trajectory: Trajectory,
}

/// Outcome of sweeping l0 backward.
#[derive(Debug, Clone)]
pub enum X0Outcome {
    Hit(AxisHit),
    /// The backward orbit escaped with Y < 0: X0(c) is unbounded.
    Unbounded(Trajectory),
}

/// First axis crossing of l1, integrated forward; X1 = 1 when l1 converges
/// to P2 without crossing.
pub fn compute_x1(params: &WaveParams, c: f64, cfg: &ShootConfig) -> Result<AxisHit, ShootError> {
    let seed = seed_l1(params, c, cfg.eps);
    let icfg = padded_config(&cfg.integrator, departure_span(params, c, cfg.eps));
    let traj = integrate(
        params,
        c,
        seed.point,
        Direction::Forward,
        &StopRule::first(&[EventKind::YZeroDown, EventKind::ConvergedP2]),
        &icfg,
    )?;
    let ev = *traj
        .final_event()
        .ok_or_else(|| anomaly(c, "l1 run ended without any event"))?;
    match ev.kind {
        EventKind::YZeroDown => Ok(AxisHit {
            x: ev.x,
            xi: ev.xi,
            at_p2: false,
            trajectory: traj,
        }),
        EventKind::ConvergedP2 => Ok(AxisHit {
            x: 1.0,
            xi: ev.xi,
            at_p2: true,
            trajectory: traj,
        }),
        other => Err(anomaly(
            c,
            &format!(
                "l1 ended with {} at (X, Y) = ({:.6e}, {:.6e})",
                other.name(),
                ev.x,
                ev.y
            ),
        )),
    }
}

/// First axis crossing of l0, integrated backward; X0 = 1 when the backward
/// orbit converges to P2 (the direct P2 -> P1 front), unbounded when it
/// escapes below the axis.
pub fn compute_x0(params: &WaveParams, c: f64, cfg: &ShootConfig) -> Result<X0Outcome, ShootError> {
    let seed = seed_l0(params, c, cfg.eps);
    let icfg = padded_config(&cfg.integrator, departure_span(params, c, cfg.eps));
    let traj = integrate(
        params,
        c,
        seed.point,
        Direction::Backward,
        &StopRule::first(&[
            EventKind::YZeroUp,
            EventKind::YZeroDown,
            EventKind::ConvergedP2,
        ]),
        &icfg,
    )?;
    let ev = *traj
        .final_event()
        .ok_or_else(|| anomaly(c, "l0 run ended without any event"))?;
    match ev.kind {
        EventKind::YZeroUp | EventKind::YZeroDown => Ok(X0Outcome::Hit(AxisHit {
            x: ev.x,
            xi: ev.xi,
            at_p2: false,
            trajectory: traj,
        })),
        EventKind::ConvergedP2 => Ok(X0Outcome::Hit(AxisHit {
            x: 1.0,
            xi: ev.xi,
            at_p2: true,
            trajectory: traj,
        })),
        EventKind::Escape if ev.y < 0.0 => Ok(X0Outcome::Unbounded(traj)),
        other => Err(anomaly(
            c,
            &format!(
                "l0 ended with {} at (X, Y) = ({:.6e}, {:.6e})",
                other.name(),
                ev.x,
                ev.y
            ),
        )),
    }
}

fn anomaly(c: f64, detail: &str) -> ShootError {
    ShootError::Anomaly {
        c,
        detail: detail.to_string(),
    }
}

/// g(c) = X1(c) - X0(c); -inf encodes an unbounded X0.
pub fn connection_gap(params: &WaveParams, c: f64, cfg: &ShootConfig) -> Result<f64, ShootError> {
    let x1 = compute_x1(params, c, cfg)?;
    Ok(match compute_x0(params, c, cfg)? {
        X0Outcome::Hit(hit) => x1.x - hit.x,
        X0Outcome::Unbounded(_) => f64::NEG_INFINITY,
    })
}

/// One point of a speed scan. `x0 = None` marks an unbounded X0; `gap` is
/// None when either side could not be measured at all.
#[derive(Debug, Clone, Serialize)]
pub struct GapSample {
    pub c: f64,
    pub x1: Option<f64>,
    pub x0: Option<f64>,
    pub gap: Option<f64>,
}

/// Evaluate X1, X0 and their gap on an inclusive c-grid, in parallel.
/// Anomalies at single grid points surface as missing fields, not errors.
pub fn scan_gap(
    params: &WaveParams,
    c_lo: f64,
    c_hi: f64,
    step: f64,
    cfg: &ShootConfig,
) -> Vec<GapSample> {
    let count = ((c_hi - c_lo) / step).round().max(0.0) as usize;
    let cs: Vec<f64> = (0..=count).map(|i| c_lo + i as f64 * step).collect();
    par::map_collect(cs, |c| {
        let x1 = compute_x1(params, c, cfg).ok();
        let x0 = compute_x0(params, c, cfg).ok();
        let (x0_val, x0_unbounded) = match &x0 {
            Some(X0Outcome::Hit(h)) => (Some(h.x), false),
            Some(X0Outcome::Unbounded(_)) => (None, true),
            None => (None, false),
        };
        let gap = match (&x1, x0_unbounded) {
            (Some(h), true) => {
                let _ = h;
                Some(f64::NEG_INFINITY)
            }
            (Some(h), false) => x0_val.map(|v| h.x - v),
            (None, _) => None,
        };
        GapSample {
            c,
            x1: x1.map(|h| h.x),
            x0: x0_val,
            gap,
        }
    })
}

/// The critical speed and how it was found.
#[derive(Debug, Clone, Serialize)]
pub struct CStarResult {
    pub params: WaveParams,
    pub c_star: f64,
    pub bracket: [f64; 2],
    pub iterations: u32,
    pub kn: f64,
    pub upper_bound: f64,
}

/// Locate c* by scanning g(c) over [-2 sqrt(p-q), kn + 2 sqrt(p-q)] at
/// resolution sqrt(p-q)/8 (expanding left if the sign change is not inside),
/// then bisecting the bracketing cell down to `c_tol`. The result is checked
/// against the theoretical bounds: 0 < c* < kn + 2 sqrt(p-q), and c* on the
/// correct side of kn according to the sign of n - (p+q+1).
pub fn find_cstar(params: &WaveParams, cfg: &ShootConfig) -> Result<CStarResult, ShootError> {
    let root_pq = (params.p() - params.q()).sqrt();
    let step = root_pq / 8.0;
    let upper = params.node_speed_upper();
    let mut window = (-2.0 * root_pq, upper);
    let mut expansions = 0u32;
    let bracket = loop {
        let scan = scan_gap(params, window.0, window.1, step, cfg);
        let found = scan.windows(2).find_map(|w| match (w[0].gap, w[1].gap) {
            (Some(gl), Some(gr)) if gl < 0.0 && gr >= 0.0 => Some((w[0].c, w[1].c)),
            _ => None,
        });
        if let Some(b) = found {
            break b;
        }
        if expansions >= 3 {
            return Err(ShootError::NoBracket {
                lo: window.0,
                hi: upper,
                expansions,
            });
        }
        // Slide the window left with one-cell overlap.
        let width = window.1 - window.0;
        window = (window.0 - width, window.0 + step);
        expansions += 1;
    };

    let (mut lo, mut hi) = bracket;
    let mut iterations = 0u32;
    while hi - lo > cfg.c_tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if connection_gap(params, mid, cfg)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let c_star = 0.5 * (lo + hi);

    if !(c_star > 0.0 && c_star < upper) {
        return Err(ShootError::BoundViolation {
            detail: format!(
                "c* = {c_star:.8} falls outside (0, kn + 2 sqrt(p-q)) = (0, {upper:.8})"
            ),
        });
    }
    let hopf = params.hopf_sign();
    let kn = params.kn();
    if hopf < -1e-9 && c_star >= kn {
        return Err(ShootError::BoundViolation {
            detail: format!("n < p+q+1 requires c* < kn, got c* = {c_star:.8} vs kn = {kn:.8}"),
        });
    }
    if hopf > 1e-9 && c_star <= kn {
        return Err(ShootError::BoundViolation {
            detail: format!("n > p+q+1 requires c* > kn, got c* = {c_star:.8} vs kn = {kn:.8}"),
        });
    }

    Ok(CStarResult {
        params: *params,
        c_star,
        bracket: [lo, hi],
        iterations,
        kn,
        upper_bound: upper,
    })
}

/// The homoclinic loop at c*, spliced from the two shooting arcs and aligned
/// so its single maximum sits at xi = 0.
#[derive(Debug, Clone)]
pub struct Homoclinic {
    pub c: f64,
    /// (xi, f, f') samples with strictly increasing xi.
    pub samples: Vec<Sample>,
    /// Height of the loop: X1(c*) = X0(c*) > 1.
    pub apex_x: f64,
    /// |X1 - X0| left over at the splice.
    pub mismatch: f64,
}

pub fn extract_homoclinic(
    params: &WaveParams,
    c_star: f64,
    cfg: &ShootConfig,
) -> Result<Homoclinic, ShootError> {
    let up = compute_x1(params, c_star, cfg)?;
    if up.at_p2 {
        return Err(anomaly(
            c_star,
            "l1 sank into P2 instead of crossing the axis; c is not a homoclinic speed",
        ));
    }
    let down = match compute_x0(params, c_star, cfg)? {
        X0Outcome::Hit(h) if !h.at_p2 => h,
        X0Outcome::Hit(_) => {
            return Err(anomaly(
                c_star,
                "l0 emanates from P2 here; c is not a homoclinic speed",
            ))
        }
        X0Outcome::Unbounded(_) => {
            return Err(anomaly(
                c_star,
                "X0 is unbounded here; c lies below the homoclinic speed",
            ))
        }
    };
    let mismatch = (up.x - down.x).abs();
    let tol = 1e-4 * up.x.abs().max(1.0);
    if mismatch > tol {
        return Err(ShootError::MatchFailure {
            c: c_star,
            mismatch,
            tol,
        });
    }

    let mut samples = Vec::with_capacity(
        up.trajectory.samples.len() + down.trajectory.samples.len(),
    );
    // Rising arc: shift so the crossing (its last sample) lands at xi = 0.
    for s in &up.trajectory.samples {
        samples.push(Sample {
            xi: s.xi - up.xi,
            x: s.x,
            y: s.y,
        });
    }
    // Falling arc: the backward run ends at the crossing (xi = down.xi < 0);
    // reverse it and shift so the crossing continues from xi = 0.
    for s in down.trajectory.samples.iter().rev().skip(1) {
        samples.push(Sample {
            xi: s.xi - down.xi,
            x: s.x,
            y: s.y,
        });
    }
    Ok(Homoclinic {
        c: c_star,
        samples,
        apex_x: up.x,
        mismatch,
    })
}

/// Trapezoidal values of (integral of (c - kn f^(n-1)) f'^2 dxi, integral of
/// f'^2 dxi). The first vanishes on a homoclinic orbit; the second is the
/// natural normalizer.
pub fn energy_residual(samples: &[Sample], params: &WaveParams, c: f64) -> (f64, f64) {
    let kn = params.kn();
    let nm1 = params.n() - 1.0;
    let weight = |s: &Sample| (c - kn * powx(s.x.max(0.0), nm1)) * s.y * s.y;
    let mut residual = 0.0;
    let mut normalizer = 0.0;
    for w in samples.windows(2) {
        let dxi = w[1].xi - w[0].xi;
        residual += 0.5 * dxi * (weight(&w[0]) + weight(&w[1]));
        normalizer += 0.5 * dxi * (w[0].y * w[0].y + w[1].y * w[1].y);
    }
    (residual, normalizer)
}

/// Defect in the integrated energy identity
///   integral (c - kn f^(n-1)) f'^2 = [f'^2 / 2] + [f^(p+1)/(p+1) - f^(q+1)/(q+1)]
/// between the endpoints of the sample range; near zero on any accurate arc.
pub fn energy_identity_gap(samples: &[Sample], params: &WaveParams, c: f64) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let (residual, _) = energy_residual(samples, params, c);
    let p = params.p();
    let q = params.q();
    let pot =
        |x: f64| powx(x.max(0.0), p + 1.0) / (p + 1.0) - powx(x.max(0.0), q + 1.0) / (q + 1.0);
    let first = samples.first().unwrap();
    let last = samples.last().unwrap();
    let kinetic = 0.5 * (last.y * last.y - first.y * first.y);
    residual - kinetic - (pot(last.x) - pot(first.x))
}

/// (X^p - X^q)/(X - 1), continued by its limit p - q at X = 1.
fn secant_slope(params: &WaveParams, x: f64) -> f64 {
    if (x - 1.0).abs() < 1e-9 {
        params.p() - params.q()
    } else {
        (powx(x, params.p()) - powx(x, params.q())) / (x - 1.0)
    }
}

/// Grid minimum of the flow expression across the line Y = m(X - 1) with
/// m = (c - kn)/2, for node speeds c >= kn + 2 sqrt(p-q). A nonnegative
/// minimum certifies the invariant triangle that carries the direct
/// P2 -> P1 connection.
pub fn direct_connection_margin(
    params: &WaveParams,
    c: f64,
    grid: usize,
) -> Result<f64, ShootError> {
    let upper = params.node_speed_upper();
    if c < upper {
        return Err(ShootError::OutOfRegime {
            c,
            needed: format!("c >= kn + 2 sqrt(p-q) = {upper:.8}"),
        });
    }
    let m = (c - params.kn()) / 2.0;
    let kn = params.kn();
    let nm1 = params.n() - 1.0;
    let mut min = f64::INFINITY;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let val = (x - 1.0) * (m * m - m * c + m * kn * powx(x, nm1) + secant_slope(params, x));
        min = min.min(val);
    }
    Ok(min)
}

/// Grid minimum of the flow expression across the line Y = m(1 - X) with
/// m = sqrt(p-q), for c <= -2 sqrt(p-q). A positive minimum certifies the
/// invariant triangle that forces the monotone P1 -> P2 front.
pub fn monotone_front_margin(
    params: &WaveParams,
    c: f64,
    grid: usize,
) -> Result<f64, ShootError> {
    let root_pq = (params.p() - params.q()).sqrt();
    if c > -2.0 * root_pq {
        return Err(ShootError::OutOfRegime {
            c,
            needed: format!("c <= -2 sqrt(p-q) = {:.8}", -2.0 * root_pq),
        });
    }
    let m = root_pq;
    let kn = params.kn();
    let nm1 = params.n() - 1.0;
    let mut min = f64::INFINITY;
    // X = 1 is excluded: the expression vanishes there by construction.
    for i in 0..grid {
        let x = i as f64 / grid as f64;
        let val = (x - 1.0) * (m * m + m * c - kn * m * powx(x, nm1) + secant_slope(params, x));
        min = min.min(val);
    }
    Ok(min)
}

//! Adaptive integration of the profile system with event detection.
//!
//! The stepper is an embedded explicit Dormand-Prince 5(4) pair with the
//! usual PI-free step control (accept when the scaled error norm is <= 1,
//! propagate the 5th-order solution, reuse the last stage). Events are
//! detected by sign monitoring across accepted steps and localized by
//! bisection on RK sub-steps taken from the step's start state, so the
//! localized point inherits the step's accuracy rather than an
//! interpolant's.
//!
//! Two convergence events need care because P1 = (0,0) is non-hyperbolic:
//! entering the convergence radius only counts when the local linearization
//! predicts contraction in the direction of integration (otherwise a
//! trajectory sliding along the slow center manifold would be declared
//! converged while still moving). On the center manifold itself, arrival is
//! instead declared once X has crept below a much smaller threshold with the
//! Y-sign that an approach in the current direction requires.

use crate::model::{vector_field, PhasePoint, WaveParams};
use serde::Serialize;
use std::io::{BufRead, Write};
use thiserror::Error;

/// Orientation of the integration in xi. Backward integration advances the
/// negated field and records strictly decreasing xi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// Everything that can halt or annotate an integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    /// Y crossed zero from + to - (in sample order).
    YZeroDown,
    /// Y crossed zero from - to +.
    YZeroUp,
    /// X crossed zero.
    XZero,
    /// |X| or |Y| left the configured box.
    Escape,
    /// Arrived at P1 = (0,0).
    ConvergedP1,
    /// Arrived at P2 = (1,0).
    ConvergedP2,
    /// The xi budget ran out.
    BudgetExhausted,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::YZeroDown => "YZeroDown",
            EventKind::YZeroUp => "YZeroUp",
            EventKind::XZero => "XZero",
            EventKind::Escape => "Escape",
            EventKind::ConvergedP1 => "ConvergedP1",
            EventKind::ConvergedP2 => "ConvergedP2",
            EventKind::BudgetExhausted => "BudgetExhausted",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "YZeroDown" => Some(EventKind::YZeroDown),
            "YZeroUp" => Some(EventKind::YZeroUp),
            "XZero" => Some(EventKind::XZero),
            "Escape" => Some(EventKind::Escape),
            "ConvergedP1" => Some(EventKind::ConvergedP1),
            "ConvergedP2" => Some(EventKind::ConvergedP2),
            "BudgetExhausted" => Some(EventKind::BudgetExhausted),
            _ => None,
        }
    }
}

/// A localized event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub xi: f64,
    pub x: f64,
    pub y: f64,
}

/// One recorded state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub xi: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.x, self.y)
    }
}

/// Which recorded events halt the run, and after how many matches.
#[derive(Debug, Clone)]
pub struct StopRule {
    kinds: Vec<EventKind>,
    count: usize,
}

impl StopRule {
    /// Stop at the first event of any of the given kinds.
    pub fn first(kinds: &[EventKind]) -> Self {
        StopRule {
            kinds: kinds.to_vec(),
            count: 1,
        }
    }

    /// Stop at the n-th event matching the given kinds.
    pub fn nth(kinds: &[EventKind], count: usize) -> Self {
        StopRule {
            kinds: kinds.to_vec(),
            count: count.max(1),
        }
    }

    /// Never stop on a crossing; run to a terminal event or the budget.
    pub fn none() -> Self {
        StopRule {
            kinds: Vec::new(),
            count: 1,
        }
    }

    fn matches(&self, kind: EventKind) -> bool {
        self.kinds.contains(&kind)
    }
}

/// Tolerances and guard rails for the stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Escape bound on |X|.
    pub x_max: f64,
    /// Escape bound on |Y|.
    pub y_max: f64,
    /// Maximum |xi| distance from the seed.
    pub xi_budget: f64,
    /// Radius around an equilibrium inside which convergence may be declared.
    pub converge_radius: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 10.0,
            x_max: 50.0,
            y_max: 100.0,
            xi_budget: 1e4,
            converge_radius: 1e-8,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), IntegrateError> {
        let bad = |msg: &str| Err(IntegrateError::InvalidConfig(msg.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad("rel_tol must lie in (0, 1)");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return bad("abs_tol must lie in (0, 1)");
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return bad("max_step must be positive and finite");
        }
        if !(self.x_max > 1.0 && self.y_max > 0.0) {
            return bad("escape bounds must satisfy x_max > 1, y_max > 0");
        }
        if !(self.xi_budget >= 0.0 && self.xi_budget.is_finite()) {
            return bad("xi_budget must be nonnegative and finite");
        }
        if !(self.converge_radius > 0.0 && self.converge_radius < 1e-2) {
            return bad("converge_radius must lie in (0, 1e-2)");
        }
        Ok(())
    }

    /// Copy with a different xi budget.
    pub fn with_budget(mut self, budget: f64) -> Self {
        self.xi_budget = budget;
        self
    }
}

#[derive(Debug, Clone, Error)]
pub enum IntegrateError {
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("seed state is not finite")]
    BadSeed,
    #[error("step size underflow at xi = {xi}; the problem looks stiff here")]
    StiffnessFailure { xi: f64 },
    #[error("state became non-finite near xi = {xi}")]
    NonFinite { xi: f64 },
}

/// An integrated orbit: samples in integration order plus all detected
/// events. xi is strictly monotone (increasing forward, decreasing backward).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub direction: Direction,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self.samples.last().expect("trajectory has at least the seed")
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// The event that halted the run (always the last one recorded).
    pub fn final_event(&self) -> Option<&Event> {
        self.events.last()
    }

    pub fn xi_span(&self) -> f64 {
        (self.last().xi - self.samples[0].xi).abs()
    }

    /// (xi, x) pairs, e.g. for tail fitting against f = X.
    pub fn xf_samples(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.xi, s.x)).collect()
    }

    /// Write the CSV form: header `xi,x,y`, one row per sample at 15
    /// significant digits, then one comment line per event.
    pub fn to_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "xi,x,y")?;
        for s in &self.samples {
            writeln!(w, "{:.14e},{:.14e},{:.14e}", s.xi, s.x, s.y)?;
        }
        for e in &self.events {
            writeln!(
                w,
                "# event,{},{:.14e},{:.14e},{:.14e}",
                e.kind.name(),
                e.xi,
                e.x,
                e.y
            )?;
        }
        Ok(())
    }

    /// Parse the CSV form written by [`Trajectory::to_csv`]. The direction is
    /// recovered from the xi ordering.
    pub fn from_csv<R: BufRead>(r: R) -> Result<Trajectory, CsvError> {
        let mut samples = Vec::new();
        let mut events = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line.map_err(|e| CsvError::Io(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line == "xi,x,y" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() != 5 || parts[0] != "event" {
                    return Err(CsvError::Malformed { line: idx + 1 });
                }
                let kind = EventKind::from_name(parts[1])
                    .ok_or(CsvError::Malformed { line: idx + 1 })?;
                let nums: Result<Vec<f64>, _> =
                    parts[2..].iter().map(|s| s.parse::<f64>()).collect();
                let nums = nums.map_err(|_| CsvError::Malformed { line: idx + 1 })?;
                events.push(Event {
                    kind,
                    xi: nums[0],
                    x: nums[1],
                    y: nums[2],
                });
            } else {
                let nums: Result<Vec<f64>, _> =
                    line.split(',').map(|s| s.trim().parse::<f64>()).collect();
                let nums = nums.map_err(|_| CsvError::Malformed { line: idx + 1 })?;
                if nums.len() != 3 {
                    return Err(CsvError::Malformed { line: idx + 1 });
                }
                samples.push(Sample {
                    xi: nums[0],
                    x: nums[1],
                    y: nums[2],
                });
            }
        }
        if samples.is_empty() {
            return Err(CsvError::Empty);
        }
        let direction = if samples.len() >= 2 && samples[1].xi < samples[0].xi {
            Direction::Backward
        } else {
            Direction::Forward
        };
        Ok(Trajectory {
            direction,
            samples,
            events,
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum CsvError {
    #[error("I/O error reading CSV: {0}")]
    Io(String),
    #[error("malformed CSV at line {line}")]
    Malformed { line: usize },
    #[error("CSV holds no samples")]
    Empty,
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b5 - b4: error estimator weights (stage 7 = FSAL stage).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// How precisely an event function is driven to zero, relative to max(1, |X|).
const EVENT_TOL: f64 = 1e-10;
/// Center-manifold arrival threshold on X (and |Y|) at P1.
const EPS_ARRIVAL: f64 = 1e-6;

#[derive(Clone, Copy)]
struct StepResult {
    y_new: PhasePoint,
    err: f64,
    k_last: PhasePoint,
}

struct Stepper<'a> {
    params: &'a WaveParams,
    c: f64,
    sign: f64, // +1 forward, -1 backward
    cfg: IntegratorConfig,
}

impl<'a> Stepper<'a> {
    #[inline]
    fn field(&self, pt: PhasePoint) -> PhasePoint {
        let f = vector_field(self.params, self.c, pt);
        PhasePoint::new(self.sign * f.x, self.sign * f.y)
    }

    /// One 5th-order step of size h from y0 with k1 = field(y0) known.
    /// Returns the new state, the scaled error norm and the FSAL stage.
    fn step(&self, y0: PhasePoint, k1: PhasePoint, h: f64) -> StepResult {
        let at = |y: PhasePoint, dx: f64, dy: f64| PhasePoint::new(y.x + h * dx, y.y + h * dy);
        let k2 = self.field(at(y0, A2[0] * k1.x, A2[0] * k1.y));
        let k3 = self.field(at(
            y0,
            A3[0] * k1.x + A3[1] * k2.x,
            A3[0] * k1.y + A3[1] * k2.y,
        ));
        let k4 = self.field(at(
            y0,
            A4[0] * k1.x + A4[1] * k2.x + A4[2] * k3.x,
            A4[0] * k1.y + A4[1] * k2.y + A4[2] * k3.y,
        ));
        let k5 = self.field(at(
            y0,
            A5[0] * k1.x + A5[1] * k2.x + A5[2] * k3.x + A5[3] * k4.x,
            A5[0] * k1.y + A5[1] * k2.y + A5[2] * k3.y + A5[3] * k4.y,
        ));
        let k6 = self.field(at(
            y0,
            A6[0] * k1.x + A6[1] * k2.x + A6[2] * k3.x + A6[3] * k4.x + A6[4] * k5.x,
            A6[0] * k1.y + A6[1] * k2.y + A6[2] * k3.y + A6[3] * k4.y + A6[4] * k5.y,
        ));
        let y_new = at(
            y0,
            B5[0] * k1.x + B5[2] * k3.x + B5[3] * k4.x + B5[4] * k5.x + B5[5] * k6.x,
            B5[0] * k1.y + B5[2] * k3.y + B5[3] * k4.y + B5[4] * k5.y + B5[5] * k6.y,
        );
        let k7 = self.field(y_new);
        let err_x = h
            * (E[0] * k1.x + E[2] * k3.x + E[3] * k4.x + E[4] * k5.x + E[5] * k6.x + E[6] * k7.x);
        let err_y = h
            * (E[0] * k1.y + E[2] * k3.y + E[3] * k4.y + E[4] * k5.y + E[5] * k6.y + E[6] * k7.y);
        let sc_x = self.cfg.abs_tol + self.cfg.rel_tol * y0.x.abs().max(y_new.x.abs());
        let sc_y = self.cfg.abs_tol + self.cfg.rel_tol * y0.y.abs().max(y_new.y.abs());
        let err = (0.5 * ((err_x / sc_x).powi(2) + (err_y / sc_y).powi(2))).sqrt();
        StepResult {
            y_new,
            err,
            k_last: k7,
        }
    }

    /// Hairer-style starting step size.
    fn initial_step(&self, y0: PhasePoint, f0: PhasePoint, limit: f64) -> f64 {
        let sc_x = self.cfg.abs_tol + self.cfg.rel_tol * y0.x.abs();
        let sc_y = self.cfg.abs_tol + self.cfg.rel_tol * y0.y.abs();
        let d0 = (0.5 * ((y0.x / sc_x).powi(2) + (y0.y / sc_y).powi(2))).sqrt();
        let d1 = (0.5 * ((f0.x / sc_x).powi(2) + (f0.y / sc_y).powi(2))).sqrt();
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        }
        .min(limit);
        let y1 = PhasePoint::new(y0.x + h0 * f0.x, y0.y + h0 * f0.y);
        let f1 = self.field(y1);
        let d2 = (0.5 * (((f1.x - f0.x) / sc_x).powi(2) + ((f1.y - f0.y) / sc_y).powi(2))).sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(limit)
    }
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Integrate the profile system from `seed` until a stopping event, a
/// terminal event, or the xi budget. All detected events are recorded even
/// when they do not stop the run.
pub fn integrate(
    params: &WaveParams,
    c: f64,
    seed: PhasePoint,
    direction: Direction,
    stop: &StopRule,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrateError> {
    cfg.validate()?;
    if !seed.is_finite() {
        return Err(IntegrateError::BadSeed);
    }
    let dir_sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let stepper = Stepper {
        params,
        c,
        sign: dir_sign,
        cfg: *cfg,
    };
    let xi_of = |t: f64| dir_sign * t;

    let mut traj = Trajectory {
        direction,
        samples: vec![Sample {
            xi: 0.0,
            x: seed.x,
            y: seed.y,
        }],
        events: Vec::new(),
    };
    let mut matched = 0usize;

    // A stopping event, already localized, is appended and ends the run.
    macro_rules! finish_with {
        ($kind:expr, $xi:expr, $pt:expr) => {{
            push_sample(&mut traj, $xi, $pt);
            traj.events.push(Event {
                kind: $kind,
                xi: $xi,
                x: $pt.x,
                y: $pt.y,
            });
            return Ok(traj);
        }};
    }

    // The seed itself may already satisfy a terminal condition.
    if let Some(kind) = convergence_kind(params, c, direction, seed, cfg) {
        finish_with!(kind, 0.0, seed);
    }
    if seed.x.abs() > cfg.x_max || seed.y.abs() > cfg.y_max {
        finish_with!(EventKind::Escape, 0.0, seed);
    }

    let mut t = 0.0f64;
    let mut y = seed;
    let mut k1 = stepper.field(y);
    if !k1.is_finite() {
        return Err(IntegrateError::NonFinite { xi: 0.0 });
    }
    let budget_slack = 1e-12 * cfg.xi_budget.max(1.0);
    if cfg.xi_budget <= budget_slack {
        finish_with!(EventKind::BudgetExhausted, 0.0, y);
    }
    let mut h = stepper.initial_step(y, k1, cfg.max_step.min(cfg.xi_budget));
    let mut y_sign = sign_of(y.y);
    let mut x_sign = sign_of(y.x);

    loop {
        let remaining = cfg.xi_budget - t;
        if remaining <= budget_slack {
            finish_with!(EventKind::BudgetExhausted, xi_of(t), y);
        }
        h = h.min(cfg.max_step).min(remaining);
        if h < 1e-13 * t.max(1.0) {
            return Err(IntegrateError::StiffnessFailure { xi: xi_of(t) });
        }

        let res = stepper.step(y, k1, h);
        if !res.y_new.is_finite() || !res.err.is_finite() {
            h *= 0.25;
            if h < 1e-300 {
                return Err(IntegrateError::NonFinite { xi: xi_of(t) });
            }
            continue;
        }
        if res.err > 1.0 {
            // Rejected: shrink and retry.
            h *= (0.9 * res.err.powf(-0.2)).max(0.2);
            continue;
        }

        // Accepted. Look for sign changes over [t, t + h].
        let new_y_sign = sign_of(res.y_new.y);
        let new_x_sign = sign_of(res.y_new.x);
        let mut crossing: Option<(f64, PhasePoint, EventKind)> = None;
        if y_sign != 0 && new_y_sign != 0 && new_y_sign != y_sign {
            let (tau, pt) = locate_zero(&stepper, y, k1, h, y_sign, false);
            let kind = if y_sign > 0 {
                EventKind::YZeroDown
            } else {
                EventKind::YZeroUp
            };
            crossing = Some((tau, pt, kind));
        }
        if x_sign != 0 && new_x_sign != 0 && new_x_sign != x_sign {
            let (tau, pt) = locate_zero(&stepper, y, k1, h, x_sign, true);
            if crossing.is_none() || tau < crossing.unwrap().0 {
                crossing = Some((tau, pt, EventKind::XZero));
            }
        }

        if let Some((tau, pt, kind)) = crossing {
            let xi_ev = xi_of(t + tau);
            push_sample(&mut traj, xi_ev, pt);
            traj.events.push(Event {
                kind,
                xi: xi_ev,
                x: pt.x,
                y: pt.y,
            });
            if stop.matches(kind) {
                matched += 1;
                if matched >= stop.count {
                    return Ok(traj);
                }
            }
            // Resume from the crossing point with the post-crossing signs.
            t += tau;
            y = pt;
            k1 = stepper.field(y);
            if kind == EventKind::XZero {
                x_sign = new_x_sign;
            } else {
                y_sign = new_y_sign;
            }
            continue;
        }

        t += h;
        y = res.y_new;
        k1 = res.k_last;
        y_sign = if new_y_sign != 0 { new_y_sign } else { y_sign };
        x_sign = if new_x_sign != 0 { new_x_sign } else { x_sign };
        push_sample(&mut traj, xi_of(t), y);

        if let Some(kind) = convergence_kind(params, c, direction, y, cfg) {
            traj.events.push(Event {
                kind,
                xi: xi_of(t),
                x: y.x,
                y: y.y,
            });
            return Ok(traj);
        }
        if y.x.abs() > cfg.x_max || y.y.abs() > cfg.y_max {
            traj.events.push(Event {
                kind: EventKind::Escape,
                xi: xi_of(t),
                x: y.x,
                y: y.y,
            });
            return Ok(traj);
        }

        h *= (0.9 * res.err.max(1e-10).powf(-0.2)).min(5.0).max(0.2);
    }
}

fn push_sample(traj: &mut Trajectory, xi: f64, pt: PhasePoint) {
    if let Some(last) = traj.samples.last() {
        if last.xi == xi {
            return;
        }
    }
    traj.samples.push(Sample {
        xi,
        x: pt.x,
        y: pt.y,
    });
}

/// Bisect tau in (0, h) until the monitored component of the RK sub-step
/// from y0 is within EVENT_TOL * max(1, |X|) of zero.
fn locate_zero(
    stepper: &Stepper,
    y0: PhasePoint,
    k1: PhasePoint,
    h: f64,
    sign_lo: i8,
    monitor_x: bool,
) -> (f64, PhasePoint) {
    let mut lo = 0.0f64;
    let mut hi = h;
    let mut best = (h, stepper.step(y0, k1, h).y_new);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || mid >= h {
            break;
        }
        let pt = stepper.step(y0, k1, mid).y_new;
        let g = if monitor_x { pt.x } else { pt.y };
        best = (mid, pt);
        if g.abs() <= EVENT_TOL * pt.x.abs().max(1.0) {
            break;
        }
        if sign_of(g) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * h {
            break;
        }
    }
    best
}

/// Decide whether `pt` counts as having arrived at P1 or P2.
fn convergence_kind(
    params: &WaveParams,
    c: f64,
    direction: Direction,
    pt: PhasePoint,
    cfg: &IntegratorConfig,
) -> Option<EventKind> {
    let forward = direction == Direction::Forward;
    let fld = vector_field(params, c, pt);
    let stationary = fld.x.abs().max(fld.y.abs()) <= cfg.abs_tol;

    let d2 = pt.dist(PhasePoint::new(1.0, 0.0));
    if d2 < cfg.converge_radius {
        let contracting = if forward {
            c < params.kn()
        } else {
            c > params.kn()
        };
        if contracting || stationary {
            return Some(EventKind::ConvergedP2);
        }
    }

    let d1 = pt.dist(PhasePoint::new(0.0, 0.0));
    if d1 < cfg.converge_radius {
        let contracting = if forward { c < 0.0 } else { c > 0.0 };
        if contracting || stationary {
            return Some(EventKind::ConvergedP1);
        }
    }
    // Center-manifold arrival: X crept below the threshold while Y keeps the
    // sign an approach in this direction requires (X must shrink forward,
    // grow backward).
    let y_ok = if forward { pt.y < 0.0 } else { pt.y > 0.0 };
    if pt.x >= 0.0 && pt.x < EPS_ARRIVAL && y_ok && pt.y.abs() < EPS_ARRIVAL {
        return Some(EventKind::ConvergedP1);
    }
    None
}

/// Integrate forward over (up to) `span`, then backward over the span
/// actually covered; returns the max component deviation from the seed.
pub fn roundtrip_check(
    params: &WaveParams,
    c: f64,
    seed: PhasePoint,
    span: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, IntegrateError> {
    let fwd = integrate(
        params,
        c,
        seed,
        Direction::Forward,
        &StopRule::none(),
        &cfg.with_budget(span),
    )?;
    let end = fwd.last();
    let covered = end.xi.abs();
    if covered == 0.0 {
        return Ok(0.0);
    }
    let bwd = integrate(
        params,
        c,
        end.point(),
        Direction::Backward,
        &StopRule::none(),
        &cfg.with_budget(covered),
    )?;
    let back = bwd.last();
    Ok((back.x - seed.x).abs().max((back.y - seed.y).abs()))
}

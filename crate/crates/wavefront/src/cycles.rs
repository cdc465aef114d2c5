//! Poincare return map on the X axis and limit cycles around P2.
//!
//! Periodic waves appear as closed orbits encircling P2 = (1, 0). On the
//! half-section {Y = 0, X > 1} the first-return map P is well defined
//! wherever the orbit comes back: downward crossings happen only at X > 1
//! and upward ones only at X < 1, so the section is self-selecting. A fixed
//! point of P is a limit cycle; the sign pattern of P(x) - x across it tells
//! its stability (inner negative / outer positive means repelling).
//!
//! The companion functions here certify the *absence* of cycles for c >= kn
//! by the Lienard comparison argument: the curves y1 (matching the
//! convective terms) and y2 (matching the potential terms) must stay
//! strictly ordered on [0, 1), which is checked on a grid after solving both
//! implicit equations.

use crate::integrate::{
    integrate, Direction, EventKind, IntegrateError, IntegratorConfig, StopRule, Trajectory,
};
use crate::model::{powx, PhasePoint, WaveParams};
use crate::par;
use crate::shoot::{compute_x1, ShootConfig, ShootError};
use serde::Serialize;
use thiserror::Error;

/// Points sampled across (1, X1(c)) when hunting for a fixed point.
const CYCLE_SCAN_POINTS: usize = 32;
/// Bisection width for the fixed point of the return map.
const CYCLE_X_TOL: f64 = 1e-9;
/// How closely the reconstructed orbit must close on itself.
const CYCLE_CLOSURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Error)]
pub enum CycleError {
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Shoot(#[from] ShootError),
    #[error("outside the regime of this check: {detail}")]
    OutOfRegime { detail: String },
    #[error("numerical failure: {detail}")]
    Numerical { detail: String },
}

/// One application of the first-return map on {Y = 0, X > 1}.
#[derive(Debug, Clone)]
pub enum ReturnOutcome {
    /// The orbit crossed downward again at `x` after `period` units of xi.
    Return { x: f64, period: f64 },
    /// The orbit left the return domain (escape, fall into an equilibrium,
    /// crossing into X < 0, or budget); the terminal event says how.
    NoReturn { terminal: EventKind },
}

/// Follow the orbit seeded at (x_from, 0), x_from > 1, to its next downward
/// axis crossing.
pub fn poincare_return(
    params: &WaveParams,
    c: f64,
    x_from: f64,
    icfg: &IntegratorConfig,
) -> Result<ReturnOutcome, IntegrateError> {
    Ok(poincare_return_orbit(params, c, x_from, icfg)?.0)
}

fn poincare_return_orbit(
    params: &WaveParams,
    c: f64,
    x_from: f64,
    icfg: &IntegratorConfig,
) -> Result<(ReturnOutcome, Trajectory), IntegrateError> {
    let traj = integrate(
        params,
        c,
        PhasePoint::new(x_from, 0.0),
        Direction::Forward,
        &StopRule::first(&[EventKind::YZeroDown, EventKind::XZero]),
        icfg,
    )?;
    let outcome = match traj.final_event() {
        Some(ev) if ev.kind == EventKind::YZeroDown => ReturnOutcome::Return {
            x: ev.x,
            period: ev.xi,
        },
        Some(ev) => ReturnOutcome::NoReturn { terminal: ev.kind },
        None => ReturnOutcome::NoReturn {
            terminal: EventKind::BudgetExhausted,
        },
    };
    Ok((outcome, traj))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleStability {
    Stable,
    Unstable,
}

/// Outcome of the limit-cycle search at one speed.
#[derive(Debug, Clone, Serialize)]
pub struct CycleResult {
    pub found: bool,
    pub c: f64,
    pub fixed_point_x: Option<f64>,
    pub period: Option<f64>,
    pub stability: Option<CycleStability>,
    /// The closed orbit, seeded at the fixed point; not serialized.
    #[serde(skip)]
    pub orbit: Option<Trajectory>,
}

impl CycleResult {
    fn not_found(c: f64) -> Self {
        CycleResult {
            found: false,
            c,
            fixed_point_x: None,
            period: None,
            stability: None,
            orbit: None,
        }
    }
}

/// Search (1, X1(c)) for a fixed point of the return map: scan for a sign
/// change of P(x) - x between adjacent returning points, then bisect.
/// `found = false` when the scan shows no sign change at all.
pub fn find_limit_cycle(
    params: &WaveParams,
    c: f64,
    cfg: &ShootConfig,
) -> Result<CycleResult, CycleError> {
    let x1 = compute_x1(params, c, cfg)?;
    if x1.at_p2 || x1.x <= 1.0 + 1e-9 {
        return Ok(CycleResult::not_found(c));
    }
    let delta = 1e-3 * (x1.x - 1.0);
    let lo = 1.0 + delta;
    let hi = x1.x;
    let xs: Vec<f64> = (0..CYCLE_SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (CYCLE_SCAN_POINTS - 1) as f64)
        .collect();
    let icfg = cfg.integrator;
    // Displacement of the return map, when defined; `swung_out` marks seeds
    // whose first loop left the region through X = 0 or the escape box -
    // the continuation of d past +infinity on the outer side of a repelling
    // cycle.
    #[derive(Clone, Copy)]
    enum Disp {
        Ret(f64),
        SwungOut,
        Unusable,
    }
    let displacements: Vec<Disp> =
        par::map_collect(xs.clone(), |x| match poincare_return(params, c, x, &icfg) {
            Ok(ReturnOutcome::Return { x: xr, .. }) => Disp::Ret(xr - x),
            Ok(ReturnOutcome::NoReturn {
                terminal: EventKind::XZero | EventKind::Escape,
            }) => Disp::SwungOut,
            _ => Disp::Unusable,
        });

    // A sign change between adjacent returning points brackets the fixed
    // point directly. When the outer side of a repelling cycle swings so
    // wide that it never returns, the bracket instead shows up as an inward
    // point next to a swung-out one.
    let mut bracket = None;
    let mut fallback = None;
    for i in 0..xs.len() - 1 {
        match (displacements[i], displacements[i + 1]) {
            (Disp::Ret(d0), Disp::Ret(d1)) if (d0 < 0.0) != (d1 < 0.0) => {
                bracket = Some((xs[i], xs[i + 1], d0));
                break;
            }
            (Disp::Ret(d0), Disp::SwungOut) if d0 < 0.0 && fallback.is_none() => {
                fallback = Some((xs[i], xs[i + 1], d0));
            }
            _ => {}
        }
    }
    let Some((mut blo, mut bhi, d_lo)) = bracket.or(fallback) else {
        return Ok(CycleResult::not_found(c));
    };

    let mut guard = 0;
    while bhi - blo > CYCLE_X_TOL && guard < 200 {
        guard += 1;
        let mid = 0.5 * (blo + bhi);
        match poincare_return(params, c, mid, &icfg)? {
            ReturnOutcome::Return { x: xr, .. } => {
                if ((xr - mid) < 0.0) == (d_lo < 0.0) {
                    blo = mid;
                } else {
                    bhi = mid;
                }
            }
            // Leaving the return domain mid-bracket means the orbit swung
            // wide like the outer endpoint does; shrink from above.
            ReturnOutcome::NoReturn { .. } => bhi = mid,
        }
    }
    let x_fix = 0.5 * (blo + bhi);

    let (outcome, orbit) = poincare_return_orbit(params, c, x_fix, &icfg)?;
    let (x_ret, period) = match outcome {
        ReturnOutcome::Return { x, period } => (x, period),
        ReturnOutcome::NoReturn { terminal } => {
            return Err(CycleError::Numerical {
                detail: format!(
                    "orbit at the bisected fixed point x = {x_fix:.9} did not return ({})",
                    terminal.name()
                ),
            })
        }
    };
    let closure = (x_ret - x_fix).abs();
    if closure > CYCLE_CLOSURE_TOL * x_fix.max(1.0) {
        return Err(CycleError::Numerical {
            detail: format!("cycle fails to close: |P(x) - x| = {closure:.3e} at x = {x_fix:.9}"),
        });
    }
    // Displacement negative on the inner side means orbits inside spiral
    // away from the cycle toward P2, i.e. the cycle repels.
    let stability = if d_lo < 0.0 {
        CycleStability::Unstable
    } else {
        CycleStability::Stable
    };
    Ok(CycleResult {
        found: true,
        c,
        fixed_point_x: Some(x_fix),
        period: Some(period),
        stability: Some(stability),
        orbit: Some(orbit),
    })
}

/// The two comparison curves of the no-cycle criterion on a grid over
/// [0, 1): y1 matches the convective terms, k(y^n - x^n) = c(y - x), and
/// y2 matches the potential terms, F(y) = F(x) with
/// F(t) = t^(p+1)/(p+1) - t^(q+1)/(q+1); both taken on the branch y > 1.
/// A strictly positive `min_gap` = min(y1 - y2) certifies that the system
/// of both equations has no solution, hence no limit cycle at this speed.
#[derive(Debug, Clone, Serialize)]
pub struct LienardCurves {
    pub c: f64,
    pub xs: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub min_gap: f64,
}

pub fn lienard_curves(
    params: &WaveParams,
    c: f64,
    grid: usize,
) -> Result<LienardCurves, CycleError> {
    let n = params.n();
    let kn = params.kn();
    if c < kn - 1e-12 {
        return Err(CycleError::OutOfRegime {
            detail: format!("the comparison argument needs c >= kn = {kn}, got c = {c}"),
        });
    }
    let n_cap = params.p() + params.q() + 1.0;
    if !(n > 1.0 && n <= n_cap + 1e-12) {
        return Err(CycleError::OutOfRegime {
            detail: format!("the comparison argument needs 1 < n <= p+q+1 = {n_cap}, got n = {n}"),
        });
    }
    let grid = grid.max(2);
    let mut xs = Vec::with_capacity(grid);
    let mut y1 = Vec::with_capacity(grid);
    let mut y2 = Vec::with_capacity(grid);
    let mut min_gap = f64::INFINITY;
    for i in 0..grid {
        let x = i as f64 / grid as f64;
        let a = solve_y1(params, c, x)?;
        let b = solve_y2(params, x)?;
        min_gap = min_gap.min(a - b);
        xs.push(x);
        y1.push(a);
        y2.push(b);
    }
    Ok(LienardCurves {
        c,
        xs,
        y1,
        y2,
        min_gap,
    })
}

/// Root y > 1 of k(y^n - x^n) - c(y - x) = 0 for x in [0, 1).
fn solve_y1(params: &WaveParams, c: f64, x: f64) -> Result<f64, CycleError> {
    let (n, k) = (params.n(), params.k());
    let f = |y: f64| k * (powx(y, n) - powx(x, n)) - c * (y - x);
    let df = |y: f64| k * n * powx(y, n - 1.0) - c;
    // f has its minimum at (c/(kn))^(1/(n-1)) >= 1 and is negative at y = 1;
    // the root we want lies to the right of the minimum.
    let lo = (c / (k * n)).powf(1.0 / (n - 1.0)).max(1.0);
    safeguarded_root(f, df, lo, "convective comparison curve")
}

/// Root y > 1 of F(y) - F(x) = 0 with F(t) = t^(p+1)/(p+1) - t^(q+1)/(q+1).
fn solve_y2(params: &WaveParams, x: f64) -> Result<f64, CycleError> {
    let (p, q) = (params.p(), params.q());
    let pot = |t: f64| powx(t, p + 1.0) / (p + 1.0) - powx(t, q + 1.0) / (q + 1.0);
    let target = pot(x);
    let f = |y: f64| pot(y) - target;
    let df = |y: f64| powx(y, p) - powx(y, q);
    safeguarded_root(f, df, 1.0, "potential comparison curve")
}

/// Newton iteration safeguarded by a bracketing bisection; `f` must be
/// negative at `lo` and eventually positive to its right.
fn safeguarded_root(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    what: &str,
) -> Result<f64, CycleError> {
    let mut lo = lo;
    let mut hi = (2.0 * lo).max(2.0);
    let mut tries = 0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(CycleError::Numerical {
                detail: format!("{what}: no sign change found up to y = {hi:.3e}"),
            });
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fy = f(y);
        if fy.abs() <= 1e-14 * y.abs().max(1.0) {
            return Ok(y);
        }
        if fy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let slope = df(y);
        let newton = y - fy / slope;
        y = if slope.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(y)
}

/// Grid verdicts on the elementary inequalities the no-cycle argument rests
/// on. All of them are parameter-level facts, independent of any orbit.
#[derive(Debug, Clone, Serialize)]
pub struct CalculusReport {
    /// (x^p - x^q)/(x - 1) is increasing on [0, 1) ...
    pub secant_slope_increasing: bool,
    /// ... and bounded by its limit p - q at 1.
    pub secant_slope_bounded: bool,
    /// (t^p - 1)(t^q - 1) >= 0 for all t > 0.
    pub phi_prime_nonnegative: bool,
    /// p + q + 1 > ((p+1)/(q+1))^((p+q)/(p-q)): the curves start ordered.
    pub order_at_zero: bool,
    /// n^(1/(n-1)) decreases in n on (1, p+q+1].
    pub y1_anchor_decreasing_in_n: bool,
    pub pass: bool,
}

pub fn calculus_checks(params: &WaveParams, grid: usize) -> CalculusReport {
    let (p, q) = (params.p(), params.q());
    let grid = grid.max(8);

    let slope = |x: f64| {
        if (x - 1.0).abs() < 1e-9 {
            p - q
        } else {
            (powx(x, p) - powx(x, q)) / (x - 1.0)
        }
    };
    let mut secant_slope_increasing = true;
    let mut secant_slope_bounded = true;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..grid {
        let x = i as f64 / grid as f64;
        let h = slope(x);
        secant_slope_increasing &= h >= prev - 1e-12;
        secant_slope_bounded &= h <= p - q + 1e-12;
        prev = h;
    }

    let mut phi_prime_nonnegative = true;
    for i in 0..=grid {
        let t = powx(10.0, -3.0 + 6.0 * i as f64 / grid as f64);
        phi_prime_nonnegative &= (powx(t, p) - 1.0) * (powx(t, q) - 1.0) >= -1e-15;
    }

    let order_at_zero = p + q + 1.0 > powx((p + 1.0) / (q + 1.0), (p + q) / (p - q));

    let mut y1_anchor_decreasing_in_n = true;
    let mut prev_anchor = f64::INFINITY;
    for i in 0..=grid {
        let n = 1.0 + 1e-3 + (p + q) * i as f64 / grid as f64;
        let anchor = powx(n, 1.0 / (n - 1.0));
        y1_anchor_decreasing_in_n &= anchor <= prev_anchor + 1e-12;
        prev_anchor = anchor;
    }

    let pass = secant_slope_increasing
        && secant_slope_bounded
        && phi_prime_nonnegative
        && order_at_zero
        && y1_anchor_decreasing_in_n;
    CalculusReport {
        secant_slope_increasing,
        secant_slope_bounded,
        phi_prime_nonnegative,
        order_at_zero,
        y1_anchor_decreasing_in_n,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveParams;

    fn flagship() -> WaveParams {
        WaveParams::new(2.0, 3.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn return_map_is_defined_between_the_equilibria_levels() {
        let p = flagship();
        let icfg = IntegratorConfig::default();
        match poincare_return(&p, 1.8, 1.2, &icfg).unwrap() {
            ReturnOutcome::Return { x, period } => {
                assert!(x > 1.0);
                assert!(period > 0.0);
            }
            ReturnOutcome::NoReturn { terminal } => {
                panic!("expected a return, got {}", terminal.name())
            }
        }
    }

    #[test]
    fn unstable_cycle_sits_between_cstar_and_kn() {
        let p = flagship();
        let res = find_limit_cycle(&p, 1.8, &ShootConfig::default()).unwrap();
        assert!(res.found, "no cycle found at c = 1.8");
        let x_fix = res.fixed_point_x.unwrap();
        assert!(x_fix > 1.0);
        assert_eq!(res.stability, Some(CycleStability::Unstable));
        assert!(res.period.unwrap() > 0.0);
        let orbit = res.orbit.as_ref().unwrap();
        // The loop never leaves X > 0 and closes up to tolerance.
        for s in &orbit.samples {
            assert!(s.x > 0.0);
        }
        let last = orbit.final_event().unwrap();
        assert!((last.x - x_fix).abs() <= 1e-6 * x_fix);
    }

    #[test]
    fn no_cycle_outside_the_band() {
        let p = flagship();
        let below = find_limit_cycle(&p, 1.6, &ShootConfig::default()).unwrap();
        assert!(!below.found, "spurious cycle below c*");
        let above = find_limit_cycle(&p, 2.5, &ShootConfig::default()).unwrap();
        assert!(!above.found, "spurious cycle above kn");
    }

    #[test]
    fn cycle_amplitude_shrinks_toward_the_bifurcation_speed() {
        let p = flagship();
        let cfg = ShootConfig::default();
        let far = find_limit_cycle(&p, p.kn() - 0.1, &cfg).unwrap();
        let near = find_limit_cycle(&p, p.kn() - 0.01, &cfg).unwrap();
        assert!(far.found && near.found);
        let amp_far = far.fixed_point_x.unwrap() - 1.0;
        let amp_near = near.fixed_point_x.unwrap() - 1.0;
        assert!(
            amp_near < amp_far,
            "amplitude {amp_near:.6} at kn-0.01 should shrink below {amp_far:.6} at kn-0.1"
        );
    }

    #[test]
    fn lienard_curves_stay_ordered_at_and_above_kn() {
        let p = flagship();
        let at_kn = lienard_curves(&p, 2.0, 256).unwrap();
        // Anchors: y1(0) = n^(1/(n-1)) = 2, y2(0) = (p+1)/(q+1) = 4/3.
        assert!((at_kn.y1[0] - 2.0).abs() < 1e-12);
        assert!((at_kn.y2[0] - 4.0 / 3.0).abs() < 1e-10);
        assert!(at_kn.min_gap > 0.0);
        // Both curves decrease toward 1.
        for w in at_kn.y1.windows(2) {
            assert!(w[1] < w[0]);
        }
        for w in at_kn.y2.windows(2) {
            assert!(w[1] < w[0]);
        }
        let above = lienard_curves(&p, 2.5, 256).unwrap();
        assert!((above.y1[0] - 2.5).abs() < 1e-12);
        assert!(above.min_gap >= at_kn.min_gap);
    }

    #[test]
    fn lienard_preconditions_are_enforced() {
        let p = flagship();
        assert!(matches!(
            lienard_curves(&p, 1.5, 64),
            Err(CycleError::OutOfRegime { .. })
        ));
        let strong = WaveParams::new(7.0, 3.0, 2.0, 1.0).unwrap();
        assert!(matches!(
            lienard_curves(&strong, 7.0, 64),
            Err(CycleError::OutOfRegime { .. })
        ));
    }

    #[test]
    fn calculus_report_passes_on_valid_exponents() {
        let report = calculus_checks(&flagship(), 200);
        assert!(report.pass, "{report:?}");
        let close = WaveParams::new(2.0, 2.0, 1.9, 0.5).unwrap();
        let report = calculus_checks(&close, 200);
        assert!(report.pass, "{report:?}");
    }
}

//! Local analysis at the degenerate equilibrium P1 = (0, 0).
//!
//! P1 is non-hyperbolic for q > 1 (its linearization has eigenvalues {0, c}),
//! so the two distinguished trajectories have to be started from asymptotic
//! expansions rather than eigenvectors:
//!
//! * `l1` -- the unique trajectory leaving P1 into the first quadrant
//!   (realizes the xi -> -inf end of a wave with f(-inf) = 0);
//! * `l0` -- the unique trajectory entering P1 from the fourth quadrant
//!   (realizes the xi -> +inf end, f(+inf) = 0). It is integrated backward
//!   in xi, so its seed is used with the reversed field.
//!
//! For c > 0, `l1` departs along the unstable eigenvector (1, c) and `l0`
//! arrives along the center manifold Y = -X^q / c + o(X^q); for c < 0 the
//! roles mirror. For c = 0 both directions degenerate and the tangencies
//! come from a directional blow-up of the origin, which splits into three
//! cases by the sign of n - (q+1)/2. For q = 1 the origin is an ordinary
//! saddle and both seeds are plain eigenvector offsets.
//!
//! The same expansions yield the decay laws of the wave tails (exponential
//! or algebraic, with known rates/exponents and, where the dynamics pins it,
//! known multiplicative constants). `fit_tail` measures those laws on a
//! computed trajectory by least squares in log space.

use crate::model::{powx, PhasePoint, WaveParams};
use serde::Serialize;
use thiserror::Error;

/// Which distinguished trajectory of P1 a seed or law refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `l1`: departs P1, carries the xi -> -inf tail.
    Unstable,
    /// `l0`: enters P1, carries the xi -> +inf tail.
    Stable,
}

/// Which infinite end of the profile a tail law describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum End {
    MinusInfinity,
    PlusInfinity,
}

/// Blow-up structure of P1 at c = 0, decided by n vs (q+1)/2: the convection
/// term -k n X^{n-1} Y competes with the absorption term X^q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlowupCase {
    /// n > (q+1)/2: absorption dominates; tangency Y ~ +-sqrt(2/(q+1)) X^{(q+1)/2}.
    AbsorptionDominated,
    /// n = (q+1)/2: balanced; tangency Y ~ v X^n with n v^2 + k n v - 1 = 0.
    Balanced,
    /// n < (q+1)/2: convection dominates; Y ~ X^{q+1-n}/(k n) out, Y ~ -k X^n in.
    ConvectionDominated,
}

/// Blow-up case together with the departing/arriving slope coefficients
/// (the saddle values of the blown-up radial variable at U = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupAnalysis {
    pub case: BlowupCase,
    /// Coefficient of the outgoing (l1) tangency.
    pub v_out: f64,
    /// Coefficient of the incoming (l0) tangency.
    pub v_in: f64,
    /// Power of X in the tangency Y ~ v X^m.
    pub tangency_power: f64,
}

/// Classify the c = 0 blow-up and return both tangency coefficients.
pub fn blowup_case(params: &WaveParams) -> BlowupAnalysis {
    let (n, q, k) = (params.n(), params.q(), params.k());
    let half = (q + 1.0) / 2.0;
    if n > half {
        let v = (2.0 / (q + 1.0)).sqrt();
        BlowupAnalysis {
            case: BlowupCase::AbsorptionDominated,
            v_out: v,
            v_in: -v,
            tangency_power: half,
        }
    } else if n == half {
        let s = (k * k * n * n + 4.0 * n).sqrt();
        BlowupAnalysis {
            case: BlowupCase::Balanced,
            v_out: (s - k * n) / (2.0 * n),
            v_in: (-s - k * n) / (2.0 * n),
            tangency_power: n,
        }
    } else {
        BlowupAnalysis {
            case: BlowupCase::ConvectionDominated,
            v_out: 1.0 / (k * n),
            v_in: -k,
            tangency_power: f64::NAN, // powers differ per branch; see seeds
        }
    }
}

/// A starting state for one of the distinguished trajectories, offset from P1
/// by `eps` along the leading term of the local expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedState {
    pub point: PhasePoint,
    pub branch: Branch,
    /// Order of the truncated expansion behind the seed (currently always 1).
    pub expansion_order: u32,
    /// Offset used; the truncation error in Y is o(eps^{order of next term}).
    pub eps: f64,
}

/// Seed for `l1` at distance `eps` from P1.
pub fn seed_l1(params: &WaveParams, c: f64, eps: f64) -> SeedState {
    let (n, q, k) = (params.n(), params.q(), params.k());
    let y = if q == 1.0 {
        // Saddle: leave along (1, lambda_1), lambda_1 = (c + sqrt(c^2+4))/2.
        eps * (c + (c * c + 4.0).sqrt()) / 2.0
    } else if c > 0.0 {
        // Unstable eigenvector (1, c).
        c * eps
    } else if c < 0.0 {
        // Center manifold Y = -X^q/c + o(X^q); positive since c < 0.
        -powx(eps, q) / c
    } else {
        let blow = blowup_case(params);
        match blow.case {
            BlowupCase::AbsorptionDominated => blow.v_out * powx(eps, (q + 1.0) / 2.0),
            BlowupCase::Balanced => blow.v_out * powx(eps, n),
            BlowupCase::ConvectionDominated => powx(eps, q + 1.0 - n) / (k * n),
        }
    };
    SeedState {
        point: PhasePoint::new(eps, y),
        branch: Branch::Unstable,
        expansion_order: 1,
        eps,
    }
}

/// Seed for `l0` at distance `eps` from P1 (to be integrated backward).
pub fn seed_l0(params: &WaveParams, c: f64, eps: f64) -> SeedState {
    let (n, q, k) = (params.n(), params.q(), params.k());
    let y = if q == 1.0 {
        // Stable eigenvector (1, lambda_2), lambda_2 = (c - sqrt(c^2+4))/2 < 0.
        eps * (c - (c * c + 4.0).sqrt()) / 2.0
    } else if c > 0.0 {
        // Center manifold arrival: Y = -X^q/c + o(X^q) < 0.
        -powx(eps, q) / c
    } else if c < 0.0 {
        // Stable eigenvector (1, c).
        c * eps
    } else {
        let blow = blowup_case(params);
        match blow.case {
            BlowupCase::AbsorptionDominated => blow.v_in * powx(eps, (q + 1.0) / 2.0),
            BlowupCase::Balanced => blow.v_in * powx(eps, n),
            BlowupCase::ConvectionDominated => -k * powx(eps, n),
        }
    };
    SeedState {
        point: PhasePoint::new(eps, y),
        branch: Branch::Stable,
        expansion_order: 1,
        eps,
    }
}

/// Functional form of a decaying tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailKind {
    /// f ~ constant * exp(-rate * |xi|), rate > 0.
    Exponential,
    /// f ~ constant * |xi|^{-exponent}, exponent > 0.
    Algebraic,
}

/// Predicted asymptotic law of f at one end of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailLaw {
    pub end: End,
    pub kind: TailKind,
    /// Decay rate (exponential) or exponent of |xi| (algebraic).
    pub rate: f64,
    /// Multiplicative constant when the dynamics determines it; `None` when
    /// it is a free constant fixed only by the wave's translation.
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, Copy, Error)]
pub enum TailLawError {
    #[error("no decay law for branch {branch:?} at {end:?} with c = {c}")]
    UnsupportedCombination { branch: Branch, end: End, c: f64 },
    #[error("tail constant undefined for n = 1 at the stated end")]
    UndefinedConstant,
}

/// The decay law of the given branch at the given end.
///
/// The supported ends are the ones the branch actually decays at: `l1` at
/// xi -> -inf and `l0` at xi -> +inf. When `c_star` is supplied and c equals
/// it, the two branches coincide (the homoclinic loop), so either branch
/// supports both ends.
pub fn tail_law(
    params: &WaveParams,
    c: f64,
    c_star: Option<f64>,
    end: End,
    branch: Branch,
) -> Result<TailLaw, TailLawError> {
    let homoclinic = c_star.is_some_and(|cs| c == cs);
    let effective_branch = match (branch, end) {
        (Branch::Unstable, End::MinusInfinity) | (Branch::Stable, End::PlusInfinity) => branch,
        // On the homoclinic loop the branches are one trajectory, so the
        // "wrong" pairing still has a law: the one of the other branch.
        (Branch::Unstable, End::PlusInfinity) if homoclinic => Branch::Stable,
        (Branch::Stable, End::MinusInfinity) if homoclinic => Branch::Unstable,
        _ => return Err(TailLawError::UnsupportedCombination { branch, end, c }),
    };
    let end = match effective_branch {
        Branch::Unstable => End::MinusInfinity,
        Branch::Stable => End::PlusInfinity,
    };

    let (n, q, k) = (params.n(), params.q(), params.k());
    if q == 1.0 {
        // Saddle: exponential at both ends for every c.
        let rate = match effective_branch {
            Branch::Unstable => (c + (c * c + 4.0).sqrt()) / 2.0,
            Branch::Stable => ((c * c + 4.0).sqrt() - c) / 2.0,
        };
        return Ok(TailLaw {
            end,
            kind: TailKind::Exponential,
            rate,
            constant: None,
        });
    }

    let law = match (effective_branch, c) {
        (Branch::Unstable, c) if c > 0.0 => TailLaw {
            end,
            kind: TailKind::Exponential,
            rate: c,
            constant: None,
        },
        (Branch::Stable, c) if c < 0.0 => TailLaw {
            end,
            kind: TailKind::Exponential,
            rate: -c,
            constant: None,
        },
        // Center-manifold ends: |xi|^{1/(q-1)} f -> (|c|/(q-1))^{1/(q-1)}.
        (Branch::Stable, c) if c > 0.0 => algebraic(end, 1.0 / (q - 1.0), c / (q - 1.0)),
        (Branch::Unstable, c) if c < 0.0 => algebraic(end, 1.0 / (q - 1.0), -c / (q - 1.0)),
        // c = 0: exponents and constants from the blow-up case.
        _ => {
            let blow = blowup_case(params);
            match blow.case {
                BlowupCase::AbsorptionDominated => {
                    // |xi|^{2/(q-1)} f -> [ (q-1)/2 * sqrt(2/(q+1)) ]^{-2/(q-1)}
                    let expo = 2.0 / (q - 1.0);
                    let base = (q - 1.0) / 2.0 * (2.0 / (q + 1.0)).sqrt();
                    TailLaw {
                        end,
                        kind: TailKind::Algebraic,
                        rate: expo,
                        constant: Some(base.powf(-expo)),
                    }
                }
                BlowupCase::Balanced => {
                    let expo = 1.0 / (n - 1.0);
                    let v = match effective_branch {
                        Branch::Unstable => blow.v_out,
                        Branch::Stable => -blow.v_in,
                    };
                    TailLaw {
                        end,
                        kind: TailKind::Algebraic,
                        rate: expo,
                        constant: Some((v * (n - 1.0)).powf(-expo)),
                    }
                }
                BlowupCase::ConvectionDominated => match effective_branch {
                    Branch::Unstable => {
                        let expo = 1.0 / (q - n);
                        TailLaw {
                            end,
                            kind: TailKind::Algebraic,
                            rate: expo,
                            constant: Some(((q - n) / (k * n)).powf(-expo)),
                        }
                    }
                    Branch::Stable => {
                        if n == 1.0 {
                            return Err(TailLawError::UndefinedConstant);
                        }
                        let expo = 1.0 / (n - 1.0);
                        TailLaw {
                            end,
                            kind: TailKind::Algebraic,
                            rate: expo,
                            constant: Some((k * (n - 1.0)).powf(-expo)),
                        }
                    }
                },
            }
        }
    };
    Ok(law)
}

fn algebraic(end: End, exponent: f64, base: f64) -> TailLaw {
    TailLaw {
        end,
        kind: TailKind::Algebraic,
        rate: exponent,
        // |xi|^{1/(q-1)} f -> base^{1/(q-1)} with base = |c|/(q-1).
        constant: Some(base.powf(exponent)),
    }
}

/// xi-offset of the virtual origin of an algebraic creep law through the
/// point (xi = 0, f = x_ref) on the given branch.
///
/// An algebraic tail is the trace of a power-law crawl |X'| = a X^m (m > 1)
/// along an invariant curve of P1, so it reads f = C (|xi| + shift)^(-rate)
/// *exactly* to leading order, with the shift equal to the crawl time from
/// the law's (virtual) blow-up point down to x_ref. Fitting ln f against
/// ln(|xi| + shift) therefore sees a straight line already at seed scale,
/// while the unshifted abscissa only straightens out for |xi| many times
/// larger than the shift -- prohibitively far when x_ref is small.
///
/// Exponential-law combinations (q = 1, or the hyperbolic side of P1)
/// return 0: shifting them only rescales their free constant.
pub fn tail_shift(params: &WaveParams, c: f64, branch: Branch, x_ref: f64) -> f64 {
    let (n, q, k) = (params.n(), params.q(), params.k());
    if q == 1.0 || x_ref <= 0.0 {
        return 0.0;
    }
    // Crawl time of |X'| = a X^m from blow-up to x_ref.
    let span = |a: f64, m: f64| {
        if a <= 0.0 || m <= 1.0 {
            0.0
        } else {
            powx(x_ref, 1.0 - m) / (a * (m - 1.0))
        }
    };
    match (branch, c) {
        // Hyperbolic sides: exponential laws.
        (Branch::Unstable, c) if c > 0.0 => 0.0,
        (Branch::Stable, c) if c < 0.0 => 0.0,
        // Center-manifold sides: |X'| = X^q / |c|.
        (Branch::Unstable, c) if c < 0.0 => span(1.0 / c.abs(), q),
        (Branch::Stable, c) if c > 0.0 => span(1.0 / c.abs(), q),
        // c = 0: the blow-up tangencies.
        _ => {
            let blow = blowup_case(params);
            let (a, m) = match (blow.case, branch) {
                (BlowupCase::AbsorptionDominated, Branch::Unstable) => {
                    (blow.v_out, (q + 1.0) / 2.0)
                }
                (BlowupCase::AbsorptionDominated, Branch::Stable) => {
                    (blow.v_in.abs(), (q + 1.0) / 2.0)
                }
                (BlowupCase::Balanced, Branch::Unstable) => (blow.v_out, n),
                (BlowupCase::Balanced, Branch::Stable) => (blow.v_in.abs(), n),
                (BlowupCase::ConvectionDominated, Branch::Unstable) => {
                    (1.0 / (k * n), q + 1.0 - n)
                }
                (BlowupCase::ConvectionDominated, Branch::Stable) => (k, n),
            };
            span(a, m)
        }
    }
}

/// Result of a least-squares tail fit in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Measured decay rate (exponential) or exponent (algebraic).
    pub measured: f64,
    /// Measured multiplicative constant.
    pub constant: f64,
    /// Root-mean-square residual of the linear fit on ln f.
    pub residual: f64,
    /// Number of samples used.
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Error)]
pub enum FitError {
    #[error("tail window holds {found} usable samples; need at least {needed}")]
    InsufficientData { found: usize, needed: usize },
}

const MIN_FIT_SAMPLES: usize = 20;

/// Fit the predicted law shape against profile samples `(xi, f)` restricted
/// to `window = (xi_lo, xi_hi)`. Only samples with f > 0 (and, for algebraic
/// laws, |xi| bounded away from 0) are used.
///
/// Exponential laws regress ln f on xi; algebraic laws regress ln f on
/// ln |xi|. The measured slope is mapped back to a positive rate/exponent
/// according to the law's end.
pub fn fit_tail(
    samples: &[(f64, f64)],
    law: &TailLaw,
    window: (f64, f64),
) -> Result<FitResult, FitError> {
    let (lo, hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(xi, f) in samples {
        if xi < lo || xi > hi || f <= 0.0 {
            continue;
        }
        let abscissa = match law.kind {
            TailKind::Exponential => xi,
            TailKind::Algebraic => {
                if xi.abs() < 1e-9 {
                    continue;
                }
                xi.abs().ln()
            }
        };
        xs.push(abscissa);
        ys.push(f.ln());
    }
    let m = xs.len();
    if m < MIN_FIT_SAMPLES {
        return Err(FitError::InsufficientData {
            found: m,
            needed: MIN_FIT_SAMPLES,
        });
    }

    let mean_x = xs.iter().sum::<f64>() / m as f64;
    let mean_y = ys.iter().sum::<f64>() / m as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..m {
        let dx = xs[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (ys[i] - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss = 0.0;
    for i in 0..m {
        let r = ys[i] - (slope * xs[i] + intercept);
        ss += r * r;
    }
    let residual = (ss / m as f64).sqrt();

    // ln f = slope * xi + b         (exponential; slope = +rate at -inf,
    //                                -rate at +inf)
    // ln f = slope * ln|xi| + b     (algebraic; slope = -exponent at both ends)
    let measured = match (law.kind, law.end) {
        (TailKind::Exponential, End::MinusInfinity) => slope,
        (TailKind::Exponential, End::PlusInfinity) => -slope,
        (TailKind::Algebraic, _) => -slope,
    };
    Ok(FitResult {
        measured,
        constant: intercept.exp(),
        residual,
        samples: m,
    })
}

/// The window covering the quarter of the xi-span nearest the given end;
/// the usual choice when the caller has no better one.
pub fn default_tail_window(samples: &[(f64, f64)], end: End) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(xi, _) in samples {
        lo = lo.min(xi);
        hi = hi.max(xi);
    }
    let span = hi - lo;
    match end {
        End::MinusInfinity => (lo, lo + 0.25 * span),
        End::PlusInfinity => (hi - 0.25 * span, hi),
    }
}

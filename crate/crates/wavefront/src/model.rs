//! Problem data for traveling waves of the generalized Burgers-Fisher equation
//!
//!   du/dt = u_xx + k (u^n)_x + u^p - u^q,      p > q >= 1, k > 0.
//!
//! A right-moving wave u(x,t) = f(x + c t) turns the PDE into the planar system
//!
//!   X' = Y,
//!   Y' = c Y - k n X_+^{n-1} Y - X_+^p + X_+^q,
//!
//! where X_+ = max(X, 0) keeps the fractional powers defined and, for q = 1,
//! the absorption term is the plain linear `X` so the field stays C^1 at the
//! origin. The two equilibria of interest are P1 = (0,0) and P2 = (1,0).
//!
//! This module owns the validated parameter set, the vector field and its
//! Lienard change of variables, the spectral classification of P2 as the wave
//! speed varies, the Lyapunov number governing the Hopf bifurcation at
//! c = k n, and the rescaling that reduces a four-coefficient equation
//! A v_xx + B (v^n)_x + C v^p - D v^q to the normalized one above.

use serde::Serialize;
use thiserror::Error;

/// `x^e` with fast paths for the small integer and half-integer exponents
/// that dominate the field evaluations.
#[inline]
pub(crate) fn powx(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 3.0 {
        x * x * x
    } else if e == 0.5 {
        x.sqrt()
    } else if e.fract() == 0.0 && (0.0..=32.0).contains(&e) {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

/// A point (or velocity) in the (X, Y) = (f, f') phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PhasePoint { x, y }
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: PhasePoint) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// One violated parameter constraint, named by the failed inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConstraintViolation {
    #[error("n >= 1 violated")]
    NTooSmall,
    #[error("q >= 1 violated")]
    QTooSmall,
    #[error("p > q violated")]
    PNotAboveQ,
    #[error("k > 0 violated")]
    KNotPositive,
    #[error("parameter is not finite")]
    NonFinite,
}

/// Parameter validation failure; lists every violated inequality with the
/// offending values.
#[derive(Debug, Clone, Error)]
#[error("invalid wave parameters (n={n}, p={p}, q={q}, k={k}): {}",
    .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ParamError {
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub violations: Vec<ConstraintViolation>,
}

/// Validated exponents and convection strength.
///
/// Invariants: n >= 1, p > q >= 1, k > 0, all finite. The classical range of
/// interest is n >= 2; n in [1, 2) is accepted but flagged by
/// [`WaveParams::below_classical_range`] since the convection term then loses
/// smoothness at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParams {
    n: f64,
    p: f64,
    q: f64,
    k: f64,
}

impl WaveParams {
    pub fn new(n: f64, p: f64, q: f64, k: f64) -> Result<Self, ParamError> {
        let mut violations = Vec::new();
        for v in [n, p, q, k] {
            if !v.is_finite() {
                violations.push(ConstraintViolation::NonFinite);
                break;
            }
        }
        if n < 1.0 {
            violations.push(ConstraintViolation::NTooSmall);
        }
        if q < 1.0 {
            violations.push(ConstraintViolation::QTooSmall);
        }
        if p <= q {
            violations.push(ConstraintViolation::PNotAboveQ);
        }
        if k <= 0.0 {
            violations.push(ConstraintViolation::KNotPositive);
        }
        if violations.is_empty() {
            Ok(WaveParams { n, p, q, k })
        } else {
            Err(ParamError {
                n,
                p,
                q,
                k,
                violations,
            })
        }
    }

    #[inline]
    pub fn n(&self) -> f64 {
        self.n
    }
    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }
    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }
    #[inline]
    pub fn k(&self) -> f64 {
        self.k
    }

    /// True when n < 2, i.e. outside the classical exponent range.
    pub fn below_classical_range(&self) -> bool {
        self.n < 2.0
    }

    /// The Hopf speed c = k n at which P2 swaps stability.
    #[inline]
    pub fn kn(&self) -> f64 {
        self.k * self.n
    }

    /// Half-width 2 sqrt(p - q) of the focus window around c = k n.
    #[inline]
    pub fn focus_halfwidth(&self) -> f64 {
        2.0 * (self.p - self.q).sqrt()
    }

    /// Smallest speed at which P2 is an unstable node, k n + 2 sqrt(p - q).
    #[inline]
    pub fn node_speed_upper(&self) -> f64 {
        self.kn() + self.focus_halfwidth()
    }

    /// Largest speed at which P2 is a stable node, k n - 2 sqrt(p - q).
    #[inline]
    pub fn node_speed_lower(&self) -> f64 {
        self.kn() - self.focus_halfwidth()
    }

    /// Sign of n - (p + q + 1), which decides the Hopf criticality and on
    /// which side of k n the homoclinic speed falls.
    pub fn hopf_sign(&self) -> f64 {
        self.n - (self.p + self.q + 1.0)
    }
}

/// Right-hand side of the profile system at the given wave speed.
///
/// Negative X is clamped in every power; for q = 1 the absorption term is the
/// signed `X` itself.
#[inline]
pub fn vector_field(params: &WaveParams, c: f64, pt: PhasePoint) -> PhasePoint {
    let xp = pt.x.max(0.0);
    let absorption = if params.q == 1.0 {
        pt.x
    } else {
        powx(xp, params.q)
    };
    let convection = params.kn() * powx(xp, params.n - 1.0) * pt.y;
    PhasePoint {
        x: pt.y,
        y: c * pt.y - convection - powx(xp, params.p) + absorption,
    }
}

/// Domain error for the Lienard chart, which requires 1 + X~ > 0.
#[derive(Debug, Clone, Copy, Error)]
#[error("Lienard field undefined at shifted X = {x} (requires X > -1)")]
pub struct LienardDomainError {
    pub x: f64,
}

/// Right-hand side of the Lienard form of the same flow, written in
/// coordinates shifted so that P2 sits at the origin:
///
///   X~' = Y~ + c X~ + k - k (1 + X~)^n,
///   Y~' = (1 + X~)^q - (1 + X~)^p.
///
/// The chart is only defined for 1 + X~ > 0.
pub fn lienard_field(
    params: &WaveParams,
    c: f64,
    pt: PhasePoint,
) -> Result<PhasePoint, LienardDomainError> {
    let u = 1.0 + pt.x;
    if u <= 0.0 {
        return Err(LienardDomainError { x: pt.x });
    }
    Ok(PhasePoint {
        x: pt.y + c * pt.x + params.k - params.k * powx(u, params.n),
        y: powx(u, params.q) - powx(u, params.p),
    })
}

/// One eigenvalue of the linearization at P2, stored as (re, im).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

/// Spectral type of P2 = (1, 0) as a function of the wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum P2Kind {
    /// c >= k n + 2 sqrt(p - q): both eigenvalues real and positive.
    UnstableNode,
    /// k n < c < k n + 2 sqrt(p - q): complex pair with positive real part.
    UnstableFocus,
    /// c = k n exactly: purely imaginary pair (Hopf boundary).
    CenterBoundary,
    /// k n - 2 sqrt(p - q) < c < k n: complex pair with negative real part.
    StableFocus,
    /// c <= k n - 2 sqrt(p - q): both eigenvalues real and negative.
    StableNode,
}

/// Classification of P2 together with the eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P2Class {
    pub kind: P2Kind,
    pub lambda_plus: Eigenvalue,
    pub lambda_minus: Eigenvalue,
}

/// Classify P2 at speed c. The Jacobian there is [[0, 1], [q - p, c - k n]],
/// so the eigenvalues are ((c - kn) +- sqrt((c - kn)^2 - 4 (p - q))) / 2.
pub fn classify_p2(params: &WaveParams, c: f64) -> P2Class {
    let d = c - params.kn();
    let disc = d * d - 4.0 * (params.p - params.q);
    let (lambda_plus, lambda_minus) = if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Eigenvalue {
                re: (d + s) / 2.0,
                im: 0.0,
            },
            Eigenvalue {
                re: (d - s) / 2.0,
                im: 0.0,
            },
        )
    } else {
        let s = (-disc).sqrt();
        (
            Eigenvalue {
                re: d / 2.0,
                im: s / 2.0,
            },
            Eigenvalue {
                re: d / 2.0,
                im: -s / 2.0,
            },
        )
    };
    let kind = if disc >= 0.0 {
        if d > 0.0 {
            P2Kind::UnstableNode
        } else {
            P2Kind::StableNode
        }
    } else if d == 0.0 {
        P2Kind::CenterBoundary
    } else if d > 0.0 {
        P2Kind::UnstableFocus
    } else {
        P2Kind::StableFocus
    };
    P2Class {
        kind,
        lambda_plus,
        lambda_minus,
    }
}

/// Lyapunov number of the weak focus at c = k n:
///
///   sigma = -3 k n (n - 1) pi (n - p - q - 1) / (4 sqrt(p - q)).
///
/// sigma > 0 (n < p + q + 1) gives a subcritical Hopf bifurcation (an
/// unstable cycle for c slightly below k n); sigma < 0 (n > p + q + 1) a
/// supercritical one (a stable cycle for c slightly above k n).
pub fn lyapunov_number(params: &WaveParams) -> f64 {
    let (n, p, q, k) = (params.n, params.p, params.q, params.k);
    -3.0 * k * n * (n - 1.0) * std::f64::consts::PI * (n - p - q - 1.0) / (4.0 * (p - q).sqrt())
}

/// Positive coefficients of the general equation
/// dv/dt = A v_xx + B (v^n)_x + C v^p - D v^q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GeneralCoefficients {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, NormalizeError> {
        if [a, b, c, d].iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(GeneralCoefficients { a, b, c, d })
        } else {
            Err(NormalizeError::NonPositiveCoefficient { a, b, c, d })
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum NormalizeError {
    #[error("coefficients must be positive and finite (A={a}, B={b}, C={c}, D={d})")]
    NonPositiveCoefficient { a: f64, b: f64, c: f64, d: f64 },
    #[error(transparent)]
    Params(#[from] ParamError),
}

/// Scale factors of the substitution v(x, t) = lambda u(mu x, nu t) that maps
/// a solution u of the normalized equation to a solution v of the general one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleFactors {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

/// Reduce the four-coefficient equation to the normalized one, returning the
/// induced convection strength k and the scale factors:
///
///   lambda = (D/C)^{1/(p-q)},
///   nu     = C^{(1-q)/(p-q)} D^{(p-1)/(p-q)},
///   mu     = sqrt(nu / A),
///   k      = B lambda^{n-1} mu / nu.
pub fn normalize(
    coeffs: &GeneralCoefficients,
    n: f64,
    p: f64,
    q: f64,
) -> Result<(WaveParams, ScaleFactors), NormalizeError> {
    let (a, b, c, d) = (coeffs.a, coeffs.b, coeffs.c, coeffs.d);
    let pq = p - q;
    let lambda = (d / c).powf(1.0 / pq);
    let nu = c.powf((1.0 - q) / pq) * d.powf((p - 1.0) / pq);
    let mu = (nu / a).sqrt();
    let k = b * lambda.powf(n - 1.0) * mu / nu;
    let params = WaveParams::new(n, p, q, k)?;
    Ok((params, ScaleFactors { lambda, mu, nu }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn flagship() -> WaveParams {
        WaveParams::new(2.0, 3.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn validation_accepts_classical_range() {
        let p = flagship();
        assert_eq!(p.kn(), 2.0);
        assert!(!p.below_classical_range());
    }

    #[test]
    fn validation_flags_relaxed_n() {
        let p = WaveParams::new(1.0, 3.0, 2.0, 1.0).unwrap();
        assert!(p.below_classical_range());
    }

    #[test]
    fn validation_names_each_violated_inequality() {
        let err = WaveParams::new(0.5, 2.0, 2.0, 0.0).unwrap_err();
        assert!(err.violations.contains(&ConstraintViolation::NTooSmall));
        assert!(err.violations.contains(&ConstraintViolation::PNotAboveQ));
        assert!(err.violations.contains(&ConstraintViolation::KNotPositive));
        let msg = err.to_string();
        assert!(msg.contains("p > q violated"), "message was: {msg}");
    }

    #[test]
    fn field_at_interior_point_matches_hand_value() {
        // (n,p,q,k) = (2,3,2,1), c = 2.1 at (X,Y) = (1,1):
        // Y' = 2.1 - 2*1*1 - 1 + 1 = 0.1.
        let f = vector_field(&flagship(), 2.1, PhasePoint::new(1.0, 1.0));
        assert_relative_eq!(f.x, 1.0);
        assert_relative_eq!(f.y, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn field_vanishes_exactly_at_both_equilibria_and_nowhere_else_on_axis() {
        let p = flagship();
        for c in [-3.0, 0.0, 2.1] {
            for eq in [PhasePoint::new(0.0, 0.0), PhasePoint::new(1.0, 0.0)] {
                let f = vector_field(&p, c, eq);
                assert_eq!((f.x, f.y), (0.0, 0.0));
            }
            for i in 1..400 {
                let x = i as f64 * 0.01;
                if (x - 1.0).abs() < 1e-12 {
                    continue;
                }
                let f = vector_field(&p, c, PhasePoint::new(x, 0.0));
                assert!(f.y != 0.0, "spurious equilibrium at X={x}");
            }
        }
    }

    #[test]
    fn negative_x_is_clamped_in_powers() {
        let p = flagship();
        // q = 2 > 1: the whole nonlinear part vanishes for X < 0.
        let f = vector_field(&p, 1.5, PhasePoint::new(-0.3, 0.4));
        assert_relative_eq!(f.y, 1.5 * 0.4);
        // q = 1: the absorption term keeps its sign.
        let p1 = WaveParams::new(2.0, 3.0, 1.0, 1.0).unwrap();
        let f1 = vector_field(&p1, 1.5, PhasePoint::new(-0.3, 0.4));
        assert_relative_eq!(f1.y, 1.5 * 0.4 - 0.3);
    }

    #[test]
    fn lienard_field_matches_hand_value() {
        // Shifted P2 chart at (X~,Y~) = (1,0), c = 2, flagship params:
        // X~' = 0 + 2*1 + 1 - 1*(2)^2 = -1, Y~' = 2^2 - 2^3 = -4.
        let f = lienard_field(&flagship(), 2.0, PhasePoint::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(f.x, -1.0);
        assert_relative_eq!(f.y, -4.0);
    }

    #[test]
    fn lienard_rejects_chart_boundary() {
        assert!(lienard_field(&flagship(), 2.0, PhasePoint::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn p2_unstable_focus_at_flagship_speed() {
        // c = 2.1: lambda = 0.05 +- i sqrt(3.99)/2.
        let cls = classify_p2(&flagship(), 2.1);
        assert_eq!(cls.kind, P2Kind::UnstableFocus);
        assert_relative_eq!(cls.lambda_plus.re, 0.05, max_relative = 1e-12);
        assert_relative_eq!(cls.lambda_plus.im, 3.99f64.sqrt() / 2.0, max_relative = 1e-12);
        assert_relative_eq!(cls.lambda_minus.im, -3.99f64.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn p2_real_node_outside_focus_window() {
        // c = 4.5 >= kn + 2 sqrt(p-q) = 4: real eigenvalues {2, 0.5}.
        let cls = classify_p2(&flagship(), 4.5);
        assert_eq!(cls.kind, P2Kind::UnstableNode);
        assert_relative_eq!(cls.lambda_plus.re, 2.0, max_relative = 1e-12);
        assert_relative_eq!(cls.lambda_minus.re, 0.5, max_relative = 1e-12);
        assert_eq!(cls.lambda_plus.im, 0.0);

        let cls = classify_p2(&flagship(), -3.0);
        assert_eq!(cls.kind, P2Kind::StableNode);
        assert!(cls.lambda_plus.re < 0.0 && cls.lambda_minus.re < 0.0);
    }

    #[test]
    fn p2_boundaries_are_closed_for_nodes_and_exact_for_center() {
        let p = flagship();
        assert_eq!(classify_p2(&p, p.node_speed_upper()).kind, P2Kind::UnstableNode);
        assert_eq!(classify_p2(&p, p.node_speed_lower()).kind, P2Kind::StableNode);
        let center = classify_p2(&p, p.kn());
        assert_eq!(center.kind, P2Kind::CenterBoundary);
        assert_eq!(center.lambda_plus.re, 0.0);
        assert_relative_eq!(center.lambda_plus.im, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn focus_real_part_is_half_speed_offset() {
        let p = flagship();
        for c in [0.5, 1.0, 1.9, 2.5, 3.9] {
            let cls = classify_p2(&p, c);
            assert_relative_eq!(cls.lambda_plus.re, (c - p.kn()) / 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn lyapunov_number_flagship_is_six_pi() {
        let sigma = lyapunov_number(&flagship());
        assert_relative_eq!(sigma, 6.0 * std::f64::consts::PI, max_relative = 1e-14);
    }

    #[test]
    fn lyapunov_sign_tracks_hopf_criticality() {
        // n < p+q+1 -> sigma > 0; n > p+q+1 -> sigma < 0; n = 1 or n = p+q+1 -> 0.
        let pos = WaveParams::new(3.0, 3.0, 2.0, 0.7).unwrap();
        assert!(lyapunov_number(&pos) > 0.0);
        let neg = WaveParams::new(7.0, 3.0, 2.0, 1.0).unwrap();
        assert!(lyapunov_number(&neg) < 0.0);
        let zero = WaveParams::new(6.0, 3.0, 2.0, 1.3).unwrap();
        assert_relative_eq!(lyapunov_number(&zero), 0.0);
        let linear = WaveParams::new(1.0, 3.0, 2.0, 1.0).unwrap();
        assert_relative_eq!(lyapunov_number(&linear), 0.0);
    }

    #[test]
    fn normalize_identity_coefficients() {
        let coeffs = GeneralCoefficients::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (params, scale) = normalize(&coeffs, 2.0, 3.0, 2.0).unwrap();
        assert_relative_eq!(params.k(), 1.0);
        assert_relative_eq!(scale.lambda, 1.0);
        assert_relative_eq!(scale.mu, 1.0);
        assert_relative_eq!(scale.nu, 1.0);
    }

    #[test]
    fn normalize_absorbs_diffusion_and_convection_scales() {
        let coeffs = GeneralCoefficients::new(4.0, 2.0, 1.0, 1.0).unwrap();
        let (params, _) = normalize(&coeffs, 2.0, 3.0, 2.0).unwrap();
        assert_relative_eq!(params.k(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn normalize_closed_form_matches_definition() {
        // k = (B / sqrt(A)) C^{(q+1-2n)/(2(p-q))} D^{-(p+1-2n)/(2(p-q))}.
        let coeffs = GeneralCoefficients::new(2.3, 1.7, 0.6, 1.9).unwrap();
        let (n, p, q) = (2.5, 3.2, 1.4);
        let (params, _) = normalize(&coeffs, n, p, q).unwrap();
        let pq = p - q;
        let closed = coeffs.b / coeffs.a.sqrt()
            * coeffs.c.powf((q + 1.0 - 2.0 * n) / (2.0 * pq))
            * coeffs.d.powf(-(p + 1.0 - 2.0 * n) / (2.0 * pq));
        assert_relative_eq!(params.k(), closed, max_relative = 1e-12);
    }

    #[test]
    fn normalize_rejects_nonpositive_coefficients() {
        assert!(GeneralCoefficients::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(GeneralCoefficients::new(0.0, 1.0, 1.0, 1.0).is_err());
    }
}

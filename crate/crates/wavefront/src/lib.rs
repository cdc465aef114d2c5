//! Traveling-wave analysis for a scalar reaction-convection-diffusion
//! equation: u_t = u_xx + k (u^n)_x + u^p - u^q with p > q >= 1, k > 0,
//! n >= 1. A wave u(x, t) = f(x + c t) solves the profile equation
//!
//!   f'' = c f' - k n f^(n-1) f' - f^p + f^q,
//!
//! equivalently a planar system in (X, Y) = (f, f') with equilibria
//! P1 = (0, 0) and P2 = (1, 0). This crate classifies, for every wave
//! speed c, which bounded profile the system carries (fronts between the
//! rest states, a solitary pulse at one critical speed c*, periodic waves
//! and oscillatory tails in between), and reconstructs the profiles
//! numerically.
//!
//! Module map:
//! - [`model`]: parameters, vector fields, the linearization at P2, the
//!   first Lyapunov quantity, and reduction of a four-coefficient equation
//!   to this normal form;
//! - [`local`]: local analysis at the degenerate equilibrium P1 - branch
//!   seeds for the special orbits l1 and l0, closed-form tail laws, and
//!   least-squares tail fitting;
//! - [`integrate`]: an adaptive Dormand-Prince 5(4) integrator with event
//!   detection (axis crossings, escape, convergence, budget);
//! - [`shoot`]: the shooting argument that locates the critical speed c*
//!   where l1 and l0 connect, plus the resulting homoclinic orbit;
//! - [`cycles`]: Poincare return map on the X axis, limit-cycle detection,
//!   and the Lienard-plane comparison curves;
//! - [`classify`]: the speed-axis classification and profile
//!   reconstruction/verification.

pub mod classify;
pub mod cycles;
pub mod integrate;
pub mod local;
pub mod model;
pub mod par;
pub mod shoot;

pub use classify::{
    classify_speed, fit_end, periodic_class, periodic_profile, reconstruct_profile,
    verify_profile, Anchor, CheckItem, Profile, ReconstructError, TailDescriptor, VerifyReport,
    WaveClass, WaveKind,
};
pub use cycles::{
    calculus_checks, find_limit_cycle, lienard_curves, poincare_return, CalculusReport,
    CycleResult, CycleStability, LienardCurves, ReturnOutcome,
};
pub use integrate::{
    integrate, roundtrip_check, Direction, Event, EventKind, IntegratorConfig, Sample, StopRule,
    Trajectory,
};
pub use local::{
    blowup_case, default_tail_window, fit_tail, seed_l0, seed_l1, tail_law, tail_shift,
    BlowupCase, Branch, End, FitResult, SeedState, TailKind, TailLaw,
};
pub use model::{
    classify_p2, lyapunov_number, normalize, vector_field, GeneralCoefficients, P2Class, P2Kind,
    PhasePoint, ScaleFactors, WaveParams,
};
pub use shoot::{
    compute_x0, compute_x1, connection_gap, direct_connection_margin, energy_identity_gap,
    energy_residual, extract_homoclinic, find_cstar, monotone_front_margin, scan_gap, AxisHit,
    CStarResult, GapSample, Homoclinic, ShootConfig, ShootError, X0Outcome,
};

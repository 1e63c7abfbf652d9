//! The cylinder phase-space side: the planar Liénard system
//!   dx/dt = y,  dy/dt = -(sin x - a) - (b + c cos x) y,
//! its equilibria and saddle linearizations, invariant-manifold shooting,
//! stability of y = +/-infinity for the Abel chart, saddle-connection
//! residuals, numerical bifurcation curves and first-kind cycle detection.

use std::f64::consts::PI;

use crate::abel::{
    CycleKind, CycleSearch, LimitCycle, Params, Stability, TWO_PI,
};
use crate::error::{Error, Result};
use crate::integrate::{
    integrate, integrate_with_event, IntegratorConfig, TerminalStatus, Trajectory,
};
use crate::roots;

/// Convert the physical source parameters (alpha, beta, gamma) with beta > 0
/// into the reduced triple: a = alpha, b = 1/sqrt(beta), c = gamma/sqrt(beta).
pub fn from_physical(alpha: f64, beta: f64, gamma: f64) -> Result<Params> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParams(format!("beta must be > 0, got {beta}")));
    }
    let sigma = 1.0 / beta.sqrt();
    Params::new(alpha, sigma, gamma * sigma)
}

/// Right-hand side of the planar system as a closure over the parameters.
pub fn lienard_rhs(p: &Params) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + Copy {
    let (a, b, c) = (p.a(), p.b(), p.c());
    move |_t: f64, s: &[f64; 2]| {
        let (x, y) = (s[0], s[1]);
        [y, -(x.sin() - a) - (b + c * x.cos()) * y]
    }
}

/// Jacobian of the planar field at (x, y).
pub fn jacobian(p: &Params, x: f64, y: f64) -> [[f64; 2]; 2] {
    [
        [0.0, 1.0],
        [-x.cos() + p.c() * x.sin() * y, -(p.b() + p.c() * x.cos())],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Saddle,
    Antisaddle,
    /// Merged saddle-node point at a = 1.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenvalues {
    Real(f64, f64),
    ComplexPair { re: f64, im: f64 },
}

/// An equilibrium of the planar system on the covering strip.
///
/// For 0 <= a < 1 the three equilibria are A(-pi - asin a, 0),
/// B(asin a, 0) and C(pi - asin a, 0); A and C are the two lifts of the one
/// cylinder saddle and bound the strip used for shooting.
#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub x: f64,
    pub kind: EquilibriumKind,
    pub eigenvalues: Eigenvalues,
    /// Unit eigenvectors matching `eigenvalues` (saddles only).
    pub eigenvectors: Option<[[f64; 2]; 2]>,
}

fn equilibrium_at(p: &Params, x: f64) -> Equilibrium {
    let j = jacobian(p, x, 0.0);
    let tr = j[1][1];
    let det = -j[1][0]; // det of [[0,1],[j10, j11]] = -j10
    let disc = tr * tr - 4.0 * det;
    if det < 0.0 {
        // saddle: real eigenvalues of opposite sign
        let sq = disc.sqrt();
        let l1 = 0.5 * (tr + sq);
        let l2 = 0.5 * (tr - sq);
        let unit = |l: f64| {
            let n = (1.0 + l * l).sqrt();
            [1.0 / n, l / n]
        };
        Equilibrium {
            x,
            kind: EquilibriumKind::Saddle,
            eigenvalues: Eigenvalues::Real(l1, l2),
            eigenvectors: Some([unit(l1), unit(l2)]),
        }
    } else {
        let eig = if disc >= 0.0 {
            let sq = disc.sqrt();
            Eigenvalues::Real(0.5 * (tr + sq), 0.5 * (tr - sq))
        } else {
            Eigenvalues::ComplexPair {
                re: 0.5 * tr,
                im: 0.5 * (-disc).sqrt(),
            }
        };
        Equilibrium {
            x,
            kind: if det == 0.0 {
                EquilibriumKind::Degenerate
            } else {
                EquilibriumKind::Antisaddle
            },
            eigenvalues: eig,
            eigenvectors: None,
        }
    }
}

/// Equilibria of the planar system: [A, B, C] for a < 1, the merged
/// degenerate point for a = 1, empty for a > 1.
pub fn equilibria(p: &Params) -> Vec<Equilibrium> {
    let a = p.a();
    if a < 1.0 {
        let asn = a.asin();
        vec![
            equilibrium_at(p, -PI - asn),
            equilibrium_at(p, asn),
            equilibrium_at(p, PI - asn),
        ]
    } else if a == 1.0 {
        // merged saddle-node point at x = pi/2, where cos x vanishes exactly
        vec![Equilibrium {
            x: 0.5 * PI,
            kind: EquilibriumKind::Degenerate,
            eigenvalues: Eigenvalues::Real(0.0, -p.b()),
            eigenvectors: None,
        }]
    } else {
        Vec::new()
    }
}

/// Hopf surface level b = -c sqrt(1 - a^2) (meaningful for c < 0, a < 1).
pub fn hopf_level(a: f64, c: f64) -> f64 {
    -c * (1.0 - a * a).max(0.0).sqrt()
}

/// Trace of the linearization at the anti-saddle B; its sign flips exactly
/// on the Hopf surface.
pub fn antisaddle_trace(p: &Params) -> f64 {
    -(p.b() + p.c() * (1.0 - p.a() * p.a()).max(0.0).sqrt())
}

/// Which invariant-manifold branch of a saddle to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldBranch {
    UnstableUpper,
    UnstableLower,
    StableUpper,
    StableLower,
}

impl ManifoldBranch {
    fn is_unstable(&self) -> bool {
        matches!(self, ManifoldBranch::UnstableUpper | ManifoldBranch::UnstableLower)
    }

    fn is_upper(&self) -> bool {
        matches!(self, ManifoldBranch::UnstableUpper | ManifoldBranch::StableUpper)
    }
}

/// Shooting and curve-location knobs.
#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    pub integrator: IntegratorConfig,
    /// Launch offset along the saddle eigenvector.
    pub eps: f64,
    /// Time budget per leg between section crossings.
    pub leg_time: f64,
    /// Gap tolerance for located connection parameters.
    pub gap_tol: f64,
    /// Lower end of the b-bracket for curve bisection.
    pub b_floor: f64,
    /// Abel-chart magnitude of the infinity probes.
    pub probe_y: f64,
    /// Escape bound while probing infinity.
    pub probe_bound: f64,
    /// |ln(y_end/y0)| below this is an undetermined probe.
    pub probe_tie: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig {
                rel_tol: 1e-10,
                abs_tol: 1e-10,
                max_step: 0.25,
                escape_bound: 1e6,
                max_x_span: 150.0,
            },
            eps: 1e-6,
            leg_time: 150.0,
            gap_tol: 1e-6,
            b_floor: 1e-4,
            probe_y: 1e3,
            probe_bound: 1e8,
            probe_tie: 1.0,
        }
    }
}

/// Launch point for one manifold branch: saddle + eps * (unit eigenvector),
/// signed so the offset lies in the requested half-plane.
fn manifold_seed(saddle: &Equilibrium, branch: ManifoldBranch, eps: f64) -> Result<[f64; 2]> {
    if saddle.kind != EquilibriumKind::Saddle {
        return Err(Error::InvalidParams("manifold launch needs a saddle".into()));
    }
    let Eigenvalues::Real(l1, l2) = saddle.eigenvalues else {
        unreachable!("saddle has real eigenvalues");
    };
    let vecs = saddle.eigenvectors.expect("saddle carries eigenvectors");
    let (lam, v) = if branch.is_unstable() {
        if l1 > 0.0 {
            (l1, vecs[0])
        } else {
            (l2, vecs[1])
        }
    } else if l1 < 0.0 {
        (l1, vecs[0])
    } else {
        (l2, vecs[1])
    };
    debug_assert!(if branch.is_unstable() { lam > 0.0 } else { lam < 0.0 });
    let want_up = branch.is_upper();
    let sign = if (v[1] > 0.0) == want_up { 1.0 } else { -1.0 };
    Ok([saddle.x + sign * eps * v[0], sign * eps * v[1]])
}

/// Integrate one invariant-manifold branch from its eigenvector seed until
/// the x-coordinate has advanced a full revolution (2*pi forward along the
/// branch direction), the orbit escapes, or the time budget runs out.
/// Stable branches are integrated in reversed time.
pub fn saddle_manifold(
    p: &Params,
    saddle: &Equilibrium,
    branch: ManifoldBranch,
    cfg: &ShootingConfig,
) -> Result<Trajectory<2>> {
    let seed = manifold_seed(saddle, branch, cfg.eps)?;
    let rhs = lienard_rhs(p);
    let forward = branch.is_unstable();
    let field = move |t: f64, s: &[f64; 2]| {
        let d = rhs(t, s);
        if forward {
            d
        } else {
            [-d[0], -d[1]]
        }
    };
    let x_start = seed[0];
    // x advances with the flow for unstable-upper / stable-lower legs and
    // retreats otherwise; stop after one revolution either way.
    let event = move |_t: f64, s: &[f64; 2]| (s[0] - x_start).abs() - TWO_PI;
    integrate_with_event(&field, 0.0, seed, &event, &cfg.integrator)
}

enum CrossOutcome {
    Crossed { y: f64 },
    Escaped { upward: bool },
    NoCross,
}

/// Follow the flow (or reversed flow) from `seed` and return the y-value of
/// the first crossing of the section x = section_x in the requested
/// half-plane, skipping crossings on the wrong side.
fn section_crossing<F>(
    field: &F,
    seed: [f64; 2],
    section_x: f64,
    want_upper: bool,
    budget: f64,
    cfg: &ShootingConfig,
) -> Result<CrossOutcome>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let mut state = seed;
    let mut t = 0.0;
    let deadline = budget;
    let integ = IntegratorConfig {
        max_x_span: budget,
        ..cfg.integrator
    };
    for _ in 0..8 {
        let event = move |_t: f64, s: &[f64; 2]| s[0] - section_x;
        let traj = integrate_with_event(&field, t, state, &event, &integ)?;
        match traj.status {
            TerminalStatus::Event { x_event } => {
                let s = traj.eval(x_event).unwrap_or(traj.end_state());
                let y = s[1];
                if y.abs() > 1e-9 && (y > 0.0) == want_upper {
                    return Ok(CrossOutcome::Crossed { y });
                }
                t = x_event;
                state = s;
                if t - 0.0 > deadline {
                    return Ok(CrossOutcome::NoCross);
                }
            }
            TerminalStatus::Escaped { .. } => {
                return Ok(CrossOutcome::Escaped { upward: traj.end_state()[1] > 0.0 });
            }
            TerminalStatus::Completed => return Ok(CrossOutcome::NoCross),
        }
    }
    Ok(CrossOutcome::NoCross)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionKind {
    Homoclinic,
    UpperSaddleConnection,
    LowerSaddleConnection,
    Heteroclinic2Saddle,
}

/// Signed transverse gap between the relevant manifold crossings, or an
/// infinite-gap sentinel recording which side escaped first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapValue {
    Finite(f64),
    Infinite { escaped_upward: bool },
}

impl GapValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            GapValue::Finite(g) => Some(*g),
            GapValue::Infinite { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConnectionResidual {
    pub kind: ConnectionKind,
    pub gap: GapValue,
}

struct SaddlePair {
    left: Equilibrium,  // A at -pi - asin a
    right: Equilibrium, // C at pi - asin a
    section: f64,       // x = asin a, through the anti-saddle B
}

fn saddle_pair(p: &Params) -> Result<SaddlePair> {
    if !(p.a() < 1.0) {
        return Err(Error::InvalidParams(format!(
            "saddle connections need 0 <= a < 1, got a = {}",
            p.a()
        )));
    }
    let eq = equilibria(p);
    Ok(SaddlePair {
        left: eq[0],
        right: eq[2],
        section: p.a().asin(),
    })
}

fn branch_crossing(
    p: &Params,
    saddle: &Equilibrium,
    branch: ManifoldBranch,
    section: f64,
    want_upper: bool,
    eps: f64,
    cfg: &ShootingConfig,
) -> Result<CrossOutcome> {
    let seed = manifold_seed(saddle, branch, eps)?;
    let rhs = lienard_rhs(p);
    let forward = branch.is_unstable();
    let field = move |t: f64, s: &[f64; 2]| {
        let d = rhs(t, s);
        if forward {
            d
        } else {
            [-d[0], -d[1]]
        }
    };
    // the crawl away from the saddle takes ln(1/eps)/|lambda| on its own,
    // which dominates the budget for near-degenerate saddles
    let lam = match saddle.eigenvalues {
        Eigenvalues::Real(l1, l2) => {
            if branch.is_unstable() {
                l1.max(l2)
            } else {
                l1.min(l2)
            }
        }
        Eigenvalues::ComplexPair { .. } => 1.0,
    };
    let budget = cfg.leg_time + (1.0 / eps).ln() / lam.abs().max(1e-6);
    section_crossing(&field, seed, section, want_upper, budget, cfg)
}

fn gap_from(u: CrossOutcome, s: CrossOutcome) -> GapValue {
    match (u, s) {
        (CrossOutcome::Crossed { y: yu }, CrossOutcome::Crossed { y: ys }) => {
            GapValue::Finite(yu - ys)
        }
        (CrossOutcome::Escaped { upward }, _) | (_, CrossOutcome::Escaped { upward }) => {
            GapValue::Infinite { escaped_upward: upward }
        }
        _ => GapValue::Infinite { escaped_upward: false },
    }
}

fn connection_gap_eps(p: &Params, kind: ConnectionKind, eps: f64, cfg: &ShootingConfig) -> Result<GapValue> {
    let sp = saddle_pair(p)?;
    Ok(match kind {
        ConnectionKind::UpperSaddleConnection => {
            let u = branch_crossing(p, &sp.left, ManifoldBranch::UnstableUpper, sp.section, true, eps, cfg)?;
            let s = branch_crossing(p, &sp.right, ManifoldBranch::StableUpper, sp.section, true, eps, cfg)?;
            gap_from(u, s)
        }
        ConnectionKind::LowerSaddleConnection => {
            let u = branch_crossing(p, &sp.right, ManifoldBranch::UnstableLower, sp.section, false, eps, cfg)?;
            let s = branch_crossing(p, &sp.left, ManifoldBranch::StableLower, sp.section, false, eps, cfg)?;
            gap_from(u, s)
        }
        ConnectionKind::Homoclinic => {
            // the loop around B leaves C downward, passes under B, and
            // returns to C from the upper left
            let u = branch_crossing(p, &sp.right, ManifoldBranch::UnstableLower, sp.section, true, eps, cfg)?;
            let s = branch_crossing(p, &sp.right, ManifoldBranch::StableUpper, sp.section, true, eps, cfg)?;
            gap_from(u, s)
        }
        ConnectionKind::Heteroclinic2Saddle => {
            let up = connection_gap_eps(p, ConnectionKind::UpperSaddleConnection, eps, cfg)?;
            let lo = connection_gap_eps(p, ConnectionKind::LowerSaddleConnection, eps, cfg)?;
            match (up, lo) {
                (GapValue::Finite(gu), GapValue::Finite(gl)) => {
                    // zero iff both connections close simultaneously
                    GapValue::Finite(if gu.abs() >= gl.abs() { gu } else { gl })
                }
                (inf @ GapValue::Infinite { .. }, _) | (_, inf @ GapValue::Infinite { .. }) => inf,
            }
        }
    })
}

/// Measure the signed vertical gap on the section x = asin a between the
/// relevant unstable- and stable-manifold crossings.
pub fn connection_gap(p: &Params, kind: ConnectionKind, cfg: &ShootingConfig) -> Result<ConnectionResidual> {
    let gap = connection_gap_eps(p, kind, cfg.eps, cfg)?;
    Ok(ConnectionResidual { kind, gap })
}

/// Gap at launch offsets eps and eps/2; the difference estimates the
/// manifold-location error of the measurement.
pub fn connection_gap_refined(
    p: &Params,
    kind: ConnectionKind,
    cfg: &ShootingConfig,
) -> Result<(GapValue, Option<f64>)> {
    let coarse = connection_gap_eps(p, kind, cfg.eps, cfg)?;
    let fine = connection_gap_eps(p, kind, 0.5 * cfg.eps, cfg)?;
    let err = match (coarse, fine) {
        (GapValue::Finite(g1), GapValue::Finite(g2)) => Some((g1 - g2).abs()),
        _ => None,
    };
    Ok((fine, err))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfinitySide {
    Stable,
    Unstable,
    Undetermined,
}

impl InfinitySide {
    pub fn label(&self) -> &'static str {
        match self {
            InfinitySide::Stable => "stable",
            InfinitySide::Unstable => "unstable",
            InfinitySide::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfinityStability {
    pub plus: InfinitySide,
    pub minus: InfinitySide,
}

enum ProbeOutcome {
    Verdict(InfinitySide),
    /// The orbit blew up essentially at the launch point: the probe started
    /// above the section's existence cap and says nothing about infinity.
    AboveCap,
}

fn probe_once(p: &Params, x_section: f64, y0: f64, cfg: &ShootingConfig) -> Result<ProbeOutcome> {
    let fld = p.field();
    let rhs = move |x: f64, y: &[f64; 1]| [fld.rhs(x, y[0])];
    let integ = IntegratorConfig {
        escape_bound: cfg.probe_bound,
        ..cfg.integrator
    };
    let traj = integrate(&rhs, x_section, [y0], x_section + TWO_PI, &integ)?;
    Ok(match traj.status {
        // The section sits on a zero of g with g < 0 beyond it, so genuine
        // outward escape always follows an initial descent; an immediate
        // blow-up is a cap artifact instead.
        TerminalStatus::Escaped { x_stop } => {
            if x_stop - x_section < 0.5 {
                ProbeOutcome::AboveCap
            } else {
                ProbeOutcome::Verdict(InfinitySide::Stable)
            }
        }
        TerminalStatus::Completed => {
            let ratio = (traj.end_state()[0].abs() / y0.abs()).ln();
            ProbeOutcome::Verdict(if ratio > cfg.probe_tie {
                InfinitySide::Stable
            } else if ratio < -cfg.probe_tie {
                InfinitySide::Unstable
            } else {
                InfinitySide::Undetermined
            })
        }
        TerminalStatus::Event { .. } => ProbeOutcome::Verdict(InfinitySide::Undetermined),
    })
}

fn probe_side(p: &Params, x_section: f64, sign: f64, cfg: &ShootingConfig) -> Result<InfinitySide> {
    // two probe magnitudes must agree; shift the ladder down when a probe
    // lands above the existence cap of the section
    let mut base = cfg.probe_y;
    for _ in 0..4 {
        let v1 = probe_once(p, x_section, sign * base, cfg)?;
        let v2 = probe_once(p, x_section, sign * base * 10.0, cfg)?;
        match (v1, v2) {
            (ProbeOutcome::Verdict(a), ProbeOutcome::Verdict(b)) => {
                return Ok(if a == b { a } else { InfinitySide::Undetermined });
            }
            _ => {
                base /= 10.0;
                if base < 50.0 {
                    break;
                }
            }
        }
    }
    Ok(InfinitySide::Undetermined)
}

/// Probe the stability of y = +infinity and y = -infinity of the Abel
/// equation: launch large-|y0| orbits on the section through the saddle and
/// compare after one revolution. Near a saddle connection the comparison is
/// inconclusive and the side reports undetermined.
pub fn infinity_stability(p: &Params, cfg: &ShootingConfig) -> Result<InfinityStability> {
    let x_section = PI - p.a().min(1.0).asin();
    Ok(InfinityStability {
        plus: probe_side(p, x_section, 1.0, cfg)?,
        minus: probe_side(p, x_section, -1.0, cfg)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Phi,
    Psi1,
    Psi2,
}

impl CurveKind {
    pub fn name(&self) -> &'static str {
        match self {
            CurveKind::Phi => "phi",
            CurveKind::Psi1 => "psi1",
            CurveKind::Psi2 => "psi2",
        }
    }

    fn connection(&self) -> ConnectionKind {
        match self {
            CurveKind::Phi => ConnectionKind::Homoclinic,
            CurveKind::Psi1 => ConnectionKind::UpperSaddleConnection,
            CurveKind::Psi2 => ConnectionKind::LowerSaddleConnection,
        }
    }
}

/// One located point of a bifurcation curve; `b` is None when no bracket
/// exists in (b_floor, b_max) at that a.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub curve: CurveKind,
    pub a: f64,
    pub c: f64,
    pub b: Option<f64>,
    pub gap_tol: f64,
}

/// Derived constants of the curve family at fixed c.
#[derive(Debug, Clone, Copy, Default)]
pub struct CurveConstants {
    /// a where the lower connection (c < 0) or the upper connection (c > 0)
    /// reaches b = 0.
    pub a_star: Option<f64>,
    /// a where psi1 meets b = |c| sqrt(1 - a^2).
    pub a_hopf: Option<f64>,
    /// a where psi1 meets b = |c|.
    pub a_tilde: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BifurcationCurve {
    pub samples: Vec<CurveSample>,
    pub constants: CurveConstants,
}

fn default_b_max(c: f64) -> f64 {
    if c < 0.0 {
        -c + 1.0
    } else if c > 0.0 {
        c.max(1.0 / c).max(1.0) + 1.0
    } else {
        3.0
    }
}

/// Locate the connection parameter b for one curve at fixed (a, c) by
/// bisecting the signed gap over (b_floor, b_max).
///
/// Where a manifold branch winds away without reaching the section the gap is
/// infinite; the finiteness boundary in b is refined so sign changes hiding
/// right next to it (the homoclinic window closes onto the lower-connection
/// curve at small a) are still bracketed.
pub fn locate_curve_b(kind: CurveKind, a: f64, c: f64, cfg: &ShootingConfig) -> Option<f64> {
    let b_max = default_b_max(c);
    let gap_at = |b: f64| -> Option<f64> {
        let p = Params::new(a, b, c).ok()?;
        connection_gap_eps(&p, kind.connection(), cfg.eps, cfg)
            .ok()?
            .finite()
    };

    let n_seed = 12;
    let mut raw: Vec<(f64, Option<f64>)> = Vec::new();
    for k in 0..=n_seed {
        let b = cfg.b_floor + (b_max - cfg.b_floor) * k as f64 / n_seed as f64;
        raw.push((b, gap_at(b)));
    }

    // refine each finite/infinite boundary and keep the nearest finite value
    let mut pts: Vec<(f64, f64)> = raw
        .iter()
        .filter_map(|&(b, g)| g.map(|g| (b, g)))
        .collect();
    for w in raw.windows(2) {
        let ((b0, g0), (b1, g1)) = (w[0], w[1]);
        if g0.is_some() == g1.is_some() {
            continue;
        }
        let (mut b_fin, mut b_inf) = if g0.is_some() { (b0, b1) } else { (b1, b0) };
        let mut g_edge = None;
        for _ in 0..30 {
            let mid = 0.5 * (b_fin + b_inf);
            match gap_at(mid) {
                Some(g) => {
                    b_fin = mid;
                    g_edge = Some(g);
                }
                None => b_inf = mid,
            }
        }
        if let Some(g) = g_edge {
            pts.push((b_fin, g));
        }
    }
    pts.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap());

    let bracket = pts
        .windows(2)
        .find(|w| w[0].1.signum() != w[1].1.signum() && w[0].1 != 0.0)?;
    let (lo, hi) = (bracket[0].0, bracket[1].0);
    let b = roots::bisect_then_secant(lo, hi, |b| gap_at(b).unwrap_or(f64::MAX), 1e-10);
    let g_final = gap_at(b)?;
    if g_final.abs() < cfg.gap_tol {
        Some(b)
    } else {
        None
    }
}

fn a_margin() -> f64 {
    1e-3
}

fn locate_constants(c: f64, cfg: &ShootingConfig) -> CurveConstants {
    let a_lo = a_margin();
    let a_hi = 1.0 - a_margin();
    let mut out = CurveConstants::default();
    if c == 0.0 {
        return out;
    }

    // a_star: where the relevant connection curve reaches b = 0+.
    let star_kind = if c < 0.0 { CurveKind::Psi2 } else { CurveKind::Psi1 };
    let exists = |a: f64| locate_curve_b(star_kind, a, c, cfg).is_some();
    let (e_lo, e_hi) = (exists(a_lo), exists(a_hi));
    if e_lo != e_hi {
        out.a_star = Some(roots::bisect_predicate(a_lo, a_hi, exists, 1e-3));
    }

    // a_hopf: psi1(a, c) = |c| sqrt(1 - a^2); psi1 increases while the right
    // side decreases, so the difference has one sign change.
    let h = |a: f64| -> f64 {
        match locate_curve_b(CurveKind::Psi1, a, c, cfg) {
            Some(psi1) => psi1 - c.abs() * (1.0 - a * a).sqrt(),
            None => -1.0, // below the curve
        }
    };
    let (h_lo, h_hi) = (h(a_lo), h(a_hi));
    if h_lo.signum() != h_hi.signum() {
        out.a_hopf = Some(roots::bisect_then_secant(a_lo, a_hi, h, 1e-4));
    }

    // a_tilde: psi1(a, c) = |c|.
    let k = |a: f64| -> f64 {
        match locate_curve_b(CurveKind::Psi1, a, c, cfg) {
            Some(psi1) => psi1 - c.abs(),
            None => -c.abs(),
        }
    };
    let (k_lo, k_hi) = (k(a_lo), k(a_hi));
    if k_lo.signum() != k_hi.signum() {
        out.a_tilde = Some(roots::bisect_then_secant(a_lo, a_hi, k, 1e-4));
    }
    out
}

/// Estimate one bifurcation curve over an a-grid at fixed c, bisecting the
/// connection gap in b at each grid point, and compute the derived constants.
pub fn bifurcation_curve(
    curve: CurveKind,
    c: f64,
    a_grid: &[f64],
    cfg: &ShootingConfig,
) -> Result<BifurcationCurve> {
    match curve {
        CurveKind::Phi | CurveKind::Psi2 if c >= 0.0 => {
            return Err(Error::InvalidParams(format!(
                "curve {} needs c < 0, got c = {c}",
                curve.name()
            )));
        }
        _ => {}
    }
    let margin = a_margin();
    let samples: Vec<CurveSample> = a_grid
        .iter()
        .map(|&a| {
            let a_clamped = a.clamp(0.0, 1.0 - margin);
            CurveSample {
                curve,
                a,
                c,
                b: locate_curve_b(curve, a_clamped, c, cfg),
                gap_tol: cfg.gap_tol,
            }
        })
        .collect();
    Ok(BifurcationCurve {
        samples,
        constants: locate_constants(c, cfg),
    })
}

/// Return-map value around the anti-saddle B on the upper ray
/// {x = asin a, y > 0}: the y of the next crossing of the ray after one
/// loop around B, or None when the orbit leaves the strip or fails to
/// return within the time budget.
pub fn first_return(p: &Params, y0: f64, cfg: &ShootingConfig) -> Result<Option<f64>> {
    if !(p.a() < 1.0) {
        return Err(Error::InvalidParams(format!(
            "first-kind return map needs 0 <= a < 1, got a = {}",
            p.a()
        )));
    }
    let x_b = p.a().asin();
    let x_left = -PI - p.a().asin() - 0.2;
    let x_right = PI - p.a().asin() + 0.2;
    let rhs = lienard_rhs(p);
    let integ = IntegratorConfig {
        max_x_span: cfg.leg_time,
        ..cfg.integrator
    };

    let mut state = [x_b, y0];
    let mut t = 0.0;
    for _ in 0..6 {
        let event = move |_t: f64, s: &[f64; 2]| s[0] - x_b;
        let traj = integrate_with_event(&rhs, t, state, &event, &integ)?;
        if traj
            .samples
            .iter()
            .any(|&(_, s)| s[0] < x_left || s[0] > x_right)
        {
            return Ok(None); // crossed the saddle separatrix region
        }
        match traj.status {
            TerminalStatus::Event { x_event } => {
                let s = traj.eval(x_event).unwrap_or(traj.end_state());
                if s[1] > 1e-9 {
                    return Ok(Some(s[1]));
                }
                t = x_event;
                state = s;
            }
            _ => return Ok(None),
        }
    }
    Ok(None)
}

/// The planar orbit of one loop around B from the ray point (asin a, y0).
fn first_kind_orbit(p: &Params, y0: f64, cfg: &ShootingConfig) -> Result<Vec<(f64, f64)>> {
    let x_b = p.a().asin();
    let rhs = lienard_rhs(p);
    let integ = IntegratorConfig {
        max_x_span: cfg.leg_time,
        ..cfg.integrator
    };
    let mut pts: Vec<(f64, f64)> = vec![(x_b, y0)];
    let mut state = [x_b, y0];
    let mut t = 0.0;
    for _ in 0..6 {
        let event = move |_t: f64, s: &[f64; 2]| s[0] - x_b;
        let traj = integrate_with_event(&rhs, t, state, &event, &integ)?;
        pts.extend(traj.samples.iter().skip(1).map(|&(_, s)| (s[0], s[1])));
        match traj.status {
            TerminalStatus::Event { x_event } => {
                let s = traj.eval(x_event).unwrap_or(traj.end_state());
                if s[1] > 1e-9 {
                    return Ok(pts);
                }
                t = x_event;
                state = s;
            }
            _ => return Ok(pts),
        }
    }
    Ok(pts)
}

/// Find the contractible limit cycles around the anti-saddle B via the
/// return map on the upper ray from B; stability from the linearized return
/// map by central finite differences.
pub fn find_first_kind_cycles(p: &Params, cfg: &ShootingConfig) -> Result<CycleSearch> {
    let mut warnings = Vec::new();
    let displacement = |y0: f64| -> Result<Option<f64>> {
        Ok(first_return(p, y0, cfg)?.map(|r| r - y0))
    };

    // outward linear scan until the orbit stops returning
    let y_start = 1e-3;
    let dy = 0.02;
    let mut grid: Vec<(f64, f64)> = Vec::new();
    let mut y = y_start;
    let y_cap = 12.0;
    while y < y_cap {
        match displacement(y)? {
            Some(d) => grid.push((y, d)),
            None => break,
        }
        y += dy;
    }

    let mut anchors: Vec<f64> = Vec::new();
    for w in grid.windows(2) {
        let ((y0, d0), (y1, d1)) = (w[0], w[1]);
        if d0 == 0.0 || d0.signum() == d1.signum() {
            continue;
        }
        let mut bad = false;
        let root = {
            let f = |yy: f64| match displacement(yy) {
                Ok(Some(d)) => d,
                _ => {
                    bad = true;
                    d1.signum() // lost returns count toward the outer side
                }
            };
            roots::bisect_then_secant(y0, y1, f, 1e-10)
        };
        if bad {
            warnings.push(format!("return map lost orbits while refining near y0 = {root:.6}"));
        }
        anchors.push(root);
    }
    anchors.dedup_by(|u, v| (*u - *v).abs() < 1e-6);

    let mut cycles = Vec::new();
    for y0 in anchors {
        let h = 1e-6 * y0.max(1.0);
        let (rp, rm) = (displacement(y0 + h)?, displacement(y0 - h)?);
        let slope = match (rp, rm) {
            (Some(dp), Some(dm)) => (dp - dm) / (2.0 * h) + 1.0, // R'(y0)
            _ => {
                warnings.push(format!("no linearization at y0 = {y0:.6}"));
                f64::NAN
            }
        };
        let g_prime = slope - 1.0;
        let (stability, mult) = if !slope.is_finite() || g_prime.abs() < 1e-6 {
            (Stability::SemistableLowerStable, 2)
        } else if slope.abs() < 1.0 {
            (Stability::Stable, 1)
        } else {
            (Stability::Unstable, 1)
        };
        cycles.push(LimitCycle {
            kind: CycleKind::First,
            anchor: (p.a().asin(), y0),
            samples: first_kind_orbit(p, y0, cfg)?,
            stability,
            multiplicity_estimate: mult,
            g_prime,
        });
    }
    Ok(CycleSearch { cycles, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64) -> Params {
        Params::new(a, b, c).unwrap()
    }

    #[test]
    fn physical_parameter_conversion() {
        let p = from_physical(0.5, 16.0 / 9.0, -4.0 / 3.0).unwrap();
        assert!((p.a() - 0.5).abs() < 1e-12);
        assert!((p.b() - 0.75).abs() < 1e-12);
        assert!((p.c() + 1.0).abs() < 1e-12);

        let p = from_physical(0.3, 1.0, 0.0).unwrap();
        assert_eq!(p.c(), 0.0);

        let p = from_physical(0.3, 1.0, 0.8).unwrap();
        assert!((p.b() - 1.0).abs() < 1e-12);
        assert!((p.c() - 0.8).abs() < 1e-12);

        assert!(from_physical(0.3, 0.0, 1.0).is_err());
        assert!(from_physical(0.3, -2.0, 1.0).is_err());
    }

    #[test]
    fn equilibria_locations_and_kinds() {
        let p = params(0.5, 0.75, -1.0);
        let eq = equilibria(&p);
        assert_eq!(eq.len(), 3);
        let asn = 0.5f64.asin();
        assert!((eq[0].x - (-PI - asn)).abs() < 1e-12);
        assert!((eq[1].x - asn).abs() < 1e-12);
        assert!((eq[2].x - (PI - asn)).abs() < 1e-12);
        assert_eq!(eq[0].kind, EquilibriumKind::Saddle);
        assert_eq!(eq[1].kind, EquilibriumKind::Antisaddle);
        assert_eq!(eq[2].kind, EquilibriumKind::Saddle);

        // symmetric case: saddles at +/- pi, anti-saddle at 0
        let eq0 = equilibria(&params(0.0, 1.0, 0.0));
        assert!((eq0[0].x + PI).abs() < 1e-12);
        assert!(eq0[1].x.abs() < 1e-12);
        assert!((eq0[2].x - PI).abs() < 1e-12);

        assert_eq!(equilibria(&params(1.0, 0.5, 0.0)).len(), 1);
        assert_eq!(equilibria(&params(1.0, 0.5, 0.0))[0].kind, EquilibriumKind::Degenerate);
        assert!(equilibria(&params(1.5, 0.5, 0.0)).is_empty());
    }

    #[test]
    fn saddle_eigenvalue_product_matches_determinant() {
        let p = params(0.5, 0.75, -1.0);
        let eq = equilibria(&p);
        let c_saddle = eq[2];
        let Eigenvalues::Real(l1, l2) = c_saddle.eigenvalues else {
            panic!("saddle eigenvalues must be real");
        };
        let det_expected = -(1.0f64 - 0.25).sqrt(); // cos(pi - asin a) = -sqrt(1 - a^2)
        assert!((l1 * l2 - det_expected).abs() < 1e-10);
        assert!(l1 * l2 < 0.0);

        // numeric Jacobian of the field agrees with the analytic one
        let rhs = lienard_rhs(&p);
        let h = 1e-6;
        for (i, j, analytic) in [
            (0usize, 0usize, 0.0),
            (0, 1, 1.0),
            (1, 0, -c_saddle.x.cos()),
            (1, 1, -(0.75 - c_saddle.x.cos())),
        ] {
            let mut sp = [c_saddle.x, 0.0];
            let mut sm = [c_saddle.x, 0.0];
            sp[j] += h;
            sm[j] -= h;
            let num = (rhs(0.0, &sp)[i] - rhs(0.0, &sm)[i]) / (2.0 * h);
            assert!((num - analytic).abs() < 1e-6, "J[{i}][{j}]: {num} vs {analytic}");
        }
    }

    #[test]
    fn hopf_trace_sign_flip() {
        let (a, c) = (0.4, -1.2);
        let level = hopf_level(a, c);
        let below = antisaddle_trace(&params(a, level - 0.05, c));
        let above = antisaddle_trace(&params(a, level + 0.05, c));
        assert!(below > 0.0 && above < 0.0);
    }

    #[test]
    fn manifold_seed_halving_moves_crossing_linearly() {
        let p = params(0.5, 0.75, -1.0);
        let sp = saddle_pair(&p).unwrap();
        let cfg = ShootingConfig::default();
        let mut crossings = Vec::new();
        for eps in [1e-6, 5e-7] {
            match branch_crossing(
                &p,
                &sp.left,
                ManifoldBranch::UnstableUpper,
                sp.section,
                true,
                eps,
                &cfg,
            )
            .unwrap()
            {
                CrossOutcome::Crossed { y } => crossings.push(y),
                _ => panic!("branch should reach the section"),
            }
        }
        assert!((crossings[0] - crossings[1]).abs() < 10.0 * 1e-6);
    }

    #[test]
    fn unstable_branch_stays_positive_for_small_damping() {
        // deep in the small-b regime the upper branch of A runs over the
        // whole revolution without touching y = 0
        let p = params(0.1, 0.02, -1.0);
        let eq = equilibria(&p);
        let cfg = ShootingConfig::default();
        let traj = saddle_manifold(&p, &eq[0], ManifoldBranch::UnstableUpper, &cfg).unwrap();
        assert!(matches!(traj.status, TerminalStatus::Event { .. }), "{:?}", traj.status);
        assert!(traj.samples.iter().skip(1).all(|&(_, s)| s[1] > 0.0));
        let span = traj.end_state()[0] - traj.samples[0].1[0];
        assert!(span > TWO_PI - 1e-6);
    }

    #[test]
    fn symmetric_case_mirrors_upper_and_lower_gaps() {
        // at a = 0 the flow is invariant under (x, y) -> (-x, -y), so the
        // two connection residuals must mirror each other
        let cfg = ShootingConfig::default();
        let p = params(0.0, 0.5, 0.0);
        let up = connection_gap(&p, ConnectionKind::UpperSaddleConnection, &cfg).unwrap();
        let lo = connection_gap(&p, ConnectionKind::LowerSaddleConnection, &cfg).unwrap();
        let (Some(gu), Some(gl)) = (up.gap.finite(), lo.gap.finite()) else {
            panic!("both gaps should be finite");
        };
        assert!((gu + gl).abs() < 1e-5, "gu = {gu}, gl = {gl}");
    }

    #[test]
    fn infinity_unstable_beyond_saddle_node() {
        let cfg = ShootingConfig::default();
        let st = infinity_stability(&params(2.0, 1.0, 0.5), &cfg).unwrap();
        assert_eq!(st.plus, InfinitySide::Unstable);
        assert_eq!(st.minus, InfinitySide::Unstable);
    }

    #[test]
    fn infinity_split_for_strong_damping() {
        // large b with c >= 0 damps the upper chart toward infinity
        let cfg = ShootingConfig::default();
        let st = infinity_stability(&params(0.5, 2.0, 1.0), &cfg).unwrap();
        assert_eq!(st.plus, InfinitySide::Stable);
        assert_eq!(st.minus, InfinitySide::Unstable);
    }

    #[test]
    fn first_kind_cycle_of_reference_point() {
        let p = params(0.5, 0.75, -1.0);
        let cfg = ShootingConfig::default();
        let found = find_first_kind_cycles(&p, &cfg).unwrap();
        assert_eq!(found.cycles.len(), 1, "expected a single contractible cycle");
        let cyc = &found.cycles[0];
        assert_eq!(cyc.stability, Stability::Stable);
        assert!(cyc.g_prime < 0.0);
        // contained in the strip around B
        let x_b = 0.5f64.asin();
        assert!(cyc
            .samples
            .iter()
            .all(|&(x, _)| (x - x_b).abs() < PI + 0.25));
    }

    #[test]
    fn no_first_kind_cycle_for_large_damping() {
        // b >= -c: no contractible cycle
        let p = params(0.5, 1.2, -1.0);
        let cfg = ShootingConfig::default();
        let found = find_first_kind_cycles(&p, &cfg).unwrap();
        assert!(found.cycles.is_empty());
    }
}

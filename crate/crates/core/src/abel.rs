//! The Abel equation dy/dx = f(x) y^2 + g(x) y^3 on the circle, with
//! f(x) = b + c cos x and g(x) = sin x - a: displacement map, its first two
//! derivatives, zero-solution stability, the definite-sign criterion, the
//! isocline and second-kind cycle search.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorConfig, TerminalStatus, Trajectory};
use crate::roots;

pub const TWO_PI: f64 = 2.0 * PI;

/// Parameter triple (a, b, c) restricted to a >= 0, b > 0, c real.
///
/// b = 0 is accepted only through [`Params::with_zero_b`] and carries a flag,
/// matching the general-case treatment of the zero-damping boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    a: f64,
    b: f64,
    c: f64,
    zero_b: bool,
}

impl Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParams(format!("a must be >= 0, got {a}")));
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "b must be > 0, got {b} (use with_zero_b for the b = 0 boundary)"
            )));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParams(format!("c must be finite, got {c}")));
        }
        Ok(Params { a, b, c, zero_b: false })
    }

    /// The flagged b = 0 boundary case.
    pub fn with_zero_b(a: f64, c: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need a >= 0 and finite c, got a = {a}, c = {c}"
            )));
        }
        Ok(Params { a, b: 0.0, c, zero_b: true })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_zero_b(&self) -> bool {
        self.zero_b
    }

    pub fn field(&self) -> AbelField {
        AbelField { a: self.a, b: self.b, c: self.c }
    }
}

/// Coefficient functions of the Abel equation; both 2*pi-periodic.
#[derive(Debug, Clone, Copy)]
pub struct AbelField {
    a: f64,
    b: f64,
    c: f64,
}

impl AbelField {
    pub fn f(&self, x: f64) -> f64 {
        self.b + self.c * x.cos()
    }

    pub fn g(&self, x: f64) -> f64 {
        x.sin() - self.a
    }

    /// dy/dx = f y^2 + g y^3.
    pub fn rhs(&self, x: f64, y: f64) -> f64 {
        let y2 = y * y;
        self.f(x) * y2 + self.g(x) * y2 * y
    }
}

/// Leading expansion coefficients of the displacement map at y0 = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCoefficients {
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

/// Exact closed forms from the expansion recurrences
/// y2 = int f, y3 = int (2 f y2 + g), y4 = int (f (y2^2 + 2 y3) + 3 g y2):
///   G2 = 2 pi b,
///   G3 = 4 pi^2 b^2 - 2 pi a,
///   G4 = 8 pi^3 b^3 - 10 pi^2 a b - 2 pi b + pi c.
pub fn zero_coefficients(p: &Params) -> ZeroCoefficients {
    let (a, b, c) = (p.a, p.b, p.c);
    let pi2 = PI * PI;
    ZeroCoefficients {
        g2: TWO_PI * b,
        g3: 4.0 * pi2 * b * b - TWO_PI * a,
        g4: 8.0 * pi2 * PI * b * b * b - 10.0 * pi2 * a * b - TWO_PI * b + PI * c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideStability {
    Stable,
    Unstable,
}

/// Stability of the zero solution on each side, or degenerate when the
/// displacement map vanishes identically (a = b = c = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroStability {
    Degenerate,
    Classified { upper: SideStability, lower: SideStability },
}

/// Classify y = 0 from the sign of the first non-zero expansion coefficient.
pub fn zero_stability(p: &Params) -> ZeroStability {
    let zc = zero_coefficients(p);
    let first = [(zc.g2, 2u32), (zc.g3, 3), (zc.g4, 4)]
        .into_iter()
        .find(|(g, _)| *g != 0.0);
    match first {
        None => ZeroStability::Degenerate,
        Some((gk, k)) => {
            let upper = if gk > 0.0 {
                SideStability::Unstable
            } else {
                SideStability::Stable
            };
            // below zero the displacement sign is gk * (-1)^k
            let below = if k % 2 == 0 { gk } else { -gk };
            let lower = if below > 0.0 {
                SideStability::Stable
            } else {
                SideStability::Unstable
            };
            ZeroStability::Classified { upper, lower }
        }
    }
}

/// Which of the three definite-sign conditions holds, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignCondition {
    A1,
    A2,
    A3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCriterion {
    pub holds: bool,
    pub witness_xi: Option<f64>,
    pub condition: Option<SignCondition>,
}

/// Decide whether xi*g + f has definite sign for some xi, i.e. whether
/// xi^2 + c^2 <= (b - xi*a)^2 is solvable, and produce a witness xi.
///
/// A1: a >= 1, b > 0; A2: 0 <= a < 1, b >= |c|;
/// A3: 0 <= a < 1, |c| sqrt(1 - a^2) <= b < |c|.
pub fn sign_criterion(p: &Params) -> SignCriterion {
    let (a, b, c) = (p.a, p.b, p.c);
    let q = |xi: f64| xi * xi + c * c - (b - xi * a) * (b - xi * a);

    let condition = if a >= 1.0 && b > 0.0 {
        Some(SignCondition::A1)
    } else if a < 1.0 && b >= c.abs() {
        Some(SignCondition::A2)
    } else if a < 1.0 && b >= (c * (1.0 - a * a).sqrt()).abs() && b < c.abs() {
        Some(SignCondition::A3)
    } else {
        None
    };

    let witness = if a > 1.0 {
        // roots of the downward quadratic always exist here; step slightly
        // past the root so the inequality holds strictly despite the
        // cancellation at large xi (a close to 1)
        let disc = (b * b + (a * a - 1.0) * c * c).sqrt();
        let xi = (a * b + disc * (1.0 + 1e-9)) / (a * a - 1.0);
        if b == 0.0 && c == 0.0 {
            Some(1.0)
        } else {
            Some(xi)
        }
    } else if a == 1.0 {
        if b > 0.0 {
            Some((b * b - c * c) / (2.0 * b))
        } else if c == 0.0 {
            Some(1.0)
        } else {
            None
        }
    } else {
        // minimizer of the upward quadratic
        let xi = a * b / (a * a - 1.0);
        if q(xi) <= 0.0 && !(b == 0.0 && c == 0.0) {
            Some(xi)
        } else {
            None
        }
    };

    match (condition, witness) {
        (Some(cond), Some(xi)) => {
            debug_assert!(q(xi) <= 1e-9 * (1.0 + xi * xi + b * b + c * c));
            SignCriterion {
                holds: true,
                witness_xi: Some(xi),
                condition: Some(cond),
            }
        }
        _ => SignCriterion {
            holds: false,
            witness_xi: None,
            condition: None,
        },
    }
}

/// Value of the isocline w(x) = -f(x)/g(x), or a pole where sin x = a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isocline {
    Value(f64),
    Pole,
}

pub fn isocline(p: &Params, x: f64) -> Isocline {
    let fld = p.field();
    let g = fld.g(x);
    if g == 0.0 {
        Isocline::Pole
    } else {
        Isocline::Value(-fld.f(x) / g)
    }
}

/// w'(x) = (c - a c sin x + b cos x) / (sin x - a)^2, away from poles.
pub fn isocline_derivative(p: &Params, x: f64) -> Isocline {
    let g = x.sin() - p.a;
    if g == 0.0 {
        Isocline::Pole
    } else {
        Isocline::Value((p.c - p.a * p.c * x.sin() + p.b * x.cos()) / (g * g))
    }
}

/// Result of evaluating the displacement map at one initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Displacement {
    Value(f64),
    /// The orbit blew up before completing the period.
    Escaped,
}

impl Displacement {
    pub fn value(&self) -> Option<f64> {
        match self {
            Displacement::Value(v) => Some(*v),
            Displacement::Escaped => None,
        }
    }
}

/// G(y0) = y(x0 + 2 pi, x0, y0) - y0.
pub fn poincare_displacement(
    p: &Params,
    x0: f64,
    y0: f64,
    cfg: &IntegratorConfig,
) -> Result<Displacement> {
    let fld = p.field();
    let rhs = move |x: f64, y: &[f64; 1]| [fld.rhs(x, y[0])];
    let traj = integrate(&rhs, x0, [y0], x0 + TWO_PI, cfg)?;
    Ok(match traj.status {
        TerminalStatus::Completed => Displacement::Value(traj.end_state()[0] - y0),
        _ => Displacement::Escaped,
    })
}

/// Full one-period solution from (x0, y0); errors if the orbit escapes.
pub fn period_orbit(
    p: &Params,
    x0: f64,
    y0: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<1>> {
    let fld = p.field();
    let rhs = move |x: f64, y: &[f64; 1]| [fld.rhs(x, y[0])];
    let traj = integrate(&rhs, x0, [y0], x0 + TWO_PI, cfg)?;
    match traj.status {
        TerminalStatus::Completed => Ok(traj),
        TerminalStatus::Escaped { x_stop } => Err(Error::UnexpectedEscape(x_stop)),
        TerminalStatus::Event { x_event } => Err(Error::UnexpectedEscape(x_event)),
    }
}

/// Kind of a located limit cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    First,
    SecondPositive,
    SecondNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    SemistableLowerStable,
    SemistableUpperStable,
}

impl Stability {
    pub fn label(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::SemistableLowerStable => "semistable-lower-stable",
            Stability::SemistableUpperStable => "semistable-upper-stable",
        }
    }
}

/// A located periodic solution.
///
/// For second-kind cycles the samples are graph points (x, y(x)) of the Abel
/// solution over one period; for first-kind cycles they are phase-plane
/// points (x(t), y(t)) of one loop around the anti-saddle.
#[derive(Debug, Clone)]
pub struct LimitCycle {
    pub kind: CycleKind,
    pub anchor: (f64, f64),
    pub samples: Vec<(f64, f64)>,
    pub stability: Stability,
    pub multiplicity_estimate: u8,
    pub g_prime: f64,
}

/// First variation of the displacement map along the cycle through `anchor`:
/// exp(integral of 2 f y + 3 g y^2 over one period) - 1.
pub fn displacement_derivative(
    p: &Params,
    cycle: &LimitCycle,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let (x0, y0) = cycle.anchor;
    variational_integrals(p, x0, y0, cfg).map(|(g1, _)| g1)
}

/// Second derivative of the displacement map along the cycle through
/// `anchor`; positive at a multiplicity-2 cycle means lower stable.
pub fn displacement_second_derivative(
    p: &Params,
    cycle: &LimitCycle,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let (x0, y0) = cycle.anchor;
    variational_integrals(p, x0, y0, cfg).map(|(_, g2)| g2)
}

/// Compute (G'(y0), G''(y0)) by augmenting the Abel equation with the
/// variational integrands:
///   I' = 2 f y + 3 g y^2,   J' = (2 f + 6 g y) exp(I),
/// giving G' = exp(I) - 1 and G'' = exp(I) * J at the period end.
pub fn variational_integrals(
    p: &Params,
    x0: f64,
    y0: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    let fld = p.field();
    let rhs = move |x: f64, s: &[f64; 3]| {
        let (y, i) = (s[0], s[1]);
        let (f, g) = (fld.f(x), fld.g(x));
        let di = 2.0 * f * y + 3.0 * g * y * y;
        let dj = (2.0 * f + 6.0 * g * y) * i.exp();
        [fld.rhs(x, y), di, dj]
    };
    // The J accumulator legitimately spikes by orders of magnitude when the
    // cycle passes near the blow-up region; only genuine non-finite blow-up
    // should end the run, so the escape bound is effectively disabled.
    let integ = IntegratorConfig {
        escape_bound: 1e250,
        ..*cfg
    };
    let traj = integrate(&rhs, x0, [y0, 0.0, 0.0], x0 + TWO_PI, &integ)
        .map_err(|e| Error::Resolution(e.to_string()))?;
    match traj.status {
        TerminalStatus::Completed => {
            let [_, i_end, j_end] = traj.end_state();
            let gp = i_end.exp() - 1.0;
            Ok((gp, i_end.exp() * j_end))
        }
        _ => Err(Error::Resolution(format!(
            "orbit through ({x0}, {y0}) does not close over a period"
        ))),
    }
}

/// Sign region for second-kind cycle search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRegion {
    Positive,
    Negative,
}

/// Knobs for the second-kind cycle search.
#[derive(Debug, Clone, Copy)]
pub struct CycleSearchConfig {
    pub integrator: IntegratorConfig,
    /// Innermost |y0| probed, just above the zero-solution's neighbourhood.
    pub y_min: f64,
    /// Geometric grid points per decade.
    pub per_decade: usize,
    /// Decades past the last sign change before the scan stops.
    pub quiet_decades: f64,
    /// The scan always covers |y0| up to at least this magnitude before the
    /// quiet-decade rule may stop it (cycles live at O(1) heights).
    pub min_coverage: f64,
    /// Root refinement tolerance in y0.
    pub root_tol: f64,
    /// Roots closer than this merge into one.
    pub merge_tol: f64,
    /// |G'| below this marks a multiplicity-2 candidate.
    pub hyperbolic_tol: f64,
    /// |G| at a tangential local minimum below this counts as a cycle.
    pub semistable_g_tol: f64,
}

impl Default for CycleSearchConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::locate(),
            y_min: 1e-4,
            per_decade: 24,
            quiet_decades: 3.0,
            min_coverage: 20.0,
            root_tol: 1e-10,
            merge_tol: 1e-6,
            hyperbolic_tol: 1e-6,
            semistable_g_tol: 1e-7,
        }
    }
}

impl CycleSearchConfig {
    pub fn scan() -> Self {
        Self {
            integrator: IntegratorConfig::scan(),
            ..Self::default()
        }
    }
}

/// Search outcome with refinement diagnostics.
#[derive(Debug, Clone)]
pub struct CycleSearch {
    pub cycles: Vec<LimitCycle>,
    pub warnings: Vec<String>,
}

/// Base section for all Abel-side maps.
pub const BASE_SECTION: f64 = 0.0;

/// Find the nonzero limit cycles of the Abel equation in one sign region.
///
/// Scans y0 over a geometric grid outward from `y_min`, brackets sign changes
/// of the displacement map, refines them by bisection-then-secant, merges
/// near-duplicates and attaches stability from the first variation.
/// Tangential (non-crossing) zeros are picked up as local minima of |G|.
pub fn find_second_kind_cycles(
    p: &Params,
    region: SignRegion,
    cfg: &CycleSearchConfig,
) -> Result<CycleSearch> {
    let sign = match region {
        SignRegion::Positive => 1.0,
        SignRegion::Negative => -1.0,
    };
    let ratio = 10f64.powf(1.0 / cfg.per_decade as f64);

    let displacement = |y0: f64| -> Result<Option<f64>> {
        Ok(poincare_displacement(p, BASE_SECTION, y0, &cfg.integrator)?.value())
    };

    // Outward scan: magnitude, G value (None = escaped).
    let mut grid: Vec<(f64, Option<f64>)> = Vec::new();
    let mut mag = cfg.y_min;
    let mut last_sign_change_mag = cfg.y_min;
    let hard_cap = 1e9;
    loop {
        let g = displacement(sign * mag)?;
        if let (Some((_, Some(prev))), Some(cur)) = (grid.last(), g) {
            if prev.signum() != cur.signum() && *prev != 0.0 && cur != 0.0 {
                last_sign_change_mag = mag;
            }
        }
        let escaped = g.is_none();
        grid.push((mag, g));
        if escaped {
            break;
        }
        if mag > cfg.min_coverage
            && mag > last_sign_change_mag * 10f64.powf(cfg.quiet_decades)
        {
            break;
        }
        mag *= ratio;
        if mag > hard_cap {
            break;
        }
    }

    let mut warnings = Vec::new();
    let mut roots_found: Vec<f64> = Vec::new();

    for w in grid.windows(2) {
        let (m0, g0) = w[0];
        let (m1, g1) = w[1];
        match (g0, g1) {
            (Some(g0), Some(g1)) => {
                if g0 != 0.0 && g0.signum() != g1.signum() {
                    roots_found.push(refine_root(p, sign, m0, m1, cfg, &mut warnings)?);
                }
            }
            (Some(g0), None) => {
                // Orbits blow up beyond the basin boundary inside this cell.
                // The displacement reaches a finite limit from below, so the
                // whole sign structure between m0 and the boundary must be
                // resolved against the last completing orbit, not against an
                // infinite sentinel.
                if let Some((m_edge, g_edge)) = escape_boundary(p, sign, m0, m1, cfg)? {
                    if g0 != 0.0 && g_edge != 0.0 && g0.signum() != g_edge.signum() {
                        roots_found.push(refine_root(p, sign, m0, m_edge, cfg, &mut warnings)?);
                    }
                }
            }
            _ => {}
        }
    }

    // Tangential zeros: local minima of |G| with no sign change.
    let mut tangential: Vec<f64> = Vec::new();
    for w in grid.windows(3) {
        let vals: Vec<Option<f64>> = w.iter().map(|(_, g)| *g).collect();
        let (Some(g0), Some(g1), Some(g2)) = (vals[0], vals[1], vals[2]) else {
            continue;
        };
        if g0.signum() == g1.signum()
            && g1.signum() == g2.signum()
            && g1.abs() < g0.abs()
            && g1.abs() < g2.abs()
        {
            let (m_min, g_min) = roots::refine_minimum(
                w[0].0,
                w[2].0,
                |m| {
                    displacement(sign * m)
                        .ok()
                        .flatten()
                        .map(|v| v.abs())
                        .unwrap_or(f64::INFINITY)
                },
                cfg.root_tol,
            );
            if g_min < 0.0 {
                unreachable!("refine_minimum returns |G|");
            }
            let g_at = displacement(sign * m_min)?.unwrap_or(f64::INFINITY);
            if g_at.abs() < cfg.semistable_g_tol {
                tangential.push(sign * m_min);
            } else if g_at.signum() != g1.signum() {
                // the coarse grid hid a pair of crossings
                let r1 = refine_root(p, sign, w[0].0, m_min, cfg, &mut warnings)?;
                let r2 = refine_root(p, sign, m_min, w[2].0, cfg, &mut warnings)?;
                roots_found.push(r1);
                roots_found.push(r2);
                warnings.push(format!(
                    "grid refinement split a hidden bracket near y0 = {:.6e}",
                    sign * m_min
                ));
            }
        }
    }

    roots_found.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    roots_found.dedup_by(|a, b| (*a - *b).abs() < cfg.merge_tol);

    let mut cycles = Vec::new();
    for y0 in roots_found {
        cycles.push(build_cycle(p, region, y0, false, cfg)?);
    }
    for y0 in tangential {
        if cycles
            .iter()
            .all(|cyc: &LimitCycle| (cyc.anchor.1 - y0).abs() >= cfg.merge_tol)
        {
            cycles.push(build_cycle(p, region, y0, true, cfg)?);
        }
    }
    cycles.sort_by(|u, v| u.anchor.1.abs().partial_cmp(&v.anchor.1.abs()).unwrap());

    Ok(CycleSearch { cycles, warnings })
}

/// Bisect the blow-up boundary between a completing magnitude `m_ok` and an
/// escaping magnitude `m_bad`; returns the last completing magnitude and its
/// displacement. Orbits are ordered, so the escaping set is one-sided.
fn escape_boundary(
    p: &Params,
    sign: f64,
    mut m_ok: f64,
    mut m_bad: f64,
    cfg: &CycleSearchConfig,
) -> Result<Option<(f64, f64)>> {
    let mut g_ok = None;
    for _ in 0..60 {
        if (m_bad - m_ok) < 1e-12 * m_ok.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (m_ok + m_bad);
        match poincare_displacement(p, BASE_SECTION, sign * mid, &cfg.integrator)?.value() {
            Some(g) => {
                m_ok = mid;
                g_ok = Some(g);
            }
            None => m_bad = mid,
        }
    }
    Ok(g_ok.map(|g| (m_ok, g)))
}

fn refine_root(
    p: &Params,
    sign: f64,
    m_lo: f64,
    m_hi: f64,
    cfg: &CycleSearchConfig,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    let mut fail: Option<Error> = None;
    let root_mag = {
        let f = |m: f64| match poincare_displacement(p, BASE_SECTION, sign * m, &cfg.integrator) {
            Ok(d) => d.value().unwrap_or(sign * f64::INFINITY),
            Err(e) => {
                fail = Some(e);
                f64::NAN
            }
        };
        roots::bisect_then_secant(m_lo, m_hi, f, cfg.root_tol)
    };
    if let Some(e) = fail {
        return Err(e);
    }

    // Newton polish in G itself: bisection bounds the root in y0, but cycles
    // squeezed against the basin boundary have huge |G'|, so a tiny y-error
    // can still leave |G| far above the closure tolerance.
    let mut y = sign * root_mag;
    for _ in 0..8 {
        let g = match poincare_displacement(p, BASE_SECTION, y, &cfg.integrator)?.value() {
            Some(g) => g,
            None => break,
        };
        if g.abs() < 1e-10 {
            break;
        }
        let (gp, _) = variational_integrals(p, BASE_SECTION, y, &cfg.integrator)?;
        if gp == 0.0 || !gp.is_finite() {
            break;
        }
        let step = g / gp;
        let y_new = y - step;
        if !y_new.is_finite() || y_new.signum() != y.signum() {
            break;
        }
        y = y_new;
        if step.abs() < 1e-15 * y.abs() {
            break;
        }
    }

    let check = poincare_displacement(p, BASE_SECTION, y, &cfg.integrator)?;
    match check.value() {
        Some(v) if v.abs() <= 1e-8 => {}
        Some(v) => warnings.push(format!(
            "root at y0 = {y:.6e} only refined to |G| = {:.2e}",
            v.abs()
        )),
        None => warnings.push(format!("root at y0 = {y:.6e} drifted past the basin boundary")),
    }
    Ok(y)
}

fn build_cycle(
    p: &Params,
    region: SignRegion,
    y0: f64,
    tangential: bool,
    cfg: &CycleSearchConfig,
) -> Result<LimitCycle> {
    let (g_prime, g_second) = variational_integrals(p, BASE_SECTION, y0, &cfg.integrator)?;
    let orbit = period_orbit(p, BASE_SECTION, y0, &cfg.integrator)?;
    let samples = orbit.samples.iter().map(|&(x, [y])| (x, y)).collect();

    let (stability, multiplicity) = if tangential || g_prime.abs() < cfg.hyperbolic_tol {
        let st = if g_second > 0.0 {
            Stability::SemistableLowerStable
        } else {
            Stability::SemistableUpperStable
        };
        (st, 2)
    } else if g_prime < 0.0 {
        (Stability::Stable, 1)
    } else {
        (Stability::Unstable, 1)
    };

    Ok(LimitCycle {
        kind: match region {
            SignRegion::Positive => CycleKind::SecondPositive,
            SignRegion::Negative => CycleKind::SecondNegative,
        },
        anchor: (BASE_SECTION, y0),
        samples,
        stability,
        multiplicity_estimate: multiplicity,
        g_prime,
    })
}

/// Count the (+ to -) and (- to +) sign changes of dy/dx over a cycle's
/// samples in one period; a single-max/single-min profile gives (1, 1).
pub fn slope_sign_changes(p: &Params, cycle: &LimitCycle) -> (usize, usize) {
    let fld = p.field();
    let mut down = 0usize;
    let mut up = 0usize;
    let mut last = 0.0f64;
    for &(x, y) in &cycle.samples {
        let s = fld.rhs(x, y);
        if s != 0.0 {
            if last > 0.0 && s < 0.0 {
                down += 1;
            } else if last < 0.0 && s > 0.0 {
                up += 1;
            }
            last = s;
        }
    }
    (down, up)
}

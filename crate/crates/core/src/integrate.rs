//! Adaptive Dormand-Prince 5(4) integration with dense output, event location
//! and blow-up (escape) detection for scalar and planar non-autonomous fields.

use crate::error::{Error, Result};

/// Smallest step size before the integrator gives up as stiff.
pub const MIN_STEP: f64 = 1e-12;
const MAX_STEPS: usize = 4_000_000;
const MAX_CONSECUTIVE_REJECTS: usize = 80;

/// Tolerances and guards for one integration run.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in the independent variable (radians).
    pub max_step: f64,
    /// State norm beyond which the orbit counts as escaped.
    pub escape_bound: f64,
    /// Span cap for event searches with no fixed endpoint.
    pub max_x_span: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.25,
            escape_bound: 1e6,
            max_x_span: 200.0 * std::f64::consts::PI,
        }
    }
}

impl IntegratorConfig {
    /// Looser tolerances for parameter scans.
    pub fn scan() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-8,
            ..Self::default()
        }
    }

    /// Tight tolerances for cycle location and derivative work.
    pub fn locate() -> Self {
        Self::default()
    }

    pub fn with_tols(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }

    pub fn with_escape_bound(mut self, bound: f64) -> Self {
        self.escape_bound = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            self.rel_tol,
            self.abs_tol,
            self.max_step,
            self.escape_bound,
            self.max_x_span,
        ];
        if pos.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidConfig(
                "all tolerances and bounds must be strictly positive".into(),
            ));
        }
        if self.rel_tol > 1e-3 || self.abs_tol > 1e-3 {
            return Err(Error::InvalidConfig(
                "rel_tol and abs_tol must not exceed 1e-3".into(),
            ));
        }
        Ok(())
    }
}

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminalStatus {
    /// Reached the requested endpoint (or span cap).
    Completed,
    /// The orbit blew up before the endpoint: the state norm passed the
    /// escape bound, or the step size hit its floor while the state was
    /// already large and exploding (cubic blow-ups steepen faster than the
    /// step floor allows to resolve).
    Escaped { x_stop: f64 },
    /// An event function changed sign; located by bisection.
    Event { x_event: f64 },
}

/// Step-size underflow at a state this large counts as a blow-up rather than
/// a stiffness failure. Cubic blow-ups steepen like (x_pole - x)^(-1/2), so
/// the adaptive march stalls around 5e4 at tight tolerances, well before a
/// 1e6-scale escape bound can be crossed.
fn blow_up_guard(escape_bound: f64) -> f64 {
    (escape_bound * 1e-2).min(1e3)
}

/// One accepted step's dense-output polynomial (quartic, Hairer's
/// continuous extension of Dormand-Prince).
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    x0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    fn eval(&self, x: f64) -> [f64; N] {
        let theta = (x - self.x0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, slot) in out.iter_mut().enumerate() {
            let [r1, r2, r3, r4, r5] = [
                self.rcont[0][i],
                self.rcont[1][i],
                self.rcont[2][i],
                self.rcont[3][i],
                self.rcont[4][i],
            ];
            *slot = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
        out
    }
}

/// Solution curve over an x-interval: accepted-step samples, a continuous
/// interpolant, and the terminal status.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub samples: Vec<(f64, [f64; N])>,
    steps: Vec<DenseStep<N>>,
    pub status: TerminalStatus,
}

impl<const N: usize> Trajectory<N> {
    pub fn start_x(&self) -> f64 {
        self.samples.first().expect("non-empty trajectory").0
    }

    pub fn end_x(&self) -> f64 {
        self.samples.last().expect("non-empty trajectory").0
    }

    pub fn end_state(&self) -> [f64; N] {
        self.samples.last().expect("non-empty trajectory").1
    }

    /// Evaluate the dense interpolant; `None` outside the covered interval.
    pub fn eval(&self, x: f64) -> Option<[f64; N]> {
        let (x_start, x_end) = (self.start_x(), self.end_x());
        let slack = 1e-12 * (1.0 + x_end.abs().max(x_start.abs()));
        if x < x_start - slack || x > x_end + slack {
            return None;
        }
        if self.steps.is_empty() {
            return Some(self.samples[0].1);
        }
        let x = x.clamp(x_start, x_end);
        // binary search for the step containing x
        let idx = self
            .steps
            .partition_point(|s| s.x0 + s.h < x)
            .min(self.steps.len() - 1);
        Some(self.steps[idx].eval(x))
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn inf_norm<const N: usize>(v: &[f64; N]) -> f64 {
    let mut m = 0.0f64;
    for x in v {
        if !x.is_finite() {
            return f64::INFINITY;
        }
        m = m.max(x.abs());
    }
    m
}

struct Stepper<'a, F, const N: usize> {
    field: &'a F,
    cfg: IntegratorConfig,
    x: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
}

struct StepOutcome<const N: usize> {
    x_new: f64,
    y_new: [f64; N],
    dense: DenseStep<N>,
}

impl<'a, F, const N: usize> Stepper<'a, F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn new(field: &'a F, x0: f64, y0: [f64; N], h0: f64, cfg: IntegratorConfig) -> Self {
        let k1 = field(x0, &y0);
        Stepper {
            field,
            cfg,
            x: x0,
            y: y0,
            k1,
            h: h0.min(cfg.max_step).max(MIN_STEP),
        }
    }

    /// One accepted Dormand-Prince step (retries internally on rejection).
    fn step(&mut self, x_limit: f64) -> Result<StepOutcome<N>> {
        let mut rejects = 0usize;
        loop {
            let mut h = self.h.min(self.cfg.max_step);
            if self.x + h > x_limit {
                h = x_limit - self.x;
            }
            if h < MIN_STEP {
                return Err(Error::StepSizeUnderflow { x: self.x, h });
            }

            let mut k = [[0.0; N]; 7];
            k[0] = self.k1;
            for s in 1..7 {
                let mut ys = self.y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[s] = (self.field)(self.x + C[s] * h, &ys);
            }
            // stage 7 is the FSAL solution point: y_new via the A[6] row
            let mut y_new = self.y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let a = A[6][j];
                if a != 0.0 {
                    for i in 0..N {
                        y_new[i] += h * a * kj[i];
                    }
                }
            }

            let mut err_norm = 0.0f64;
            for i in 0..N {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                e *= h;
                let sc = self.cfg.abs_tol
                    + self.cfg.rel_tol * self.y[i].abs().max(y_new[i].abs());
                let ratio = (e / sc).abs();
                if !ratio.is_finite() || !y_new[i].is_finite() {
                    // f64::max ignores NaN, so force the rejection explicitly
                    err_norm = f64::INFINITY;
                    break;
                }
                err_norm = err_norm.max(ratio);
            }

            if err_norm.is_finite() && err_norm <= 1.0 {
                let mut ydiff = [0.0; N];
                let mut bspl = [0.0; N];
                let mut r5 = [0.0; N];
                for i in 0..N {
                    ydiff[i] = y_new[i] - self.y[i];
                    bspl[i] = h * k[0][i] - ydiff[i];
                    let mut d = 0.0;
                    for (j, kj) in k.iter().enumerate() {
                        d += D[j] * kj[i];
                    }
                    r5[i] = h * d;
                }
                let mut r4 = [0.0; N];
                for i in 0..N {
                    r4[i] = ydiff[i] - h * k[6][i] - bspl[i];
                }
                let dense = DenseStep {
                    x0: self.x,
                    h,
                    rcont: [self.y, ydiff, bspl, r4, r5],
                };

                let x_new = self.x + h;
                self.x = x_new;
                self.y = y_new;
                self.k1 = k[6]; // FSAL
                let scale = if err_norm == 0.0 {
                    5.0
                } else {
                    (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                self.h = (h * scale).min(self.cfg.max_step);
                return Ok(StepOutcome { x_new, y_new, dense });
            }

            rejects += 1;
            if rejects > MAX_CONSECUTIVE_REJECTS {
                return Err(Error::StepSizeUnderflow { x: self.x, h });
            }
            let scale = if err_norm.is_finite() {
                (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            self.h = h * scale;
            if self.h < MIN_STEP {
                return Err(Error::StepSizeUnderflow { x: self.x, h: self.h });
            }
        }
    }
}

fn initial_step(span: f64, cfg: &IntegratorConfig) -> f64 {
    (span / 64.0).min(cfg.max_step).max(MIN_STEP * 10.0)
}

/// Integrate `dy/dx = field(x, y)` from `x0` to `x1`.
///
/// Returns `Escaped` instead of diverging when the state norm passes the
/// escape bound (Abel solutions can blow up in finite x).
pub fn integrate<F, const N: usize>(
    field: &F,
    x0: f64,
    state0: [f64; N],
    x1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    cfg.validate()?;
    if !(x1 > x0) {
        return Err(Error::InvalidConfig(format!(
            "integration span must be forward (x0 = {x0}, x1 = {x1})"
        )));
    }
    let mut traj = Trajectory {
        samples: vec![(x0, state0)],
        steps: Vec::new(),
        status: TerminalStatus::Completed,
    };
    let mut stepper = Stepper::new(field, x0, state0, initial_step(x1 - x0, cfg), *cfg);
    let mut n_steps = 0usize;
    while stepper.x < x1 {
        n_steps += 1;
        if n_steps > MAX_STEPS {
            return Err(Error::StepLimit { x: stepper.x });
        }
        let out = match stepper.step(x1) {
            Ok(out) => out,
            Err(Error::StepSizeUnderflow { x, .. })
                if inf_norm(&stepper.y) >= blow_up_guard(cfg.escape_bound) =>
            {
                traj.status = TerminalStatus::Escaped { x_stop: x };
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        traj.samples.push((out.x_new, out.y_new));
        traj.steps.push(out.dense);
        if inf_norm(&out.y_new) > cfg.escape_bound {
            traj.status = TerminalStatus::Escaped { x_stop: out.x_new };
            return Ok(traj);
        }
    }
    Ok(traj)
}

/// Integrate until `event(x, state)` changes sign, up to `x0 + max_x_span`.
///
/// The event is located by bisection on the dense interpolant. A run with no
/// sign change completes normally (not an error). An initial event value of
/// zero does not fire; the sign must first become definite.
pub fn integrate_with_event<F, E, const N: usize>(
    field: &F,
    x0: f64,
    state0: [f64; N],
    event: &E,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    E: Fn(f64, &[f64; N]) -> f64,
{
    cfg.validate()?;
    let x_limit = x0 + cfg.max_x_span;
    let mut traj = Trajectory {
        samples: vec![(x0, state0)],
        steps: Vec::new(),
        status: TerminalStatus::Completed,
    };
    let mut stepper = Stepper::new(field, x0, state0, initial_step(cfg.max_x_span, cfg), *cfg);

    let g_eps = cfg.abs_tol;
    let mut last_sign = {
        let g0 = event(x0, &state0);
        if g0.abs() > g_eps {
            g0.signum()
        } else {
            0.0
        }
    };

    let mut n_steps = 0usize;
    while stepper.x < x_limit {
        n_steps += 1;
        if n_steps > MAX_STEPS {
            return Err(Error::StepLimit { x: stepper.x });
        }
        let out = match stepper.step(x_limit) {
            Ok(out) => out,
            Err(Error::StepSizeUnderflow { x, .. })
                if inf_norm(&stepper.y) >= blow_up_guard(cfg.escape_bound) =>
            {
                traj.status = TerminalStatus::Escaped { x_stop: x };
                return Ok(traj);
            }
            Err(e) => return Err(e),
        };
        let g = event(out.x_new, &out.y_new);

        if last_sign != 0.0 && g.abs() > g_eps && g.signum() != last_sign {
            // sign change inside this step: bisect on the dense output
            let dense = &out.dense;
            let (mut lo, mut hi) = (dense.x0, out.x_new);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let gm = event(mid, &dense.eval(mid));
                if gm == 0.0 || (hi - lo) < 1e-15 * (1.0 + hi.abs()) {
                    hi = mid;
                    break;
                }
                if gm.signum() == last_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if event(hi, &dense.eval(hi)).abs() < cfg.abs_tol {
                    break;
                }
            }
            let x_event = hi;
            let y_event = dense.eval(x_event);
            // keep the whole step so the interpolant stays valid; the
            // trajectory simply ends at the event sample inside it
            if x_event > out.dense.x0 {
                traj.steps.push(out.dense);
                traj.samples.push((x_event, y_event));
            }
            traj.status = TerminalStatus::Event { x_event };
            return Ok(traj);
        }
        if g.abs() > g_eps {
            last_sign = g.signum();
        }

        traj.samples.push((out.x_new, out.y_new));
        traj.steps.push(out.dense);
        if inf_norm(&out.y_new) > cfg.escape_bound {
            traj.status = TerminalStatus::Escaped { x_stop: out.x_new };
            return Ok(traj);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn abel_rhs(a: f64, b: f64, c: f64) -> impl Fn(f64, &[f64; 1]) -> [f64; 1] {
        move |x, y| {
            let f = b + c * x.cos();
            let g = x.sin() - a;
            [f * y[0] * y[0] + g * y[0] * y[0] * y[0]]
        }
    }

    #[test]
    fn zero_field_constant_trajectory() {
        let cfg = IntegratorConfig::default();
        let traj = integrate(&|_x, _y: &[f64; 1]| [0.0], 0.0, [1.0], 2.0 * PI, &cfg).unwrap();
        assert_eq!(traj.status, TerminalStatus::Completed);
        for &(_, y) in &traj.samples {
            assert_eq!(y[0], 1.0);
        }
        assert!((traj.end_x() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn quadratic_blowup_escapes_near_pole() {
        // dy/dx = y^2, y(0) = 1 has the solution 1/(1-x) with a pole at x = 1.
        let cfg = IntegratorConfig::default();
        let traj = integrate(&|_x, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 2.0, &cfg).unwrap();
        match traj.status {
            TerminalStatus::Escaped { x_stop } => {
                assert!((x_stop - 1.0).abs() < 1e-3, "x_stop = {x_stop}");
                assert!(traj.end_state()[0].abs() > cfg.escape_bound);
            }
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn escape_monotone_in_bound() {
        let field = |_x: f64, y: &[f64; 1]| [y[0] * y[0]];
        let mut prev_stop = f64::NEG_INFINITY;
        for bound in [1e3, 1e4, 1e6] {
            let cfg = IntegratorConfig::default().with_escape_bound(bound);
            let traj = integrate(&field, 0.0, [1.0], 2.0, &cfg).unwrap();
            let TerminalStatus::Escaped { x_stop } = traj.status else {
                panic!("expected escape at bound {bound}");
            };
            assert!(x_stop >= prev_stop);
            prev_stop = x_stop;
        }
    }

    #[test]
    fn richardson_self_consistency_on_abel_example() {
        let rhs = abel_rhs(0.5, 0.75, -1.0);
        let cfg = IntegratorConfig::default();
        let tight = IntegratorConfig::default().with_tols(5e-11, 5e-11);
        let y1 = integrate(&rhs, 0.0, [0.1], 2.0 * PI, &cfg).unwrap().end_state()[0];
        let y2 = integrate(&rhs, 0.0, [0.1], 2.0 * PI, &tight)
            .unwrap()
            .end_state()[0];
        assert!(y1.is_finite());
        assert!((y1 - y2).abs() < 1e-8, "y1 = {y1}, y2 = {y2}");
    }

    #[test]
    fn tolerance_halving_self_convergence() {
        let rhs = abel_rhs(0.3, 0.4, 1.5);
        for tol in [1e-6, 1e-8, 1e-10] {
            let c1 = IntegratorConfig::default().with_tols(tol, tol);
            let c2 = IntegratorConfig::default().with_tols(tol / 2.0, tol / 2.0);
            let y1 = integrate(&rhs, 0.0, [0.2], 2.0 * PI, &c1).unwrap().end_state()[0];
            let y2 = integrate(&rhs, 0.0, [0.2], 2.0 * PI, &c2).unwrap().end_state()[0];
            assert!((y1 - y2).abs() < 10.0 * tol, "tol {tol}: {y1} vs {y2}");
        }
    }

    #[test]
    fn forward_backward_roundtrip() {
        let rhs = abel_rhs(0.5, 0.75, -1.0);
        let cfg = IntegratorConfig::default();
        let x1 = 2.0 * PI;
        let fwd = integrate(&rhs, 0.0, [0.3], x1, &cfg).unwrap();
        assert_eq!(fwd.status, TerminalStatus::Completed);
        let yend = fwd.end_state();
        // reversed field: z(s) = y(x1 - s)
        let rev = move |s: f64, z: &[f64; 1]| {
            let [d] = rhs(x1 - s, z);
            [-d]
        };
        let back = integrate(&rev, 0.0, yend, x1, &cfg).unwrap();
        assert!((back.end_state()[0] - 0.3).abs() < 1e-7);
    }

    #[test]
    fn dense_output_reproduces_samples() {
        let rhs = abel_rhs(0.5, 0.75, -1.0);
        let cfg = IntegratorConfig::default();
        let traj = integrate(&rhs, 0.0, [0.3], 2.0 * PI, &cfg).unwrap();
        assert_eq!(traj.status, TerminalStatus::Completed);
        for &(x, y) in &traj.samples {
            let yi = traj.eval(x).unwrap();
            assert!((yi[0] - y[0]).abs() < 1e-9);
        }
        // interior points agree with a tight re-integration
        let tight = IntegratorConfig::default().with_tols(1e-12, 1e-13);
        for k in 1..8 {
            let x = 0.77 * k as f64;
            let direct = integrate(&rhs, 0.0, [0.3], x, &tight).unwrap().end_state()[0];
            let interp = traj.eval(x).unwrap()[0];
            assert!((interp - direct).abs() < 1e-8, "x = {x}: {interp} vs {direct}");
        }
        assert!(traj.eval(-1.0).is_none());
        assert!(traj.eval(7.0).is_none());
    }

    #[test]
    fn event_on_planar_axis_crossing() {
        // System on the cylinder: x' = y, y' = -(sin x - a) - (b + c cos x) y,
        // started above the axis; at a downward crossing of y = 0 the vertical
        // field a - sin(x) must be non-positive.
        let (a, b, c) = (0.5, 0.75, -1.0);
        let field = move |_t: f64, s: &[f64; 2]| {
            let (x, y) = (s[0], s[1]);
            [y, -(x.sin() - a) - (b + c * x.cos()) * y]
        };
        let cfg = IntegratorConfig::default();
        let traj =
            integrate_with_event(&field, 0.0, [0.2, 0.5], &|_t, s: &[f64; 2]| s[1], &cfg).unwrap();
        let TerminalStatus::Event { x_event } = traj.status else {
            panic!("expected axis crossing, got {:?}", traj.status);
        };
        let s = traj.eval(x_event).unwrap();
        assert!(s[1].abs() < 1e-8);
        // crossing from above: dy/dt = a - sin x <= 0 there
        assert!(a - s[0].sin() < 0.0, "x = {}, a - sin x = {}", s[0], a - s[0].sin());
    }

    #[test]
    fn constant_positive_event_never_fires() {
        let cfg = IntegratorConfig {
            max_x_span: 4.0 * PI,
            ..IntegratorConfig::default()
        };
        let traj =
            integrate_with_event(&|_x, _y: &[f64; 1]| [0.0], 0.0, [1.0], &|_, _| 1.0, &cfg)
                .unwrap();
        assert_eq!(traj.status, TerminalStatus::Completed);
        assert!((traj.end_x() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_velocity_event_at_pi() {
        // x'' = -x from (1, 0): velocity -sin t vanishes again at t = pi.
        let field = |_t: f64, s: &[f64; 2]| [s[1], -s[0]];
        let cfg = IntegratorConfig::default();
        let traj =
            integrate_with_event(&field, 0.0, [1.0, 0.0], &|_t, s: &[f64; 2]| s[1], &cfg).unwrap();
        let TerminalStatus::Event { x_event } = traj.status else {
            panic!("expected velocity event");
        };
        assert!((x_event - PI).abs() < 1e-6, "x_event = {x_event}");
    }

    #[test]
    fn stiffness_failure_names_location() {
        // Field that turns non-finite past x = 1 forces rejects until the
        // step size underflows near that point.
        let field = |x: f64, y: &[f64; 1]| if x < 1.0 { [y[0]] } else { [f64::NAN] };
        let cfg = IntegratorConfig::default();
        let err = integrate(&field, 0.0, [1.0], 2.0, &cfg).unwrap_err();
        match err {
            Error::StepSizeUnderflow { x, .. } => assert!((x - 1.0).abs() < 0.05, "x = {x}"),
            other => panic!("expected step-size underflow, got {other}"),
        }
    }

    #[test]
    fn config_validation_rejects_bad_tolerances() {
        let base = IntegratorConfig::default();
        for bad in [
            IntegratorConfig { rel_tol: 1e-2, ..base },
            IntegratorConfig { rel_tol: 0.0, ..base },
            IntegratorConfig { abs_tol: f64::NAN, ..base },
            IntegratorConfig { escape_bound: -1.0, ..base },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}

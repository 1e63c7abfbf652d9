//! Orchestration: per-point census of all cycles, region classification,
//! b-continuation exploiting the rotated-field structure, and grid scans.

use rayon::prelude::*;

use crate::abel::{
    find_second_kind_cycles, poincare_displacement, sign_criterion, variational_integrals,
    zero_stability, CycleSearchConfig, LimitCycle, Params, SideStability, SignRegion, Stability,
    ZeroStability, BASE_SECTION, TWO_PI,
};
use crate::error::{Error, Result};
use crate::integrate::IntegratorConfig;
use crate::planar::{
    find_first_kind_cycles, hopf_level, infinity_stability, locate_curve_b, CurveKind,
    InfinitySide, InfinityStability, ShootingConfig,
};
use crate::roots;

/// Located bifurcation-curve values at one (a, c); None where the curve does
/// not exist there or could not be bracketed.
#[derive(Debug, Clone, Copy, Default)]
pub struct CurveContext {
    pub phi: Option<f64>,
    pub psi1: Option<f64>,
    pub psi2: Option<f64>,
}

impl CurveContext {
    /// Locate whatever curves are defined at (a, c). For a >= 1 the curves
    /// are evaluated at the grid margin below 1 as a proxy.
    pub fn locate(a: f64, c: f64, cfg: &ShootingConfig) -> Self {
        let a_eff = a.min(1.0 - 1e-3);
        let mut ctx = CurveContext {
            psi1: locate_curve_b(CurveKind::Psi1, a_eff, c, cfg),
            ..CurveContext::default()
        };
        if c < 0.0 {
            ctx.phi = locate_curve_b(CurveKind::Phi, a_eff, c, cfg);
            ctx.psi2 = locate_curve_b(CurveKind::Psi2, a_eff, c, cfg);
            // near a = 0 the homoclinic window pinches between the two
            // saddle-connection curves; phi is squeezed between them
            if ctx.phi.is_none() {
                if let (Some(p1), Some(p2)) = (ctx.psi1, ctx.psi2) {
                    if (p1 - p2).abs() < 1e-3 {
                        ctx.phi = Some(0.5 * (p1 + p2));
                    }
                }
            }
        }
        ctx
    }
}

/// Set of cycle counts a prediction rule allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSet(Vec<u8>);

impl CountSet {
    pub fn exactly(n: u8) -> Self {
        CountSet(vec![n])
    }

    pub fn one_of(ns: &[u8]) -> Self {
        CountSet(ns.to_vec())
    }

    pub fn contains(&self, n: usize) -> bool {
        self.0.iter().any(|&k| k as usize == n)
    }

    pub fn display(&self) -> String {
        self.0
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Predicted cycle counts with the id of the rule that produced them.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub source: String,
    pub first: CountSet,
    pub second_pos: CountSet,
    pub second_neg: CountSet,
}

/// Census of all cycles at one parameter point.
#[derive(Debug, Clone)]
pub struct CycleCensus {
    pub params: Params,
    pub first: Vec<LimitCycle>,
    pub second_pos: Vec<LimitCycle>,
    pub second_neg: Vec<LimitCycle>,
    /// (i, j): number of first-kind and second-kind cycles.
    pub configuration: (usize, usize),
    pub region: String,
    pub predicted: Option<Prediction>,
    pub agreement: Option<bool>,
    pub flags: Vec<String>,
    pub infinity: InfinityStability,
}

/// Knobs for the census pipeline.
#[derive(Debug, Clone, Copy)]
pub struct CensusConfig {
    pub search: CycleSearchConfig,
    pub shoot: ShootingConfig,
    /// Band around computed curves where agreement is not enforced.
    pub near_band: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        let shoot = ShootingConfig::default();
        Self {
            search: CycleSearchConfig::default(),
            shoot,
            near_band: 10.0 * shoot.gap_tol,
        }
    }
}

impl CensusConfig {
    pub fn scan() -> Self {
        Self {
            search: CycleSearchConfig::scan(),
            ..Self::default()
        }
    }

    pub fn with_tols(mut self, rel: f64, abs: f64) -> Self {
        cfg_tols(&mut self.search.integrator, rel, abs);
        cfg_tols(&mut self.shoot.integrator, rel, abs);
        self
    }
}

fn cfg_tols(c: &mut IntegratorConfig, rel: f64, abs: f64) {
    c.rel_tol = rel;
    c.abs_tol = abs;
}

/// Region labels of the parameter-space classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionLabel {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    HL,
    SC11,
    SC12,
    SC2,
    P1,
    SN1,
    SN2,
    BT,
    HLC,
    HE,
    H,
    Boundary(String),
}

impl RegionLabel {
    pub fn name(&self) -> String {
        match self {
            RegionLabel::S1 => "S1".into(),
            RegionLabel::S2 => "S2".into(),
            RegionLabel::S3 => "S3".into(),
            RegionLabel::S4 => "S4".into(),
            RegionLabel::S5 => "S5".into(),
            RegionLabel::S6 => "S6".into(),
            RegionLabel::S7 => "S7".into(),
            RegionLabel::HL => "HL".into(),
            RegionLabel::SC11 => "SC11".into(),
            RegionLabel::SC12 => "SC12".into(),
            RegionLabel::SC2 => "SC2".into(),
            RegionLabel::P1 => "P1".into(),
            RegionLabel::SN1 => "SN1".into(),
            RegionLabel::SN2 => "SN2".into(),
            RegionLabel::BT => "BT".into(),
            RegionLabel::HLC => "HLC".into(),
            RegionLabel::HE => "HE".into(),
            RegionLabel::H => "H".into(),
            RegionLabel::Boundary(of) => format!("boundary-of-{of}"),
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(
            self,
            RegionLabel::HL
                | RegionLabel::SC11
                | RegionLabel::SC12
                | RegionLabel::SC2
                | RegionLabel::P1
                | RegionLabel::BT
                | RegionLabel::HLC
                | RegionLabel::HE
                | RegionLabel::H
                | RegionLabel::Boundary(_)
        )
    }
}

/// Classify the parameter point against the region table using the located
/// curve values; points within gap_tol of a curve get the boundary label.
pub fn classify_region(p: &Params, curves: &CurveContext, cfg: &CensusConfig) -> Result<RegionLabel> {
    let (a, b, c) = (p.a(), p.b(), p.c());
    let band = cfg.shoot.gap_tol;

    if a > 1.0 {
        return Ok(RegionLabel::S7);
    }
    if a == 1.0 {
        if b == 0.0 && c < 0.0 {
            return Ok(RegionLabel::BT);
        }
        let psi1 = curves
            .psi1
            .ok_or_else(|| Error::NeedsCurves("psi1 near a = 1".into()))?;
        return Ok(if (b - psi1).abs() <= band {
            if c < 0.0 {
                RegionLabel::P1
            } else {
                RegionLabel::Boundary("P1".into())
            }
        } else if b > psi1 {
            RegionLabel::SN1
        } else {
            RegionLabel::SN2
        });
    }

    // 0 <= a < 1 from here on
    if b == 0.0 && c == 0.0 && a > 0.0 {
        return Ok(RegionLabel::HLC);
    }
    if a == 0.0 && c < 0.0 {
        if let Some(phi) = curves.phi {
            if (b - phi).abs() <= band {
                return Ok(RegionLabel::HE);
            }
        }
    }

    let inner = classify_open_region(a, b, c, curves, band)?;
    if a == 0.0 {
        // the table rows are stated for 0 < a; a = 0 points sit on the edge
        return Ok(RegionLabel::Boundary(inner.name()));
    }
    Ok(inner)
}

fn classify_open_region(
    a: f64,
    b: f64,
    c: f64,
    curves: &CurveContext,
    band: f64,
) -> Result<RegionLabel> {
    if c < 0.0 {
        let hopf = hopf_level(a, c);
        let phi = curves
            .phi
            .ok_or_else(|| Error::NeedsCurves(format!("phi at a = {a}, c = {c}")))?;
        let psi1 = curves
            .psi1
            .ok_or_else(|| Error::NeedsCurves(format!("psi1 at a = {a}, c = {c}")))?;

        if let Some(psi2) = curves.psi2 {
            if (b - psi2).abs() <= band {
                return Ok(RegionLabel::SC2);
            }
        }
        if (b - phi).abs() <= band {
            return Ok(RegionLabel::HL);
        }
        if (b - psi1).abs() <= band {
            return Ok(if psi1 < hopf - band {
                RegionLabel::SC12
            } else {
                RegionLabel::SC11
            });
        }
        if (b - hopf).abs() <= band {
            return Ok(RegionLabel::H);
        }

        if let Some(psi2) = curves.psi2 {
            if b < psi2 {
                return Ok(RegionLabel::S1);
            }
        }
        if b < phi {
            return Ok(RegionLabel::S2);
        }
        if b < psi1.min(hopf) {
            return Ok(RegionLabel::S3);
        }
        if b < hopf {
            return Ok(RegionLabel::S4); // psi1 < b < hopf, only when psi1 < hopf
        }
        if psi1 > hopf && b < psi1 {
            return Ok(RegionLabel::S6);
        }
        Ok(RegionLabel::S5)
    } else {
        // c >= 0: only the upper connection separates regions
        match curves.psi1 {
            Some(psi1) => Ok(if (b - psi1).abs() <= band {
                RegionLabel::SC11
            } else if b < psi1 {
                RegionLabel::S6
            } else {
                RegionLabel::S5
            }),
            None => Ok(RegionLabel::S5),
        }
    }
}

const RULE_DEFINITE_SIGN: &str = "definite-sign-parity";
const RULE_FOLD_WINDOW: &str = "rotated-fold-window";
const RULE_UPPER_SPLIT: &str = "upper-connection-split";
const RULE_SINGLE_POS: &str = "positive-side-single";
const RULE_NEG_EMPTY: &str = "negative-side-empty";
const RULE_NEG_SINGLE: &str = "negative-side-single";
const RULE_FIRST_WINDOW: &str = "first-kind-window";
const RULE_FIRST_NONE: &str = "first-kind-none";

fn predict(
    p: &Params,
    curves: &CurveContext,
    inf: &InfinityStability,
    cfg: &CensusConfig,
) -> (Option<Prediction>, Vec<String>) {
    let (a, b, c) = (p.a(), p.b(), p.c());
    let mut flags = Vec::new();
    let mut sources: Vec<&str> = Vec::new();
    let band = cfg.near_band;

    // first-kind count: one cycle exactly inside the window phi < b < hopf
    // with c < 0 and a < 1, none otherwise
    let first = if a < 1.0 && c < 0.0 {
        let hopf = hopf_level(a, c);
        match curves.phi {
            Some(phi) => {
                if (b - phi).abs() <= band || (b - hopf).abs() <= band {
                    flags.push("near-bifurcation".into());
                    None
                } else if b > phi && b < hopf {
                    sources.push(RULE_FIRST_WINDOW);
                    Some(CountSet::exactly(1))
                } else {
                    sources.push(RULE_FIRST_NONE);
                    Some(CountSet::exactly(0))
                }
            }
            None => {
                flags.push("curves-missing".into());
                None
            }
        }
    } else {
        sources.push(RULE_FIRST_NONE);
        Some(CountSet::exactly(0))
    };

    let crit = sign_criterion(p);
    let (second_pos, second_neg) = if crit.holds {
        sources.push(RULE_DEFINITE_SIGN);
        let zero = zero_stability(p);
        let upper = match zero {
            ZeroStability::Classified { upper, .. } => Some(upper),
            ZeroStability::Degenerate => None,
        };
        let pos = match (upper, inf.plus) {
            (Some(SideStability::Unstable), InfinitySide::Unstable)
            | (Some(SideStability::Stable), InfinitySide::Stable) => Some(CountSet::exactly(1)),
            (Some(_), InfinitySide::Undetermined) => {
                flags.push("near-bifurcation".into());
                None
            }
            (Some(_), _) => Some(CountSet::exactly(0)),
            (None, _) => Some(CountSet::exactly(0)), // degenerate zero field
        };
        (pos, Some(CountSet::exactly(0)))
    } else if c > 0.0 {
        // indefinite sign, c > 0: the fold scenario below the upper
        // connection, a single cycle between the connection and the Hopf
        // level, and an undetermined thin window above the connection
        let level = c * (1.0 - a * a).sqrt();
        let pos = match curves.psi1 {
            None => {
                sources.push(RULE_FOLD_WINDOW);
                Some(CountSet::one_of(&[0, 1, 2]))
            }
            Some(psi1) => {
                if (b - psi1).abs() <= band {
                    flags.push("near-bifurcation".into());
                    None
                } else if psi1 >= level || b < psi1 {
                    sources.push(RULE_SINGLE_POS);
                    Some(CountSet::exactly(1))
                } else {
                    sources.push(RULE_UPPER_SPLIT);
                    Some(CountSet::one_of(&[0, 1, 2]))
                }
            }
        };
        sources.push(RULE_NEG_EMPTY);
        (pos, Some(CountSet::exactly(0)))
    } else {
        // indefinite sign, c < 0
        let hopf = hopf_level(a, c);
        let pos = match curves.psi1 {
            None => {
                flags.push("curves-missing".into());
                None
            }
            Some(psi1) => {
                if psi1 < hopf && (b - psi1).abs() <= band {
                    flags.push("near-bifurcation".into());
                    None
                } else if psi1 >= hopf || b < psi1 {
                    sources.push(RULE_SINGLE_POS);
                    Some(CountSet::exactly(1))
                } else {
                    sources.push(RULE_SINGLE_POS);
                    Some(CountSet::exactly(0))
                }
            }
        };
        let neg = match curves.psi2 {
            Some(psi2) => {
                if (b - psi2).abs() <= band {
                    flags.push("near-bifurcation".into());
                    None
                } else if b < psi2 {
                    sources.push(RULE_NEG_SINGLE);
                    Some(CountSet::exactly(1))
                } else {
                    sources.push(RULE_NEG_EMPTY);
                    Some(CountSet::exactly(0))
                }
            }
            None => {
                // no lower connection above the floor: the negative side is empty
                sources.push(RULE_NEG_EMPTY);
                Some(CountSet::exactly(0))
            }
        };
        (pos, neg)
    };

    match (first, second_pos, second_neg) {
        (Some(first), Some(second_pos), Some(second_neg)) => {
            sources.dedup();
            (
                Some(Prediction {
                    source: sources.join("+"),
                    first,
                    second_pos,
                    second_neg,
                }),
                flags,
            )
        }
        _ => (None, flags),
    }
}

/// Full census at one parameter point with a precomputed curve context.
pub fn census_with_curves(
    p: &Params,
    cfg: &CensusConfig,
    curves: &CurveContext,
) -> Result<CycleCensus> {
    let mut flags: Vec<String> = Vec::new();

    let second_pos = find_second_kind_cycles(p, SignRegion::Positive, &cfg.search)?;
    let second_neg = find_second_kind_cycles(p, SignRegion::Negative, &cfg.search)?;
    flags.extend(second_pos.warnings.iter().map(|w| format!("refine:{w}")));
    flags.extend(second_neg.warnings.iter().map(|w| format!("refine:{w}")));

    let first = if p.a() < 1.0 {
        let found = find_first_kind_cycles(p, &cfg.shoot)?;
        flags.extend(found.warnings.iter().map(|w| format!("refine:{w}")));
        found.cycles
    } else {
        Vec::new()
    };

    let inf = infinity_stability(p, &cfg.shoot)?;
    let (predicted, mut pflags) = predict(p, curves, &inf, cfg);
    flags.append(&mut pflags);

    let region = classify_region(p, curves, cfg)
        .map(|r| r.name())
        .unwrap_or_else(|_| "unclassified".into());

    let j = second_pos.cycles.len() + second_neg.cycles.len();
    let configuration = (first.len(), j);
    let agreement = predicted.as_ref().map(|pr| {
        pr.first.contains(first.len())
            && pr.second_pos.contains(second_pos.cycles.len())
            && pr.second_neg.contains(second_neg.cycles.len())
    });

    Ok(CycleCensus {
        params: *p,
        first,
        second_pos: second_pos.cycles,
        second_neg: second_neg.cycles,
        configuration,
        region,
        predicted,
        agreement,
        flags,
    infinity: inf,
    })
}

/// Full census at one parameter point, locating curves on demand.
pub fn census(p: &Params, cfg: &CensusConfig) -> Result<CycleCensus> {
    let curves = CurveContext::locate(p.a(), p.c(), &cfg.shoot);
    census_with_curves(p, cfg, &curves)
}

/// Continuation direction for the rotated parameter b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increase,
    Decrease,
}

#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub b: f64,
    pub anchor_y: f64,
    pub g_prime: f64,
    /// Cycle heights at the 16 phase samples.
    pub phase_values: [f64; 16],
}

#[derive(Debug, Clone)]
pub struct FoldPoint {
    pub b_bar: f64,
    pub anchor_y: f64,
    pub g_prime: f64,
    pub g_second: f64,
    pub stability: Stability,
}

/// Record of a continuation run in b.
#[derive(Debug, Clone)]
pub struct ContinuationRecord {
    /// One track per cycle present at the start, ordered by |y0|.
    pub branches: Vec<Vec<BranchPoint>>,
    pub fold: Option<FoldPoint>,
    /// Steps at which a stable branch failed to expand or an unstable branch
    /// failed to contract pointwise.
    pub monotonicity_violations: usize,
    /// Pairs of branch points at distinct b whose graphs cross.
    pub intersection_violations: usize,
}

fn phase_values(p: &Params, y0: f64, cfg: &CycleSearchConfig) -> Result<[f64; 16]> {
    let orbit = crate::abel::period_orbit(p, BASE_SECTION, y0, &cfg.integrator)?;
    let mut out = [0.0; 16];
    for (k, slot) in out.iter_mut().enumerate() {
        let x = BASE_SECTION + TWO_PI * k as f64 / 16.0;
        *slot = orbit.eval(x).map(|s| s[0]).unwrap_or(f64::NAN);
    }
    Ok(out)
}

/// Polish a displacement root near `y_guess` at the given parameters by
/// scanning a widening window and refining the sign change nearest the
/// guess. Endpoint checks alone are not enough: close to a fold the map only
/// dips through zero on a thin interior interval.
fn polish_root(p: &Params, y_guess: f64, cfg: &CycleSearchConfig) -> Option<f64> {
    let g = |y: f64| -> Option<f64> {
        poincare_displacement(p, BASE_SECTION, y, &cfg.integrator)
            .ok()?
            .value()
    };
    let mut h = 1e-3 * y_guess.abs().max(1e-3);
    for _ in 0..12 {
        let lo = (y_guess - h).max(0.25 * y_guess.abs()) * y_guess.signum();
        let hi = y_guess + h * y_guess.signum();
        let n = 24;
        let mut best: Option<(f64, f64)> = None; // (distance to guess, root)
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..=n {
            let y = lo + (hi - lo) * k as f64 / n as f64;
            let Some(gy) = g(y) else {
                prev = None;
                continue;
            };
            if let Some((py, pg)) = prev {
                if pg != 0.0 && pg.signum() != gy.signum() {
                    let root = roots::bisect_then_secant(
                        py,
                        y,
                        |yy| g(yy).unwrap_or(f64::MAX),
                        cfg.root_tol,
                    );
                    let d = (root - y_guess).abs();
                    if best.map(|(bd, _)| d < bd).unwrap_or(true) {
                        best = Some((d, root));
                    }
                }
            }
            prev = Some((y, gy));
        }
        if let Some((_, root)) = best {
            return Some(root);
        }
        h *= 2.5;
        if h > 4.0 * y_guess.abs().max(1.0) {
            break;
        }
    }
    None
}

/// Count displacement roots inside a window by a fine scan.
fn roots_in_window(p: &Params, lo: f64, hi: f64, cfg: &CycleSearchConfig) -> Result<Vec<f64>> {
    let n = 160;
    let mut prev: Option<(f64, f64)> = None;
    let mut out = Vec::new();
    for k in 0..=n {
        let y = lo + (hi - lo) * k as f64 / n as f64;
        let g = poincare_displacement(p, BASE_SECTION, y, &cfg.integrator)?;
        let Some(gv) = g.value() else {
            prev = None;
            continue;
        };
        if let Some((py, pg)) = prev {
            if pg != 0.0 && pg.signum() != gv.signum() {
                out.push(roots::bisect_then_secant(
                    py,
                    y,
                    |yy| {
                        poincare_displacement(p, BASE_SECTION, yy, &cfg.integrator)
                            .ok()
                            .and_then(|d| d.value())
                            .unwrap_or(f64::MAX)
                    },
                    cfg.root_tol,
                ));
            }
        }
        prev = Some((y, gv));
    }
    out.dedup_by(|u, v| (*u - *v).abs() < cfg.merge_tol);
    Ok(out)
}

/// Track the positive second-kind cycles as b varies, verifying the
/// rotated-field monotonicity, and bracket the fold where the stable and
/// unstable branches merge.
pub fn continuation_in_b(
    p0: &Params,
    direction: Direction,
    db: f64,
    cfg: &CensusConfig,
) -> Result<ContinuationRecord> {
    let (a, c) = (p0.a(), p0.c());
    let at_b = |b: f64| -> Result<Params> {
        Params::new(a, b, c).map_err(|e| Error::InvalidParams(format!("continuation: {e}")))
    };
    let start = find_second_kind_cycles(p0, SignRegion::Positive, &cfg.search)?;
    let mut record = ContinuationRecord {
        branches: vec![Vec::new(); start.cycles.len()],
        fold: None,
        monotonicity_violations: 0,
        intersection_violations: 0,
    };
    if start.cycles.is_empty() {
        return Ok(record);
    }

    let mut current: Vec<(f64, f64)> = start
        .cycles
        .iter()
        .map(|cyc| (cyc.anchor.1, cyc.g_prime))
        .collect();
    let mut b = p0.b();
    for (idx, &(y0, gp)) in current.iter().enumerate() {
        record.branches[idx].push(BranchPoint {
            b,
            anchor_y: y0,
            g_prime: gp,
            phase_values: phase_values(p0, y0, &cfg.search)?,
        });
    }

    let step = match direction {
        Direction::Increase => db.abs(),
        Direction::Decrease => -db.abs(),
    };

    loop {
        let b_next = b + step;
        if b_next <= cfg.search.y_min * 0.0 + 1e-6 {
            return Ok(record); // reached the b > 0 floor
        }
        let p_next = at_b(b_next)?;

        let mut next: Vec<Option<(f64, f64)>> = Vec::new();
        for &(y_prev, _) in &current {
            let polished = polish_root(&p_next, y_prev, &cfg.search);
            match polished {
                Some(y) => {
                    let (gp, _) = variational_integrals(&p_next, BASE_SECTION, y, &cfg.search.integrator)?;
                    next.push(Some((y, gp)));
                }
                None => next.push(None),
            }
        }

        let lost = next.iter().any(|n| n.is_none());
        let merged = match (&next[..], current.len()) {
            ([Some((y1, _)), Some((y2, _))], 2) => (y1 - y2).abs() < 10.0 * cfg.search.merge_tol,
            _ => false,
        };

        if lost || merged {
            if direction == Direction::Increase && current.len() == 2 {
                let fold = bracket_fold(a, c, b, b_next, &current, cfg)?;
                record.fold = Some(fold);
                return Ok(record);
            }
            return Err(Error::ContinuationGap(b));
        }

        // accepted step: record, then verify the rotated-field ordering
        for (idx, entry) in next.iter().enumerate() {
            let (y, gp) = entry.unwrap();
            let pv = phase_values(&p_next, y, &cfg.search)?;
            let prev = record.branches[idx].last().unwrap().clone();
            let increased = pv.iter().zip(prev.phase_values.iter()).all(|(n, o)| n > o);
            let decreased = pv.iter().zip(prev.phase_values.iter()).all(|(n, o)| n < o);
            let stable = prev.g_prime < 0.0;
            let expanding = (direction == Direction::Increase) == stable;
            if (expanding && !increased) || (!expanding && !decreased) {
                record.monotonicity_violations += 1;
            }
            record.branches[idx].push(BranchPoint {
                b: b_next,
                anchor_y: y,
                g_prime: gp,
                phase_values: pv,
            });
        }
        record.intersection_violations = count_intersections(&record);

        current = next.into_iter().map(|n| n.unwrap()).collect();
        b = b_next;

        // stop when the Hopf level is reached in the c > 0 fold scenario
        if c > 0.0 && b >= c * (1.0 - a * a).sqrt() {
            return Ok(record);
        }
        if record.branches[0].len() > 4000 {
            return Err(Error::ContinuationGap(b));
        }
    }
}

fn count_intersections(record: &ContinuationRecord) -> usize {
    let mut violations = 0;
    let all: Vec<&BranchPoint> = record.branches.iter().flatten().collect();
    for (i, u) in all.iter().enumerate() {
        for v in all.iter().skip(i + 1) {
            if u.b == v.b {
                continue;
            }
            let above = u
                .phase_values
                .iter()
                .zip(v.phase_values.iter())
                .filter(|(x, y)| x > y)
                .count();
            if above != 0 && above != 16 {
                violations += 1;
            }
        }
    }
    violations
}

fn bracket_fold(
    a: f64,
    c: f64,
    b_ok: f64,
    b_fail: f64,
    last_good: &[(f64, f64)],
    cfg: &CensusConfig,
) -> Result<FoldPoint> {
    let (y_lo, y_hi) = {
        let ys: Vec<f64> = last_good.iter().map(|(y, _)| *y).collect();
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0.5 * lo, 2.0 * hi)
    };
    let has_two = |b: f64| -> bool {
        Params::new(a, b, c)
            .ok()
            .and_then(|p| roots_in_window(&p, y_lo, y_hi, &cfg.search).ok())
            .map(|r| r.len() >= 2)
            .unwrap_or(false)
    };
    let lo_ok = has_two(b_ok.min(b_fail));
    let hi_ok = has_two(b_ok.max(b_fail));
    if lo_ok == hi_ok {
        return Err(Error::ContinuationGap(b_ok));
    }
    let b_bar = roots::bisect_predicate(b_ok.min(b_fail), b_ok.max(b_fail), has_two, 1e-6);

    // semi-stable cycle at the fold: minimum of |G| between the last branches
    let p_bar = Params::new(a, b_bar, c)?;
    let g_abs = |y: f64| {
        poincare_displacement(&p_bar, BASE_SECTION, y, &cfg.search.integrator)
            .ok()
            .and_then(|d| d.value())
            .map(|v| v.abs())
            .unwrap_or(f64::INFINITY)
    };
    let (y_fold, _) = roots::refine_minimum(y_lo, y_hi, g_abs, 1e-9);
    let (gp, gs) = variational_integrals(&p_bar, BASE_SECTION, y_fold, &cfg.search.integrator)?;
    Ok(FoldPoint {
        b_bar,
        anchor_y: y_fold,
        g_prime: gp,
        g_second: gs,
        stability: if gs > 0.0 {
            Stability::SemistableLowerStable
        } else {
            Stability::SemistableUpperStable
        },
    })
}

/// Inclusive linear grid specification lo:hi:n.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![self.lo];
        }
        (0..self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64)
            .collect()
    }
}

/// One row of the scan dataset.
#[derive(Debug, Clone)]
pub struct ScanRecord {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub label: String,
    pub first: usize,
    pub second: usize,
    pub second_pos: usize,
    pub second_neg: usize,
    pub agreement: Option<bool>,
    pub flags: String,
}

/// Scan a fixed-c cross-section of parameter space: per-point census plus
/// region label. Points are independent and run in parallel by a-column so
/// each column shares one curve location; per-point failures are recorded
/// in-row and never abort the scan.
pub fn scan(c: f64, a_grid: GridSpec, b_grid: GridSpec, cfg: &CensusConfig) -> Vec<ScanRecord> {
    let a_values = a_grid.values();
    let b_values = b_grid.values();

    let columns: Vec<Vec<ScanRecord>> = a_values
        .par_iter()
        .map(|&a| {
            let curves = CurveContext::locate(a, c, &cfg.shoot);
            b_values
                .iter()
                .map(|&b| scan_point(a, b, c, &curves, cfg))
                .collect()
        })
        .collect();
    columns.into_iter().flatten().collect()
}

fn scan_point(a: f64, b: f64, c: f64, curves: &CurveContext, cfg: &CensusConfig) -> ScanRecord {
    let p = match Params::new(a, b, c) {
        Ok(p) => p,
        Err(e) => {
            return ScanRecord {
                a,
                b,
                c,
                label: "invalid".into(),
                first: 0,
                second: 0,
                second_pos: 0,
                second_neg: 0,
                agreement: None,
                flags: sanitize(&e.to_string()),
            }
        }
    };
    match census_with_curves(&p, cfg, curves) {
        Ok(cen) => ScanRecord {
            a,
            b,
            c,
            label: cen.region.clone(),
            first: cen.configuration.0,
            second: cen.configuration.1,
            second_pos: cen.second_pos.len(),
            second_neg: cen.second_neg.len(),
            agreement: cen.agreement,
            flags: sanitize(&cen.flags.join(";")),
        },
        Err(e) => ScanRecord {
            a,
            b,
            c,
            label: "error".into(),
            first: 0,
            second: 0,
            second_pos: 0,
            second_neg: 0,
            agreement: None,
            flags: sanitize(&e.to_string()),
        },
    }
}

fn sanitize(s: &str) -> String {
    s.replace([',', '\n'], " ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64, c: f64) -> Params {
        Params::new(a, b, c).unwrap()
    }

    #[test]
    fn reference_point_census_is_one_one() {
        let p = params(0.5, 0.75, -1.0);
        let cen = census(&p, &CensusConfig::default()).unwrap();
        assert_eq!(cen.configuration, (1, 1));
        assert_eq!(cen.agreement, Some(true), "flags: {:?}", cen.flags);
        assert_eq!(cen.first[0].stability, Stability::Stable);
        assert_eq!(cen.second_pos[0].stability, Stability::Stable);
        assert!(cen.second_neg.is_empty());
    }

    #[test]
    fn fold_regime_census_is_zero_two() {
        // below the fold in b both second-kind cycles sit in y > 0
        let p = params(0.05, 5e-4, 1.0);
        let cen = census(&p, &CensusConfig::default()).unwrap();
        assert_eq!(cen.configuration, (0, 2));
        assert_eq!(cen.second_pos.len(), 2);
        assert!(cen.second_neg.is_empty());
        assert_eq!(cen.agreement, Some(true));
        let stabilities: Vec<_> = cen.second_pos.iter().map(|c| c.stability).collect();
        assert_eq!(stabilities, vec![Stability::Stable, Stability::Unstable]);
    }

    #[test]
    fn saddle_node_exterior_census() {
        let p = params(2.0, 1.0, 0.0);
        let cen = census(&p, &CensusConfig::default()).unwrap();
        assert_eq!(cen.configuration, (0, 1));
        assert_eq!(cen.second_pos.len(), 1);
        assert!(cen.second_neg.is_empty());
        assert_eq!(cen.agreement, Some(true));
        assert_eq!(cen.region, "S7");
    }

    #[test]
    fn region_classification_closed_forms() {
        let cfg = CensusConfig::default();
        let no_curves = CurveContext::default();
        assert_eq!(
            classify_region(&params(2.0, 0.7, 1.0), &no_curves, &cfg).unwrap(),
            RegionLabel::S7
        );
        let bt = Params::with_zero_b(1.0, -1.0).unwrap();
        assert_eq!(classify_region(&bt, &no_curves, &cfg).unwrap(), RegionLabel::BT);
        let hlc = Params::with_zero_b(0.5, 0.0).unwrap();
        assert_eq!(classify_region(&hlc, &no_curves, &cfg).unwrap(), RegionLabel::HLC);
    }

    #[test]
    fn grid_spec_endpoints_inclusive() {
        let g = GridSpec { lo: 0.0, hi: 1.0, n: 5 };
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 1.0);
        let single = GridSpec { lo: 0.3, hi: 0.9, n: 1 };
        assert_eq!(single.values(), vec![0.3]);
    }

    #[test]
    fn singleton_scan_matches_census() {
        let cfg = CensusConfig::default();
        let rows = scan(
            -1.0,
            GridSpec { lo: 0.5, hi: 0.5, n: 1 },
            GridSpec { lo: 0.75, hi: 0.75, n: 1 },
            &cfg,
        );
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        let cen = census(&params(0.5, 0.75, -1.0), &cfg).unwrap();
        assert_eq!((row.first, row.second), cen.configuration);
        assert_eq!(row.label, cen.region);
    }
}

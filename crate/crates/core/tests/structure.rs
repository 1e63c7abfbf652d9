//! Structural invariants tying the two charts together: the parity law
//! between end stabilities and cycle counts, the ordering and monotonicity
//! of the connection curves, and the emptiness statements.

use josephson::abel::{
    find_second_kind_cycles, sign_criterion, zero_stability, CycleSearchConfig, Params,
    SideStability, SignRegion, ZeroStability,
};
use josephson::census::{census, scan, CensusConfig, GridSpec};
use josephson::planar::{
    bifurcation_curve, connection_gap, hopf_level, infinity_stability, locate_curve_b,
    ConnectionKind, CurveKind, InfinitySide, ShootingConfig,
};

/// Odd/even cycle count from matching end stabilities, on both sides.
#[test]
fn parity_links_end_stabilities_to_cycle_counts() {
    let search = CycleSearchConfig::default();
    let shoot = ShootingConfig::default();
    let points = [
        (0.5, 0.75, -1.0),
        (0.1, 0.1, -1.0),
        (0.3, 0.3, -1.0),
        (0.8, 0.9, -1.0),
        (2.0, 1.0, 0.0),
        (1.5, 0.4, 2.0),
        (0.5, 2.0, 1.0),
        (0.3, 0.55, 1.2),
    ];
    for (a, b, c) in points {
        let p = Params::new(a, b, c).unwrap();
        let inf = infinity_stability(&p, &shoot).unwrap();
        let ZeroStability::Classified { upper, lower } = zero_stability(&p) else {
            panic!("b > 0 is never degenerate");
        };
        let pos = find_second_kind_cycles(&p, SignRegion::Positive, &search).unwrap();
        let neg = find_second_kind_cycles(&p, SignRegion::Negative, &search).unwrap();

        let with_mult =
            |cycles: &[josephson::abel::LimitCycle]| -> usize {
                cycles.iter().map(|c| c.multiplicity_estimate as usize).sum()
            };
        if inf.plus != InfinitySide::Undetermined {
            let same = (upper == SideStability::Unstable) == (inf.plus == InfinitySide::Unstable);
            assert_eq!(
                with_mult(&pos.cycles) % 2 == 1,
                same,
                "positive-side parity at ({a},{b},{c}): zero-upper {upper:?}, +inf {:?}, count {}",
                inf.plus,
                pos.cycles.len()
            );
        }
        if inf.minus != InfinitySide::Undetermined {
            let same = (lower == SideStability::Unstable) == (inf.minus == InfinitySide::Unstable);
            assert_eq!(
                with_mult(&neg.cycles) % 2 == 1,
                same,
                "negative-side parity at ({a},{b},{c}): zero-lower {lower:?}, -inf {:?}, count {}",
                inf.minus,
                neg.cycles.len()
            );
        }
    }
}

/// The connection curves keep their stacking and monotonicity along a.
#[test]
fn curve_ordering_and_monotonicity() {
    let shoot = ShootingConfig::default();
    let c = -1.0;
    let grid = [0.08, 0.2, 0.32];

    let psi1 = bifurcation_curve(CurveKind::Psi1, c, &grid, &shoot).unwrap();
    let psi2 = bifurcation_curve(CurveKind::Psi2, c, &grid, &shoot).unwrap();
    let phi = bifurcation_curve(CurveKind::Phi, c, &grid, &shoot).unwrap();

    let vals = |curve: &josephson::planar::BifurcationCurve| -> Vec<f64> {
        curve.samples.iter().map(|s| s.b.expect("curve point")).collect()
    };
    let (v1, v2, vp) = (vals(&psi1), vals(&psi2), vals(&phi));

    for k in 0..grid.len() {
        let hopf = hopf_level(grid[k], c);
        // stacking psi2 < phi < psi1 and everything under the Hopf level
        assert!(v2[k] < vp[k], "psi2 {} !< phi {} at a={}", v2[k], vp[k], grid[k]);
        assert!(vp[k] < v1[k], "phi {} !< psi1 {} at a={}", vp[k], v1[k], grid[k]);
        assert!(vp[k] < hopf, "phi {} above hopf {} at a={}", vp[k], hopf, grid[k]);
        assert!(vp[k] > 0.0);
    }
    for k in 1..grid.len() {
        assert!(v1[k] >= v1[k - 1], "psi1 not nondecreasing: {v1:?}");
        assert!(v2[k] <= v2[k - 1], "psi2 not nonincreasing: {v2:?}");
    }
}

/// The reference point sits inside the first-kind existence window
/// phi(a, c) < b < -c sqrt(1 - a^2).
#[test]
fn reference_point_sits_in_first_kind_window() {
    let shoot = ShootingConfig::default();
    let phi = locate_curve_b(CurveKind::Phi, 0.5, -1.0, &shoot).unwrap();
    let hopf = hopf_level(0.5, -1.0);
    assert!(phi < 0.75 && 0.75 < hopf, "phi = {phi}, hopf = {hopf}");
    assert!((hopf - 0.75f64.sqrt()).abs() < 1e-12);
}

/// The homoclinic gap changes sign across the located curve value.
#[test]
fn homoclinic_gap_brackets_the_curve() {
    let shoot = ShootingConfig::default();
    let (a, c) = (0.3, -1.0);
    let phi = locate_curve_b(CurveKind::Phi, a, c, &shoot).unwrap();
    let gap = |b: f64| {
        connection_gap(&Params::new(a, b, c).unwrap(), ConnectionKind::Homoclinic, &shoot)
            .unwrap()
            .gap
            .finite()
            .unwrap()
    };
    let below = gap(phi - 0.05);
    let above = gap(phi + 0.05);
    assert!(below.signum() != above.signum(), "below {below}, above {above}");
    assert!(gap(phi).abs() < 1e-4);
}

/// No negative-side cycle anywhere in the indefinite wedge with c > 0.
#[test]
fn negative_side_empty_for_positive_c() {
    let search = CycleSearchConfig::scan();
    for (a, frac, c) in [(0.1, 0.3, 1.0), (0.4, 0.7, 2.0), (0.7, 0.5, 1.5), (0.25, 0.9, 0.7)] {
        let b = frac * c * (1.0f64 - a * a).sqrt();
        let p = Params::new(a, b, c).unwrap();
        assert!(!sign_criterion(&p).holds, "sample must sit in the indefinite wedge");
        let neg = find_second_kind_cycles(&p, SignRegion::Negative, &search).unwrap();
        assert!(neg.cycles.is_empty(), "negative cycle at ({a},{b},{c})");
    }
}

/// A c = 0 slice has no contractible cycles anywhere.
#[test]
fn no_first_kind_cycles_on_zero_coupling_slice() {
    let cfg = CensusConfig::scan();
    let rows = scan(
        0.0,
        GridSpec { lo: 0.1, hi: 0.9, n: 3 },
        GridSpec { lo: 0.2, hi: 1.5, n: 3 },
        &cfg,
    );
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.first, 0, "first-kind cycle at ({}, {}, 0)", r.a, r.b);
    }
}

/// Scan rows with determinate labels agree with their predictions.
#[test]
fn scan_agreement_outside_bifurcation_bands() {
    let cfg = CensusConfig::scan();
    let rows = scan(
        -1.0,
        GridSpec { lo: 0.15, hi: 0.85, n: 4 },
        GridSpec { lo: 0.1, hi: 1.2, n: 4 },
        &cfg,
    );
    for r in &rows {
        if r.flags.contains("near-bifurcation") || r.flags.contains("curves-missing") {
            continue;
        }
        assert_eq!(
            r.agreement,
            Some(true),
            "disagreement at ({}, {}, -1): label {} counts ({},{})",
            r.a,
            r.b,
            r.label,
            r.first,
            r.second
        );
    }
}

/// The reference point's probe data is consistent with the parity law.
#[test]
fn reference_point_infinity_consistency() {
    let p = Params::new(0.5, 0.75, -1.0).unwrap();
    let cen = census(&p, &CensusConfig::default()).unwrap();
    // one positive second-kind cycle and zero-upper unstable force +inf
    // unstable by parity
    assert_eq!(cen.second_pos.len(), 1);
    assert_eq!(cen.infinity.plus, InfinitySide::Unstable);
    assert_eq!(cen.infinity.minus, InfinitySide::Unstable);
}

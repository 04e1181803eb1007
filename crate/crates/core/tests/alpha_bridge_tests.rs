use ppide_core::alpha_bridge::{cubic_lagrange, default_anchors, price_real_alpha, AlphaQuery, InterpMode};
use ppide_core::grid::{log_price_grid, symmetric_window};
use ppide_core::pricing::{compare_fd_fft, FdProblem, FftProblem, JumpEquation, SchemeKind};
use ppide_core::{Error, GtspParams, JumpSide, MarketConfig, OptionKind};

const T: f64 = 30.0 / 365.0;

fn problem(alpha: f64) -> FdProblem {
    let g = log_price_grid(1e-8, 500.0, 128, T, 20).unwrap();
    let p = GtspParams::symmetric(0.2, 1.0, alpha).unwrap();
    let m = MarketConfig::new(100.0, 0.01, 0.1, T, OptionKind::Put).unwrap();
    FdProblem::new(g, p, m, JumpSide::Positive)
}

/// Lagrange basis written out for four nodes.
fn weights(nodes: [f64; 4], t: f64) -> [f64; 4] {
    let mut w = [1.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                w[i] *= (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
    }
    w
}

#[test]
fn anchors_reproduce_exactly() {
    let fd = problem(-2.0);
    let sol = price_real_alpha(&AlphaQuery::new(-2.0).unwrap(), &fd).unwrap();
    assert_eq!(sol.values, fd.solve_integer_alpha(-2).unwrap());
    assert_eq!(sol.mode, InterpMode::Interpolation);
}

#[test]
fn interpolates_independent_anchor_solves() {
    let fd = problem(-2.5);
    let q = AlphaQuery::new(-2.5).unwrap();
    assert_eq!(q.anchor_alphas, [-4, -3, -2, -1]);
    let sol = price_real_alpha(&q, &fd).unwrap();
    let runs: Vec<Vec<f64>> = q.anchor_alphas.iter().map(|&a| fd.solve_integer_alpha(a).unwrap()).collect();
    let w = weights([-4.0, -3.0, -2.0, -1.0], -2.5);
    for i in 0..runs[0].len() {
        let want: f64 = (0..4).map(|k| w[k] * runs[k][i]).sum();
        assert!((sol.values[i] - want).abs() < 1e-12 * (1.0 + want.abs()));
    }
    for a in &sol.anchors {
        assert_eq!(a.scheme, SchemeKind::Pade(fd.pade));
    }
}

#[test]
fn anchor_sets_and_modes() {
    assert_eq!(default_anchors(-0.5).unwrap(), [-3, -2, -1, 0]);
    assert_eq!(default_anchors(0.5).unwrap(), [-2, -1, 0, 1]);
    assert_eq!(default_anchors(1.5).unwrap(), [-2, -1, 0, 1]);
    assert_eq!(AlphaQuery::new(-0.5).unwrap().mode(), InterpMode::Interpolation);
    assert_eq!(AlphaQuery::new(1.5).unwrap().mode(), InterpMode::Extrapolation);
    assert_eq!(
        AlphaQuery::with_anchors(-0.5, [-4, -3, -2, -1]).unwrap().mode(),
        InterpMode::Extrapolation
    );
    assert!(AlphaQuery::with_anchors(-2.5, [-4, -2, -3, -1]).is_err());
    assert!(AlphaQuery::with_anchors(-2.5, [-3, -2, -1, 2]).is_err());
}

#[test]
fn anchor_failure_names_alpha() {
    let fd = FdProblem {
        equation: JumpEquation::Plain,
        ..problem(-0.5)
    };
    match price_real_alpha(&AlphaQuery::new(-0.5).unwrap(), &fd) {
        Err(Error::Anchor { alpha, .. }) => assert_eq!(alpha, 0),
        other => panic!("expected an anchor error, got {other:?}"),
    }
}

#[test]
fn zero_anchor_beats_extrapolation() {
    let fd = problem(-0.5);
    let w = symmetric_window(20.0, 512, T, 20).unwrap();
    let fft = FftProblem::new(w.clone(), fd.params, fd.market, JumpSide::Positive);
    let reference = fft.solve_alpha(-0.5).unwrap();
    let dev = |anchors| {
        let sol = price_real_alpha(&AlphaQuery::with_anchors(-0.5, anchors).unwrap(), &fd).unwrap();
        compare_fd_fft(&fd.grid, &sol.values, &w, &reference).unwrap().max_abs_diff()
    };
    let inner = dev([-3, -2, -1, 0]);
    let outer = dev([-4, -3, -2, -1]);
    assert!(inner < outer, "{inner} {outer}");
}

#[test]
fn cubic_kernel_is_exact_on_cubics() {
    let p = |x: f64| 2.0 - x + 0.5 * x * x - 0.25 * x * x * x;
    let pts = [(-4.0, p(-4.0)), (-3.0, p(-3.0)), (-2.0, p(-2.0)), (-1.0, p(-1.0))];
    for t in [-4.5, -2.5, -1.2, 0.3] {
        assert!((cubic_lagrange(&pts, t).unwrap() - p(t)).abs() < 1e-12);
    }
    let flat = [(0.0, 3.0), (1.0, 3.0), (2.0, 3.0), (3.0, 3.0)];
    assert!((cubic_lagrange(&flat, 1.7).unwrap() - 3.0).abs() < 1e-14);
    assert!(cubic_lagrange(&[(0.0, 1.0), (0.0, 2.0), (2.0, 4.0), (3.0, 8.0)], 1.5).is_err());
}

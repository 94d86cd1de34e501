//! Outer-loop behaviour on the two-variant CNOT mixture with the default
//! asymmetric noise.

use pqc::metrics::{worst_case_cost, AscentConfig, ExtensionIndex};
use pqc::minmax::{cnot_mixture_family, golden_section_min, minmax_gda, sweep, GdaConfig};
use pqc::noise::{build_cnot_variant, ideal_cnot_channel, GateVariant, NoiseSpec};

fn cfg() -> AscentConfig {
    AscentConfig::default()
}

#[test]
fn refinement_keeps_shared_points_and_endpoints_match_variants() {
    let spec = NoiseSpec::table1();
    let pc = cnot_mixture_family(&spec).unwrap();
    let target = ideal_cnot_channel();
    let coarse = sweep(&pc, &target, ExtensionIndex::NONE, 6, &cfg(), 50, 9, &[]).unwrap();
    let fine = sweep(&pc, &target, ExtensionIndex::NONE, 11, &cfg(), 50, 9, &[]).unwrap();
    for (i, &w) in coarse.grid.iter().enumerate() {
        assert_eq!(w, fine.grid[2 * i]);
        assert!((coarse.worst_cost[i] - fine.worst_cost[2 * i]).abs() <= 1e-9);
        assert!((coarse.mean_cost[i] - fine.mean_cost[2 * i]).abs() <= 1e-9);
    }
    let at = |v| {
        let mut c = cfg();
        c.seed = 9;
        worst_case_cost(&target, &build_cnot_variant(v, &spec).unwrap(), ExtensionIndex::NONE, &c).unwrap().value
    };
    // w1 weighs the direct variant
    assert!((fine.worst_cost[10] - at(GateVariant::Direct)).abs() <= 1e-9);
    assert!((fine.worst_cost[0] - at(GateVariant::HadamardConjugated)).abs() <= 1e-9);
}

#[test]
fn worst_cost_is_continuous_in_w1() {
    let pc = cnot_mixture_family(&NoiseSpec::table1()).unwrap();
    let c = sweep(&pc, &ideal_cnot_channel(), ExtensionIndex::NONE, 201, &cfg(), 10, 3, &[]).unwrap();
    let jump = c.worst_cost.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(jump < 0.05, "largest adjacent jump {jump}");
}

#[test]
fn golden_section_and_gda_agree_with_grid() {
    let pc = cnot_mixture_family(&NoiseSpec::table1()).unwrap();
    let target = ideal_cnot_channel();
    let curve = sweep(&pc, &target, ExtensionIndex::NONE, 101, &cfg(), 50, 0, &[]).unwrap();
    let w_grid = curve.grid[curve.argmin];
    assert!(curve.argmin > 0 && curve.argmin < 100);

    let worst = |w: f64| worst_case_cost(&target, &pc.build(&[w]).unwrap(), ExtensionIndex::NONE, &cfg()).unwrap().value;
    let (w_golden, c_golden) = golden_section_min(worst, 0.0, 1.0, 1e-4);
    assert!((w_golden - w_grid).abs() <= 0.01, "golden {w_golden} vs grid {w_grid}");
    assert!(c_golden <= curve.worst_cost[curve.argmin] + 1e-9);

    let init = pc.point(vec![0.2]).unwrap();
    let res = minmax_gda(&pc, &target, ExtensionIndex::NONE, &init, &GdaConfig::default()).unwrap();
    let w_gda = res.theta_star.values()[0];
    assert!((w_gda - w_golden).abs() <= 0.02, "gda {w_gda} vs golden {w_golden}");
    assert!(res.history.windows(2).all(|h| h[1] <= h[0]));
    assert!(res.cost.value <= curve.worst_cost[0].min(curve.worst_cost[100]));
}

//! Pipe-flow laws against independent closed forms.

use ridgelaw::pipeflow::{
    bulk_velocity, bulk_velocity_with, colebrook_residual, friction_factor, reynolds, v_laminar,
    v_turbulent, PipeState, Regime,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn hagen_poiseuille_flow_rate() {
    // Q = pi R^4 dP/(8 mu L), V = Q / (pi R^2)
    let s = PipeState::new(998.0, 1e-3, 0.02, 1e-6, 40.0).unwrap();
    let r = s.diam / 2.0;
    let q = std::f64::consts::PI * r.powi(4) * s.dpdl / (8.0 * s.mu);
    assert!(rel(v_laminar(&s), q / (std::f64::consts::PI * r * r)) < 1e-14);
}

#[test]
fn haaland_approximation_agrees_with_colebrook() {
    // Haaland: 1/sqrt(f) = -1.8 log10((eps/D/3.7)^1.11 + 6.9/Re), within about 2%
    let s = PipeState::new(998.0, 1e-3, 0.1, 1e-4, 100.0).unwrap();
    let v = v_turbulent(&s).unwrap();
    let re = reynolds(&s, v);
    assert!(re > 1e4);
    let f = friction_factor(&s, v).unwrap();
    let inv = -1.8 * ((s.eps / s.diam / 3.7).powf(1.11) + 6.9 / re).log10();
    let f_haaland = 1.0 / (inv * inv);
    assert!(rel(f, f_haaland) < 0.03, "{f} vs {f_haaland}");
    assert!(colebrook_residual(&s, v).unwrap().abs() < 1e-12);
}

#[test]
fn regime_switch_uses_turbulent_reynolds_number() {
    let s = PipeState::new(998.0, 1e-3, 0.1, 1e-4, 100.0).unwrap();
    let sol = bulk_velocity_with(&s, 3e3);
    assert_eq!(sol.regime, Regime::Turbulent);
    assert_eq!(sol.velocity, v_turbulent(&s).unwrap());

    let slow = PipeState::new(1.0, 1.0, 0.1, 1e-3, 3.2).unwrap();
    let sol = bulk_velocity_with(&slow, 3e3);
    assert_eq!(sol.regime, Regime::Laminar);
    assert_eq!(bulk_velocity(&slow), v_laminar(&slow));

    // moving the threshold just above the turbulent Re flips the branch
    let re_t = reynolds(&s, v_turbulent(&s).unwrap());
    assert_eq!(bulk_velocity_with(&s, re_t).regime, Regime::Laminar);
    assert_eq!(
        bulk_velocity_with(&s, re_t * (1.0 - 1e-12)).regime,
        Regime::Turbulent
    );
}

#[test]
fn laminar_friction_factor_is_64_over_re() {
    for dpdl in [1e-3, 0.1, 10.0] {
        let s = PipeState::new(1.2, 1.8e-5, 0.01, 1e-5, dpdl).unwrap();
        let v = v_laminar(&s);
        assert!(rel(friction_factor(&s, v).unwrap() * reynolds(&s, v), 64.0) < 1e-13);
    }
}

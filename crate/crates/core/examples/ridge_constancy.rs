//! Moving along directions orthogonal to A leaves the velocity unchanged.

use nalgebra::DVector;
use ridgelaw::pipeflow::{builtin_model, PipeState, Regime};
use ridgelaw::ridge::constancy_directions;

fn main() -> ridgelaw::Result<()> {
    let model = builtin_model(Regime::Turbulent)?;
    let a = model.decomposition.a_f64();
    let perp = constancy_directions(&a)?;
    println!("constancy directions (log space):\n{perp:.4}");

    let x: Vec<f64> = model
        .log_bounds
        .iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect();
    let v0 = model.eval_log(&x);
    for t in [-1.0, 0.5, 2.0] {
        let moved = DVector::from_column_slice(&x) + perp.column(0) * t;
        let s = PipeState::from_log(moved.as_slice());
        println!(
            "t = {t:>4}: rho {:.4e} mu {:.4e} D {:.4e} eps {:.4e} dP/L {:.4e}  V = {:.15e}",
            s.rho,
            s.mu,
            s.diam,
            s.eps,
            s.dpdl,
            model.eval_log(moved.as_slice())
        );
    }
    println!("V at start {v0:.15e}");
    Ok(())
}

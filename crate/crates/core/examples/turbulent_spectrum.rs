//! Eigenvalues of C for turbulent pipe flow, and how many grid points are turbulent.

use ridgelaw::activesubspace::{estimate, GradientConfig, Parallelism};
use ridgelaw::pipeflow::{builtin_model, Regime};
use ridgelaw::quadrature::tensor_grid;

fn sci(v: &[f64], digits: usize) -> String {
    v.iter()
        .map(|x| format!("{x:.digits$e}"))
        .collect::<Vec<_>>()
        .join("  ")
}

fn main() -> ridgelaw::Result<()> {
    let model = builtin_model(Regime::Turbulent)?;
    for order in [7, 9, 11] {
        let grid = tensor_grid(order, &model.log_bounds)?;
        let est = estimate(
            &|x: &[f64]| model.eval_log(x),
            &grid,
            &GradientConfig::new(1e-5)?,
            Parallelism(None),
        )?;
        let turbulent = grid
            .iter()
            .filter(|(x, _)| model.solve_log(x).regime == Regime::Turbulent)
            .count();
        println!("order {order:>2}: eigenvalues {}", sci(&est.eigenvalues, 6));
        println!(
            "          turbulent fraction {:.4}",
            turbulent as f64 / grid.len() as f64
        );
    }

    // the same law with the regime switch disabled
    let smooth = model.with_re_crit(0.0);
    for order in [9, 11] {
        let grid = tensor_grid(order, &smooth.log_bounds)?;
        let est = estimate(
            &|x: &[f64]| smooth.eval_log(x),
            &grid,
            &GradientConfig::new(1e-5)?,
            Parallelism(None),
        )?;
        println!(
            "no switch, order {order:>2}: {}",
            sci(&est.eigenvalues[..3], 10)
        );
    }
    Ok(())
}

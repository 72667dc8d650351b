//! Eigenvalues of C for laminar pipe flow: one dominant direction.

use ridgelaw::activesubspace::{active_subspace, estimate, GradientConfig, Parallelism};
use ridgelaw::pipeflow::{builtin_model, Regime};
use ridgelaw::quadrature::tensor_grid;
use ridgelaw::subspace::inclusion_residual;

fn main() -> ridgelaw::Result<()> {
    let model = builtin_model(Regime::Laminar)?;
    let order = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(7);
    let grid = tensor_grid(order, &model.log_bounds)?;
    for h in [1e-3, 1e-5, 1e-7] {
        let est = estimate(
            &|x: &[f64]| model.eval_log(x),
            &grid,
            &GradientConfig::new(h)?,
            Parallelism(None),
        )?;
        let u = active_subspace(&est, 1)?;
        let r2 = inclusion_residual(&u, &model.decomposition.a_f64())?.total;
        let ratios: Vec<String> = est.ratios().iter().map(|r| format!("{r:.3e}")).collect();
        println!("h = {h:.0e}: ratios [{}]  r2 = {r2:.3e}", ratios.join(", "));
    }
    println!("{} points", grid.len());
    Ok(())
}

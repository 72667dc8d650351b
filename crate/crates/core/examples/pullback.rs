//! Eigenvalues of C against those of the pulled-back matrix T on span(A).

use nalgebra::DVector;
use ridgelaw::activesubspace::{eigendecompose, estimate, pullback_t, GradientConfig, Parallelism};
use ridgelaw::linalg::orthonormalize;
use ridgelaw::pipeflow::{builtin_model, Regime};
use ridgelaw::quadrature::tensor_grid;

fn main() -> ridgelaw::Result<()> {
    let cfg = GradientConfig::new(1e-5)?;
    for regime in [Regime::Laminar, Regime::Turbulent] {
        let model = builtin_model(regime)?;
        let grid = tensor_grid(9, &model.log_bounds)?;
        let c = estimate(
            &|x: &[f64]| model.eval_log(x),
            &grid,
            &cfg,
            Parallelism(None),
        )?;
        let q = orthonormalize(&model.decomposition.a_f64())?;
        let g = |y: &[f64]| model.eval_log((&q * DVector::from_column_slice(y)).as_slice());
        let t = eigendecompose(&pullback_t(&g, &q, &grid, &cfg, Parallelism(None))?)?;
        println!("{regime}");
        for i in 0..q.ncols() {
            println!(
                "  C {:.10e}   T {:.10e}",
                c.eigenvalues[i], t.eigenvalues[i]
            );
        }
    }
    Ok(())
}

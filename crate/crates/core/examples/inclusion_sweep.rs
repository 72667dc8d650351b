//! r^2(h) for both regimes, written to CSV.

use ridgelaw::activesubspace::Parallelism;
use ridgelaw::cli::write_sweep;
use ridgelaw::pipeflow::Regime;
use ridgelaw::subspace::convergence_sweep;

fn main() -> ridgelaw::Result<()> {
    let out = std::env::temp_dir().join("ridgelaw-sweep");
    let steps = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    for regime in [Regime::Laminar, Regime::Turbulent] {
        let sweep = convergence_sweep(regime, &steps, 9, Parallelism(None))?;
        for p in &sweep.points {
            println!("{:>9} h = {:.0e}  r2 = {:.6e}", regime.as_str(), p.h, p.r2);
        }
        println!("{:>9} slope {:?}", regime.as_str(), sweep.slope);
        let dir = out.join(regime.as_str());
        std::fs::create_dir_all(&dir)?;
        write_sweep(&dir, &sweep)?;
    }
    println!("tables in {}", out.display());
    Ok(())
}

//! A small Moody table: friction factor against Reynolds number.

use ridgelaw::pipeflow::{bulk_velocity_with, friction_factor, reynolds, PipeState, RE_CRIT};

fn main() -> ridgelaw::Result<()> {
    let (rho, mu, diam) = (998.0, 1.0e-3, 0.05);
    println!(
        "{:>8} {:>12} {:>12} {:>10}  regime",
        "eps/D", "dP/L", "Re", "f"
    );
    for rel_rough in [1e-5, 1e-3, 1e-2] {
        for dpdl in [1e-2, 1.0, 10.0, 100.0, 1e3] {
            let s = PipeState::new(rho, mu, diam, rel_rough * diam, dpdl)?;
            let sol = bulk_velocity_with(&s, RE_CRIT);
            println!(
                "{rel_rough:>8.0e} {dpdl:>12.3e} {:>12.4e} {:>10.5}  {}",
                reynolds(&s, sol.velocity),
                friction_factor(&s, sol.velocity)?,
                sol.regime
            );
        }
    }
    Ok(())
}

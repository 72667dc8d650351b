//! Buckingham Pi for pipe flow and for a pendulum declared inline.

use ridgelaw::dimensions::{format_rational, make_dimension, rat, QuantityDecl, UnitSystem};
use ridgelaw::model::resolve_model;
use ridgelaw::pigroups::PiDecomposition;

fn show(dec: &PiDecomposition) {
    println!(
        "D =\n{:?}rank {}, {} pi groups",
        dec.d.entries,
        dec.rank,
        dec.n()
    );
    let w: Vec<String> = dec.w.iter().map(format_rational).collect();
    println!("w = [{}]", w.join(", "));
    for (j, col) in dec.null_basis.columns().iter().enumerate() {
        let terms: Vec<String> = dec
            .d
            .column_names
            .iter()
            .zip(col)
            .filter(|(_, e)| !num_traits::Zero::is_zero(*e))
            .map(|(n, e)| format!("{n}^{}", format_rational(e)))
            .collect();
        println!("pi{} = {}", j + 1, terms.join(" "));
    }
}

fn main() -> ridgelaw::Result<()> {
    let pipe = resolve_model("pipeflow")?.decompose()?;
    show(&pipe);

    // period of a pendulum from length, gravity, mass and amplitude
    let units = UnitSystem::new(["kg", "m", "s"])?;
    let q = |name: &str, pairs: &[(&str, i64)], lo, hi| {
        let dim = make_dimension(&units, pairs.iter().map(|&(l, e)| (l, rat(e, 1))))?;
        QuantityDecl::new(name, dim, lo, hi)
    };
    let quantities = vec![
        q("L", &[("m", 1)], 0.1, 2.0)?,
        q("g", &[("m", 1), ("s", -2)], 9.7, 9.9)?,
        q("M", &[("kg", 1)], 0.1, 1.0)?,
        q("theta", &[], 0.05, 0.5)?,
    ];
    let period = make_dimension(&units, [("s", rat(1, 1))])?;
    let pendulum = PiDecomposition::new(&quantities, "T", &period)?;
    println!();
    show(&pendulum);
    Ok(())
}

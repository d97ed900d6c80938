use halfspace_resonances::model::{ModelParams, BoundaryCondition::Dirichlet};
use halfspace_resonances::solver::count_exact;
use std::time::Instant;

#[test]
fn diag_counting_law() {
    let p = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    for r in [50.0, 100.0, 200.0, 400.0] {
        let t0 = Instant::now();
        let rep = count_exact(&p, r).unwrap();
        println!("R={r}: exact={} asym={} oracle={} in {:.2}s",
                 rep.exact_count, rep.asymptotic_count, rep.oracle_count,
                 t0.elapsed().as_secs_f64());
    }
}

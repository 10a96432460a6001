use fracburgers::solver::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let config = SolverConfig {
        s: 0.2,
        eps1: 0.0,
        n: 8192,
        domain_length: 40.0,
        dt: DtSpec::Auto,
        t_end: 2.0,
        dealias_fraction: 2.0 / 3.0,
        output_every: 1024,
        seed: 0,
    };
    let init = InitialData::SteepShock { amplitude: 3.0, steepness: 1.0 };
    let traj = run(&config, &init).unwrap();
    let g0 = traj.series[0].max_grad;
    let gmax = traj.series.iter().map(|r| r.max_grad).fold(0.0f64, f64::max);
    println!("g0={g0:.3} gmax={gmax:.1} ratio={:.1} status={:?} elapsed={:.2?}", gmax / g0, traj.status, t0.elapsed());
}

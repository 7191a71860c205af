//! Cap discrepancy of harmonic-ensemble draws versus uniform points.

use sphere_dpp::sampling::{run_trials, sample_dpp, sample_uniform};
use sphere_dpp::stats::discrepancy_estimate;
use sphere_dpp::{HarmonicEnsemble, ProjectionKernel};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn main() -> sphere_dpp::Result<()> {
    for big_l in [4, 8, 16] {
        let e = HarmonicEnsemble::new(2, big_l)?;
        let n = e.trace();
        let dpp = run_trials(11, 3, |rng| discrepancy_estimate(&sample_dpp(&e, rng)?, 64, rng.substream(1)))?;
        let iid = run_trials(11, 4, |rng| discrepancy_estimate(&sample_uniform(2, n, rng), 64, rng.substream(1)))?;
        println!("n = {n:>4}: harmonic {:.4}, uniform {:.4}", median(dpp), median(iid));
    }
    Ok(())
}

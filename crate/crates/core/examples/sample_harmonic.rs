//! Draws one configuration of the harmonic ensemble on S² and compares it
//! with the same number of i.i.d. uniform points.
//!
//! cargo run --release --example sample_harmonic -- 12

use sphere_dpp::sampling::{sample_dpp, sample_uniform, RngStream};
use sphere_dpp::stats::separation;
use sphere_dpp::{HarmonicEnsemble, ProjectionKernel};

fn main() -> sphere_dpp::Result<()> {
    let big_l: usize = std::env::args().nth(1).map_or(12, |a| a.parse().expect("degree"));
    let e = HarmonicEnsemble::new(2, big_l)?;
    let x = sample_dpp(&e, RngStream::new(42, 0))?;
    let u = sample_uniform(2, e.trace(), RngStream::new(42, 1));
    println!("n = {} points on S^2 (L = {big_l})", x.len());
    println!("first point: {:?}", x.point(0));
    println!("separation, harmonic ensemble: {:.5}", separation(&x)?);
    println!("separation, uniform:           {:.5}", separation(&u)?);
    Ok(())
}

//! Key-edge confidence and rescoring: a peaked head output keeps its score,
//! a flat one loses it.

use sbd::codec::encode;
use sbd::{rescore, s_sbd, KeDistributions, Quad, Roi};

fn flat(bins: usize) -> Result<KeDistributions, sbd::Error> {
    let u = vec![1.0 / bins as f64; bins];
    Ok(KeDistributions::new(
        [u.clone(), u.clone(), u.clone(), u.clone()],
        [u.clone(), u.clone(), u.clone(), u],
        [1.0 / 24.0; 24],
    )?)
}

fn main() -> Result<(), sbd::Error> {
    let quad = Quad::from_coords([20., 20., 90., 25., 85., 60., 25., 55.])?;
    let roi = Roi::new(10., 10., 100., 70.)?;
    let peaked = KeDistributions::one_hot(&encode(&quad, &roi, 56)?);
    let flat = flat(56)?;

    let s_box = 0.9;
    for (name, kd) in [("peaked", &peaked), ("flat", &flat)] {
        let s = s_sbd(kd, 5)?;
        print!("{name:<7} s_sbd {s:.4}  ");
        for gamma in [0.0, 0.7, 1.4, 2.0] {
            print!("g={gamma}: {:.4}  ", rescore(s_box, s, gamma)?);
        }
        println!();
    }
    Ok(())
}

//! A box whose border lies outside its RoI is still recovered, because only
//! the half-way points need to fall inside.

use sbd::codec::{decode_bins, encode, sort_key_edges};
use sbd::{Point, Quad, Roi};

fn main() -> Result<(), sbd::Error> {
    let roi = Roi::new(0., 0., 112., 112.)?;
    let quad = Quad::new([
        Point::new(10., 20.),
        Point::new(150., 50.),
        Point::new(60., 100.),
        Point::new(20., 90.),
    ]);

    let sc = sort_key_edges(&quad);
    let half = (sc.xs[3] + sc.x_mean) / 2.0;
    println!("x_max {} is outside the RoI, its half point {half} is not", sc.xs[3]);

    let targets = encode(&quad, &roi, 56)?;
    println!("all targets inside RoI: {}", targets.all_in_roi());

    let decoded = decode_bins(&targets, &roi)?;
    let back = sort_key_edges(&decoded);
    println!("decoded x_max {:.2} (RoI ends at {})", back.xs[3], roi.x1());

    // Far outside, the half points clamp to the edge bins and are flagged.
    let far = Quad::from_coords([200., 200., 300., 200., 300., 300., 200., 300.])?;
    let kt = encode(&far, &roi, 56)?;
    println!("far box bins {:?}, in roi {:?}", kt.x_bins, kt.in_roi);
    Ok(())
}

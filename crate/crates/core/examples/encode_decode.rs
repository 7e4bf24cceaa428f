//! Encode a quadrilateral into key-edge bins and decode it back.

use sbd::codec::{decode_bins, encode, sort_key_edges};
use sbd::{canonical_clockwise, Quad, Roi};

fn main() -> Result<(), sbd::Error> {
    let quad = Quad::from_coords([10., 40., 20., 100., 50., 0., 80., 60.])?;
    let roi = Roi::new(0., 0., 112., 112.)?;

    let sc = sort_key_edges(&quad);
    println!("sorted x {:?}  mean {}", sc.xs, sc.x_mean);
    println!("sorted y {:?}  mean {}", sc.ys, sc.y_mean);

    let targets = encode(&quad, &roi, 56)?;
    println!("x bins {:?}", targets.x_bins);
    println!("y bins {:?}", targets.y_bins);
    println!("match type {}", targets.match_type);

    let decoded = decode_bins(&targets, &roi)?;
    println!("decoded (x-rank order)   {decoded}");
    println!("decoded (boundary order) {}", canonical_clockwise(&decoded));

    let (wx, _) = roi.bin_widths(56);
    println!("bin width {wx} px, worst-case error {} px", 1.5 * wx);
    Ok(())
}

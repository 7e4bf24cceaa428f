//! The 24 match types and which of them describe a simple polygon.

use sbd::codec::{reconstruct_quad, SortedCoords};
use sbd::{canonical_clockwise, compute_match_type, is_simple_quad, MatchType, Quad};

fn main() -> Result<(), sbd::Error> {
    let sc = SortedCoords::new([10., 20., 50., 80.], [0., 40., 60., 100.]);
    for mt in MatchType::all() {
        let quad = reconstruct_quad(&sc, mt);
        let boundary = canonical_clockwise(&quad);
        println!(
            "{:>2} {mt}  simple as listed: {:<5}  after reordering: {}",
            mt.index(),
            is_simple_quad(&quad),
            is_simple_quad(&boundary)
        );
    }

    // The same box listed in any vertex order has the same match type.
    let quad = Quad::from_coords([10., 40., 20., 100., 50., 0., 80., 60.])?;
    let mut v = quad.vertices;
    v.reverse();
    assert_eq!(compute_match_type(&quad), compute_match_type(&Quad::new(v)));
    println!("match type of the example box: {}", compute_match_type(&quad));
    Ok(())
}

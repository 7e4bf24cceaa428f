//! Validity filtering, polygon NMS and keypoint-similarity NMS on a handful
//! of overlapping detections.

use sbd::suppression::validity_filter;
use sbd::{oks, oks_nms, pnms, Detection, MatchType, OksParams, Quad, Roi};

fn det(c: [f64; 8], score: f64) -> Result<Detection, sbd::Error> {
    let quad = Quad::from_coords(c)?;
    Ok(Detection {
        quad,
        s_box: score,
        s_sbd: 1.0,
        score,
        roi: Roi::bounding(&quad)?,
        match_type: MatchType::IDENTITY,
    })
}

fn main() -> Result<(), sbd::Error> {
    let dets = vec![
        det([0., 0., 100., 0., 100., 40., 0., 40.], 0.95),
        det([4., 2., 104., 2., 104., 42., 4., 42.], 0.90),
        det([0., 0., 100., 40., 100., 0., 0., 40.], 0.85),
        det([200., 0., 260., 0., 260., 30., 200., 30.], 0.80),
        det([203., 1., 262., 1., 262., 31., 203., 31.], 0.60),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let (valid, rejected) = validity_filter(dets);
    println!("{} valid, {} rejected as non-simple", valid.len(), rejected.len());

    let kept = pnms(&valid, 0.2);
    println!("after polygon NMS: {}", kept.len());
    for d in &kept {
        println!("  {:.2} {}", d.score, d.quad);
    }

    let params = OksParams::default();
    println!("oks(first, second) = {:.4}", oks(&valid[0], &valid[1], &params)?);
    println!("after OKS NMS: {}", oks_nms(&valid, &params).len());
    Ok(())
}

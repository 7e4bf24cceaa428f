//! Precision, recall and Hmean of detections against ICDAR ground truth.

use sbd::evaluation::{evaluate_image, EvalReport};
use sbd::formats::{parse_det_str, parse_gt_str};

const GT: &str = "\
10,10,110,10,110,50,10,50,hello
200,10,300,10,300,50,200,50,world
400,10,450,10,450,30,400,30,###
";

const DET: &str = "\
12,11,111,11,111,52,12,52,0.92
205,30,300,30,300,70,205,70,0.81
401,10,450,10,450,31,401,31,0.77
600,600,650,600,650,640,600,640,0.55
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gts: Vec<_> = parse_gt_str(GT, "gt")?.iter().map(|r| r.ground_truth()).collect();
    let dets: Vec<_> = parse_det_str(DET, "det")?.iter().map(|r| r.scored()).collect();

    let image = evaluate_image("img_1", &gts, &dets, 0.5);
    println!("tp {} / detections {} / ground truth {}", image.tp, image.n_det, image.n_gt);

    let report = EvalReport::from_images(vec![image]);
    println!("P {:.3}  R {:.3}  H {:.3}", report.precision, report.recall, report.hmean);
    Ok(())
}

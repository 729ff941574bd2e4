use billiards_core::alcove::{check_alcove, classify, type_string, EPS_ANGLE};
use billiards_core::dynamics::{simulate, CornerPolicy, TrajectoryState};
use billiards_core::tables;

fn main() {
    let table = tables::triangle_g2();
    let verdict = check_alcove(&table, EPS_ANGLE);
    let types = classify(verdict.diagram.as_ref().unwrap()).unwrap();
    assert_eq!(type_string(&types), "G2~");

    let start = TrajectoryState::from_slices(&[0.3, 0.1], &[1.0, 2.0]).unwrap();
    let run = simulate(&table, &start, 20.0, CornerPolicy::FoldGroup).unwrap();
    println!("{} bounces", run.bounce_count());
}

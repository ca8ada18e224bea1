//! Swaps two cubes around a third that must stay put.
use cube_shuffle::domains::NDomain;
use cube_shuffle::geometry::Cube;
use cube_shuffle::rational::rat;
use cube_shuffle::shuffle::{shuffle, StepKind};

fn main() -> cube_shuffle::Result<()> {
    let left = Cube::of(&[(0, 1, 1, 4), (1, 4, 3, 4)]);
    let right = Cube::of(&[(3, 4, 1, 1), (1, 4, 3, 4)]);
    let wall = Cube::of(&[(3, 8, 5, 8), (0, 1, 1, 2)]);
    let r = NDomain::finite(2, vec![left.clone(), right.clone(), wall.clone()])?;
    let s = NDomain::finite(2, vec![right, left, wall])?;

    let plan = shuffle(&r, &s, &[3])?;
    println!("verified: {}", plan.verify(0).pass);
    println!(
        "two-cycle steps: {}",
        plan.count(|k| matches!(k, StepKind::TwoCycle { .. }))
    );
    let path = plan.schedule().path(3)?;
    println!("cube 3 keyframes: {}", path.keyframes().len());
    for t in [rat(0, 1), rat(1, 2), rat(1, 1)] {
        println!("t = {t}: cube 1 at {:?}", plan.schedule().path(1)?.at(&t));
    }
    Ok(())
}

//! Rearranges three cubes and evaluates the homotopy along the way.
use cube_shuffle::domains::{IndexSet, NDomain};
use cube_shuffle::geometry::Cube;
use cube_shuffle::loops::{LoopFamily, SequenceSpec};
use cube_shuffle::rational::{one, rat};
use cube_shuffle::schedule::eval_homotopy;
use cube_shuffle::shuffle::shuffle;

fn main() -> cube_shuffle::Result<()> {
    let thirds: Vec<Cube> = (0..3).map(|i| Cube::of(&[(i, 3, i + 1, 3), (0, 1, 1, 1)])).collect();
    let r = NDomain::finite(2, thirds.clone())?;
    let s = NDomain::finite(2, vec![thirds[1].clone(), thirds[2].clone(), thirds[0].clone()])?;

    let plan = shuffle(&r, &s, &[])?;
    for step in plan.provenance() {
        println!("{step:?}");
    }
    let rep = plan.verify(0);
    println!("verified: {} ({} pairs, {} keyframes)", rep.pass, rep.checked_pairs, rep.keyframes);

    let seq = SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1).build(2, &IndexSet::range(3))?;
    let p = [rat(1, 6), rat(1, 2)];
    for t in [rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4), one()] {
        let e = eval_homotopy(plan.schedule(), &seq, &p, &t, 0);
        println!("H(({}, {}), {t}) = {:?} from index {:?}", p[0], p[1], e.value.to_f64(), e.index);
    }
    Ok(())
}

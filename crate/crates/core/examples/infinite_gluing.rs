//! Glues infinitely many stages into one homotopy onto the standard domain.
use cube_shuffle::domains::{interleaved_pair_domain, standard_domain, IndexSet};
use cube_shuffle::loops::{LoopFamily, SequenceSpec};
use cube_shuffle::rational::{one, rat};
use cube_shuffle::schedule::eval_homotopy;
use cube_shuffle::shuffle::shuffle;

fn main() -> cube_shuffle::Result<()> {
    let r = interleaved_pair_domain(2)?;
    let s = standard_domain(2)?;
    let plan = shuffle(&r, &s, &[])?;
    let rep = plan.verify(24);
    println!("verified to index 24: {} ({} pairs)", rep.pass, rep.checked_pairs);

    for k in [1, 2, 5, 12] {
        let path = plan.schedule().path(k)?;
        println!("index {k:>2}: {:?} -> {:?}", path.at(&rat(0, 1)), path.at(&one()));
    }

    let seq = SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1).build(2, &IndexSet::naturals())?;
    let p = [rat(9, 10), rat(1, 2)];
    for t in [rat(0, 1), rat(1, 2), rat(9, 10), one()] {
        let e = eval_homotopy(plan.schedule(), &seq, &p, &t, 32);
        println!("H(({}, {}), {t}) = {:?}, error <= {}", p[0], p[1], e.value.to_f64(), e.error_bound);
    }
    Ok(())
}

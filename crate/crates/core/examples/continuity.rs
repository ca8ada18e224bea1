//! Certifies continuity of a glued homotopy at its last time.
use cube_shuffle::domains::{block_pair_domain, standard_domain, IndexSet};
use cube_shuffle::loops::{LoopFamily, SequenceSpec};
use cube_shuffle::rational::{one, rat};
use cube_shuffle::shuffle::{continuity_certificate, shuffle};

fn main() -> cube_shuffle::Result<()> {
    let plan = shuffle(&block_pair_domain(2)?, &standard_domain(2)?, &[])?;
    let seq = SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1).build(2, &IndexSet::naturals())?;
    for eps in [rat(1, 4), rat(1, 20), rat(1, 100)] {
        let rep = continuity_certificate(&plan, &seq, &eps, 12)?;
        println!(
            "ε = {eps}: pass={} threshold={} time={} tail={}",
            rep.pass, rep.threshold, rep.time_threshold, rep.tail_bound
        );
    }
    Ok(())
}

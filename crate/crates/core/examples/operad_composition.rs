//! Composes little-cubes elements and checks the action on loops agrees.
use cube_shuffle::domains::{standard_domain, IndexSet, NDomain};
use cube_shuffle::geometry::Cube;
use cube_shuffle::loops::{lattice, LoopFamily, SequenceSpec};
use cube_shuffle::operad::{act_nested, act_on_loops, compose, symmetric_action, OperadElement};
use cube_shuffle::rational::one;

fn main() -> cube_shuffle::Result<()> {
    let halves = OperadElement::new(NDomain::finite(
        2,
        vec![Cube::of(&[(0, 1, 1, 2), (0, 1, 1, 1)]), Cube::of(&[(1, 2, 1, 1), (0, 1, 1, 1)])],
    )?)?;
    let quarters = OperadElement::new(NDomain::finite(
        2,
        vec![Cube::of(&[(0, 1, 1, 1), (0, 1, 1, 2)]), Cube::of(&[(0, 1, 1, 1), (1, 2, 1, 1)])],
    )?)?;
    let std = OperadElement::new(standard_domain(2)?)?;

    let finite = compose(&halves, &[quarters.clone(), quarters.clone()])?;
    println!("γ(halves; quarters, quarters) has arity {:?}", finite.arity());
    let seq = SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1).build(2, &IndexSet::range(4))?;
    let lhs = act_on_loops(&finite, &seq)?;
    let rhs = act_nested(&halves, &[quarters.clone(), quarters.clone()], &seq)?;
    let agree = lattice(2, 8).iter().all(|p| lhs.eval(p) == rhs.eval(p));
    println!("associativity on the 9x9 lattice: {agree}");

    let tail = compose(&halves, &[quarters.clone(), std])?;
    println!("γ(halves; quarters, standard) has arity {:?}", tail.arity());
    println!("first cubes: {:?}", tail.domain().entries(4));

    let swapped = symmetric_action(&quarters, &[2, 1])?;
    println!("quarters·(1 2): {:?}", swapped.domain().cubes());
    Ok(())
}

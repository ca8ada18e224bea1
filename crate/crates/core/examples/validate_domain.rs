//! Checks a few domains for interior-disjointness.
use cube_shuffle::domains::{adversarial_infinite_domain, standard_domain, validate, NDomain};
use cube_shuffle::geometry::Cube;

fn main() -> cube_shuffle::Result<()> {
    let tiles = NDomain::finite(
        2,
        vec![
            Cube::of(&[(0, 1, 1, 2), (0, 1, 1, 1)]),
            Cube::of(&[(1, 2, 1, 1), (0, 1, 1, 2)]),
            Cube::of(&[(1, 2, 1, 1), (1, 2, 1, 1)]),
        ],
    )?;
    let clash = NDomain::finite(
        2,
        vec![Cube::of(&[(0, 1, 2, 3), (0, 1, 1, 1)]), Cube::of(&[(1, 3, 1, 1), (0, 1, 1, 2)])],
    )?;
    for (name, d, bound) in [
        ("three tiles", tiles, 0),
        ("overlapping pair", clash, 0),
        ("standard", standard_domain(2)?, 200),
        ("adversarial depth 4", adversarial_infinite_domain(4)?, 200),
    ] {
        let rep = validate(&d, bound);
        println!(
            "{name:>20}: valid={} exhaustive={} pairs={} violation={:?}",
            rep.valid, rep.exhaustive, rep.checked_pairs, rep.violation
        );
    }
    Ok(())
}

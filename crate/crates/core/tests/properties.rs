mod common;

use std::collections::VecDeque;

use cube_shuffle::domains::shrink_to_interior;
use cube_shuffle::geometry::{canonical_affine, center_index, complement_connected, interiors_disjoint, subdivide, Cube, Interval};
use cube_shuffle::loops::{LoopFamily, SequenceSpec};
use cube_shuffle::rational::{one, rat, zero};
use cube_shuffle::schedule::eval_homotopy;
use cube_shuffle::shuffle::{finite_shuffle, shrink_schedule};
use cube_shuffle::Rational;
use proptest::prelude::*;

fn interval(den: i64) -> impl Strategy<Value = Interval> {
    (0..den, 0..den).prop_filter_map("empty", move |(a, b)| {
        let (lo, hi) = (a.min(b), a.max(b) + 1);
        Interval::new(rat(lo, den), rat(hi, den)).ok()
    })
}

fn cube(n: usize, den: i64) -> impl Strategy<Value = Cube> {
    prop::collection::vec(interval(den), n).prop_map(|axes| Cube::new(axes).unwrap())
}

fn interior_cube(n: usize) -> impl Strategy<Value = Cube> {
    prop::collection::vec((1i64..15, 1i64..15), n).prop_filter_map("flat", |pairs| {
        let axes: Option<Vec<Interval>> = pairs
            .into_iter()
            .map(|(a, b)| Interval::new(rat(a.min(b), 16), rat(a.max(b), 16)).ok())
            .collect();
        Cube::new(axes?).ok()
    })
}

/// Whether some point lies strictly inside both: the centre of the
/// candidate overlap box, tested coordinate by coordinate.
fn overlap_by_witness(a: &Cube, b: &Cube) -> bool {
    let witness: Vec<Rational> = a
        .axes()
        .iter()
        .zip(b.axes())
        .map(|(x, y)| {
            let lo = x.lo().max(y.lo());
            let hi = x.hi().min(y.hi());
            (lo + hi) / rat(2, 1)
        })
        .collect();
    let strictly = |c: &Cube| c.axes().iter().zip(&witness).all(|(iv, p)| iv.lo() < p && p < iv.hi());
    strictly(a) && strictly(b)
}

/// Flood fill over the `1/res` grid: cells not inside an obstacle, joined
/// through shared facets.
fn flood_connected(n: usize, res: i64, obstacles: &[Cube]) -> bool {
    let total = (res as usize).pow(n as u32);
    let coords = |mut i: usize| -> Vec<i64> {
        let mut c = vec![0; n];
        for x in c.iter_mut() {
            *x = (i % res as usize) as i64;
            i /= res as usize;
        }
        c
    };
    let free: Vec<bool> = (0..total)
        .map(|i| {
            let centre: Vec<Rational> = coords(i).iter().map(|&x| rat(2 * x + 1, 2 * res)).collect();
            !obstacles.iter().any(|o| o.contains_point(&centre))
        })
        .collect();
    // the empty complement counts as connected
    let Some(start) = free.iter().position(|&f| f) else {
        return true;
    };
    let mut seen = vec![false; total];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some(i) = queue.pop_front() {
        let mut stride = 1;
        let c = coords(i);
        for x in &c {
            for (ok, j) in [(*x > 0, i.wrapping_sub(stride)), (*x + 1 < res, i + stride)] {
                if ok && free[j] && !seen[j] {
                    seen[j] = true;
                    reached += 1;
                    queue.push_back(j);
                }
            }
            stride *= res as usize;
        }
    }
    reached == free.iter().filter(|&&f| f).count()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn interiors_disjoint_matches_witness(a in cube(2, 8), b in cube(2, 8), c in cube(3, 6), d in cube(3, 6)) {
        prop_assert_eq!(interiors_disjoint(&a, &b).unwrap(), !overlap_by_witness(&a, &b));
        prop_assert_eq!(interiors_disjoint(&a, &b).unwrap(), interiors_disjoint(&b, &a).unwrap());
        prop_assert_eq!(interiors_disjoint(&c, &d).unwrap(), !overlap_by_witness(&c, &d));
        prop_assert!(interiors_disjoint(&a, &c).is_err());
    }

    #[test]
    fn complement_connected_matches_flood_fill(obstacles in prop::collection::vec(cube(2, 8), 0..5)) {
        prop_assert_eq!(complement_connected(2, &obstacles), flood_connected(2, 16, &obstacles));
    }

    #[test]
    fn complement_connected_matches_flood_fill_3d(obstacles in prop::collection::vec(cube(3, 4), 0..4)) {
        prop_assert_eq!(complement_connected(3, &obstacles), flood_connected(3, 8, &obstacles));
    }

    #[test]
    fn affine_round_trip(src in cube(3, 7), tgt in cube(3, 5), p in prop::collection::vec(0i64..=12, 3)) {
        let map = canonical_affine(&src, &tgt).unwrap();
        prop_assert_eq!(map.apply_cube(&src), tgt.clone());
        let point: Vec<Rational> = src.axes().iter().zip(&p).map(|(iv, &i)| iv.lo() + iv.len() * rat(i, 12)).collect();
        let image = map.apply(&point);
        prop_assert!(tgt.contains_point(&image));
        prop_assert_eq!(map.invert(&image), point);
        let lo: Vec<Rational> = src.axes().iter().map(|a| a.lo().clone()).collect();
        let hi: Vec<Rational> = src.axes().iter().map(|a| a.hi().clone()).collect();
        prop_assert_eq!(map.apply(&lo), tgt.axes().iter().map(|a| a.lo().clone()).collect::<Vec<_>>());
        prop_assert_eq!(map.apply(&hi), tgt.axes().iter().map(|a| a.hi().clone()).collect::<Vec<_>>());
    }

    #[test]
    fn subdivision_tiles(g in interior_cube(2), h in interior_cube(3)) {
        for (n, gen) in [(2, g), (3, h)] {
            let sub = subdivide(&gen).unwrap();
            prop_assert_eq!(sub.len(), 3usize.pow(n as u32));
            prop_assert_eq!(sub.cell(center_index(n)), &gen);
            let volume: Rational = sub.cells().iter().map(Cube::volume).sum();
            prop_assert_eq!(volume, one());
            for (i, a) in sub.cells().iter().enumerate() {
                for b in &sub.cells()[i + 1..] {
                    prop_assert!(interiors_disjoint(a, b).unwrap());
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn shrink_reverses(seed in any::<u64>(), m in 1usize..8) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let r = common::random_domain(&mut rng, 2, m);
        let s = shrink_schedule(&r, &shrink_to_interior(&r)).unwrap();
        let back = s.reverse();
        prop_assert!(back.verify(0).pass);
        prop_assert_eq!(back.target().cubes(), r.cubes());
    }

    #[test]
    fn boundary_is_basepoint(seed in any::<u64>(), m in 2usize..7, t in 0i64..=8, u in 0i64..=8) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let (r, s) = common::random_pair(&mut rng, 2, m);
        let plan = finite_shuffle(&r, &s, &[]).unwrap();
        let seq = SequenceSpec::new(LoopFamily::SkewHarmonic, one(), 2).build(2, r.indices()).unwrap();
        let t = rat(t, 8);
        for p in [vec![zero(), rat(u, 8)], vec![one(), rat(u, 8)], vec![rat(u, 8), zero()], vec![rat(u, 8), one()]] {
            prop_assert!(eval_homotopy(plan.schedule(), &seq, &p, &t, 64).value.is_basepoint());
        }
    }
}

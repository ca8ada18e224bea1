//! Shared fixtures and oracles for the integration tests.
#![allow(dead_code)]

use cube_shuffle::domains::NDomain;
use cube_shuffle::geometry::{complement_connected, Cube, Interval};
use cube_shuffle::loops::Value;
use cube_shuffle::rational::{one, rat, zero};
use cube_shuffle::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seed() -> u64 {
    std::env::var("CUBE_SHUFFLE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x5eed_c0be)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

fn random_fraction(rng: &mut ChaCha8Rng) -> Rational {
    let q = rng.gen_range(2..=6);
    rat(rng.gen_range(1..q), q)
}

fn split(iv: &Interval, f: &Rational) -> (Interval, Interval) {
    let cut = iv.lo() + f * iv.len();
    (
        Interval::new(iv.lo().clone(), cut.clone()).unwrap(),
        Interval::new(cut, iv.hi().clone()).unwrap(),
    )
}

/// `count` boxes tiling `I^n`, by repeatedly cutting the largest one.
pub fn guillotine(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Cube> {
    let mut boxes = vec![Cube::unit(n)];
    while boxes.len() < count {
        let (i, _) = boxes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.volume().cmp(&b.1.volume()))
            .unwrap();
        let b = boxes.swap_remove(i);
        let axis = rng.gen_range(0..n);
        let (lo, hi) = split(b.axis(axis), &random_fraction(rng));
        boxes.push(b.with_axis(axis, lo));
        boxes.push(b.with_axis(axis, hi));
    }
    boxes.shuffle(rng);
    boxes
}

/// A random sub-box of `b`, possibly `b` itself.
pub fn sub_box(rng: &mut ChaCha8Rng, b: &Cube) -> Cube {
    let margins = [zero(), rat(1, 8), rat(1, 5), rat(1, 4)];
    Cube::new(
        b.axes()
            .iter()
            .map(|iv| {
                let l = margins.choose(rng).unwrap() * iv.len();
                let h = margins.choose(rng).unwrap() * iv.len();
                Interval::new(iv.lo() + l, iv.hi() - h).unwrap()
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_domain(rng: &mut ChaCha8Rng, n: usize, m: usize) -> NDomain {
    let cubes = guillotine(rng, n, m).iter().map(|b| sub_box(rng, b)).collect();
    NDomain::finite(n, cubes).unwrap()
}

/// Two unrelated random domains on `1..=m`.
pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (NDomain, NDomain) {
    (random_domain(rng, n, m), random_domain(rng, n, m))
}

/// A restricted request: the cubes outside `fixed` trade places in a random
/// permutation, and `fixed` is thinned until its complement is connected.
pub fn restricted_scenario(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (NDomain, NDomain, Vec<usize>) {
    assert!(m >= 3);
    let r = random_domain(rng, n, m);
    let cubes = r.cubes();
    let mut fixed: Vec<usize> = (1..=m).filter(|_| rng.gen_bool(0.4)).collect();
    fixed.truncate(m - 2);
    while !complement_connected(n, &fixed.iter().map(|&k| cubes[k - 1].clone()).collect::<Vec<_>>()) {
        let i = rng.gen_range(0..fixed.len());
        fixed.remove(i);
    }
    let free: Vec<usize> = (1..=m).filter(|k| !fixed.contains(k)).collect();
    let mut slots = free.clone();
    while slots == free {
        slots.shuffle(rng);
    }
    let mut target = cubes.clone();
    for (k, slot) in free.iter().zip(&slots) {
        target[k - 1] = cubes[slot - 1].clone();
    }
    (r, NDomain::finite(n, target).unwrap(), fixed)
}

/// A domain on `1..=m` and a copy in which only `k0` has moved, to a box
/// clear of every other cube.
pub fn single_move(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (NDomain, NDomain, usize) {
    let boxes = guillotine(rng, n, m + 1);
    let cubes: Vec<Cube> = boxes[..m].iter().map(|b| sub_box(rng, b)).collect();
    let k0 = rng.gen_range(1..=m);
    let mut moved = cubes.clone();
    moved[k0 - 1] = sub_box(rng, &boxes[m]);
    (NDomain::finite(n, cubes).unwrap(), NDomain::finite(n, moved).unwrap(), k0)
}

pub fn random_permutation(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=m).collect();
    p.shuffle(rng);
    p
}

fn tent(u: &Rational) -> Rational {
    let two = rat(2, 1);
    if u * &two <= one() {
        u * two
    } else {
        (one() - u) * two
    }
}

/// `a · ∏ tent` evaluated at `s` rescaled from `cube` onto `I^n`.
pub fn bump_in(cube: &Cube, a: &Rational, s: &[Rational]) -> Rational {
    cube.axes()
        .iter()
        .zip(s)
        .fold(a.clone(), |acc, (iv, x)| acc * tent(&((x - iv.lo()) / iv.len())))
}

/// Direct evaluation of `∏_R f_k` for bump loops `f_k = amplitude(k) · bump`
/// in one target coordinate: scan the cubes in index order.
pub fn concat_oracle(cubes: &[(usize, Cube)], amplitude: impl Fn(usize) -> Rational, s: &[Rational]) -> Rational {
    cubes
        .iter()
        .find(|(_, c)| c.axes().iter().zip(s).all(|(iv, x)| iv.lo() <= x && x <= iv.hi()))
        .map_or_else(zero, |(k, c)| bump_in(c, &amplitude(*k), s))
}

pub fn scalar(v: &Value) -> Rational {
    match v {
        Value::Exact(x) if x.len() == 1 => x[0].clone(),
        other => panic!("expected one exact coordinate, got {other:?}"),
    }
}

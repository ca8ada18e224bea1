//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use cube_shuffle::domains::{
    adversarial_dense_domain, adversarial_infinite_domain, interleaved_pair_domain, projections_pairwise_disjoint,
    shrink_to_interior, standard_domain, standard_interval, validate, IndexSet, NDomain,
};
use cube_shuffle::geometry::{center_index, complement_connected, interiors_disjoint, subdivide, Cube, Interval};
use cube_shuffle::loops::{lattice, null_certificate, KSequence, LoopFamily, SequenceSpec};
use cube_shuffle::operad::{act_nested, act_on_loops, compose, symmetric_action, OperadElement};
use cube_shuffle::rational::{half, one, rat, zero};
use cube_shuffle::schedule::{eval_homotopy, eval_homotopy_many, CubeSchedule, VerificationReport};
use cube_shuffle::shuffle::{
    continuity_certificate, double_product_plan, eh_shuffle, finite_shuffle, gluing_blocks, gluing_remainder,
    infinite_to_standard, permutation_plan, shrink_schedule, shuffle, slab_domain, two_cycle_swap, BlockKind,
    StepKind,
};
use cube_shuffle::Rational;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(what: &str, rep: &VerificationReport) -> Result<(), String> {
    ensure(rep.pass, || format!("{what}: {:?}", rep.failures.first()))
}

fn harmonic() -> SequenceSpec {
    SequenceSpec::new(LoopFamily::BumpHarmonic, one(), 1)
}

fn sizes(i: usize, rng: &mut rand_chacha::ChaCha8Rng) -> (usize, usize) {
    use rand::Rng;
    if i % 2 == 0 {
        (2, rng.gen_range(2..=12))
    } else {
        (3, rng.gen_range(2..=6))
    }
}

fn lemma_suite() -> Check {
    use rand::Rng;
    let start = Instant::now();
    let mut rng = rng(1);
    let mut plans = 0;
    for i in 0..200 {
        let (n, m) = sizes(i, &mut rng);
        let (r, s) = random_pair(&mut rng, n, m);
        let shrink = shrink_schedule(&r, &shrink_to_interior(&r)).map_err(|e| e.to_string())?;
        passed(&format!("scenario {i}: shrink"), &shrink.verify(0))?;
        let phi = random_permutation(&mut rng, m);
        let eh = eh_shuffle(&r, &phi).map_err(|e| format!("scenario {i}: {e}"))?;
        passed(&format!("scenario {i}: eh {phi:?}"), &eh.verify(0))?;
        let fs = finite_shuffle(&r, &s, &[]).map_err(|e| format!("scenario {i}: {e}"))?;
        passed(&format!("scenario {i}: finite"), &fs.verify(0))?;

        let (a, b, k0) = single_move(&mut rng, n, m);
        let cubes = a.cubes();
        let mut fixed: Vec<usize> = (1..=m).filter(|&k| k != k0 && rng.gen_bool(0.3)).collect();
        while !complement_connected(n, &fixed.iter().map(|&k| cubes[k - 1].clone()).collect::<Vec<_>>()) {
            fixed.pop();
        }
        let tc = two_cycle_swap(&a, &b, k0, &fixed).map_err(|e| format!("scenario {i}: two-cycle {e}"))?;
        passed(&format!("scenario {i}: two-cycle"), &tc.verify(0))?;
        plans += 4;

        if m >= 3 {
            let (r, s, fixed) = restricted_scenario(&mut rng, n, m);
            let rs = finite_shuffle(&r, &s, &fixed).map_err(|e| format!("scenario {i}: restricted {e}"))?;
            passed(&format!("scenario {i}: restricted"), &rs.verify(0))?;
            plans += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!("{plans} plans from 200 scenarios verified in {elapsed:.1?}"))
}

fn evaluation_oracle() -> Check {
    let mut rng = rng(2);
    let mut points = 0;
    for i in 0..50 {
        let (n, m) = if i < 40 { (2, 2 + i % 9) } else { (3, 2 + i % 4) };
        let (r, s) = random_pair(&mut rng, n, m);
        let plan = finite_shuffle(&r, &s, &[]).map_err(|e| e.to_string())?;
        let seq = harmonic().build(n, r.indices()).map_err(|e| e.to_string())?;
        let grid = lattice(n, 16);
        for (t, dom) in [(zero(), &r), (one(), &s)] {
            let entries: Vec<(usize, Cube)> = (1..=m).map(|k| (k, dom.cube(k))).collect();
            for p in &grid {
                let got = scalar(&eval_homotopy(plan.schedule(), &seq, p, &t, 64).value);
                let want = concat_oracle(&entries, |k| rat(1, k as i64), p);
                ensure(got == want, || format!("scenario {i} t={t} s={p:?}: {got} != {want}"))?;
                points += 1;
            }
        }
    }
    Ok(format!("{points} exact grid comparisons over 50 scenarios"))
}

fn restricted_constancy() -> Check {
    let mut rng = rng(3);
    let mut fixed_total = 0;
    let mut segments = 0;
    for i in 0..50 {
        let (n, m) = if i % 5 == 4 { (3, 3 + i % 3) } else { (2, 3 + i % 6) };
        let (r, s, fixed) = restricted_scenario(&mut rng, n, m);
        let obstacles: Vec<Cube> = fixed.iter().map(|&k| r.cube(k)).collect();
        ensure(complement_connected(n, &obstacles), || format!("scenario {i}: disconnected"))?;
        let plan = finite_shuffle(&r, &s, &fixed).map_err(|e| format!("scenario {i}: {e}"))?;
        passed(&format!("scenario {i}"), &plan.verify(0))?;
        for (k, path) in plan.schedule().paths_upto(0) {
            if fixed.contains(&k) {
                ensure(path.keyframes().iter().all(|(_, c)| c == &r.cube(k)), || {
                    format!("scenario {i}: fixed {k} moves")
                })?;
                fixed_total += 1;
                continue;
            }
            for (t, c) in path.keyframes() {
                for f in &obstacles {
                    ensure(interiors_disjoint(c, f).unwrap(), || {
                        format!("scenario {i}: index {k} meets a fixed cube at t={t}")
                    })?;
                }
                segments += 1;
            }
        }
        for step in plan.provenance() {
            if let StepKind::TwoCycle { corridor, .. } = &step.kind {
                for cell in corridor {
                    ensure(obstacles.iter().all(|f| interiors_disjoint(cell, f).unwrap()), || {
                        format!("scenario {i}: corridor cell meets a fixed cube")
                    })?;
                }
            }
        }
    }
    Ok(format!("{fixed_total} fixed paths constant, {segments} keyframes clear of F"))
}

fn infinite_gluing() -> Check {
    let fixtures = [
        ("standard", standard_domain(2).unwrap()),
        ("interleaved", interleaved_pair_domain(2).unwrap()),
        ("adversarial", adversarial_infinite_domain(3).unwrap()),
    ];
    let mut c_measured = 0;
    for (name, d) in &fixtures {
        let plan = infinite_to_standard(d).map_err(|e| e.to_string())?;
        passed(name, &plan.verify(50))?;
        let lens: Vec<usize> = (1..=50).map(|k| plan.schedule().path(k).unwrap().len()).collect();
        let c = (1..=10).map(|k| lens[k - 1].div_ceil(k + 1)).max().unwrap();
        for k in 1..=50 {
            ensure(lens[k - 1] <= c * k + c, || format!("{name}: path {k} has {} keyframes", lens[k - 1]))?;
        }
        c_measured = c_measured.max(c);
    }
    for n in [2, 3] {
        let blocks = gluing_blocks(50);
        for b in &blocks {
            let m = b.stage as i64;
            let (x, time) = match b.kind {
                BlockKind::Active => (Interval::new(rat(m - 1, m), one()), Interval::new(rat(1, m + 1), rat(1, m))),
                BlockKind::Finished => (Interval::new(rat(m - 1, m), rat(m, m + 1)), Interval::new(zero(), rat(1, m + 1))),
            };
            ensure(b.x == x.unwrap() && b.time == time.unwrap(), || format!("block {b:?}"))?;
        }
        let mut cubes: Vec<Cube> = blocks.iter().map(|b| b.cube(n)).collect();
        cubes.push(gluing_remainder(n, 50));
        let total: Rational = cubes.iter().map(Cube::volume).sum();
        ensure(total == one(), || format!("n={n}: volume {total}"))?;
        for (i, a) in cubes.iter().enumerate() {
            for b in &cubes[i + 1..] {
                ensure(!a.interiors_overlap(b), || format!("n={n}: {a:?} meets {b:?}"))?;
            }
        }
    }
    Ok(format!("3 fixtures verify to 50, keyframes <= {c_measured}k + {c_measured}, 100 blocks + remainder tile"))
}

fn continuity() -> Check {
    let d = standard_domain(2).unwrap();
    let plan = infinite_to_standard(&d).map_err(|e| e.to_string())?;
    let seq = harmonic().build(2, &IndexSet::naturals()).unwrap();
    let mut thresholds = vec![];
    for e in [10, 100, 1000] {
        let eps = rat(1, e);
        let rep = continuity_certificate(&plan, &seq, &eps, 50).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("eps=1/{e}: {:?}", rep.failures))?;
        let m = rep.threshold;
        ensure(m == null_certificate(&seq, &eps).unwrap(), || "threshold differs from certificate".into())?;
        ensure(seq.bound(m - 1) >= eps, || format!("eps=1/{e}: threshold {m} not tight"))?;
        let centre = vec![half(), half()];
        for k in m..m + 50 {
            ensure(seq.bound(k) < eps, || format!("bound of {k}"))?;
            let peak = scalar(&seq.loop_at(k).eval(&centre));
            ensure(peak < eps, || format!("loop {k} peaks at {peak}"))?;
        }
        thresholds.push(m);
    }
    // Late in the homotopy only indices past the threshold are still moving.
    let m = thresholds[0];
    let t = rat(19, 20);
    for ev in eval_homotopy_many(plan.schedule(), &seq, &lattice(2, 40), &t, 64) {
        if ev.index.is_some_and(|k| k >= m) {
            ensure(ev.value.norm() < 0.1, || format!("value {:?} at index {:?}", ev.value, ev.index))?;
        }
    }
    Ok(format!("thresholds {thresholds:?}, every later fragment below epsilon"))
}

fn subdivision_facts() -> Check {
    ensure(center_index(2) == 5 && center_index(3) == 14, || "center index".into())?;
    let mut rng = rng(6);
    let mut checked = 0;
    for n in [2, 3] {
        for _ in 0..20 {
            let b = guillotine(&mut rng, n, 3).swap_remove(0);
            let g = sub_box(&mut rng, &b).scaled_about_center(&half());
            let sub = subdivide(&g).map_err(|e| e.to_string())?;
            let cells = sub.cells();
            ensure(cells.len() == 3usize.pow(n as u32), || "cell count".into())?;
            ensure(sub.cell(center_index(n)) == &g, || "center cell is not the generator".into())?;
            let total: Rational = cells.iter().map(Cube::volume).sum();
            ensure(total == one(), || format!("cells cover volume {total}"))?;
            for (i, a) in cells.iter().enumerate() {
                for b in &cells[i + 1..] {
                    ensure(!a.interiors_overlap(b), || "cells overlap".into())?;
                }
            }
            checked += 1;
        }
    }
    Ok(format!("center indices 5 and 14, {checked} subdivisions tile the unit cube"))
}

fn element(rng: &mut rand_chacha::ChaCha8Rng, m: usize) -> OperadElement {
    OperadElement::new(random_domain(rng, 2, m)).unwrap()
}

fn same(a: &OperadElement, b: &OperadElement) -> bool {
    a.domain().cubes() == b.domain().cubes()
}

fn operad_axioms() -> Check {
    use rand::Rng;
    let mut rng = rng(7);
    let unit = OperadElement::unit(2);
    for i in 0..100 {
        let m = rng.gen_range(1..=3);
        let a = element(&mut rng, m);
        let err = |e: cube_shuffle::Error| format!("instance {i}: {e}");
        ensure(same(&compose(&unit, std::slice::from_ref(&a)).map_err(err)?, &a), || format!("{i}: left unit"))?;
        ensure(same(&compose(&a, &vec![unit.clone(); m]).map_err(err)?, &a), || format!("{i}: right unit"))?;

        let arities: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
        let bs: Vec<OperadElement> = arities.iter().map(|&k| element(&mut rng, k)).collect();
        let total: usize = arities.iter().sum();
        let cs: Vec<OperadElement> = (0..total)
            .map(|_| {
                let k = rng.gen_range(1..=2);
                element(&mut rng, k)
            })
            .collect();
        let lhs = compose(&compose(&a, &bs).map_err(err)?, &cs).map_err(err)?;
        let mut offset = 0;
        let mut grouped = vec![];
        for (b, &k) in bs.iter().zip(&arities) {
            grouped.push(compose(b, &cs[offset..offset + k]).map_err(err)?);
            offset += k;
        }
        let rhs = compose(&a, &grouped).map_err(err)?;
        ensure(same(&lhs, &rhs), || format!("{i}: associativity"))?;

        // γ(a·σ; b_σ(1), …, b_σ(m)) = γ(a; b)·σ⟨arities⟩
        let sigma = random_permutation(&mut rng, m);
        let permuted_bs: Vec<OperadElement> = sigma.iter().map(|&j| bs[j - 1].clone()).collect();
        let left = compose(&symmetric_action(&a, &sigma).map_err(err)?, &permuted_bs).map_err(err)?;
        let starts: Vec<usize> = arities.iter().scan(0, |acc, &k| Some(std::mem::replace(acc, *acc + k))).collect();
        let block: Vec<usize> = sigma
            .iter()
            .flat_map(|&j| (1..=arities[j - 1]).map(|p| starts[j - 1] + p).collect::<Vec<_>>())
            .collect();
        let right = symmetric_action(&compose(&a, &bs).map_err(err)?, &block).map_err(err)?;
        ensure(same(&left, &right), || format!("{i}: equivariance {sigma:?}"))?;
    }

    let std = OperadElement::new(standard_domain(2).unwrap()).unwrap();
    let seq = harmonic().build(2, &IndexSet::naturals()).unwrap();
    let grid = lattice(2, 16);
    for i in 0..10 {
        let m = 2 + i % 2;
        let a = element(&mut rng, m);
        let mut inners: Vec<OperadElement> = (0..m - 1).map(|_| element(&mut rng, 1 + i % 3)).collect();
        inners.push(std.clone());
        let c = compose(&a, &inners).map_err(|e| e.to_string())?;
        ensure(c.domain().len().is_none() && validate(c.domain(), 64).valid, || format!("ω {i}: invalid"))?;
        OperadElement::new(c.domain().clone()).map_err(|e| e.to_string())?;
        let lhs = act_on_loops(&c, &seq).map_err(|e| e.to_string())?;
        let rhs = act_nested(&a, &inners, &seq).map_err(|e| e.to_string())?;
        for p in &grid {
            ensure(lhs.eval(p) == rhs.eval(p), || format!("ω {i}: action differs at {p:?}"))?;
        }
    }
    Ok("100 instances: unit, associativity, equivariance; 10 ω compositions".into())
}

fn slab(k: usize) -> Cube {
    Cube::slab(2, standard_interval(k))
}

fn halves_of(c: &Cube, x: (Rational, Rational)) -> Cube {
    c.with_axis(0, Interval::new(x.0, x.1).unwrap())
}

fn corollaries() -> Check {
    let grid = lattice(2, 16);
    let seq = harmonic().build(2, &IndexSet::naturals()).unwrap();
    let slabs = 64;
    for perm in [vec![2, 1], vec![3, 1, 2], vec![2, 3, 4, 1], vec![1, 5, 3, 4, 2]] {
        let plan = permutation_plan(2, &perm).map_err(|e| e.to_string())?;
        passed(&format!("{perm:?}"), &plan.verify(32))?;
        let phi = |k: usize| perm.get(k - 1).copied().unwrap_or(k);
        let start: Vec<(usize, Cube)> = (1..=slabs).map(|k| (k, slab(k))).collect();
        // S_k = slab φ(k): slab j carries f_{φ⁻¹(j)}.
        let end: Vec<(usize, Cube)> = (1..=slabs).map(|k| (k, slab(phi(k)))).collect();
        for (t, entries) in [(zero(), &start), (one(), &end)] {
            for p in &grid {
                let got = scalar(&eval_homotopy(plan.schedule(), &seq, p, &t, 64).value);
                let want = concat_oracle(entries, |k| rat(1, k as i64), p);
                ensure(got == want, || format!("{perm:?} t={t} s={p:?}"))?;
            }
        }
    }

    let plan = double_product_plan(2).map_err(|e| e.to_string())?;
    passed("double product", &plan.verify(32))?;
    let nat = IndexSet::naturals();
    let f = harmonic().build(2, &nat).unwrap();
    let g = SequenceSpec::new(LoopFamily::BumpGeometric, one(), 1).build(2, &nat).unwrap();
    let fg = KSequence::interleave(&f, &g).map_err(|e| e.to_string())?;
    let amp = |i: usize| {
        if i % 2 == 1 {
            rat(1, i.div_ceil(2) as i64)
        } else {
            rat(1, 1i64 << (i / 2))
        }
    };
    let mut products = vec![];
    let mut split = vec![];
    for k in 1..=slabs {
        let iv = standard_interval(k);
        let (lo, hi, mid) = (iv.lo().clone(), iv.hi().clone(), iv.midpoint());
        // f_k·g_k in slab k
        products.push((2 * k - 1, halves_of(&slab(k), (lo.clone(), mid.clone()))));
        products.push((2 * k, halves_of(&slab(k), (mid, hi.clone()))));
        // (∏ f)·(∏ g): each product squeezed into one half
        split.push((2 * k - 1, halves_of(&slab(k), (&lo * half(), &hi * half()))));
        split.push((2 * k, halves_of(&slab(k), (&lo * half() + half(), &hi * half() + half()))));
    }
    for (t, entries) in [(zero(), &products), (one(), &split)] {
        for p in &grid {
            let got = scalar(&eval_homotopy(plan.schedule(), &fg, p, &t, 64).value);
            let want = concat_oracle(entries, amp, p);
            ensure(got == want, || format!("double product t={t} s={p:?}: {got} != {want}"))?;
        }
    }
    Ok("4 permutation plans and the double product verify and match both identities".into())
}

fn adversarial() -> Check {
    let adv = adversarial_dense_domain(3).map_err(|e| e.to_string())?;
    let cubes = adv.cubes();
    for axis in 0..2 {
        let clash = cubes.iter().enumerate().any(|(i, a)| {
            cubes[i + 1..].iter().any(|b| a.axis(axis).interiors_overlap(b.axis(axis)))
        });
        ensure(clash, || format!("axis {axis} projections are disjoint"))?;
        ensure(!projections_pairwise_disjoint(&adv, axis), || "library disagrees".into())?;
    }
    let m = cubes.len();
    let id: Vec<usize> = (1..=m).collect();
    let target = slab_domain(&adv, &id).map_err(|e| e.to_string())?;
    let plan = finite_shuffle(&adv, &target, &[]).map_err(|e| e.to_string())?;
    passed("finite shuffle", &plan.verify(0))?;
    let direct = eh_shuffle(&adv, &id).map_err(|e| e.to_string())?;
    passed("eh shuffle", &direct.verify(0))?;
    let back: NDomain = plan.schedule().target().clone();
    ensure(validate(&back, 0).valid, || "slab form invalid".into())?;
    let via = shuffle(&adv, &target, &[]).map_err(|e| e.to_string())?;
    let end: CubeSchedule = via.into_schedule();
    ensure(end.target().cubes() == target.cubes(), || "dispatch target".into())?;
    Ok(format!("{m} cubes, both axes overlap, slab shuffle verifies"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("lemma suite", lemma_suite),
        ("endpoint evaluation oracle", evaluation_oracle),
        ("restricted constancy", restricted_constancy),
        ("infinite gluing", infinite_gluing),
        ("continuity certificate", continuity),
        ("subdivision facts", subdivision_facts),
        ("operad axioms", operad_axioms),
        ("corollary plans", corollaries),
        ("adversarial sanity", adversarial),
    ];
    println!("acceptance (seed {})", seed());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

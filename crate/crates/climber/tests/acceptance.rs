//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them). Random inputs use
//! fixed seeds so every run checks the same instances.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use climber::cover::{
    exact_compatible_cover, greedy_compatible_cover, validate_cover_solution, CoverInstance,
};
use climber::dist::{discrete_frechet, frechet_value, hausdorff, sample_points};
use climber::free_space::{default_inflation, Axis, AxisSegment, FreeSpaceDiagram};
use climber::gadget::{assignment_to_solution, build_reduction, weakly_simple, RectilinearDrawing};
use climber::geom::point_to_subcurve_max_distance;
use climber::station::{
    approx_min_k, greedy_axis_cover, make_compatible, refine_split, verify_solution_with,
    StationIndexing, StationSolution,
};
use climber::{Error, ParamInterval, PolyChain, Point2, TOL};

fn conclude(num: u32, label: &str, problems: &[String], detail: String) {
    if problems.is_empty() {
        let suffix = if detail.is_empty() {
            String::new()
        } else {
            format!(" [{detail}]")
        };
        println!("criterion {num:02} ({label}): pass{suffix}");
    } else {
        println!("criterion {num:02} ({label}): FAIL");
        panic!(
            "criterion {num:02} ({label}) violated:\n{}",
            problems.join("\n")
        );
    }
}

/// Random chain with at most `max_edges` edges and coordinates in
/// `[lo, hi]`; consecutive vertices are kept well apart.
fn random_chain(rng: &mut ChaCha8Rng, max_edges: usize, lo: f64, hi: f64) -> PolyChain {
    let edges = rng.random_range(1..=max_edges);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(edges + 1);
    while pts.len() < edges + 1 {
        let cand = (rng.random_range(lo..hi), rng.random_range(lo..hi));
        if let Some(&(px, py)) = pts.last() {
            if ((cand.0 - px).powi(2) + (cand.1 - py).powi(2)).sqrt() < 1e-3 {
                continue;
            }
        }
        pts.push(cand);
    }
    PolyChain::from_coords(&pts).expect("generated chain is valid")
}

fn random_pair(rng: &mut ChaCha8Rng) -> (PolyChain, PolyChain) {
    (
        random_chain(rng, 6, 0.0, 10.0),
        random_chain(rng, 6, 0.0, 10.0),
    )
}

fn joint_diameter(p: &PolyChain, q: &PolyChain) -> f64 {
    let pts: Vec<Point2> = p.vertices().iter().chain(q.vertices()).copied().collect();
    let mut far = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            far = far.max(pts[i].dist(pts[j]));
        }
    }
    far
}

fn max_step(pts: &[Point2]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).fold(0.0, f64::max)
}

#[test]
fn criterion_01_continuous_value_sits_in_the_discrete_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let started = Instant::now();
    let mut problems = Vec::new();
    for case in 0..200 {
        let (p, q) = random_pair(&mut rng);
        let value = frechet_value(&p, &q, 1e-9).value;
        let rp = sample_points(&p, 1000);
        let rq = sample_points(&q, 1000);
        let disc = discrete_frechet(&rp, &rq);
        let h = max_step(&rp).max(max_step(&rq));
        if value < disc - h - 1e-6 || value > disc + h + 1e-6 {
            problems.push(format!(
                "case {case}: value {value} outside [{} - {h}, {} + {h}]",
                disc, disc
            ));
        }
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        problems.push(format!("took {elapsed:?}, budget is 60 s"));
    }
    conclude(
        1,
        "continuous value sits in the discrete sandwich",
        &problems,
        format!("200 pairs in {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_hausdorff_below_frechet_and_certificates_reverify() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut problems = Vec::new();
    for case in 0..200 {
        let (p, q) = random_pair(&mut rng);
        let tol = 1e-6;
        let fr = frechet_value(&p, &q, tol).value;
        let hd = hausdorff(&p, &q);
        if hd.value > fr + 2.0 * tol {
            problems.push(format!(
                "case {case}: hausdorff {} exceeds frechet {fr} beyond slack",
                hd.value
            ));
        }
        let allow = 1e-9 * joint_diameter(&p, &q);
        if !hd.verify_attainment(&p, &q, allow) {
            problems.push(format!("case {case}: hausdorff certificate failed re-check"));
        }
    }
    conclude(
        2,
        "hausdorff below frechet; certificates re-verify",
        &problems,
        "200 pairs".into(),
    );
}

/// Minimum number of the given spans covering [0,1], by subset
/// enumeration; None when no subset covers.
fn brute_min_cover(spans: &[ParamInterval]) -> Option<usize> {
    let n = spans.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| spans[a].lo.total_cmp(&spans[b].lo));
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let mut frontier = 0.0f64;
        for &i in &order {
            if mask & (1 << i) == 0 {
                continue;
            }
            if spans[i].lo > frontier + TOL {
                break;
            }
            frontier = frontier.max(spans[i].hi);
        }
        if frontier >= 1.0 - TOL {
            best = Some(size);
        }
    }
    best
}

#[test]
fn criterion_03_per_axis_greedy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut problems = Vec::new();
    let mut feasible = 0usize;
    let mut attempts = 0usize;
    while feasible < 200 && attempts < 2000 {
        attempts += 1;
        // A covering chain first (guaranteed feasible), then clutter.
        let mut spans: Vec<ParamInterval> = Vec::new();
        let mut frontier = 0.0f64;
        while frontier < 1.0 && spans.len() < 8 {
            let lo = (frontier - rng.random_range(0.0..0.15)).max(0.0);
            let hi = (frontier + rng.random_range(0.1..0.5)).min(1.0);
            spans.push(ParamInterval { lo, hi });
            frontier = hi;
        }
        if frontier < 1.0 {
            continue;
        }
        let extras = rng.random_range(0..=12 - spans.len().min(12));
        for _ in 0..extras.min(12 - spans.len()) {
            let lo: f64 = rng.random_range(0.0..0.9);
            let hi = (lo + rng.random_range(0.02..0.5)).min(1.0f64);
            spans.push(ParamInterval { lo, hi });
        }
        let mut segments: Vec<AxisSegment> = spans
            .iter()
            .map(|s| AxisSegment::horizontal(rng.random_range(0.0..1.0), s.lo, s.hi))
            .collect();
        let h_count = segments.len();
        segments.push(AxisSegment::vertical(0.0, 0.0, 1.0));
        let inst = CoverInstance::new(segments).expect("instance in the unit box");
        let sol = match greedy_compatible_cover(&inst) {
            Ok(sol) => sol,
            Err(e) => {
                problems.push(format!("attempt {attempts}: greedy failed: {e}"));
                continue;
            }
        };
        let mut used: Vec<usize> = sol
            .chosen
            .iter()
            .map(|&(i, _)| i)
            .filter(|&i| i < h_count)
            .collect();
        used.sort_unstable();
        used.dedup();
        let brute = brute_min_cover(&spans);
        feasible += 1;
        if brute != Some(used.len()) {
            problems.push(format!(
                "attempt {attempts}: greedy picked {} segments, brute force found {:?}",
                used.len(),
                brute
            ));
        }
    }
    if feasible < 200 {
        problems.push(format!("only {feasible} feasible sets generated"));
    }
    conclude(
        3,
        "per-axis greedy is exactly optimal",
        &problems,
        format!("{feasible} segment sets"),
    );
}

/// Random tiling of [0,1] into at most `max_pieces` spans at random fixed
/// coordinates, as one axis of a compatibility-splitting input.
fn random_tiling(rng: &mut ChaCha8Rng, max_pieces: usize, horizontal: bool) -> Vec<AxisSegment> {
    let pieces = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<f64> = (0..pieces - 1)
        .map(|_| rng.random_range(0.05..0.95))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut segs = Vec::new();
    let mut lo = 0.0;
    for &c in cuts.iter().chain(std::iter::once(&1.0)) {
        let fixed = rng.random_range(0.0..1.0);
        segs.push(if horizontal {
            AxisSegment::horizontal(fixed, lo, c)
        } else {
            AxisSegment::vertical(fixed, lo, c)
        });
        lo = c;
    }
    segs
}

#[test]
fn criterion_04_splitting_bound_and_witness_acceptance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut problems = Vec::new();
    for case in 0..500 {
        let xs = random_tiling(&mut rng, 6, true);
        let ys = random_tiling(&mut rng, 6, false);
        let merged = make_compatible(&xs, &ys);
        if merged.len() > 2 * (xs.len() + ys.len()) {
            problems.push(format!(
                "case {case}: split {}+{} into {}, beyond twice the sum",
                xs.len(),
                ys.len(),
                merged.len()
            ));
        }
    }
    for case in 0..100 {
        let (p, q) = random_pair(&mut rng);
        let hd = hausdorff(&p, &q).value;
        let eps = hd + rng.random_range(0.05..1.0) * joint_diameter(&p, &q);
        let rep = match approx_min_k(&p, &q, eps) {
            Ok(rep) => rep,
            Err(e) => {
                problems.push(format!("pair {case}: approximation failed at eps {eps}: {e}"));
                continue;
            }
        };
        if rep.upper_bound > 2 * rep.lower_bound {
            problems.push(format!(
                "pair {case}: upper {} exceeds twice lower {}",
                rep.upper_bound, rep.lower_bound
            ));
        }
        if rep.solution.k() != rep.upper_bound {
            problems.push(format!(
                "pair {case}: witness has {} stations, upper bound says {}",
                rep.solution.k(),
                rep.upper_bound
            ));
        }
        let check =
            verify_solution_with(&p, &q, eps, &rep.solution, StationIndexing::IncludeZero);
        if !check.accepted {
            problems.push(format!("pair {case}: witness rejected at its own eps"));
        }
    }
    conclude(
        4,
        "compatibility splitting bound; witness accepted",
        &problems,
        "500 tilings, 100 end-to-end pairs".into(),
    );
}

/// Random small cover instance, feasible on both axes by construction.
fn random_cover_instance(rng: &mut ChaCha8Rng) -> CoverInstance {
    let mut segments = Vec::new();
    for horizontal in [true, false] {
        let mut frontier = 0.0f64;
        while frontier < 1.0 && segments.len() < 7 {
            let lo = (frontier - rng.random_range(0.0..0.2)).max(0.0);
            let hi = if 1.0 - frontier < 0.35 {
                1.0
            } else {
                (frontier + rng.random_range(0.3..0.7)).min(1.0)
            };
            let fixed = rng.random_range(0.0..1.0);
            segments.push(if horizontal {
                AxisSegment::horizontal(fixed, lo, hi)
            } else {
                AxisSegment::vertical(fixed, lo, hi)
            });
            frontier = hi;
        }
    }
    if segments.len() < 7 {
        let lo: f64 = rng.random_range(0.0..0.7);
        let hi = (lo + rng.random_range(0.1..0.4)).min(1.0f64);
        segments.push(AxisSegment::horizontal(rng.random_range(0.0..1.0), lo, hi));
    }
    CoverInstance::new(segments).expect("instance in the unit box")
}

#[test]
fn criterion_05_greedy_within_twice_the_grid_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems = Vec::new();
    let mut done = 0usize;
    let mut worst = 1.0f64;
    let mut attempts = 0usize;
    while done < 100 && attempts < 400 {
        attempts += 1;
        let inst = random_cover_instance(&mut rng);
        let exact = match exact_compatible_cover(&inst, 5_000_000) {
            Ok(sol) => sol,
            Err(Error::BudgetExhausted(_)) => continue,
            Err(e) => {
                problems.push(format!("attempt {attempts}: exact solver failed: {e}"));
                continue;
            }
        };
        let greedy = match greedy_compatible_cover(&inst) {
            Ok(sol) => sol,
            Err(e) => {
                problems.push(format!("attempt {attempts}: greedy failed: {e}"));
                continue;
            }
        };
        for (name, sol) in [("exact", &exact), ("greedy", &greedy)] {
            if let Err(e) = validate_cover_solution(&inst, sol) {
                problems.push(format!("attempt {attempts}: {name} output invalid: {e}"));
            }
        }
        let ratio = greedy.size as f64 / exact.size as f64;
        worst = worst.max(ratio);
        if ratio > 2.0 + 1e-12 {
            problems.push(format!(
                "attempt {attempts}: greedy {} vs grid optimum {} (ratio {ratio})",
                greedy.size, exact.size
            ));
        }
        done += 1;
    }
    if done < 100 {
        problems.push(format!("only {done} instances completed exactly"));
    }
    conclude(
        5,
        "greedy within twice the grid optimum",
        &problems,
        format!("{done} instances, worst ratio {worst:.3}"),
    );
}

#[test]
fn criterion_06_slab_fixture() {
    let mut problems = Vec::new();
    let p = PolyChain::from_coords(&[(0.0, 0.0), (4.0, 0.0)]).unwrap();
    let q = PolyChain::from_coords(&[(0.0, 1.0), (4.0, 1.0)]).unwrap();
    let eps = std::f64::consts::SQRT_2;
    let d = FreeSpaceDiagram::new(&p, &q, eps, default_inflation(&p, &q)).unwrap();
    match greedy_axis_cover(&d, Axis::X) {
        Ok(segs) if segs.len() == 2 => {}
        Ok(segs) => problems.push(format!("x cover has {} segments, want 2", segs.len())),
        Err(e) => problems.push(format!("x cover failed: {e}")),
    }
    match greedy_axis_cover(&d, Axis::Y) {
        Ok(segs) if segs.len() == 2 => {}
        Ok(segs) => problems.push(format!("y cover has {} segments, want 2", segs.len())),
        Err(e) => problems.push(format!("y cover failed: {e}")),
    }
    match approx_min_k(&p, &q, 0.99) {
        Err(Error::Infeasible { .. }) => {}
        Err(e) => problems.push(format!("eps 0.99 failed with the wrong error: {e}")),
        Ok(rep) => problems.push(format!(
            "eps 0.99 unexpectedly feasible with bounds {}..{}",
            rep.lower_bound, rep.upper_bound
        )),
    }
    let fr = frechet_value(&p, &q, 1e-9).value;
    let hd = hausdorff(&p, &q).value;
    if (fr - 1.0).abs() > 1e-6 {
        problems.push(format!("frechet value {fr}, want 1"));
    }
    if (hd - 1.0).abs() > 1e-6 {
        problems.push(format!("hausdorff value {hd}, want 1"));
    }
    conclude(6, "slab fixture", &problems, String::new());
}

/// Best-effort candidate: random subdivisions with each pitch assigned its
/// best station, the hardest candidate to reject.
fn nearest_assignment_candidate(
    rng: &mut ChaCha8Rng,
    p: &PolyChain,
    q: &PolyChain,
) -> StationSolution {
    let subdivision = |rng: &mut ChaCha8Rng| {
        let mut cuts = vec![0.0, 1.0];
        for _ in 0..rng.random_range(1..=4) {
            cuts.push(rng.random_range(0.05..0.95));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        cuts
    };
    let a = subdivision(rng);
    let b = subdivision(rng);
    let assign = |curve: &PolyChain, cuts: &[f64], stations: &PolyChain, marks: &[f64]| {
        (0..cuts.len() - 1)
            .map(|i| {
                let iv = ParamInterval {
                    lo: cuts[i],
                    hi: cuts[i + 1],
                };
                (1..marks.len())
                    .min_by(|&x, &y| {
                        let dx = point_to_subcurve_max_distance(curve, iv, stations.eval(marks[x]));
                        let dy = point_to_subcurve_max_distance(curve, iv, stations.eval(marks[y]));
                        dx.total_cmp(&dy)
                    })
                    .unwrap()
            })
            .collect::<Vec<usize>>()
    };
    let p_assign = assign(p, &a, q, &b);
    let q_assign = assign(q, &b, p, &a);
    StationSolution {
        a,
        b,
        p_assign,
        q_assign,
    }
}

#[test]
fn criterion_07_threshold_search_brackets_hausdorff() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut problems = Vec::new();
    for case in 0..50 {
        let (p, q) = random_pair(&mut rng);
        let hd = hausdorff(&p, &q).value;
        let diam = joint_diameter(&p, &q);
        let eps_above = hd + 1e-3 * diam;
        let rep = match approx_min_k(&p, &q, eps_above) {
            Ok(rep) => rep,
            Err(e) => {
                problems.push(format!("case {case}: infeasible just above hausdorff: {e}"));
                continue;
            }
        };
        let k = rep.upper_bound;
        let found = climber::station::heuristic_min_eps(&p, &q, k, 5e-4 * diam);
        if found > hd + 2e-3 * diam {
            problems.push(format!(
                "case {case}: search found {found}, budget was {}",
                hd + 2e-3 * diam
            ));
        }
        let eps_below = hd - 1e-3 * diam;
        if eps_below <= TOL {
            continue;
        }
        let mut candidates = vec![rep.solution.clone()];
        for _ in 0..3 {
            candidates.push(nearest_assignment_candidate(&mut rng, &p, &q));
        }
        for (ci, cand) in candidates.iter().enumerate() {
            let check =
                verify_solution_with(&p, &q, eps_below, cand, StationIndexing::IncludeZero);
            if check.accepted {
                problems.push(format!(
                    "case {case}: candidate {ci} accepted below hausdorff ({eps_below} < {hd})"
                ));
            }
        }
    }
    conclude(
        7,
        "threshold search brackets hausdorff",
        &problems,
        "50 pairs".into(),
    );
}

#[test]
fn criterion_08_greedy_cell_visit_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = Vec::new();
    for case in 0..300 {
        let (p, q) = random_pair(&mut rng);
        let hd = hausdorff(&p, &q).value;
        let eps = hd * (1.0 + rng.random_range(0.0..1.0)) + 0.01 * joint_diameter(&p, &q);
        let d = FreeSpaceDiagram::new(&p, &q, eps, default_inflation(&p, &q)).unwrap();
        d.reset_query_cell_visits();
        let segs = match greedy_axis_cover(&d, Axis::X) {
            Ok(segs) => segs,
            Err(e) => {
                problems.push(format!("case {case}: x cover failed above hausdorff: {e}"));
                continue;
            }
        };
        let visits = d.query_cell_visits();
        let budget = ((segs.len() + d.m()) * d.n()) as u64;
        if visits > budget {
            problems.push(format!(
                "case {case}: {visits} cell visits, budget ({} + {}) * {} = {budget}",
                segs.len(),
                d.m(),
                d.n()
            ));
        }
    }
    conclude(
        8,
        "greedy cell-visit budget",
        &problems,
        "300 diagrams".into(),
    );
}

#[test]
fn criterion_09_reduction_fixture_round_trip() {
    let started = Instant::now();
    let mut problems = Vec::new();
    let drawing = RectilinearDrawing::fig2();
    let inst = build_reduction(&drawing).expect("fixture builds");
    if !weakly_simple(&inst.p) {
        problems.push("first chain has a proper self-crossing".into());
    }
    if !weakly_simple(&inst.q) {
        problems.push("second chain has a proper self-crossing".into());
    }
    let constant = inst.k - inst.corridor_pitch_count();
    if constant != 76 {
        problems.push(format!("constant budget part {constant}, want 76"));
    }
    let satisfying = [true, true, false, false, false];
    match assignment_to_solution(&inst, &satisfying) {
        Ok(sol) => {
            if sol.k() != inst.k {
                problems.push(format!(
                    "satisfying assignment uses {} stations, budget {}",
                    sol.k(),
                    inst.k
                ));
            }
            let check = verify_solution_with(
                &inst.p,
                &inst.q,
                inst.eps,
                &sol,
                StationIndexing::IncludeZero,
            );
            if !check.accepted {
                problems.push("satisfying assignment rejected".into());
            }
        }
        Err(e) => problems.push(format!("satisfying assignment failed to convert: {e}")),
    }
    let falsifying = [true, false, true, true, false];
    match assignment_to_solution(&inst, &falsifying) {
        Ok(sol) => {
            let check = verify_solution_with(
                &inst.p,
                &inst.q,
                inst.eps,
                &sol,
                StationIndexing::IncludeZero,
            );
            if check.accepted {
                problems.push("assignment falsifying the third clause was accepted".into());
            }
        }
        Err(e) => problems.push(format!("falsifying assignment failed to convert: {e}")),
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 10.0 {
        problems.push(format!("took {elapsed:?}, budget is 10 s"));
    }
    conclude(
        9,
        "reduction fixture round trip",
        &problems,
        format!("k = {} in {elapsed:.2?}", inst.k),
    );
}

#[test]
fn criterion_10_pitch_splitting_preserves_acceptance() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut problems = Vec::new();
    let mut accepted = 0usize;
    while accepted < 100 {
        let (p, q) = random_pair(&mut rng);
        let hd = hausdorff(&p, &q).value;
        let eps = hd + rng.random_range(0.02..0.6) * joint_diameter(&p, &q);
        let Ok(rep) = approx_min_k(&p, &q, eps) else {
            continue;
        };
        let base = rep.solution;
        if !verify_solution_with(&p, &q, eps, &base, StationIndexing::IncludeZero).accepted {
            problems.push("approximation witness rejected before splitting".into());
            continue;
        }
        accepted += 1;
        for on_first in [true, false] {
            let cuts = if on_first { &base.a } else { &base.b };
            for pitch in 0..cuts.len() - 1 {
                let (lo, hi) = (cuts[pitch], cuts[pitch + 1]);
                if hi - lo < 8.0 * TOL {
                    continue;
                }
                let at = 0.5 * (lo + hi);
                let split = match refine_split(&base, on_first, pitch, at) {
                    Ok(split) => split,
                    Err(e) => {
                        problems.push(format!("split of pitch {pitch} failed: {e}"));
                        continue;
                    }
                };
                let check =
                    verify_solution_with(&p, &q, eps, &split, StationIndexing::IncludeZero);
                if !check.accepted {
                    problems.push(format!(
                        "splitting pitch {pitch} (chain {}) broke acceptance",
                        if on_first { "P" } else { "Q" }
                    ));
                }
            }
        }
    }
    conclude(
        10,
        "pitch splitting preserves acceptance",
        &problems,
        format!("{accepted} accepted solutions"),
    );
}

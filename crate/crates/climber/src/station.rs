//! Station covers: the 2-approximation of the minimum-k station distance.
//!
//! A *k-station solution* cuts both chains into pitches and assigns every
//! pitch a fixed station point on the other chain; it is valid at `eps`
//! when each pitch lies entirely inside the `eps`-disk of its station. In
//! the free-space diagram a valid P-pitch is exactly a horizontal free
//! segment, so minimum station counts and minimum segment covers of the
//! diagram are two views of the same problem. The pipeline here computes a
//! per-axis minimum segment cover greedily, splits the two covers into a
//! compatible set (losing at most a factor 2), converts that set into a
//! station solution, and verifies the result from scratch.

use serde::{Deserialize, Serialize};

use crate::free_space::{
    default_inflation, Axis, AxisSegment, FreeSpaceDiagram, Orientation,
};
use crate::geom::{point_to_subcurve_max_distance, ParamInterval, Point2, PolyChain, TOL};
use crate::{Error, Result};

/// Subdivisions of both chains plus the station assignment of every pitch.
/// `a` cuts the first chain into `a.len() - 1` pitches; pitch `i` (between
/// `a[i]` and `a[i+1]`) is guarded by the station at parameter
/// `b[p_assign[i]]` on the second chain. `b` and `q_assign` mirror this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationSolution {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub p_assign: Vec<usize>,
    pub q_assign: Vec<usize>,
}

impl StationSolution {
    pub fn num_p_pitches(&self) -> usize {
        self.a.len().saturating_sub(1)
    }

    pub fn num_q_pitches(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    /// Total station count: pitches on both chains.
    pub fn k(&self) -> usize {
        self.num_p_pitches() + self.num_q_pitches()
    }

    fn validate(&self, indexing: StationIndexing) -> std::result::Result<(), String> {
        for (name, cuts) in [("a", &self.a), ("b", &self.b)] {
            if cuts.len() < 2 {
                return Err(format!("subdivision {name} needs at least [0, 1]"));
            }
            if cuts[0].abs() > TOL || (cuts[cuts.len() - 1] - 1.0).abs() > TOL {
                return Err(format!("subdivision {name} must start at 0 and end at 1"));
            }
            if cuts.windows(2).any(|w| w[1] <= w[0] + TOL) {
                return Err(format!("subdivision {name} is not strictly increasing"));
            }
        }
        if self.p_assign.len() != self.num_p_pitches() {
            return Err("one station index required per first-chain pitch".into());
        }
        if self.q_assign.len() != self.num_q_pitches() {
            return Err("one station index required per second-chain pitch".into());
        }
        let floor = match indexing {
            StationIndexing::Literal => 1,
            StationIndexing::IncludeZero => 0,
        };
        for (what, assign, cuts) in [
            ("first", &self.p_assign, &self.b),
            ("second", &self.q_assign, &self.a),
        ] {
            if let Some(&j) = assign.iter().find(|&&j| j >= cuts.len() || j < floor) {
                return Err(format!(
                    "{what}-chain pitch uses station index {j}, outside {floor}..{}",
                    cuts.len() - 1
                ));
            }
        }
        Ok(())
    }
}

/// Which subdivision points may serve as stations. The literal reading of
/// the definition indexes stations from 1, so the parameter-0 endpoint of a
/// chain can never guard a pitch (while the parameter-1 endpoint can).
/// `IncludeZero` lifts that asymmetry; constructions that place stations on
/// chain endpoints need it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StationIndexing {
    Literal,
    IncludeZero,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Violation {
    /// True when the violating pitch lies on the first chain.
    pub on_first: bool,
    /// Index of the violating pitch.
    pub pitch: usize,
    /// Farthest distance from the pitch to its station.
    pub distance: f64,
    pub station: Point2,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub accepted: bool,
    /// First violated pitch, when the rejection is metric.
    pub violation: Option<Violation>,
    /// Set when the solution is structurally malformed.
    pub structural_error: Option<String>,
}

/// Checks a solution at threshold `eps` under the literal station indexing.
pub fn verify_solution(
    p: &PolyChain,
    q: &PolyChain,
    eps: f64,
    sol: &StationSolution,
) -> VerifyReport {
    verify_solution_with(p, q, eps, sol, StationIndexing::Literal)
}

/// Checks that every pitch lies within `eps` (plus a scale-aware float
/// slack) of its assigned station, measuring the *farthest* point of the
/// pitch: a pitch is guarded only if all of it is in the station's disk.
pub fn verify_solution_with(
    p: &PolyChain,
    q: &PolyChain,
    eps: f64,
    sol: &StationSolution,
    indexing: StationIndexing,
) -> VerifyReport {
    if let Err(msg) = sol.validate(indexing) {
        return VerifyReport {
            accepted: false,
            violation: None,
            structural_error: Some(msg),
        };
    }
    // Scale-aware slack: covers the default diagram inflation plus the
    // root-finding error in segment endpoints, both of which grow with the
    // joint extent of the input.
    let slack = TOL + 2.0 * default_inflation(p, q);
    for (on_first, chain, other, cuts, other_cuts, assign) in [
        (true, p, q, &sol.a, &sol.b, &sol.p_assign),
        (false, q, p, &sol.b, &sol.a, &sol.q_assign),
    ] {
        for (i, w) in cuts.windows(2).enumerate() {
            let station = other.eval(other_cuts[assign[i]]);
            let iv = ParamInterval { lo: w[0], hi: w[1] };
            let d = point_to_subcurve_max_distance(chain, iv, station);
            if d > eps + slack {
                return VerifyReport {
                    accepted: false,
                    violation: Some(Violation {
                        on_first,
                        pitch: i,
                        distance: d,
                        station,
                    }),
                    structural_error: None,
                };
            }
        }
    }
    VerifyReport {
        accepted: true,
        violation: None,
        structural_error: None,
    }
}

/// Minimum set of free segments whose projection covers the chosen axis.
///
/// Classic interval-cover greedy: from the covered prefix's right end,
/// take the segment reaching farthest right. Each greedy step is one
/// rightmost-reach query, so the whole run is output-sensitive. The greedy
/// count is optimal for one axis because any cover must contain, for each
/// step, a segment through the current frontier, and none reaches farther.
pub fn greedy_axis_cover(d: &FreeSpaceDiagram, axis: Axis) -> Result<Vec<AxisSegment>> {
    match axis {
        Axis::X => greedy_x(d),
        Axis::Y => Ok(greedy_x(&d.transpose())
            .map_err(flip_axis)?
            .into_iter()
            .map(AxisSegment::transpose)
            .collect()),
    }
}

fn flip_axis(e: Error) -> Error {
    match e {
        Error::Infeasible {
            gap_lo, gap_hi, ..
        } => Error::Infeasible {
            axis: "y",
            gap_lo,
            gap_hi,
        },
        other => other,
    }
}

fn greedy_x(d: &FreeSpaceDiagram) -> Result<Vec<AxisSegment>> {
    if let Some(&(lo, hi)) = d.projection_cover_gaps(Axis::X).first() {
        return Err(Error::Infeasible {
            axis: "x",
            gap_lo: lo,
            gap_hi: hi,
        });
    }
    let mut segs = Vec::new();
    let mut x = 0.0f64;
    loop {
        let active = d.free_t_intervals_at_x(x);
        let (reach, seg) = d.rightmost_horizontal_reach(x, &active)?;
        segs.push(seg);
        if reach.reached_end {
            return Ok(segs);
        }
        x = reach.x;
    }
}

/// Clips overlapping spans right-to-left so the projections tile [0, 1]
/// with disjoint open interiors. Pieces reduced to points are dropped;
/// under positive inflation they cannot be needed.
fn truncate_tiling(mut segs: Vec<AxisSegment>) -> Vec<AxisSegment> {
    segs.sort_by(|a, b| a.span.lo.total_cmp(&b.span.lo));
    let mut out: Vec<AxisSegment> = Vec::new();
    let mut bound = 1.0f64;
    for mut s in segs.into_iter().rev() {
        if s.span.lo >= bound - TOL {
            continue;
        }
        s.span.hi = s.span.hi.min(bound);
        if s.span.hi <= s.span.lo + TOL {
            continue;
        }
        bound = s.span.lo;
        out.push(s);
    }
    out.reverse();
    out
}

/// Splits the two per-axis covers against each other so that every
/// segment's fixed coordinate lands on a boundary of the opposite tiling:
/// each horizontal segment is cut at the vertical segments' x-coordinates
/// interior to its span, and vice versa. Because the spans tile the axis,
/// each fixed coordinate cuts at most one opposite segment, so the output
/// has at most `2 (|opt_x| + |opt_y|)` segments.
pub fn make_compatible(opt_x: &[AxisSegment], opt_y: &[AxisSegment]) -> Vec<AxisSegment> {
    debug_assert!(opt_x.iter().all(|s| s.orientation == Orientation::Horizontal));
    debug_assert!(opt_y.iter().all(|s| s.orientation == Orientation::Vertical));
    let hs = truncate_tiling(opt_x.to_vec());
    let vs = truncate_tiling(opt_y.to_vec());
    let xs: Vec<f64> = vs.iter().map(|s| s.fixed).collect();
    let ys: Vec<f64> = hs.iter().map(|s| s.fixed).collect();
    let mut out = Vec::with_capacity(hs.len() + vs.len() + xs.len() + ys.len());
    for (segs, cuts) in [(hs, xs), (vs, ys)] {
        for s in segs {
            let mut inner: Vec<f64> = cuts
                .iter()
                .copied()
                .filter(|&c| c > s.span.lo + TOL && c < s.span.hi - TOL)
                .collect();
            inner.sort_by(f64::total_cmp);
            inner.dedup_by(|a, b| (*a - *b).abs() <= TOL);
            let mut lo = s.span.lo;
            for c in inner.into_iter().chain(std::iter::once(s.span.hi)) {
                out.push(AxisSegment {
                    orientation: s.orientation,
                    fixed: s.fixed,
                    span: ParamInterval { lo, hi: c },
                });
                lo = c;
            }
        }
    }
    out
}

fn tiling_cuts(segs: &[&AxisSegment], what: &str) -> Result<Vec<f64>> {
    let mut cuts = vec![0.0f64];
    let mut cur = 0.0f64;
    for s in segs {
        if s.span.lo > cur + TOL {
            return Err(Error::BadInput(format!(
                "incompatible segment set: {what} spans leave a gap ({cur}, {})",
                s.span.lo
            )));
        }
        if s.span.lo < cur - TOL {
            return Err(Error::BadInput(format!(
                "incompatible segment set: {what} spans overlap at {}",
                s.span.lo
            )));
        }
        if s.span.hi <= cur + TOL {
            return Err(Error::BadInput(format!(
                "incompatible segment set: degenerate or unordered {what} span at {}",
                s.span.lo
            )));
        }
        cur = s.span.hi;
        cuts.push(cur);
    }
    if (cur - 1.0).abs() > TOL {
        return Err(Error::BadInput(format!(
            "incompatible segment set: {what} spans end at {cur}, not 1"
        )));
    }
    let last = cuts.len() - 1;
    cuts[last] = 1.0;
    Ok(cuts)
}

fn cut_index(cuts: &[f64], v: f64) -> Option<usize> {
    cuts.iter().position(|&c| (c - v).abs() <= TOL)
}

/// Converts a compatible segment set into a station solution: horizontal
/// span endpoints become the first chain's cuts (each horizontal segment
/// is a pitch guarded by the second chain's point at the segment's
/// height), and symmetrically for vertical segments.
pub fn segments_to_solution(segs: &[AxisSegment]) -> Result<StationSolution> {
    let mut hs: Vec<&AxisSegment> = segs
        .iter()
        .filter(|s| s.orientation == Orientation::Horizontal)
        .collect();
    let mut vs: Vec<&AxisSegment> = segs
        .iter()
        .filter(|s| s.orientation == Orientation::Vertical)
        .collect();
    if hs.is_empty() || vs.is_empty() {
        return Err(Error::BadInput(
            "incompatible segment set: need segments of both orientations".into(),
        ));
    }
    hs.sort_by(|a, b| a.span.lo.total_cmp(&b.span.lo));
    vs.sort_by(|a, b| a.span.lo.total_cmp(&b.span.lo));
    let a = tiling_cuts(&hs, "horizontal")?;
    let b = tiling_cuts(&vs, "vertical")?;
    let p_assign = hs
        .iter()
        .map(|h| {
            cut_index(&b, h.fixed).ok_or_else(|| {
                Error::BadInput(format!(
                    "incompatible segment set: horizontal segment height {} is not a vertical tiling boundary",
                    h.fixed
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let q_assign = vs
        .iter()
        .map(|v| {
            cut_index(&a, v.fixed).ok_or_else(|| {
                Error::BadInput(format!(
                    "incompatible segment set: vertical segment abscissa {} is not a horizontal tiling boundary",
                    v.fixed
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StationSolution {
        a,
        b,
        p_assign,
        q_assign,
    })
}

/// Result of the 2-approximation: `lower_bound <= k_min <= upper_bound
/// <= 2 * lower_bound`, plus the witness segments and solution realizing
/// the upper bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproxReport {
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub segments: Vec<AxisSegment>,
    pub solution: StationSolution,
}

/// 2-approximation of the minimum station count at threshold `eps`, using
/// the default inflation.
pub fn approx_min_k(p: &PolyChain, q: &PolyChain, eps: f64) -> Result<ApproxReport> {
    approx_min_k_with(p, q, eps, default_inflation(p, q))
}

/// The full pipeline at explicit inflation: diagram, per-axis gap checks,
/// greedy covers, compatibility splitting, solution extraction. The sum of
/// the two greedy counts lower-bounds any solution (each axis must be
/// covered, and per axis the greedy is a minimum cover); the split set's
/// size upper-bounds it (the witness realizes that count).
pub fn approx_min_k_with(
    p: &PolyChain,
    q: &PolyChain,
    eps: f64,
    delta: f64,
) -> Result<ApproxReport> {
    if !(eps > 0.0) {
        return Err(Error::BadInput(format!(
            "threshold must be positive, got {eps}"
        )));
    }
    let d = FreeSpaceDiagram::new(p, q, eps, delta)?;
    let gx = greedy_axis_cover(&d, Axis::X)?;
    let gy = greedy_axis_cover(&d, Axis::Y)?;
    let lower_bound = gx.len() + gy.len();
    let segments = make_compatible(&gx, &gy);
    let upper_bound = segments.len();
    debug_assert!(upper_bound <= 2 * lower_bound);
    let solution = segments_to_solution(&segments)?;
    debug_assert!(
        verify_solution_with(p, q, eps + delta, &solution, StationIndexing::IncludeZero).accepted,
        "pipeline witness must verify at its own effective radius"
    );
    Ok(ApproxReport {
        lower_bound,
        upper_bound,
        segments,
        solution,
    })
}

/// Splits one pitch at an interior parameter, assigning both halves the
/// original station. Acceptance is preserved (the halves lie inside the
/// original pitch) and the station count grows by one, so acceptance at k
/// implies acceptance at every larger count.
pub fn refine_split(
    sol: &StationSolution,
    on_first: bool,
    pitch: usize,
    at: f64,
) -> Result<StationSolution> {
    let mut sol = sol.clone();
    {
        let (cuts, assign, other_assign) = if on_first {
            (&mut sol.a, &mut sol.p_assign, &mut sol.q_assign)
        } else {
            (&mut sol.b, &mut sol.q_assign, &mut sol.p_assign)
        };
        if pitch + 1 >= cuts.len() {
            return Err(Error::BadInput(format!("no pitch {pitch}")));
        }
        if at <= cuts[pitch] + TOL || at >= cuts[pitch + 1] - TOL {
            return Err(Error::BadInterval {
                lo: cuts[pitch],
                hi: cuts[pitch + 1],
            });
        }
        cuts.insert(pitch + 1, at);
        let station = assign[pitch];
        assign.insert(pitch + 1, station);
        // The other chain's station indices point into the cut list that
        // just grew: indices past the insertion shift by one.
        for j in other_assign.iter_mut() {
            if *j >= pitch + 1 {
                *j += 1;
            }
        }
    }
    Ok(sol)
}

/// Heuristic upper bound on the least threshold admitting a k-station
/// solution.
///
/// The raw pipeline bound `approx upper <= k` is not monotone in the
/// threshold (splits can multiply as covers shrink), so feasibility is
/// tested two ways: the pipeline emits a fresh witness within budget, or
/// some previously collected witness still verifies. Witnesses restore
/// monotonicity where the pipeline stumbles: a solution accepted at some
/// threshold stays accepted at every larger one. The trivial two-station
/// endpoint solution seeds the pool, so the top bracket is always
/// feasible. Every threshold below the Hausdorff distance is infeasible
/// (each chain must fit in the union of station disks centred on the
/// other), so the search bisects and then sweeps offsets above that
/// floor, concentrating probes where the answer lives. The result is a
/// threshold with a verified at-most-k-station solution, within `tol` of
/// the best probed bracket; no optimality claim.
pub fn heuristic_min_eps(p: &PolyChain, q: &PolyChain, k: usize, tol: f64) -> f64 {
    assert!(k >= 2, "need at least one pitch per chain");
    assert!(tol > 0.0, "tolerance must be positive");
    let delta = default_inflation(p, q);
    let mut witnesses = vec![StationSolution {
        a: vec![0.0, 1.0],
        b: vec![0.0, 1.0],
        p_assign: vec![1],
        q_assign: vec![1],
    }];
    let mut ok = move |eps: f64| -> bool {
        if witnesses
            .iter()
            .any(|w| verify_solution_with(p, q, eps, w, StationIndexing::IncludeZero).accepted)
        {
            return true;
        }
        if let Ok(rep) = approx_min_k_with(p, q, eps, delta) {
            if rep.upper_bound <= k {
                witnesses.push(rep.solution);
                return true;
            }
        }
        false
    };
    let mut top = {
        let mut far = 0.0f64;
        for a in p.vertices() {
            for b in q.vertices() {
                far = far.max(a.dist(*b));
            }
        }
        far + p.max_edge_len().max(q.max_edge_len())
    };
    let mut grow_guard = 0;
    while !ok(top) {
        top *= 2.0;
        grow_guard += 1;
        if grow_guard >= 64 {
            return top;
        }
    }
    let floor = {
        let hd = crate::dist::hausdorff(p, q).value;
        (hd - 2.0 * (TOL + 2.0 * delta)).max(0.0)
    };
    let bisect = |mut lo: f64, mut hi: f64, ok: &mut dyn FnMut(f64) -> bool| {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let mut result = bisect(floor, top, &mut ok);
    for _ in 0..64 {
        let mut improved = false;
        for i in 1..=60 {
            let cand = floor + (result - floor) * 0.5f64.powi(i);
            if cand - floor <= tol {
                break;
            }
            if ok(cand) {
                result = bisect(floor, cand, &mut ok);
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    result
}

//! Hausdorff and Frechet distances with verifiable certificates.
//!
//! The Frechet decision runs the classical cell-boundary reachability sweep
//! over the free-space diagram; the value comes from bisection over that
//! decision. The rock-climber distance, where the two agents alternate
//! moves instead of moving simultaneously, takes the same value as the
//! Frechet distance, so [`frechet_value`] serves both names. The Hausdorff
//! distance is computed exactly by subdividing each edge at every parameter
//! where the nearest feature of the other chain can change.

use serde::{Deserialize, Serialize};

use crate::free_space::{default_inflation, FreeSpaceDiagram, Orientation};
use crate::geom::{
    point_to_chain_distance, point_to_chain_nearest, ParamInterval, Point2, PolyChain, TOL,
};

/// One step of a monotone-path witness: the reachable portion of a cell
/// boundary edge the path crosses. Vertical crossings sit on the grid line
/// `x = line / m` in row `index`; horizontal crossings on `y = line / n` in
/// column `index`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Crossing {
    pub orientation: Orientation,
    pub line: usize,
    pub index: usize,
    pub interval: ParamInterval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Certificate {
    /// Farthest-point witness: `point` lies at `param` on the first or
    /// second chain and realizes the value against the other chain, whose
    /// nearest point is `nearest`.
    Attainment {
        on_first: bool,
        param: f64,
        point: Point2,
        nearest: Point2,
    },
    /// Monotone-path witness through the free space at radius `eps_hi`,
    /// with the value bracketed in `[eps_lo, eps_hi]`.
    Reachability {
        eps_lo: f64,
        eps_hi: f64,
        crossings: Vec<Crossing>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    pub certificate: Certificate,
}

impl DistanceResult {
    /// Re-checks an attainment certificate from scratch: the point must lie
    /// on its chain at the stated parameter, and both the recomputed chain
    /// distance and the stated nearest point must agree with the value.
    pub fn verify_attainment(&self, first: &PolyChain, second: &PolyChain, tol: f64) -> bool {
        let Certificate::Attainment {
            on_first,
            param,
            point,
            nearest,
        } = &self.certificate
        else {
            return false;
        };
        let (src, dst) = if *on_first {
            (first, second)
        } else {
            (second, first)
        };
        src.eval(*param).dist(*point) <= tol
            && (point_to_chain_distance(dst, *point) - self.value).abs() <= tol
            && (point.dist(*nearest) - self.value).abs() <= tol
            && point_to_chain_distance(dst, *nearest) <= tol
    }
}

/// Discrete Frechet distance (coupling distance) of two point sequences,
/// by the standard dynamic program in linear space.
pub fn discrete_frechet(p: &[Point2], q: &[Point2]) -> f64 {
    assert!(!p.is_empty() && !q.is_empty(), "empty point sequence");
    let mut prev = vec![0.0f64; q.len()];
    let mut cur = vec![0.0f64; q.len()];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            let d = a.dist(b);
            let reach = if i == 0 && j == 0 {
                d
            } else if i == 0 {
                cur[j - 1].max(d)
            } else if j == 0 {
                prev[0].max(d)
            } else {
                prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d)
            };
            cur[j] = reach;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[q.len() - 1]
}

/// Refinement of the chain with at least `k` points: every edge is split
/// into equally many uniform pieces, and every original vertex is kept.
/// Keeping the vertices is what makes the discrete Frechet distance of the
/// refinement an upper bound on the continuous one.
pub fn sample_points(chain: &PolyChain, k: usize) -> Vec<Point2> {
    assert!(k >= 2, "need at least the two endpoints");
    let m = chain.num_edges();
    let per_edge = (k - 1).div_ceil(m);
    let mut pts = Vec::with_capacity(m * per_edge + 1);
    for i in 0..m {
        let (a, b) = chain.edge(i);
        for j in 0..per_edge {
            pts.push(a.lerp(b, j as f64 / per_edge as f64));
        }
    }
    pts.push(chain.vertices()[m]);
    pts
}

enum Parent {
    Start,
    V(usize, usize),
    H(usize, usize),
}

/// Monotone (0,0) -> (1,1) reachability at the diagram's effective radius,
/// with the crossed boundary intervals as witness. Runs in O(mn).
fn monotone_witness(d: &FreeSpaceDiagram) -> Option<Vec<Crossing>> {
    let (m, n) = (d.m(), d.n());
    let eff = d.eff_sq();
    let slack = TOL * eff.max(1.0);
    if d.cell(0, 0).value(0.0, 0.0) > eff + slack {
        return None;
    }
    let vidx = |i: usize, j: usize| i * n + j;
    let hidx = |i: usize, j: usize| i * (n + 1) + j;
    let mut vfree: Vec<Option<ParamInterval>> = vec![None; (m + 1) * n];
    let mut hfree: Vec<Option<ParamInterval>> = vec![None; m * (n + 1)];
    for j in 0..n {
        for i in 0..=m {
            vfree[vidx(i, j)] = if i < m {
                d.cell(i, j).free_t_interval(0.0, eff)
            } else {
                d.cell(m - 1, j).free_t_interval(1.0, eff)
            };
        }
    }
    for i in 0..m {
        for j in 0..=n {
            hfree[hidx(i, j)] = if j < n {
                d.cell(i, j).free_s_interval(0.0, eff)
            } else {
                d.cell(i, n - 1).free_s_interval(1.0, eff)
            };
        }
    }
    let mut vreach: Vec<Option<(ParamInterval, Parent)>> = (0..(m + 1) * n).map(|_| None).collect();
    let mut hreach: Vec<Option<(ParamInterval, Parent)>> = (0..m * (n + 1)).map(|_| None).collect();
    // Wall climbs: the path may ride up the left wall or along the bottom
    // wall while every crossed corner stays free.
    if let Some(iv) = vfree[vidx(0, 0)] {
        if iv.lo <= TOL {
            vreach[vidx(0, 0)] = Some((iv, Parent::Start));
        }
    }
    for j in 1..n {
        let climbable = matches!(&vreach[vidx(0, j - 1)], Some((iv, _)) if iv.hi >= 1.0 - TOL);
        if climbable {
            if let Some(iv) = vfree[vidx(0, j)] {
                if iv.lo <= TOL {
                    vreach[vidx(0, j)] = Some((iv, Parent::V(0, j - 1)));
                }
            }
        }
    }
    if let Some(iv) = hfree[hidx(0, 0)] {
        if iv.lo <= TOL {
            hreach[hidx(0, 0)] = Some((iv, Parent::Start));
        }
    }
    for i in 1..m {
        let walkable = matches!(&hreach[hidx(i - 1, 0)], Some((iv, _)) if iv.hi >= 1.0 - TOL);
        if walkable {
            if let Some(iv) = hfree[hidx(i, 0)] {
                if iv.lo <= TOL {
                    hreach[hidx(i, 0)] = Some((iv, Parent::H(i - 1, 0)));
                }
            }
        }
    }
    // Cell sweep. Entering from the bottom reaches the whole free right
    // edge; entering from the left at height t reaches only t' >= t. Both
    // follow from convexity: the straight segment between two free points
    // stays free, and it is monotone whenever the coordinates are ordered.
    for i in 0..m {
        for j in 0..n {
            let in_l = vreach[vidx(i, j)].as_ref().map(|(iv, _)| *iv);
            let in_b = hreach[hidx(i, j)].as_ref().map(|(iv, _)| *iv);
            if in_l.is_none() && in_b.is_none() {
                continue;
            }
            if let Some(r) = vfree[vidx(i + 1, j)] {
                let out = if in_b.is_some() {
                    Some((r, Parent::H(i, j)))
                } else {
                    let floor = ParamInterval {
                        lo: in_l.unwrap().lo,
                        hi: 1.0,
                    };
                    r.intersect(floor).map(|iv| (iv, Parent::V(i, j)))
                };
                if let Some((iv, par)) = out {
                    if vreach[vidx(i + 1, j)].is_none() {
                        vreach[vidx(i + 1, j)] = Some((iv, par));
                    }
                }
            }
            if let Some(t) = hfree[hidx(i, j + 1)] {
                let out = if in_l.is_some() {
                    Some((t, Parent::V(i, j)))
                } else {
                    let floor = ParamInterval {
                        lo: in_b.unwrap().lo,
                        hi: 1.0,
                    };
                    t.intersect(floor).map(|iv| (iv, Parent::H(i, j)))
                };
                if let Some((iv, par)) = out {
                    if hreach[hidx(i, j + 1)].is_none() {
                        hreach[hidx(i, j + 1)] = Some((iv, par));
                    }
                }
            }
        }
    }
    let end = if matches!(&vreach[vidx(m, n - 1)], Some((iv, _)) if iv.hi >= 1.0 - TOL) {
        Parent::V(m, n - 1)
    } else if matches!(&hreach[hidx(m - 1, n)], Some((iv, _)) if iv.hi >= 1.0 - TOL) {
        Parent::H(m - 1, n)
    } else {
        return None;
    };
    let mut crossings = Vec::new();
    let mut cur = end;
    loop {
        match cur {
            Parent::Start => break,
            Parent::V(i, j) => {
                let (iv, par) = vreach[vidx(i, j)].take().expect("backtrack through reached edge");
                crossings.push(Crossing {
                    orientation: Orientation::Vertical,
                    line: i,
                    index: j,
                    interval: iv,
                });
                cur = par;
            }
            Parent::H(i, j) => {
                let (iv, par) = hreach[hidx(i, j)].take().expect("backtrack through reached edge");
                crossings.push(Crossing {
                    orientation: Orientation::Horizontal,
                    line: j,
                    index: i,
                    interval: iv,
                });
                cur = par;
            }
        }
    }
    crossings.reverse();
    Some(crossings)
}

/// True when the chains are within Frechet distance `eps`, at effective
/// radius `eps` plus the default inflation.
pub fn frechet_decide(p: &PolyChain, q: &PolyChain, eps: f64) -> bool {
    frechet_decide_with(p, q, eps, default_inflation(p, q))
}

/// Frechet decision at explicit inflation.
pub fn frechet_decide_with(p: &PolyChain, q: &PolyChain, eps: f64, delta: f64) -> bool {
    let Ok(d) = FreeSpaceDiagram::new(p, q, eps, delta) else {
        return false;
    };
    monotone_witness(&d).is_some()
}

/// Frechet distance (equally: rock-climber distance) by bisection over the
/// decision procedure, to absolute tolerance `tol`. The certificate is the
/// monotone-path witness at the upper bracket end.
pub fn frechet_value(p: &PolyChain, q: &PolyChain, tol: f64) -> DistanceResult {
    assert!(tol > 0.0, "tolerance must be positive");
    // The decision inflation shifts every answer by up to delta, so it is
    // kept below the requested tolerance; otherwise the returned value
    // could sit more than tol from the true distance.
    let delta = default_inflation(p, q).min(0.25 * tol);
    let witness_at = |eps: f64| {
        FreeSpaceDiagram::new(p, q, eps, delta)
            .ok()
            .and_then(|d| monotone_witness(&d))
    };
    let mut lo = 0.0f64;
    // Any coupled traversal stays within a vertex-pair distance plus one
    // in-flight edge, so this brackets the value from above.
    let mut hi = {
        let mut far = 0.0f64;
        for a in p.vertices() {
            for b in q.vertices() {
                far = far.max(a.dist(*b));
            }
        }
        far + p.max_edge_len().max(q.max_edge_len())
    };
    if let Some(crossings) = witness_at(lo) {
        return DistanceResult {
            value: 0.0,
            certificate: Certificate::Reachability {
                eps_lo: 0.0,
                eps_hi: 0.0,
                crossings,
            },
        };
    }
    let mut grow_guard = 0;
    while witness_at(hi).is_none() {
        hi *= 2.0;
        grow_guard += 1;
        assert!(grow_guard < 64, "decision bracket failed to close");
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if witness_at(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let crossings = witness_at(hi).expect("upper bracket end stays feasible");
    DistanceResult {
        value: 0.5 * (lo + hi),
        certificate: Certificate::Reachability {
            eps_lo: lo,
            eps_hi: hi,
            crossings,
        },
    }
}

fn push_quadratic_roots(out: &mut Vec<f64>, a: f64, b: f64, c: f64) {
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
    if a.abs() <= 1e-14 * scale {
        if b.abs() > 1e-14 * scale {
            out.push(-c / b);
        }
        return;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return;
    }
    let sq = disc.sqrt();
    out.push((-b - sq) / (2.0 * a));
    out.push((-b + sq) / (2.0 * a));
}

/// Directed Hausdorff distance from `p` to `q` with the attaining parameter
/// on `p`.
///
/// On each edge of `p` the distance-to-`q` function is piecewise smooth;
/// its pieces change only where two features of `q` are equidistant or
/// where a point leaves an edge's orthogonal slab. On each piece the
/// function is convex, so the maximum sits at a piece boundary: collect
/// every candidate parameter, evaluate, take the best. O(m n^2) candidates.
fn directed_hausdorff(p: &PolyChain, q: &PolyChain) -> (f64, f64) {
    let qv = q.vertices();
    let m = p.num_edges();
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..m {
        let (a, b) = p.edge(i);
        let dir = b - a;
        let mut cands: Vec<f64> = vec![0.0, 1.0];
        // Vertex-vertex bisector crossings: linear in the edge parameter.
        for x in 0..qv.len() {
            for y in x + 1..qv.len() {
                let dvec = qv[x] - qv[y];
                let den = -2.0 * dir.dot(dvec);
                if den.abs() > 1e-14 {
                    let num = 2.0 * a.dot(dvec) - qv[x].norm_sq() + qv[y].norm_sq();
                    cands.push(num / den);
                }
            }
        }
        for e in 0..q.num_edges() {
            let (q0, q1) = q.edge(e);
            let v = q1 - q0;
            // Orthogonal slab boundaries of the edge: nearest-feature type
            // flips between endpoint and interior there.
            let dd = dir.dot(v);
            if dd.abs() > 1e-14 {
                cands.push((q0 - a).dot(v) / dd);
                cands.push((q1 - a).dot(v) / dd);
            }
            // Vertex vs edge-supporting-line equidistance: quadratic.
            let c0 = v.cross(a - q0);
            let c1 = v.cross(dir);
            let vv = v.norm_sq();
            for w in qv {
                let aw = a - *w;
                push_quadratic_roots(
                    &mut cands,
                    c1 * c1 - vv * dir.norm_sq(),
                    2.0 * c0 * c1 - 2.0 * vv * dir.dot(aw),
                    c0 * c0 - vv * aw.norm_sq(),
                );
            }
            // Line vs line equidistance, both sign combinations: linear.
            for e2 in e + 1..q.num_edges() {
                let (r0, r1) = q.edge(e2);
                let v2 = r1 - r0;
                let g0 = v2.cross(a - r0);
                let g1 = v2.cross(dir);
                let (nv, nv2) = (v.norm(), v2.norm());
                for sgn in [1.0, -1.0] {
                    let den = c1 * nv2 - sgn * g1 * nv;
                    if den.abs() > 1e-14 {
                        cands.push((sgn * g0 * nv - c0 * nv2) / den);
                    }
                }
            }
        }
        cands.retain(|u| u.is_finite());
        for u in &mut cands {
            *u = u.clamp(0.0, 1.0);
        }
        cands.sort_by(f64::total_cmp);
        cands.dedup_by(|x, y| (*x - *y).abs() <= TOL);
        for &u in &cands {
            let pt = a + dir * u;
            let d = point_to_chain_distance(q, pt);
            if d > best.0 {
                best = (d, (i as f64 + u) / m as f64);
            }
        }
    }
    best
}

/// Symmetric Hausdorff distance, exact up to floating tolerance, with a
/// farthest-point certificate.
pub fn hausdorff(p: &PolyChain, q: &PolyChain) -> DistanceResult {
    let (d_pq, u_pq) = directed_hausdorff(p, q);
    let (d_qp, u_qp) = directed_hausdorff(q, p);
    let (value, on_first, param) = if d_pq >= d_qp {
        (d_pq, true, u_pq)
    } else {
        (d_qp, false, u_qp)
    };
    let (src, dst) = if on_first { (p, q) } else { (q, p) };
    let point = src.eval(param);
    let (_, nearest) = point_to_chain_nearest(dst, point);
    DistanceResult {
        value,
        certificate: Certificate::Attainment {
            on_first,
            param,
            point,
            nearest,
        },
    }
}

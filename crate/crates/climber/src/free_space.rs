//! Free-space diagrams of chain pairs and the interval queries on them.
//!
//! For chains `P` (m edges, horizontal axis) and `Q` (n edges, vertical
//! axis) and a threshold `eps`, the free space is the set of parameter pairs
//! `(x, y)` in the unit square with `|P(x) - Q(y)| <= eps`. Restricted to
//! one cell (one edge of each chain) the squared distance is a convex
//! quadratic in the local coordinates, so every cell's free region is convex
//! (an ellipse, or a slab when the edges are parallel) and every line or
//! axis projection of it is a single interval.
//!
//! All queries run at the *effective* radius `eps + delta`. The inflation
//! `delta` exists because parallel edges at distance exactly `eps` produce
//! measure-zero free sets (a line), which no finite segment family can
//! cover; any positive inflation restores an interior.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::geom::{ParamInterval, Point2, PolyChain, TOL};
use crate::{Error, Result};

/// Squared distance between points sliding along one edge of each chain:
/// `d2(s, t) = a s^2 + b t^2 + c s t + d s + e t + f` over the unit cell.
#[derive(Clone, Copy, Debug)]
pub struct CellQuad {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

/// Free portions of the four cell edges, each one interval by convexity.
#[derive(Clone, Copy, Debug, Default)]
pub struct BoundaryIntervals {
    /// t-interval on s = 0.
    pub left: Option<ParamInterval>,
    /// t-interval on s = 1.
    pub right: Option<ParamInterval>,
    /// s-interval on t = 0.
    pub bottom: Option<ParamInterval>,
    /// s-interval on t = 1.
    pub top: Option<ParamInterval>,
}

/// `{ x in [0,1] : a2 x^2 + a1 x + a0 <= 0 }`, convex for `a2 >= 0`.
/// Discriminants within tolerance of zero are clamped so tangential contact
/// yields a point interval instead of nothing.
fn sublevel_interval(a2: f64, a1: f64, a0: f64) -> Option<ParamInterval> {
    let scale = a2.abs().max(a1.abs()).max(a0.abs()).max(1.0);
    if a2.abs() <= TOL * scale {
        if a1.abs() <= TOL * scale {
            return (a0 <= TOL * scale).then(ParamInterval::full);
        }
        let r = -a0 / a1;
        let (lo, hi) = if a1 > 0.0 { (0.0, r) } else { (r, 1.0) };
        if lo > hi + TOL {
            return None;
        }
        let lo = lo.clamp(0.0, 1.0);
        return Some(ParamInterval {
            lo,
            hi: hi.clamp(lo, 1.0),
        });
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let dscale = (a1 * a1).max((4.0 * a2 * a0).abs()).max(1.0);
    if disc < -TOL * dscale {
        return None;
    }
    let sq = disc.max(0.0).sqrt();
    let lo = ((-a1 - sq) / (2.0 * a2)).max(0.0);
    let hi = ((-a1 + sq) / (2.0 * a2)).min(1.0);
    if lo > hi + TOL {
        return None;
    }
    let lo = lo.clamp(0.0, 1.0);
    Some(ParamInterval {
        lo,
        hi: hi.clamp(lo, 1.0),
    })
}

/// `{ x in [0,1] : lo <= c x + e <= hi }`.
fn linear_band(c: f64, e: f64, lo: f64, hi: f64) -> Option<ParamInterval> {
    let scale = c.abs().max(e.abs()).max(hi - lo).max(1.0);
    if c.abs() <= TOL * scale {
        return (e >= lo - TOL * scale && e <= hi + TOL * scale).then(ParamInterval::full);
    }
    let (r0, r1) = ((lo - e) / c, (hi - e) / c);
    let (a, b) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };
    let a = a.max(0.0);
    let b = b.min(1.0);
    (a <= b + TOL).then(|| {
        let a = a.clamp(0.0, 1.0);
        ParamInterval {
            lo: a,
            hi: b.clamp(a, 1.0),
        }
    })
}

impl CellQuad {
    pub fn new(p0: Point2, p1: Point2, q0: Point2, q1: Point2) -> Self {
        let u = p1 - p0;
        let v = q1 - q0;
        let w = p0 - q0;
        Self {
            a: u.dot(u),
            b: v.dot(v),
            c: -2.0 * u.dot(v),
            d: 2.0 * w.dot(u),
            e: -2.0 * w.dot(v),
            f: w.dot(w),
        }
    }

    /// Squared distance at local coordinates `(s, t)`.
    pub fn value(&self, s: f64, t: f64) -> f64 {
        self.a * s * s + self.b * t * t + self.c * s * t + self.d * s + self.e * t + self.f
    }

    /// True when the two edges are parallel, making the free region a slab.
    pub fn is_slab(&self) -> bool {
        // 4ab - c^2 = 0 exactly when the edge direction vectors are parallel.
        let det = 4.0 * self.a * self.b - self.c * self.c;
        det.abs() <= TOL * (4.0 * self.a * self.b).max(1.0)
    }

    /// Same cell with the roles of the two chains swapped.
    pub fn transpose(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            c: self.c,
            d: self.e,
            e: self.d,
            f: self.f,
        }
    }

    /// Free `t` values on the vertical line `s = const` within the cell.
    pub fn free_t_interval(&self, s: f64, eff_sq: f64) -> Option<ParamInterval> {
        sublevel_interval(
            self.b,
            self.c * s + self.e,
            self.a * s * s + self.d * s + self.f - eff_sq,
        )
    }

    /// Free `s` values on the horizontal line `t = const` within the cell.
    pub fn free_s_interval(&self, t: f64, eff_sq: f64) -> Option<ParamInterval> {
        sublevel_interval(
            self.a,
            self.c * t + self.d,
            self.b * t * t + self.e * t + self.f - eff_sq,
        )
    }

    pub fn boundary_intervals(&self, eff_sq: f64) -> BoundaryIntervals {
        BoundaryIntervals {
            left: self.free_t_interval(0.0, eff_sq),
            right: self.free_t_interval(1.0, eff_sq),
            bottom: self.free_s_interval(0.0, eff_sq),
            top: self.free_s_interval(1.0, eff_sq),
        }
    }

    /// Projection of the cell's free region onto the `s` axis. The region is
    /// convex, so the projection is one interval: the hull of the free sets
    /// on the two horizontal cell edges and of the interior piece where the
    /// per-`s` minimum over `t` is attained strictly inside the cell.
    pub fn x_projection(&self, eff_sq: f64) -> Option<ParamInterval> {
        let mut acc: Option<ParamInterval> = None;
        let mut add = |iv: Option<ParamInterval>| {
            if let Some(iv) = iv {
                acc = Some(match acc {
                    None => iv,
                    Some(a) => ParamInterval {
                        lo: a.lo.min(iv.lo),
                        hi: a.hi.max(iv.hi),
                    },
                });
            }
        };
        add(self.free_s_interval(0.0, eff_sq));
        add(self.free_s_interval(1.0, eff_sq));
        // Interior piece: the minimizing t*(s) = -(c s + e) / (2 b) must lie
        // in [0, 1], i.e. -2b <= c s + e <= 0, and the completed square in t
        // (the minimum value) must clear the threshold.
        if self.b > 0.0 {
            let qa = self.a - self.c * self.c / (4.0 * self.b);
            let qb = self.d - self.c * self.e / (2.0 * self.b);
            let qc = self.f - self.e * self.e / (4.0 * self.b) - eff_sq;
            let valid = linear_band(self.c, self.e, -2.0 * self.b, 0.0);
            let inner = sublevel_interval(qa.max(0.0), qb, qc)
                .and_then(|iv| valid.and_then(|v| iv.intersect(v)));
            add(inner);
        }
        acc
    }

    /// Rightmost free point of the cell with `t` restricted to `range`.
    /// The per-`t` rightmost abscissa is concave in `t`, so it peaks either
    /// at the free region's own rightmost vertex or at a range endpoint;
    /// all candidates are solved in closed form from the coefficients.
    pub fn rightmost_free_in(&self, range: ParamInterval, eff_sq: f64) -> Option<(f64, f64)> {
        let mut cand = Vec::with_capacity(3);
        if self.b > 0.0 {
            let qa = self.a - self.c * self.c / (4.0 * self.b);
            let qb = self.d - self.c * self.e / (2.0 * self.b);
            let qc = self.f - self.e * self.e / (4.0 * self.b) - eff_sq;
            let scale = qa.abs().max(qb.abs()).max(qc.abs()).max(1.0);
            if qa > TOL * scale {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    // Rightmost vertex of the ellipse: dq/dt = 0 there.
                    let s_v = (-qb + disc.sqrt()) / (2.0 * qa);
                    let t_v = -(self.c * s_v + self.e) / (2.0 * self.b);
                    cand.push(t_v.clamp(range.lo, range.hi));
                }
            }
        }
        cand.push(range.hi);
        cand.push(range.lo);
        let mut best: Option<(f64, f64)> = None;
        for t in cand {
            if let Some(iv) = self.free_s_interval(t, eff_sq) {
                if best.is_none_or(|(bs, _)| iv.hi > bs) {
                    best = Some((iv.hi, t));
                }
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Axis-parallel segment in the unit parameter square: `span x {fixed}` when
/// horizontal, `{fixed} x span` when vertical. Segments produced by queries
/// lie entirely in the free space at the diagram's effective radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSegment {
    pub orientation: Orientation,
    pub fixed: f64,
    pub span: ParamInterval,
}

impl AxisSegment {
    pub fn horizontal(y: f64, lo: f64, hi: f64) -> Self {
        Self {
            orientation: Orientation::Horizontal,
            fixed: y,
            span: ParamInterval { lo, hi },
        }
    }

    pub fn vertical(x: f64, lo: f64, hi: f64) -> Self {
        Self {
            orientation: Orientation::Vertical,
            fixed: x,
            span: ParamInterval { lo, hi },
        }
    }

    /// Segment of the transposed diagram.
    pub fn transpose(self) -> Self {
        Self {
            orientation: match self.orientation {
                Orientation::Horizontal => Orientation::Vertical,
                Orientation::Vertical => Orientation::Horizontal,
            },
            ..self
        }
    }
}

/// Result of a rightmost-reach query: the farthest point of the free space
/// connectable to the queried vertical line by a horizontal free segment.
#[derive(Clone, Copy, Debug)]
pub struct Reach {
    /// Global x coordinate reached, in [0, 1].
    pub x: f64,
    /// Global y coordinate of the carrying segment.
    pub y: f64,
    /// Row (Q edge index) the segment ends in.
    pub row: usize,
    /// Local t within that row.
    pub t: f64,
    /// True when the segment extends all the way to x = 1.
    pub reached_end: bool,
}

/// Default inflation: a billionth of the joint vertex-set diameter.
pub fn default_inflation(p: &PolyChain, q: &PolyChain) -> f64 {
    let mut d = 0.0f64;
    let all: Vec<Point2> = p.vertices().iter().chain(q.vertices()).copied().collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            d = d.max(a.dist(*b));
        }
    }
    1e-9 * d
}

pub struct FreeSpaceDiagram {
    m: usize,
    n: usize,
    eps: f64,
    delta: f64,
    eff_sq: f64,
    cells: Vec<CellQuad>,
    /// Cells examined by reach queries, for output-sensitivity accounting.
    query_cells: AtomicU64,
}

impl Clone for FreeSpaceDiagram {
    fn clone(&self) -> Self {
        Self {
            m: self.m,
            n: self.n,
            eps: self.eps,
            delta: self.delta,
            eff_sq: self.eff_sq,
            cells: self.cells.clone(),
            query_cells: AtomicU64::new(self.query_cells.load(Ordering::Relaxed)),
        }
    }
}

impl FreeSpaceDiagram {
    /// Builds all `m * n` cells. `delta` is the inflation added to `eps` for
    /// every query; pass 0 to query at the bare threshold.
    pub fn new(p: &PolyChain, q: &PolyChain, eps: f64, delta: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::BadInput(format!("threshold must be >= 0, got {eps}")));
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::BadInput(format!("inflation must be >= 0, got {delta}")));
        }
        let m = p.num_edges();
        let n = q.num_edges();
        let mut cells = Vec::with_capacity(m * n);
        for j in 0..n {
            let (q0, q1) = q.edge(j);
            for i in 0..m {
                let (p0, p1) = p.edge(i);
                cells.push(CellQuad::new(p0, p1, q0, q1));
            }
        }
        let eff = eps + delta;
        Ok(Self {
            m,
            n,
            eps,
            delta,
            eff_sq: eff * eff,
            cells,
            query_cells: AtomicU64::new(0),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eff_eps(&self) -> f64 {
        self.eps + self.delta
    }

    /// Squared effective radius, the threshold all queries compare against.
    pub fn eff_sq(&self) -> f64 {
        self.eff_sq
    }

    pub fn cell(&self, i: usize, j: usize) -> &CellQuad {
        &self.cells[j * self.m + i]
    }

    /// Diagram of the same pair with the roles of the chains swapped;
    /// columns become rows. The query counter starts fresh.
    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.m * self.n);
        for j in 0..self.m {
            for i in 0..self.n {
                cells.push(self.cell(j, i).transpose());
            }
        }
        Self {
            m: self.n,
            n: self.m,
            eps: self.eps,
            delta: self.delta,
            eff_sq: self.eff_sq,
            cells,
            query_cells: AtomicU64::new(0),
        }
    }

    pub fn is_free(&self, x: f64, y: f64) -> bool {
        let (i, s) = locate(x, self.m);
        let (j, t) = locate(y, self.n);
        self.cell(i, j).value(s, t) <= self.eff_sq + TOL * self.eff_sq.max(1.0)
    }

    pub fn query_cell_visits(&self) -> u64 {
        self.query_cells.load(Ordering::Relaxed)
    }

    pub fn reset_query_cell_visits(&self) {
        self.query_cells.store(0, Ordering::Relaxed);
    }

    fn touch(&self, k: u64) {
        self.query_cells.fetch_add(k, Ordering::Relaxed);
    }

    /// Free t-intervals on the vertical line at global `x`, per row, in
    /// local row coordinates. This is the active set a reach query starts
    /// from.
    pub fn free_t_intervals_at_x(&self, x: f64) -> Vec<(usize, ParamInterval)> {
        let (i, s) = locate(x, self.m);
        (0..self.n)
            .filter_map(|j| {
                self.cell(i, j)
                    .free_t_interval(s, self.eff_sq)
                    .map(|iv| (j, iv))
            })
            .collect()
    }

    /// Maximal open subintervals of the chosen axis missed by the projection
    /// of the free space. A nonempty answer means no segment cover of that
    /// axis exists at the effective radius.
    pub fn projection_cover_gaps(&self, axis: Axis) -> Vec<(f64, f64)> {
        match axis {
            Axis::X => self.x_gaps(),
            Axis::Y => self.transpose().x_gaps(),
        }
    }

    fn x_gaps(&self) -> Vec<(f64, f64)> {
        let m = self.m as f64;
        let mut ivs: Vec<(f64, f64)> = Vec::new();
        for i in 0..self.m {
            for j in 0..self.n {
                if let Some(iv) = self.cell(i, j).x_projection(self.eff_sq) {
                    ivs.push(((i as f64 + iv.lo) / m, (i as f64 + iv.hi) / m));
                }
            }
        }
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut gaps = Vec::new();
        let mut covered = 0.0f64;
        for (lo, hi) in ivs {
            if lo > covered + TOL {
                gaps.push((covered, lo));
            }
            covered = covered.max(hi);
        }
        if covered < 1.0 - TOL {
            gaps.push((covered, 1.0));
        }
        gaps
    }

    /// Farthest right endpoint over all horizontal free segments that start
    /// on the vertical line at `x0`, given the active free intervals on that
    /// line (from [`Self::free_t_intervals_at_x`]). Returns the reach and
    /// the carrying segment `[x0, reach.x]` at its height.
    ///
    /// Works column by column: a row's surviving t-interval is intersected
    /// with the free set on the column's right edge, which is exact because
    /// a horizontal segment inside a convex cell region is free iff its
    /// endpoints are. When a row dies its rightmost free point is scored in
    /// closed form; a row surviving past the last column reaches x = 1 (ties
    /// broken toward the lowest row). The query counter is charged once per
    /// (row, column) pair examined, including `n` for the caller's line scan.
    pub fn rightmost_horizontal_reach(
        &self,
        x0: f64,
        active: &[(usize, ParamInterval)],
    ) -> Result<(Reach, AxisSegment)> {
        let m = self.m;
        let n = self.n;
        self.touch(n as u64);
        if active.is_empty() {
            return Err(Error::Infeasible {
                axis: "x",
                gap_lo: x0,
                gap_hi: x0,
            });
        }
        let (col, _) = locate_snapped(x0, m);
        let mut alive: Vec<Option<ParamInterval>> = vec![None; n];
        for &(j, iv) in active {
            alive[j] = Some(iv);
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for i in col..m {
            if i > col {
                self.touch(alive.iter().filter(|a| a.is_some()).count() as u64);
            }
            for j in 0..n {
                let Some(a) = alive[j] else { continue };
                let cell = self.cell(i, j);
                let survive = cell
                    .free_t_interval(1.0, self.eff_sq)
                    .and_then(|r| a.intersect(r));
                if survive.is_some() {
                    alive[j] = survive;
                    continue;
                }
                alive[j] = None;
                let entry_s = (x0 * m as f64 - i as f64).clamp(0.0, 1.0);
                let (s, t) = cell
                    .rightmost_free_in(a, self.eff_sq)
                    .unwrap_or((entry_s, a.hi));
                let x = (i as f64 + s) / m as f64;
                if best.is_none_or(|(bx, _, _)| x > bx) {
                    best = Some((x, j, t));
                }
            }
            if i == m - 1 {
                if let Some((j, iv)) = (0..n).find_map(|j| alive[j].map(|iv| (j, iv))) {
                    let reach = Reach {
                        x: 1.0,
                        y: (j as f64 + iv.hi) / n as f64,
                        row: j,
                        t: iv.hi,
                        reached_end: true,
                    };
                    return Ok((reach, AxisSegment::horizontal(reach.y, x0, 1.0)));
                }
            }
            if alive.iter().all(Option::is_none) {
                break;
            }
        }
        let (x, row, t) = best.expect("every active row scores a reach when it dies");
        if x <= x0 + TOL {
            return Err(Error::NoProgress(x0));
        }
        let reach = Reach {
            x,
            y: (row as f64 + t) / n as f64,
            row,
            t,
            reached_end: false,
        };
        Ok((reach, AxisSegment::horizontal(reach.y, x0, x)))
    }
}

fn locate(x: f64, k: usize) -> (usize, f64) {
    let xm = x.clamp(0.0, 1.0) * k as f64;
    let i = (xm.floor() as usize).min(k - 1);
    (i, xm - i as f64)
}

/// Like [`locate`] but lands on the next column when `x` sits on its left
/// boundary, so column sweeps do not re-enter a finished column.
fn locate_snapped(x: f64, k: usize) -> (usize, f64) {
    let (mut i, mut s) = locate(x, k);
    if s > 1.0 - TOL && i + 1 < k {
        i += 1;
        s = 0.0;
    }
    (i, s)
}

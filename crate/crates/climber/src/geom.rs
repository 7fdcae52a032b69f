//! Points, parameter intervals, and polygonal chains.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance for geometric predicates and parameter snapping.
pub const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product, twice the signed triangle area.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn dist_sq(self, o: Self) -> f64 {
        (self - o).norm_sq()
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Closed interval of chain parameters, `0 <= lo <= hi <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ParamInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi + TOL || lo < -TOL || hi > 1.0 + TOL {
            return Err(Error::BadInterval { lo, hi });
        }
        let lo = lo.clamp(0.0, 1.0);
        let hi = hi.clamp(lo, 1.0);
        Ok(Self { lo, hi })
    }

    pub fn full() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn len(self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(self) -> bool {
        self.len() <= TOL
    }

    pub fn contains(self, t: f64) -> bool {
        t >= self.lo - TOL && t <= self.hi + TOL
    }

    pub fn intersect(self, o: Self) -> Option<Self> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi + TOL).then(|| Self {
            lo,
            hi: hi.max(lo),
        })
    }
}

/// Planar polygonal chain with at least two vertices and no zero-length
/// edges, parametrized uniformly per edge: parameter `i / m` sits on vertex
/// `i` of a chain with `m` edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct PolyChain {
    vertices: Vec<Point2>,
}

impl TryFrom<Vec<Point2>> for PolyChain {
    type Error = Error;
    fn try_from(v: Vec<Point2>) -> Result<Self> {
        PolyChain::new(v)
    }
}

impl From<PolyChain> for Vec<Point2> {
    fn from(c: PolyChain) -> Self {
        c.vertices
    }
}

impl PolyChain {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegenerateChain(format!(
                "need at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::DegenerateChain(format!(
                "non-finite vertex ({}, {})",
                p.x, p.y
            )));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            if w[0].dist_sq(w[1]) <= TOL * TOL {
                return Err(Error::DegenerateChain(format!(
                    "zero-length edge at index {i}"
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn from_coords(coords: &[(f64, f64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    /// Number of edges `m` (one less than the vertex count).
    pub fn num_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        (self.vertices[i], self.vertices[i + 1])
    }

    pub fn param_of_vertex(&self, i: usize) -> f64 {
        i as f64 / self.num_edges() as f64
    }

    /// Point at parameter `s in [0, 1]`. Parameters within `TOL` of a vertex
    /// (in edge units) snap to that vertex exactly.
    pub fn eval(&self, s: f64) -> Point2 {
        let m = self.num_edges();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let r = x.round();
        if (x - r).abs() <= TOL {
            return self.vertices[(r as usize).min(m)];
        }
        let i = (x.floor() as usize).min(m - 1);
        self.vertices[i].lerp(self.vertices[i + 1], x - i as f64)
    }

    /// Vertices of the subcurve over `iv`: the point at `iv.lo`, every chain
    /// vertex strictly inside, and the point at `iv.hi`.
    pub fn subchain_points(&self, iv: ParamInterval) -> Vec<Point2> {
        let m = self.num_edges() as f64;
        let mut pts = vec![self.eval(iv.lo)];
        let first = (iv.lo * m - TOL).ceil().max(0.0) as usize;
        let last = (iv.hi * m + TOL).floor().min(m) as usize;
        for i in first..=last {
            let t = i as f64 / m;
            if t > iv.lo + TOL / m && t < iv.hi - TOL / m {
                pts.push(self.vertices[i]);
            }
        }
        pts.push(self.eval(iv.hi));
        pts
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn max_edge_len(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .fold(0.0, f64::max)
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq <= TOL * TOL {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Smallest distance from `p` to the subcurve of `chain` over `iv`.
pub fn point_to_subcurve_distance(chain: &PolyChain, iv: ParamInterval, p: Point2) -> f64 {
    let pts = chain.subchain_points(iv);
    if pts.len() == 1 {
        return p.dist(pts[0]);
    }
    pts.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Largest distance from `p` to the subcurve of `chain` over `iv`.
/// Distance to `p` is convex along each segment, so the maximum over the
/// subcurve is attained at one of its vertices.
pub fn point_to_subcurve_max_distance(chain: &PolyChain, iv: ParamInterval, p: Point2) -> f64 {
    chain
        .subchain_points(iv)
        .iter()
        .map(|q| p.dist(*q))
        .fold(0.0, f64::max)
}

/// Smallest distance from `p` to the whole chain.
pub fn point_to_chain_distance(chain: &PolyChain, p: Point2) -> f64 {
    chain
        .vertices()
        .windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Nearest point of the chain to `p`, with its distance.
pub fn point_to_chain_nearest(chain: &PolyChain, p: Point2) -> (f64, Point2) {
    let mut best = (f64::INFINITY, chain.vertices()[0]);
    for w in chain.vertices().windows(2) {
        let ab = w[1] - w[0];
        let t = ((p - w[0]).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        let cand = w[0] + ab * t;
        let d = p.dist(cand);
        if d < best.0 {
            best = (d, cand);
        }
    }
    best
}

/// Smallest distance between segments `a1 a2` and `b1 b2`.
pub fn segment_segment_distance(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> f64 {
    if segments_properly_cross(a1, a2, b1, b2) {
        return 0.0;
    }
    point_segment_distance(a1, b1, b2)
        .min(point_segment_distance(a2, b1, b2))
        .min(point_segment_distance(b1, a1, a2))
        .min(point_segment_distance(b2, a1, a2))
}

/// Signed distance of `c` from the oriented line through `a` and `b`.
pub fn signed_line_distance(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a) / (b - a).norm()
}

/// True when the open interiors of the two segments cross transversally.
/// Touching endpoints and collinear overlaps do not count.
pub fn segments_properly_cross(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = signed_line_distance(a1, a2, b1);
    let d2 = signed_line_distance(a1, a2, b2);
    let d3 = signed_line_distance(b1, b2, a1);
    let d4 = signed_line_distance(b1, b2, a2);
    strictly_opposite(d1, d2) && strictly_opposite(d3, d4)
}

fn strictly_opposite(u: f64, v: f64) -> bool {
    (u > TOL && v < -TOL) || (u < -TOL && v > TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn rejects_degenerate_chains() {
        assert!(PolyChain::from_coords(&[(0.0, 0.0)]).is_err());
        assert!(PolyChain::from_coords(&[(0.0, 0.0), (0.0, 0.0)]).is_err());
        assert!(PolyChain::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(PolyChain::from_coords(&[(0.0, 0.0), (1.0, 0.0)]).is_ok());
    }

    #[test]
    fn eval_snaps_to_vertices() {
        let c = PolyChain::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        // 1/3 is not representable; the snap must still land on the vertex.
        let third = 1.0f64 / 3.0;
        assert_eq!(c.eval(third), pt(1.0, 0.0));
        assert_eq!(c.eval(2.0 * third), pt(1.0, 1.0));
        assert_eq!(c.eval(0.0), pt(0.0, 0.0));
        assert_eq!(c.eval(1.0), pt(2.0, 1.0));
        let mid = c.eval(0.5);
        assert!((mid.x - 1.0).abs() < 1e-12 && (mid.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subcurve_min_distance_clips_the_chain() {
        let c = PolyChain::from_coords(&[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        let iv = ParamInterval::new(0.0, 0.25).unwrap();
        // Nearest point of the clipped piece to (1, 1) is its right endpoint
        // (0.5, 0), at distance sqrt(1.25).
        let d = point_to_subcurve_distance(&c, iv, pt(1.0, 1.0));
        assert!((d - 1.118033988749895).abs() < 1e-12);
        // The full chain passes right under the query point.
        let d_full = point_to_subcurve_distance(&c, ParamInterval::full(), pt(1.0, 1.0));
        assert!((d_full - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subcurve_max_distance_hits_far_endpoint() {
        let c = PolyChain::from_coords(&[(0.0, 0.0), (2.0, 0.0)]).unwrap();
        let iv = ParamInterval::new(0.0, 0.25).unwrap();
        let d = point_to_subcurve_max_distance(&c, iv, pt(1.0, 1.0));
        // Farthest point of the clipped piece is (0, 0), at distance sqrt(2).
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn on_curve_points_have_zero_distance() {
        let c = PolyChain::from_coords(&[(0.0, 0.0), (1.0, 1.0), (3.0, 0.0)]).unwrap();
        for s in [0.0, 0.1, 0.5, 0.77, 1.0] {
            let p = c.eval(s);
            assert!(point_to_subcurve_distance(&c, ParamInterval::full(), p) < 1e-12);
        }
    }

    #[test]
    fn segment_distance_disjoint_pair() {
        let d = segment_segment_distance(pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 1.0), pt(3.0, 1.0));
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn segment_crossings() {
        assert!(segments_properly_cross(
            pt(0.0, 0.0),
            pt(1.0, 1.0),
            pt(0.0, 1.0),
            pt(1.0, 0.0)
        ));
        // Shared endpoint: a touch, not a crossing.
        assert!(!segments_properly_cross(
            pt(0.0, 0.0),
            pt(1.0, 1.0),
            pt(1.0, 1.0),
            pt(2.0, 0.0)
        ));
        // Collinear overlap.
        assert!(!segments_properly_cross(
            pt(0.0, 0.0),
            pt(2.0, 0.0),
            pt(1.0, 0.0),
            pt(3.0, 0.0)
        ));
        // T-junction: endpoint in the other segment's interior.
        assert!(!segments_properly_cross(
            pt(0.0, 0.0),
            pt(2.0, 0.0),
            pt(1.0, 0.0),
            pt(1.0, 1.0)
        ));
        assert!(segment_segment_distance(pt(0.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0), pt(1.0, 0.0)) < 1e-12);
    }

    fn arb_chain() -> impl Strategy<Value = PolyChain> {
        proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..8).prop_filter_map(
            "degenerate",
            |coords| PolyChain::from_coords(&coords).ok(),
        )
    }

    proptest! {
        #[test]
        fn eval_stays_on_chain(c in arb_chain(), s in 0.0f64..=1.0) {
            let p = c.eval(s);
            prop_assert!(point_to_subcurve_distance(&c, ParamInterval::full(), p) < 1e-7);
        }

        #[test]
        fn min_distance_matches_dense_sampling(
            c in arb_chain(),
            (lo, hi) in (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| if a <= b { (a, b) } else { (b, a) }),
            px in -60.0f64..60.0,
            py in -60.0f64..60.0,
        ) {
            let iv = ParamInterval::new(lo, hi).unwrap();
            let p = Point2::new(px, py);
            let d = point_to_subcurve_distance(&c, iv, p);
            let dmax = point_to_subcurve_max_distance(&c, iv, p);
            let mut sample_min = f64::INFINITY;
            let mut sample_max = 0.0f64;
            let steps = 400;
            for k in 0..=steps {
                let s = lo + (hi - lo) * k as f64 / steps as f64;
                let q = c.eval(s);
                sample_min = sample_min.min(p.dist(q));
                sample_max = sample_max.max(p.dist(q));
            }
            // Sampling can only overshoot the min and undershoot the max.
            prop_assert!(d <= sample_min + 1e-7);
            prop_assert!(sample_min <= d + c.length() / steps as f64 + 1e-7);
            prop_assert!(dmax + 1e-7 >= sample_max);
            prop_assert!(dmax <= sample_max + c.length() / steps as f64 + 1e-7);
        }

        #[test]
        fn interval_intersection_is_commutative(
            a in (0.0f64..=1.0, 0.0f64..=1.0),
            b in (0.0f64..=1.0, 0.0f64..=1.0),
        ) {
            let ia = ParamInterval::new(a.0.min(a.1), a.0.max(a.1)).unwrap();
            let ib = ParamInterval::new(b.0.min(b.1), b.0.max(b.1)).unwrap();
            prop_assert_eq!(ia.intersect(ib), ib.intersect(ia));
        }
    }
}

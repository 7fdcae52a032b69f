//! Satisfiability gadgets: compiles an embedded rectilinear 3-SAT drawing
//! into a pair of weakly simple chains whose k-station solutions at
//! threshold 1 encode satisfying assignments.
//!
//! The drawing places variables as integer segments on the x-axis and
//! clauses as vertices above or below, each joined to its variables by
//! vertical edges with at most one bend. The compiler scales the drawing
//! (4 horizontally, 8 vertically) and replaces every edge by a corridor
//! loop traversed by both chains. Stations must alternate one unit apart
//! along these shared corridors, and the parity of the alternation on a
//! variable's corridors carries its truth value. Three fixtures read that
//! parity near each clause: a corner station on the straight corridor and
//! one spur tip per bent corridor, each exactly at distance 1 from a short
//! "stub" piece of the clause gadget. The stub is coverable if and only if
//! one of the clause's literals is true.

use serde::{Deserialize, Serialize};

use crate::geom::{segments_properly_cross, Point2, PolyChain, TOL};
use crate::station::StationSolution;
use crate::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Half the height of a unit hexagon edge step.
const HEX_X: f64 = 0.866025403784438646763; // sqrt(3)/2

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariableDef {
    pub name: String,
    /// Inclusive integer endpoints of the segment on the x-axis; the
    /// length equals the variable's degree.
    pub start: i64,
    pub end: i64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LiteralRef {
    pub var: usize,
    pub negated: bool,
    /// Unit cell of the variable segment where the edge attaches:
    /// `attach` must lie in `start..end`.
    pub attach: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClauseDef {
    pub literals: Vec<LiteralRef>,
    /// Clause vertex on the integer grid; `y != 0`, sign selects the
    /// half-plane. For 3 literals the vertex sits on the middle
    /// variable's straight edge; for 2 literals on the rightmost's.
    pub vertex: (i64, i64),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RectilinearDrawing {
    pub variables: Vec<VariableDef>,
    pub clauses: Vec<ClauseDef>,
}

impl RectilinearDrawing {
    /// The built-in demonstration instance
    /// (x1 | x3 | x5) & (x1 | !x5) & (x2 | !x3 | !x4).
    pub fn fig2() -> Self {
        let var = |name: &str, start, end| VariableDef {
            name: name.into(),
            start,
            end,
        };
        let lit = |var, negated, attach| LiteralRef {
            var,
            negated,
            attach,
        };
        RectilinearDrawing {
            variables: vec![
                var("x1", 0, 2),
                var("x2", 3, 4),
                var("x3", 5, 7),
                var("x4", 8, 9),
                var("x5", 10, 12),
            ],
            clauses: vec![
                ClauseDef {
                    literals: vec![lit(0, false, 1), lit(2, false, 5), lit(4, false, 10)],
                    vertex: (5, 1),
                },
                ClauseDef {
                    literals: vec![lit(0, false, 0), lit(4, true, 11)],
                    vertex: (11, 2),
                },
                ClauseDef {
                    literals: vec![lit(1, false, 3), lit(2, true, 6), lit(3, true, 8)],
                    vertex: (6, -1),
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadInput(msg));
        if self.variables.is_empty() {
            return bad("drawing needs at least one variable".into());
        }
        for w in self.variables.windows(2) {
            if w[1].start != w[0].end + 1 {
                return bad(format!(
                    "variable segments must be one unit apart, got gap {}..{}",
                    w[0].end, w[1].start
                ));
            }
        }
        let mut degree = vec![0usize; self.variables.len()];
        let mut used: Vec<Vec<i64>> = vec![Vec::new(); self.variables.len()];
        for (ci, c) in self.clauses.iter().enumerate() {
            if c.vertex.1 == 0 {
                return bad(format!("clause {ci} vertex lies on the x-axis"));
            }
            if !(c.literals.len() == 2 || c.literals.len() == 3) {
                return bad(format!("clause {ci} needs 2 or 3 literals"));
            }
            for l in &c.literals {
                let v = self
                    .variables
                    .get(l.var)
                    .ok_or_else(|| Error::BadInput(format!("clause {ci}: no variable {}", l.var)))?;
                if l.attach < v.start || l.attach >= v.end {
                    return bad(format!(
                        "clause {ci}: attach {} outside cells {}..{}",
                        l.attach, v.start, v.end
                    ));
                }
                if used[l.var].contains(&l.attach) {
                    return bad(format!(
                        "variable {} reuses attach cell {}",
                        v.name, l.attach
                    ));
                }
                used[l.var].push(l.attach);
                degree[l.var] += 1;
            }
            // The straight edge drops from the vertex; everyone else bends once.
            let straight = c.literals.iter().filter(|l| l.attach == c.vertex.0).count();
            if straight != 1 {
                return bad(format!(
                    "clause {ci}: exactly one literal must attach directly under the vertex"
                ));
            }
            let xs: Vec<i64> = c.literals.iter().map(|l| l.attach).collect();
            let straight_x = c.vertex.0;
            let ok = if c.literals.len() == 3 {
                xs.iter().filter(|&&x| x < straight_x).count() == 1
                    && xs.iter().filter(|&&x| x > straight_x).count() == 1
            } else {
                xs.iter().all(|&x| x <= straight_x)
            };
            if !ok {
                return bad(format!(
                    "clause {ci}: vertex must sit over the middle (3 literals) or rightmost (2) variable"
                ));
            }
        }
        for (vi, v) in self.variables.iter().enumerate() {
            if (v.end - v.start) as usize != degree[vi] {
                return bad(format!(
                    "variable {} has segment length {} but degree {}",
                    v.name,
                    v.end - v.start,
                    degree[vi]
                ));
            }
        }
        Ok(())
    }
}

/// What one clause/literal pair looks like after placement.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Role {
    Straight,
    BentLeft,
    BentRight,
}

/// Which gadget a recorded subchain belongs to. Spans nest: each clause
/// span lies inside the literal span whose corridor hosts it, and negation
/// spans lie inside their literal span.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetKind {
    /// Corridor loop for one clause edge.
    Literal { clause: usize, literal: usize },
    /// Parity jog on a literal corridor.
    Negation { clause: usize, literal: usize },
    /// Weave between consecutive variables; `left_var` is the left one.
    Separation { left_var: usize },
    Clause { clause: usize },
}

/// Arc-length ranges of one gadget's subchains in the two chains.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GadgetSpan {
    pub kind: GadgetKind,
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
}

/// Fixed per-clause local description, anchored at the junction point on
/// the straight corridor's left leg, two units inside from the corner.
#[derive(Clone, Debug)]
struct ClauseMeta {
    base: Point2,
    /// +1 above the axis, -1 mirrored below.
    sign: f64,
    /// Chain arcs at the lower star (entry into the clause gadget).
    p_start: f64,
    q_start: f64,
    /// Literal index (into the clause's list) per role.
    straight_lit: usize,
    left_lit: Option<usize>,
    right_lit: Option<usize>,
    /// Global P arcs of the spur tips that can guard the stub.
    left_tip: Option<f64>,
    right_tip: Option<f64>,
}

impl ClauseMeta {
    fn p_end(&self) -> f64 {
        self.p_start + CLAUSE_P_LEN
    }
}

/// A station duty on a corridor stretch: the point at this local arc must
/// be a subdivision point of P exactly when the literal is true.
#[derive(Clone, Copy, Debug)]
struct Duty {
    local: f64,
    clause: usize,
    literal: usize,
}

/// One maximal shared corridor between consecutive critical points.
#[derive(Clone, Debug)]
struct Stretch {
    p_start: f64,
    q_start: f64,
    len: f64,
    duties: Vec<Duty>,
}

#[derive(Clone, Debug)]
struct Separation {
    p_start: f64,
    q_start: f64,
}

/// The compiled instance: chains, budget, threshold, and the placement
/// data needed to turn assignments into station solutions.
#[derive(Clone, Debug)]
pub struct GadgetInstance {
    pub p: PolyChain,
    pub q: PolyChain,
    pub k: usize,
    pub eps: f64,
    pub critical_points: Vec<Point2>,
    pub num_vars: usize,
    /// Which subchains belong to which gadget, in construction order.
    pub gadget_index: Vec<GadgetSpan>,
    stretches: Vec<Stretch>,
    separations: Vec<Separation>,
    clauses: Vec<ClauseMeta>,
    clause_defs: Vec<ClauseDef>,
    p_cum: Vec<f64>,
    q_cum: Vec<f64>,
}

impl GadgetInstance {
    /// Total pitch budget contributed by the shared variable corridors;
    /// `k` minus this is the fixed per-separation and per-clause part.
    pub fn corridor_pitch_count(&self) -> usize {
        self.stretches.iter().map(|s| s.len as usize + 1).sum()
    }
}

const GAMMA: f64 = 2.0 * SQRT2 - 2.0;
const CLAUSE_P_LEN: f64 = 4.0 + 4.0 * SQRT2;
const CLAUSE_Q_LEN: f64 = 9.0 + 2.0 * SQRT2;

struct Builder {
    pv: Vec<Point2>,
    qv: Vec<Point2>,
    p_arc: f64,
    q_arc: f64,
    stretches: Vec<Stretch>,
    separations: Vec<Separation>,
    clauses: Vec<ClauseMeta>,
    criticals: Vec<Point2>,
    spans: Vec<GadgetSpan>,
    open: Option<(f64, f64, Vec<Duty>)>,
}

impl Builder {
    fn new(start: Point2) -> Self {
        Builder {
            pv: vec![start],
            qv: vec![start],
            p_arc: 0.0,
            q_arc: 0.0,
            stretches: Vec::new(),
            separations: Vec::new(),
            clauses: Vec::new(),
            criticals: vec![start],
            spans: Vec::new(),
            open: Some((0.0, 0.0, Vec::new())),
        }
    }

    /// Marks the gadget span walked since `(p0, q0)`.
    fn span(&mut self, kind: GadgetKind, p0: f64, q0: f64) {
        self.spans.push(GadgetSpan {
            kind,
            p_range: (p0, self.p_arc),
            q_range: (q0, self.q_arc),
        });
    }

    fn pos(&self) -> Point2 {
        *self.pv.last().unwrap()
    }

    /// Extends both chains by a shared segment.
    fn walk(&mut self, to: Point2) {
        let d = self.pos().dist(to);
        debug_assert!(d > TOL);
        self.pv.push(to);
        self.qv.push(to);
        self.p_arc += d;
        self.q_arc += d;
    }

    fn duty(&mut self, clause: usize, literal: usize) {
        let (ps, _, duties) = self.open.as_mut().expect("duty outside a stretch");
        let local = self.p_arc - *ps;
        duties.push(Duty {
            local,
            clause,
            literal,
        });
    }

    /// Ends the current corridor stretch at a critical point.
    fn close_stretch(&mut self) {
        let (ps, qs, duties) = self.open.take().expect("no open stretch");
        let len = self.p_arc - ps;
        debug_assert!((len - (self.q_arc - qs)).abs() < 1e-9);
        debug_assert!((len - len.round()).abs() < 1e-9, "stretch length {len} not integer");
        if len > TOL {
            self.stretches.push(Stretch {
                p_start: ps,
                q_start: qs,
                len: len.round(),
                duties,
            });
        }
        self.criticals.push(self.pos());
    }

    fn open_stretch(&mut self) {
        debug_assert!(self.open.is_none());
        self.open = Some((self.p_arc, self.q_arc, Vec::new()));
    }

    /// The five-unit-segment jog replacing the axis-adjacent four units of
    /// a corridor leg: three verticals and two segments at slopes
    /// +/- sqrt(3)/3, bulging one half-step toward the loop interior.
    fn zigzag(&mut self, ci: usize, lit: usize, sign: f64) {
        let (p0, q0) = (self.p_arc, self.q_arc);
        let b = self.pos();
        self.walk(b + Point2 { x: 0.0, y: sign });
        self.walk(b + Point2 { x: HEX_X, y: sign * 1.5 });
        self.walk(b + Point2 { x: 0.0, y: sign * 2.0 });
        self.walk(b + Point2 { x: 0.0, y: sign * 3.0 });
        self.walk(b + Point2 { x: 0.0, y: sign * 4.0 });
        self.span(GadgetKind::Negation { clause: ci, literal: lit }, p0, q0);
    }

    /// Emits the clause gadget between its two stars. P makes the
    /// out-and-back excursion past the window point; Q takes the
    /// half-hexagon between the stars and the longer loop that turns
    /// around at the far point. Both loops hang off the junction.
    fn clause_gadget(&mut self, idx: usize, base: Point2, sign: f64) {
        self.close_stretch();
        let at = |x: f64, y: f64| base + Point2 { x, y: sign * y };
        let p_start = self.p_arc;
        let q_start = self.q_arc;
        // P: junction, west, up the diagonal to the turnaround, back.
        for (x, y) in [
            (0.0, 0.0),
            (-2.0, 0.0),
            (-2.0, 1.0),
            (-SQRT2, 3.0 - SQRT2),
            (-2.0, 1.0),
            (-2.0, 0.0),
            (0.0, 0.0),
            (0.0, 1.0),
        ] {
            let to = at(x, y);
            let d = self.pos().dist(to);
            self.pv.push(to);
            self.p_arc += d;
        }
        // Q: half-hexagon star to star (bulging away from the excursion so
        // the two Q loops stay disjoint), down to the junction, west, out
        // the diagonal past the turnaround window to the far point, back.
        let mut qlast = *self.qv.last().unwrap();
        for (x, y) in [
            (HEX_X, -0.5),
            (HEX_X, 0.5),
            (0.0, 1.0),
            (0.0, 0.0),
            (-2.0, 0.0),
            (-2.0, 1.0),
            (-0.5, 2.5),
            (-1.0, 2.0),
            (-1.0, 1.0),
            (0.0, 1.0),
        ] {
            let to = at(x, y);
            self.q_arc += qlast.dist(to);
            self.qv.push(to);
            qlast = to;
        }
        debug_assert!((self.p_arc - p_start - CLAUSE_P_LEN).abs() < 1e-9);
        debug_assert!((self.q_arc - q_start - CLAUSE_Q_LEN).abs() < 1e-9);
        let meta = &mut self.clauses[idx];
        meta.base = base;
        meta.sign = sign;
        meta.p_start = p_start;
        meta.q_start = q_start;
        // The lower star was recorded when the stretch closed.
        self.criticals.push(at(0.0, 1.0));
        self.span(GadgetKind::Clause { clause: idx }, p_start, q_start);
        self.open_stretch();
    }

    /// Corridor loop for a straight clause edge: up the left leg (through
    /// the clause gadget), over the top, down the right leg.
    fn straight_loop(&mut self, ci: usize, lit: usize, negated: bool, cx: f64, h: f64, sign: f64) {
        let (p0, q0) = (self.p_arc, self.q_arc);
        let (fl, fr) = (cx - 1.0, cx + 1.0);
        debug_assert!((self.pos() - Point2 { x: fl, y: 0.0 }).norm() < TOL);
        if negated_gets_jog(Role::Straight, negated) {
            self.zigzag(ci, lit, sign);
        }
        // On the shortest legs a jog already reaches the gadget entry.
        let below = Point2 { x: fl, y: sign * (h - 4.0) };
        if self.pos().dist(below) > TOL {
            self.walk(below);
        }
        self.clause_gadget(ci, Point2 { x: fl, y: sign * (h - 3.0) }, sign);
        self.walk(Point2 { x: fl, y: sign * (h - 1.0) });
        self.duty(ci, lit);
        self.walk(Point2 { x: fr, y: sign * (h - 1.0) });
        self.walk(Point2 { x: fr, y: 0.0 });
        self.span(GadgetKind::Literal { clause: ci, literal: lit }, p0, q0);
    }

    /// Corridor loop for a bent clause edge: up, along the outer run, a
    /// spur to the guard point beside the clause gadget, and back down.
    #[allow(clippy::too_many_arguments)]
    fn bent_loop(
        &mut self,
        ci: usize,
        lit: usize,
        negated: bool,
        foot: f64,
        cx: f64,
        h: f64,
        sign: f64,
        side: Role,
    ) {
        let (p0, q0) = (self.p_arc, self.q_arc);
        let (fl, fr) = (foot, foot + 2.0);
        let run = sign * (h + 1.0);
        debug_assert!((self.pos() - Point2 { x: fl, y: 0.0 }).norm() < TOL);
        if negated_gets_jog(side, negated) {
            self.zigzag(ci, lit, sign);
        }
        self.walk(Point2 { x: fl, y: run });
        let tip;
        match side {
            Role::BentLeft => {
                let dx = cx - 3.0;
                self.walk(Point2 { x: dx, y: run });
                self.walk(Point2 { x: dx, y: sign * (h - 1.0) });
                tip = Point2 { x: cx - 2.0, y: sign * (h - 1.0) };
                self.walk(tip);
                self.duty(ci, lit);
                self.clauses[ci].left_tip = Some(self.p_arc);
                self.walk(Point2 { x: dx, y: sign * (h - 1.0) });
                self.walk(Point2 { x: dx, y: run });
            }
            Role::BentRight => {
                let dx = cx - 2.0;
                self.walk(Point2 { x: dx, y: run });
                tip = Point2 { x: dx, y: sign * h };
                self.walk(tip);
                self.duty(ci, lit);
                self.clauses[ci].right_tip = Some(self.p_arc);
                self.walk(Point2 { x: dx, y: run });
            }
            Role::Straight => unreachable!(),
        }
        self.walk(Point2 { x: fr, y: run });
        self.walk(Point2 { x: fr, y: 0.0 });
        self.span(GadgetKind::Literal { clause: ci, literal: lit }, p0, q0);
    }

    /// The separation weave between two variables: both chains follow the
    /// same three-unit-high arch between the two stars, three units apart.
    fn separation(&mut self, left_var: usize) {
        self.close_stretch();
        let b = self.pos();
        self.separations.push(Separation {
            p_start: self.p_arc,
            q_start: self.q_arc,
        });
        let (p0, q0) = (self.p_arc, self.q_arc);
        self.walk(b + Point2 { x: 0.0, y: 3.0 });
        self.walk(b + Point2 { x: 3.0, y: 3.0 });
        self.walk(b + Point2 { x: 3.0, y: 0.0 });
        self.criticals.push(self.pos());
        self.span(GadgetKind::Separation { left_var }, p0, q0);
        self.open_stretch();
    }
}

/// Which corridors carry the five-segment jog: straight edges of positive
/// literals and bent edges of negated ones. This keeps the corridor
/// stretches adjacent to every three-literal clause at even length, so the
/// unit alternation meets the clause stars in a consistent phase.
fn negated_gets_jog(role: Role, negated: bool) -> bool {
    match role {
        Role::Straight => !negated,
        Role::BentLeft | Role::BentRight => negated,
    }
}

pub fn build_reduction(d: &RectilinearDrawing) -> Result<GadgetInstance> {
    d.validate()?;
    let mut b = run_walk(d);
    b.criticals.dedup_by(|a, b| a.dist(*b) < TOL);
    let k = budget_of(&b);
    let p = PolyChain::new(b.pv)?;
    let q = PolyChain::new(b.qv)?;
    let p_cum = cumulative(&p);
    let q_cum = cumulative(&q);
    Ok(GadgetInstance {
        p,
        q,
        k,
        eps: 1.0,
        critical_points: b.criticals,
        num_vars: d.variables.len(),
        gadget_index: b.spans,
        stretches: b.stretches,
        separations: b.separations,
        clauses: b.clauses,
        clause_defs: d.clauses.clone(),
        p_cum,
        q_cum,
    })
}

/// Runs the drawing compiler; callers read chains and layout records off
/// the returned builder. The drawing must already be validated.
fn run_walk(d: &RectilinearDrawing) -> Builder {
    // Gather per-variable connections: (attach, clause, literal index).
    let mut conns: Vec<Vec<(i64, usize, usize)>> = vec![Vec::new(); d.variables.len()];
    for (ci, c) in d.clauses.iter().enumerate() {
        for (li, l) in c.literals.iter().enumerate() {
            conns[l.var].push((l.attach, ci, li));
        }
    }
    for v in conns.iter_mut() {
        v.sort();
    }
    let mut b = Builder::new(Point2 {
        x: 4.0 * d.variables[0].start as f64,
        y: 0.0,
    });
    b.clauses = d
        .clauses
        .iter()
        .map(|c| {
            let straight_lit = c
                .literals
                .iter()
                .position(|l| l.attach == c.vertex.0)
                .unwrap();
            let left_lit = c.literals.iter().position(|l| l.attach < c.vertex.0);
            let right_lit = c.literals.iter().position(|l| l.attach > c.vertex.0);
            ClauseMeta {
                base: Point2 { x: 0.0, y: 0.0 },
                sign: 1.0,
                p_start: 0.0,
                q_start: 0.0,
                straight_lit,
                left_lit,
                right_lit,
                left_tip: None,
                right_tip: None,
            }
        })
        .collect();
    for (vi, v) in d.variables.iter().enumerate() {
        if vi > 0 {
            // One unit belongs to the previous variable's corridor, then
            // the three-unit separation weave.
            let x = b.pos().x;
            b.walk(Point2 { x: x + 1.0, y: 0.0 });
            b.separation(vi - 1);
        }
        for &(attach, ci, li) in &conns[vi] {
            let c = &d.clauses[ci];
            let lit = c.literals[li];
            let sign = if c.vertex.1 > 0 { 1.0 } else { -1.0 };
            let h = 8.0 * c.vertex.1.unsigned_abs() as f64;
            let cx = 4.0 * c.vertex.0 as f64 + 2.0;
            let foot = 4.0 * attach as f64 + 1.0;
            if b.pos().x < foot - TOL {
                b.walk(Point2 { x: foot, y: 0.0 });
            }
            let role = if attach == c.vertex.0 {
                Role::Straight
            } else if attach < c.vertex.0 {
                Role::BentLeft
            } else {
                Role::BentRight
            };
            match role {
                Role::Straight => b.straight_loop(ci, li, lit.negated, cx, h, sign),
                _ => b.bent_loop(ci, li, lit.negated, foot, cx, h, sign, role),
            }
        }
        let end = 4.0 * v.end as f64;
        if b.pos().x < end - TOL {
            b.walk(Point2 { x: end, y: 0.0 });
        }
    }
    b.close_stretch();
    b
}

/// The count identity behind the reduction: each corridor stretch of
/// length `len` carries `len + 1` pitches across the two chains, each
/// separation 10, each clause 12.
fn budget_of(b: &Builder) -> usize {
    b.stretches
        .iter()
        .map(|s| s.len as usize + 1)
        .sum::<usize>()
        + 10 * b.separations.len()
        + 12 * b.clauses.len()
}

fn cumulative(c: &PolyChain) -> Vec<f64> {
    let vs = c.vertices();
    let mut cum = Vec::with_capacity(vs.len());
    cum.push(0.0);
    for w in vs.windows(2) {
        cum.push(cum.last().unwrap() + w[0].dist(w[1]));
    }
    cum
}

fn arc_to_param(cum: &[f64], arc: f64) -> f64 {
    let m = cum.len() - 1;
    let total = cum[m];
    let arc = arc.clamp(0.0, total);
    let mut i = match cum.binary_search_by(|c| c.total_cmp(&arc)) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    if i >= m {
        return 1.0;
    }
    // Land inside the edge, not on a zero-length tail.
    while cum[i + 1] - cum[i] <= TOL && i + 1 < m {
        i += 1;
    }
    let t = (arc - cum[i]) / (cum[i + 1] - cum[i]);
    (i as f64 + t) / m as f64
}

/// The station budget for a drawing: one pitch per unit of corridor
/// stretch plus one per stretch, ten per separation, twelve per clause.
/// Stretch lengths are measured on the generated corridor geometry
/// (lattice portions contribute their taxicab length, each jog adds one).
pub fn expected_k(d: &RectilinearDrawing) -> Result<usize> {
    d.validate()?;
    Ok(budget_of(&run_walk(d)))
}

/// Which unit marks of a stretch become P subdivision points. `odd_bit`
/// selects the odd marks; the complement (plus both ends) goes to Q.
fn pattern_cuts(len: u64, odd_bit: bool) -> (Vec<u64>, Vec<u64>) {
    let marks: Vec<u64> = (0..=len).collect();
    let (mut pc, mut qc): (Vec<u64>, Vec<u64>) = (Vec::new(), Vec::new());
    for &m in &marks {
        let odd = m % 2 == 1;
        if m == 0 || m == len || odd == odd_bit {
            pc.push(m);
        }
        if m == 0 || m == len || odd != odd_bit {
            qc.push(m);
        }
    }
    (pc, qc)
}

/// Station for a pitch `[a, b]` of one chain given the other chain's cut
/// marks: the interior mark for two-unit pitches, the shared end mark for
/// unit pitches.
fn pitch_station(a: u64, b: u64, other: &[u64]) -> u64 {
    if b - a == 2 {
        a + 1
    } else if other.contains(&a) {
        a
    } else {
        b
    }
}

struct CutAcc {
    arcs: Vec<f64>,
    /// Per pitch: the other chain's arc of the assigned station.
    assigns: Vec<f64>,
}

impl CutAcc {
    fn new() -> Self {
        CutAcc {
            arcs: vec![0.0],
            assigns: Vec::new(),
        }
    }
    fn push(&mut self, arc: f64, station_other_arc: f64) {
        let last = *self.arcs.last().unwrap();
        debug_assert!(arc > last + TOL, "cut arcs must increase: {last} -> {arc}");
        self.arcs.push(arc);
        self.assigns.push(station_other_arc);
    }
}

/// Lays stations for a truth assignment. The result always has exactly
/// `k` stations; it verifies at eps = 1 precisely when the assignment
/// satisfies the formula (a false clause leaves its stub pitch at
/// distance ~1.58 from the best remaining station).
pub fn assignment_to_solution(
    inst: &GadgetInstance,
    values: &[bool],
) -> Result<StationSolution> {
    if values.len() != inst.num_vars {
        return Err(Error::BadInput(format!(
            "expected {} truth values, got {}",
            inst.num_vars,
            values.len()
        )));
    }
    let lit_true = |ci: usize, li: usize| {
        let l = inst.clause_defs[ci].literals[li];
        values[l.var] != l.negated
    };
    let mut p_cuts = CutAcc::new();
    let mut q_cuts = CutAcc::new();
    // Events ordered by arc: stretches, separations, and clauses all
    // advance both chains monotonically, so emit in p_start order.
    enum Ev<'a> {
        Str(&'a Stretch),
        Sep(&'a Separation),
        Cl(usize),
    }
    let mut events: Vec<(f64, Ev)> = Vec::new();
    for s in &inst.stretches {
        events.push((s.p_start, Ev::Str(s)));
    }
    for s in &inst.separations {
        events.push((s.p_start, Ev::Sep(s)));
    }
    for (i, c) in inst.clauses.iter().enumerate() {
        events.push((c.p_start, Ev::Cl(i)));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, ev) in events {
        match ev {
            Ev::Str(s) => {
                // Resolve the parity bit from the stretch's duties: the
                // duty point must be a P cut exactly when its literal is
                // true. Conflicting duties cannot arise for valid
                // drawings (tips on one stretch share their variable).
                let mut bit: Option<bool> = None;
                for d in &s.duties {
                    let local = d.local.round() as u64;
                    debug_assert!((d.local - local as f64).abs() < 1e-9);
                    let want = lit_true(d.clause, d.literal) == (local % 2 == 1);
                    if let Some(prev) = bit {
                        if prev != want {
                            return Err(Error::BadInput(
                                "conflicting station parity duties on one corridor".into(),
                            ));
                        }
                    }
                    bit = Some(want);
                }
                let odd_bit = bit.unwrap_or(false);
                let len = s.len.round() as u64;
                let (pc, qc) = pattern_cuts(len, odd_bit);
                for w in pc.windows(2) {
                    let st = pitch_station(w[0], w[1], &qc);
                    p_cuts.push(s.p_start + w[1] as f64, s.q_start + st as f64);
                }
                for w in qc.windows(2) {
                    let st = pitch_station(w[0], w[1], &pc);
                    q_cuts.push(s.q_start + w[1] as f64, s.p_start + st as f64);
                }
            }
            Ev::Sep(s) => {
                // Nine units of arch, five pitches per chain, stations on
                // the stars and every other unit mark.
                let pc = [0u64, 2, 4, 6, 8, 9];
                let qc = [0u64, 1, 3, 5, 7, 9];
                for w in pc.windows(2) {
                    let st = pitch_station(w[0], w[1], &qc);
                    p_cuts.push(s.p_start + w[1] as f64, s.q_start + st as f64);
                }
                for w in qc.windows(2) {
                    let st = pitch_station(w[0], w[1], &pc);
                    q_cuts.push(s.q_start + w[1] as f64, s.p_start + st as f64);
                }
            }
            Ev::Cl(ci) => {
                let c = &inst.clauses[ci];
                // P cuts at fixed local arcs; stations on Q by local arc.
                let pa = [1.0, 3.0, 4.0 + GAMMA, 5.0 + 2.0 * GAMMA, 7.0 + 2.0 * GAMMA, CLAUSE_P_LEN];
                let pst = [0.0, 5.0, 7.0, 7.0, 5.0, CLAUSE_Q_LEN];
                for (a, st) in pa.iter().zip(pst) {
                    p_cuts.push(c.p_start + a, c.q_start + st);
                }
                // The stub pitch is guarded by the corner station of the
                // straight corridor, a spur tip, or (when every literal is
                // false) left pointing at the nearest star, which the
                // verifier then rejects.
                let stub = if lit_true(ci, c.straight_lit) {
                    c.p_end() + 1.0
                } else if c.right_lit.is_some_and(|li| lit_true(ci, li)) {
                    c.right_tip.expect("right spur tip recorded")
                } else if c.left_lit.is_some_and(|li| lit_true(ci, li)) {
                    c.left_tip.expect("left spur tip recorded")
                } else {
                    c.p_end()
                };
                let qa = [
                    5.0,
                    7.0,
                    7.0 + SQRT2,
                    7.0 + 2.0 * SQRT2,
                    8.0 + 2.0 * SQRT2,
                    CLAUSE_Q_LEN,
                ];
                let qst = [
                    c.p_start + 1.0,
                    c.p_start + 3.0,
                    c.p_start + 4.0 + GAMMA,
                    stub,
                    c.p_start + 4.0 + GAMMA,
                    c.p_start + CLAUSE_P_LEN,
                ];
                for (a, st) in qa.iter().zip(qst) {
                    q_cuts.push(c.q_start + a, st);
                }
            }
        }
    }
    let total_p = *inst.p_cum.last().unwrap();
    let total_q = *inst.q_cum.last().unwrap();
    debug_assert!((p_cuts.arcs.last().unwrap() - total_p).abs() < 1e-9);
    debug_assert!((q_cuts.arcs.last().unwrap() - total_q).abs() < 1e-9);
    let a: Vec<f64> = p_cuts.arcs.iter().map(|&x| arc_to_param(&inst.p_cum, x)).collect();
    let bv: Vec<f64> = q_cuts.arcs.iter().map(|&x| arc_to_param(&inst.q_cum, x)).collect();
    let p_assign = p_cuts
        .assigns
        .iter()
        .map(|&arc| find_cut(&q_cuts.arcs, arc))
        .collect::<Result<Vec<_>>>()?;
    let q_assign = q_cuts
        .assigns
        .iter()
        .map(|&arc| find_cut(&p_cuts.arcs, arc))
        .collect::<Result<Vec<_>>>()?;
    let sol = StationSolution {
        a,
        b: bv,
        p_assign,
        q_assign,
    };
    debug_assert_eq!(sol.k(), inst.k);
    Ok(sol)
}

fn find_cut(arcs: &[f64], arc: f64) -> Result<usize> {
    let i = arcs
        .binary_search_by(|c| c.total_cmp(&(arc - 1e-7)))
        .unwrap_or_else(|i| i);
    for j in i.saturating_sub(1)..arcs.len().min(i + 2) {
        if (arcs[j] - arc).abs() < 1e-7 {
            return Ok(j);
        }
    }
    Err(Error::BadInput(format!(
        "station at arc {arc} is not a subdivision point of the other chain"
    )))
}

/// No two edges of the chain cross transversally; shared endpoints and
/// collinear overlaps are fine. This is the defining property the
/// generated chains must satisfy: wiggling vertices slightly yields a
/// simple arc.
pub fn weakly_simple(c: &PolyChain) -> bool {
    let vs = c.vertices();
    let m = vs.len() - 1;
    for i in 0..m {
        for j in (i + 1)..m {
            if segments_properly_cross(vs[i], vs[i + 1], vs[j], vs[j + 1]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::station::{verify_solution_with, StationIndexing};

    fn fig2_instance() -> GadgetInstance {
        build_reduction(&RectilinearDrawing::fig2()).unwrap()
    }

    #[test]
    fn fig2_chains_are_weakly_simple() {
        let inst = fig2_instance();
        assert!(weakly_simple(&inst.p), "first chain self-crosses");
        assert!(weakly_simple(&inst.q), "second chain self-crosses");
    }

    #[test]
    fn fig2_budget_constant_part() {
        let inst = fig2_instance();
        let stretch_part: usize = inst.stretches.iter().map(|s| s.len as usize + 1).sum();
        assert_eq!(inst.k - stretch_part, 76);
        assert_eq!(expected_k(&RectilinearDrawing::fig2()).unwrap(), inst.k);
    }

    #[test]
    fn empty_formula_has_zero_budget() {
        let d = RectilinearDrawing {
            variables: vec![VariableDef {
                name: "x".into(),
                start: 0,
                end: 0,
            }],
            clauses: vec![],
        };
        assert_eq!(expected_k(&d).unwrap(), 0);
    }

    #[test]
    fn two_literal_instance_budget() {
        let inst = build_reduction(&two_lit_drawing()).unwrap();
        let stretch_part: usize = inst.stretches.iter().map(|s| s.len as usize + 1).sum();
        assert_eq!(inst.k, stretch_part + 10 + 12);
    }

    fn two_lit_drawing() -> RectilinearDrawing {
        RectilinearDrawing {
            variables: vec![
                VariableDef {
                    name: "a".into(),
                    start: 0,
                    end: 1,
                },
                VariableDef {
                    name: "b".into(),
                    start: 2,
                    end: 3,
                },
            ],
            clauses: vec![ClauseDef {
                literals: vec![
                    LiteralRef {
                        var: 0,
                        negated: false,
                        attach: 0,
                    },
                    LiteralRef {
                        var: 1,
                        negated: false,
                        attach: 2,
                    },
                ],
                vertex: (2, 1),
            }],
        }
    }

    #[test]
    fn clause_window_is_out_of_reach_of_the_turnaround() {
        // The distance between the turnaround point and the far point
        // exceeds the threshold, so the stub cannot be guarded from
        // inside the clause gadget.
        let p4 = Point2 { x: -SQRT2, y: 3.0 - SQRT2 };
        let p5 = Point2 { x: -0.5, y: 2.5 };
        assert!(p4.dist(p5) > 1.0 + 1e-9);
        assert!((p4.dist(p5) - (2.0 - SQRT2 / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn gadget_dimensions() {
        let inst = fig2_instance();
        // Separation: stars on the axis three apart, arch three high.
        assert_eq!(inst.separations.len(), 4);
        for s in &inst.separations {
            let at = |arc: f64| inst.p.eval(arc_to_param(&inst.p_cum, arc));
            let (a, b) = (at(s.p_start), at(s.p_start + 9.0));
            assert!(a.y.abs() < 1e-9 && b.y.abs() < 1e-9);
            assert!((b.x - a.x - 3.0).abs() < 1e-9, "stars not three apart");
            assert!((at(s.p_start + 4.5).y - 3.0).abs() < 1e-9, "arch not three high");
        }
        // Negation jog: five unit segments spanning height four.
        for span in inst
            .gadget_index
            .iter()
            .filter(|s| matches!(s.kind, GadgetKind::Negation { .. }))
        {
            let vs = inst.p.vertices();
            let i = inst
                .p_cum
                .iter()
                .position(|&a| (a - span.p_range.0).abs() < 1e-9)
                .expect("jog start vertex");
            let (lo, hi) = (vs[i], vs[i + 5]);
            assert!(((lo.y - hi.y).abs() - 4.0).abs() < 1e-9, "jog height not four");
            assert!((lo.x - hi.x).abs() < 1e-9);
            for w in vs[i..=i + 5].windows(2) {
                assert!((w[0].dist(w[1]) - 1.0).abs() < 1e-9, "jog segment not unit");
            }
            assert!((span.p_range.1 - span.p_range.0 - 5.0).abs() < 1e-9);
        }
        assert_eq!(
            inst.gadget_index
                .iter()
                .filter(|s| matches!(s.kind, GadgetKind::Negation { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn fig2_satisfying_assignment_is_accepted_with_exact_budget() {
        let inst = fig2_instance();
        let sol = assignment_to_solution(&inst, &[true, true, false, false, false]).unwrap();
        assert_eq!(sol.k(), inst.k);
        let r = verify_solution_with(&inst.p, &inst.q, 1.0, &sol, StationIndexing::IncludeZero);
        assert!(
            r.accepted,
            "satisfying assignment rejected: {:?}",
            r.violation
        );
    }

    #[test]
    fn fig2_falsifying_assignment_is_rejected() {
        let inst = fig2_instance();
        // x2 false, x3 and x4 true falsifies the third clause only.
        let sol = assignment_to_solution(&inst, &[true, false, true, true, false]).unwrap();
        assert_eq!(sol.k(), inst.k);
        let r = verify_solution_with(&inst.p, &inst.q, 1.0, &sol, StationIndexing::IncludeZero);
        assert!(!r.accepted, "falsifying assignment must be rejected");
        let v = r.violation.unwrap();
        assert!(v.distance > 1.5 && v.distance < 1.7, "distance {}", v.distance);
    }

    #[test]
    fn fig2_acceptance_matches_formula_on_all_assignments() {
        let inst = fig2_instance();
        let phi = |v: &[bool]| {
            (v[0] || v[2] || v[4]) && (v[0] || !v[4]) && (v[1] || !v[2] || !v[3])
        };
        for mask in 0..32u32 {
            let vals: Vec<bool> = (0..5).map(|i| mask & (1 << i) != 0).collect();
            let sol = assignment_to_solution(&inst, &vals).unwrap();
            assert_eq!(sol.k(), inst.k);
            let r =
                verify_solution_with(&inst.p, &inst.q, 1.0, &sol, StationIndexing::IncludeZero);
            assert_eq!(
                r.accepted,
                phi(&vals),
                "assignment {vals:?}: accepted={} but formula={}; violation {:?}",
                r.accepted,
                phi(&vals),
                r.violation
            );
        }
    }

    #[test]
    fn two_literal_instance_round_trips() {
        let d = two_lit_drawing();
        let inst = build_reduction(&d).unwrap();
        assert!(weakly_simple(&inst.p) && weakly_simple(&inst.q));
        let phi = |v: &[bool]| v[0] || v[1];
        for mask in 0..4u32 {
            let vals: Vec<bool> = (0..2).map(|i| mask & (1 << i) != 0).collect();
            let sol = assignment_to_solution(&inst, &vals).unwrap();
            assert_eq!(sol.k(), inst.k);
            let r =
                verify_solution_with(&inst.p, &inst.q, 1.0, &sol, StationIndexing::IncludeZero);
            assert_eq!(r.accepted, phi(&vals), "assignment {vals:?}");
        }
    }

    #[test]
    fn isolated_corridor_verifies_in_both_phases() {
        // A straight shared corridor of even length: unit alternation in
        // either phase covers every pitch.
        let len = 6u64;
        let coords: Vec<(f64, f64)> = vec![(0.0, 0.0), (len as f64, 0.0)];
        let c = PolyChain::from_coords(&coords).unwrap();
        for odd_bit in [false, true] {
            let (pc, qc) = pattern_cuts(len, odd_bit);
            let a: Vec<f64> = pc.iter().map(|&m| m as f64 / len as f64).collect();
            let b: Vec<f64> = qc.iter().map(|&m| m as f64 / len as f64).collect();
            let p_assign = pc
                .windows(2)
                .map(|w| qc.iter().position(|&m| m == pitch_station(w[0], w[1], &qc)).unwrap())
                .collect();
            let q_assign = qc
                .windows(2)
                .map(|w| pc.iter().position(|&m| m == pitch_station(w[0], w[1], &pc)).unwrap())
                .collect();
            let sol = StationSolution {
                a,
                b,
                p_assign,
                q_assign,
            };
            let r = verify_solution_with(&c, &c, 1.0, &sol, StationIndexing::IncludeZero);
            assert!(r.accepted, "phase {odd_bit} rejected: {:?}", r.violation);
            assert_eq!(sol.k() as u64, len + 1);
        }
    }

    #[test]
    fn alternation_floor_on_short_corridors() {
        // Exhaustive search over integer-mark subdivisions of an isolated
        // shared corridor: no valid solution beats len + 1 pitches.
        for len in [2u64, 4, 6, 8] {
            let n = len as usize;
            let best = (0u32..(1 << (n - 1)))
                .flat_map(|pmask| (0u32..(1 << (n - 1))).map(move |qmask| (pmask, qmask)))
                .filter_map(|(pmask, qmask)| {
                    let cuts = |mask: u32| {
                        let mut v = vec![0u64];
                        for i in 1..n {
                            if mask & (1 << (i - 1)) != 0 {
                                v.push(i as u64);
                            }
                        }
                        v.push(len);
                        v
                    };
                    let pc = cuts(pmask);
                    let qc = cuts(qmask);
                    // Valid: every pitch has a station of the other chain
                    // within distance 1 of all its points (straight
                    // corridor: arc distance equals Euclidean).
                    let ok = |cs: &[u64], other: &[u64]| {
                        cs.windows(2).all(|w| {
                            other
                                .iter()
                                .any(|&s| s + 1 >= w[1] && s <= w[0] + 1 && {
                                    let lo = s.saturating_sub(1);
                                    lo <= w[0] && w[1] <= s + 1
                                })
                        })
                    };
                    (ok(&pc, &qc) && ok(&qc, &pc)).then_some(pc.len() - 1 + qc.len() - 1)
                })
                .min()
                .unwrap();
            assert_eq!(best as u64, len + 1, "floor violated at length {len}");
        }
    }

    #[test]
    fn invalid_drawings_are_rejected() {
        let mut d = RectilinearDrawing::fig2();
        d.clauses[0].vertex = (5, 0);
        assert!(matches!(d.validate(), Err(Error::BadInput(_))));
        let mut d = RectilinearDrawing::fig2();
        d.clauses[0].literals[1].attach = 6; // no longer under the vertex
        assert!(d.validate().is_err());
        let mut d = RectilinearDrawing::fig2();
        d.variables[0].end = 3; // length no longer matches degree
        assert!(d.validate().is_err());
    }

    #[test]
    fn gadget_index_accounts_for_every_gadget() {
        let inst = fig2_instance();
        let count = |pred: fn(GadgetKind) -> bool| {
            inst.gadget_index.iter().filter(|s| pred(s.kind)).count()
        };
        assert_eq!(count(|k| matches!(k, GadgetKind::Literal { .. })), 8);
        assert_eq!(count(|k| matches!(k, GadgetKind::Separation { .. })), 4);
        assert_eq!(count(|k| matches!(k, GadgetKind::Clause { .. })), 3);
        for s in &inst.gadget_index {
            assert!(s.p_range.0 < s.p_range.1 && s.q_range.0 < s.q_range.1);
        }
        // Each clause span nests inside the literal span hosting it.
        for (ci, c) in inst.clause_defs.iter().enumerate() {
            let cl = inst
                .gadget_index
                .iter()
                .find(|s| s.kind == GadgetKind::Clause { clause: ci })
                .unwrap();
            let host = inst
                .gadget_index
                .iter()
                .find(|s| {
                    matches!(s.kind, GadgetKind::Literal { clause, literal }
                        if clause == ci && c.literals[literal].attach == c.vertex.0)
                })
                .unwrap();
            assert!(host.p_range.0 < cl.p_range.0 && cl.p_range.1 < host.p_range.1);
            assert!(host.q_range.0 < cl.q_range.0 && cl.q_range.1 < host.q_range.1);
        }
    }

    #[test]
    fn corridor_stretch_parity_near_three_literal_clauses() {
        // Stretches entering and leaving a three-literal clause's stars
        // have even length, so the alternation meets both stars in phase.
        let d = RectilinearDrawing::fig2();
        let inst = build_reduction(&d).unwrap();
        for (ci, c) in inst.clauses.iter().enumerate() {
            if inst.clause_defs[ci].literals.len() != 3 {
                continue;
            }
            for s in &inst.stretches {
                let touches = (s.p_start + s.len - c.p_start).abs() < 1e-9
                    || (s.p_start - c.p_end()).abs() < 1e-9;
                if touches {
                    assert_eq!(
                        s.len.round() as u64 % 2,
                        0,
                        "odd stretch at clause {ci}"
                    );
                }
            }
        }
    }
}

//! Compatible covers of explicit axis-parallel segment sets.
//!
//! Input is a finite family of horizontal and vertical segments in the
//! unit box. A solution keeps sub-spans of the input segments such that
//! the horizontal pieces tile [0, 1] in x, the vertical pieces tile
//! [0, 1] in y, and every piece's fixed coordinate lies on a boundary of
//! the opposite tiling. This is the discrete analogue of a station
//! solution, with the input segments playing the role of the free space.
//!
//! `greedy_compatible_cover` is a 2-approximation; `exact_compatible_cover`
//! is an exhaustive oracle over cut sets drawn from the arrangement
//! coordinates, used to audit the greedy's ratio on small instances.

use serde::{Deserialize, Serialize};

use crate::free_space::{AxisSegment, Orientation};
use crate::geom::{ParamInterval, TOL};
use crate::{Error, Result};

/// Explicit segment family in the unit box.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverInstance {
    pub segments: Vec<AxisSegment>,
}

/// Flat on-disk form of one segment: `{"o":"h","fixed":0.5,"lo":0,"hi":1}`.
#[derive(Serialize, Deserialize)]
struct SegmentDef {
    o: OrientationTag,
    fixed: f64,
    lo: f64,
    hi: f64,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum OrientationTag {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "v")]
    V,
}

#[derive(Serialize, Deserialize)]
struct InstanceDef {
    segments: Vec<SegmentDef>,
}

impl Serialize for CoverInstance {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceDef {
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDef {
                    o: match s.orientation {
                        Orientation::Horizontal => OrientationTag::H,
                        Orientation::Vertical => OrientationTag::V,
                    },
                    fixed: s.fixed,
                    lo: s.span.lo,
                    hi: s.span.hi,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CoverInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let def = InstanceDef::deserialize(de)?;
        let segments = def
            .segments
            .into_iter()
            .map(|s| {
                let span = ParamInterval::new(s.lo, s.hi).map_err(serde::de::Error::custom)?;
                Ok(AxisSegment {
                    orientation: match s.o {
                        OrientationTag::H => Orientation::Horizontal,
                        OrientationTag::V => Orientation::Vertical,
                    },
                    fixed: s.fixed,
                    span,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        CoverInstance::new(segments).map_err(serde::de::Error::custom)
    }
}

impl CoverInstance {
    pub fn new(segments: Vec<AxisSegment>) -> Result<Self> {
        for s in &segments {
            if !(-TOL..=1.0 + TOL).contains(&s.fixed) {
                return Err(Error::BadInput(format!(
                    "segment fixed coordinate {} outside the unit box",
                    s.fixed
                )));
            }
        }
        Ok(Self { segments })
    }

    fn axis_indices(&self, o: Orientation) -> Vec<usize> {
        (0..self.segments.len())
            .filter(|&i| self.segments[i].orientation == o)
            .collect()
    }
}

/// Kept sub-spans, each tagged with the index of its source segment. A
/// source segment may contribute several pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub chosen: Vec<(usize, ParamInterval)>,
    pub size: usize,
}

/// Stand-alone checker for the solution invariants: containment in the
/// source segments, exact tiling per axis, and fixed coordinates landing
/// on opposite tiling boundaries.
pub fn validate_cover_solution(inst: &CoverInstance, sol: &CoverSolution) -> Result<()> {
    if sol.size != sol.chosen.len() {
        return Err(Error::BadInput(format!(
            "declared size {} but {} pieces",
            sol.size,
            sol.chosen.len()
        )));
    }
    let mut tilings: [Vec<(f64, f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for &(idx, span) in &sol.chosen {
        let src = inst
            .segments
            .get(idx)
            .ok_or_else(|| Error::BadInput(format!("piece references segment {idx}")))?;
        if span.lo < src.span.lo - TOL || span.hi > src.span.hi + TOL {
            return Err(Error::BadInput(format!(
                "piece [{}, {}] leaves its source segment {idx}",
                span.lo, span.hi
            )));
        }
        let slot = match src.orientation {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 1,
        };
        tilings[slot].push((span.lo, span.hi, src.fixed));
    }
    let mut cut_sets: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (slot, name) in [(0usize, "horizontal"), (1usize, "vertical")] {
        let pieces = &mut tilings[slot];
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cur = 0.0f64;
        for &(lo, hi, _) in pieces.iter() {
            if (lo - cur).abs() > TOL {
                return Err(Error::BadInput(format!(
                    "{name} pieces do not tile: expected boundary {cur}, found {lo}"
                )));
            }
            cur = hi;
            cut_sets[slot].push(hi);
        }
        if (cur - 1.0).abs() > TOL {
            return Err(Error::BadInput(format!(
                "{name} pieces stop at {cur}, not 1"
            )));
        }
        cut_sets[slot].push(0.0);
    }
    for (slot, other, name) in [(0usize, 1usize, "horizontal"), (1, 0, "vertical")] {
        for &(_, _, fixed) in &tilings[slot] {
            if !cut_sets[other].iter().any(|&c| (c - fixed).abs() <= TOL) {
                return Err(Error::BadInput(format!(
                    "{name} piece at fixed coordinate {fixed} misses the opposite tiling boundaries"
                )));
            }
        }
    }
    Ok(())
}

/// One tile of an axis tiling: source segment index plus kept span.
type Tile = (usize, ParamInterval);

/// Greedy minimum tiling of `[lo, hi]` from the given sources (already
/// filtered to one orientation). Classic interval cover: from the current
/// frontier take the segment reaching farthest right. Tile boundaries are
/// the greedy frontiers, so the pieces tile the target exactly.
fn greedy_axis_tiles(
    inst: &CoverInstance,
    sources: &[usize],
    lo: f64,
    hi: f64,
    axis: &'static str,
) -> Result<Vec<Tile>> {
    let mut tiles = Vec::new();
    let mut frontier = lo;
    while frontier < hi - TOL {
        let mut best: Option<(usize, f64)> = None;
        for &i in sources {
            let s = &inst.segments[i];
            if s.span.lo <= frontier + TOL && s.span.hi > frontier + TOL {
                if best.is_none_or(|(_, reach)| s.span.hi > reach) {
                    best = Some((i, s.span.hi));
                }
            }
        }
        let Some((i, reach)) = best else {
            let next = sources
                .iter()
                .map(|&i| inst.segments[i].span.lo)
                .filter(|&l| l > frontier + TOL)
                .fold(hi, f64::min);
            return Err(Error::Infeasible {
                axis,
                gap_lo: frontier,
                gap_hi: next,
            });
        };
        let end = reach.min(hi);
        tiles.push((i, ParamInterval { lo: frontier, hi: end }));
        frontier = end;
    }
    Ok(tiles)
}

/// Moves tile boundaries onto the opposite fixed coordinates where the
/// source segments permit, then splits the tiles that still contain a
/// fixed coordinate in their interior. Boundary moves keep the piece
/// count; each unavoidable split adds one piece, and a fixed coordinate is
/// interior to at most one tile, so the growth stays within the factor-2
/// bound.
fn normalize_against(inst: &CoverInstance, tiles: &mut Vec<Tile>, fixeds: &[f64]) {
    let mut cuts: Vec<f64> = fixeds.to_vec();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    // A boundary that already sits on a required cut must stay put; moving
    // it would satisfy one fixed coordinate by orphaning another.
    let needed = |v: f64| cuts.iter().any(|&c| (c - v).abs() <= TOL);
    for f in cuts.clone() {
        let Some(t) = tiles
            .iter()
            .position(|&(_, span)| f > span.lo + TOL && f < span.hi - TOL)
        else {
            continue;
        };
        // Prefer shifting a shared boundary into f over splitting.
        if t + 1 < tiles.len()
            && inst.segments[tiles[t + 1].0].span.lo <= f + TOL
            && !needed(tiles[t].1.hi)
        {
            tiles[t].1.hi = f;
            tiles[t + 1].1.lo = f;
        } else if t > 0
            && inst.segments[tiles[t - 1].0].span.hi >= f - TOL
            && !needed(tiles[t].1.lo)
        {
            tiles[t - 1].1.hi = f;
            tiles[t].1.lo = f;
        } else {
            let (src, span) = tiles[t];
            tiles[t].1.hi = f;
            tiles.insert(t + 1, (src, ParamInterval { lo: f, hi: span.hi }));
        }
    }
}

fn solution_from_tiles(x_tiles: Vec<Tile>, y_tiles: Vec<Tile>) -> CoverSolution {
    let chosen: Vec<Tile> = x_tiles.into_iter().chain(y_tiles).collect();
    CoverSolution {
        size: chosen.len(),
        chosen,
    }
}

/// Greedy 2-approximation: per-axis minimum tilings (each optimal for its
/// axis, so their sum lower-bounds any compatible solution), then
/// compatibility normalization. The result is at most twice the per-axis
/// optima sum.
pub fn greedy_compatible_cover(inst: &CoverInstance) -> Result<CoverSolution> {
    let hs = inst.axis_indices(Orientation::Horizontal);
    let vs = inst.axis_indices(Orientation::Vertical);
    let mut x_tiles = greedy_axis_tiles(inst, &hs, 0.0, 1.0, "x")?;
    let mut y_tiles = greedy_axis_tiles(inst, &vs, 0.0, 1.0, "y")?;
    let xs: Vec<f64> = y_tiles.iter().map(|&(i, _)| inst.segments[i].fixed).collect();
    let ys: Vec<f64> = x_tiles.iter().map(|&(i, _)| inst.segments[i].fixed).collect();
    normalize_against(inst, &mut x_tiles, &xs);
    normalize_against(inst, &mut y_tiles, &ys);
    let sol = solution_from_tiles(x_tiles, y_tiles);
    debug_assert!(validate_cover_solution(inst, &sol).is_ok());
    Ok(sol)
}

/// Distinct fixed coordinates of the given segments, excluding 0 and 1
/// (which are tiling boundaries for free).
fn interior_fixed_values(inst: &CoverInstance, idxs: &[usize]) -> Vec<f64> {
    let mut vals: Vec<f64> = idxs
        .iter()
        .map(|&i| inst.segments[i].fixed)
        .filter(|&f| f > TOL && f < 1.0 - TOL)
        .collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    vals
}

/// Minimum tiling of one axis with mandatory interior cuts and a
/// restricted source set: solved per stretch between consecutive cuts.
fn tiled_with_cuts(
    inst: &CoverInstance,
    sources: &[usize],
    cuts: &[f64],
    axis: &'static str,
) -> Result<Vec<Tile>> {
    let mut bounds = vec![0.0f64];
    bounds.extend_from_slice(cuts);
    bounds.push(1.0);
    bounds.sort_by(f64::total_cmp);
    bounds.dedup_by(|a, b| (*a - *b).abs() <= TOL);
    let mut tiles = Vec::new();
    for w in bounds.windows(2) {
        tiles.extend(greedy_axis_tiles(inst, sources, w[0], w[1], axis)?);
    }
    Ok(tiles)
}

/// Exhaustive grid-restricted oracle. A compatible solution is determined
/// by which opposite fixed coordinates become tiling boundaries, so the
/// search enumerates subsets of the vertical fixed values (forced x-cuts)
/// paired with subsets of the horizontal fixed values (forced y-cuts),
/// in order of increasing subset size, and solves each axis by the
/// per-stretch greedy. Piece endpoints therefore stay on the coordinate
/// grid induced by segment endpoints and crossings; the result is minimal
/// among such grid solutions. `limit` bounds the number of subset pairs
/// examined.
pub fn exact_compatible_cover(inst: &CoverInstance, limit: u64) -> Result<CoverSolution> {
    let hs = inst.axis_indices(Orientation::Horizontal);
    let vs = inst.axis_indices(Orientation::Vertical);
    // Surface uncoverable axes as such, not as a fruitless search.
    greedy_axis_tiles(inst, &hs, 0.0, 1.0, "x")?;
    greedy_axis_tiles(inst, &vs, 0.0, 1.0, "y")?;
    let fx = interior_fixed_values(inst, &vs);
    let fy = interior_fixed_values(inst, &hs);
    let mut best: Option<CoverSolution> = None;
    let mut examined: u64 = 0;
    for depth in 0..=(fx.len() + fy.len()) {
        // Any solution with d forced cuts has at least d + 2 pieces.
        if best.as_ref().is_some_and(|b| depth + 2 >= b.size) {
            break;
        }
        for na in 0..=depth.min(fx.len()) {
            let nb = depth - na;
            if nb > fy.len() {
                continue;
            }
            for a_mask in subsets_of_size(fx.len(), na) {
                for b_mask in subsets_of_size(fy.len(), nb) {
                    examined += 1;
                    if examined > limit {
                        return Err(Error::BudgetExhausted(limit));
                    }
                    let a_vals = picked(&fx, a_mask);
                    let b_vals = picked(&fy, b_mask);
                    let allowed_h: Vec<usize> = hs
                        .iter()
                        .copied()
                        .filter(|&i| on_boundary(inst.segments[i].fixed, &b_vals))
                        .collect();
                    let allowed_v: Vec<usize> = vs
                        .iter()
                        .copied()
                        .filter(|&i| on_boundary(inst.segments[i].fixed, &a_vals))
                        .collect();
                    let Ok(xt) = tiled_with_cuts(inst, &allowed_h, &a_vals, "x") else {
                        continue;
                    };
                    let Ok(yt) = tiled_with_cuts(inst, &allowed_v, &b_vals, "y") else {
                        continue;
                    };
                    let cand = solution_from_tiles(xt, yt);
                    if best.as_ref().is_none_or(|b| cand.size < b.size) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    let sol = best.ok_or_else(|| {
        Error::BadInput("no compatible solution on the arrangement grid".into())
    })?;
    debug_assert!(validate_cover_solution(inst, &sol).is_ok());
    Ok(sol)
}

fn on_boundary(fixed: f64, forced: &[f64]) -> bool {
    fixed <= TOL
        || fixed >= 1.0 - TOL
        || forced.iter().any(|&v| (v - fixed).abs() <= TOL)
}

fn picked(vals: &[f64], mask: u32) -> Vec<f64> {
    vals.iter()
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, &v)| v)
        .collect()
}

/// All bitmasks over `n` items with exactly `k` bits set.
fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    assert!(n < 32);
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

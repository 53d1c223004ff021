//! Canonical straight-line drawings of `S_k` and crossing counting.
//!
//! Poles are drawn as radial spokes around a centre, every second pole
//! flipped so that the crossing links between neighbouring poles become
//! parallel chords. The leftover vertices (`1`, and `2k-2`, `2k-1` for even
//! `k`) sit in the sector between the last pole and the first. Graphs with
//! fewer than three poles (`k <= 6`) use fixed hand-placed coordinates.
//! Coordinates are integers and all geometry uses exact integer arithmetic.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::construct::pole_count;
use crate::error::{Error, Result};
use crate::graph::{DiGraph, Vertex};

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub k: usize,
    /// `coords[v - 1]` is the position of vertex `v`.
    pub coords: Vec<Point>,
    pub crossings: usize,
}

impl Layout {
    pub fn position(&self, v: Vertex) -> Point {
        self.coords[v as usize - 1]
    }
}

const SCALE: f64 = 1000.0;
/// Radius of pole slot 0 (innermost); slots are one unit apart.
const INNER_RADIUS: f64 = 4.0;

fn polar(radius: f64, angle: f64) -> Point {
    ((SCALE * radius * angle.cos()).round() as i64, (SCALE * radius * angle.sin()).round() as i64)
}

/// Canonical drawing of `build_inout(k)`.
pub fn layout(k: usize) -> Result<Layout> {
    let coords = match k {
        0 => return Err(Error::InvalidK(0)),
        1 => vec![(0, 0)],
        2 => vec![(0, 0), (1, 1), (2, 0)],
        3 => vec![(0, 0), (2, 0), (4, 0), (4, 2), (2, 4), (5, 5)],
        4 => vec![(2, 4), (0, 3), (0, 2), (0, 1), (0, 0), (3, 0), (2, 2)],
        // Two poles side by side; the wrap-around links run outside them.
        5 => vec![(8, 3), (0, 6), (0, 4), (0, 2), (0, 0), (4, 0), (4, 2), (4, 4), (4, 6)],
        6 => vec![(1, 5), (0, 6), (0, 4), (0, 2), (0, 0), (4, 0), (4, 2), (4, 4), (4, 6), (2, 3), (3, 1)],
        _ => ring_layout(k),
    };
    let graph = crate::construct::build_inout(k)?.graph;
    let mut out = Layout { k, coords, crossings: 0 };
    out.crossings = crossing_count(&out, &graph)?;
    Ok(out)
}

/// Needs at least three poles so every sector is narrower than a half turn.
fn ring_layout(k: usize) -> Vec<Point> {
    let poles = pole_count(k);
    let sector = TAU / poles as f64;
    let mut coords = vec![(0, 0); 2 * k - 1];
    let mut place = |v: u32, radius: f64, angle: f64| coords[v as usize - 1] = polar(radius, angle);

    for i in 1..=poles {
        let angle = (i - 1) as f64 * sector;
        let flipped = i % 2 == 0;
        for (slot, v) in (4 * i as u32 - 2..=4 * i as u32 + 1).enumerate() {
            // Unflipped poles put their first vertex outermost.
            let level = if flipped { slot } else { 3 - slot };
            place(v, INNER_RADIUS + level as f64, angle);
        }
    }

    // Gap sector between the last pole and the first.
    let gap = |fraction: f64| (poles as f64 - 1.0 + fraction) * sector;
    let last_flipped = poles.is_multiple_of(2);
    let kv = k as u32;
    if k % 2 == 1 {
        let radius = if last_flipped { INNER_RADIUS + 1.5 } else { INNER_RADIUS + 3.5 };
        place(1, radius, gap(0.5));
    } else if last_flipped {
        place(2 * kv - 2, INNER_RADIUS + 1.5, gap(0.5));
        place(2 * kv - 1, INNER_RADIUS, gap(0.25));
        place(1, INNER_RADIUS + 3.0, gap(0.75));
    } else {
        place(2 * kv - 2, INNER_RADIUS, gap(0.5));
        place(2 * kv - 1, INNER_RADIUS + 3.0, gap(0.25));
        place(1, INNER_RADIUS + 3.0, gap(0.75));
    }
    coords
}

fn orient(a: Point, b: Point, c: Point) -> i128 {
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    ((b.0 as i128 - ax) * (c.1 as i128 - ay)) - ((b.1 as i128 - ay) * (c.0 as i128 - ax))
}

/// `p` lies strictly inside segment `a`-`b`.
fn on_open_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
        && p != a
        && p != b
}

fn properly_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1.signum() * o2.signum() < 0 && o3.signum() * o4.signum() < 0
}

/// Number of unordered pairs of drawn segments whose interiors intersect.
/// Arcs `(u, w)` and `(w, u)` are one segment.
pub fn crossing_count(layout: &Layout, g: &DiGraph) -> Result<usize> {
    if layout.coords.len() < g.order() {
        return Err(Error::DegenerateLayout(format!(
            "layout has {} positions for {} vertices",
            layout.coords.len(),
            g.order()
        )));
    }
    let pos = |v: Vertex| layout.coords[v as usize - 1];
    for u in g.vertices() {
        for w in (u + 1)..=g.order() as Vertex {
            if pos(u) == pos(w) {
                return Err(Error::DegenerateLayout(format!("vertices {u} and {w} coincide")));
            }
        }
    }
    let segments = g.undirected_edges();
    for &(a, b) in &segments {
        if let Some(v) = g.vertices().find(|&v| on_open_segment(pos(v), pos(a), pos(b))) {
            return Err(Error::DegenerateLayout(format!("vertex {v} lies on segment {a}-{b}")));
        }
    }
    let mut count = 0;
    for (i, &(a, b)) in segments.iter().enumerate() {
        for &(c, d) in &segments[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if properly_cross(pos(a), pos(b), pos(c), pos(d)) {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_inout;

    #[test]
    fn small_cases() {
        assert_eq!(layout(1).unwrap().crossings, 0);
        assert_eq!(layout(2).unwrap().crossings, 0);
        assert_eq!(layout(3).unwrap().crossings, 0);
        assert_eq!(layout(4).unwrap().crossings, 0);
        assert_eq!(layout(5).unwrap().crossings, 1);
    }

    #[test]
    fn crossings_follow_residue_mod_four() {
        for k in 1..=40 {
            let expected = usize::from(k >= 5 && k % 4 == 1);
            assert_eq!(layout(k).unwrap().crossings, expected, "k={k}");
        }
    }

    #[test]
    fn s5_also_has_a_planar_drawing() {
        // The canonical drawing of S_5 has one crossing, but the graph itself
        // is planar: tuck vertex 1 under the first pole instead.
        let g = build_inout(5).unwrap().graph;
        let l = Layout {
            k: 5,
            coords: vec![(-2, -2), (0, 6), (0, 4), (0, 2), (0, 0), (4, 0), (4, 2), (4, 4), (4, 6)],
            crossings: 0,
        };
        assert_eq!(crossing_count(&l, &g).unwrap(), 0);
    }

    #[test]
    fn crossing_count_matches_recomputation() {
        let l = layout(9).unwrap();
        let g = build_inout(9).unwrap().graph;
        assert_eq!(crossing_count(&l, &g).unwrap(), 1);
    }

    #[test]
    fn detects_degenerate_layouts() {
        let g = build_inout(2).unwrap().graph;
        let collinear = Layout { k: 2, coords: vec![(0, 0), (2, 0), (1, 0)], crossings: 0 };
        assert!(matches!(crossing_count(&collinear, &g), Err(Error::DegenerateLayout(_))));
        let coincident = Layout { k: 2, coords: vec![(0, 0), (1, 1), (0, 0)], crossings: 0 };
        assert!(matches!(crossing_count(&coincident, &g), Err(Error::DegenerateLayout(_))));
        let short = Layout { k: 2, coords: vec![(0, 0)], crossings: 0 };
        assert!(crossing_count(&short, &g).is_err());
    }

    #[test]
    fn counts_a_simple_crossing() {
        let g = DiGraph::new(4, [(1, 2), (3, 4)]).unwrap();
        let l = Layout { k: 2, coords: vec![(0, 0), (2, 2), (0, 2), (2, 0)], crossings: 0 };
        assert_eq!(crossing_count(&l, &g).unwrap(), 1);
        let s1 = build_inout(1).unwrap().graph;
        let l = Layout { k: 1, coords: vec![(7, 7)], crossings: 0 };
        assert_eq!(crossing_count(&l, &s1).unwrap(), 0);
    }
}

//! Marching squares over the reachable part of a sweep grid.
//!
//! Crossings are placed by linear interpolation along cell edges. Saddle cells are
//! split by comparing the mean of the four corners with the level. Segments are
//! chained through shared edges into polylines, which are closed when the chain
//! returns to its start and open when it runs into the mask or the grid boundary.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{SweepError, SweepGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    /// Vertices in mm; a closed polyline repeats its first vertex at the end.
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoLoci {
    pub levels: Vec<f64>,
    /// One list of polylines per level.
    pub polylines: Vec<Vec<Polyline>>,
}

/// Grid edge identified by its lower-left node: horizontal edges join `(ix, iy)` and
/// `(ix + 1, iy)`, vertical ones `(ix, iy)` and `(ix, iy + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

/// Contours one level of a row-major (`y` outer) field; `None` nodes are masked out.
pub fn contour_level(
    values: &[Option<f64>],
    nx: usize,
    ny: usize,
    x_at: impl Fn(usize) -> f64,
    y_at: impl Fn(usize) -> f64,
    level: f64,
) -> Vec<Polyline> {
    assert_eq!(values.len(), nx * ny, "field size mismatch");
    let at = |ix: usize, iy: usize| values[iy * nx + ix];
    let node_xy = |ix: usize, iy: usize| [x_at(ix), y_at(iy)];

    let crossing = |a: (usize, usize), b: (usize, usize), va: f64, vb: f64| -> [f64; 2] {
        let t = (level - va) / (vb - va);
        let (pa, pb) = (node_xy(a.0, a.1), node_xy(b.0, b.1));
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };

    let mut points: BTreeMap<EdgeKey, [f64; 2]> = BTreeMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();

    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let (Some(v00), Some(v10), Some(v11), Some(v01)) =
                (at(ix, iy), at(ix + 1, iy), at(ix + 1, iy + 1), at(ix, iy + 1))
            else {
                continue;
            };
            let inside = [v00 >= level, v10 >= level, v11 >= level, v01 >= level];
            // Edges in counterclockwise order: bottom, right, top, left.
            let edges = [
                (EdgeKey::H(ix, iy), (ix, iy), (ix + 1, iy), v00, v10, 0, 1),
                (EdgeKey::V(ix + 1, iy), (ix + 1, iy), (ix + 1, iy + 1), v10, v11, 1, 2),
                (EdgeKey::H(ix, iy + 1), (ix + 1, iy + 1), (ix, iy + 1), v11, v01, 2, 3),
                (EdgeKey::V(ix, iy), (ix, iy + 1), (ix, iy), v01, v00, 3, 0),
            ];
            let mut crossed: Vec<usize> = Vec::with_capacity(4);
            for (e, &(key, a, b, va, vb, ca, cb)) in edges.iter().enumerate() {
                if inside[ca] != inside[cb] {
                    points.entry(key).or_insert_with(|| {
                        // Interpolate from the lower-left end so both cells agree bitwise.
                        if a <= b {
                            crossing(a, b, va, vb)
                        } else {
                            crossing(b, a, vb, va)
                        }
                    });
                    crossed.push(e);
                }
            }
            match crossed.len() {
                2 => segments.push((edges[crossed[0]].0, edges[crossed[1]].0)),
                4 => {
                    let centre_inside = (v00 + v10 + v11 + v01) / 4.0 >= level;
                    // Edge e runs from corner e to corner e + 1. Pair edges around the
                    // corners that differ from the centre.
                    let cut_corner = |c: usize| ((c + 3) % 4, c);
                    let corners: Vec<usize> = (0..4).filter(|&c| inside[c] != centre_inside).collect();
                    for c in corners {
                        let (e1, e2) = cut_corner(c);
                        segments.push((edges[e1].0, edges[e2].0));
                    }
                }
                _ => {}
            }
        }
    }

    chain(&segments, &points)
}

fn chain(segments: &[(EdgeKey, EdgeKey)], points: &BTreeMap<EdgeKey, [f64; 2]>) -> Vec<Polyline> {
    let mut adjacency: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();

    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Polyline {
        let mut keys = vec![start];
        let mut current = start;
        loop {
            let next = adjacency[&current].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            current = if a == current { b } else { a };
            keys.push(current);
            if current == start {
                break;
            }
        }
        let closed = keys.len() > 2 && keys.first() == keys.last();
        Polyline {
            points: keys.iter().map(|k| points[k]).collect(),
            closed,
        }
    };

    // Open chains start at endpoints touched by a single segment.
    let starts: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    for start in starts {
        if adjacency[&start].iter().all(|&s| used[s]) {
            continue;
        }
        polylines.push(walk(start, &mut used));
    }
    for s in 0..segments.len() {
        if !used[s] {
            polylines.push(walk(segments[s].0, &mut used));
        }
    }
    polylines
}

/// Isoconditioning loci of a sweep at each requested level in `(0, 1)`.
pub fn extract_isoloci(grid: &SweepGrid, levels: &[f64]) -> Result<IsoLoci, SweepError> {
    if let Some(bad) = levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(SweepError::LevelOutOfRange(*bad));
    }
    let values = grid.values();
    let spec = grid.spec;
    let polylines = levels
        .iter()
        .map(|&level| contour_level(&values, spec.nx, spec.ny, |i| spec.x_at(i), |j| spec.y_at(j), level))
        .collect();
    Ok(IsoLoci {
        levels: levels.to_vec(),
        polylines,
    })
}

//! Uncovered space of a bin as rectilinear polygons.
//!
//! Everything is computed on the grid induced by the x and y coordinates of
//! the bin edges and the placed squares, so the result is exact.

use std::collections::{BTreeMap, HashMap};

use super::{GeometryError, Packing, Placement, Rect};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

/// A convex (90 degree) vertex of the uncovered region together with the
/// quadrant that opens into the region. A square of side `s` placed "at" the
/// corner occupies `[x, x + dx*s] x [y, y + dy*s]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Corner {
    pub point: Point,
    pub dx: i8,
    pub dy: i8,
}

impl Corner {
    /// Lower-left corner of a square of side `side` anchored here.
    pub fn anchor(&self, side: &Scalar) -> (Scalar, Scalar) {
        let x = if self.dx > 0 { self.point.x.clone() } else { &self.point.x - side };
        let y = if self.dy > 0 { self.point.y.clone() } else { &self.point.y - side };
        (x, y)
    }
}

/// One boundary cycle of the uncovered region.
///
/// Vertices are listed with the region on the left: counterclockwise for an
/// outer boundary, clockwise for a hole. The first vertex is the
/// lexicographically smallest one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectilinearPolygon {
    pub vertices: Vec<Point>,
    /// Index of the connected piece of uncovered space this cycle bounds.
    pub component: usize,
    pub hole: bool,
}

impl RectilinearPolygon {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Signed shoelace area: positive for outer boundaries, negative for holes.
    pub fn signed_area(&self) -> Scalar {
        let n = self.vertices.len();
        let mut twice = Scalar::zero();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            twice += &a.x * &b.y - &b.x * &a.y;
        }
        twice / Scalar::from_int(2)
    }

    fn turn_at(&self, i: usize) -> (i8, i8, i8, i8) {
        let n = self.vertices.len();
        let prev = &self.vertices[(i + n - 1) % n];
        let cur = &self.vertices[i];
        let next = &self.vertices[(i + 1) % n];
        let din = (sign(&(&cur.x - &prev.x)), sign(&(&cur.y - &prev.y)));
        let dout = (sign(&(&next.x - &cur.x)), sign(&(&next.y - &cur.y)));
        (din.0, din.1, dout.0, dout.1)
    }

    /// Vertices where the region's interior angle is 90 degrees.
    pub fn convex_corners(&self) -> Vec<Corner> {
        (0..self.vertices.len())
            .filter_map(|i| {
                let (ix, iy, ox, oy) = self.turn_at(i);
                // left turn: cross(din, dout) > 0
                if ix * oy - iy * ox > 0 {
                    // the open quadrant is spanned by dout and -din
                    let dx = if ox != 0 { ox } else { -ix };
                    let dy = if oy != 0 { oy } else { -iy };
                    Some(Corner { point: self.vertices[i].clone(), dx, dy })
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn reflex_count(&self) -> usize {
        (0..self.vertices.len())
            .filter(|&i| {
                let (ix, iy, ox, oy) = self.turn_at(i);
                ix * oy - iy * ox < 0
            })
            .count()
    }
}

fn sign(v: &Scalar) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// The closure of bin minus placed squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSet {
    pub polygons: Vec<RectilinearPolygon>,
    pub components: usize,
    pub area: Scalar,
}

impl RegionSet {
    pub fn vertex_count(&self) -> usize {
        self.polygons.iter().map(RectilinearPolygon::vertex_count).sum()
    }

    pub fn convex_corners(&self) -> Vec<Corner> {
        let mut corners: Vec<Corner> = self.polygons.iter().flat_map(|p| p.convex_corners()).collect();
        corners.sort();
        corners
    }

    pub fn reflex_count(&self) -> usize {
        self.polygons.iter().map(RectilinearPolygon::reflex_count).sum()
    }
}

/// Uncovered region of a feasible packing.
pub fn uncovered_region(packing: &Packing) -> Result<RegionSet, GeometryError> {
    packing.check().map_err(GeometryError::Infeasible)?;
    let rects: Vec<Rect> = packing.placements.iter().map(Placement::rect).collect();
    Ok(CellGrid::new(&Rect::of_bin(&packing.bin), &rects).region())
}

/// Convex corners as `(grid x, grid y, dx, dy)` in sorted order, and the
/// vertex count, of the free cells `free[i][j]`. A grid point with one free
/// cell around it is a convex vertex, with three a reflex one, and with two
/// diagonal free cells a pinch counted once per side.
pub(crate) fn scan_grid_corners(free: &[Vec<bool>]) -> (Vec<(usize, usize, i8, i8)>, usize) {
    let nx = free.len();
    let ny = free.first().map_or(0, Vec::len);
    let cell = |i: usize, j: usize, di: i8, dj: i8| -> bool {
        let ci = if di > 0 { Some(i) } else { i.checked_sub(1) };
        let cj = if dj > 0 { Some(j) } else { j.checked_sub(1) };
        match (ci, cj) {
            (Some(a), Some(b)) if a < nx && b < ny => free[a][b],
            _ => false,
        }
    };
    const QUADS: [(i8, i8); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];
    let mut corners = Vec::new();
    let mut vertices = 0;
    for i in 0..=nx {
        for j in 0..=ny {
            let mut open = [(0, 0); 4];
            let mut count = 0;
            for (a, b) in QUADS {
                if cell(i, j, a, b) {
                    open[count] = (a, b);
                    count += 1;
                }
            }
            let diagonal = count == 2 && open[0].0 != open[1].0 && open[0].1 != open[1].1;
            if count == 1 || diagonal {
                vertices += count;
                corners.extend(open[..count].iter().map(|&(dx, dy)| (i, j, dx, dy)));
            } else if count == 3 {
                vertices += 1;
            }
        }
    }
    (corners, vertices)
}

/// Free/covered cells of a rectangle partitioned by the coordinates of a set
/// of covering rectangles.
#[derive(Debug, Clone)]
pub(crate) struct CellGrid {
    pub xs: Vec<Scalar>,
    pub ys: Vec<Scalar>,
    /// `free[i][j]`: cell `[xs[i], xs[i+1]] x [ys[j], ys[j+1]]` is uncovered.
    pub free: Vec<Vec<bool>>,
}

impl CellGrid {
    pub fn new(bounds: &Rect, covered: &[Rect]) -> Self {
        let mut xs = vec![bounds.x0.clone(), bounds.x1.clone()];
        let mut ys = vec![bounds.y0.clone(), bounds.y1.clone()];
        for r in covered {
            for v in [&r.x0, &r.x1] {
                if *v > bounds.x0 && *v < bounds.x1 {
                    xs.push(v.clone());
                }
            }
            for v in [&r.y0, &r.y1] {
                if *v > bounds.y0 && *v < bounds.y1 {
                    ys.push(v.clone());
                }
            }
        }
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        let mut free = vec![vec![true; ys.len() - 1]; xs.len() - 1];
        let xi: HashMap<&Scalar, usize> = xs.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let yi: HashMap<&Scalar, usize> = ys.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let clamp = |v: &Scalar, lo: &Scalar, hi: &Scalar| v.clone().max(lo.clone()).min(hi.clone());
        for r in covered {
            let x0 = clamp(&r.x0, &bounds.x0, &bounds.x1);
            let x1 = clamp(&r.x1, &bounds.x0, &bounds.x1);
            let y0 = clamp(&r.y0, &bounds.y0, &bounds.y1);
            let y1 = clamp(&r.y1, &bounds.y0, &bounds.y1);
            let (i0, i1, j0, j1) = (xi[&x0], xi[&x1], yi[&y0], yi[&y1]);
            for col in free.iter_mut().take(i1).skip(i0) {
                for cell in col.iter_mut().take(j1).skip(j0) {
                    *cell = false;
                }
            }
        }
        CellGrid { xs, ys, free }
    }

    fn cols(&self) -> usize {
        self.xs.len() - 1
    }

    fn rows(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn free_area(&self) -> Scalar {
        let mut area = Scalar::zero();
        for i in 0..self.cols() {
            let w = &self.xs[i + 1] - &self.xs[i];
            for j in 0..self.rows() {
                if self.free[i][j] {
                    area += &w * (&self.ys[j + 1] - &self.ys[j]);
                }
            }
        }
        area
    }

    /// Edge-connected components of free cells, in column-major scan order.
    fn components(&self) -> Vec<Vec<(usize, usize)>> {
        let mut label = vec![vec![usize::MAX; self.rows()]; self.cols()];
        let mut comps = Vec::new();
        for i in 0..self.cols() {
            for j in 0..self.rows() {
                if !self.free[i][j] || label[i][j] != usize::MAX {
                    continue;
                }
                let id = comps.len();
                let mut cells = Vec::new();
                let mut stack = vec![(i, j)];
                label[i][j] = id;
                while let Some((a, b)) = stack.pop() {
                    cells.push((a, b));
                    let mut visit = |na: usize, nb: usize| {
                        if self.free[na][nb] && label[na][nb] == usize::MAX {
                            label[na][nb] = id;
                            stack.push((na, nb));
                        }
                    };
                    if a > 0 {
                        visit(a - 1, b);
                    }
                    if a + 1 < self.cols() {
                        visit(a + 1, b);
                    }
                    if b > 0 {
                        visit(a, b - 1);
                    }
                    if b + 1 < self.rows() {
                        visit(a, b + 1);
                    }
                }
                cells.sort();
                comps.push(cells);
            }
        }
        comps
    }

    /// Convex corners (sorted) and the total vertex count of the free
    /// region, without tracing polygons.
    pub fn corner_scan(&self) -> (Vec<Corner>, usize) {
        let (found, vertices) = scan_grid_corners(&self.free);
        let corners = found
            .into_iter()
            .map(|(i, j, dx, dy)| Corner { point: Point { x: self.xs[i].clone(), y: self.ys[j].clone() }, dx, dy })
            .collect();
        (corners, vertices)
    }

    pub fn region(&self) -> RegionSet {
        let comps = self.components();
        let mut polygons = Vec::new();
        for (cid, cells) in comps.iter().enumerate() {
            for lp in self.trace_loops(cells) {
                let vertices: Vec<Point> = lp
                    .into_iter()
                    .map(|(i, j)| Point { x: self.xs[i].clone(), y: self.ys[j].clone() })
                    .collect();
                let mut poly = RectilinearPolygon { vertices, component: cid, hole: false };
                poly.hole = poly.signed_area().is_negative();
                polygons.push(poly);
            }
        }
        polygons.sort_by(|a, b| {
            (a.component, a.hole, &a.vertices[0]).cmp(&(b.component, b.hole, &b.vertices[0]))
        });
        RegionSet { polygons, components: comps.len(), area: self.free_area() }
    }

    /// Boundary cycles of one component in grid-index coordinates, with
    /// collinear points removed. Pinch points split cycles.
    fn trace_loops(&self, cells: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
        let inside: std::collections::HashSet<(usize, usize)> = cells.iter().copied().collect();
        type P = (usize, usize);
        let mut out_edges: BTreeMap<P, Vec<P>> = BTreeMap::new();
        let mut add = |a: P, b: P| out_edges.entry(a).or_default().push(b);
        for &(i, j) in cells {
            let bottom = j == 0 || !inside.contains(&(i, j - 1));
            let top = !inside.contains(&(i, j + 1));
            let left = i == 0 || !inside.contains(&(i - 1, j));
            let right = !inside.contains(&(i + 1, j));
            if bottom {
                add((i, j), (i + 1, j));
            }
            if right {
                add((i + 1, j), (i + 1, j + 1));
            }
            if top {
                add((i + 1, j + 1), (i, j + 1));
            }
            if left {
                add((i, j + 1), (i, j));
            }
        }
        let dir = |a: P, b: P| -> (i64, i64) {
            ((b.0 as i64 - a.0 as i64).signum(), (b.1 as i64 - a.1 as i64).signum())
        };
        let mut loops = Vec::new();
        while let Some((&start, _)) = out_edges.iter().find(|(_, v)| !v.is_empty()) {
            let first = out_edges.get_mut(&start).unwrap().remove(0);
            let mut pts = vec![start];
            let mut prev = start;
            let mut cur = first;
            while cur != start {
                pts.push(cur);
                let din = dir(prev, cur);
                let outs = out_edges.get_mut(&cur).expect("boundary is closed");
                // prefer left turn, then straight, then right
                let rank = |d: (i64, i64)| {
                    let cross = din.0 * d.1 - din.1 * d.0;
                    if cross > 0 {
                        0
                    } else if cross == 0 {
                        1
                    } else {
                        2
                    }
                };
                let (k, _) = outs
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &n)| rank(dir(cur, n)))
                    .expect("boundary is closed");
                let next = outs.remove(k);
                prev = cur;
                cur = next;
            }
            // drop collinear points
            let n = pts.len();
            let mut simple = Vec::with_capacity(n);
            for k in 0..n {
                let a = pts[(k + n - 1) % n];
                let b = pts[k];
                let c = pts[(k + 1) % n];
                if dir(a, b) != dir(b, c) {
                    simple.push(b);
                }
            }
            let min_pos = simple
                .iter()
                .enumerate()
                .min_by_key(|(_, p)| **p)
                .map(|(i, _)| i)
                .unwrap_or(0);
            simple.rotate_left(min_pos);
            loops.push(simple);
        }
        loops
    }

    /// Cuts the free space into rectangles by extending a cut parallel to the
    /// y axis from every reflex vertex (`vertical = true`), or parallel to the
    /// x axis otherwise.
    pub fn blocks(&self, vertical: bool) -> Vec<Rect> {
        if !vertical {
            let t = self.transposed();
            let mut rects: Vec<Rect> = t.blocks(true).iter().map(Rect::transposed).collect();
            rects.sort();
            return rects;
        }
        // open blocks keyed by their y-run, valued by starting column
        let mut open: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut done = Vec::new();
        for i in 0..=self.cols() {
            let runs = if i < self.cols() { self.column_runs(i) } else { Vec::new() };
            let keys: Vec<(usize, usize)> = open.keys().copied().collect();
            for key in keys {
                if !runs.contains(&key) {
                    let start = open.remove(&key).unwrap();
                    done.push(Rect::new(
                        self.xs[start].clone(),
                        self.ys[key.0].clone(),
                        self.xs[i].clone(),
                        self.ys[key.1].clone(),
                    ));
                }
            }
            for run in runs {
                open.entry(run).or_insert(i);
            }
        }
        done.sort();
        done
    }

    fn column_runs(&self, i: usize) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut j = 0;
        while j < self.rows() {
            if self.free[i][j] {
                let s = j;
                while j < self.rows() && self.free[i][j] {
                    j += 1;
                }
                runs.push((s, j));
            } else {
                j += 1;
            }
        }
        runs
    }

    fn transposed(&self) -> CellGrid {
        let mut free = vec![vec![false; self.cols()]; self.rows()];
        for i in 0..self.cols() {
            for j in 0..self.rows() {
                free[j][i] = self.free[i][j];
            }
        }
        CellGrid { xs: self.ys.clone(), ys: self.xs.clone(), free }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bin, Square};
    use crate::scalar::q;

    fn pl(id: &str, side: &str, x: &str, y: &str) -> Placement {
        Placement::new(Square::new(id, q(side), Scalar::one()).unwrap(), q(x), q(y))
    }

    #[test]
    fn empty_bin_is_one_rectangle() {
        let r = uncovered_region(&Packing::empty(Bin::unit())).unwrap();
        assert_eq!(r.polygons.len(), 1);
        assert_eq!(r.vertex_count(), 4);
        assert_eq!(r.area, Scalar::one());
        assert_eq!(r.polygons[0].vertices[0], Point { x: q("0"), y: q("0") });
        assert_eq!(r.convex_corners().len(), 4);
    }

    #[test]
    fn corner_square_leaves_an_l() {
        let p = Packing::new(Bin::unit(), vec![pl("a", "0.5", "0", "0")]);
        let r = uncovered_region(&p).unwrap();
        assert_eq!(r.polygons.len(), 1);
        assert_eq!(r.vertex_count(), 6);
        assert_eq!(r.reflex_count(), 1);
        assert_eq!(r.area, q("3/4"));
        let v: Vec<(String, String)> = r.polygons[0]
            .vertices
            .iter()
            .map(|p| (p.x.to_string(), p.y.to_string()))
            .collect();
        let expect = [("0", "1/2"), ("1/2", "1/2"), ("1/2", "0"), ("1", "0"), ("1", "1"), ("0", "1")];
        let expect: Vec<(String, String)> = expect.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        assert_eq!(v, expect);
    }

    #[test]
    fn diagonal_halves_split_into_two_rectangles() {
        let p = Packing::new(Bin::unit(), vec![pl("a", "0.5", "0", "0"), pl("b", "0.5", "0.5", "0.5")]);
        let r = uncovered_region(&p).unwrap();
        assert_eq!(r.components, 2);
        assert_eq!(r.polygons.len(), 2);
        assert_eq!(r.vertex_count(), 8);
        assert!(r.vertex_count() <= 4 + 2 * 2);
    }

    #[test]
    fn floating_square_makes_a_hole() {
        let p = Packing::new(Bin::unit(), vec![pl("a", "0.5", "0.25", "0.25")]);
        let r = uncovered_region(&p).unwrap();
        assert_eq!(r.components, 1);
        assert_eq!(r.polygons.len(), 2);
        assert!(r.polygons.iter().any(|p| p.hole));
        assert_eq!(r.area, q("3/4"));
    }

    #[test]
    fn infeasible_packing_is_rejected() {
        let p = Packing::new(Bin::unit(), vec![pl("a", "0.6", "0", "0"), pl("b", "0.6", "0.3", "0.3")]);
        assert!(uncovered_region(&p).is_err());
    }

    #[test]
    fn one_corner_square_cuts_into_two_blocks() {
        let rects = vec![pl("a", "0.5", "0", "0").rect()];
        let g = CellGrid::new(&Rect::of_bin(&Bin::unit()), &rects);
        let blocks = g.blocks(true);
        assert_eq!(blocks.len(), 2);
        let area: Scalar = blocks.iter().map(Rect::area).sum();
        assert_eq!(area, q("3/4"));
        let horizontal = g.blocks(false);
        assert_eq!(horizontal.len(), 2);
        assert_eq!(horizontal.iter().map(Rect::area).sum::<Scalar>(), q("3/4"));
    }
}

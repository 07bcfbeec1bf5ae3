//! Convex polygons in the 2-D image of the 3-simplex.

use serde::Serialize;

use crate::simplex::{project_coords, unproject};

/// Polygons below this area are treated as empty.
pub const AREA_EPS: f64 = 1e-14;

pub type Point = [f64; 2];

/// The half-plane `a . p <= c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub a: [f64; 2],
    pub c: f64,
}

impl HalfPlane {
    pub fn new(a: [f64; 2], c: f64) -> Self {
        HalfPlane { a, c }
    }

    /// The image of the barycentric half-space `w . x <= b` (with `sum(x) = 1`).
    pub fn from_barycentric(w: [f64; 3], b: f64) -> Self {
        // x1 = 1 - x2 - x3, x3 = 2y/sqrt(3), x2 = px - y/sqrt(3)
        let r3 = 3f64.sqrt();
        let (d2, d3) = (w[1] - w[0], w[2] - w[0]);
        HalfPlane { a: [d2, (2.0 * d3 - d2) / r3], c: b - w[0] }
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.a[0] * p[0] + self.a[1] * p[1] - self.c
    }

    pub fn complement(&self) -> Self {
        HalfPlane { a: [-self.a[0], -self.a[1]], c: -self.c }
    }
}

/// A convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl ConvexPolygon {
    /// Builds a polygon from vertices in either orientation. Repeated
    /// vertices are dropped.
    pub fn new(vertices: Vec<Point>) -> Self {
        let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if v.last().is_none_or(|q: &Point| (p[0] - q[0]).abs() > 1e-15 || (p[1] - q[1]).abs() > 1e-15) {
                v.push(p);
            }
        }
        while v.len() > 1 {
            let (f, l) = (v[0], v[v.len() - 1]);
            if (f[0] - l[0]).abs() <= 1e-15 && (f[1] - l[1]).abs() <= 1e-15 {
                v.pop();
            } else {
                break;
            }
        }
        let mut poly = ConvexPolygon { vertices: v };
        if poly.signed_area() < 0.0 {
            poly.vertices.reverse();
        }
        poly
    }

    /// The image of the standard 3-simplex.
    pub fn triangle() -> Self {
        ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]])
    }

    /// Polygon of the barycentric points of the simplex satisfying all `w . x <= b`.
    pub fn from_barycentric_constraints(cons: &[([f64; 3], f64)]) -> Self {
        cons.iter()
            .fold(Self::triangle(), |p, &(w, b)| p.clip(&HalfPlane::from_barycentric(w, b)))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Vertices as barycentric coordinates.
    pub fn barycentric_vertices(&self) -> Vec<[f64; 3]> {
        self.vertices.iter().map(|&p| unproject(p)).collect()
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
            / 2.0
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3 || self.area() < AREA_EPS
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let a = self.signed_area();
        if n < 3 || a == 0.0 {
            let k = n.max(1) as f64;
            let s = self.vertices.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
            return [s[0] / k, s[1] / k];
        }
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    /// Sutherland-Hodgman clip against one half-plane.
    pub fn clip(&self, h: &HalfPlane) -> Self {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let (fp, fq) = (h.eval(p), h.eval(q));
            if fp <= 0.0 {
                out.push(p);
            }
            if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
                let t = fp / (fp - fq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        ConvexPolygon::new(out)
    }

    /// Edge half-planes; the polygon is their intersection.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                HalfPlane { a: [dy, -dx], c: dy * p[0] - dx * p[1] }
            })
            .collect()
    }

    pub fn intersect(&self, other: &ConvexPolygon) -> Self {
        let mut out = self.clone();
        for h in other.half_planes() {
            out = out.clip(&h);
            if out.is_empty() {
                return ConvexPolygon::default();
            }
        }
        out
    }

    /// `self \ other` as disjoint convex pieces, by sequential complement clipping.
    pub fn difference(&self, other: &ConvexPolygon) -> Vec<ConvexPolygon> {
        let mut pieces = Vec::new();
        let mut rest = self.clone();
        for h in other.half_planes() {
            let outside = rest.clip(&h.complement());
            if !outside.is_empty() {
                pieces.push(outside);
            }
            rest = rest.clip(&h);
            if rest.is_empty() {
                break;
            }
        }
        pieces
    }

    /// Membership with slack `tol` on every edge.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.vertices.len() >= 3
            && self.half_planes().iter().all(|h| {
                let norm = h.a[0].hypot(h.a[1]);
                norm == 0.0 || h.eval(p) <= tol * norm
            })
    }

    /// Whether every vertex of `other` lies in `self` within `tol`.
    pub fn contains_polygon(&self, other: &ConvexPolygon, tol: f64) -> bool {
        other.vertices.iter().all(|&p| self.contains(p, tol))
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        ConvexPolygon::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Area of the symmetric difference, zero for equal polygons.
    pub fn symmetric_difference_area(&self, other: &ConvexPolygon) -> f64 {
        let common = self.intersect(other).area();
        (self.area() + other.area() - 2.0 * common).max(0.0)
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        self.vertices.iter().fold(
            ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
            |(lo, hi), p| ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])]),
        )
    }

    /// Whether the two polygons are the same set, up to `tol` on each vertex.
    pub fn approx_eq(&self, other: &ConvexPolygon, tol: f64) -> bool {
        let n = self.vertices.len();
        if n != other.vertices.len() {
            return self.symmetric_difference_area(other) < tol * tol;
        }
        let close = |p: Point, q: Point| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol;
        (0..n).any(|shift| (0..n).all(|i| close(self.vertices[i], other.vertices[(i + shift) % n])))
    }
}

/// Projection of a barycentric point.
pub fn to_plane(x: &[f64]) -> Point {
    project_coords(x)
}

/// Whether the boundary turns left (or goes straight) at every vertex.
pub fn is_convex_ccw(p: &ConvexPolygon) -> bool {
    let v = p.vertices();
    let n = v.len();
    n >= 3 && (0..n).all(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> ConvexPolygon {
        ConvexPolygon::new(vec![[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]])
    }

    #[test]
    fn triangle_area() {
        assert!((ConvexPolygon::triangle().area() - 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn orientation_is_normalised() {
        let cw = ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]);
        assert!(cw.signed_area() > 0.0);
        assert!(is_convex_ccw(&cw));
    }

    #[test]
    fn barycentric_half_planes() {
        let t = ConvexPolygon::triangle();
        // The corner x1 > 0.5 holds a quarter of the area.
        let cut = t.clip(&HalfPlane::from_barycentric([1.0, 0.0, 0.0], 0.5));
        assert!((cut.area() / t.area() - 0.75).abs() < 1e-12);
        let h = HalfPlane::from_barycentric([0.0, 0.0, 1.0], 0.25);
        assert!(h.eval(to_plane(&[0.5, 0.3, 0.2])) < 0.0);
        assert!(h.eval(to_plane(&[0.5, 0.2, 0.3])) > 0.0);
        assert!(h.eval(to_plane(&[0.5, 0.25, 0.25])).abs() < 1e-15);
    }

    #[test]
    fn feasible_triangle_mass() {
        let t0 = ConvexPolygon::from_barycentric_constraints(&[([1.0, 0.0, 0.0], 0.5), ([0.0, 1.0, 0.0], 0.25)]);
        let frac = t0.area() / ConvexPolygon::triangle().area();
        assert!((frac - 0.25).abs() < 1e-12);
    }

    #[test]
    fn difference_and_intersection_partition() {
        let a = square(0.0, 0.0, 1.0);
        let b = ConvexPolygon::new(vec![[0.5, -1.0], [2.0, 0.5], [0.5, 2.0], [-0.2, 0.5]]);
        let inter = a.intersect(&b);
        let diff = a.difference(&b);
        let total = inter.area() + diff.iter().map(|p| p.area()).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-12);
        for d in &diff {
            assert!(d.intersect(&b).area() < 1e-12);
        }
    }

    #[test]
    fn disjoint_and_contained() {
        let a = square(0.0, 0.0, 1.0);
        assert!(a.intersect(&square(2.0, 2.0, 1.0)).is_empty());
        assert!(a.difference(&square(-1.0, -1.0, 3.0)).is_empty());
        assert_eq!(a.difference(&square(5.0, 5.0, 1.0)).len(), 1);
    }

    #[test]
    fn centroid_of_square() {
        let c = square(1.0, 2.0, 2.0).centroid();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn approx_eq_ignores_starting_vertex() {
        let a = square(0.0, 0.0, 1.0);
        let b = ConvexPolygon::new(vec![[1.0, 1.0], [0.0, 1.0], [0.0, 0.0], [1.0, 0.0]]);
        assert!(a.approx_eq(&b, 1e-9));
        assert!(!a.approx_eq(&square(0.0, 0.0, 1.1), 1e-9));
    }

    #[test]
    fn containment() {
        let a = square(0.0, 0.0, 1.0);
        assert!(a.contains([0.5, 0.5], 0.0));
        assert!(a.contains([1.0 + 1e-10, 0.5], 1e-9));
        assert!(!a.contains([1.1, 0.5], 1e-9));
    }
}

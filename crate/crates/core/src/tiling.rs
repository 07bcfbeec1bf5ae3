//! Analytic audit of the simplified DRS sampler on the 3-simplex.
//!
//! Every point outside the feasible triangle `T_0` is rescaled by exactly
//! one of a few affine maps, chosen by which upper bounds it violates.
//! Running those maps backwards from `T_0` tiles the simplex: the tile with
//! sequence `(A_1, .., A_i)` holds the points that reach `T_0` after exactly
//! `i` steps, applying `A_1` first. A tile's mass lands uniformly on its
//! projection `P(T)`, so the mass reaching each part of `T_0` can be
//! computed exactly and compared with what a uniform sampler would give.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point, AREA_EPS};
use crate::simplex::project_coords;

pub const DEFAULT_DEPTH: usize = 7;
/// Vertex tolerance for containment checks.
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Refinement aborts beyond this many regions.
pub const MAX_REGIONS: usize = 64;
const REGION_AREA_EPS: f64 = 1e-12;
const SHAPE_TOL: f64 = 1e-9;

/// One DRS rescale: applies to points of `region`, anchored at `offset`.
#[derive(Clone, Debug, Serialize)]
pub struct Transform {
    pub label: String,
    pub offset: [f64; 3],
    pub region: ConvexPolygon,
}

impl Transform {
    fn scale(&self) -> f64 {
        1.0 - self.offset.iter().sum::<f64>()
    }

    /// `y = (x - t) / s`, in the plane.
    pub fn forward(&self, p: Point) -> Point {
        let (t, s) = (project_coords(&self.offset), self.scale());
        [(p[0] - t[0]) / s, (p[1] - t[1]) / s]
    }

    /// `x = s y + t`, in the plane.
    pub fn inverse(&self, p: Point) -> Point {
        let (t, s) = (project_coords(&self.offset), self.scale());
        [s * p[0] + t[0], s * p[1] + t[1]]
    }
}

/// The feasible triangle and the rescale maps of an upper-bound instance.
#[derive(Clone, Debug, Serialize)]
pub struct TransformFamily {
    pub upper: [f64; 3],
    pub feasible: ConvexPolygon,
    pub maps: Vec<Transform>,
}

impl TransformFamily {
    /// Builds the family for `x <= u` on the 3-simplex. Exactly two bounds
    /// must bind (`u_i < 1`) and they must be jointly violable
    /// (`u_i + u_j < 1`), giving the maps `A_1` (only `i` violated),
    /// `A_2` (only `j`) and `A_3` (both).
    pub fn for_upper_bounds(u: &[f64]) -> Result<Self> {
        if u.len() != 3 {
            return Err(Error::Unsupported(format!(
                "the tiling audit works on the 3-simplex, got n = {}",
                u.len()
            )));
        }
        if u.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Input(format!("upper bounds must lie in [0, 1], got {u:?}")));
        }
        let binding: Vec<usize> = (0..3).filter(|&k| u[k] < 1.0).collect();
        if binding.len() != 2 {
            return Err(Error::Unsupported(format!(
                "need exactly two binding upper bounds, got {}",
                binding.len()
            )));
        }
        let (i, j) = (binding[0], binding[1]);
        if u[i] + u[j] >= 1.0 {
            return Err(Error::Unsupported(format!(
                "u[{i}] + u[{j}] = {} >= 1: the bounds cannot be violated together",
                u[i] + u[j]
            )));
        }
        let unit = |k: usize| {
            let mut w = [0.0; 3];
            w[k] = 1.0;
            w
        };
        let neg = |k: usize| {
            let mut w = [0.0; 3];
            w[k] = -1.0;
            w
        };
        let le = |k: usize| (unit(k), u[k]);
        let gt = |k: usize| (neg(k), -u[k]);
        let off = |ks: &[usize]| {
            let mut t = [0.0; 3];
            for &k in ks {
                t[k] = u[k];
            }
            t
        };
        let feasible = ConvexPolygon::from_barycentric_constraints(&[le(i), le(j)]);
        if feasible.is_empty() {
            return Err(Error::Infeasible("the feasible triangle is empty".into()));
        }
        let maps = vec![
            Transform {
                label: "A1".into(),
                offset: off(&[i]),
                region: ConvexPolygon::from_barycentric_constraints(&[gt(i), le(j)]),
            },
            Transform {
                label: "A2".into(),
                offset: off(&[j]),
                region: ConvexPolygon::from_barycentric_constraints(&[gt(j), le(i)]),
            },
            Transform {
                label: "A3".into(),
                offset: off(&[i, j]),
                region: ConvexPolygon::from_barycentric_constraints(&[gt(i), gt(j)]),
            },
        ];
        let u3 = [u[0], u[1], u[2]];
        Ok(TransformFamily { upper: u3, feasible, maps })
    }

    /// Index of the map that applies at `p`, or `None` inside `T_0`.
    pub fn map_at(&self, p: Point) -> Option<usize> {
        let x = crate::simplex::unproject(p);
        let i = (0..3).filter(|&k| x[k] > self.upper[k]).collect::<Vec<_>>();
        match i.len() {
            0 => None,
            1 if self.maps[0].offset[i[0]] > 0.0 => Some(0),
            1 => Some(1),
            _ => Some(2),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    /// Indices into the family's maps, in application order.
    pub sequence: Vec<usize>,
    pub region: Vec<ConvexPolygon>,
    /// Fraction of the simplex.
    pub mass: f64,
}

impl Tile {
    pub fn steps(&self) -> usize {
        self.sequence.len()
    }

    pub fn label(&self, family: &TransformFamily) -> String {
        if self.sequence.is_empty() {
            return "T0".into();
        }
        self.sequence.iter().map(|&k| family.maps[k].label.as_str()).collect::<Vec<_>>().join(",")
    }
}

fn simplex_area() -> f64 {
    3f64.sqrt() / 4.0
}

fn region_area(pieces: &[ConvexPolygon]) -> f64 {
    pieces.iter().map(ConvexPolygon::area).sum()
}

/// All nonempty tiles reached with at most `depth` reverse steps, `T_0` first.
pub fn tile_simplex(family: &TransformFamily, depth: usize) -> Result<Vec<Tile>> {
    if depth == 0 {
        return Err(Error::Input("depth must be at least 1".into()));
    }
    let total = simplex_area();
    let mut tiles = vec![Tile {
        sequence: vec![],
        region: vec![family.feasible.clone()],
        mass: family.feasible.area() / total,
    }];
    let mut frontier = vec![(Vec::<usize>::new(), family.feasible.clone())];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (seq, poly) in &frontier {
            for (k, map) in family.maps.iter().enumerate() {
                let pre = poly.map(|p| map.inverse(p)).intersect(&map.region);
                if pre.is_empty() {
                    continue;
                }
                let mut s = Vec::with_capacity(seq.len() + 1);
                s.push(k);
                s.extend_from_slice(seq);
                next.push((s, pre));
            }
        }
        tiles.extend(next.iter().map(|(s, p)| Tile {
            sequence: s.clone(),
            region: vec![p.clone()],
            mass: p.area() / total,
        }));
        frontier = next;
    }
    Ok(tiles)
}

/// Mass of the points still outside `T_0` after `depth` steps, computed
/// by pulling the infeasible set back rather than by subtracting tiles.
pub fn residual_mass(family: &TransformFamily, depth: usize) -> f64 {
    let mut pending: Vec<ConvexPolygon> = family.maps.iter().map(|m| m.region.clone()).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for poly in &pending {
            for map in &family.maps {
                let pre = poly.map(|p| map.inverse(p)).intersect(&map.region);
                if !pre.is_empty() {
                    next.push(pre);
                }
            }
        }
        pending = next;
    }
    region_area(&pending) / simplex_area()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectedTile {
    /// Index into the tile list.
    pub tile: usize,
    pub polygon: ConvexPolygon,
    pub mass: f64,
    /// Mass per unit area of the planar image.
    pub density: f64,
}

/// Pushes every tile forward through its sequence, landing in `T_0`.
pub fn project_tiles(family: &TransformFamily, tiles: &[Tile]) -> Vec<ProjectedTile> {
    tiles
        .iter()
        .enumerate()
        .flat_map(|(idx, t)| {
            t.region.iter().map(move |poly| {
                let img = t
                    .sequence
                    .iter()
                    .fold(poly.clone(), |acc, &k| acc.map(|p| family.maps[k].forward(p)));
                let mass = t.mass * poly.area() / region_area(&t.region);
                let area = img.area();
                ProjectedTile { tile: idx, polygon: img, mass, density: if area > 0.0 { mass / area } else { 0.0 } }
            })
        })
        .collect()
}

/// Distinct projected polygons, in first-seen order.
pub fn unique_shapes(projected: &[ProjectedTile]) -> Vec<ConvexPolygon> {
    let mut shapes: Vec<ConvexPolygon> = Vec::new();
    for p in projected {
        if !shapes.iter().any(|s| s.approx_eq(&p.polygon, SHAPE_TOL)) {
            shapes.push(p.polygon.clone());
        }
    }
    shapes
}

/// A region of `T_0` as a union of convex pieces.
#[derive(Clone, Debug, Serialize)]
pub struct Region {
    pub pieces: Vec<ConvexPolygon>,
}

impl Region {
    pub fn area(&self) -> f64 {
        region_area(&self.pieces)
    }

    pub fn centroid(&self) -> Point {
        let a = self.area();
        let (x, y) = self.pieces.iter().fold((0.0, 0.0), |(x, y), p| {
            let (c, w) = (p.centroid(), p.area());
            (x + c[0] * w, y + c[1] * w)
        });
        [x / a, y / a]
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces.iter().any(|q| q.contains(p, 0.0))
    }

    fn overlap(&self, poly: &ConvexPolygon) -> f64 {
        self.pieces.iter().map(|q| q.intersect(poly).area()).sum()
    }
}

/// Splits `T_0` against every shape until each region lies entirely inside
/// or outside each shape, then orders regions by descending centroid `y`,
/// then ascending `x`.
pub fn refine_regions(feasible: &ConvexPolygon, shapes: &[ConvexPolygon]) -> Result<Vec<Region>> {
    let mut regions = vec![Region { pieces: vec![feasible.clone()] }];
    for shape in shapes {
        let mut next = Vec::with_capacity(regions.len() * 2);
        for r in &regions {
            let inside: Vec<_> = r.pieces.iter().map(|p| p.intersect(shape)).filter(|p| !p.is_empty()).collect();
            let outside: Vec<_> = r.pieces.iter().flat_map(|p| p.difference(shape)).collect();
            for pieces in [inside, outside] {
                if region_area(&pieces) > REGION_AREA_EPS {
                    next.push(Region { pieces });
                }
            }
        }
        if next.len() > MAX_REGIONS {
            return Err(Error::Unsupported(format!(
                "region refinement produced more than {MAX_REGIONS} regions"
            )));
        }
        regions = next;
    }
    let mut keyed: Vec<(Point, Region)> = regions.into_iter().map(|r| (r.centroid(), r)).collect();
    keyed.sort_by(|(a, _), (b, _)| b[1].total_cmp(&a[1]).then(a[0].total_cmp(&b[0])));
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionRow {
    pub region: usize,
    /// Percent of the simplex mass.
    pub realised: f64,
    pub target: f64,
    pub delta: f64,
    pub centroid: Point,
    /// Fraction of `T_0`.
    pub area_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionReport {
    pub depth: usize,
    pub rows: Vec<RegionRow>,
    pub total_realised: f64,
    pub total_target: f64,
    /// Percent of mass outside the tiles, from the independent pull-back.
    pub residual: f64,
    pub sum_abs_delta: f64,
    pub max_abs_delta: f64,
    pub tiles: usize,
    pub unique_shapes: usize,
}

/// Realised and target mass per region, in percent.
pub fn region_report(
    family: &TransformFamily,
    projected: &[ProjectedTile],
    regions: &[Region],
    depth: usize,
) -> RegionReport {
    let t0 = family.feasible.area();
    let realised: Vec<f64> = regions
        .iter()
        .map(|r| {
            100.0
                * projected
                    .iter()
                    .filter(|p| p.polygon.area() >= AREA_EPS)
                    .map(|p| p.mass * r.overlap(&p.polygon) / p.polygon.area())
                    .sum::<f64>()
        })
        .collect();
    let allocated: f64 = 100.0 * projected.iter().map(|p| p.mass).sum::<f64>();
    let rows: Vec<RegionRow> = regions
        .iter()
        .zip(&realised)
        .enumerate()
        .map(|(k, (r, &real))| {
            let frac = r.area() / t0;
            let target = allocated * frac;
            RegionRow { region: k, realised: real, target, delta: real - target, centroid: r.centroid(), area_fraction: frac }
        })
        .collect();
    let tiles = projected.iter().map(|p| p.tile).max().map_or(0, |m| m + 1);
    RegionReport {
        depth,
        total_realised: rows.iter().map(|r| r.realised).sum(),
        total_target: rows.iter().map(|r| r.target).sum(),
        residual: 100.0 * residual_mass(family, depth),
        sum_abs_delta: rows.iter().map(|r| r.delta.abs()).sum(),
        max_abs_delta: rows.iter().map(|r| r.delta.abs()).fold(0.0, f64::max),
        rows,
        tiles,
        unique_shapes: 0,
    }
}

/// Everything produced by one audit run.
#[derive(Clone, Debug, Serialize)]
pub struct TilingAudit {
    pub family: TransformFamily,
    pub tiles: Vec<Tile>,
    pub projected: Vec<ProjectedTile>,
    pub shapes: Vec<ConvexPolygon>,
    pub regions: Vec<Region>,
    pub report: RegionReport,
}

impl TilingAudit {
    pub fn run(upper: &[f64], depth: usize) -> Result<Self> {
        let family = TransformFamily::for_upper_bounds(upper)?;
        let tiles = tile_simplex(&family, depth)?;
        let projected = project_tiles(&family, &tiles);
        let shapes = unique_shapes(&projected);
        let regions = refine_regions(&family.feasible, &shapes)?;
        let mut report = region_report(&family, &projected, &regions, depth);
        report.unique_shapes = shapes.len();
        Ok(TilingAudit { family, tiles, projected, shapes, regions, report })
    }

    /// Region containing the barycentric point `x`, if it lies in `T_0`.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let p = project_coords(x);
        self.regions.iter().position(|r| r.contains(p))
    }

    /// Total tile mass plus residual; 1 up to rounding.
    pub fn mass_balance(&self) -> f64 {
        self.tiles.iter().map(|t| t.mass).sum::<f64>() + self.report.residual / 100.0
    }
}

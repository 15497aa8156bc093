//! Conforming triangulations of the unit disk and of axis-aligned rectangles.
//!
//! Triangles are stored counterclockwise. Every boundary edge carries a
//! [`BoundaryTag`] so that boundary conditions can be attached to parts of
//! the boundary. Per-element geometry (area and the constant gradients of
//! the barycentric coordinates) is computed once at construction.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Highest disk refinement level accepted by [`generate_disk_mesh`].
pub const MAX_DISK_LEVEL: usize = 8;

/// Number of rings of the level-0 disk mesh. Level `L` uses `7 · 2^L` rings,
/// which gives mesh sizes of roughly `0.2 / 2^L`.
pub const BASE_DISK_RINGS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// The whole circle of a disk mesh.
    Outer,
    /// The faces `x = x_min` and `x = x_max` of a rectangle.
    LeftRight,
    /// The faces `y = y_min` and `y = y_max` of a rectangle.
    TopBottom,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Outer => "OUTER",
            BoundaryTag::LeftRight => "LEFT_RIGHT",
            BoundaryTag::TopBottom => "TOP_BOTTOM",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "OUTER" => Ok(BoundaryTag::Outer),
            "LEFT_RIGHT" => Ok(BoundaryTag::LeftRight),
            "TOP_BOTTOM" => Ok(BoundaryTag::TopBottom),
            other => Err(Error::Parse(format!("unknown boundary tag `{other}`"))),
        }
    }
}

/// What the mesh approximates; decides how refinement treats new boundary
/// vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainShape {
    /// Unit disk centred at the origin; boundary vertices sit on the circle.
    UnitDisk,
    Rectangle {
        x: (f64, f64),
        y: (f64, f64),
    },
    /// Any polygon; refinement inserts plain midpoints.
    Polygon,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    /// Endpoints in the counterclockwise orientation of the owning triangle.
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Affine data of one triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Element {
    pub area: f64,
    /// Gradients of the three barycentric coordinates (constant on the triangle).
    pub grads: [[f64; 2]; 3],
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    shape: DomainShape,
    elements: Vec<Element>,
    h_max: f64,
}

impl Mesh {
    /// Builds a mesh from raw parts and validates orientation and
    /// conformity. Boundary edges must be exactly the edges owned by a
    /// single triangle.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        shape: DomainShape,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let nv = vertices.len();
        let mut elements = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let el = element_geometry(&vertices, *tri);
            if !(el.area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive signed area {}",
                    el.area
                )));
            }
            elements.push(el);
        }

        let counts = edge_counts(&triangles);
        let mut boundary_keys: Vec<(usize, usize)> = counts
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&k, _)| k)
            .collect();
        boundary_keys.sort_unstable();
        if let Some((&(a, b), &c)) = counts.iter().find(|(_, &c)| c > 2) {
            return Err(Error::InvalidMesh(format!(
                "edge ({a}, {b}) shared by {c} triangles"
            )));
        }
        let mut tagged: Vec<(usize, usize)> = boundary_edges
            .iter()
            .map(|e| edge_key(e.vertices[0], e.vertices[1]))
            .collect();
        tagged.sort_unstable();
        if tagged != boundary_keys {
            return Err(Error::InvalidMesh(
                "tagged boundary edges do not match the topological boundary".into(),
            ));
        }

        let h_max = triangles
            .iter()
            .map(|tri| triangle_diameter(&vertices, *tri))
            .fold(0.0, f64::max);

        Ok(Mesh {
            vertices,
            triangles,
            boundary_edges,
            shape,
            elements,
            h_max,
        })
    }

    /// Builds a polygonal mesh and derives the boundary from adjacency, tagging
    /// every boundary edge with `tag`.
    pub fn from_triangles(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        tag: BoundaryTag,
    ) -> Result<Self> {
        let counts = edge_counts(&triangles);
        let mut boundary = Vec::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if counts.get(&edge_key(a, b)) == Some(&1) {
                    boundary.push(BoundaryEdge {
                        vertices: [a, b],
                        tag,
                    });
                }
            }
        }
        Mesh::new(vertices, triangles, boundary, DomainShape::Polygon)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Maximum triangle diameter.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    pub fn has_tag(&self, tag: BoundaryTag) -> bool {
        self.boundary_edges.iter().any(|e| e.tag == tag)
    }

    /// Sorted, deduplicated vertices lying on edges with one of `tags`.
    pub fn boundary_vertices(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_edges
            .iter()
            .filter(|e| tags.contains(&e.tag))
            .flat_map(|e| e.vertices)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// All boundary vertices regardless of tag.
    pub fn all_boundary_vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .boundary_edges
            .iter()
            .flat_map(|e| e.vertices)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of triangles sharing each undirected edge.
    pub fn edge_triangle_counts(&self) -> HashMap<(usize, usize), usize> {
        edge_counts(&self.triangles)
    }

    /// Inscribed-circle radius of triangle `t`.
    pub fn inradius(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let p = &self.vertices;
        let perimeter = dist(p[a], p[b]) + dist(p[b], p[c]) + dist(p[c], p[a]);
        2.0 * self.elements[t].area / perimeter
    }

    /// Writes the plain-text dump: `NV NT NE`, then vertices, triangles and
    /// tagged boundary edges, all indices 0-based.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{} {} {}",
            self.vertices.len(),
            self.triangles.len(),
            self.boundary_edges.len()
        )?;
        for v in &self.vertices {
            writeln!(out, "{:?} {:?}", v[0], v[1])?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.boundary_edges {
            writeln!(out, "{} {} {}", e.vertices[0], e.vertices[1], e.tag)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Mesh::write_text`]. The result is
    /// treated as a polygonal mesh.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .map(|l| l.map_err(|e| Error::Parse(e.to_string())));
        let mut next = || -> Result<String> {
            lines
                .next()
                .unwrap_or_else(|| Err(Error::Parse("unexpected end of mesh file".into())))
        };
        let header = next()?;
        let counts: Vec<usize> = parse_fields(&header)?;
        let [nv, nt, ne] = counts[..] else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let f: Vec<f64> = parse_fields(&next()?)?;
            vertices.push([f[0], f[1]]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let f: Vec<usize> = parse_fields(&next()?)?;
            triangles.push([f[0], f[1], f[2]]);
        }
        let mut edges = Vec::with_capacity(ne);
        for _ in 0..ne {
            let line = next()?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad edge line `{line}`")));
            }
            let a = parts[0].parse().map_err(|_| Error::Parse(line.clone()))?;
            let b = parts[1].parse().map_err(|_| Error::Parse(line.clone()))?;
            edges.push(BoundaryEdge {
                vertices: [a, b],
                tag: parts[2].parse()?,
            });
        }
        Mesh::new(vertices, triangles, edges, DomainShape::Polygon)
    }
}

fn parse_fields<T: FromStr>(line: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| Error::Parse(format!("cannot parse `{s}`")))
        })
        .collect()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn edge_counts(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut counts = HashMap::with_capacity(triangles.len() * 2);
    for tri in triangles {
        for k in 0..3 {
            *counts
                .entry(edge_key(tri[k], tri[(k + 1) % 3]))
                .or_insert(0) += 1;
        }
    }
    counts
}

fn triangle_diameter(vertices: &[[f64; 2]], [a, b, c]: [usize; 3]) -> f64 {
    let (pa, pb, pc) = (vertices[a], vertices[b], vertices[c]);
    dist(pa, pb).max(dist(pb, pc)).max(dist(pc, pa))
}

fn element_geometry(vertices: &[[f64; 2]], [a, b, c]: [usize; 3]) -> Element {
    let (p0, p1, p2) = (vertices[a], vertices[b], vertices[c]);
    let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    // grad λ_k = rot(p_{k+2} - p_{k+1}) / det
    let g = |pi: [f64; 2], pj: [f64; 2]| [(pi[1] - pj[1]) / det, (pj[0] - pi[0]) / det];
    Element {
        area: 0.5 * det,
        grads: [g(p1, p2), g(p2, p0), g(p0, p1)],
    }
}

/// Mesh size: the largest distance between two vertices of one triangle.
pub fn mesh_size(mesh: &Mesh) -> f64 {
    mesh.h_max()
}

/// Ring-structured triangulation of the unit disk with `rings` concentric
/// vertex rings. Ring `k` carries `6k` equally spaced vertices at radius
/// `k / rings`; a single ring is the six-triangle hexagon fan.
pub fn disk_mesh_with_rings(rings: usize) -> Result<Mesh> {
    if rings == 0 {
        return Err(Error::InvalidArgument(
            "disk mesh needs at least one ring".into(),
        ));
    }
    let n = rings;
    let ring_start = |k: usize| if k == 0 { 0 } else { 1 + 3 * k * (k - 1) };
    let nv = 1 + 3 * n * (n + 1);
    let mut vertices = Vec::with_capacity(nv);
    vertices.push([0.0, 0.0]);
    for k in 1..=n {
        let r = k as f64 / n as f64;
        for j in 0..6 * k {
            let theta = std::f64::consts::TAU * j as f64 / (6 * k) as f64;
            let (s, c) = theta.sin_cos();
            if k == n {
                // exactly on the circle up to rounding of sin/cos
                let norm = c.hypot(s);
                vertices.push([c / norm, s / norm]);
            } else {
                vertices.push([r * c, r * s]);
            }
        }
    }

    let idx = |k: usize, j: usize| {
        if k == 0 {
            0
        } else {
            ring_start(k) + j % (6 * k)
        }
    };
    let mut triangles = Vec::with_capacity(6 * n * n);
    for k in 0..n {
        for s in 0..6 {
            for i in 0..=k {
                triangles.push([
                    idx(k, s * k + i),
                    idx(k + 1, s * (k + 1) + i),
                    idx(k + 1, s * (k + 1) + i + 1),
                ]);
            }
            for i in 0..k {
                triangles.push([
                    idx(k, s * k + i),
                    idx(k + 1, s * (k + 1) + i + 1),
                    idx(k, s * k + i + 1),
                ]);
            }
        }
    }

    let boundary_edges = (0..6 * n)
        .map(|j| BoundaryEdge {
            vertices: [idx(n, j), idx(n, j + 1)],
            tag: BoundaryTag::Outer,
        })
        .collect();
    Mesh::new(vertices, triangles, boundary_edges, DomainShape::UnitDisk)
}

/// Quasiuniform triangulation of the unit disk at a refinement level.
/// Each level halves the mesh size and roughly quadruples the vertex count.
pub fn generate_disk_mesh(level: usize) -> Result<Mesh> {
    if level > MAX_DISK_LEVEL {
        return Err(Error::LevelTooLarge {
            level,
            max: MAX_DISK_LEVEL,
        });
    }
    disk_mesh_with_rings(BASE_DISK_RINGS << level)
}

/// Structured triangulation of `[x0, x1] × [y0, y1]` with cells no larger
/// than `target_h` per side. Cells in the lower half are cut along `/`, the
/// upper half along `\`, so an even number of rows gives a mesh that is
/// symmetric under reflection about the horizontal midline.
pub fn generate_rect_mesh(
    x_bounds: (f64, f64),
    y_bounds: (f64, f64),
    target_h: f64,
) -> Result<Mesh> {
    if !(target_h > 0.0) || !target_h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "target_h must be positive, got {target_h}"
        )));
    }
    let (x0, x1) = x_bounds;
    let (y0, y1) = y_bounds;
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::InvalidArgument("degenerate rectangle bounds".into()));
    }
    let cells = |len: f64| ((len / target_h) - 1e-12).ceil().max(1.0) as usize;
    let (nx, ny) = (cells(x1 - x0), cells(y1 - y0));
    let coord = |lo: f64, hi: f64, i: usize, n: usize| {
        if i == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / n as f64
        }
    };

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // mirror rows so the vertex grid is exactly symmetric
        let y = if 2 * j > ny {
            let m = coord(y0, y1, ny - j, ny);
            y0 + y1 - m
        } else {
            coord(y0, y1, j, ny)
        };
        for i in 0..=nx {
            vertices.push([coord(x0, x1, i, nx), y]);
        }
    }
    let v = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        let slash = 2 * j + 1 < ny || (ny == 1);
        for i in 0..nx {
            let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1));
            if slash {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }

    let mut edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        edges.push(BoundaryEdge {
            vertices: [v(i, 0), v(i + 1, 0)],
            tag: BoundaryTag::TopBottom,
        });
    }
    for j in 0..ny {
        edges.push(BoundaryEdge {
            vertices: [v(nx, j), v(nx, j + 1)],
            tag: BoundaryTag::LeftRight,
        });
    }
    for i in (0..nx).rev() {
        edges.push(BoundaryEdge {
            vertices: [v(i + 1, ny), v(i, ny)],
            tag: BoundaryTag::TopBottom,
        });
    }
    for j in (0..ny).rev() {
        edges.push(BoundaryEdge {
            vertices: [v(0, j + 1), v(0, j)],
            tag: BoundaryTag::LeftRight,
        });
    }
    Mesh::new(
        vertices,
        triangles,
        edges,
        DomainShape::Rectangle {
            x: x_bounds,
            y: y_bounds,
        },
    )
}

/// Red refinement: every triangle is split into four through its edge
/// midpoints. On the unit disk new boundary vertices are projected radially
/// onto the circle. Boundary tags are inherited by both halves of an edge.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let boundary: HashMap<(usize, usize), BoundaryTag> = mesh
        .boundary_edges
        .iter()
        .map(|e| (edge_key(e.vertices[0], e.vertices[1]), e.tag))
        .collect();
    let mut vertices = mesh.vertices.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
        let key = edge_key(a, b);
        *midpoints.entry(key).or_insert_with(|| {
            let (pa, pb) = (vertices[a], vertices[b]);
            let mut m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            if mesh.shape == DomainShape::UnitDisk && boundary.contains_key(&key) {
                let r = m[0].hypot(m[1]);
                m = [m[0] / r, m[1] / r];
            }
            vertices.push(m);
            vertices.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, c, &mut vertices);
        let ca = midpoint(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let mut edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let [a, b] = e.vertices;
        let m = midpoint(a, b, &mut vertices);
        edges.push(BoundaryEdge {
            vertices: [a, m],
            tag: e.tag,
        });
        edges.push(BoundaryEdge {
            vertices: [m, b],
            tag: e.tag,
        });
    }
    Mesh::new(vertices, triangles, edges, mesh.shape)
}

/// Largest deviation of a boundary vertex from the unit circle.
pub fn max_circle_deviation(mesh: &Mesh) -> f64 {
    mesh.all_boundary_vertices()
        .into_iter()
        .map(|v| (mesh.vertices[v][0].hypot(mesh.vertices[v][1]) - 1.0).abs())
        .fold(0.0, f64::max)
}

//! Incremental 3D convex hull.

use nalgebra::Vector3;
use serde::Serialize;

pub type Vec3 = Vector3<f64>;

/// Facet offsets below this (scaled by the point-cloud extent) count as
/// coplanar.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Facet {
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Signed distance from the origin to the facet plane along `normal`.
    pub offset: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexHull {
    pub points: Vec<[f64; 3]>,
    pub facets: Vec<Facet>,
}

/// Affine rank (0..=3) of a point cloud.
pub fn affine_rank(points: &[Vec3]) -> usize {
    match initial_simplex(points, tolerance(points)) {
        Simplex::Full(_) => 3,
        Simplex::Deficient(r) => r,
    }
}

fn tolerance(points: &[Vec3]) -> f64 {
    let scale = points
        .iter()
        .flat_map(|p| p.iter().map(|c| c.abs()))
        .fold(0.0, f64::max);
    EPS * scale.max(1.0)
}

enum Simplex {
    Full([usize; 4]),
    Deficient(usize),
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Simplex {
    if points.is_empty() {
        return Simplex::Deficient(0);
    }
    let argmax = |f: &dyn Fn(&Vec3) -> f64| {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, f(p)))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
    };
    // extreme point along x (ties resolved by first index) as a stable start
    let i0 = argmax(&|p| p.x).0;
    let p0 = points[i0];
    let (i1, d1) = argmax(&|p| (p - p0).norm());
    if d1 <= eps {
        return Simplex::Deficient(0);
    }
    let u = (points[i1] - p0) / d1;
    let (i2, d2) = argmax(&|p| {
        let v = p - p0;
        (v - u * u.dot(&v)).norm()
    });
    if d2 <= eps {
        return Simplex::Deficient(1);
    }
    let n = u.cross(&(points[i2] - p0)).normalize();
    let (i3, d3) = argmax(&|p| n.dot(&(p - p0)).abs());
    if d3 <= eps {
        return Simplex::Deficient(2);
    }
    Simplex::Full([i0, i1, i2, i3])
}

struct Face {
    v: [usize; 3],
    n: Vec3,
    d: f64,
}

fn make_face(points: &[Vec3], a: usize, b: usize, c: usize, inside: &Vec3) -> Face {
    let mut v = [a, b, c];
    let mut n = (points[b] - points[a]).cross(&(points[c] - points[a])).normalize();
    let mut d = n.dot(&points[a]);
    if n.dot(inside) - d > 0.0 {
        v.swap(1, 2);
        n = -n;
        d = -d;
    }
    Face { v, n, d }
}

impl ConvexHull {
    /// `None` when the points span fewer than three dimensions.
    pub fn build(input: &[Vec3]) -> Option<Self> {
        let eps = tolerance(input);
        let Simplex::Full(s) = initial_simplex(input, eps) else {
            return None;
        };
        let inside = s.iter().map(|&i| input[i]).sum::<Vec3>() / 4.0;
        let mut faces = vec![
            make_face(input, s[0], s[1], s[2], &inside),
            make_face(input, s[0], s[1], s[3], &inside),
            make_face(input, s[0], s[2], s[3], &inside),
            make_face(input, s[1], s[2], s[3], &inside),
        ];
        for (i, p) in input.iter().enumerate() {
            if s.contains(&i) {
                continue;
            }
            let visible: Vec<bool> = faces.iter().map(|f| f.n.dot(p) - f.d > eps).collect();
            if !visible.iter().any(|&v| v) {
                continue;
            }
            let mut edges = Vec::new();
            for (f, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
                for k in 0..3 {
                    edges.push((f.v[k], f.v[(k + 1) % 3]));
                }
            }
            let horizon: Vec<(usize, usize)> = edges
                .iter()
                .copied()
                .filter(|&(a, b)| !edges.contains(&(b, a)))
                .collect();
            let mut kept: Vec<Face> = faces
                .into_iter()
                .zip(visible)
                .filter(|(_, v)| !v)
                .map(|(f, _)| f)
                .collect();
            for (a, b) in horizon {
                kept.push(make_face(input, a, b, i, &inside));
            }
            faces = kept;
        }

        // Keep only the points that are facet vertices and renumber.
        let mut map = vec![usize::MAX; input.len()];
        let mut points = Vec::new();
        for f in &faces {
            for &v in &f.v {
                if map[v] == usize::MAX {
                    map[v] = points.len();
                    points.push([input[v].x, input[v].y, input[v].z]);
                }
            }
        }
        let facets = faces
            .iter()
            .map(|f| Facet {
                vertices: f.v.map(|v| map[v]),
                normal: [f.n.x, f.n.y, f.n.z],
                offset: f.d,
            })
            .collect();
        Some(Self { points, facets })
    }

    pub fn vertices(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
    }

    /// Distance from the origin to the boundary, or 0 if the origin is not
    /// strictly inside.
    pub fn origin_margin(&self) -> f64 {
        let eps = tolerance(&self.vertices());
        let min = self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
        if min > eps {
            min
        } else {
            0.0
        }
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        self.facets
            .iter()
            .all(|f| Vec3::from(f.normal).dot(p) - f.offset <= tol)
    }
}

//! Triangulation of the mesh (and its quotient surfaces) and lower-star filters.
//!
//! Every mesh point is a vertex; vertex ids are row-major indices. The square
//! is triangulated with diagonals from `(i, j)` to `(i+1, j+1)`. The closed
//! surfaces keep all `n²` vertices and add the cells that straddle the glued
//! edges, using the same neighbor maps as the heat engine: the torus and Klein
//! bottle add a wrap-around row and column of cells, the sphere adds two
//! zipper strips (top edge to left edge, bottom edge to right edge).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Coord, Topology};

pub type SimplexId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        let before = vertices.len();
        vertices.dedup();
        if vertices.len() != before || vertices.is_empty() || vertices.len() > 3 {
            return Err(Error::Input(format!(
                "simplex needs 1-3 distinct vertices, got {before}"
            )));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A 2-dimensional simplicial complex closed under faces.
///
/// Simplex ids are positions in `simplices`, sorted by `(dim, vertices)`, so
/// vertex `v` has simplex id `v`.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    topology: Option<Topology>,
    simplices: Vec<Simplex>,
    faces: Vec<Vec<SimplexId>>,
    coords: Vec<Coord>,
    counts: [usize; 3],
}

impl SimplicialComplex {
    /// Closure of the given simplices over `vertex_count` vertices.
    pub fn from_maximal(vertex_count: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        let mut all: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for v in 0..vertex_count {
            all.insert((0, vec![v]));
        }
        for s in maximal {
            let s = Simplex::new(s.clone())?;
            if let Some(&v) = s.vertices.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::Input(format!(
                    "vertex {v} outside 0..{vertex_count}"
                )));
            }
            let vs = s.vertices;
            match vs.len() {
                3 => {
                    all.insert((2, vs.clone()));
                    for skip in 0..3 {
                        let e: Vec<usize> = (0..3).filter(|&k| k != skip).map(|k| vs[k]).collect();
                        all.insert((1, e));
                    }
                }
                2 => {
                    all.insert((1, vs));
                }
                _ => {}
            }
        }
        let simplices: Vec<Simplex> = all
            .into_iter()
            .map(|(_, vertices)| Simplex { vertices })
            .collect();
        let index: HashMap<&[usize], SimplexId> = simplices
            .iter()
            .enumerate()
            .map(|(id, s)| (s.vertices.as_slice(), id))
            .collect();
        let faces = simplices
            .iter()
            .map(|s| {
                let vs = &s.vertices;
                if vs.len() == 1 {
                    return Vec::new();
                }
                let mut f: Vec<SimplexId> = (0..vs.len())
                    .map(|skip| {
                        let face: Vec<usize> = vs
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != skip)
                            .map(|(_, &v)| v)
                            .collect();
                        index[face.as_slice()]
                    })
                    .collect();
                f.sort_unstable();
                f
            })
            .collect();
        let mut counts = [0; 3];
        for s in &simplices {
            counts[s.dim()] += 1;
        }
        Ok(SimplicialComplex {
            topology: None,
            simplices,
            faces,
            coords: Vec::new(),
            counts,
        })
    }

    pub fn topology(&self) -> Option<Topology> {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, id: SimplexId) -> &Simplex {
        &self.simplices[id]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn dim_of(&self, id: SimplexId) -> usize {
        self.simplices[id].dim()
    }

    /// Ids of the codimension-1 faces, ascending.
    pub fn faces(&self, id: SimplexId) -> &[SimplexId] {
        &self.faces[id]
    }

    pub fn vertex_count(&self) -> usize {
        self.counts[0]
    }

    pub fn edge_count(&self) -> usize {
        self.counts[1]
    }

    pub fn triangle_count(&self) -> usize {
        self.counts[2]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts[0] as i64 - self.counts[1] as i64 + self.counts[2] as i64
    }

    /// Mesh coordinate of a vertex (empty for complexes not built from a mesh).
    pub fn coord(&self, vertex: usize) -> Option<Coord> {
        self.coords.get(vertex).copied()
    }

    pub fn is_face_of(&self, tau: SimplexId, sigma: SimplexId) -> bool {
        self.faces[sigma].binary_search(&tau).is_ok()
    }
}

/// Triangulates the n×n mesh under `topology`.
pub fn triangulate(n: usize, topology: Topology) -> Result<SimplicialComplex> {
    let min = if topology.is_closed() { 3 } else { 2 };
    if n < min {
        return Err(Error::Capacity(format!(
            "{topology} triangulation needs n >= {min}, got {n}"
        )));
    }
    let id = |(i, j): Coord| i * n + j;
    let mut triangles: Vec<Vec<usize>> = Vec::new();
    let mut quad = |tl: Coord, tr: Coord, bl: Coord, br: Coord| {
        triangles.push(vec![id(tl), id(tr), id(br)]);
        triangles.push(vec![id(tl), id(bl), id(br)]);
    };

    let interior = n - 1;
    for i in 0..interior {
        for j in 0..interior {
            quad((i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1));
        }
    }

    match topology {
        Topology::Square => {}
        Topology::Torus | Topology::KleinBottle => {
            // cells across the column seam: (i, n-1) -> (i, 0)
            for i in 0..interior {
                quad((i, n - 1), (i, 0), (i + 1, n - 1), (i + 1, 0));
            }
            // cells across the row seam; the Klein bottle reverses columns
            let below = |j: usize| match topology {
                Topology::Torus => (0, j),
                _ => (0, n - 1 - j),
            };
            for j in 0..n {
                let j1 = (j + 1) % n;
                quad((n - 1, j), (n - 1, j1), below(j), below(j1));
            }
        }
        Topology::Sphere => {
            // top edge (0, j) zipped to left edge (j, 0); they share (0, 0)
            triangles.push(vec![id((0, 0)), id((0, 1)), id((1, 0))]);
            for j in 1..interior {
                let (a, b, c, d) = ((0, j), (0, j + 1), (j + 1, 0), (j, 0));
                triangles.push(vec![id(a), id(b), id(c)]);
                triangles.push(vec![id(a), id(c), id(d)]);
            }
            // bottom edge (n-1, j) zipped to right edge (j, n-1); they share the corner
            let last = n - 1;
            triangles.push(vec![id((last, last)), id((last, last - 1)), id((last - 1, last))]);
            for k in 1..interior {
                let p = |k: usize| (last, last - k);
                let q = |k: usize| (last - k, last);
                let (a, b, c, d) = (p(k), p(k + 1), q(k + 1), q(k));
                triangles.push(vec![id(a), id(b), id(c)]);
                triangles.push(vec![id(a), id(c), id(d)]);
            }
        }
    }

    let mut complex = SimplicialComplex::from_maximal(n * n, &triangles)?;
    complex.topology = Some(topology);
    complex.coords = (0..n * n).map(|k| (k / n, k % n)).collect();
    Ok(complex)
}

/// A total order on the simplices of a complex together with simplex values.
#[derive(Clone, Debug)]
pub struct Filter {
    complex: Arc<SimplicialComplex>,
    order: Vec<SimplexId>,
    position: Vec<usize>,
    values: Vec<f64>,
}

impl Filter {
    /// Wraps an explicit order; it must be a face-monotone permutation.
    pub fn from_order(
        complex: Arc<SimplicialComplex>,
        order: Vec<SimplexId>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let m = complex.len();
        if order.len() != m || values.len() != m {
            return Err(Error::Dimension {
                expected: m,
                actual: order.len().min(values.len()),
            });
        }
        let mut position = vec![usize::MAX; m];
        for (p, &s) in order.iter().enumerate() {
            if s >= m || position[s] != usize::MAX {
                return Err(Error::Input(format!("order is not a permutation (at {p})")));
            }
            position[s] = p;
        }
        let filter = Filter {
            complex,
            order,
            position,
            values,
        };
        if !filter.is_face_monotone() {
            return Err(Error::Precondition("order is not face-monotone".into()));
        }
        Ok(filter)
    }

    pub fn complex(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[SimplexId] {
        &self.order
    }

    pub fn at(&self, position: usize) -> SimplexId {
        self.order[position]
    }

    pub fn position(&self, id: SimplexId) -> usize {
        self.position[id]
    }

    pub fn value(&self, id: SimplexId) -> f64 {
        self.values[id]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim_at(&self, position: usize) -> usize {
        self.complex.dim_of(self.order[position])
    }

    pub fn is_face_monotone(&self) -> bool {
        (0..self.order.len()).all(|p| {
            let s = self.order[p];
            self.complex.faces(s).iter().all(|&f| self.position[f] < p)
        })
    }

    pub fn is_value_monotone(&self) -> bool {
        self.order
            .windows(2)
            .all(|w| self.values[w[0]] <= self.values[w[1]])
    }

    /// Exchanges the simplices at `i` and `i + 1`; values are left untouched.
    pub(crate) fn swap_adjacent(&mut self, i: usize) {
        self.order.swap(i, i + 1);
        self.position[self.order[i]] = i;
        self.position[self.order[i + 1]] = i + 1;
    }

    pub(crate) fn set_values(&mut self, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.values.len());
        self.values = values;
    }
}

/// Lower-star simplex values: each simplex takes the maximum of its vertex values.
pub fn simplex_values(complex: &SimplicialComplex, vertex_values: &[f64]) -> Result<Vec<f64>> {
    if vertex_values.len() != complex.vertex_count() {
        return Err(Error::Input(format!(
            "{} vertex values for {} vertices",
            vertex_values.len(),
            complex.vertex_count()
        )));
    }
    Ok(complex
        .simplices()
        .iter()
        .map(|s| {
            s.vertices()
                .iter()
                .map(|&v| vertex_values[v])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Sorts all simplices by `(value, dim, vertex ids)`.
pub fn build_filter(complex: &Arc<SimplicialComplex>, vertex_values: &[f64]) -> Result<Filter> {
    if let Some(k) = vertex_values.iter().position(|v| v.is_nan()) {
        return Err(Error::Input(format!("vertex {k} has a NaN value")));
    }
    let values = simplex_values(complex, vertex_values)?;
    let mut order: Vec<SimplexId> = (0..complex.len()).collect();
    // ids are already sorted by (dim, vertices), so they serve as the tie-break
    order.sort_unstable_by(|&a, &b| match values[a].total_cmp(&values[b]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    let mut position = vec![0; order.len()];
    for (p, &s) in order.iter().enumerate() {
        position[s] = p;
    }
    Ok(Filter {
        complex: Arc::clone(complex),
        order,
        position,
        values,
    })
}

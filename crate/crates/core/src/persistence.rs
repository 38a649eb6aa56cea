//! Z₂ boundary-matrix reduction, persistence pairings and diagrams.

use crate::complex::Filter;

/// Sparse Z₂ column: ascending row indices.
pub type Column = Vec<usize>;

/// Symmetric difference of two ascending index lists.
pub(crate) fn add_into(target: &mut Column, source: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() && b < source.len() {
        match target[a].cmp(&source[b]) {
            std::cmp::Ordering::Less => {
                out.push(target[a]);
                a += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(source[b]);
                b += 1;
            }
            std::cmp::Ordering::Equal => {
                a += 1;
                b += 1;
            }
        }
    }
    out.extend_from_slice(&target[a..]);
    out.extend_from_slice(&source[b..]);
    *target = out;
}

/// Boundary operator in filter coordinates: column `k` holds the positions of
/// the faces of the `k`-th simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    columns: Vec<Column>,
}

impl BoundaryMatrix {
    pub fn new(filter: &Filter) -> Self {
        let complex = filter.complex();
        let columns = filter
            .order()
            .iter()
            .map(|&s| {
                let mut col: Column = complex
                    .faces(s)
                    .iter()
                    .map(|&f| filter.position(f))
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        BoundaryMatrix { columns }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

pub fn boundary_matrix(filter: &Filter) -> BoundaryMatrix {
    BoundaryMatrix::new(filter)
}

/// Result of reducing `D` to `R = D·V` with `V` upper triangular.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub r: Vec<Column>,
    pub v: Vec<Column>,
}

impl Reduction {
    pub fn low(&self, k: usize) -> Option<usize> {
        self.r[k].last().copied()
    }

    pub fn pairing(&self) -> PersistencePairing {
        pairing_from_lows(self.r.iter().map(|c| c.last().copied()))
    }
}

/// Left-to-right column reduction, recording the column operations in `V`.
pub fn reduce_with_basis(matrix: &BoundaryMatrix) -> Reduction {
    let m = matrix.len();
    let mut r = matrix.columns.clone();
    let mut v: Vec<Column> = (0..m).map(|k| vec![k]).collect();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for k in 0..m {
        while let Some(&low) = r[k].last() {
            match owner[low] {
                Some(j) => {
                    let (rj, vj) = (r[j].clone(), v[j].clone());
                    add_into(&mut r[k], &rj);
                    add_into(&mut v[k], &vj);
                }
                None => {
                    owner[low] = Some(k);
                    break;
                }
            }
        }
    }
    Reduction { r, v }
}

pub fn reduce(matrix: &BoundaryMatrix) -> PersistencePairing {
    let m = matrix.len();
    let mut r = matrix.columns.clone();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for k in 0..m {
        while let Some(&low) = r[k].last() {
            match owner[low] {
                Some(j) => {
                    let rj = r[j].clone();
                    add_into(&mut r[k], &rj);
                }
                None => {
                    owner[low] = Some(k);
                    break;
                }
            }
        }
    }
    pairing_from_lows(r.iter().map(|c| c.last().copied()))
}

fn pairing_from_lows(lows: impl Iterator<Item = Option<usize>>) -> PersistencePairing {
    let lows: Vec<Option<usize>> = lows.collect();
    let mut killed = vec![false; lows.len()];
    let mut pairs = Vec::new();
    for (k, low) in lows.iter().enumerate() {
        if let Some(b) = *low {
            killed[b] = true;
            pairs.push((b, k));
        }
    }
    pairs.sort_unstable();
    let essential = (0..lows.len())
        .filter(|&k| lows[k].is_none() && !killed[k])
        .collect();
    PersistencePairing { pairs, essential }
}

/// Filter positions paired by the persistence algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistencePairing {
    /// `(birth, death)` positions, sorted by birth.
    pub pairs: Vec<(usize, usize)>,
    /// Positions of births that are never killed, ascending.
    pub essential: Vec<usize>,
}

impl PersistencePairing {
    /// Number of essential classes in each dimension 0, 1, 2.
    pub fn essential_counts(&self, filter: &Filter) -> [usize; 3] {
        let mut counts = [0; 3];
        for &p in &self.essential {
            counts[filter.dim_at(p)] += 1;
        }
        counts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    /// Finite points `(birth, death)` with `birth < death`.
    pub points: Vec<(f64, f64)>,
    pub essential_births: Vec<f64>,
}

impl PersistenceDiagram {
    pub fn empty(dim: usize) -> Self {
        PersistenceDiagram {
            dim,
            points: Vec::new(),
            essential_births: Vec::new(),
        }
    }

    /// Sorts points and essential births so diagrams compare as multisets.
    pub fn normalized(mut self) -> Self {
        self.points
            .sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        self.essential_births.sort_by(f64::total_cmp);
        self
    }
}

pub fn diagram(pairing: &PersistencePairing, filter: &Filter, p: usize) -> PersistenceDiagram {
    let value = |pos: usize| filter.value(filter.at(pos));
    let points = pairing
        .pairs
        .iter()
        .filter(|&&(b, _)| filter.dim_at(b) == p)
        .map(|&(b, d)| (value(b), value(d)))
        .filter(|&(b, d)| b < d)
        .collect();
    let essential_births = pairing
        .essential
        .iter()
        .filter(|&&b| filter.dim_at(b) == p)
        .map(|&b| value(b))
        .collect();
    PersistenceDiagram {
        dim: p,
        points,
        essential_births,
    }
    .normalized()
}

/// Convenience: full reduction of a filter into its diagram of dimension `p`.
pub fn filter_diagram(filter: &Filter, p: usize) -> PersistenceDiagram {
    diagram(&reduce(&boundary_matrix(filter)), filter, p)
}

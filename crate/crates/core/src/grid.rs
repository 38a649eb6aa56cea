//! The n×n mesh, its four boundary gluings and the 4-neighborhoods they induce.
//!
//! Coordinates are `(row, col)`, 0-based and row-major. Every mesh point has
//! exactly four neighbor slots (up, down, left, right). On the square a
//! missing neighbor is replaced by the point itself, which keeps the
//! averaging operator heat conserving. The closed surfaces glue the boundary:
//!
//! * torus: rows and columns wrap modulo `n`;
//! * Klein bottle: columns wrap, rows wrap with the column index reversed;
//! * sphere: the top edge is glued to the left edge and the bottom edge to the
//!   right edge (`(0, j) ~ (j, 0)`, `(n-1, j) ~ (j, n-1)`).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Coord = (usize, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topology {
    Square,
    Torus,
    KleinBottle,
    Sphere,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Square,
        Topology::Torus,
        Topology::KleinBottle,
        Topology::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Square => "square",
            Topology::Torus => "torus",
            Topology::KleinBottle => "klein",
            Topology::Sphere => "sphere",
        }
    }

    pub fn is_closed(self) -> bool {
        self != Topology::Square
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(Topology::Square),
            "torus" => Ok(Topology::Torus),
            "klein" | "klein-bottle" | "kleinbottle" => Ok(Topology::KleinBottle),
            "sphere" => Ok(Topology::Sphere),
            other => Err(Error::Input(format!("unknown topology '{other}'"))),
        }
    }
}

/// Scalar samples on an n×n mesh, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("mesh side must be >= 2, got {n}")));
        }
        if values.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                actual: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite value at ({}, {})",
                k / n,
                k % n
            )));
        }
        Ok(GridField { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: bad.len(),
            });
        }
        GridField::new(n, rows.concat())
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        GridField::new(n, vec![c; n * n])
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let values = (0..n * n).map(|k| f(k / n, k % n)).collect();
        GridField::new(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n)
    }

    /// Row-major sequential sum.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Builds a field of the same size; the caller guarantees finiteness.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> GridField {
        debug_assert_eq!(values.len(), self.values.len());
        GridField { n: self.n, values }
    }
}

/// Four neighbor slots of a mesh point: up, down, left, right.
pub type NeighborList = [Coord; 4];

/// Neighbor slots of `(i, j)` under `topology`.
pub fn neighborhood(topology: Topology, i: usize, j: usize, n: usize) -> Result<NeighborList> {
    if n < 2 {
        return Err(Error::Precondition(format!("mesh side must be >= 2, got {n}")));
    }
    if i >= n || j >= n {
        return Err(Error::Precondition(format!(
            "coordinate ({i}, {j}) outside {n}x{n} mesh"
        )));
    }
    Ok([
        up(topology, i, j, n),
        down(topology, i, j, n),
        left(topology, i, j, n),
        right(topology, i, j, n),
    ])
}

fn up(topology: Topology, i: usize, j: usize, n: usize) -> Coord {
    if i > 0 {
        return (i - 1, j);
    }
    match topology {
        Topology::Square => (i, j),
        Topology::Torus => (n - 1, j),
        Topology::KleinBottle => (n - 1, n - 1 - j),
        Topology::Sphere => (j, 0),
    }
}

fn down(topology: Topology, i: usize, j: usize, n: usize) -> Coord {
    if i + 1 < n {
        return (i + 1, j);
    }
    match topology {
        Topology::Square => (i, j),
        Topology::Torus => (0, j),
        Topology::KleinBottle => (0, n - 1 - j),
        Topology::Sphere => (j, n - 1),
    }
}

fn left(topology: Topology, i: usize, j: usize, n: usize) -> Coord {
    if j > 0 {
        return (i, j - 1);
    }
    match topology {
        Topology::Square => (i, j),
        Topology::Torus | Topology::KleinBottle => (i, n - 1),
        Topology::Sphere => (0, i),
    }
}

fn right(topology: Topology, i: usize, j: usize, n: usize) -> Coord {
    if j + 1 < n {
        return (i, j + 1);
    }
    match topology {
        Topology::Square => (i, j),
        Topology::Torus | Topology::KleinBottle => (i, 0),
        Topology::Sphere => (n - 1, i),
    }
}

/// Full neighbor table, indexed by row-major point index.
pub(crate) fn neighbor_table(topology: Topology, n: usize) -> Vec<[usize; 4]> {
    (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            [
                up(topology, i, j, n),
                down(topology, i, j, n),
                left(topology, i, j, n),
                right(topology, i, j, n),
            ]
            .map(|(a, b)| a * n + b)
        })
        .collect()
}

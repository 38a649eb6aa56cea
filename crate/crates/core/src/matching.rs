//! Bottleneck and Wasserstein distances between persistence diagrams.
//!
//! Both diagrams are augmented with the diagonal projections of the other
//! side's points, giving an `(n + m) × (n + m)` assignment problem in which a
//! point may only go to its own projection and projections match each other
//! for free.

use crate::persistence::PersistenceDiagram;
use crate::vineyard::{Vine, Vineyard};

pub type Point = (f64, f64);

/// L∞ distance between two points.
pub fn linf_cost(a: Point, b: Point) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// L∞ distance from a point to the diagonal `y = x`.
pub fn diagonal_cost(a: Point) -> f64 {
    (a.1 - a.0).abs() / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Criterion {
    Bottleneck,
    Wasserstein(f64),
}

/// One edge of a matching; `None` on a side means the diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchEdge {
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagramMatching {
    /// Edges involving at least one off-diagonal point; diagonal–diagonal
    /// edges cost nothing and are omitted.
    pub edges: Vec<MatchEdge>,
    pub cost: f64,
    pub criterion: Criterion,
    /// Essential classes are not matched; their counts are reported instead.
    pub essential_counts: (usize, usize),
}

struct Augmented {
    n: usize,
    m: usize,
    /// `None` marks a forbidden slot.
    cost: Vec<Vec<Option<f64>>>,
}

impl Augmented {
    fn new(a: &[Point], b: &[Point]) -> Self {
        let (n, m) = (a.len(), b.len());
        let size = n + m;
        let mut cost = vec![vec![None; size]; size];
        for i in 0..n {
            for j in 0..m {
                cost[i][j] = Some(linf_cost(a[i], b[j]));
            }
            cost[i][m + i] = Some(diagonal_cost(a[i]));
        }
        for j in 0..m {
            cost[n + j][j] = Some(diagonal_cost(b[j]));
            for i in 0..n {
                cost[n + j][m + i] = Some(0.0);
            }
        }
        Augmented { n, m, cost }
    }

    fn size(&self) -> usize {
        self.n + self.m
    }

    fn edges(&self, assignment: &[usize]) -> Vec<MatchEdge> {
        assignment
            .iter()
            .enumerate()
            .filter_map(|(row, &col)| {
                let a = (row < self.n).then_some(row);
                let b = (col < self.m).then_some(col);
                (a.is_some() || b.is_some()).then(|| MatchEdge {
                    a,
                    b,
                    cost: self.cost[row][col].expect("assignment uses allowed slots"),
                })
            })
            .collect()
    }
}

fn finite_points(d: &PersistenceDiagram) -> Vec<Point> {
    d.points.iter().copied().filter(|p| p.1.is_finite()).collect()
}

/// Perfect matching in the threshold graph, if one exists (Hopcroft–Karp).
fn perfect_matching(adj: &[Vec<usize>], size: usize) -> Option<Vec<usize>> {
    const FREE: usize = usize::MAX;
    let mut match_row = vec![FREE; size];
    let mut match_col = vec![FREE; size];
    let mut dist = vec![0usize; size];
    loop {
        // layered BFS from free rows
        let mut queue = std::collections::VecDeque::new();
        for r in 0..size {
            if match_row[r] == FREE {
                dist[r] = 0;
                queue.push_back(r);
            } else {
                dist[r] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(r) = queue.pop_front() {
            for &c in &adj[r] {
                let r2 = match_col[c];
                if r2 == FREE {
                    found = true;
                } else if dist[r2] == usize::MAX {
                    dist[r2] = dist[r] + 1;
                    queue.push_back(r2);
                }
            }
        }
        if !found {
            break;
        }
        fn augment(
            r: usize,
            adj: &[Vec<usize>],
            match_row: &mut [usize],
            match_col: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &c in &adj[r] {
                let r2 = match_col[c];
                let ok = r2 == usize::MAX
                    || (dist[r2] == dist[r] + 1 && augment(r2, adj, match_row, match_col, dist));
                if ok {
                    match_row[r] = c;
                    match_col[c] = r;
                    return true;
                }
            }
            dist[r] = usize::MAX;
            false
        }
        for r in 0..size {
            if match_row[r] == FREE {
                augment(r, adj, &mut match_row, &mut match_col, &mut dist);
            }
        }
    }
    match_row.iter().all(|&c| c != FREE).then_some(match_row)
}

/// Bottleneck (W∞) distance with an optimal matching.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram) -> DiagramMatching {
    let (pa, pb) = (finite_points(a), finite_points(b));
    let aug = Augmented::new(&pa, &pb);
    let size = aug.size();
    let essential_counts = (a.essential_births.len(), b.essential_births.len());
    if size == 0 {
        return DiagramMatching {
            edges: Vec::new(),
            cost: 0.0,
            criterion: Criterion::Bottleneck,
            essential_counts,
        };
    }
    let mut candidates: Vec<f64> = aug.cost.iter().flatten().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let graph = |t: f64| -> Vec<Vec<usize>> {
        aug.cost
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, c)| matches!(c, Some(c) if *c <= t))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    };
    // the largest candidate always admits the all-diagonal matching
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&graph(candidates[mid]), size).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let assignment = perfect_matching(&graph(candidates[lo]), size).expect("feasible threshold");
    DiagramMatching {
        edges: aug.edges(&assignment),
        cost: candidates[lo],
        criterion: Criterion::Bottleneck,
        essential_counts,
    }
}

/// Minimum-cost assignment (Hungarian method with potentials); returns the
/// column assigned to every row.
fn hungarian(cost: &[Vec<Option<f64>>]) -> Vec<usize> {
    let size = cost.len();
    let big = cost
        .iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |acc, &c| acc + c.abs())
        * 4.0
        + 1.0;
    let c = |i: usize, j: usize| cost[i][j].unwrap_or(big);
    // 1-based arrays with a virtual row/column 0
    let mut u = vec![0.0; size + 1];
    let mut v = vec![0.0; size + 1];
    let mut owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    for i in 1..=size {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=size {
                if !used[j] {
                    let cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; size];
    for j in 1..=size {
        assignment[owner[j] - 1] = j - 1;
    }
    assignment
}

/// Sum of `cost^q` over edges, added in ascending order.
fn power_sum(edges: &[MatchEdge], q: f64) -> f64 {
    let mut terms: Vec<f64> = edges.iter().map(|e| e.cost.powf(q)).collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().fold(0.0, |acc, t| acc + t)
}

/// Degree-`q` Wasserstein distance `(Σ cost^q)^(1/q)` with an optimal matching.
pub fn wasserstein(a: &PersistenceDiagram, b: &PersistenceDiagram, q: f64) -> DiagramMatching {
    assert!(q >= 1.0 && q.is_finite(), "Wasserstein degree must be finite and >= 1");
    let (pa, pb) = (finite_points(a), finite_points(b));
    let mut aug = Augmented::new(&pa, &pb);
    let raw = aug.cost.clone();
    for row in aug.cost.iter_mut() {
        for c in row.iter_mut().flatten() {
            *c = c.powf(q);
        }
    }
    let assignment = hungarian(&aug.cost);
    aug.cost = raw;
    let edges = aug.edges(&assignment);
    let cost = power_sum(&edges, q).powf(1.0 / q);
    DiagramMatching {
        edges,
        cost,
        criterion: Criterion::Wasserstein(q),
        essential_counts: (a.essential_births.len(), b.essential_births.len()),
    }
}

/// Total L∞ path length of one vine; essential vines move along their birth only.
pub fn vine_length(vine: &Vine) -> f64 {
    vine.samples
        .windows(2)
        .map(|w| {
            let (_, b0, d0) = w[0];
            let (_, b1, d1) = w[1];
            if d0.is_infinite() || d1.is_infinite() {
                (b1 - b0).abs()
            } else {
                linf_cost((b0, d0), (b1, d1))
            }
        })
        .fold(0.0, |acc, x| acc + x)
}

/// Discrete vine distance: the summed path length of every vine.
pub fn vine_distance(vineyard: &Vineyard) -> f64 {
    vines_distance(&vineyard.vines)
}

pub fn vines_distance(vines: &[Vine]) -> f64 {
    vines.iter().map(vine_length).fold(0.0, |acc, x| acc + x)
}

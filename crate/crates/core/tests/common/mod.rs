#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vineyard_lab::complex::{build_filter, triangulate, Filter, SimplicialComplex};
use vineyard_lab::grid::{GridField, Topology};
use vineyard_lab::heat::{center_difference, homotopy_field, run_heat, HeatConfig, HomotopyMode};
use vineyard_lab::persistence::{
    boundary_matrix, filter_diagram, reduce, PersistenceDiagram, PersistencePairing,
};
use vineyard_lab::vineyard::{EndKind, StepCounts, SwapEvent, SwapKind, Vine, VineyardState};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_int_field(n: usize, lo: i32, hi: i32, rng: &mut ChaCha8Rng) -> GridField {
    let values = (0..n * n).map(|_| rng.gen_range(lo..=hi) as f64).collect();
    GridField::new(n, values).unwrap()
}

pub fn grid_filter(n: usize, t: Topology, values: &[f64]) -> Filter {
    let c = Arc::new(triangulate(n, t).unwrap());
    build_filter(&c, values).unwrap()
}

/// Dimension-0 diagram by a union-find sweep in filter order (elder rule).
pub fn union_find_dgm0(filter: &Filter) -> PersistenceDiagram {
    let complex = filter.complex();
    let n = complex.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    // birth position of the oldest vertex of each root
    let mut birth = vec![usize::MAX; n];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut points = Vec::new();
    for (pos, &s) in filter.order().iter().enumerate() {
        let vs = complex.simplex(s).vertices();
        match vs.len() {
            1 => birth[vs[0]] = pos,
            2 => {
                let (ra, rb) = (find(&mut parent, vs[0]), find(&mut parent, vs[1]));
                if ra == rb {
                    continue;
                }
                let (old, young) = if birth[ra] < birth[rb] { (ra, rb) } else { (rb, ra) };
                let b = filter.value(filter.at(birth[young]));
                let d = filter.value(s);
                if b < d {
                    points.push((b, d));
                }
                parent[young] = old;
            }
            _ => {}
        }
    }
    let essential_births = (0..n)
        .filter(|&v| find(&mut parent, v) == v)
        .map(|v| filter.value(filter.at(birth[v])))
        .collect();
    PersistenceDiagram {
        dim: 0,
        points,
        essential_births,
    }
    .normalized()
}

/// Optimal cost over every perfect matching of the diagonal-augmented sets:
/// each `a` point goes to a distinct `b` point or the diagonal, and every
/// leftover `b` point goes to the diagonal. `q = None` is the bottleneck.
pub fn brute_force_cost(a: &[(f64, f64)], b: &[(f64, f64)], q: Option<f64>) -> f64 {
    fn linf(x: (f64, f64), y: (f64, f64)) -> f64 {
        (x.0 - y.0).abs().max((x.1 - y.1).abs())
    }
    fn diag(x: (f64, f64)) -> f64 {
        (x.1 - x.0) / 2.0
    }
    fn go(
        i: usize,
        a: &[(f64, f64)],
        b: &[(f64, f64)],
        used: &mut Vec<bool>,
        costs: &mut Vec<f64>,
        best: &mut f64,
        q: Option<f64>,
    ) {
        if i == a.len() {
            let mut all = costs.clone();
            for (j, &p) in b.iter().enumerate() {
                if !used[j] {
                    all.push(diag(p));
                }
            }
            let value = match q {
                None => all.iter().copied().fold(0.0, f64::max),
                Some(q) => all.iter().map(|c| c.powf(q)).sum::<f64>(),
            };
            if value < *best {
                *best = value;
            }
            return;
        }
        costs.push(diag(a[i]));
        go(i + 1, a, b, used, costs, best, q);
        costs.pop();
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                costs.push(linf(a[i], b[j]));
                go(i + 1, a, b, used, costs, best, q);
                costs.pop();
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], &mut Vec::new(), &mut best, q);
    match q {
        None => best,
        Some(q) => best.powf(1.0 / q),
    }
}

/// Random diagram with half-integer coordinates (so all costs are exact).
pub fn random_diagram(rng: &mut ChaCha8Rng, max_points: usize) -> PersistenceDiagram {
    let k = rng.gen_range(0..=max_points);
    let points = (0..k)
        .map(|_| {
            let b = rng.gen_range(0..20) as f64 / 2.0;
            let d = b + rng.gen_range(1..12) as f64 / 2.0;
            (b, d)
        })
        .collect();
    PersistenceDiagram {
        dim: 0,
        points,
        essential_births: Vec::new(),
    }
}

/// Small complexes (at most 12 simplices) used for exhaustive swap checks.
pub fn small_complexes() -> Vec<Arc<SimplicialComplex>> {
    let specs: Vec<(usize, Vec<Vec<usize>>)> = vec![
        (3, vec![vec![0, 1], vec![1, 2]]),
        (3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
        (3, vec![vec![0, 1, 2]]),
        (4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]),
        (4, vec![vec![0, 1], vec![0, 2], vec![0, 3]]),
        (5, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]),
        (4, vec![vec![0, 1, 2], vec![2, 3]]),
        (4, vec![vec![0, 1, 2], vec![1, 3], vec![2, 3]]),
        (4, vec![vec![0, 1, 2], vec![1, 2, 3]]),
        (5, vec![vec![0, 1, 2], vec![3, 4]]),
        (4, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![2, 3], vec![0, 3]]),
    ];
    specs
        .into_iter()
        .map(|(n, s)| {
            let c = SimplicialComplex::from_maximal(n, &s).unwrap();
            assert!(c.len() <= 12);
            Arc::new(c)
        })
        .collect()
}

/// A uniformly random face-monotone order of the complex.
pub fn random_linear_extension(complex: &Arc<SimplicialComplex>, rng: &mut ChaCha8Rng) -> Filter {
    let m = complex.len();
    let mut placed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    while order.len() < m {
        let ready: Vec<usize> = (0..m)
            .filter(|&s| !placed[s] && complex.faces(s).iter().all(|&f| placed[f]))
            .collect();
        let &s = ready.choose(rng).unwrap();
        placed[s] = true;
        order.push(s);
    }
    let values = (0..m).map(|s| order.iter().position(|&x| x == s).unwrap() as f64).collect();
    Filter::from_order(Arc::clone(complex), order, values).unwrap()
}

/// The filter with positions `i` and `i + 1` exchanged.
pub fn swapped(filter: &Filter, i: usize) -> Filter {
    let mut order = filter.order().to_vec();
    order.swap(i, i + 1);
    Filter::from_order(Arc::clone(filter.complex()), order, filter.values().to_vec()).unwrap()
}

/// Number of pairs `(x, y)` ordered differently by the two filters.
pub fn inversion_count(old: &Filter, new: &Filter) -> usize {
    let perm: Vec<usize> = old.order().iter().map(|&s| new.position(s)).collect();
    let mut count = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                count += 1;
            }
        }
    }
    count
}

/// Pairs as `(birth simplex, death simplex)` with `None` for essential classes.
pub fn pairs_by_id(pairing: &PersistencePairing, filter: &Filter) -> Vec<(usize, Option<usize>)> {
    let mut out: Vec<(usize, Option<usize>)> = pairing
        .pairs
        .iter()
        .map(|&(b, d)| (filter.at(b), Some(filter.at(d))))
        .chain(pairing.essential.iter().map(|&b| (filter.at(b), None)))
        .collect();
    out.sort();
    out
}

fn role(pairs: &[(usize, Option<usize>)], s: usize) -> (bool, Option<usize>) {
    for &(b, d) in pairs {
        if b == s {
            return (true, d);
        }
        if d == Some(s) {
            return (false, Some(b));
        }
    }
    panic!("simplex {s} is unpaired");
}

/// Expected kind of swapping positions `i` and `i + 1`, derived only from the
/// two fresh pairings and the nesting of the pairs involved.
pub fn expected_swap_kind(filter: &Filter, i: usize) -> Result<SwapKind, String> {
    let after_filter = swapped(filter, i);
    let before = pairs_by_id(&reduce(&boundary_matrix(filter)), filter);
    let after = pairs_by_id(&reduce(&boundary_matrix(&after_filter)), &after_filter);
    let (a, b) = (filter.at(i), filter.at(i + 1));
    let touching = |ps: &[(usize, Option<usize>)]| -> Vec<(usize, Option<usize>)> {
        ps.iter()
            .copied()
            .filter(|&(x, y)| x == a || x == b || y == Some(a) || y == Some(b))
            .collect()
    };
    let (tb, ta) = (touching(&before), touching(&after));
    if tb == ta {
        return Ok(SwapKind::NoSwap);
    }
    let pos = |s: Option<usize>| s.map_or(usize::MAX, |s| filter.position(s));
    let has = |ps: &[(usize, Option<usize>)], p: (usize, Option<usize>)| ps.contains(&p);
    let (ra, rb) = (role(&before, a), role(&before, b));
    match (ra, rb) {
        ((true, da), (true, db)) => {
            if !(pos(Some(a)) < pos(Some(b)) && pos(Some(b)) < pos(db) && pos(db) < pos(da)) {
                return Err(format!("births {a},{b} changed without nesting"));
            }
            if !(has(&after, (b, da)) && has(&after, (a, db))) {
                return Err("births exchanged the wrong deaths".into());
            }
            Ok(SwapKind::Type1)
        }
        ((false, xa), (false, xb)) => {
            if !(pos(xb) < pos(xa)) {
                return Err(format!("deaths {a},{b} changed without nesting"));
            }
            let (xa, xb) = (xa.unwrap(), xb.unwrap());
            if !(has(&after, (xa, Some(b))) && has(&after, (xb, Some(a)))) {
                return Err("deaths exchanged the wrong births".into());
            }
            Ok(SwapKind::Type2)
        }
        ((false, xa), (true, db)) => {
            if !(pos(xa) < pos(Some(a)) && pos(Some(b)) < pos(db)) {
                return Err("death/birth changed but pairs are nested".into());
            }
            let xa = xa.unwrap();
            if !(has(&after, (xa, Some(b))) && has(&after, (a, db))) {
                return Err("death/birth swap produced unexpected pairs".into());
            }
            Ok(SwapKind::Type3)
        }
        _ => Err(format!("birth {a} followed by death {b} changed the pairing")),
    }
}

/// Checks one transposition of `state` at `i` against fresh reductions.
pub fn check_transposition(state: &mut VineyardState, i: usize) -> Result<SwapEvent, String> {
    let expected = expected_swap_kind(state.filter(), i)?;
    let event = state.transpose_adjacent(i).map_err(|e| e.to_string())?;
    let fresh = reduce(&boundary_matrix(state.filter()));
    if state.pairing() != fresh {
        return Err(format!("pairing after swap at {i} differs from fresh reduction"));
    }
    if event.kind != expected {
        return Err(format!("swap at {i} classified {:?}, nesting says {expected:?}", event.kind));
    }
    Ok(event)
}

/// Every face-monotone order of a complex, up to `cap` of them.
pub fn linear_extensions(complex: &Arc<SimplicialComplex>, cap: usize) -> Vec<Filter> {
    fn go(
        c: &SimplicialComplex,
        placed: &mut Vec<bool>,
        order: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if order.len() == c.len() {
            out.push(order.clone());
            return;
        }
        for s in 0..c.len() {
            if !placed[s] && c.faces(s).iter().all(|&f| placed[f]) {
                placed[s] = true;
                order.push(s);
                go(c, placed, order, out, cap);
                order.pop();
                placed[s] = false;
            }
        }
    }
    let mut orders = Vec::new();
    go(complex, &mut vec![false; complex.len()], &mut Vec::new(), &mut orders, cap);
    orders
        .into_iter()
        .map(|o| Filter::from_order(Arc::clone(complex), o, vec![0.0; complex.len()]).unwrap())
        .collect()
}

/// The generated transposition suite: exhaustive orders for the smallest
/// complexes, random ones for the rest.
pub fn transposition_suite(seed: u64) -> Vec<Filter> {
    let mut r = rng(seed);
    let mut suite = Vec::new();
    for c in small_complexes() {
        suite.extend(linear_extensions(&c, 400));
        for _ in 0..100 {
            suite.push(random_linear_extension(&c, &mut r));
        }
    }
    suite
}

/// Positions whose swap keeps the order face-monotone.
pub fn valid_swaps(filter: &Filter) -> Vec<usize> {
    let c = filter.complex();
    (0..filter.len().saturating_sub(1))
        .filter(|&i| !c.is_face_of(filter.at(i), filter.at(i + 1)))
        .collect()
}

/// Outcome of running the step oracle on one random instance.
pub struct StepOracleReport {
    pub steps: usize,
    pub counts: Vec<StepCounts>,
    pub inversions: Vec<usize>,
    pub events: Vec<Vec<SwapEvent>>,
}

/// Random integer fields `f`, `g` on an n×n mesh, heat flow, and a vineyard
/// advanced step by step; after every step the maintained diagrams must equal
/// a fresh reduction of that step's filter.
pub fn step_oracle(n: usize, topology: Topology, seed: u64, max_steps: usize) -> Result<StepOracleReport, String> {
    let mut r = rng(seed);
    let f = random_int_field(n, 0, 9, &mut r);
    let g = random_int_field(n, 0, 9, &mut r);
    let mode = if seed.is_multiple_of(2) { HomotopyMode::DifferenceOnly } else { HomotopyMode::AddF };
    let (u0, _) = center_difference(&f, &g).unwrap();
    let run = run_heat(&u0, &HeatConfig::new(1e-9, max_steps, topology).unwrap()).unwrap();
    let complex = Arc::new(triangulate(n, topology).unwrap());
    let field0 = homotopy_field(&f, &run, 0, mode).unwrap();
    let mut state = VineyardState::new(build_filter(&complex, field0.values()).unwrap());
    let mut report = StepOracleReport {
        steps: run.final_step(),
        counts: Vec::new(),
        inversions: Vec::new(),
        events: Vec::new(),
    };
    for k in 1..=run.final_step() {
        let field = homotopy_field(&f, &run, k, mode).unwrap();
        let target = build_filter(&complex, field.values()).unwrap();
        report.inversions.push(inversion_count(state.filter(), &target));
        let (events, _) = state.advance_step(field.values()).map_err(|e| e.to_string())?;
        let mut counts = StepCounts::default();
        events.iter().for_each(|e| counts.record(e));
        report.counts.push(counts);
        report.events.push(events);
        if state.filter().order() != target.order() {
            return Err(format!("step {k}: filter order differs from target"));
        }
        for p in 0..=2 {
            if state.diagram(p) != filter_diagram(&target, p) {
                return Err(format!("{topology:?} seed {seed} step {k}: dim {p} diagram differs"));
            }
        }
    }
    Ok(report)
}

/// Hand-built vineyards with their distances summed by hand.
pub fn dfg_fixtures() -> Vec<(Vec<Vine>, f64)> {
    let vine = |dim, samples: Vec<(usize, f64, f64)>, start, end| Vine {
        dim,
        samples,
        start_kind: start,
        end_kind: end,
    };
    use EndKind::*;
    vec![
        // a single vine shrinking toward the diagonal: 1 + 0.5
        (
            vec![vine(0, vec![(0, 0.0, 4.0), (1, 1.0, 3.0), (2, 1.5, 2.5)], DiagramPoint, DiagramPoint)],
            1.5,
        ),
        // a vine born from the diagonal and dying into it, plus a still one:
        // (2,2)->(1,3)->(1,4)->(3,3): 1 + 1 + 2; the still vine adds 0
        (
            vec![
                vine(1, vec![(0, 2.0, 2.0), (1, 1.0, 3.0), (2, 1.0, 4.0), (3, 3.0, 3.0)], Diagonal, Diagonal),
                vine(0, vec![(0, 0.0, 5.0), (1, 0.0, 5.0), (2, 0.0, 5.0), (3, 0.0, 5.0)], DiagramPoint, DiagramPoint),
            ],
            4.0,
        ),
        // an essential vine moves by its birth only: 0.25 + 0.75; the
        // finite vine: max(0.5, 0.25) + max(0, 1)
        (
            vec![
                vine(
                    0,
                    vec![(0, -1.0, f64::INFINITY), (1, -0.75, f64::INFINITY), (2, -1.5, f64::INFINITY)],
                    EssentialTracked,
                    EssentialTracked,
                ),
                vine(1, vec![(0, 2.0, 6.0), (1, 2.5, 6.25), (2, 2.5, 5.25)], DiagramPoint, DiagramPoint),
            ],
            2.5,
        ),
    ]
}

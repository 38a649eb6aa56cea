//! Vineyards: persistence pairings maintained through adjacent transpositions.
//!
//! The state keeps a reduced decomposition `R = D·V` with columns indexed by
//! simplex id (rows are simplex ids too, so exchanging two rows is free; only
//! the position order used for "lowest entry" changes).

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use crate::complex::{build_filter, triangulate, Filter, SimplexId, SimplicialComplex};
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::heat::{homotopy_field, HeatRun, HomotopyMode};
use crate::persistence::{
    add_into, boundary_matrix, reduce_with_basis, Column, PersistenceDiagram, PersistencePairing,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwapKind {
    NoSwap,
    /// Births of two nested pairs exchanged.
    Type1,
    /// Deaths of two nested pairs exchanged.
    Type2,
    /// The death of one pair becomes the birth of another.
    Type3,
}

/// A pair of filter positions; `death` is `None` for essential classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairRef {
    pub birth: usize,
    pub death: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapEvent {
    pub step: usize,
    pub position: usize,
    pub kind: SwapKind,
    /// Simplices at `position` and `position + 1` before the swap.
    pub simplices: (SimplexId, SimplexId),
    pub dims: (usize, usize),
    /// Pairs of the two simplices, in positions before the swap.
    pub before: [PairRef; 2],
    /// Pairs of the same two simplices, in positions after the swap.
    pub after: [PairRef; 2],
}

impl SwapEvent {
    pub fn is_vertex_vertex(&self) -> bool {
        self.dims == (0, 0)
    }
}

/// Transposition tallies of one homotopy step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub total: usize,
    pub no_swap: usize,
    pub type1: usize,
    pub type2: usize,
    pub type3: usize,
    pub vertex_vertex_total: usize,
}

impl StepCounts {
    pub fn record(&mut self, event: &SwapEvent) {
        self.total += 1;
        match event.kind {
            SwapKind::NoSwap => self.no_swap += 1,
            SwapKind::Type1 => self.type1 += 1,
            SwapKind::Type2 => self.type2 += 1,
            SwapKind::Type3 => self.type3 += 1,
        }
        if event.is_vertex_vertex() {
            self.vertex_vertex_total += 1;
        }
    }
}

/// Whether a vineyard keeps every swap event or only per-step counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventLog {
    Full,
    CountsOnly,
}

/// Where an old diagram point went over one homotopy step.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMatch {
    pub dim: usize,
    pub from: (f64, f64),
    /// `None` when the point collapsed onto the diagonal.
    pub to: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct VineyardState {
    filter: Filter,
    r: Vec<Column>,
    v: Vec<Column>,
    low: Vec<Option<SimplexId>>,
    partner: Vec<Option<SimplexId>>,
    /// Vine identity of each positive simplex.
    token: Vec<Option<usize>>,
    birth_of_token: Vec<SimplexId>,
    step: usize,
}

/// Vine identity of a pair, keyed by the simplex that is not being moved.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Anchor {
    Birth(SimplexId),
    Death(Option<SimplexId>),
}

impl VineyardState {
    pub fn new(filter: Filter) -> Self {
        let m = filter.len();
        let red = reduce_with_basis(&boundary_matrix(&filter));
        let to_ids = |col: &Column| {
            let mut c: Column = col.iter().map(|&p| filter.at(p)).collect();
            c.sort_unstable();
            c
        };
        let mut r = vec![Vec::new(); m];
        let mut v = vec![Vec::new(); m];
        for p in 0..m {
            let s = filter.at(p);
            r[s] = to_ids(&red.r[p]);
            v[s] = to_ids(&red.v[p]);
        }
        let mut low = vec![None; m];
        let mut partner = vec![None; m];
        for p in 0..m {
            if let Some(b) = red.low(p) {
                let (bs, ds) = (filter.at(b), filter.at(p));
                low[ds] = Some(bs);
                partner[ds] = Some(bs);
                partner[bs] = Some(ds);
            }
        }
        let mut token = vec![None; m];
        let mut birth_of_token = Vec::new();
        for &s in filter.order() {
            if r[s].is_empty() {
                token[s] = Some(birth_of_token.len());
                birth_of_token.push(s);
            }
        }
        VineyardState {
            filter,
            r,
            v,
            low,
            partner,
            token,
            birth_of_token,
            step: 0,
        }
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn step(&self) -> usize {
        self.step
    }

    fn is_positive(&self, s: SimplexId) -> bool {
        self.r[s].is_empty()
    }

    fn compute_low(&self, s: SimplexId) -> Option<SimplexId> {
        self.r[s]
            .iter()
            .copied()
            .max_by_key(|&x| self.filter.position(x))
    }

    fn add_column(&mut self, target: SimplexId, source: SimplexId) {
        let (rs, vs) = (self.r[source].clone(), self.v[source].clone());
        add_into(&mut self.r[target], &rs);
        add_into(&mut self.v[target], &vs);
    }

    /// `(birth, death)` simplices of the pair containing `s`.
    fn pair_of(&self, s: SimplexId) -> (SimplexId, Option<SimplexId>) {
        if self.is_positive(s) {
            (s, self.partner[s])
        } else {
            (self.partner[s].expect("negative simplex is paired"), Some(s))
        }
    }

    fn pair_ref(&self, (b, d): (SimplexId, Option<SimplexId>)) -> PairRef {
        PairRef {
            birth: self.filter.position(b),
            death: d.map(|d| self.filter.position(d)),
        }
    }

    pub fn pairing(&self) -> PersistencePairing {
        let mut pairs = Vec::new();
        let mut essential = Vec::new();
        for (p, &s) in self.filter.order().iter().enumerate() {
            if self.is_positive(s) {
                match self.partner[s] {
                    Some(d) => pairs.push((p, self.filter.position(d))),
                    None => essential.push(p),
                }
            }
        }
        PersistencePairing { pairs, essential }
    }

    pub fn diagram(&self, p: usize) -> PersistenceDiagram {
        crate::persistence::diagram(&self.pairing(), &self.filter, p)
    }

    /// Exchanges the simplices at positions `i` and `i + 1`.
    pub fn transpose_adjacent(&mut self, i: usize) -> Result<SwapEvent> {
        if i + 1 >= self.filter.len() {
            return Err(Error::Range(format!(
                "transposition at {i} in a filter of length {}",
                self.filter.len()
            )));
        }
        let a = self.filter.at(i);
        let b = self.filter.at(i + 1);
        let complex = Arc::clone(self.filter.complex());
        if complex.is_face_of(a, b) {
            return Err(Error::Precondition(format!(
                "simplex at {i} is a face of the simplex at {}",
                i + 1
            )));
        }

        let old_pairs = [self.pair_of(a), self.pair_of(b)];
        let before = old_pairs.map(|p| self.pair_ref(p));
        let (a_pos, b_pos) = (self.is_positive(a), self.is_positive(b));

        // keep V upper triangular in the new order
        if self.v[b].binary_search(&a).is_ok() {
            self.add_column(b, a);
        }
        self.filter.swap_adjacent(i);

        let mut touched = vec![a, b];
        for s in [a, b] {
            if let Some(p) = self.partner[s] {
                touched.push(p);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        loop {
            for &s in &touched {
                self.low[s] = self.compute_low(s);
            }
            let clash = touched.iter().enumerate().find_map(|(x, &s)| {
                let ls = self.low[s]?;
                touched[x + 1..]
                    .iter()
                    .find(|&&t| self.low[t] == Some(ls))
                    .map(|&t| (s, t))
            });
            match clash {
                None => break,
                Some((s, t)) => {
                    let (early, late) = if self.filter.position(s) < self.filter.position(t) {
                        (s, t)
                    } else {
                        (t, s)
                    };
                    self.add_column(late, early);
                }
            }
        }
        for &s in &touched {
            self.partner[s] = None;
        }
        for &s in &touched {
            if let Some(l) = self.low[s] {
                self.partner[s] = Some(l);
                self.partner[l] = Some(s);
            }
        }

        let new_pairs = [self.pair_of(a), self.pair_of(b)];
        let swapped = {
            let mut o = old_pairs.to_vec();
            let mut n = new_pairs.to_vec();
            o.sort_unstable();
            o.dedup();
            n.sort_unstable();
            n.dedup();
            o != n
        };
        let kind = match (swapped, a_pos, b_pos) {
            (false, _, _) => SwapKind::NoSwap,
            (true, true, true) => SwapKind::Type1,
            (true, false, false) => SwapKind::Type2,
            (true, _, _) => SwapKind::Type3,
        };
        if swapped {
            self.retoken(&old_pairs, &new_pairs, a, b);
        }
        let after = new_pairs.map(|p| self.pair_ref(p));
        Ok(SwapEvent {
            step: self.step,
            position: i,
            kind,
            simplices: (a, b),
            dims: (complex.dim_of(a), complex.dim_of(b)),
            before,
            after,
        })
    }

    /// A pair keeps its vine through the simplex that did not move.
    fn retoken(
        &mut self,
        old: &[(SimplexId, Option<SimplexId>); 2],
        new: &[(SimplexId, Option<SimplexId>); 2],
        a: SimplexId,
        b: SimplexId,
    ) {
        let anchor = |(birth, death): (SimplexId, Option<SimplexId>)| {
            if birth != a && birth != b {
                Anchor::Birth(birth)
            } else {
                Anchor::Death(death)
            }
        };
        let old_tokens: Vec<(Anchor, Option<usize>)> =
            old.iter().map(|&p| (anchor(p), self.token[p.0])).collect();
        for &(birth, _) in old {
            self.token[birth] = None;
        }
        for &p in new {
            let found = old_tokens.iter().find(|(an, _)| *an == anchor(p));
            let t = found.and_then(|&(_, t)| t).expect("every new pair has an anchor");
            self.token[p.0] = Some(t);
            self.birth_of_token[t] = p.0;
        }
    }

    /// Dimension and current `(birth, death)` values of every vine token;
    /// essential classes report an infinite death.
    pub fn token_points(&self) -> Vec<(usize, f64, f64)> {
        let complex = self.filter.complex();
        self.birth_of_token
            .iter()
            .map(|&b| {
                let death = self.partner[b].map_or(f64::INFINITY, |d| self.filter.value(d));
                (complex.dim_of(b), self.filter.value(b), death)
            })
            .collect()
    }

    /// Moves the state to the filter induced by `new_values` (one per vertex).
    pub fn advance_step(&mut self, new_values: &[f64]) -> Result<(Vec<SwapEvent>, Vec<PointMatch>)> {
        let mut events = Vec::new();
        let matching = self.advance_step_with(new_values, |e| events.push(e))?;
        Ok((events, matching))
    }

    /// As [`advance_step`](Self::advance_step), handing each event to `sink`.
    pub fn advance_step_with(
        &mut self,
        new_values: &[f64],
        mut sink: impl FnMut(SwapEvent),
    ) -> Result<Vec<PointMatch>> {
        let target = build_filter(self.filter.complex(), new_values)?;
        let schedule = transposition_schedule(&self.filter, &target)?;
        let before = self.token_points();
        self.step += 1;
        for i in schedule {
            sink(self.transpose_adjacent(i)?);
        }
        debug_assert_eq!(self.filter.order(), target.order());
        self.filter.set_values(target.values().to_vec());
        let after = self.token_points();
        Ok(before
            .iter()
            .zip(&after)
            .filter(|(&(dim, b, d), _)| dim <= 1 && b < d && d.is_finite())
            .map(|(&(dim, b0, d0), &(_, b1, d1))| PointMatch {
                dim,
                from: (b0, d0),
                to: (b1 < d1).then_some((b1, d1)),
            })
            .collect())
    }
}

fn key_bits(t: f64) -> u64 {
    // non-negative floats order like their bit patterns
    t.max(0.0).to_bits()
}

/// Adjacent swaps turning `old` into `new`, one per inverted pair.
///
/// Swaps are issued in order of the time at which the two simplices' values
/// cross when interpolating linearly from `old` values to `new` values, so
/// every exchange happens between simplices of (nearly) equal value.
pub fn transposition_schedule(old: &Filter, new: &Filter) -> Result<Vec<usize>> {
    if old.len() != new.len() {
        return Err(Error::Input(format!(
            "filters over different simplex sets ({} vs {} simplices)",
            old.len(),
            new.len()
        )));
    }
    let m = old.len();
    let mut cur: Vec<SimplexId> = old.order().to_vec();
    let target: Vec<usize> = (0..m).map(|s| new.position(s)).collect();
    let inverted = |cur: &[SimplexId], i: usize| target[cur[i]] > target[cur[i + 1]];
    let crossing = |cur: &[SimplexId], i: usize| {
        let (a, b) = (cur[i], cur[i + 1]);
        let d0 = old.value(a) - old.value(b);
        let d1 = new.value(a) - new.value(b);
        if d1 == d0 || !d0.is_finite() || !d1.is_finite() {
            0.0
        } else {
            (-d0 / (d1 - d0)).clamp(0.0, 1.0)
        }
    };
    let mut heap = BinaryHeap::new();
    for i in 0..m.saturating_sub(1) {
        if inverted(&cur, i) {
            heap.push(Reverse((key_bits(crossing(&cur, i)), i)));
        }
    }
    let mut schedule = Vec::new();
    while let Some(Reverse((t, i))) = heap.pop() {
        if !inverted(&cur, i) || key_bits(crossing(&cur, i)) != t {
            continue;
        }
        cur.swap(i, i + 1);
        schedule.push(i);
        for j in [i.checked_sub(1), Some(i + 1)].into_iter().flatten() {
            if j + 1 < m && inverted(&cur, j) {
                heap.push(Reverse((key_bits(crossing(&cur, j)), j)));
            }
        }
    }
    if cur != new.order() {
        return Err(Error::Input("filters are not permutations of the same simplices".into()));
    }
    Ok(schedule)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndKind {
    DiagramPoint,
    Diagonal,
    EssentialTracked,
}

impl EndKind {
    pub fn name(self) -> &'static str {
        match self {
            EndKind::DiagramPoint => "diagram_point",
            EndKind::Diagonal => "diagonal",
            EndKind::EssentialTracked => "essential",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "diagram_point" => Some(EndKind::DiagramPoint),
            "diagonal" => Some(EndKind::Diagonal),
            "essential" => Some(EndKind::EssentialTracked),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vine {
    pub dim: usize,
    /// `(step, birth, death)`; death is infinite for essential classes.
    pub samples: Vec<(usize, f64, f64)>,
    pub start_kind: EndKind,
    pub end_kind: EndKind,
}

impl Vine {
    pub fn first_step(&self) -> usize {
        self.samples.first().map_or(0, |s| s.0)
    }

    pub fn last_step(&self) -> usize {
        self.samples.last().map_or(0, |s| s.0)
    }

    /// Steps between the first and last sample.
    pub fn duration(&self) -> usize {
        self.last_step() - self.first_step()
    }

    pub fn is_essential(&self) -> bool {
        self.end_kind == EndKind::EssentialTracked
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointMatch {
    pub dim: usize,
    /// Point of the first diagram, `None` for the diagonal.
    pub from: Option<(f64, f64)>,
    /// Point of the last diagram, `None` for the diagonal.
    pub to: Option<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Vineyard {
    pub vines: Vec<Vine>,
    /// Events of the transition from step `k` to step `k + 1` (empty when
    /// built with [`EventLog::CountsOnly`]).
    pub per_step_events: Vec<Vec<SwapEvent>>,
    /// Tallies of the transition from step `k` to step `k + 1`; `total` is
    /// the schedule length.
    pub per_step_counts: Vec<StepCounts>,
    pub endpoint_matching: Vec<EndpointMatch>,
    /// Diagrams of dimensions 0 and 1 at every step.
    pub diagrams: Vec<[PersistenceDiagram; 2]>,
}

impl Vineyard {
    pub fn steps(&self) -> usize {
        self.diagrams.len()
    }
}

/// Splits each token's sample history into vines of off-diagonal stretches.
pub fn assemble_vines(history: &[Vec<(usize, f64, f64)>]) -> Vec<Vine> {
    let steps = history.len();
    let tokens = history.first().map_or(0, Vec::len);
    let mut vines = Vec::new();
    for t in 0..tokens {
        let dim = history[0][t].0;
        if dim > 1 {
            continue;
        }
        let sample = |k: usize| (k, history[k][t].1, history[k][t].2);
        if history[0][t].2.is_infinite() {
            vines.push(Vine {
                dim,
                samples: (0..steps).map(sample).collect(),
                start_kind: EndKind::EssentialTracked,
                end_kind: EndKind::EssentialTracked,
            });
            continue;
        }
        let alive = |k: usize| history[k][t].1 < history[k][t].2;
        let mut k = 0;
        while k < steps {
            if !alive(k) {
                k += 1;
                continue;
            }
            let start = k;
            while k < steps && alive(k) {
                k += 1;
            }
            let first = if start > 0 { start - 1 } else { 0 };
            let last = if k < steps { k } else { steps - 1 };
            vines.push(Vine {
                dim,
                samples: (first..=last).map(sample).collect(),
                start_kind: if start > 0 { EndKind::Diagonal } else { EndKind::DiagramPoint },
                end_kind: if k < steps { EndKind::Diagonal } else { EndKind::DiagramPoint },
            });
        }
    }
    vines
}

fn endpoint_matching(vines: &[Vine]) -> Vec<EndpointMatch> {
    vines
        .iter()
        .filter(|v| !v.is_essential())
        .filter(|v| v.start_kind == EndKind::DiagramPoint || v.end_kind == EndKind::DiagramPoint)
        .map(|v| {
            let point = |s: &(usize, f64, f64)| (s.1, s.2);
            EndpointMatch {
                dim: v.dim,
                from: (v.start_kind == EndKind::DiagramPoint).then(|| point(&v.samples[0])),
                to: (v.end_kind == EndKind::DiagramPoint).then(|| point(v.samples.last().unwrap())),
            }
        })
        .collect()
}

/// Builds the vineyard of the homotopy `run` (stacked from step 0 to the last step).
pub fn build_vineyard(f: &GridField, run: &HeatRun, mode: HomotopyMode) -> Result<Vineyard> {
    let complex: Arc<SimplicialComplex> = Arc::new(triangulate(run.n(), run.topology())?);
    build_vineyard_on(&complex, f, run, mode, EventLog::Full)
}

/// As [`build_vineyard`], over an already triangulated mesh.
pub fn build_vineyard_on(
    complex: &Arc<SimplicialComplex>,
    f: &GridField,
    run: &HeatRun,
    mode: HomotopyMode,
    log: EventLog,
) -> Result<Vineyard> {
    if complex.vertex_count() != run.n() * run.n() {
        return Err(Error::Dimension {
            expected: run.n() * run.n(),
            actual: complex.vertex_count(),
        });
    }
    let field0 = homotopy_field(f, run, 0, mode)?;
    let mut state = VineyardState::new(build_filter(complex, field0.values())?);
    let snapshot = |s: &VineyardState| [s.diagram(0), s.diagram(1)];
    let mut diagrams = vec![snapshot(&state)];
    let mut history = vec![state.token_points()];
    let mut per_step_events = Vec::new();
    let mut per_step_counts = Vec::new();
    for k in 1..=run.final_step() {
        let field = homotopy_field(f, run, k, mode)?;
        let mut counts = StepCounts::default();
        let mut events = Vec::new();
        state.advance_step_with(field.values(), |e| {
            counts.record(&e);
            if log == EventLog::Full {
                events.push(e);
            }
        })?;
        per_step_counts.push(counts);
        per_step_events.push(events);
        diagrams.push(snapshot(&state));
        history.push(state.token_points());
    }
    let vines = assemble_vines(&history);
    let endpoint_matching = endpoint_matching(&vines);
    Ok(Vineyard {
        vines,
        per_step_events,
        per_step_counts,
        endpoint_matching,
        diagrams,
    })
}

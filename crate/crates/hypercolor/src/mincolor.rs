//! The approximate min-coloring pipeline: promise-specific degree reduction,
//! a random-recoloring 2-coloring walk, the bounded-degree coloring loop
//! driven by threshold rounding, and their composition.
//!
//! Every phase colors with globally fresh color ids, so properness across
//! phases is structural; each public entry point still runs an independent
//! recheck before returning and refuses to hand back a result that fails it.

use crate::coloring::{proper_on_colored, Coloring, ColoringError, PromiseKind};
use crate::forge::ForgeError;
use crate::hypergraph::{Hypergraph, HypergraphError};
use crate::rounding::{gaussian_direction, threshold_independent_set, RoundingError};
use crate::sdp::{check_feasible, solve, SdpError, SolveOptions, SolveOutcome, VectorSolution};
use crate::stream::{substream, substream_indexed};
use crate::util::binomial;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Assignment enumerations are exhaustive in spirit but capped per phase so
/// a pathological instance degrades into a structured error instead of an
/// exponential stall.
const ASSIGNMENT_BUDGET: u64 = 4096;

#[derive(Debug, Error)]
pub enum MincolorError {
    #[error("{0}")]
    BadParams(String),
    #[error("recoloring walk exhausted {flips} flips with {remaining_mono} monochromatic edges left")]
    FlipBudget { flips: u64, remaining_mono: usize },
    #[error("assignment search exhausted in {phase} after {tried} candidates")]
    AssignmentExhausted { phase: String, tried: u64 },
    #[error("independent-set retries exhausted: {attempts} attempts, best {best} of required {need}")]
    RetryCapExhausted {
        attempts: usize,
        best: usize,
        need: usize,
    },
    #[error("degenerate overlap in {phase}: nothing colorable")]
    DegenerateOverlap { phase: String },
    #[error("residual relaxation infeasible (max violation {max_violation:.3e})")]
    ResidualInfeasible { max_violation: f64 },
    #[error("result failed its independent recheck: {0}")]
    Improper(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Forge(#[from] ForgeError),
}

/// Random recoloring walk: start from a uniform 2-coloring of the active
/// vertices and, while a monochromatic edge exists, flip a uniform vertex
/// of a uniform monochromatic edge. The caller promises a fair 2-coloring
/// exists; the walk then succeeds quickly in practice. Returns the proper
/// coloring and the flip count, or a structured failure once the budget
/// (default 64 n^3 over active vertices) runs out. Properness is rechecked
/// before returning, so a success claim is never false.
pub fn two_color_balanced(
    h: &Hypergraph,
    seed: u64,
    max_flips: Option<u64>,
) -> Result<(Coloring, u64), MincolorError> {
    let active = h.active_vertices();
    let mut coloring = Coloring::new(2, h.n());
    if active.is_empty() {
        return Ok((coloring, 0));
    }
    let budget = max_flips.unwrap_or_else(|| 64 * (active.len() as u64).pow(3));
    let mut rng = substream(seed, "two-color-walk");
    let mut col = vec![0u8; h.n()];
    for &v in &active {
        col[v] = rng.gen_range(0..2u8);
    }
    let is_mono = |col: &[u8], e: &[usize]| e.iter().all(|&v| col[v] == col[e[0]]);
    // Monochromatic edge ids with O(1) sampling and removal.
    let mut mono_pos: Vec<Option<usize>> = vec![None; h.m()];
    let mut mono_list: Vec<usize> = Vec::new();
    for (id, e) in h.edges().iter().enumerate() {
        if is_mono(&col, e) {
            mono_pos[id] = Some(mono_list.len());
            mono_list.push(id);
        }
    }
    let mut flips = 0u64;
    while !mono_list.is_empty() {
        if flips >= budget {
            return Err(MincolorError::FlipBudget {
                flips,
                remaining_mono: mono_list.len(),
            });
        }
        let e_id = mono_list[rng.gen_range(0..mono_list.len())];
        let e = h.edge(e_id);
        let v = e[rng.gen_range(0..e.len())];
        col[v] ^= 1;
        flips += 1;
        for &id in h.edges_at(v) {
            let now_mono = is_mono(&col, h.edge(id));
            match (mono_pos[id], now_mono) {
                (None, true) => {
                    mono_pos[id] = Some(mono_list.len());
                    mono_list.push(id);
                }
                (Some(p), false) => {
                    let last = mono_list.pop().unwrap();
                    if p < mono_list.len() {
                        mono_list[p] = last;
                        mono_pos[last] = Some(p);
                    }
                    mono_pos[id] = None;
                }
                _ => {}
            }
        }
    }
    for &v in &active {
        coloring.set(v, col[v] as usize);
    }
    if !proper_on_colored(h, &coloring) {
        return Err(MincolorError::Improper("walk bookkeeping drift".into()));
    }
    Ok((coloring, flips))
}

/// One phase of a degree-reduction run: which vertices were colored, with
/// which fresh global colors, under what rule.
#[derive(Debug, Clone)]
pub struct PhaseRecord {
    pub phase: usize,
    pub label: String,
    pub vertices: Vec<usize>,
    pub colors: Vec<usize>,
}

/// Output of a degree-reduction algorithm: a proper partial coloring with a
/// dynamically grown palette, the residual hypergraph induced on the
/// uncolored vertices, and the per-phase log.
#[derive(Debug, Clone)]
pub struct PartialColoringResult {
    pub assignment: Vec<Option<usize>>,
    pub colors_used: usize,
    pub residual: Hypergraph,
    pub phases: Vec<PhaseRecord>,
    /// (k-1)-sets whose edges were discharged by marking rather than
    /// immediate coloring; their vertices are colored in the final phase.
    pub marked: Vec<Vec<usize>>,
    pub degree_bound: usize,
}

impl PartialColoringResult {
    pub fn coloring(&self) -> Coloring {
        Coloring::from_colors(self.colors_used.max(1), self.assignment.clone())
    }

    pub fn uncolored(&self) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&v| self.assignment[v].is_none())
            .collect()
    }

    /// Independent recheck of the three contract clauses: the partial
    /// coloring is proper on the original, the residual is exactly the
    /// subgraph induced on the uncolored vertices, and the residual degree
    /// bound holds by recount.
    pub fn validate(&self, original: &Hypergraph) -> Result<(), MincolorError> {
        if !proper_on_colored(original, &self.coloring()) {
            return Err(MincolorError::Improper(
                "monochromatic fully-colored edge".into(),
            ));
        }
        let expect = original.induced(&self.uncolored());
        let norm = |h: &Hypergraph| {
            let mut e: Vec<Vec<usize>> = h.edges().to_vec();
            e.sort();
            e
        };
        if norm(&expect) != norm(&self.residual) {
            return Err(MincolorError::Improper(
                "residual does not match the induced uncolored subgraph".into(),
            ));
        }
        let got = self.residual.max_degree();
        if got > self.degree_bound {
            return Err(MincolorError::Improper(format!(
                "residual max degree {got} exceeds declared bound {}",
                self.degree_bound
            )));
        }
        Ok(())
    }
}

/// Shared bookkeeping for the reduction algorithms: the shrinking working
/// copy, the global assignment, and fresh-color discipline.
struct Builder {
    h1: Hypergraph,
    assignment: Vec<Option<usize>>,
    colors_used: usize,
    phases: Vec<PhaseRecord>,
    marked: Vec<Vec<usize>>,
    seed: u64,
    walk_counter: u64,
}

impl Builder {
    fn new(h: &Hypergraph, seed: u64) -> Self {
        Self {
            h1: h.clone(),
            assignment: vec![None; h.n()],
            colors_used: 0,
            phases: Vec::new(),
            marked: Vec::new(),
            seed,
            walk_counter: 0,
        }
    }

    fn fresh(&mut self) -> usize {
        let c = self.colors_used;
        self.colors_used += 1;
        c
    }

    fn walk_seed(&mut self) -> u64 {
        let idx = self.walk_counter;
        self.walk_counter += 1;
        // One substream per inner walk, derived deterministically.
        substream_indexed(self.seed, "reduce-walk", idx).gen()
    }

    /// Applies a consistent local coloring: local color ids are mapped to
    /// fresh global ids in sorted order, the vertices are colored and
    /// removed from the working copy, and the phase is logged.
    fn commit(&mut self, label: &str, local: &[(usize, usize)]) {
        let mut used: Vec<usize> = local.iter().map(|&(_, c)| c).collect();
        used.sort_unstable();
        used.dedup();
        let map: BTreeMap<usize, usize> = used.iter().map(|&c| (c, self.fresh())).collect();
        let mut vertices = Vec::with_capacity(local.len());
        for &(v, c) in local {
            debug_assert!(self.assignment[v].is_none(), "vertex {v} colored twice");
            self.assignment[v] = Some(map[&c]);
            vertices.push(v);
        }
        self.h1 = self.h1.remove_vertices(&vertices);
        self.phases.push(PhaseRecord {
            phase: self.phases.len(),
            label: label.to_string(),
            vertices,
            colors: map.values().copied().collect(),
        });
    }

    fn finish(
        self,
        original: &Hypergraph,
        degree_bound: usize,
    ) -> Result<PartialColoringResult, MincolorError> {
        let result = PartialColoringResult {
            assignment: self.assignment,
            colors_used: self.colors_used,
            residual: self.h1,
            phases: self.phases,
            marked: self.marked,
            degree_bound,
        };
        result.validate(original)?;
        Ok(result)
    }
}

fn drop_edges(h: &Hypergraph, ids: &[usize]) -> Hypergraph {
    let gone: BTreeSet<usize> = ids.iter().copied().collect();
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (id, (e, &w)) in h.edges().iter().zip(h.weights()).enumerate() {
        if !gone.contains(&id) {
            edges.push(e.clone());
            weights.push(w);
        }
    }
    Hypergraph::new(h.k(), h.n(), edges, weights).expect("surviving edges stay valid")
}

/// Every edge-supported (k-1)-subset with its set of completion vertices,
/// in lexicographic order.
fn subset_neighborhoods(h: &Hypergraph) -> BTreeMap<Vec<usize>, BTreeSet<usize>> {
    let mut map: BTreeMap<Vec<usize>, BTreeSet<usize>> = BTreeMap::new();
    for e in h.edges() {
        for j in 0..e.len() {
            let mut s = e.clone();
            let u = s.remove(j);
            map.entry(s).or_default().insert(u);
        }
    }
    map
}

fn contains_edge(h: &Hypergraph, verts: &BTreeSet<usize>) -> bool {
    h.edges().iter().any(|e| e.iter().all(|v| verts.contains(v)))
}

/// True when some edge has every endpoint locally colored with one value.
fn has_local_mono(h: &Hypergraph, local: &[Option<usize>]) -> bool {
    h.edges().iter().any(|e| {
        let first = match local[e[0]] {
            Some(c) => c,
            None => return false,
        };
        e.iter().all(|&v| local[v] == Some(first))
    })
}

/// Degree reduction for (k+1)-strongly colorable hypergraphs: repeatedly
/// batch up high-degree vertices, guess their strong colors among k+1 fresh
/// ones, and 2-color each guessed class's neighborhood with a fresh pair
/// via the recoloring walk, keeping the first guess that leaves no
/// monochromatic edge. The residual has max degree at most `t`.
pub fn sc_degree_reduce(
    h: &Hypergraph,
    t: usize,
    c: f64,
    seed: u64,
) -> Result<PartialColoringResult, MincolorError> {
    let k = h.k();
    if t < 1 || !(c >= 1.0) {
        return Err(MincolorError::BadParams(format!(
            "need t >= 1 and c >= 1, got t = {t}, c = {c}"
        )));
    }
    let n = h.n();
    let batch_cap = ((c * (n.max(2) as f64).ln() / (k.max(2) as f64).ln()).floor() as usize).max(1);
    let mut b = Builder::new(h, seed);
    loop {
        if (0..n).all(|v| b.h1.degree(v) <= t) {
            break;
        }
        // Batch selection on a scratch copy: each pick consumes its whole
        // neighborhood so the picks have disjoint reach.
        let mut h2 = b.h1.clone();
        let mut vbar: Vec<usize> = Vec::new();
        while vbar.len() < batch_cap {
            let pick = (0..n)
                .filter(|&v| h2.degree(v) > t)
                .max_by_key(|&v| (h2.degree(v), std::cmp::Reverse(v)));
            let Some(v) = pick else { break };
            let nb = h2.neighbors(v);
            let deg = h2.degree(v);
            // A vertex with this many edges must spread over many distinct
            // neighbors: its edges are distinct (k-1)-subsets of them.
            assert!(
                binomial(nb.len() as u64, (k - 1) as u64) >= deg as u128,
                "degree {deg} cannot fit in {} neighbors",
                nb.len()
            );
            assert!(
                nb.len() as f64 >= (k as f64 - 1.0) * (t as f64).powf(1.0 / (k as f64 - 1.0)) - 1e-9,
                "picked vertex has {} distinct neighbors, below the guaranteed floor",
                nb.len()
            );
            let mut gone = nb;
            gone.push(v);
            h2 = h2.remove_vertices(&gone);
            vbar.push(v);
        }
        // Guess enumeration: odometer over (k+1)^|vbar| class assignments.
        // The walk outcome for a class depends only on which vbar members
        // share it, so walks are memoized by member subset; the odometer
        // then costs one cheap mono-check per assignment.
        let total: u64 = ((k + 1) as u64)
            .checked_pow(vbar.len() as u32)
            .unwrap_or(u64::MAX);
        let budget = total.min(ASSIGNMENT_BUDGET);
        let mut memo: BTreeMap<Vec<usize>, Option<Vec<(usize, usize)>>> = BTreeMap::new();
        let mut assign = vec![0usize; vbar.len()];
        let mut committed = false;
        for _ in 0..budget {
            if let Some(local) = sc_try_assignment(&mut b, &vbar, &assign, &mut memo)? {
                b.commit("strong-batch", &local);
                committed = true;
                break;
            }
            // Next assignment, last coordinate fastest.
            let mut pos = vbar.len();
            while pos > 0 {
                pos -= 1;
                assign[pos] += 1;
                if assign[pos] <= k {
                    break;
                }
                assign[pos] = 0;
            }
        }
        if !committed {
            return Err(MincolorError::AssignmentExhausted {
                phase: format!("strong batch of {}", vbar.len()),
                tried: budget,
            });
        }
    }
    b.finish(h, t)
}

/// Flip budget for walks that test a guess: ample for a genuinely fair
/// instance, cheap to exhaust on a wrong guess. The final marked-set walk
/// keeps the full default budget.
fn guess_walk_budget(sub: &Hypergraph) -> u64 {
    let a = sub.active_vertices().len() as u64;
    64 * a * a + 10_000
}

/// The walk 2-coloring of the joint neighborhood of one guessed class,
/// keyed by the vbar members sharing the class. `None` caches a failed
/// walk so the odometer never repeats it.
fn sc_class_coloring(
    b: &mut Builder,
    vbar: &[usize],
    members: &[usize],
    memo: &mut BTreeMap<Vec<usize>, Option<Vec<(usize, usize)>>>,
) -> Result<Option<Vec<(usize, usize)>>, MincolorError> {
    if let Some(cached) = memo.get(members) {
        return Ok(cached.clone());
    }
    let in_vbar: BTreeSet<usize> = vbar.iter().copied().collect();
    let mut ci: BTreeSet<usize> = BTreeSet::new();
    for &idx in members {
        ci.extend(b.h1.neighbors(vbar[idx]));
    }
    let ci: Vec<usize> = ci.difference(&in_vbar).copied().collect();
    let result = if ci.is_empty() {
        Some(Vec::new())
    } else {
        let sub = b.h1.induced(&ci);
        if sub.m() == 0 {
            Some(ci.iter().map(|&u| (u, 0)).collect())
        } else {
            let walk_seed = b.walk_seed();
            match two_color_balanced(&sub, walk_seed, Some(guess_walk_budget(&sub))) {
                Ok((side, _)) => Some(
                    ci.iter()
                        .map(|&u| (u, side.get(u).unwrap_or(0)))
                        .collect(),
                ),
                Err(MincolorError::FlipBudget { .. }) => None,
                Err(e) => return Err(e),
            }
        }
    };
    memo.insert(members.to_vec(), result.clone());
    Ok(result)
}

/// One strong-coloring guess: vbar gets the assigned classes, each class
/// neighborhood gets a fresh walk 2-coloring, later classes overwrite
/// earlier ones on overlap. Returns the vertex/local-color pairs if no
/// fully colored edge is monochromatic.
fn sc_try_assignment(
    b: &mut Builder,
    vbar: &[usize],
    assign: &[usize],
    memo: &mut BTreeMap<Vec<usize>, Option<Vec<(usize, usize)>>>,
) -> Result<Option<Vec<(usize, usize)>>, MincolorError> {
    let n = b.h1.n();
    let k = b.h1.k();
    let mut local: Vec<Option<usize>> = vec![None; n];
    for class in 0..=k {
        let members: Vec<usize> = (0..vbar.len()).filter(|&j| assign[j] == class).collect();
        if members.is_empty() {
            continue;
        }
        let Some(pairs) = sc_class_coloring(b, vbar, &members, memo)? else {
            return Ok(None);
        };
        let base = (k + 1) + 2 * class;
        for (u, side) in pairs {
            local[u] = Some(base + side);
        }
    }
    for (j, &v) in vbar.iter().enumerate() {
        local[v] = Some(assign[j]);
    }
    if has_local_mono(&b.h1, &local) {
        return Ok(None);
    }
    Ok(Some(
        (0..n).filter_map(|v| local[v].map(|c| (v, c))).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdMode {
    Warmup,
    Full,
}

/// Degree reduction for odd-arity hypergraphs with a discrepancy-1
/// witness. The warmup scans (k-1)-subsets with oversized completion
/// neighborhoods: a neighborhood containing an edge forces the subset to be
/// balanced in every witness (mark it, discharge its edges, 2-color all
/// marked sets fairly at the end); an independent neighborhood is colored
/// against its subset with a fresh pair. Full mode additionally collects
/// independent-neighborhood subsets and brute-forces biased assignments
/// over small groups of them, which is what achieves the 2n/(c t) color
/// count.
pub fn ld_degree_reduce(
    h: &Hypergraph,
    t: usize,
    c: f64,
    seed: u64,
    mode: LdMode,
) -> Result<PartialColoringResult, MincolorError> {
    let k = h.k();
    if k % 2 == 0 || k < 3 {
        return Err(MincolorError::BadParams(format!(
            "discrepancy reduction needs odd arity >= 3, got k = {k}"
        )));
    }
    if t < 1 || !(c >= 1.0) {
        return Err(MincolorError::BadParams(format!(
            "need t >= 1 and c >= 1, got t = {t}, c = {c}"
        )));
    }
    let bound_u = binomial((h.n().max(1) - 1) as u64, (k - 2) as u64).saturating_mul(t as u128);
    let degree_bound = usize::try_from(bound_u).unwrap_or(usize::MAX);
    match mode {
        LdMode::Warmup => ld_warmup(h, t, seed, degree_bound),
        LdMode::Full => biased_reduce(h, t, c, seed, degree_bound, BiasRule::Discrepancy),
    }
}

fn ld_warmup(
    h: &Hypergraph,
    t: usize,
    seed: u64,
    degree_bound: usize,
) -> Result<PartialColoringResult, MincolorError> {
    let mut b = Builder::new(h, seed);
    loop {
        let map = subset_neighborhoods(&b.h1);
        // Prefer marking: edge deletions can only shrink other
        // neighborhoods, so discharge them before spending colors.
        let mut chosen: Option<(Vec<usize>, BTreeSet<usize>, bool)> = None;
        for (s, nb) in &map {
            if nb.len() > t && contains_edge(&b.h1, nb) {
                chosen = Some((s.clone(), nb.clone(), true));
                break;
            }
        }
        if chosen.is_none() {
            for (s, nb) in &map {
                if nb.len() > t {
                    chosen = Some((s.clone(), nb.clone(), false));
                    break;
                }
            }
        }
        let Some((s, nb, mark)) = chosen else { break };
        if mark {
            let ids = b.h1.edges_containing_all(&s);
            b.h1 = drop_edges(&b.h1, &ids);
            b.marked.push(s);
        } else {
            // Color the subset against its neighborhood with a fresh pair,
            // skipping vertices reserved for the marked-set phase.
            let reserved: BTreeSet<usize> = b.marked.iter().flatten().copied().collect();
            let mut local: Vec<(usize, usize)> = Vec::new();
            for &v in &s {
                if !reserved.contains(&v) {
                    local.push((v, 0));
                }
            }
            for &u in &nb {
                if !reserved.contains(&u) {
                    local.push((u, 1));
                }
            }
            if local.is_empty() {
                return Err(MincolorError::DegenerateOverlap {
                    phase: "warmup pair".into(),
                });
            }
            b.commit("pair", &local);
        }
    }
    color_marked_sets(&mut b, h.k())?;
    let pair_phases = b
        .phases
        .iter()
        .filter(|p| p.label == "pair")
        .count();
    debug_assert!(b.colors_used <= 2 * pair_phases + 2);
    b.finish(h, degree_bound)
}

/// Final phase shared by the marked-set paths: the marked (k-1)-sets form a
/// (k-1)-uniform hypergraph that is fairly 2-colorable in every witness, so
/// the walk colors it with one fresh pair and discharges all deleted edges.
fn color_marked_sets(b: &mut Builder, k: usize) -> Result<(), MincolorError> {
    if b.marked.is_empty() {
        return Ok(());
    }
    let n = b.assignment.len();
    let edges: Vec<Vec<usize>> = b.marked.clone();
    let f = Hypergraph::unweighted(k - 1, n, edges)?;
    let walk_seed = b.walk_seed();
    let (side, _) = two_color_balanced(&f, walk_seed, None)?;
    let local: Vec<(usize, usize)> = f
        .active_vertices()
        .into_iter()
        .map(|v| (v, side.get(v).expect("active vertices are colored")))
        .collect();
    b.commit("marked", &local);
    Ok(())
}

/// Which biased-guess rule the full reduction runs under.
enum BiasRule {
    /// Discrepancy-1: a (k-1)-set is either balanced or 2-biased; a
    /// 2-biased set forces its whole completion neighborhood to the
    /// minority color. Guesses assign each set a bias side, the set is
    /// colored flat on its bias and its neighborhood flat on the other.
    Discrepancy,
    /// (k-1)-rainbow: a (k-1)-set either sees all k-1 colors or repeats
    /// one, and a repeat forces the neighborhood to the unique missing
    /// color. Guesses assign each set its missing color; only
    /// neighborhoods are colored.
    Rainbow,
}

impl BiasRule {
    fn guesses(&self, k: usize) -> usize {
        match self {
            BiasRule::Discrepancy => 2,
            BiasRule::Rainbow => k - 1,
        }
    }
}

/// Skeleton shared by the full discrepancy and rainbow reductions.
fn biased_reduce(
    h: &Hypergraph,
    t: usize,
    c: f64,
    seed: u64,
    degree_bound: usize,
    rule: BiasRule,
) -> Result<PartialColoringResult, MincolorError> {
    let k = h.k();
    let group = (c.floor() as usize).max(1);
    let mut b = Builder::new(h, seed);
    let mut h2 = h.clone();
    let mut pool: Vec<Vec<usize>> = Vec::new();
    loop {
        let map = subset_neighborhoods(&h2);
        let Some((s, nb2)) = map.into_iter().find(|(_, nb)| nb.len() > t) else {
            break;
        };
        // The scratch copy always loses the oversized neighborhood, which
        // caps the number of loop iterations at n/t.
        h2 = h2.remove_vertices(&nb2.iter().copied().collect::<Vec<_>>());
        let nb1: BTreeSet<usize> = b.h1.completion_neighborhood(&s)?.into_iter().collect();
        if contains_edge(&b.h1, &nb1) {
            let ids = b.h1.edges_containing_all(&s);
            b.h1 = drop_edges(&b.h1, &ids);
            b.marked.push(s);
            continue;
        }
        pool.push(s);
        if pool.len() < group {
            continue;
        }
        // Try every group containing the newest set; older groups were
        // tried when their own newest member arrived.
        let newest = pool.len() - 1;
        let older: Vec<usize> = (0..newest).collect();
        let mut tried = 0u64;
        let mut done = false;
        for combo in combinations(&older, group - 1) {
            let mut members = combo.clone();
            members.push(newest);
            let mut guess = vec![0usize; group];
            let options = rule.guesses(k);
            loop {
                tried += 1;
                if tried > ASSIGNMENT_BUDGET {
                    break;
                }
                if try_bias(&mut b, &pool, &members, &guess, &rule, &mut h2)? {
                    // Remove the fired sets, newest-last to keep indices valid.
                    let mut drop = members.clone();
                    drop.sort_unstable_by(|a, x| x.cmp(a));
                    for idx in drop {
                        pool.remove(idx);
                    }
                    done = true;
                    break;
                }
                let mut pos = group;
                let mut carried = true;
                while pos > 0 && carried {
                    pos -= 1;
                    guess[pos] += 1;
                    carried = guess[pos] >= options;
                    if carried {
                        guess[pos] = 0;
                    }
                }
                if carried {
                    break;
                }
            }
            if done || tried > ASSIGNMENT_BUDGET {
                break;
            }
        }
    }
    // Closing split: all but fewer than `group` pool sets are balanced (or
    // full-rainbow) in every witness and join the marked sets in the fair
    // walk; the small remainder is handled by biased guessing.
    let mut closed = pool.is_empty() && b.marked.is_empty();
    if !closed {
        'outer: for b_size in 0..group.min(pool.len() + 1) {
            let idx: Vec<usize> = (0..pool.len()).collect();
            for biased_part in combinations(&idx, b_size) {
                if close_split(&mut b, &pool, &biased_part, &rule, k)? {
                    closed = true;
                    break 'outer;
                }
            }
        }
    }
    if !closed {
        return Err(MincolorError::AssignmentExhausted {
            phase: "closing split".into(),
            tried: 0,
        });
    }
    b.finish(h, degree_bound)
}

fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut pos = size;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] <= items.len() - (size - pos) {
                for j in pos + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// One biased guess over the chosen pool members. Colors flat per the rule,
/// skipping vertices reserved for other pool or marked sets; commits and
/// updates both working copies when no fully colored edge is monochromatic.
fn try_bias(
    b: &mut Builder,
    pool: &[Vec<usize>],
    members: &[usize],
    guess: &[usize],
    rule: &BiasRule,
    h2: &mut Hypergraph,
) -> Result<bool, MincolorError> {
    let n = b.h1.n();
    let chosen: BTreeSet<usize> = members.iter().copied().collect();
    let mut reserved: BTreeSet<usize> = b.marked.iter().flatten().copied().collect();
    for (i, s) in pool.iter().enumerate() {
        if !chosen.contains(&i) {
            reserved.extend(s.iter().copied());
        }
    }
    let mut local: Vec<Option<usize>> = vec![None; n];
    let mut ok = true;
    'sets: for (slot, &i) in members.iter().enumerate() {
        let s = &pool[i];
        let g = guess[slot];
        let (set_color, nb_color) = match rule {
            BiasRule::Discrepancy => (Some(g), 1 - g),
            BiasRule::Rainbow => (None, g),
        };
        if let Some(c) = set_color {
            for &v in s {
                if reserved.contains(&v) {
                    continue;
                }
                if local[v].is_some_and(|prev| prev != c) {
                    ok = false;
                    break 'sets;
                }
                local[v] = Some(c);
            }
        }
        for u in b.h1.completion_neighborhood(s)? {
            if reserved.contains(&u) {
                continue;
            }
            if local[u].is_some_and(|prev| prev != nb_color) {
                ok = false;
                break 'sets;
            }
            local[u] = Some(nb_color);
        }
    }
    if !ok || has_local_mono(&b.h1, &local) {
        return Ok(false);
    }
    let pairs: Vec<(usize, usize)> = (0..n).filter_map(|v| local[v].map(|c| (v, c))).collect();
    if pairs.is_empty() {
        return Ok(false);
    }
    let vertices: Vec<usize> = pairs.iter().map(|&(v, _)| v).collect();
    b.commit("biased-group", &pairs);
    *h2 = h2.remove_vertices(&vertices);
    Ok(true)
}

/// The final split for the full reductions: walk-2-color the marked sets
/// plus the kept pool sets as one fair hypergraph, and bias-guess the small
/// leftover part.
fn close_split(
    b: &mut Builder,
    pool: &[Vec<usize>],
    biased_part: &[usize],
    rule: &BiasRule,
    k: usize,
) -> Result<bool, MincolorError> {
    let n = b.assignment.len();
    let biased: BTreeSet<usize> = biased_part.iter().copied().collect();
    let mut fair_edges: Vec<Vec<usize>> = b.marked.clone();
    for (i, s) in pool.iter().enumerate() {
        if !biased.contains(&i) {
            fair_edges.push(s.clone());
        }
    }
    let fair_vertices: BTreeSet<usize> = fair_edges.iter().flatten().copied().collect();
    let fair_local: Vec<(usize, usize)> = if fair_edges.is_empty() {
        Vec::new()
    } else {
        let f = Hypergraph::unweighted(k - 1, n, fair_edges)?;
        let walk_seed = b.walk_seed();
        match two_color_balanced(&f, walk_seed, Some(guess_walk_budget(&f))) {
            Ok((side, _)) => f
                .active_vertices()
                .into_iter()
                .map(|v| (v, side.get(v).expect("active vertices are colored")))
                .collect(),
            Err(MincolorError::FlipBudget { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    };
    if biased_part.is_empty() {
        let mut local: Vec<Option<usize>> = vec![None; n];
        for &(v, c) in &fair_local {
            local[v] = Some(c);
        }
        if has_local_mono(&b.h1, &local) {
            return Ok(false);
        }
        if !fair_local.is_empty() {
            b.commit("closing-fair", &fair_local);
        }
        return Ok(true);
    }
    // Bias space over the leftover part, on top of the fixed fair coloring.
    let options = rule.guesses(k);
    let mut guess = vec![0usize; biased_part.len()];
    let base = 2;
    loop {
        let mut local: Vec<Option<usize>> = vec![None; n];
        for &(v, c) in &fair_local {
            local[v] = Some(c);
        }
        let mut ok = true;
        'sets: for (slot, &i) in biased_part.iter().enumerate() {
            let s = &pool[i];
            let g = guess[slot];
            let (set_color, nb_color) = match rule {
                BiasRule::Discrepancy => (Some(base + g), base + 1 - g),
                BiasRule::Rainbow => (None, base + g),
            };
            if let Some(c) = set_color {
                for &v in s {
                    if local[v].is_some_and(|prev| prev != c) {
                        ok = false;
                        break 'sets;
                    }
                    local[v] = Some(c);
                }
            }
            for u in b.h1.completion_neighborhood(s)? {
                if fair_vertices.contains(&u) {
                    // Reserved for the fair phase; a clash here means this
                    // split cannot work.
                    if local[u].is_some_and(|prev| prev != nb_color) {
                        ok = false;
                        break 'sets;
                    }
                    continue;
                }
                if local[u].is_some_and(|prev| prev != nb_color) {
                    ok = false;
                    break 'sets;
                }
                local[u] = Some(nb_color);
            }
        }
        if ok && !has_local_mono(&b.h1, &local) {
            let pairs: Vec<(usize, usize)> =
                (0..n).filter_map(|v| local[v].map(|c| (v, c))).collect();
            if !pairs.is_empty() {
                b.commit("closing-split", &pairs);
            }
            return Ok(true);
        }
        let mut pos = biased_part.len();
        let mut carried = true;
        while pos > 0 && carried {
            pos -= 1;
            guess[pos] += 1;
            carried = guess[pos] >= options;
            if carried {
                guess[pos] = 0;
            }
        }
        if carried {
            return Ok(false);
        }
    }
}

/// Degree reduction for (k-1)-rainbow colorable hypergraphs: the biased
/// skeleton with missing-color guesses. Uses at most (k-1) n/(c t) colors
/// and leaves residual degree at most C(n-1, k-2) t.
pub fn rc_degree_reduce(
    h: &Hypergraph,
    t: usize,
    c: f64,
    seed: u64,
) -> Result<PartialColoringResult, MincolorError> {
    let k = h.k();
    if k < 3 {
        return Err(MincolorError::BadParams(format!(
            "rainbow reduction needs k >= 3, got k = {k}"
        )));
    }
    if t < 1 || !(c >= 1.0) {
        return Err(MincolorError::BadParams(format!(
            "need t >= 1 and c >= 1, got t = {t}, c = {c}"
        )));
    }
    let bound_u = binomial((h.n().max(1) - 1) as u64, (k - 2) as u64).saturating_mul(t as u128);
    let degree_bound = usize::try_from(bound_u).unwrap_or(usize::MAX);
    biased_reduce(h, t, c, seed, degree_bound, BiasRule::Rainbow)
}

/// One accepted independent set in the bounded-degree loop.
#[derive(Debug, Clone, Copy)]
pub struct KmsPhase {
    pub n_remaining: usize,
    pub accepted_size: usize,
    pub retries: usize,
}

#[derive(Debug, Clone)]
pub struct BoundedDegreeOutcome {
    pub coloring: Coloring,
    pub colors_used: usize,
    pub phases: Vec<KmsPhase>,
    pub tau: f64,
    pub gamma: f64,
}

/// Colors a max-degree-t hypergraph from a feasible vector solution by
/// repeatedly extracting threshold independent sets: tau^2 = 2 ln t /
/// (k^2 - 1) and gamma = t^{-1/(k^2-1)}, accepting a set once it reaches
/// gamma n1 / 8 of the remaining vertices (the /8 absorbs the analysis
/// constants), with a 32 ln(n1)/gamma retry cap. Isolated vertices ride
/// along with the current set for free.
pub fn bounded_degree_color(
    h: &Hypergraph,
    kind: PromiseKind,
    v: &VectorSolution,
    t: usize,
    seed: u64,
) -> Result<BoundedDegreeOutcome, MincolorError> {
    if t < 1 {
        return Err(MincolorError::BadParams("need t >= 1".into()));
    }
    let report = check_feasible(h, kind, v, 1e-2)?;
    if !report.passes() {
        return Err(MincolorError::BadParams(format!(
            "vector solution violates the relaxation by {:.3e}",
            report.max_violation()
        )));
    }
    let k = h.k();
    let kk = (k * k - 1) as f64;
    let tau = (2.0 * (t as f64).ln() / kk).sqrt();
    let gamma = (t as f64).powf(-1.0 / kk);
    let n = h.n();
    let mut remaining: Vec<bool> = vec![true; n];
    let mut left = n;
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut colors_used = 0usize;
    let mut phases: Vec<KmsPhase> = Vec::new();
    let mut attempt_counter = 0u64;
    while left > 0 {
        let n1 = left;
        let ids: Vec<usize> = (0..n).filter(|&i| remaining[i]).collect();
        let live = h.induced(&ids);
        if live.m() == 0 {
            for &i in &ids {
                assignment[i] = Some(colors_used);
            }
            phases.push(KmsPhase {
                n_remaining: n1,
                accepted_size: n1,
                retries: 0,
            });
            colors_used += 1;
            break;
        }
        let isolated: Vec<usize> = ids.iter().copied().filter(|&i| live.degree(i) == 0).collect();
        let target = gamma * n1 as f64 / 8.0;
        let retry_cap = ((32.0 * (n1.max(2) as f64).ln() / gamma).ceil() as usize).max(1);
        let mut accepted: Option<(Vec<usize>, usize)> = None;
        let mut best = 0usize;
        for attempt in 0..retry_cap {
            let mut rng = substream_indexed(seed, "kms", attempt_counter);
            attempt_counter += 1;
            let r = gaussian_direction(v.dim(), &mut rng);
            let set: Vec<usize> = threshold_independent_set(&live, v, tau, &r)?
                .into_iter()
                .filter(|&i| remaining[i])
                .collect();
            best = best.max(set.len());
            if set.len() as f64 >= target {
                accepted = Some((set, attempt + 1));
                break;
            }
        }
        let Some((mut set, retries)) = accepted else {
            return Err(MincolorError::RetryCapExhausted {
                attempts: retry_cap,
                best,
                need: target.ceil() as usize,
            });
        };
        set.extend(isolated);
        set.sort_unstable();
        set.dedup();
        for &i in &set {
            assignment[i] = Some(colors_used);
            remaining[i] = false;
        }
        left -= set.len();
        phases.push(KmsPhase {
            n_remaining: n1,
            accepted_size: set.len(),
            retries,
        });
        colors_used += 1;
    }
    let coloring = Coloring::from_colors(colors_used.max(1), assignment);
    if !coloring.is_total() || !proper_on_colored(h, &coloring) {
        return Err(MincolorError::Improper(
            "bounded-degree loop produced an invalid coloring".into(),
        ));
    }
    Ok(BoundedDegreeOutcome {
        coloring,
        colors_used,
        phases,
        tau,
        gamma,
    })
}

/// Baseline: sequential greedy that gives each vertex the smallest color
/// absent from its entire neighborhood.
pub fn sequential_greedy(h: &Hypergraph) -> (Coloring, usize) {
    let n = h.n();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut used = 0usize;
    for v in 0..n {
        let taken: BTreeSet<usize> = h
            .neighbors(v)
            .into_iter()
            .filter_map(|u| colors[u])
            .collect();
        let c = (0..).find(|c| !taken.contains(c)).unwrap();
        colors[v] = Some(c);
        used = used.max(c + 1);
    }
    (Coloring::from_colors(used.max(1), colors), used.max(1))
}

#[derive(Debug, Clone)]
pub struct MinColorOutcome {
    pub coloring: Coloring,
    pub colors_used: usize,
    pub reduction: PartialColoringResult,
    pub residual_outcome: Option<BoundedDegreeOutcome>,
}

/// The full pipeline: promise-dispatched degree reduction, then the
/// relaxation is solved on the residual (reindexed to be compact) and the
/// bounded-degree loop colors it with a disjoint palette. An edgeless
/// residual takes one fresh color.
pub fn min_color(
    h: &Hypergraph,
    kind: PromiseKind,
    t: usize,
    c: f64,
    seed: u64,
) -> Result<MinColorOutcome, MincolorError> {
    let k = h.k();
    let reduction = match kind {
        PromiseKind::Strong(chi) if chi == k + 1 => sc_degree_reduce(h, t, c, seed)?,
        PromiseKind::Discrepancy(1) if k % 2 == 1 => ld_degree_reduce(h, t, c, seed, LdMode::Full)?,
        PromiseKind::Rainbow(chi) if chi + 1 == k => rc_degree_reduce(h, t, c, seed)?,
        other => {
            return Err(MincolorError::BadParams(format!(
                "no reduction for {} at arity {k}; supported: Strong(k+1), Discrepancy(1) odd k, Rainbow(k-1)",
                other.label()
            )))
        }
    };
    let uncolored = reduction.uncolored();
    let mut assignment = reduction.assignment.clone();
    let offset = reduction.colors_used;
    let mut total = offset;
    let mut residual_outcome = None;
    if !uncolored.is_empty() {
        if reduction.residual.m() == 0 {
            for &v in &uncolored {
                assignment[v] = Some(offset);
            }
            total += 1;
        } else {
            // Compact reindex so the solver and rounding work on a dense
            // vertex range.
            let back = uncolored.clone();
            let mut fwd: BTreeMap<usize, usize> = BTreeMap::new();
            for (new, &old) in back.iter().enumerate() {
                fwd.insert(old, new);
            }
            let edges: Vec<Vec<usize>> = reduction
                .residual
                .edges()
                .iter()
                .map(|e| e.iter().map(|v| fwd[v]).collect())
                .collect();
            let weights = reduction.residual.weights().to_vec();
            let compact = Hypergraph::new(k, back.len(), edges, weights)?;
            let opts = SolveOptions {
                eps: 1e-4,
                seed,
                ..Default::default()
            };
            let solution = match solve(&compact, kind, opts)? {
                SolveOutcome::Feasible { solution, .. } => solution,
                SolveOutcome::Infeasible { report, .. } => {
                    return Err(MincolorError::ResidualInfeasible {
                        max_violation: report.max_violation(),
                    })
                }
            };
            let t_res = compact.max_degree().max(1);
            let outcome = bounded_degree_color(&compact, kind, &solution, t_res, seed)?;
            for (new, &old) in back.iter().enumerate() {
                assignment[old] = Some(offset + outcome.coloring.get(new).expect("total coloring"));
            }
            total += outcome.colors_used;
            residual_outcome = Some(outcome);
        }
    }
    let coloring = Coloring::from_colors(total.max(1), assignment);
    if !coloring.is_total() || !proper_on_colored(h, &coloring) {
        return Err(MincolorError::Improper(
            "pipeline union failed the final recheck".into(),
        ));
    }
    Ok(MinColorOutcome {
        coloring,
        colors_used: total,
        reduction,
        residual_outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{discrepancy_of, verify_promise};
    use crate::forge::gen_planted;
    use crate::sdp::planted_solution;

    #[test]
    fn walk_two_colors_a_single_edge() {
        let h = Hypergraph::unweighted(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let (c, flips) = two_color_balanced(&h, 1, None).unwrap();
        assert!(proper_on_colored(&h, &c));
        assert!(flips < 100);
    }

    #[test]
    fn walk_succeeds_on_balanced_instances() {
        let mut successes = 0;
        for seed in 0..100 {
            let inst = gen_planted(PromiseKind::Discrepancy(0), 4, 40, 80, seed).unwrap();
            if two_color_balanced(&inst.hypergraph, seed, None).is_ok() {
                successes += 1;
            }
        }
        assert!(successes >= 99, "only {successes}/100 walks succeeded");
    }

    #[test]
    fn walk_reports_failure_on_uncolorable_core() {
        // The complete 3-uniform hypergraph on 5 vertices has no proper
        // 2-coloring: one class always has 3 vertices forming an edge.
        let edges: Vec<Vec<usize>> = combinations(&[0, 1, 2, 3, 4], 3);
        let h = Hypergraph::unweighted(3, 5, edges).unwrap();
        match two_color_balanced(&h, 5, Some(20_000)) {
            Err(MincolorError::FlipBudget { remaining_mono, .. }) => assert!(remaining_mono > 0),
            other => panic!("expected flip budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn sc_reduction_honors_all_three_postconditions() {
        let inst = gen_planted(PromiseKind::Strong(4), 3, 120, 700, 3).unwrap();
        let t = 4;
        let c = 2.0;
        let red = sc_degree_reduce(&inst.hypergraph, t, c, 3).unwrap();
        red.validate(&inst.hypergraph).unwrap();
        assert!(red.residual.max_degree() <= t);
        let n = 120f64;
        let k = 3f64;
        let bound = 3.0 * n * (k + 1.0) * k.ln() / ((t as f64).powf(1.0 / (k - 1.0)) * c * n.ln());
        assert!(
            (red.colors_used as f64) <= bound,
            "{} colors vs bound {bound}",
            red.colors_used
        );
        assert!(red.colors_used > 0, "dense instance must trigger phases");
    }

    #[test]
    fn sc_reduction_is_a_no_op_below_the_degree_target() {
        let inst = gen_planted(PromiseKind::Strong(4), 3, 30, 10, 7).unwrap();
        let t = 30;
        let red = sc_degree_reduce(&inst.hypergraph, t, 1.0, 7).unwrap();
        assert_eq!(red.colors_used, 0);
        assert_eq!(red.residual.m(), inst.hypergraph.m());
    }

    #[test]
    fn ld_warmup_handles_planted_instances() {
        let inst = gen_planted(PromiseKind::Discrepancy(1), 3, 120, 800, 11).unwrap();
        let red = ld_degree_reduce(&inst.hypergraph, 3, 2.0, 11, LdMode::Warmup).unwrap();
        red.validate(&inst.hypergraph).unwrap();
        let pairs = red.phases.iter().filter(|p| p.label == "pair").count();
        assert!(red.colors_used <= 2 * pairs + 2);
    }

    #[test]
    fn ld_warmup_marks_a_constructed_subset() {
        // S = {0,1} completes to {2,...,6}, which contains the edge
        // {2,3,4}; S must be marked, its edges dropped, and the final fair
        // pass must color S with both colors.
        let mut edges: Vec<Vec<usize>> = (2..7).map(|x| vec![0, 1, x]).collect();
        edges.push(vec![2, 3, 4]);
        let h = Hypergraph::unweighted(3, 7, edges).unwrap();
        let red = ld_degree_reduce(&h, 3, 2.0, 13, LdMode::Warmup).unwrap();
        assert_eq!(red.marked, vec![vec![0, 1]]);
        let c0 = red.assignment[0].unwrap();
        let c1 = red.assignment[1].unwrap();
        assert_ne!(c0, c1, "marked pair must be colored fairly");
        red.validate(&h).unwrap();
        // The witness confirms the marked set is balanced: 0 and 1 must
        // take opposite signs in any discrepancy-1 coloring.
        let mut w = Coloring::new(2, 7);
        w.set(0, 0);
        w.set(1, 1);
        w.set(2, 0);
        w.set(3, 1);
        w.set(4, 0);
        w.set(5, 0);
        w.set(6, 1);
        assert!(discrepancy_of(&h, &w).unwrap() <= 1);
    }

    #[test]
    fn ld_full_meets_the_theorem_bound() {
        let inst = gen_planted(PromiseKind::Discrepancy(1), 3, 120, 800, 17).unwrap();
        let t = 3;
        let c = 2.0;
        let red = ld_degree_reduce(&inst.hypergraph, t, c, 17, LdMode::Full).unwrap();
        red.validate(&inst.hypergraph).unwrap();
        let bound = 2.0 * 120.0 / (c * t as f64);
        assert!(
            (red.colors_used as f64) <= bound,
            "{} colors vs bound {bound}",
            red.colors_used
        );
    }

    #[test]
    fn ld_rejects_even_arity() {
        let inst = gen_planted(PromiseKind::Discrepancy(0), 4, 30, 40, 19).unwrap();
        assert!(matches!(
            ld_degree_reduce(&inst.hypergraph, 3, 2.0, 19, LdMode::Full),
            Err(MincolorError::BadParams(_))
        ));
    }

    #[test]
    fn rc_reduction_meets_the_theorem_bound() {
        let inst = gen_planted(PromiseKind::Rainbow(3), 4, 120, 800, 23).unwrap();
        let t = 3;
        let c = 2.0;
        let red = rc_degree_reduce(&inst.hypergraph, t, c, 23).unwrap();
        red.validate(&inst.hypergraph).unwrap();
        let bound = (4.0 - 1.0) * 120.0 / (c * t as f64);
        assert!(
            (red.colors_used as f64) <= bound,
            "{} colors vs bound {bound}",
            red.colors_used
        );
    }

    #[test]
    fn bounded_degree_colors_edgeless_with_one_color() {
        let h = Hypergraph::unweighted(3, 12, vec![]).unwrap();
        let v = VectorSolution::from_rows(1, vec![vec![1.0]; 12]);
        let out = bounded_degree_color(&h, PromiseKind::Discrepancy(1), &v, 5, 0).unwrap();
        assert_eq!(out.colors_used, 1);
    }

    #[test]
    fn bounded_degree_respects_color_and_phase_caps() {
        let inst = gen_planted(PromiseKind::Strong(4), 3, 200, 200, 29).unwrap();
        let v = planted_solution(&inst.hypergraph, inst.kind, &inst.witness).unwrap();
        let t = inst.hypergraph.max_degree().max(1);
        let out = bounded_degree_color(&inst.hypergraph, inst.kind, &v, t, 29).unwrap();
        let n = 200f64;
        let color_cap = 4.0 * (t as f64).powf(1.0 / 8.0) * n.ln();
        assert!(
            (out.colors_used as f64) <= color_cap,
            "{} colors vs cap {color_cap}",
            out.colors_used
        );
        let phase_cap = 32.0 * n.ln() / out.gamma;
        assert!((out.phases.len() as f64) <= phase_cap);
        for w in out.phases.windows(2) {
            assert!(w[1].n_remaining < w[0].n_remaining);
        }
    }

    #[test]
    fn bounded_degree_on_a_matching_uses_few_colors() {
        // Disjoint edges, discrepancy-1 witness +,+,- per edge, one
        // dimensional vectors.
        let n = 60;
        let edges: Vec<Vec<usize>> = (0..n / 3).map(|i| vec![3 * i, 3 * i + 1, 3 * i + 2]).collect();
        let h = Hypergraph::unweighted(3, n, edges).unwrap();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![if i % 3 == 2 { -1.0 } else { 1.0 }])
            .collect();
        let v = VectorSolution::from_rows(1, rows);
        let out = bounded_degree_color(&h, PromiseKind::Discrepancy(1), &v, 1, 31).unwrap();
        assert!(
            (out.colors_used as f64) <= 4.0 * (n as f64).ln() + 2.0,
            "{} colors",
            out.colors_used
        );
    }

    #[test]
    fn greedy_baseline_is_proper() {
        let inst = gen_planted(PromiseKind::Strong(4), 3, 80, 400, 37).unwrap();
        let (c, used) = sequential_greedy(&inst.hypergraph);
        assert!(c.is_total());
        assert!(proper_on_colored(&inst.hypergraph, &c));
        assert!(used >= 1);
    }

    #[test]
    fn min_color_handles_edgeless_input() {
        let h = Hypergraph::unweighted(3, 9, vec![]).unwrap();
        let out = min_color(&h, PromiseKind::Strong(4), 4, 2.0, 0).unwrap();
        assert_eq!(out.colors_used, 1);
        assert!(out.coloring.is_total());
    }

    #[test]
    fn min_color_runs_the_strong_pipeline_end_to_end() {
        let inst = gen_planted(PromiseKind::Strong(4), 3, 80, 500, 41).unwrap();
        let out = min_color(&inst.hypergraph, inst.kind, 4, 2.0, 41).unwrap();
        assert!(out.coloring.is_total());
        assert!(proper_on_colored(&inst.hypergraph, &out.coloring));
        assert_eq!(out.coloring.distinct_colors(), out.colors_used);
        assert!(out.colors_used < 80);
    }

    #[test]
    fn min_color_runs_discrepancy_and_rainbow_pipelines() {
        let inst = gen_planted(PromiseKind::Discrepancy(1), 3, 60, 300, 43).unwrap();
        let out = min_color(&inst.hypergraph, inst.kind, 3, 2.0, 43).unwrap();
        assert!(proper_on_colored(&inst.hypergraph, &out.coloring));
        assert!(out.coloring.is_total());

        let inst = gen_planted(PromiseKind::Rainbow(3), 4, 60, 300, 47).unwrap();
        let out = min_color(&inst.hypergraph, inst.kind, 3, 2.0, 47).unwrap();
        assert!(proper_on_colored(&inst.hypergraph, &out.coloring));
        assert!(out.coloring.is_total());
    }

    #[test]
    fn min_color_rejects_mismatched_promises() {
        let inst = gen_planted(PromiseKind::Strong(5), 3, 30, 60, 53).unwrap();
        assert!(matches!(
            min_color(&inst.hypergraph, PromiseKind::Strong(5), 4, 2.0, 53),
            Err(MincolorError::BadParams(_))
        ));
    }

    #[test]
    fn reductions_keep_promises_intact_on_planted_witnesses() {
        // Degree reduction never deletes a vertex from the instance, so the
        // planted witness still certifies the promise on the residual.
        let inst = gen_planted(PromiseKind::Strong(4), 3, 100, 600, 59).unwrap();
        let red = sc_degree_reduce(&inst.hypergraph, 4, 2.0, 59).unwrap();
        let check = verify_promise(&red.residual, &inst.witness, inst.kind).unwrap();
        assert!(check.ok);
    }
}

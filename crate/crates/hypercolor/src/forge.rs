//! Instance generation: planted promise instances, the Max-Cut gadget,
//! cloud composition, and the pairwise-independent rainbow distribution.

use crate::coloring::{Coloring, ColoringError, PromiseKind};
use crate::hypergraph::{Hypergraph, HypergraphError};
use crate::stream::substream;
use crate::util::binomial;
use itertools::Itertools;
use num_rational::Ratio;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("{0}")]
    BadParams(String),
    #[error("color class {class} has {size} vertices but edges may need {need}")]
    ClassTooSmall {
        class: usize,
        size: usize,
        need: usize,
    },
    #[error("discrepancy bound {ell} must match the parity of k = {k}")]
    ParityMismatch { k: usize, ell: usize },
    #[error("edge size {0} must be odd for the cut gadget")]
    OddArityRequired(usize),
    #[error("k = {0} must be a perfect square for the rainbow distribution")]
    NotPerfectSquare(usize),
    #[error("enumeration size {total} exceeds cap {cap}")]
    EnumerationTooLarge { total: u128, cap: u128 },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Simple undirected graph with a canonical edge list: each pair stored
/// low-high, list sorted, self-loops rejected, parallel edges kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, ForgeError> {
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(ForgeError::BadParams(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(ForgeError::BadParams(format!(
                    "edge ({u},{v}) outside 0..{n}"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        Ok(Self { n, edges: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of edges cut by a total 2-coloring.
    pub fn cut_value(&self, c: &Coloring) -> Result<usize, ForgeError> {
        if c.palette() != 2 {
            return Err(ForgeError::BadParams(format!(
                "cut needs a 2-coloring, got palette {}",
                c.palette()
            )));
        }
        let mut cut = 0;
        for &(u, v) in &self.edges {
            let (a, b) = (c.get(u), c.get(v));
            if a.is_none() || b.is_none() {
                return Err(ForgeError::Coloring(ColoringError::IncompleteColoring(
                    if a.is_none() { u } else { v },
                )));
            }
            if a != b {
                cut += 1;
            }
        }
        Ok(cut)
    }
}

/// Uniform simple graph with `m` distinct edges.
pub fn random_graph(n: usize, m: usize, seed: u64) -> Result<Graph, ForgeError> {
    let max_edges = n * n.saturating_sub(1) / 2;
    if m > max_edges {
        return Err(ForgeError::BadParams(format!(
            "{m} edges requested, only {max_edges} possible on {n} vertices"
        )));
    }
    let mut rng = substream(seed, "random-graph");
    let picks = index::sample(&mut rng, max_edges, m).into_vec();
    let edges = picks
        .into_iter()
        .map(|mut idx| {
            // Unrank idx into the pair (u, v), u < v.
            let mut u = 0;
            loop {
                let row = n - 1 - u;
                if idx < row {
                    return (u, u + 1 + idx);
                }
                idx -= row;
                u += 1;
            }
        })
        .collect();
    Graph::new(n, edges)
}

/// A generated instance together with the coloring it was planted around.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub hypergraph: Hypergraph,
    pub witness: Coloring,
    pub kind: PromiseKind,
    pub seed: u64,
}

/// Plants a witness coloring (random near-equal color classes) and samples
/// `m` edges i.i.d. consistent with the promise.
///
/// Per-edge color counts: Discrepancy draws the class-0 count uniformly from
/// the allowed imbalance range, Rainbow draws a uniform composition of k into
/// chi positive parts, Strong picks k distinct colors. Vertices are then drawn
/// without replacement inside each class, so edges are valid by construction.
pub fn gen_planted(
    kind: PromiseKind,
    k: usize,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<PlantedInstance, ForgeError> {
    kind.check_arity(k)?;
    let chi = kind.palette();
    if n < chi {
        return Err(ForgeError::BadParams(format!(
            "n = {n} cannot host {chi} nonempty color classes"
        )));
    }
    if let PromiseKind::Discrepancy(l) = kind {
        if l % 2 != k % 2 {
            return Err(ForgeError::ParityMismatch { k, ell: l });
        }
    }
    // Largest number of vertices one class may need on a single edge.
    let per_class_need = match kind {
        PromiseKind::Discrepancy(l) => ((k + l.min(k)) / 2).min(k),
        PromiseKind::Rainbow(chi) => k - chi + 1,
        PromiseKind::Strong(_) => 1,
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, "witness"));
    let base = n / chi;
    let rem = n % chi;
    let mut witness = Coloring::new(chi, n);
    let mut classes: Vec<Vec<usize>> = Vec::with_capacity(chi);
    let mut cursor = 0;
    for c in 0..chi {
        let size = base + usize::from(c < rem);
        if size < per_class_need {
            return Err(ForgeError::ClassTooSmall {
                class: c,
                size,
                need: per_class_need,
            });
        }
        let members: Vec<usize> = order[cursor..cursor + size].to_vec();
        cursor += size;
        for &v in &members {
            witness.set(v, c);
        }
        classes.push(members);
    }

    let mut rng = substream(seed, "edges");
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let counts: Vec<usize> = match kind {
            PromiseKind::Discrepancy(l) => {
                let lo = if l >= k { 0 } else { (k - l) / 2 };
                let hi = ((k + l) / 2).min(k);
                let a = rng.gen_range(lo..=hi);
                vec![a, k - a]
            }
            PromiseKind::Rainbow(chi) => {
                // Uniform composition of k into chi positive parts via a
                // uniform divider set.
                let mut cuts = index::sample(&mut rng, k - 1, chi - 1).into_vec();
                cuts.sort_unstable();
                let mut parts = Vec::with_capacity(chi);
                let mut prev = 0;
                for &c in &cuts {
                    parts.push(c + 1 - prev);
                    prev = c + 1;
                }
                parts.push(k - prev);
                parts
            }
            PromiseKind::Strong(chi) => {
                let chosen = index::sample(&mut rng, chi, k).into_vec();
                let mut parts = vec![0; chi];
                for c in chosen {
                    parts[c] = 1;
                }
                parts
            }
        };
        let mut edge = Vec::with_capacity(k);
        for (c, &cnt) in counts.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            for idx in index::sample(&mut rng, classes[c].len(), cnt).into_vec() {
                edge.push(classes[c][idx]);
            }
        }
        edges.push(edge);
    }
    let hypergraph = Hypergraph::unweighted(k, n, edges)?;
    Ok(PlantedInstance {
        hypergraph,
        witness,
        kind,
        seed,
    })
}

/// Layout of vertex clouds: original vertex `v` becomes the contiguous block
/// `v*cloud_size .. (v+1)*cloud_size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloudMap {
    pub n_original: usize,
    pub cloud_size: usize,
}

impl CloudMap {
    pub fn cloud(&self, v: usize) -> std::ops::Range<usize> {
        v * self.cloud_size..(v + 1) * self.cloud_size
    }

    pub fn original(&self, vertex: usize) -> usize {
        vertex / self.cloud_size
    }

    pub fn n_total(&self) -> usize {
        self.n_original * self.cloud_size
    }

    /// Copies each original vertex's color to its whole cloud.
    pub fn lift_cloud_constant(&self, base: &Coloring) -> Coloring {
        let mut out = Coloring::new(base.palette(), self.n_total());
        for v in 0..self.n_original {
            if let Some(c) = base.get(v) {
                for w in self.cloud(v) {
                    out.set(w, c);
                }
            }
        }
        out
    }
}

/// A gadget or composed instance plus the cloud layout needed to decode.
#[derive(Debug, Clone)]
pub struct CloudedInstance {
    pub hypergraph: Hypergraph,
    pub clouds: CloudMap,
}

/// Encodes Max-Cut into low-discrepancy hypergraph coloring.
///
/// Each graph vertex becomes a k-cloud (k odd). Each graph edge (u, v) spawns
/// every hyperedge U + W with U inside u's cloud, W inside v's cloud and
/// |U| + |W| = k, ||U| - |W|| = 1; all 2*C(k,t)*C(k,t+1) of them (t = (k-1)/2)
/// share the edge's unit of weight. A cut edge colored cloud-constantly makes
/// every spawned hyperedge imbalance exactly 1; an uncut pair of clouds makes
/// at least one spawned hyperedge monochromatic under any coloring that
/// decodes to it.
pub fn maxcut_gadget(g: &Graph, k: usize) -> Result<CloudedInstance, ForgeError> {
    if k < 3 || k % 2 == 0 {
        return Err(ForgeError::OddArityRequired(k));
    }
    let half_k = (k - 1) / 2;
    let per_edge = 2 * binomial(k as u64, half_k as u64) * binomial(k as u64, half_k as u64 + 1);
    let weight = 1.0 / per_edge as f64;
    let clouds = CloudMap {
        n_original: g.n(),
        cloud_size: k,
    };
    let mut edges = Vec::new();
    for &(u, v) in g.edges() {
        let cu: Vec<usize> = clouds.cloud(u).collect();
        let cv: Vec<usize> = clouds.cloud(v).collect();
        for (a, b) in [(half_k, half_k + 1), (half_k + 1, half_k)] {
            for us in cu.iter().copied().combinations(a) {
                for ws in cv.iter().copied().combinations(b) {
                    let mut e = us.clone();
                    e.extend(&ws);
                    edges.push(e);
                }
            }
        }
    }
    let weights = vec![weight; edges.len()];
    let hypergraph = Hypergraph::new(k, clouds.n_total(), edges, weights)?;
    Ok(CloudedInstance { hypergraph, clouds })
}

/// Majority color inside each cloud (cloud size must be odd and fully
/// colored by a 2-coloring).
pub fn majority_decode(c: &Coloring, clouds: &CloudMap) -> Result<Coloring, ForgeError> {
    if c.palette() != 2 {
        return Err(ForgeError::BadParams(format!(
            "majority decode needs a 2-coloring, got palette {}",
            c.palette()
        )));
    }
    if c.n() != clouds.n_total() {
        return Err(ForgeError::BadParams(format!(
            "coloring covers {} vertices, clouds cover {}",
            c.n(),
            clouds.n_total()
        )));
    }
    if clouds.cloud_size % 2 == 0 {
        return Err(ForgeError::BadParams(
            "cloud size must be odd for majority decode".into(),
        ));
    }
    let mut out = Coloring::new(2, clouds.n_original);
    for v in 0..clouds.n_original {
        let mut ones = 0;
        for w in clouds.cloud(v) {
            match c.get(w) {
                Some(1) => ones += 1,
                Some(_) => {}
                None => {
                    return Err(ForgeError::Coloring(ColoringError::IncompleteColoring(w)))
                }
            }
        }
        out.set(v, usize::from(2 * ones > clouds.cloud_size));
    }
    Ok(out)
}

/// How cloud composition materializes the per-edge hyperedge family.
#[derive(Debug, Clone, Copy)]
pub enum ComposeMode {
    /// All C(2s-1, s)^r hyperedges per edge; errors beyond `max_per_edge`.
    Exact { max_per_edge: u128 },
    /// `per_edge` hyperedges drawn uniformly (with replacement) per edge.
    Sampled { per_edge: usize, seed: u64 },
}

/// Turns an r-uniform instance into an (r*s)-uniform one: vertices become
/// (2s-1)-clouds and each r-edge spawns hyperedges picking s vertices from
/// every incident cloud. A discrepancy-w two-coloring lifts cloud-constantly
/// to discrepancy s*w, and a monochromatic decoded edge forces at least one
/// monochromatic spawned hyperedge (majority classes hold >= s vertices).
pub fn cloud_compose(
    h: &Hypergraph,
    s: usize,
    mode: ComposeMode,
) -> Result<CloudedInstance, ForgeError> {
    if s < 1 {
        return Err(ForgeError::BadParams("s must be at least 1".into()));
    }
    let r = h.k();
    let cloud_size = 2 * s - 1;
    let clouds = CloudMap {
        n_original: h.n(),
        cloud_size,
    };
    let per_cloud = binomial(cloud_size as u64, s as u64);
    let per_edge_total = per_cloud.pow(r as u32);
    let mut edges = Vec::new();
    match mode {
        ComposeMode::Exact { max_per_edge } => {
            if per_edge_total > max_per_edge {
                return Err(ForgeError::EnumerationTooLarge {
                    total: per_edge_total,
                    cap: max_per_edge,
                });
            }
            for e in h.edges() {
                let choice_lists: Vec<Vec<Vec<usize>>> = e
                    .iter()
                    .map(|&v| {
                        clouds
                            .cloud(v)
                            .combinations(s)
                            .collect()
                    })
                    .collect();
                for combo in choice_lists.iter().multi_cartesian_product() {
                    let mut edge = Vec::with_capacity(r * s);
                    for part in combo {
                        edge.extend(part.iter().copied());
                    }
                    edges.push(edge);
                }
            }
        }
        ComposeMode::Sampled { per_edge, seed } => {
            let mut rng = substream(seed, "cloud-compose");
            for e in h.edges() {
                for _ in 0..per_edge {
                    let mut edge = Vec::with_capacity(r * s);
                    for &v in e {
                        let start = v * cloud_size;
                        for idx in index::sample(&mut rng, cloud_size, s).into_vec() {
                            edge.push(start + idx);
                        }
                    }
                    edges.push(edge);
                }
            }
        }
    }
    let hypergraph = Hypergraph::unweighted(r * s, clouds.n_total(), edges)?;
    Ok(CloudedInstance { hypergraph, clouds })
}

fn exact_sqrt(k: usize) -> Option<usize> {
    let r = (k as f64).sqrt().round() as usize;
    (r * r == k).then_some(r)
}

/// One draw from the balanced pairwise-independent distribution on rainbow
/// strings over [chi]^k, chi = k - sqrt(k): a uniform chi-subset of positions
/// gets a uniform permutation of all chi colors, every other position gets one
/// shared uniform filler color.
pub fn sample_pairwise_rainbow(k: usize, rng: &mut impl Rng) -> Result<Vec<usize>, ForgeError> {
    let root = exact_sqrt(k).ok_or(ForgeError::NotPerfectSquare(k))?;
    let chi = k - root;
    let mut support = index::sample(rng, k, chi).into_vec();
    support.sort_unstable();
    let mut perm: Vec<usize> = (0..chi).collect();
    perm.shuffle(rng);
    let filler = rng.gen_range(0..chi);
    let mut x = vec![filler; k];
    for (j, &pos) in support.iter().enumerate() {
        x[pos] = perm[j];
    }
    Ok(x)
}

/// Exact Pr[x_i = a and x_j = b] under the distribution of
/// [`sample_pairwise_rainbow`], by enumerating every (support, permutation,
/// filler) outcome. Errors if the outcome count exceeds `cap`.
pub fn pairwise_marginal_exact(
    k: usize,
    i: usize,
    j: usize,
    a: usize,
    b: usize,
    cap: u128,
) -> Result<Ratio<u64>, ForgeError> {
    let root = exact_sqrt(k).ok_or(ForgeError::NotPerfectSquare(k))?;
    let chi = k - root;
    if i >= k || j >= k || i == j {
        return Err(ForgeError::BadParams(format!(
            "need distinct positions below {k}, got {i}, {j}"
        )));
    }
    if a >= chi || b >= chi {
        return Err(ForgeError::BadParams(format!(
            "colors must be below chi = {chi}"
        )));
    }
    let factorial: u128 = (1..=chi as u128).product();
    let total = binomial(k as u64, chi as u64) * factorial * chi as u128;
    if total > cap {
        return Err(ForgeError::EnumerationTooLarge { total, cap });
    }
    let mut favorable: u128 = 0;
    let positions: Vec<usize> = (0..k).collect();
    for support in positions.iter().copied().combinations(chi) {
        let pi = support.binary_search(&i).ok();
        let pj = support.binary_search(&j).ok();
        for perm in (0..chi).permutations(chi) {
            for filler in 0..chi {
                let xi = pi.map_or(filler, |p| perm[p]);
                let xj = pj.map_or(filler, |p| perm[p]);
                if xi == a && xj == b {
                    favorable += 1;
                }
            }
        }
    }
    Ok(Ratio::new(favorable as u64, total as u64))
}

/// One draw of the anticorrelated block distribution: `q` blocks of two
/// strings over {1,2}^d. A uniformly chosen special block gets two independent
/// uniform strings; every other block gets, per coordinate, a uniform
/// permutation of (1, 2). Within a non-special block the two strings disagree
/// everywhere, which drives the pair correlation to -(q-1)/q.
pub fn sample_anticorrelated_blocks(
    q: usize,
    d: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(Vec<u8>, Vec<u8>)>, ForgeError> {
    if q < 1 || d < 1 {
        return Err(ForgeError::BadParams(
            "need at least one block and one coordinate".into(),
        ));
    }
    let special = rng.gen_range(0..q);
    let mut out = Vec::with_capacity(q);
    for block in 0..q {
        let mut x = Vec::with_capacity(d);
        let mut y = Vec::with_capacity(d);
        for _ in 0..d {
            if block == special {
                x.push(rng.gen_range(1..=2u8));
                y.push(rng.gen_range(1..=2u8));
            } else {
                let flip = rng.gen_bool(0.5);
                x.push(if flip { 1 } else { 2 });
                y.push(if flip { 2 } else { 1 });
            }
        }
        out.push((x, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{discrepancy_of, mono_fraction, verify_promise};

    #[test]
    fn planted_instances_verify_for_all_kinds() {
        let cases = [
            (PromiseKind::Discrepancy(1), 3),
            (PromiseKind::Discrepancy(0), 4),
            (PromiseKind::Rainbow(2), 3),
            (PromiseKind::Rainbow(3), 4),
            (PromiseKind::Strong(4), 3),
            (PromiseKind::Strong(6), 5),
        ];
        for (kind, k) in cases {
            for seed in 0..100 {
                let inst = gen_planted(kind, k, 40, 80, seed).unwrap();
                let chk = verify_promise(&inst.hypergraph, &inst.witness, kind).unwrap();
                assert!(chk.ok, "{kind:?} seed {seed}: {:?}", chk.violations);
                assert_eq!(inst.hypergraph.m(), 80);
            }
        }
    }

    #[test]
    fn planted_strong_edges_have_distinct_witness_colors() {
        let inst = gen_planted(PromiseKind::Strong(5), 4, 30, 50, 9).unwrap();
        for e in inst.hypergraph.edges() {
            let mut cs: Vec<usize> = e.iter().map(|&v| inst.witness.get(v).unwrap()).collect();
            cs.sort_unstable();
            cs.dedup();
            assert_eq!(cs.len(), 4);
        }
    }

    #[test]
    fn planted_discrepancy_splits_are_tight() {
        let inst = gen_planted(PromiseKind::Discrepancy(1), 3, 30, 60, 4).unwrap();
        for e in inst.hypergraph.edges() {
            let ones = e
                .iter()
                .filter(|&&v| inst.witness.get(v) == Some(1))
                .count();
            assert!(ones == 1 || ones == 2);
        }
        assert_eq!(discrepancy_of(&inst.hypergraph, &inst.witness).unwrap(), 1);
    }

    #[test]
    fn planted_generation_is_seed_deterministic() {
        let a = gen_planted(PromiseKind::Strong(4), 3, 25, 40, 11).unwrap();
        let b = gen_planted(PromiseKind::Strong(4), 3, 25, 40, 11).unwrap();
        assert_eq!(a.hypergraph, b.hypergraph);
        assert_eq!(a.witness, b.witness);
        let c = gen_planted(PromiseKind::Strong(4), 3, 25, 40, 12).unwrap();
        assert_ne!(a.hypergraph, c.hypergraph);
    }

    #[test]
    fn planted_rejects_bad_params() {
        assert!(matches!(
            gen_planted(PromiseKind::Discrepancy(0), 3, 30, 10, 0),
            Err(ForgeError::ParityMismatch { .. })
        ));
        assert!(matches!(
            gen_planted(PromiseKind::Strong(2), 3, 30, 10, 0),
            Err(ForgeError::Coloring(_))
        ));
        // Two classes of ~3 vertices cannot host 5 same-class vertices.
        assert!(matches!(
            gen_planted(PromiseKind::Discrepancy(5), 5, 6, 10, 0),
            Err(ForgeError::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn gadget_counts_and_weights_at_k3() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let gadget = maxcut_gadget(&g, 3).unwrap();
        assert_eq!(gadget.hypergraph.m(), 18);
        assert_eq!(gadget.hypergraph.n(), 6);
        for &w in gadget.hypergraph.weights() {
            assert!((w - 1.0 / 18.0).abs() < 1e-15);
        }
        assert!((gadget.hypergraph.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gadget_total_weight_matches_edge_count() {
        let g = random_graph(8, 11, 3).unwrap();
        let gadget = maxcut_gadget(&g, 3).unwrap();
        assert!((gadget.hypergraph.total_weight() - 11.0).abs() < 1e-9);
        assert!(maxcut_gadget(&g, 4).is_err());
    }

    #[test]
    fn cut_edges_lift_to_unit_imbalance() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let gadget = maxcut_gadget(&g, 3).unwrap();
        let mut base = Coloring::new(2, 2);
        base.set(0, 0);
        base.set(1, 1);
        let lifted = gadget.clouds.lift_cloud_constant(&base);
        assert_eq!(discrepancy_of(&gadget.hypergraph, &lifted).unwrap(), 1);
        assert_eq!(mono_fraction(&gadget.hypergraph, &lifted).unwrap(), 0.0);
        // Uncut edge: every spawned hyperedge is monochromatic.
        base.set(1, 0);
        let flat = gadget.clouds.lift_cloud_constant(&base);
        assert_eq!(mono_fraction(&gadget.hypergraph, &flat).unwrap(), 1.0);
    }

    #[test]
    fn majority_decode_recovers_cloud_majorities() {
        let clouds = CloudMap {
            n_original: 2,
            cloud_size: 3,
        };
        let c = Coloring::from_colors(
            2,
            vec![Some(0), Some(0), Some(1), Some(1), Some(1), Some(1)],
        );
        let decoded = majority_decode(&c, &clouds).unwrap();
        assert_eq!(decoded.get(0), Some(0));
        assert_eq!(decoded.get(1), Some(1));
    }

    #[test]
    fn encode_decode_round_trip_preserves_cut() {
        for seed in 0..5 {
            let g = random_graph(10, 15, seed).unwrap();
            let mut base = Coloring::new(2, g.n());
            let mut rng = substream(seed, "cut");
            for v in 0..g.n() {
                base.set(v, rng.gen_range(0..2));
            }
            let gadget = maxcut_gadget(&g, 3).unwrap();
            let lifted = gadget.clouds.lift_cloud_constant(&base);
            let decoded = majority_decode(&lifted, &gadget.clouds).unwrap();
            assert_eq!(decoded, base);
        }
    }

    #[test]
    fn decode_cut_dominates_mono_weight_bound() {
        // For any coloring of the gadget: cut >= (1 - mono_fraction * N) * m.
        let g = random_graph(7, 10, 2).unwrap();
        let gadget = maxcut_gadget(&g, 3).unwrap();
        let per_edge = 18.0;
        for seed in 0..20 {
            let mut rng = substream(seed, "noise");
            let mut c = Coloring::new(2, gadget.hypergraph.n());
            for v in 0..gadget.hypergraph.n() {
                c.set(v, rng.gen_range(0..2));
            }
            let beta = mono_fraction(&gadget.hypergraph, &c).unwrap();
            let decoded = majority_decode(&c, &gadget.clouds).unwrap();
            let cut = g.cut_value(&decoded).unwrap() as f64;
            let m = g.edges().len() as f64;
            assert!(
                cut >= (1.0 - beta * per_edge) * m - 1e-9,
                "cut {cut} below bound {}",
                (1.0 - beta * per_edge) * m
            );
        }
    }

    #[test]
    fn compose_unary_counts() {
        let h = Hypergraph::unweighted(2, 2, vec![vec![0, 1]]).unwrap();
        let composed = cloud_compose(
            &h,
            2,
            ComposeMode::Exact {
                max_per_edge: 1_000_000,
            },
        )
        .unwrap();
        // C(3,2)^2 = 9 hyperedges of size 4 on two 3-clouds.
        assert_eq!(composed.hypergraph.m(), 9);
        assert_eq!(composed.hypergraph.k(), 4);
        assert_eq!(composed.hypergraph.n(), 6);
        assert!(cloud_compose(&h, 2, ComposeMode::Exact { max_per_edge: 8 }).is_err());
    }

    #[test]
    fn compose_lifts_witness_discrepancy() {
        let inst = gen_planted(PromiseKind::Discrepancy(0), 2, 12, 20, 5).unwrap();
        let s = 2;
        let composed = cloud_compose(
            &inst.hypergraph,
            s,
            ComposeMode::Exact {
                max_per_edge: 1_000_000,
            },
        )
        .unwrap();
        let lifted = composed.clouds.lift_cloud_constant(&inst.witness);
        // Discrepancy-0 base: every composed edge splits s vs s.
        assert!(discrepancy_of(&composed.hypergraph, &lifted).unwrap() <= 2 * s);
        assert_eq!(discrepancy_of(&composed.hypergraph, &lifted).unwrap(), 0);
    }

    #[test]
    fn compose_decode_loses_at_most_spawn_factor() {
        let h = Hypergraph::unweighted(2, 6, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![0, 2]])
            .unwrap();
        let composed = cloud_compose(
            &h,
            2,
            ComposeMode::Exact {
                max_per_edge: 1_000_000,
            },
        )
        .unwrap();
        let spawn = 9.0;
        for seed in 0..20 {
            let mut rng = substream(seed, "compose-noise");
            let mut c = Coloring::new(2, composed.hypergraph.n());
            for v in 0..composed.hypergraph.n() {
                c.set(v, rng.gen_range(0..2));
            }
            let alpha = mono_fraction(&composed.hypergraph, &c).unwrap();
            let decoded = majority_decode(&c, &composed.clouds).unwrap();
            let decoded_mono = mono_fraction(&h, &decoded).unwrap();
            assert!(
                decoded_mono <= spawn * alpha + 1e-9,
                "decoded {decoded_mono} vs composed {alpha}"
            );
        }
    }

    #[test]
    fn compose_sampled_mode_is_deterministic() {
        let h = Hypergraph::unweighted(2, 4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let a = cloud_compose(&h, 3, ComposeMode::Sampled { per_edge: 5, seed: 1 }).unwrap();
        let b = cloud_compose(&h, 3, ComposeMode::Sampled { per_edge: 5, seed: 1 }).unwrap();
        assert_eq!(a.hypergraph, b.hypergraph);
        assert_eq!(a.hypergraph.m(), 10);
        assert_eq!(a.hypergraph.k(), 6);
    }

    #[test]
    fn rainbow_draws_cover_all_colors() {
        let mut rng = substream(3, "mu");
        for _ in 0..200 {
            let x = sample_pairwise_rainbow(4, &mut rng).unwrap();
            let mut seen = [false; 2];
            for &c in &x {
                seen[c] = true;
            }
            assert!(seen[0] && seen[1]);
        }
        assert!(sample_pairwise_rainbow(5, &mut rng).is_err());
    }

    #[test]
    fn pairwise_marginals_are_exactly_uniform_k4() {
        // chi = 2: every pair cell has probability exactly 1/4.
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                for a in 0..2 {
                    for b in 0..2 {
                        let p = pairwise_marginal_exact(4, i, j, a, b, 1 << 20).unwrap();
                        assert_eq!(p, Ratio::new(1, 4), "cell ({i},{j},{a},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn pairwise_marginal_k9_sample_cell() {
        // chi = 6; by pairwise independence every cell is exactly 1/36,
        // including equal colors at distinct positions.
        let p = pairwise_marginal_exact(9, 0, 4, 1, 1, 1 << 24).unwrap();
        assert_eq!(p, Ratio::new(1, 36));
        let q = pairwise_marginal_exact(9, 2, 7, 3, 0, 1 << 24).unwrap();
        assert_eq!(q, Ratio::new(1, 36));
    }

    #[test]
    fn single_marginal_sums_to_uniform() {
        let mut acc = Ratio::new(0u64, 1u64);
        for b in 0..6 {
            acc += pairwise_marginal_exact(9, 0, 4, 1, b, 1 << 24).unwrap();
        }
        assert_eq!(acc, Ratio::new(1, 6));
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        assert!(matches!(
            pairwise_marginal_exact(16, 0, 1, 0, 0, 10_000_000),
            Err(ForgeError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn sampled_pair_frequencies_match_exact_marginal() {
        let k = 4;
        let samples = 100_000;
        let mut rng = substream(17, "mu-freq");
        let mut counts = [[0u64; 2]; 2];
        for _ in 0..samples {
            let x = sample_pairwise_rainbow(k, &mut rng).unwrap();
            counts[x[0]][x[2]] += 1;
        }
        for a in 0..2 {
            for b in 0..2 {
                let expect = 0.25 * samples as f64;
                let sigma = (samples as f64 * 0.25 * 0.75).sqrt();
                let got = counts[a][b] as f64;
                assert!(
                    (got - expect).abs() <= 5.0 * sigma,
                    "cell ({a},{b}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn anticorrelated_blocks_structure() {
        let mut rng = substream(5, "blocks");
        for _ in 0..50 {
            let draw = sample_anticorrelated_blocks(4, 6, &mut rng).unwrap();
            assert_eq!(draw.len(), 4);
            let mut disagree_everywhere = 0;
            for (x, y) in &draw {
                assert!(x.iter().all(|&b| b == 1 || b == 2));
                if x.iter().zip(y).all(|(a, b)| a != b) {
                    disagree_everywhere += 1;
                }
            }
            // Non-special blocks disagree in every coordinate.
            assert!(disagree_everywhere >= 3);
        }
    }

    #[test]
    fn anticorrelated_block_pair_correlation() {
        let q = 4;
        let samples = 40_000;
        let mut rng = substream(6, "blocks-corr");
        let mut total = 0.0;
        for _ in 0..samples {
            let draw = sample_anticorrelated_blocks(q, 3, &mut rng).unwrap();
            let mut per_draw = 0.0;
            for (x, y) in &draw {
                let cx = if x[0] == 1 { 1.0 } else { -1.0 };
                let cy = if y[0] == 1 { 1.0 } else { -1.0 };
                per_draw += cx * cy;
            }
            total += per_draw / q as f64;
        }
        let mean = total / samples as f64;
        let want = -((q - 1) as f64) / q as f64;
        // Per-draw statistic has variance below 1; 3 sigma of the mean.
        let sigma = 1.0 / (samples as f64).sqrt();
        assert!(
            (mean - want).abs() <= 3.0 * sigma * 3.0,
            "correlation {mean} vs {want}"
        );
    }

    #[test]
    fn random_graph_is_canonical() {
        let g = random_graph(9, 12, 0).unwrap();
        assert_eq!(g.edges().len(), 12);
        let mut sorted = g.edges().to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
        for &(u, v) in g.edges() {
            assert!(u < v && v < 9);
        }
        assert!(random_graph(3, 4, 0).is_err());
    }
}

//! Colorings, the three structural promises, and the metrics that score a
//! coloring against an instance.

use crate::hypergraph::Hypergraph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ColoringError {
    #[error("vertex {0} is uncolored but lies on an edge")]
    IncompleteColoring(usize),
    #[error("coloring has palette {got}, promise needs {expected}")]
    PaletteMismatch { got: usize, expected: usize },
    #[error("no edges (or zero total weight); fraction undefined")]
    EmptyInstance,
    #[error("discrepancy needs palette 2, got {0}")]
    NotTwoColoring(usize),
    #[error("promise {0} is impossible for edge size {1}")]
    PromiseImpossible(String, usize),
}

/// Partial assignment of colors from {0, ..., palette-1}; `None` is uncolored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    palette: usize,
    colors: Vec<Option<usize>>,
}

impl Coloring {
    pub fn new(palette: usize, n: usize) -> Self {
        assert!(palette >= 1, "palette must be nonempty");
        Self {
            palette,
            colors: vec![None; n],
        }
    }

    pub fn from_colors(palette: usize, colors: Vec<Option<usize>>) -> Self {
        assert!(palette >= 1, "palette must be nonempty");
        for c in colors.iter().flatten() {
            assert!(*c < palette, "color {c} outside palette {palette}");
        }
        Self { palette, colors }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.colors[v]
    }

    pub fn set(&mut self, v: usize, c: usize) {
        assert!(c < self.palette, "color {c} outside palette {}", self.palette);
        self.colors[v] = Some(c);
    }

    pub fn unset(&mut self, v: usize) {
        self.colors[v] = None;
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn colored_count(&self) -> usize {
        self.colors.iter().filter(|c| c.is_some()).count()
    }

    /// Colors actually in use.
    pub fn distinct_colors(&self) -> usize {
        let mut seen = vec![false; self.palette];
        for c in self.colors.iter().flatten() {
            seen[*c] = true;
        }
        seen.into_iter().filter(|&b| b).count()
    }

    pub fn colors(&self) -> &[Option<usize>] {
        &self.colors
    }
}

/// The structural promise an instance is taken to satisfy.
///
/// * `Discrepancy(l)`: some 2-coloring leaves every edge with color counts
///   differing by at most `l`.
/// * `Rainbow(chi)`: some chi-coloring puts all chi colors on every edge
///   (needs 2 <= chi <= k).
/// * `Strong(chi)`: some chi-coloring makes every edge's vertices pairwise
///   distinctly colored (needs chi >= k).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromiseKind {
    Discrepancy(usize),
    Rainbow(usize),
    Strong(usize),
}

impl PromiseKind {
    /// Palette size a witness coloring must use.
    pub fn palette(&self) -> usize {
        match *self {
            PromiseKind::Discrepancy(_) => 2,
            PromiseKind::Rainbow(chi) | PromiseKind::Strong(chi) => chi,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            PromiseKind::Discrepancy(l) => format!("discrepancy-{l}"),
            PromiseKind::Rainbow(chi) => format!("rainbow-{chi}"),
            PromiseKind::Strong(chi) => format!("strong-{chi}"),
        }
    }

    /// Checks the promise is satisfiable at all for edge size k.
    pub fn check_arity(&self, k: usize) -> Result<(), ColoringError> {
        let ok = match *self {
            PromiseKind::Discrepancy(_) => true,
            PromiseKind::Rainbow(chi) => (2..=k).contains(&chi),
            PromiseKind::Strong(chi) => chi >= k,
        };
        if ok {
            Ok(())
        } else {
            Err(ColoringError::PromiseImpossible(self.label(), k))
        }
    }
}

fn require_colored_edges(h: &Hypergraph, coloring: &Coloring) -> Result<(), ColoringError> {
    for e in h.edges() {
        for &v in e {
            if coloring.get(v).is_none() {
                return Err(ColoringError::IncompleteColoring(v));
            }
        }
    }
    Ok(())
}

/// Weighted fraction of monochromatic edges. Needs every edge vertex colored
/// and positive total weight.
pub fn mono_fraction(h: &Hypergraph, coloring: &Coloring) -> Result<f64, ColoringError> {
    if h.m() == 0 || h.total_weight() <= 0.0 {
        return Err(ColoringError::EmptyInstance);
    }
    require_colored_edges(h, coloring)?;
    let mut mono = 0.0;
    for (e, &w) in h.edges().iter().zip(h.weights()) {
        let c0 = coloring.get(e[0]);
        if e.iter().all(|&v| coloring.get(v) == c0) {
            mono += w;
        }
    }
    Ok(mono / h.total_weight())
}

/// Largest per-edge color-count imbalance |#color0 - #color1| of a total
/// 2-coloring; 0 for an edgeless instance.
pub fn discrepancy_of(h: &Hypergraph, coloring: &Coloring) -> Result<usize, ColoringError> {
    if coloring.palette() != 2 {
        return Err(ColoringError::NotTwoColoring(coloring.palette()));
    }
    require_colored_edges(h, coloring)?;
    let mut worst = 0usize;
    for e in h.edges() {
        let ones = e
            .iter()
            .filter(|&&v| coloring.get(v) == Some(1))
            .count();
        let imbalance = (e.len() as i64 - 2 * ones as i64).unsigned_abs() as usize;
        worst = worst.max(imbalance);
    }
    Ok(worst)
}

/// Outcome of checking a witness coloring against a promise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromiseCheck {
    pub ok: bool,
    /// Edge ids violating the promise.
    pub violations: Vec<usize>,
}

/// Checks whether `coloring` witnesses `kind` on `h`, reporting the violating
/// edges. The coloring must use exactly the promise's palette and color every
/// edge vertex.
pub fn verify_promise(
    h: &Hypergraph,
    coloring: &Coloring,
    kind: PromiseKind,
) -> Result<PromiseCheck, ColoringError> {
    kind.check_arity(h.k())?;
    if coloring.palette() != kind.palette() {
        return Err(ColoringError::PaletteMismatch {
            got: coloring.palette(),
            expected: kind.palette(),
        });
    }
    require_colored_edges(h, coloring)?;
    let mut violations = Vec::new();
    for (id, e) in h.edges().iter().enumerate() {
        let bad = match kind {
            PromiseKind::Discrepancy(l) => {
                let ones = e
                    .iter()
                    .filter(|&&v| coloring.get(v) == Some(1))
                    .count();
                (e.len() as i64 - 2 * ones as i64).unsigned_abs() as usize > l
            }
            PromiseKind::Rainbow(chi) => {
                let mut seen = vec![false; chi];
                for &v in e {
                    seen[coloring.get(v).expect("checked total")] = true;
                }
                seen.into_iter().any(|b| !b)
            }
            PromiseKind::Strong(_) => {
                let mut cs: Vec<usize> =
                    e.iter().map(|&v| coloring.get(v).expect("checked total")).collect();
                cs.sort_unstable();
                cs.windows(2).any(|w| w[0] == w[1])
            }
        };
        if bad {
            violations.push(id);
        }
    }
    Ok(PromiseCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// True when no fully colored edge is monochromatic; the properness notion for
/// partial colorings.
pub fn proper_on_colored(h: &Hypergraph, coloring: &Coloring) -> bool {
    monochromatic_colored_edges(h, coloring).is_empty()
}

/// Fully colored monochromatic edge ids.
pub fn monochromatic_colored_edges(h: &Hypergraph, coloring: &Coloring) -> Vec<usize> {
    let mut out = Vec::new();
    for (id, e) in h.edges().iter().enumerate() {
        let c0 = coloring.get(e[0]);
        if c0.is_some() && e.iter().all(|&v| coloring.get(v) == c0) {
            out.push(id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle3() -> Hypergraph {
        Hypergraph::unweighted(3, 3, vec![vec![0, 1, 2]]).unwrap()
    }

    fn total(palette: usize, cs: &[usize]) -> Coloring {
        Coloring::from_colors(palette, cs.iter().map(|&c| Some(c)).collect())
    }

    #[test]
    fn mono_fraction_basics() {
        let h = triangle3();
        assert_eq!(mono_fraction(&h, &total(2, &[0, 0, 0])).unwrap(), 1.0);
        assert_eq!(mono_fraction(&h, &total(2, &[0, 1, 0])).unwrap(), 0.0);
        let empty = Hypergraph::unweighted(3, 3, vec![]).unwrap();
        assert_eq!(
            mono_fraction(&empty, &total(2, &[0, 0, 0])),
            Err(ColoringError::EmptyInstance)
        );
    }

    #[test]
    fn mono_fraction_weighted() {
        let h = Hypergraph::new(
            3,
            4,
            vec![vec![0, 1, 2], vec![1, 2, 3]],
            vec![3.0, 1.0],
        )
        .unwrap();
        // First edge mono, second not: 3/4.
        let c = total(2, &[0, 0, 0, 1]);
        assert!((mono_fraction(&h, &c).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn mono_plus_nonmono_is_one() {
        let h = Hypergraph::unweighted(
            3,
            5,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![2, 3, 4]],
        )
        .unwrap();
        let c = total(2, &[0, 0, 0, 1, 1]);
        let mono = mono_fraction(&h, &c).unwrap();
        let nonmono = h
            .edges()
            .iter()
            .zip(h.weights())
            .filter(|(e, _)| {
                let c0 = c.get(e[0]);
                !e.iter().all(|&v| c.get(v) == c0)
            })
            .map(|(_, &w)| w)
            .sum::<f64>()
            / h.total_weight();
        assert_eq!(mono + nonmono, 1.0);
    }

    #[test]
    fn discrepancy_examples() {
        let h = triangle3();
        assert_eq!(discrepancy_of(&h, &total(2, &[0, 1, 0])).unwrap(), 1);
        assert_eq!(discrepancy_of(&h, &total(2, &[1, 1, 1])).unwrap(), 3);
        let partial = Coloring::from_colors(2, vec![Some(0), None, Some(1)]);
        assert_eq!(
            discrepancy_of(&h, &partial),
            Err(ColoringError::IncompleteColoring(1))
        );
        assert_eq!(
            discrepancy_of(&h, &total(3, &[0, 1, 2])),
            Err(ColoringError::NotTwoColoring(3))
        );
    }

    #[test]
    fn verify_promise_strong_and_rainbow() {
        let h = triangle3();
        let strong = verify_promise(&h, &total(4, &[0, 2, 3]), PromiseKind::Strong(4)).unwrap();
        assert!(strong.ok);
        let rb = verify_promise(&h, &total(2, &[0, 0, 0]), PromiseKind::Rainbow(2)).unwrap();
        assert!(!rb.ok);
        assert_eq!(rb.violations, vec![0]);
        // Discrepancy bound met iff verify agrees.
        let c = total(2, &[0, 1, 0]);
        let d = discrepancy_of(&h, &c).unwrap();
        for l in 0..4 {
            let chk = verify_promise(&h, &c, PromiseKind::Discrepancy(l)).unwrap();
            assert_eq!(chk.ok, d <= l);
        }
    }

    #[test]
    fn verify_promise_palette_and_arity_errors() {
        let h = triangle3();
        assert_eq!(
            verify_promise(&h, &total(3, &[0, 1, 2]), PromiseKind::Strong(4)),
            Err(ColoringError::PaletteMismatch { got: 3, expected: 4 })
        );
        assert!(matches!(
            verify_promise(&h, &total(5, &[0, 1, 2]), PromiseKind::Rainbow(5)),
            Err(ColoringError::PromiseImpossible(..))
        ));
        assert!(matches!(
            verify_promise(&h, &total(2, &[0, 1, 0]), PromiseKind::Strong(2)),
            Err(ColoringError::PromiseImpossible(..))
        ));
    }

    #[test]
    fn rainbow_k_equals_strong_k() {
        // With chi = k, hitting all colors and being pairwise distinct coincide.
        let h = Hypergraph::unweighted(3, 6, vec![vec![0, 1, 2], vec![2, 3, 4], vec![1, 4, 5]])
            .unwrap();
        for cs in [
            [0, 1, 2, 0, 1, 2],
            [0, 1, 2, 1, 0, 2],
            [0, 0, 1, 2, 2, 1],
            [2, 1, 0, 2, 1, 0],
        ] {
            let c = total(3, &cs);
            let rb = verify_promise(&h, &c, PromiseKind::Rainbow(3)).unwrap();
            let st = verify_promise(&h, &c, PromiseKind::Strong(3)).unwrap();
            assert_eq!(rb.ok, st.ok);
            assert_eq!(rb.violations, st.violations);
        }
    }

    #[test]
    fn proper_on_colored_ignores_partial_edges() {
        let h = Hypergraph::unweighted(3, 4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let mut c = Coloring::new(5, 4);
        c.set(0, 3);
        c.set(1, 3);
        c.set(2, 3);
        assert!(!proper_on_colored(&h, &c));
        c.unset(0);
        // First edge now partially colored, second still missing vertex 3.
        assert!(proper_on_colored(&h, &c));
    }

    #[test]
    fn distinct_color_count() {
        let c = Coloring::from_colors(6, vec![Some(0), Some(4), Some(0), None]);
        assert_eq!(c.distinct_colors(), 2);
        assert_eq!(c.colored_count(), 3);
        assert!(!c.is_total());
    }
}

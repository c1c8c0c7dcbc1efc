//! Linear regions: from an activation pattern to its polyhedron and affine
//! map, and enumeration of every full-dimensional region.
//!
//! The enumeration walks a tree whose level `l` fixes the bits of hidden
//! layer `l`. Each node holds the symbolic state of its prefix, so the
//! half-spaces of the next layer are computed once per node and shared by all
//! `2^width` children. A child whose accumulated half-spaces are no longer
//! full-dimensional is cut together with its whole subtree.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{feasible, BoundingBox, GeometryError, HalfSpace};
use crate::network::{NetworkError, NetworkSpec};
use crate::pattern::ActivationPattern;
use crate::tropical::{select_f, trace_pattern, AffineMap, StateChain, TropicalError};

/// Largest network [`brute_force_enumerate`] accepts.
pub const BRUTE_FORCE_MAX_NEURONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("refusing to enumerate {neurons} hidden neurons (guard {limit}): up to 2^{neurons} = {estimate:.3e} patterns")]
    GuardExceeded { neurons: usize, limit: usize, estimate: f64 },
}

impl From<crate::pattern::PatternError> for RegionError {
    fn from(e: crate::pattern::PatternError) -> Self {
        RegionError::Tropical(e.into())
    }
}

/// A full-dimensional linear region.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRegion {
    pub pattern: ActivationPattern,
    /// One per hidden neuron, layer-major. Constant rows are kept; see
    /// [`LinearRegion::trivial_rows`].
    pub halfspaces: Vec<HalfSpace>,
    pub affine_map: AffineMap,
    pub interior_point: Vec<f64>,
    pub chebyshev_radius: f64,
}

impl LinearRegion {
    /// Indices of half-spaces that hold everywhere (vanishing normal).
    pub fn trivial_rows(&self) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.is_trivially_true())
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether `x` satisfies every half-space with slack `margin`.
    pub fn contains(&self, x: &[f64], margin: f64) -> bool {
        self.halfspaces.iter().all(|h| h.eval(x) <= -margin)
    }

    fn to_json(&self) -> Value {
        json!({
            "pattern": self.pattern.to_string(),
            "halfspaces": self.halfspaces.iter().map(|h| json!({
                "alpha": h.alpha,
                "beta": h.beta,
                "trivial": h.is_trivially_true(),
            })).collect::<Vec<_>>(),
            "affine": {
                "M": self.affine_map.m.rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
                "c": self.affine_map.c.to_vec(),
            },
            "interior_point": self.interior_point,
            "radius": self.chebyshev_radius,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionOutcome {
    Region(LinearRegion),
    /// The accumulated half-spaces stopped being full-dimensional after
    /// hidden layer `failure_layer` (1-based).
    Infeasible { failure_layer: usize },
}

impl RegionOutcome {
    pub fn region(self) -> Option<LinearRegion> {
        match self {
            RegionOutcome::Region(r) => Some(r),
            RegionOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    /// Restricts regions to the box; `None` means all of `R^n`.
    pub bounding_box: Option<BoundingBox>,
    pub max_neurons_guard: usize,
    pub parallel: bool,
    /// Cut subtrees below infeasible prefixes. Disabling it visits every
    /// pattern of the full tree and tests each leaf from scratch.
    pub prune: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            bounding_box: None,
            max_neurons_guard: 40,
            parallel: false,
            prune: true,
        }
    }
}

impl EnumerationOptions {
    pub fn with_box(mut self, bounding_box: BoundingBox) -> Self {
        self.bounding_box = Some(bounding_box);
        self
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn prune(mut self, prune: bool) -> Self {
        self.prune = prune;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraversalStats {
    /// Tree nodes (partial or complete patterns) reached by the traversal.
    pub patterns_visited: u64,
    /// Infeasible proper prefixes whose subtrees were skipped.
    pub patterns_pruned_subtrees: u64,
    pub lp_calls: u64,
    pub wall_time: Duration,
}

#[derive(Default)]
struct Counters {
    visited: AtomicU64,
    pruned: AtomicU64,
    lp_calls: AtomicU64,
}

impl Counters {
    fn bump(counter: &AtomicU64) {
        counter.fetch_add(1, Ordering::Relaxed);
    }

    fn finish(&self, started: Instant) -> TraversalStats {
        TraversalStats {
            patterns_visited: self.visited.load(Ordering::Relaxed),
            patterns_pruned_subtrees: self.pruned.load(Ordering::Relaxed),
            lp_calls: self.lp_calls.load(Ordering::Relaxed),
            wall_time: started.elapsed(),
        }
    }
}

/// All full-dimensional regions of a network, sorted by pattern string.
#[derive(Debug, Clone)]
pub struct RegionSet {
    pub regions: Vec<LinearRegion>,
    pub stats: TraversalStats,
}

impl RegionSet {
    fn new(mut regions: Vec<LinearRegion>, stats: TraversalStats) -> Self {
        regions.sort_by_cached_key(|r| r.pattern.to_string());
        RegionSet { regions, stats }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn pattern_strings(&self) -> BTreeSet<String> {
        self.regions.iter().map(|r| r.pattern.to_string()).collect()
    }

    pub fn get(&self, pattern: &str) -> Option<&LinearRegion> {
        self.regions
            .binary_search_by(|r| r.pattern.to_string().as_str().cmp(pattern))
            .ok()
            .map(|i| &self.regions[i])
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "regions": self.regions.iter().map(LinearRegion::to_json).collect::<Vec<_>>(),
            "stats": {
                "region_count": self.regions.len(),
                "patterns_visited": self.stats.patterns_visited,
                "patterns_pruned_subtrees": self.stats.patterns_pruned_subtrees,
                "lp_calls": self.stats.lp_calls,
                "wall_time_seconds": self.stats.wall_time.as_secs_f64(),
            },
        });
        serde_json::to_string_pretty(&doc).expect("region sets always serialize")
    }

    /// One row per region: `pattern,radius,halfspaces,x0..,m{i}_{j}..,c{i}..`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some(first) = self.regions.first() else {
            out.push_str("pattern,radius,halfspaces\n");
            return out;
        };
        let n = first.interior_point.len();
        let (rows, cols) = first.affine_map.m.dim();
        let mut header = vec!["pattern".to_string(), "radius".into(), "halfspaces".into()];
        header.extend((0..n).map(|i| format!("x{i}")));
        for i in 0..rows {
            header.extend((0..cols).map(|j| format!("m{i}_{j}")));
        }
        header.extend((0..rows).map(|i| format!("c{i}")));
        out.push_str(&header.join(","));
        out.push('\n');
        for r in &self.regions {
            let _ = write!(out, "{},{},{}", r.pattern, r.chebyshev_radius, r.halfspaces.len());
            for v in r.interior_point.iter().chain(r.affine_map.m.iter()).chain(r.affine_map.c.iter()) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

struct Walk<'a> {
    net: &'a NetworkSpec,
    bounding_box: Option<&'a BoundingBox>,
    counters: &'a Counters,
}

impl Walk<'_> {
    fn is_full_dim(&self, halfspaces: &[HalfSpace]) -> Result<Option<(Vec<f64>, f64)>, RegionError> {
        Counters::bump(&self.counters.lp_calls);
        let f = feasible(halfspaces, self.net.input_dim(), self.bounding_box)?;
        Ok(if f.is_full_dim() {
            Some((f.witness.unwrap_or_default(), f.radius.unwrap_or(0.0)))
        } else {
            None
        })
    }

    /// Builds the pattern's region layer by layer, stopping at
    /// the first layer whose half-spaces lose full-dimensionality.
    fn find(&self, pattern: &ActivationPattern) -> Result<RegionOutcome, RegionError> {
        pattern.check_widths(&self.net.widths())?;
        let mut chain = StateChain::new(self.net.input_dim());
        let mut halfspaces = Vec::with_capacity(pattern.total_bits());
        let mut witness = None;
        for (l, bits) in pattern.layers().iter().enumerate() {
            let prop = chain.propagate_next(self.net)?;
            let (state, hs) = select_f(&prop, bits);
            chain.push(state);
            halfspaces.extend(hs);
            match self.is_full_dim(&halfspaces)? {
                Some(w) => witness = Some(w),
                None => return Ok(RegionOutcome::Infeasible { failure_layer: l + 1 }),
            }
        }
        let (interior_point, chebyshev_radius) = witness.expect("networks have at least one hidden layer");
        Ok(RegionOutcome::Region(LinearRegion {
            pattern: pattern.clone(),
            halfspaces,
            affine_map: chain.network_map(self.net),
            interior_point,
            chebyshev_radius,
        }))
    }

    fn children_bits(width: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u64 << width).map(move |code| (0..width).map(|i| (code >> (width - 1 - i)) & 1 == 1).collect())
    }

    /// Pruned traversal below a feasible prefix.
    fn expand(
        &self,
        chain: &StateChain,
        halfspaces: &[HalfSpace],
        prefix: &[Vec<bool>],
        parallel: bool,
    ) -> Result<Vec<LinearRegion>, RegionError> {
        let depth = self.net.depth();
        let layer = chain.depth() + 1;
        let prop = chain.propagate_next(self.net)?;
        let width = prop.width();

        let child = |bits: Vec<bool>| -> Result<Vec<LinearRegion>, RegionError> {
            Counters::bump(&self.counters.visited);
            let (state, hs) = select_f(&prop, &bits);
            let mut acc = Vec::with_capacity(halfspaces.len() + hs.len());
            acc.extend_from_slice(halfspaces);
            acc.extend(hs);
            let Some((witness, radius)) = self.is_full_dim(&acc)? else {
                if layer < depth {
                    Counters::bump(&self.counters.pruned);
                }
                return Ok(Vec::new());
            };
            let mut next_prefix = prefix.to_vec();
            next_prefix.push(bits);
            let mut next_chain = chain.clone();
            next_chain.push(state);
            if layer == depth {
                Ok(vec![LinearRegion {
                    pattern: ActivationPattern::new(next_prefix),
                    halfspaces: acc,
                    affine_map: next_chain.network_map(self.net),
                    interior_point: witness,
                    chebyshev_radius: radius,
                }])
            } else {
                self.expand(&next_chain, &acc, &next_prefix, parallel)
            }
        };

        let nested: Vec<Vec<LinearRegion>> = if parallel {
            Self::children_bits(width)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(child)
                .collect::<Result<_, _>>()?
        } else {
            Self::children_bits(width).map(child).collect::<Result<_, _>>()?
        };
        Ok(nested.into_iter().flatten().collect())
    }

    fn leaf_patterns(&self) -> impl Iterator<Item = ActivationPattern> + '_ {
        let widths = self.net.widths();
        let total = self.net.total_neurons();
        (0..1u64 << total).map(move |i| ActivationPattern::from_index(&widths, i))
    }

    fn test_leaves(&self, parallel: bool) -> Result<Vec<LinearRegion>, RegionError> {
        let eval = |p: ActivationPattern| self.find(&p).map(RegionOutcome::region);
        let outcomes: Vec<Option<LinearRegion>> = if parallel {
            self.leaf_patterns().collect::<Vec<_>>().into_par_iter().map(eval).collect::<Result<_, _>>()?
        } else {
            self.leaf_patterns().map(eval).collect::<Result<_, _>>()?
        };
        Ok(outcomes.into_iter().flatten().collect())
    }
}

fn check_guard(net: &NetworkSpec, limit: usize) -> Result<(), RegionError> {
    let neurons = net.total_neurons();
    if neurons > limit {
        return Err(RegionError::GuardExceeded {
            neurons,
            limit,
            estimate: 2f64.powi(neurons as i32),
        });
    }
    Ok(())
}

/// The region selected by `pattern`, over all of `R^n`.
pub fn find_linear_region(net: &NetworkSpec, pattern: &ActivationPattern) -> Result<RegionOutcome, RegionError> {
    find_linear_region_in(net, pattern, None)
}

/// The region selected by `pattern`, intersected with `bounding_box`.
pub fn find_linear_region_in(
    net: &NetworkSpec,
    pattern: &ActivationPattern,
    bounding_box: Option<&BoundingBox>,
) -> Result<RegionOutcome, RegionError> {
    let counters = Counters::default();
    Walk {
        net,
        bounding_box,
        counters: &counters,
    }
    .find(pattern)
}

/// Every pattern whose region is full-dimensional, found by pruned
/// layer-by-layer traversal.
pub fn enumerate_regions(net: &NetworkSpec, opts: &EnumerationOptions) -> Result<RegionSet, RegionError> {
    check_guard(net, opts.max_neurons_guard)?;
    let started = Instant::now();
    let counters = Counters::default();
    let walk = Walk {
        net,
        bounding_box: opts.bounding_box.as_ref(),
        counters: &counters,
    };
    let regions = if opts.prune {
        walk.expand(&StateChain::new(net.input_dim()), &[], &[], opts.parallel)?
    } else {
        // Every node of the full tree is reached; each leaf is then tested
        // from scratch.
        let mut nodes = 0u64;
        let mut level = 1u64;
        for w in net.widths() {
            level <<= w;
            nodes += level;
        }
        counters.visited.store(nodes, Ordering::Relaxed);
        walk.test_leaves(opts.parallel)?
    };
    Ok(RegionSet::new(regions, counters.finish(started)))
}

/// Tests every one of the `2^N` patterns independently. Testing oracle for
/// [`enumerate_regions`].
pub fn brute_force_enumerate(net: &NetworkSpec, opts: &EnumerationOptions) -> Result<RegionSet, RegionError> {
    check_guard(net, BRUTE_FORCE_MAX_NEURONS.min(opts.max_neurons_guard))?;
    let started = Instant::now();
    let counters = Counters::default();
    let walk = Walk {
        net,
        bounding_box: opts.bounding_box.as_ref(),
        counters: &counters,
    };
    counters.visited.store(1u64 << net.total_neurons(), Ordering::Relaxed);
    let regions = walk.test_leaves(opts.parallel)?;
    Ok(RegionSet::new(regions, counters.finish(started)))
}

/// The region containing `x`, with ties at zero resolved to active.
///
/// When `x` sits where its pattern's cell has empty interior, the region is
/// reported with `x` itself as the witness and radius 0.
pub fn locate_region(net: &NetworkSpec, x: &[f64]) -> Result<LinearRegion, RegionError> {
    let pattern = net.activation_pattern(x)?;
    let (chain, halfspaces) = trace_pattern(net, &pattern)?;
    let f = feasible(&halfspaces, net.input_dim(), None)?;
    let (interior_point, chebyshev_radius) = if f.is_full_dim() {
        (f.witness.unwrap_or_else(|| x.to_vec()), f.radius.unwrap_or(0.0))
    } else {
        (x.to_vec(), 0.0)
    };
    Ok(LinearRegion {
        pattern,
        affine_map: chain.network_map(net),
        halfspaces,
        interior_point,
        chebyshev_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{init_kaiming, load_network, Dense, Skip};
    use ndarray::{array, Array1, Array2};

    fn worked_example() -> NetworkSpec {
        load_network(include_str!("../../../data/worked_example.json")).unwrap()
    }

    fn single_layer(weights: Array2<f64>, bias: Array1<f64>) -> NetworkSpec {
        let width = weights.nrows();
        let out = Dense::new(Array2::ones((1, width)), array![0.0]);
        NetworkSpec::new(weights.ncols(), vec![Dense::new(weights, bias)], out, vec![]).unwrap()
    }

    /// Same direction up to a positive factor.
    fn positive_multiple(h: &HalfSpace, alpha: &[f64], beta: f64) -> bool {
        let s = h.norm() / alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
        h.alpha.iter().zip(alpha).all(|(a, b)| (a - s * b).abs() < 1e-9) && (h.beta - s * beta).abs() < 1e-9
    }

    #[test]
    fn worked_example_region() {
        let net = worked_example();
        let pattern: ActivationPattern = "11|01".parse().unwrap();
        let region = find_linear_region(&net, &pattern).unwrap().region().expect("feasible");
        let expected = [
            ([4.0, -1.0], -2.0),
            ([4.0, 1.0], -3.0),
            ([20.0, -11.0], -11.0),
            ([-2.0, 10.0], -4.75),
        ];
        for (h, (alpha, beta)) in region.halfspaces.iter().zip(expected) {
            assert!(positive_multiple(h, &alpha, beta), "{h:?}");
        }
        assert!(region.contains(&[0.4, 0.2], 1e-6));
        let fwd = net.forward(&[0.4, 0.2]).unwrap().output;
        assert!((region.affine_map.apply(&[0.4, 0.2])[0] - fwd[0]).abs() < 1e-12);
    }

    #[test]
    fn one_neuron() {
        let net = single_layer(array![[1.0, 0.0]], array![0.0]);
        let region = find_linear_region(&net, &"1".parse().unwrap()).unwrap().region().unwrap();
        assert_eq!(region.halfspaces, vec![HalfSpace::new(vec![-1.0, 0.0], 0.0)]);
        assert_eq!(region.affine_map.m, array![[1.0, 0.0]]);
        let set = enumerate_regions(&net, &EnumerationOptions::default()).unwrap();
        assert_eq!(set.len(), 2);
        let brute = brute_force_enumerate(&net, &EnumerationOptions::default()).unwrap();
        assert_eq!(brute.stats.patterns_visited, 2);
    }

    #[test]
    fn two_crossing_lines() {
        let net = single_layer(array![[1.0, 0.3], [-0.2, 1.0]], array![0.1, -0.4]);
        assert_eq!(enumerate_regions(&net, &EnumerationOptions::default()).unwrap().len(), 4);
    }

    #[test]
    fn worked_example_matches_brute_force() {
        let net = worked_example();
        let opts = EnumerationOptions::default();
        let fast = enumerate_regions(&net, &opts).unwrap();
        let brute = brute_force_enumerate(&net, &opts).unwrap();
        assert_eq!(fast.pattern_strings(), brute.pattern_strings());
        assert!(fast.pattern_strings().contains("11|01"));
    }

    #[test]
    fn dead_neuron_halves_the_count() {
        let generic = single_layer(array![[1.0, 0.3], [-0.2, 1.0]], array![0.1, -0.4]);
        let dead = single_layer(array![[1.0, 0.3], [0.0, 0.0]], array![0.1, -1.0]);
        let opts = EnumerationOptions::default();
        let g = brute_force_enumerate(&generic, &opts).unwrap().len();
        let d = brute_force_enumerate(&dead, &opts).unwrap();
        assert_eq!(d.len() * 2, g);
        assert!(d.pattern_strings().iter().all(|p| p.ends_with('0')));
        let outcome = find_linear_region(&dead, &"01".parse().unwrap()).unwrap();
        assert_eq!(outcome, RegionOutcome::Infeasible { failure_layer: 1 });
    }

    #[test]
    fn constant_zero_preactivation_counts_once() {
        // Layer 2 sees relu(x), which is identically 0 on x < 0.
        let net = load_network(
            r#"{"input_dim": 1,
                "hidden_layers": [{"weights": [[1]], "bias": [0]}, {"weights": [[1]], "bias": [0]}],
                "output": {"weights": [[1]], "bias": [0]}}"#,
        )
        .unwrap();
        let opts = EnumerationOptions::default();
        let set = enumerate_regions(&net, &opts).unwrap();
        let want: BTreeSet<String> = ["0|1", "1|1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(set.pattern_strings(), want);
        assert_eq!(brute_force_enumerate(&net, &opts).unwrap().pattern_strings(), want);
        assert_eq!(net.activation_pattern(&[-1.0]).unwrap().to_string(), "0|1");
    }

    #[test]
    fn failure_layer_is_reported() {
        let net = worked_example();
        // Layer one "01" is feasible; check that some completions die at layer 2.
        let failures: Vec<usize> = ["01|00", "01|01", "01|10", "01|11"]
            .iter()
            .filter_map(|p| match find_linear_region(&net, &p.parse().unwrap()).unwrap() {
                RegionOutcome::Infeasible { failure_layer } => Some(failure_layer),
                RegionOutcome::Region(_) => None,
            })
            .collect();
        assert!(failures.iter().all(|&l| l == 1 || l == 2));
    }

    #[test]
    fn guard_refuses_large_networks() {
        let net = init_kaiming(&[20, 21], 2, 1, &[], 0).unwrap();
        let err = enumerate_regions(&net, &EnumerationOptions::default()).unwrap_err();
        assert!(matches!(err, RegionError::GuardExceeded { neurons: 41, limit: 40, .. }));
        assert!(err.to_string().contains("2^41"));
        let small = init_kaiming(&[9, 9], 2, 1, &[], 0).unwrap();
        assert!(matches!(
            brute_force_enumerate(&small, &EnumerationOptions::default()),
            Err(RegionError::GuardExceeded { neurons: 18, limit: 16, .. })
        ));
    }

    #[test]
    fn pattern_shape_is_checked() {
        let net = worked_example();
        assert!(find_linear_region(&net, &"1|1".parse().unwrap()).is_err());
    }

    #[test]
    fn parallel_and_unpruned_agree() {
        let net = init_kaiming(&[4, 4, 4], 2, 1, &[Skip::new(1, 3)], 3).unwrap();
        let base = enumerate_regions(&net, &EnumerationOptions::default()).unwrap();
        let par = enumerate_regions(&net, &EnumerationOptions::default().parallel(true)).unwrap();
        let unpruned = enumerate_regions(&net, &EnumerationOptions::default().prune(false)).unwrap();
        assert_eq!(base.regions, par.regions);
        assert_eq!(base.pattern_strings(), unpruned.pattern_strings());
        assert!(base.stats.patterns_visited < unpruned.stats.patterns_visited);
        assert_eq!(unpruned.stats.patterns_visited, 16 + 256 + 4096);
    }

    #[test]
    fn boundary_point_resolves_to_active() {
        let net = worked_example();
        // On 4x - y = 2 (first neuron's pre-activation is exactly 0).
        let x = [0.5, 0.0];
        assert_eq!(net.forward(&x).unwrap().pre_activations[0][0], 0.0);
        let region = locate_region(&net, &x).unwrap();
        assert!(region.pattern.layer(0)[0]);
        assert!(region.halfspaces[0].eval(&x).abs() < 1e-12);
        assert!(region.halfspaces.iter().all(|h| h.eval(&x) <= 1e-12));
    }

    #[test]
    fn exports() {
        let net = worked_example();
        let set = enumerate_regions(&net, &EnumerationOptions::default()).unwrap();
        let doc: Value = serde_json::from_str(&set.to_json()).unwrap();
        assert_eq!(doc["regions"].as_array().unwrap().len(), set.len());
        assert_eq!(doc["stats"]["region_count"], set.len());
        assert!(doc["regions"][0]["affine"]["M"].is_array());
        let csv = set.to_csv();
        assert_eq!(csv.lines().count(), set.len() + 1);
        assert!(csv.starts_with("pattern,radius,halfspaces,x0,x1,m0_0,m0_1,c0\n"));
        assert!(set.get("11|01").is_some());
        assert!(set.get("nope").is_none());
    }
}

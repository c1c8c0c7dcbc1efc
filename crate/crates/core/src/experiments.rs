//! Experiment harnesses: skip-versus-no-skip region counts and cache hit
//! rates on synthetic grids.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{warm_cache, CacheError};
use crate::geometry::BoundingBox;
use crate::network::{init_kaiming, NetworkSpec, Skip};
use crate::phi::{grid_points, PhiFunction};
use crate::regions::{enumerate_regions, EnumerationOptions, RegionError};
use crate::stats::{mann_whitney_one_tailed, summarize, Alternative, Summary, UTestResult};

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Variant {
    #[serde(rename = "noskip")]
    WithoutSkips,
    #[serde(rename = "skip")]
    WithSkips,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::WithoutSkips => "noskip",
            Variant::WithSkips => "skip",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    pub layers: usize,
    pub width: usize,
    pub skips: Vec<Skip>,
    pub trials: usize,
    pub seed: u64,
    pub input_dim: usize,
    pub output_dim: usize,
    pub bounding_box: Option<BoundingBox>,
    pub parallel: bool,
}

impl CompareConfig {
    pub fn new(layers: usize, width: usize, skips: Vec<Skip>, trials: usize, seed: u64) -> Self {
        CompareConfig {
            layers,
            width,
            skips,
            trials,
            seed,
            input_dim: 2,
            output_dim: 1,
            bounding_box: None,
            parallel: true,
        }
    }

    /// Seed of trial `index` of `variant`. The no-skip variant uses
    /// `seed + index`, the skip variant `seed + trials + index`, so the two
    /// samples are independent and every trial is reproducible on its own.
    pub fn trial_seed(&self, variant: Variant, index: usize) -> u64 {
        let offset = match variant {
            Variant::WithoutSkips => 0,
            Variant::WithSkips => self.trials as u64,
        };
        self.seed.wrapping_add(offset + index as u64)
    }

    pub fn trial_network(&self, variant: Variant, index: usize) -> Result<NetworkSpec, RegionError> {
        let skips: &[Skip] = match variant {
            Variant::WithoutSkips => &[],
            Variant::WithSkips => &self.skips,
        };
        Ok(init_kaiming(
            &vec![self.width; self.layers],
            self.input_dim,
            self.output_dim,
            skips,
            self.trial_seed(variant, index),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub variant: Variant,
    pub seed: u64,
    pub region_count: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkipComparison {
    pub config: CompareConfig,
    /// No-skip trials first, each variant in trial order.
    pub trials: Vec<TrialRecord>,
    pub without_skips: Summary,
    pub with_skips: Summary,
    /// No-skip counts tested against skip counts, alternative "less".
    pub test: Option<UTestResult>,
    pub reject_null: Option<bool>,
    pub warnings: Vec<String>,
}

pub fn compare_skips(config: &CompareConfig) -> Result<SkipComparison, RegionError> {
    if config.trials == 0 {
        return Err(RegionError::Network(crate::network::NetworkError::Malformed(
            "trials must be at least 1".into(),
        )));
    }
    // Validate the skip list once before spawning trials.
    config.trial_network(Variant::WithSkips, 0)?;

    let mut opts = EnumerationOptions::default();
    if let Some(b) = &config.bounding_box {
        opts = opts.with_box(b.clone());
    }
    let jobs: Vec<(Variant, usize)> = [Variant::WithoutSkips, Variant::WithSkips]
        .into_iter()
        .flat_map(|v| (0..config.trials).map(move |i| (v, i)))
        .collect();
    let run = |&(variant, index): &(Variant, usize)| -> Result<TrialRecord, RegionError> {
        let net = config.trial_network(variant, index)?;
        let start = Instant::now();
        let regions = enumerate_regions(&net, &opts)?;
        Ok(TrialRecord {
            trial: index,
            variant,
            seed: config.trial_seed(variant, index),
            region_count: regions.len(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    };
    let trials: Vec<TrialRecord> = if config.parallel {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };

    let counts = |v: Variant| -> Vec<f64> {
        trials
            .iter()
            .filter(|t| t.variant == v)
            .map(|t| t.region_count as f64)
            .collect()
    };
    let a = counts(Variant::WithoutSkips);
    let b = counts(Variant::WithSkips);
    let summary = |s: &[f64]| summarize(s).expect("at least one trial");

    let mut warnings = Vec::new();
    let (test, reject_null) = if config.trials < 2 {
        warnings.push(format!(
            "only {} trial per variant: the U test is degenerate, no decision reported",
            config.trials
        ));
        (None, None)
    } else {
        let t = mann_whitney_one_tailed(&a, &b, Alternative::ALessThanB).expect("non-empty finite samples");
        if t.degenerate {
            warnings.push("every region count is equal: the U test is degenerate, no decision reported".into());
            (Some(t), None)
        } else {
            let reject = t.p_value < SIGNIFICANCE;
            (Some(t), Some(reject))
        }
    };

    Ok(SkipComparison {
        config: config.clone(),
        without_skips: summary(&a),
        with_skips: summary(&b),
        trials,
        test,
        reject_null,
        warnings,
    })
}

impl SkipComparison {
    /// Columns `trial,variant,seed,region_count,wall_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,variant,seed,region_count,wall_ms\n");
        for t in &self.trials {
            writeln!(out, "{},{},{},{},{:.3}", t.trial, t.variant, t.seed, t.region_count, t.wall_ms).unwrap();
        }
        out
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        let skips: Vec<String> = self.config.skips.iter().map(Skip::to_string).collect();
        writeln!(
            out,
            "layers {} width {} skips [{}] trials {} seed {}",
            self.config.layers,
            self.config.width,
            skips.join(","),
            self.config.trials,
            self.config.seed
        )
        .unwrap();
        for (name, s) in [("noskip", &self.without_skips), ("skip", &self.with_skips)] {
            writeln!(
                out,
                "{name:>6}: mean {:.2} sd {:.2} min {} max {} n {}",
                s.mean, s.stddev, s.min, s.max, s.count
            )
            .unwrap();
        }
        if let Some(t) = &self.test {
            writeln!(
                out,
                "U = {} p = {:.6} ({:?}{})",
                t.u_statistic,
                t.p_value,
                t.method,
                if t.tie_correction_applied { ", tie-corrected" } else { "" }
            )
            .unwrap();
        }
        match self.reject_null {
            Some(true) => writeln!(out, "reject equal means at {SIGNIFICANCE}: skip networks have more regions").unwrap(),
            Some(false) => writeln!(out, "no rejection at {SIGNIFICANCE}").unwrap(),
            None => {}
        }
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitRateConfig {
    pub function: PhiFunction,
    pub grid_start: f64,
    pub grid_step: f64,
    /// Points per axis.
    pub grid_len: usize,
    /// Shift applied to both coordinates of the test grid.
    pub offset: f64,
}

impl HitRateConfig {
    /// Grid from `start` to `end` inclusive; empty when `end < start`.
    pub fn spanning(function: PhiFunction, start: f64, end: f64, step: f64, offset: f64) -> Self {
        let grid_len = if end < start || step <= 0.0 {
            0
        } else {
            ((end - start) / step + 1e-9).floor() as usize + 1
        };
        HitRateConfig {
            function,
            grid_start: start,
            grid_step: step,
            grid_len,
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitRateReport {
    pub config: HitRateConfig,
    pub train_points: usize,
    pub test_points: usize,
    pub cached_regions: usize,
    pub test_hits: usize,
    pub hit_rate: f64,
}

/// Warms a cache on the training grid and counts test-grid points that land
/// in an already cached region. Only grid locations matter here; the
/// function only labels the data.
pub fn cache_hit_experiment(net: &NetworkSpec, config: &HitRateConfig) -> Result<HitRateReport, CacheError> {
    let train = grid_points(config.grid_start, config.grid_step, config.grid_len);
    let test = grid_points(config.grid_start + config.offset, config.grid_step, config.grid_len);
    let cache = warm_cache(net, &train)?;
    let mut test_hits = 0;
    for q in &test {
        if cache.contains(&net.activation_pattern(q)?.to_string()) {
            test_hits += 1;
        }
    }
    let hit_rate = if train.is_empty() || test.is_empty() {
        0.0
    } else {
        test_hits as f64 / test.len() as f64
    };
    Ok(HitRateReport {
        config: config.clone(),
        train_points: train.len(),
        test_points: test.len(),
        cached_regions: cache.len(),
        test_hits,
        hit_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_disjoint_per_variant() {
        let c = CompareConfig::new(2, 3, vec![], 4, 100);
        let c = &c;
        let mut seeds: Vec<u64> = [Variant::WithoutSkips, Variant::WithSkips]
            .into_iter()
            .flat_map(|v| (0..4).map(move |i| c.trial_seed(v, i)))
            .collect();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds, (100..108).collect::<Vec<_>>());
    }

    #[test]
    fn single_trial_has_no_decision() {
        let c = CompareConfig::new(2, 3, vec![], 1, 7);
        let r = compare_skips(&c).unwrap();
        assert!(r.test.is_none() && r.reject_null.is_none());
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.trials.len(), 2);
    }

    #[test]
    fn csv_layout_and_determinism() {
        let mut c = CompareConfig::new(3, 3, vec![Skip::new(1, 3)], 3, 11);
        let r = compare_skips(&c).unwrap();
        c.parallel = false;
        let s = compare_skips(&c).unwrap();
        let strip = |csv: &str| -> Vec<String> {
            csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
        };
        assert_eq!(strip(&r.to_csv()), strip(&s.to_csv()));
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("trial,variant,seed,region_count,wall_ms"));
        assert!(lines.next().unwrap().starts_with("0,noskip,11,"));
        assert_eq!(csv.lines().count(), 7);
        assert!(r.report().contains("U = "));
    }

    #[test]
    fn invalid_skip_is_rejected() {
        let c = CompareConfig::new(3, 3, vec![Skip::new(2, 3)], 2, 0);
        assert!(compare_skips(&c).is_err());
    }

    #[test]
    fn hit_rate_edges() {
        let net = init_kaiming(&[5, 5], 2, 1, &[], 0).unwrap();
        let same = HitRateConfig::spanning(PhiFunction::Sinc, -10.0, 10.0, 0.5, 0.0);
        assert_eq!(same.grid_len, 41);
        let r = cache_hit_experiment(&net, &same).unwrap();
        assert_eq!(r.hit_rate, 1.0);
        let empty = HitRateConfig::spanning(PhiFunction::Sinc, -10.0, -11.0, 0.1, 0.1);
        let r = cache_hit_experiment(&net, &empty).unwrap();
        assert_eq!((r.train_points, r.hit_rate), (0, 0.0));
    }

    #[test]
    fn spanning_grid_includes_end() {
        assert_eq!(HitRateConfig::spanning(PhiFunction::Sinc, -10.0, 10.0, 0.1, 0.1).grid_len, 201);
    }
}

//! `relu-regions`: generate networks, enumerate and plot their linear
//! regions, run the skip-connection comparison and the cache benchmarks.
//!
//! Exit codes: 0 success, 2 invalid input, 3 size guard or inconclusive LP.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use relu_regions::experiments::{cache_hit_experiment, compare_skips, CompareConfig, HitRateConfig};
use relu_regions::network::parse_skip_list;
use relu_regions::phi::PhiFunction;
use relu_regions::svg::render_svg;
use relu_regions::{
    enumerate_regions, init_kaiming, load_network, save_network, BoundingBox, CacheError, EnumerationOptions,
    GeometryError, NetworkSpec, RegionCache, RegionError,
};

const THREADS_VAR: &str = "RELU_REGIONS_THREADS";

#[derive(Parser)]
#[command(name = "relu-regions", version, about = "Linear regions of ReLU networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Kaiming-initialized network document.
    InitRandom {
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 2)]
        input_dim: usize,
        #[arg(long, default_value_t = 1)]
        output_dim: usize,
        /// Skip connections such as "1-3,2-4".
        #[arg(long, default_value = "")]
        skips: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate the full-dimensional linear regions of a network.
    Enumerate {
        net: PathBuf,
        /// Bounds as lo hi pairs, one pair per input dimension.
        #[arg(long = "box", num_args = 2.., allow_negative_numbers = true)]
        bbox: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Refuse networks with more hidden neurons than this.
        #[arg(long, default_value_t = EnumerationOptions::default().max_neurons_guard)]
        max_neurons: usize,
    },
    /// Render the regions of a 2-input network clipped to a box as SVG.
    Plot {
        net: PathBuf,
        #[arg(long = "box", num_args = 4, allow_negative_numbers = true, default_values_t = [-10.0, 10.0, -10.0, 10.0])]
        bbox: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Width of the image in pixels.
        #[arg(long, default_value_t = 800)]
        pixels: u32,
    },
    /// Compare region counts of random networks with and without skips.
    CompareSkips {
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        skips: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        input_dim: usize,
        /// Count regions inside a box instead of over the whole input space.
        #[arg(long = "box", num_args = 2.., allow_negative_numbers = true)]
        bbox: Option<Vec<f64>>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cached-region count and test hit rate on shifted phi grids.
    CacheStats {
        net: PathBuf,
        #[arg(long, default_value = "phi2")]
        train_fn: String,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        grid_start: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        grid_end: f64,
        #[arg(long, default_value_t = 0.1)]
        grid_step: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        offset: f64,
    },
    /// Evaluate a network at one point through a region cache.
    Predict {
        net: PathBuf,
        /// Comma-separated coordinates, e.g. "0.4,0.2".
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Cache file, read if present and rewritten after the call.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Refused(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Refused(_) => 3,
        }
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        match e {
            RegionError::GuardExceeded { .. } | RegionError::Geometry(GeometryError::Inconclusive(_)) => {
                Failure::Refused(e.to_string())
            }
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<NetworkSpec, Failure> {
    load_network(&read(path)?).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// `[lo0, hi0, lo1, hi1, ...]` checked against `dim`.
fn parse_box(values: &[f64], dim: usize) -> Result<BoundingBox, Failure> {
    if values.len() != 2 * dim {
        return Err(invalid(format!("--box needs {} values (lo hi per input dimension), got {}", 2 * dim, values.len())));
    }
    let lo: Vec<f64> = values.iter().step_by(2).copied().collect();
    let hi: Vec<f64> = values.iter().skip(1).step_by(2).copied().collect();
    if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l < h)) {
        return Err(invalid("--box bounds must be finite with lo < hi"));
    }
    Ok(BoundingBox::new(lo, hi))
}

fn parse_point(s: &str) -> Result<Vec<f64>, Failure> {
    let x: Result<Vec<f64>, _> = s.split(',').map(|v| v.trim().parse::<f64>()).collect();
    match x {
        Ok(x) if !x.is_empty() && x.iter().all(|v| v.is_finite()) => Ok(x),
        _ => Err(invalid(format!("--x `{s}` is not a comma-separated list of numbers"))),
    }
}

/// Thread count from the environment; `None` leaves rayon's default.
fn configure_threads() -> Result<Option<usize>, Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(None);
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid(format!("{THREADS_VAR}={value} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(invalid)?;
    Ok(Some(n))
}

fn echo(config: serde_json::Value) {
    println!("config: {config}");
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = configure_threads()?;
    let parallel = threads != Some(1);
    match cli.command {
        Command::InitRandom {
            layers,
            width,
            input_dim,
            output_dim,
            skips,
            seed,
            out,
        } => {
            echo(json!({
                "command": "init-random", "layers": layers, "width": width, "input_dim": input_dim,
                "output_dim": output_dim, "skips": skips, "seed": seed, "out": out,
            }));
            let skips = parse_skip_list(&skips).map_err(invalid)?;
            let net = init_kaiming(&vec![width; layers], input_dim, output_dim, &skips, seed).map_err(invalid)?;
            write(&out, &save_network(&net))?;
            println!("wrote {} ({} hidden neurons, {} skips)", out.display(), net.total_neurons(), net.skips().len());
        }
        Command::Enumerate {
            net,
            bbox,
            out,
            csv,
            max_neurons,
        } => {
            let spec = load(&net)?;
            let mut opts = EnumerationOptions::default().parallel(parallel);
            opts.max_neurons_guard = max_neurons;
            if let Some(values) = &bbox {
                opts = opts.with_box(parse_box(values, spec.input_dim())?);
            }
            echo(json!({
                "command": "enumerate", "net": net, "box": opts.bounding_box, "out": out, "csv": csv,
                "max_neurons": max_neurons, "threads": threads, "parallel": parallel,
            }));
            let set = enumerate_regions(&spec, &opts)?;
            if let Some(path) = &out {
                write(path, &set.to_json())?;
            }
            if let Some(path) = &csv {
                write(path, &set.to_csv())?;
            }
            println!(
                "{} regions, {} pruned, {:.3} seconds",
                set.len(),
                set.stats.patterns_pruned_subtrees,
                set.stats.wall_time.as_secs_f64()
            );
        }
        Command::Plot { net, bbox, out, pixels } => {
            let spec = load(&net)?;
            if spec.input_dim() != 2 {
                return Err(invalid(format!("plot needs a 2-input network, {} has {}", net.display(), spec.input_dim())));
            }
            let rect = parse_box(&bbox, 2)?;
            echo(json!({
                "command": "plot", "net": net, "box": rect, "out": out, "pixels": pixels,
                "threads": threads, "parallel": parallel,
            }));
            let opts = EnumerationOptions::default().parallel(parallel).with_box(rect.clone());
            let set = enumerate_regions(&spec, &opts)?;
            let svg = render_svg(&set, &rect, pixels.max(1)).map_err(|e| Failure::from(RegionError::from(e)))?;
            write(&out, &svg)?;
            println!("wrote {} ({} regions)", out.display(), set.len());
        }
        Command::CompareSkips {
            layers,
            width,
            skips,
            trials,
            seed,
            input_dim,
            bbox,
            csv,
        } => {
            let skips = parse_skip_list(&skips).map_err(invalid)?;
            let mut cfg = CompareConfig::new(layers, width, skips, trials, seed);
            cfg.input_dim = input_dim;
            cfg.parallel = parallel;
            if let Some(values) = &bbox {
                cfg.bounding_box = Some(parse_box(values, input_dim)?);
            }
            echo(json!({"command": "compare-skips", "config": cfg, "csv": csv, "threads": threads}));
            let result = compare_skips(&cfg)?;
            if let Some(path) = &csv {
                write(path, &result.to_csv())?;
            }
            print!("{}", result.report());
        }
        Command::CacheStats {
            net,
            train_fn,
            grid_start,
            grid_end,
            grid_step,
            offset,
        } => {
            let spec = load(&net)?;
            if spec.input_dim() != 2 {
                return Err(invalid(format!("phi grids are 2-D, {} has {} inputs", net.display(), spec.input_dim())));
            }
            let function: PhiFunction = train_fn.parse().map_err(invalid)?;
            if !(grid_step > 0.0 && grid_step.is_finite() && grid_start.is_finite() && grid_end.is_finite()) {
                return Err(invalid("grid bounds must be finite and --grid-step positive"));
            }
            let cfg = HitRateConfig::spanning(function, grid_start, grid_end, grid_step, offset);
            echo(json!({"command": "cache-stats", "net": net, "config": cfg}));
            let r = cache_hit_experiment(&spec, &cfg)?;
            println!(
                "{} train points, {} test points, {} cached regions, {} test hits, hit rate {:.6}",
                r.train_points, r.test_points, r.cached_regions, r.test_hits, r.hit_rate
            );
        }
        Command::Predict { net, x, cache } => {
            let spec = load(&net)?;
            let x = parse_point(&x)?;
            echo(json!({"command": "predict", "net": net, "x": x, "cache": cache}));
            let store = match &cache {
                Some(path) if path.exists() => RegionCache::from_json(&read(path)?)?,
                _ => RegionCache::new(),
            };
            let p = store.predict_detailed(&spec, &x)?;
            if let Some(path) = &cache {
                write(path, &store.to_json())?;
            }
            println!("output: {}", json!(p.output.to_vec()));
            println!("region {} {}", p.key, if p.hit { "hit" } else { "miss" });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Invalid(msg) | Failure::Refused(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

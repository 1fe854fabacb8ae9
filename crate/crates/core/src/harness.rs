//! Monte-Carlo sweeps comparing the matching-based assignment with the greedy
//! and random baselines.
//!
//! Seeding: at every grid point, run `r` draws its scenario from
//! `base_seed + r` (stream 0) and feeds the greedy and random baselines from
//! streams 2 and 3 of the same seed. Capacities `γ(k)` and budgets `l_i` are
//! drawn once per grid point from `base_seed` on stream 1 and shared by all
//! runs. Grid points reuse the same seeds, so neighbouring points see common
//! random numbers.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use plotters::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::{compute_mu, greedy_baseline, mwm_assign, random_baseline};
use crate::error::{Error, Result};
use crate::scenario::{draw_fixed, generate_with, GenConfig};

const SCENARIO_STREAM: u64 = 0;
const FIXED_STREAM: u64 = 1;
const GREEDY_STREAM: u64 = 2;
const RANDOM_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// Vary the number of SUs (`M = 20`, `l_max = 3`, `γ ∈ [1, 3]`).
    VaryN,
    /// Vary the largest budget (`M = 20`, `N = 8`, `γ ∈ [1, 3]`).
    VaryLmax,
    /// Vary the upper end of the capacity range `[1, b]` (`M = 20`, `N = 8`,
    /// `l_max = 3`).
    VaryGammaRange,
}

impl SweepKind {
    pub const ALL: [SweepKind; 3] = [SweepKind::VaryN, SweepKind::VaryLmax, SweepKind::VaryGammaRange];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::VaryN => "vary-n",
            SweepKind::VaryLmax => "vary-lmax",
            SweepKind::VaryGammaRange => "vary-gamma-range",
        }
    }

    fn axis_label(self) -> &'static str {
        match self {
            SweepKind::VaryN => "number of SUs N",
            SweepKind::VaryLmax => "maximum sensing budget l_max",
            SweepKind::VaryGammaRange => "capacity range upper end b (gamma ~ U[1, b])",
        }
    }

    fn default_grid(self) -> Vec<f64> {
        match self {
            SweepKind::VaryN => vec![4.0, 8.0, 12.0, 16.0, 20.0],
            SweepKind::VaryLmax | SweepKind::VaryGammaRange => vec![1.0, 2.0, 3.0, 4.0, 5.0],
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep kind `{s}`")))
    }
}

/// What to sweep, over which grid, and how many runs per grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Fixed parameters; the swept field is overwritten per grid point.
    #[serde(default)]
    pub base: GenConfig,
    pub grid: Vec<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn default_runs() -> usize {
    100
}

impl SweepSpec {
    /// The settings of the published comparison for `kind`, 100 runs per point.
    pub fn figure(kind: SweepKind, base_seed: u64) -> Self {
        let base = GenConfig {
            m: 20,
            n: 8,
            l_max: 3,
            gamma_range: [1.0, 3.0],
            ..GenConfig::default()
        };
        Self {
            kind,
            base,
            grid: kind.default_grid(),
            runs: default_runs(),
            base_seed,
        }
    }

    /// Parses a TOML document with the same fields as [`SweepSpec`].
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        for &v in &self.grid {
            self.config_at(v)?.validate()?;
        }
        Ok(())
    }

    /// Generator settings at one grid value.
    pub fn config_at(&self, value: f64) -> Result<GenConfig> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidConfig(format!(
                    "{} grid value {value} is not a nonnegative integer",
                    self.kind
                )))
            }
        };
        let mut cfg = self.base.clone();
        match self.kind {
            SweepKind::VaryN => cfg.n = count()?,
            SweepKind::VaryLmax => cfg.l_max = count()?,
            SweepKind::VaryGammaRange => cfg.gamma_range = [cfg.gamma_range[0], value],
        }
        cfg.seed = self.base_seed;
        Ok(cfg)
    }
}

/// Aggregates for one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub swept_value: f64,
    pub mwm_mean: f64,
    pub mwm_std: f64,
    pub greedy_mean: f64,
    pub greedy_std: f64,
    pub random_mean: f64,
    pub random_std: f64,
    /// Mean of `Σ_k (θ1(k) + θ2(k))` over runs.
    pub upper_bound: f64,
    pub mu_mean: f64,
    /// Mean of `(μ/2)·Σ_k (θ1(k) + θ2(k))` over runs.
    pub half_mu_upper_mean: f64,
}

impl SweepRow {
    /// Every algorithm mean is nonnegative and at most the upper bound.
    pub fn within_bounds(&self) -> bool {
        [self.mwm_mean, self.greedy_mean, self.random_mean]
            .iter()
            .all(|&v| v >= 0.0 && v <= self.upper_bound)
    }
}

/// Per-run measurements before aggregation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOutcome {
    pub mwm: f64,
    pub greedy: f64,
    pub random: f64,
    pub upper_bound: f64,
    pub mu: f64,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Evaluates all three algorithms on every run of one grid point.
pub fn run_grid_point(spec: &SweepSpec, value: f64) -> Result<Vec<RunOutcome>> {
    let cfg = spec.config_at(value)?;
    cfg.validate()?;
    let fixed = draw_fixed(&cfg, &mut stream_rng(spec.base_seed, FIXED_STREAM));
    (0..spec.runs as u64)
        .into_par_iter()
        .map(|run| {
            let seed = spec.base_seed.wrapping_add(run);
            let scenario = generate_with(&cfg, &fixed, &mut stream_rng(seed, SCENARIO_STREAM))?;
            let mwm = mwm_assign(&scenario)?;
            let greedy = greedy_baseline(&scenario, stream_rng(seed, GREEDY_STREAM))?;
            let random = random_baseline(&scenario, stream_rng(seed, RANDOM_STREAM))?;
            Ok(RunOutcome {
                mwm: mwm.value,
                greedy: greedy.value,
                random: random.value,
                upper_bound: scenario.upper_bound(),
                mu: compute_mu(&scenario).mu,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.context(format!("{} sweep at grid value {value}", spec.kind)))
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid
        .iter()
        .map(|&value| {
            let runs = run_grid_point(spec, value)?;
            Ok(aggregate(value, &runs))
        })
        .collect()
}

pub fn aggregate(value: f64, runs: &[RunOutcome]) -> SweepRow {
    let stats = |f: fn(&RunOutcome) -> f64| mean_std(&runs.iter().map(f).collect::<Vec<_>>());
    let (mwm_mean, mwm_std) = stats(|r| r.mwm);
    let (greedy_mean, greedy_std) = stats(|r| r.greedy);
    let (random_mean, random_std) = stats(|r| r.random);
    let (upper_bound, _) = stats(|r| r.upper_bound);
    let (mu_mean, _) = stats(|r| r.mu);
    let (half_mu_upper_mean, _) = stats(|r| 0.5 * r.mu * r.upper_bound);
    SweepRow {
        swept_value: value,
        mwm_mean,
        mwm_std,
        greedy_mean,
        greedy_std,
        random_mean,
        random_std,
        upper_bound,
        mu_mean,
        half_mu_upper_mean,
    }
}

/// Pairwise summation in a fixed split order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Mean and sample standard deviation (zero for a single sample).
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&sq) / (n - 1) as f64).sqrt())
}

#[derive(Serialize)]
struct CsvRow {
    swept_value: f64,
    mwm_mean: f64,
    mwm_std: f64,
    greedy_mean: f64,
    greedy_std: f64,
    random_mean: f64,
    random_std: f64,
    upper_bound: f64,
    mu_mean: f64,
}

impl From<&SweepRow> for CsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            swept_value: r.swept_value,
            mwm_mean: r.mwm_mean,
            mwm_std: r.mwm_std,
            greedy_mean: r.greedy_mean,
            greedy_std: r.greedy_std,
            random_mean: r.random_mean,
            random_std: r.random_std,
            upper_bound: r.upper_bound,
            mu_mean: r.mu_mean,
        }
    }
}

/// Renders rows as CSV with a header line.
pub fn to_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(CsvRow::from(row))?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Csv(e.into_error().into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emitted {
    pub csv: PathBuf,
    pub plot: PathBuf,
}

/// Writes `<kind>.csv` and `<kind>.svg` under `out_dir`.
pub fn emit(kind: SweepKind, rows: &[SweepRow], out_dir: impl AsRef<Path>) -> Result<Emitted> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to emit".into()));
    }
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let csv = out_dir.join(format!("{kind}.csv"));
    fs::write(&csv, to_csv(rows)?).map_err(|e| Error::io(&csv, e))?;
    let plot = out_dir.join(format!("{kind}.svg"));
    fs::write(&plot, render_svg(kind, rows)?).map_err(|e| Error::io(&plot, e))?;
    Ok(Emitted { csv, plot })
}

/// Series drawn in every plot: three algorithms plus the upper bound.
type Series = (&'static str, fn(&SweepRow) -> f64, RGBColor);

pub const PLOT_SERIES: [&str; 4] = ["MWM", "Greedy", "Random", "Upper bound"];

/// Line plot of mean throughput against the swept value.
pub fn render_svg(kind: SweepKind, rows: &[SweepRow]) -> Result<String> {
    let plot_err = |e: &dyn std::fmt::Display| Error::Plot(e.to_string());
    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (720, 480)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(&e))?;

        let x_lo = rows.iter().map(|r| r.swept_value).fold(f64::INFINITY, f64::min);
        let x_hi = rows.iter().map(|r| r.swept_value).fold(f64::NEG_INFINITY, f64::max);
        let pad = if x_hi > x_lo { 0.05 * (x_hi - x_lo) } else { 0.5 };
        let y_hi = rows.iter().map(|r| r.upper_bound).fold(0.0, f64::max) * 1.1;

        let mut chart = ChartBuilder::on(&root)
            .caption(format!("System throughput, {kind}"), ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56)
            .build_cartesian_2d((x_lo - pad)..(x_hi + pad), 0.0..y_hi.max(1e-9))
            .map_err(|e| plot_err(&e))?;
        chart
            .configure_mesh()
            .x_desc(kind.axis_label())
            .y_desc("mean system throughput")
            .draw()
            .map_err(|e| plot_err(&e))?;

        let series: [Series; 4] = [
            (PLOT_SERIES[0], |r| r.mwm_mean, RED),
            (PLOT_SERIES[1], |r| r.greedy_mean, BLUE),
            (PLOT_SERIES[2], |r| r.random_mean, GREEN),
            (PLOT_SERIES[3], |r| r.upper_bound, BLACK),
        ];
        for (name, value, color) in series {
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.swept_value, value(r))).collect();
            chart
                .draw_series(LineSeries::new(points.clone(), color.stroke_width(2)))
                .map_err(|e| plot_err(&e))?
                .label(name)
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color));
            chart
                .draw_series(points.into_iter().map(|p| Circle::new(p, 3, color.filled())))
                .map_err(|e| plot_err(&e))?;
        }
        chart
            .configure_series_labels()
            .position(SeriesLabelPosition::LowerRight)
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| plot_err(&e))?;
        root.present().map_err(|e| plot_err(&e))?;
    }
    Ok(svg)
}

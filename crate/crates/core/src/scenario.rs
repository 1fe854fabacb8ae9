//! Scenario generation, Product-Partition instances and the scenario file format.
//!
//! # Sensing model
//!
//! PUs and SUs are dropped uniformly in a square. For an SU at distance `d`
//! from a PU of power `p`, with `q = min(1, d² / (κ·p))`:
//!
//! * `d ≤ sensing_range`: `P_m = 0.05 + 0.45·q`, `P_f ~ U[0.05, 0.15]`;
//! * otherwise the SU reports a fair coin, `P_m = P_f = 0.5`.
//!
//! Misdetection grows with distance and shrinks with power, and every
//! probability stays in `(0, 0.5]`.

use std::fs;
use std::path::Path;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensing::{ChannelParams, Scenario, SuProfile};

/// Scenario file format version written by [`save`] and accepted by [`load`].
pub const FORMAT_VERSION: u32 = 1;

/// Control-slot fraction used by [`reduction_instance`].
pub const REDUCTION_T_C: f64 = 0.2;

const P_M_FLOOR: f64 = 0.05;
const P_M_SPAN: f64 = 0.45;
const P_F_RANGE: (f64, f64) = (0.05, 0.15);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    /// Side length of the square deployment area.
    pub area_side: f64,
    /// Number of channels (one PU each).
    pub m: usize,
    /// Number of SUs.
    pub n: usize,
    /// SU budgets are drawn uniformly from `1..=l_max`.
    pub l_max: usize,
    /// PU transmit power range.
    pub power_range: [f64; 2],
    pub t_c: f64,
    /// Normalized PU capacity range.
    pub gamma_range: [f64; 2],
    /// Distance beyond which an SU only reports coin flips.
    pub sensing_range: f64,
    /// Path-loss scale `κ` of the sensing model.
    pub kappa: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            area_side: 100.0,
            m: 20,
            n: 8,
            l_max: 3,
            power_range: [1.0, 10.0],
            t_c: 0.2,
            gamma_range: [1.0, 3.0],
            sensing_range: 50.0,
            kappa: 250.0,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("m = {} and n = {} must both be at least 1", self.m, self.n));
        }
        if self.l_max == 0 || self.l_max > self.m {
            return bad(format!("l_max = {} must lie in 1..={}", self.l_max, self.m));
        }
        for (name, [lo, hi]) in [("power_range", self.power_range), ("gamma_range", self.gamma_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo >= 0.0) {
                return bad(format!("{name} = [{lo}, {hi}] is not a nonnegative interval"));
            }
        }
        if self.power_range[0] <= 0.0 {
            return bad("power_range must be strictly positive".into());
        }
        if !(self.area_side > 0.0 && self.sensing_range >= 0.0 && self.kappa > 0.0) {
            return bad("area_side and kappa must be positive, sensing_range nonnegative".into());
        }
        if !(0.0..1.0).contains(&self.t_c) {
            return bad(format!("t_c = {} must lie in [0, 1)", self.t_c));
        }
        Ok(())
    }
}

/// Draws shared by every run at one sweep grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedDraws {
    pub gammas: Vec<f64>,
    pub budgets: Vec<usize>,
}

/// Draws `γ(k)` for every channel, then `l_i` for every SU.
pub fn draw_fixed<R: Rng>(config: &GenConfig, rng: &mut R) -> FixedDraws {
    let [g_lo, g_hi] = config.gamma_range;
    let gammas = (0..config.m).map(|_| rng.random_range(g_lo..=g_hi)).collect();
    let budgets = (0..config.n)
        .map(|_| rng.random_range(1..=config.l_max))
        .collect();
    FixedDraws { gammas, budgets }
}

/// Draws PU placement, power and `π0`, then SU placement and error
/// probabilities, reusing `fixed` for capacities and budgets.
///
/// Every SU draws its position and one `P_f` per channel in a fixed order, so
/// the first `n` SUs are identical across configs that differ only in `n`.
pub fn generate_with<R: Rng>(config: &GenConfig, fixed: &FixedDraws, rng: &mut R) -> Result<Scenario> {
    config.validate()?;
    if fixed.gammas.len() != config.m || fixed.budgets.len() != config.n {
        return Err(Error::InvalidConfig(format!(
            "fixed draws cover {} channels and {} SUs, config has {} and {}",
            fixed.gammas.len(),
            fixed.budgets.len(),
            config.m,
            config.n
        )));
    }
    let side = config.area_side;
    let [p_lo, p_hi] = config.power_range;

    let mut pus = Vec::with_capacity(config.m);
    let mut channels = Vec::with_capacity(config.m);
    for &gamma in &fixed.gammas {
        let x = rng.random_range(0.0..=side);
        let y = rng.random_range(0.0..=side);
        let power = rng.random_range(p_lo..=p_hi);
        let pi0 = rng.random_range(0.0..=1.0);
        pus.push((x, y, power));
        channels.push(ChannelParams { pi0, gamma });
    }

    let mut sus = Vec::with_capacity(config.n);
    for &budget in &fixed.budgets {
        let x = rng.random_range(0.0..=side);
        let y = rng.random_range(0.0..=side);
        let mut su = SuProfile::new(budget, vec![0.0; config.m], vec![0.0; config.m]);
        for (k, &(px, py, power)) in pus.iter().enumerate() {
            let pf = rng.random_range(P_F_RANGE.0..=P_F_RANGE.1);
            let d2 = (x - px).powi(2) + (y - py).powi(2);
            if d2.sqrt() <= config.sensing_range {
                let q = (d2 / (config.kappa * power)).min(1.0);
                su.pf[k] = pf;
                su.pm[k] = P_M_FLOOR + P_M_SPAN * q;
            } else {
                su.set_out_of_range(k);
            }
        }
        sus.push(su);
    }

    Scenario::new(config.t_c, channels, sus)
}

/// A full random scenario determined by `config.seed`.
pub fn generate(config: &GenConfig) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fixed = draw_fixed(config, &mut rng);
    generate_with(config, &fixed, &mut rng)
}

/// A two-channel instance encoding Product Partition over `a`.
///
/// `P_f = 0` everywhere, `P_m^i = a_i / 10^r` on both channels, `l_i = 1` and
/// both channels share `θ1 = θ2 = θ`. Maximizing throughput is then the same
/// as minimizing `∏_{S_1} P_m + ∏_{S_2} P_m` over splits of the SUs.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionInstance {
    pub a: Vec<u64>,
    /// Smallest integer with `max a_i ≤ 10^r`.
    pub r: u32,
    pub scenario: Scenario,
}

/// Builds the Product-Partition instance; `theta` must lie in `(0, 1 - T_c)`.
pub fn reduction_instance(a: &[u64], theta: f64) -> Result<ReductionInstance> {
    if a.is_empty() || a.contains(&0) {
        return Err(Error::InvalidConfig(
            "reduction needs a nonempty list of positive integers".into(),
        ));
    }
    let limit = 1.0 - REDUCTION_T_C;
    if !(theta > 0.0 && theta < limit) {
        return Err(Error::OutOfRange {
            field: "theta".into(),
            value: theta,
            range: "(0, 1 - t_c)",
        });
    }
    let max = *a.iter().max().expect("nonempty");
    let mut r = 0u32;
    while 10u128.pow(r) < max as u128 {
        r += 1;
    }
    let scale = 10f64.powi(r as i32);
    let pi0 = theta / limit;
    let gamma = theta / (1.0 - pi0);
    let channel = ChannelParams { pi0, gamma };
    let sus = a
        .iter()
        .map(|&ai| {
            let pm = ai as f64 / scale;
            SuProfile::new(1, vec![0.0; 2], vec![pm; 2])
        })
        .collect();
    let scenario = Scenario::new(REDUCTION_T_C, vec![channel; 2], sus)?;
    Ok(ReductionInstance {
        a: a.to_vec(),
        r,
        scenario,
    })
}

impl ReductionInstance {
    /// Exact `∏_{side} P_m + ∏_{rest} P_m` for the split with `side` on one
    /// channel and every other SU on the other. `None` on overflow.
    pub fn product_sum(&self, side: &[usize]) -> Option<Ratio<u128>> {
        let scale = 10u128.checked_pow(self.r)?;
        let product = |members: Vec<usize>| -> Option<Ratio<u128>> {
            members.into_iter().try_fold(Ratio::from_integer(1u128), |acc, i| {
                acc.checked_mul(&Ratio::new(self.a[i] as u128, scale))
            })
        };
        let inside = product(side.to_vec())?;
        let outside = product((0..self.a.len()).filter(|i| !side.contains(i)).collect())?;
        inside.checked_add(&outside)
    }

    /// Throughput `2θ1 + θ2(2 - product_sum)` of a split, in floating point.
    pub fn split_value(&self, side: &[usize]) -> f64 {
        let s = &self.scenario;
        let pm = |i: usize| s.su(i).pm[0];
        let inside: f64 = side.iter().map(|&i| pm(i)).product();
        let outside: f64 = (0..s.n()).filter(|i| !side.contains(i)).map(pm).product();
        let c = s.channel(0);
        2.0 * c.theta1() + c.theta2() * (2.0 - (inside + outside))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    format_version: u32,
    t_c: f64,
    channels: Vec<ChannelParams>,
    sus: Vec<SuProfile>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

/// Writes `scenario` as a versioned JSON document. Floats use the shortest
/// representation that parses back to the same bits.
pub fn save(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(scenario)).map_err(|e| Error::io(path, e))
}

pub fn to_json(scenario: &Scenario) -> String {
    let file = ScenarioFile {
        format_version: FORMAT_VERSION,
        t_c: scenario.t_c(),
        channels: scenario.channels().iter().map(|c| c.params()).collect(),
        sus: scenario.sus().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
    text.push('\n');
    text
}

pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text, path)
}

/// Parses a scenario document; `origin` only labels error messages.
pub fn from_json(text: &str, origin: &Path) -> Result<Scenario> {
    let parse_error = |field: String, e: serde_json::Error| Error::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        field,
        message: e.to_string(),
    };
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|e| parse_error("format_version".into(), e))?;
    if probe.format_version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: probe.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        parse_error(field, e.into_inner())
    })?;
    Scenario::new(file.t_c, file.channels, file.sus)
        .map_err(|e| e.context(format!("invalid scenario in {}", origin.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::channel_throughput;

    #[test]
    fn generation_is_seeded() {
        let cfg = GenConfig {
            seed: 17,
            ..GenConfig::default()
        };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = GenConfig { seed: 18, ..cfg.clone() };
        assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn figure_shape() {
        let s = generate(&GenConfig::default()).unwrap();
        assert_eq!((s.m(), s.n()), (20, 8));
        assert!(s.sus().iter().all(|su| (1..=3).contains(&su.budget)));
        assert!(s.channels().iter().all(|c| (1.0..=3.0).contains(&c.gamma())));
    }

    #[test]
    fn probabilities_stay_in_model_range() {
        for seed in 0..20 {
            let s = generate(&GenConfig {
                seed,
                ..GenConfig::default()
            })
            .unwrap();
            for su in s.sus() {
                for k in 0..s.m() {
                    if su.is_coin_flip(k) {
                        continue;
                    }
                    assert!(su.pf[k] > 0.0 && su.pf[k] <= 0.5);
                    assert!(su.pm[k] > 0.0 && su.pm[k] <= 0.5);
                }
            }
        }
    }

    #[test]
    fn growing_n_keeps_earlier_sus() {
        let small = GenConfig { n: 4, ..GenConfig::default() };
        let large = GenConfig { n: 8, ..GenConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fixed_small = draw_fixed(&small, &mut rng);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fixed_large = draw_fixed(&large, &mut rng);
        assert_eq!(fixed_small.budgets[..], fixed_large.budgets[..4]);
        let a = generate_with(&small, &fixed_small, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = generate_with(&large, &fixed_large, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a.sus(), &b.sus()[..4]);
        assert_eq!(a.channels(), b.channels());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = GenConfig::default();
        for cfg in [
            GenConfig { m: 0, ..base.clone() },
            GenConfig { l_max: 21, ..base.clone() },
            GenConfig { gamma_range: [3.0, 1.0], ..base.clone() },
            GenConfig { t_c: 1.0, ..base.clone() },
        ] {
            assert!(matches!(generate(&cfg), Err(Error::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn reduction_scaling() {
        let inst = reduction_instance(&[1, 4, 2, 2], 0.5).unwrap();
        assert_eq!(inst.r, 1);
        let pm: Vec<f64> = inst.scenario.sus().iter().map(|s| s.pm[0]).collect();
        assert_eq!(pm, vec![0.1, 0.4, 0.2, 0.2]);
        assert_eq!(reduction_instance(&[10], 0.5).unwrap().r, 1);
        assert_eq!(reduction_instance(&[11], 0.5).unwrap().r, 2);
        assert_eq!(reduction_instance(&[1], 0.5).unwrap().r, 0);
        let c = inst.scenario.channel(1);
        assert!((c.theta1() - 0.5).abs() < 1e-15 && (c.theta2() - 0.5).abs() < 1e-15);
        assert!(reduction_instance(&[1, 0], 0.5).is_err());
        assert!(reduction_instance(&[1], 0.8).is_err());
    }

    #[test]
    fn reduction_two_equal_items() {
        let inst = reduction_instance(&[2, 2], 0.3).unwrap();
        assert_eq!(inst.product_sum(&[0]), Some(Ratio::new(4, 10)));
        let c = inst.scenario.channel(0);
        let expected = 2.0 * c.theta1() + c.theta2() * (2.0 - 0.4);
        assert!((inst.split_value(&[0]) - expected).abs() < 1e-15);
        let u = channel_throughput(&[0], 0, &inst.scenario).unwrap()
            + channel_throughput(&[1], 1, &inst.scenario).unwrap();
        assert!((u - expected).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = generate(&GenConfig { seed: 3, ..GenConfig::default() }).unwrap();
        let back = from_json(&to_json(&s), Path::new("mem")).unwrap();
        assert_eq!(s, back);
        for (a, b) in s.sus().iter().zip(back.sus()) {
            for (x, y) in a.pf.iter().zip(&b.pf) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn minimal_literal_file() {
        let text = r#"{
  "format_version": 1,
  "t_c": 0.2,
  "channels": [{ "pi0": 0.25, "gamma": 2.0 }],
  "sus": [{ "budget": 1, "pf": [0.1], "pm": [0.3] }]
}"#;
        let s = from_json(text, Path::new("min.json")).unwrap();
        assert_eq!((s.m(), s.n()), (1, 1));
        assert_eq!(s.channel(0).pi0(), 0.25);
        assert_eq!(s.channel(0).gamma(), 2.0);
        assert_eq!(s.su(0), &SuProfile::new(1, vec![0.1], vec![0.3]));
    }

    #[test]
    fn bad_files_are_rejected() {
        let bad_pf = r#"{"format_version": 1, "t_c": 0.2,
            "channels": [{"pi0": 0.5, "gamma": 1.0}],
            "sus": [{"budget": 1, "pf": [1.5], "pm": [0.1]}]}"#;
        let err = from_json(bad_pf, Path::new("x.json")).unwrap_err();
        assert!(err.to_string().contains("sus[0].pf[0]"), "{err}");

        let wrong_type = r#"{"format_version": 1, "t_c": 0.2,
            "channels": [{"pi0": "half", "gamma": 1.0}], "sus": []}"#;
        match from_json(wrong_type, Path::new("x.json")).unwrap_err() {
            Error::Parse { line, field, .. } => {
                assert_eq!(line, 2);
                assert_eq!(field, "channels[0].pi0");
            }
            other => panic!("unexpected {other:?}"),
        }

        let future = r#"{"format_version": 2, "anything": true}"#;
        assert!(matches!(
            from_json(future, Path::new("x.json")),
            Err(Error::UnsupportedVersion { found: 2, expected: 1 })
        ));

        assert!(matches!(
            from_json("{ not json", Path::new("x.json")),
            Err(Error::Parse { .. })
        ));
    }
}

//! Deterministic synthetic profiles for desk-scale experiments and tests.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{normalize, Profile, ProfileKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Uniform,
    DiurnalSine,
    SeasonalSine,
    Block,
    /// Clipped sine shape modulated by persistent log-normal weather noise.
    NoiseMix,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Pattern::Uniform),
            "diurnal-sine" => Ok(Pattern::DiurnalSine),
            "seasonal-sine" => Ok(Pattern::SeasonalSine),
            "block" => Ok(Pattern::Block),
            "seeded-noise-mix" => Ok(Pattern::NoiseMix),
            other => Err(Error::Validation(format!(
                "unknown pattern `{other}` (expected uniform, diurnal-sine, seasonal-sine, \
                 block or seeded-noise-mix)"
            ))),
        }
    }
}

impl Pattern {
    pub fn name(self) -> &'static str {
        match self {
            Pattern::Uniform => "uniform",
            Pattern::DiurnalSine => "diurnal-sine",
            Pattern::SeasonalSine => "seasonal-sine",
            Pattern::Block => "block",
            Pattern::NoiseMix => "seeded-noise-mix",
        }
    }
}

/// Shape parameters. `None` picks the pattern's default.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub kind: ProfileKind,
    /// Constant offset of the sine (before clipping at zero).
    pub base: Option<f64>,
    pub amplitude: Option<f64>,
    /// Phase shift in radians.
    pub phase: f64,
    /// Period in steps. Diurnal defaults to one day, seasonal to the whole horizon.
    pub period_steps: Option<f64>,
    /// Standard deviation of the log-normal multiplicative noise.
    pub noise: Option<f64>,
    /// Active steps (0-based) of a block profile.
    pub on: Vec<usize>,
    pub step_hours: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            kind: ProfileKind::Generation,
            base: None,
            amplitude: None,
            phase: 0.0,
            period_steps: None,
            noise: None,
            on: Vec::new(),
            step_hours: 1.0,
        }
    }
}

/// Builds a normalized synthetic profile. Identical arguments give identical output.
pub fn synth(pattern: Pattern, steps: usize, params: &SynthParams, seed: u64) -> Result<Profile> {
    if steps < 2 {
        return Err(Error::Validation(format!(
            "a profile needs at least 2 steps, got {steps}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let day = 24.0 / params.step_hours;
    let raw: Vec<f64> = match pattern {
        Pattern::Uniform => vec![1.0; steps],
        Pattern::Block => {
            if params.on.is_empty() {
                return Err(Error::Validation("block pattern needs active steps".into()));
            }
            let mut v = vec![0.0; steps];
            for &t in &params.on {
                if t >= steps {
                    return Err(Error::Validation(format!(
                        "block step {t} outside 0..{steps}"
                    )));
                }
                v[t] = 1.0;
            }
            v
        }
        Pattern::DiurnalSine | Pattern::SeasonalSine | Pattern::NoiseMix => {
            let (base, amplitude, period, noise) = match pattern {
                Pattern::DiurnalSine => (0.0, 1.0, day, 0.0),
                Pattern::SeasonalSine => (1.0, 0.5, steps as f64, 0.0),
                _ => (0.2, 1.0, day, 0.6),
            };
            let base = params.base.unwrap_or(base);
            let amplitude = params.amplitude.unwrap_or(amplitude);
            let period = params.period_steps.unwrap_or(period);
            let noise = params.noise.unwrap_or(noise);
            if !(period > 0.0) {
                return Err(Error::Validation(format!(
                    "period must be positive, got {period}"
                )));
            }
            // AR(1) weather state with unit stationary variance and multi-day memory.
            let persistence: f64 = (-1.0 / (3.0 * day)).exp();
            let innovation = (1.0 - persistence * persistence).sqrt();
            let mut state: f64 = StandardNormal.sample(&mut rng);
            (0..steps)
                .map(|t| {
                    let shape = base + amplitude * (TAU * t as f64 / period + params.phase).sin();
                    let weather = if noise > 0.0 {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        state = persistence * state + innovation * z;
                        (noise * state).exp()
                    } else {
                        1.0
                    };
                    shape.max(0.0) * weather
                })
                .collect()
        }
    };
    let label = format!("{}#{}", pattern.name(), seed);
    normalize(&raw, params.kind, label)?.with_step_hours(params.step_hours)
}

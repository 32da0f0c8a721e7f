#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use re100::profiles::{normalize, Profile, ProfileKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn demand(rng: &mut ChaCha8Rng, n: usize) -> Profile {
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let raw: Vec<f64> = (0..n)
        .map(|t| {
            let daily = (std::f64::consts::TAU * t as f64 / 24.0 + phase).sin();
            1.0 + 0.3 * daily + rng.random_range(0.0..0.4)
        })
        .collect();
    normalize(&raw, ProfileKind::Demand, "demand").unwrap()
}

/// Solar-like, wind-like or sparse random generation.
pub fn generation(rng: &mut ChaCha8Rng, n: usize) -> Profile {
    let raw: Vec<f64> = match rng.random_range(0..3) {
        0 => {
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            (0..n)
                .map(|t| {
                    let sun = (std::f64::consts::TAU * t as f64 / 24.0 + phase)
                        .sin()
                        .max(0.0);
                    sun * rng.random_range(0.2..1.0)
                })
                .collect()
        }
        1 => {
            let mut state: f64 = rng.random_range(0.0..1.0);
            (0..n)
                .map(|_| {
                    state = (0.8 * state + 0.2 * rng.random_range(0.0..1.0)).clamp(0.0, 1.0);
                    state * state * state
                })
                .collect()
        }
        _ => (0..n)
            .map(|_| {
                if rng.random_bool(0.3) {
                    0.0
                } else {
                    rng.random_range(0.0..1.0)
                }
            })
            .collect(),
    };
    let raw = if raw.iter().all(|v| *v == 0.0) {
        vec![1.0; n]
    } else {
        raw
    };
    normalize(&raw, ProfileKind::Generation, "generation").unwrap()
}

pub fn pair(seed: u64, n: usize) -> (Profile, Profile) {
    let mut r = rng(seed);
    (demand(&mut r, n), generation(&mut r, n))
}

/// Profiles with steps sized so that `n` steps span one year.
pub fn year_pair(seed: u64, n: usize) -> (Profile, Profile) {
    let (d, g) = pair(seed, n);
    let h = 8760.0 / n as f64;
    (d.with_step_hours(h).unwrap(), g.with_step_hours(h).unwrap())
}

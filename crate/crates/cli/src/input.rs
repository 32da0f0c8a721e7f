//! Profile inputs: files or synthetic patterns.

use std::path::PathBuf;

use clap::Args;
use re100::oracle::fingerprint;
use re100::profiles::{ingest_csv, ingest_occto, mix, synth, Pattern, SynthParams};
use re100::{Error, Profile, ProfileKind, Result};

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Profile file (`timestamp, demand, <source>…`). Repeat for several profiles.
    #[arg(long, value_name = "FILE")]
    pub input: Vec<PathBuf>,
    /// Require a full year of hourly rows (8760 or 8784).
    #[arg(long)]
    pub occto: bool,
    /// Generation column to use; defaults to the first.
    #[arg(long, value_name = "NAME")]
    pub source: Option<String>,
    /// Mix the first two generation columns, giving this share to PV.
    #[arg(long, value_name = "BETA")]
    pub pv_ratio: Option<f64>,

    /// Steps of a synthetic profile (used when no --input is given).
    #[arg(long, default_value_t = 24)]
    pub steps: usize,
    #[arg(long, default_value = "uniform", value_name = "PATTERN")]
    pub demand_pattern: String,
    #[arg(long, default_value = "diurnal-sine", value_name = "PATTERN")]
    pub gen_pattern: String,
    /// Second synthetic generation source, for --pv-ratio.
    #[arg(long, value_name = "PATTERN")]
    pub gen2_pattern: Option<String>,
    /// Active steps of a block generation pattern, e.g. `0,1`.
    #[arg(long, value_delimiter = ',', value_name = "STEPS")]
    pub block_on: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0, value_name = "HOURS")]
    pub step_hours: f64,
}

/// One demand/generation pair ready for analysis.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub demand: Profile,
    pub generation: Profile,
    /// Header line describing where the data came from.
    pub description: String,
}

fn is_pv(name: &str) -> bool {
    let n = name.to_ascii_lowercase();
    n.contains("pv") || n.contains("solar")
}

/// Mixes two sources with `beta` going to the PV-like one, or to the first.
fn mixed(sources: &[(String, Profile)], beta: f64) -> Result<(String, Profile)> {
    if sources.len() < 2 {
        return Err(Error::Validation(format!(
            "--pv-ratio needs two generation sources, found {}",
            sources.len()
        )));
    }
    let (a, b) = if !is_pv(&sources[0].0) && is_pv(&sources[1].0) {
        (&sources[1], &sources[0])
    } else {
        (&sources[0], &sources[1])
    };
    let g = mix(&[&a.1, &b.1], &[beta, 1.0 - beta])?;
    Ok((format!("{beta}*{} + {}*{}", a.0, 1.0 - beta, b.0), g))
}

fn pick(args: &InputArgs, sources: &[(String, Profile)]) -> Result<(String, Profile)> {
    if let Some(beta) = args.pv_ratio {
        return mixed(sources, beta);
    }
    match &args.source {
        Some(name) => sources
            .iter()
            .find(|(n, _)| n == name)
            .cloned()
            .ok_or_else(|| Error::Validation(format!("no generation column `{name}`"))),
        None => Ok(sources[0].clone()),
    }
}

fn synthetic(args: &InputArgs) -> Result<Instance> {
    let make = |pattern: &str, kind: ProfileKind, seed: u64| -> Result<Profile> {
        let pattern: Pattern = pattern.parse()?;
        let params = SynthParams {
            kind,
            on: args.block_on.clone(),
            step_hours: args.step_hours,
            ..SynthParams::default()
        };
        synth(pattern, args.steps, &params, seed)
    };
    let demand = make(&args.demand_pattern, ProfileKind::Demand, args.seed)?;
    let mut sources = vec![(
        args.gen_pattern.clone(),
        make(
            &args.gen_pattern,
            ProfileKind::Generation,
            args.seed.wrapping_add(1),
        )?,
    )];
    if let Some(p) = &args.gen2_pattern {
        sources.push((
            p.clone(),
            make(p, ProfileKind::Generation, args.seed.wrapping_add(2))?,
        ));
    }
    let (name, generation) = pick(args, &sources)?;
    let description = format!(
        "synthetic steps={} demand={} generation={} seed={} fingerprint={}",
        args.steps,
        args.demand_pattern,
        name,
        args.seed,
        fingerprint(&[&demand, &generation], &[])
    );
    Ok(Instance {
        label: "synthetic".into(),
        demand,
        generation,
        description,
    })
}

impl InputArgs {
    pub fn load(&self) -> Result<Vec<Instance>> {
        if self.input.is_empty() {
            return Ok(vec![synthetic(self)?]);
        }
        self.input
            .iter()
            .map(|path| {
                let label = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "input".into());
                let set = if self.occto {
                    ingest_occto(path, &label, "")
                } else {
                    ingest_csv(path, &label, "")
                }
                .map_err(|e| match e {
                    Error::Ingest {
                        row,
                        column,
                        message,
                    } => Error::Ingest {
                        row,
                        column,
                        message: format!("{}: {message}", path.display()),
                    },
                    other => other,
                })?;
                let (name, generation) = pick(self, &set.generations)?;
                let description = format!(
                    "input {} generation={} steps={} fingerprint={}",
                    path.display(),
                    name,
                    set.len(),
                    fingerprint(&[&set.demand, &generation], &[])
                );
                Ok(Instance {
                    label,
                    demand: set.demand,
                    generation,
                    description,
                })
            })
            .collect()
    }

    pub fn load_one(&self) -> Result<Instance> {
        let mut all = self.load()?;
        if all.len() != 1 {
            return Err(Error::Validation(format!(
                "this subcommand takes one profile, got {}",
                all.len()
            )));
        }
        Ok(all.remove(0))
    }
}

/// Parses `lo:hi:n`.
pub fn parse_sweep(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected lo:hi:n, got `{s}`"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad number `{lo}`"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad number `{hi}`"))?;
    let n: usize = n.parse().map_err(|_| format!("bad count `{n}`"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && n >= 1) {
        return Err(format!("need finite lo <= hi and n >= 1, got `{s}`"));
    }
    Ok((lo, hi, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps() {
        assert_eq!(parse_sweep("1:4:31"), Ok((1.0, 4.0, 31)));
        assert!(parse_sweep("4:1:3").is_err());
        assert!(parse_sweep("1:2").is_err());
    }
}

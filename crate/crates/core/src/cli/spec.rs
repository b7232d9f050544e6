//! JSON run configuration and flag/file merging.
//!
//! Every parameter a command needs can come from a JSON config file
//! (`--config run.json`) or from command-line flags; flags win. Grids are
//! written as `from:to:step` (linear, inclusive), `log:from:to:count`
//! (log-spaced), or as a comma-separated list.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::channel::PilotMode;
use crate::error::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub code: CodeSection,
    #[serde(default)]
    pub queue: QueueSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub m_t: Option<usize>,
    pub m_r: Option<usize>,
    pub ell: Option<usize>,
    pub n_c: Option<usize>,
    pub n_p: Option<usize>,
    pub rho_db: Option<f64>,
    pub pilot_mode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub k: Option<u32>,
    pub n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueSection {
    pub lambda: Option<f64>,
    pub n: Option<u32>,
    pub eps: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub alpha: Option<f64>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<String>,
    pub format: Option<String>,
}

impl FileSpec {
    pub fn load(path: Option<&Path>) -> Result<FileSpec> {
        match path {
            None => Ok(FileSpec::default()),
            Some(p) => {
                let text = fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("invalid config file {}: {e}", p.display())))
            }
        }
    }
}

/// Flag value if present, else config-file value, else an error naming both
/// spellings of the parameter.
pub fn require<T>(flag: Option<T>, file: Option<T>, flag_name: &str, file_name: &str) -> Result<T> {
    flag.or(file).ok_or_else(|| {
        Error::Config(format!(
            "missing required parameter: pass --{flag_name} or set {file_name} in the config file"
        ))
    })
}

pub fn parse_pilot_mode(s: &str) -> Result<PilotMode> {
    match s.to_ascii_lowercase().as_str() {
        "explicit" => Ok(PilotMode::Explicit),
        "equivalent" => Ok(PilotMode::Equivalent),
        other => Err(Error::Config(format!(
            "pilot_mode must be 'explicit' or 'equivalent' (got '{other}')"
        ))),
    }
}

/// Parses a grid specification into an explicit list of values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let bad = |msg: &str| Error::Config(format!("invalid grid '{spec}': {msg}"));
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected log:from:to:count"));
        }
        let from: f64 = parts[0].parse().map_err(|_| bad("bad 'from'"))?;
        let to: f64 = parts[1].parse().map_err(|_| bad("bad 'to'"))?;
        let count: usize = parts[2].parse().map_err(|_| bad("bad 'count'"))?;
        if !(from > 0.0 && to > from && count >= 2) {
            return Err(bad("need 0 < from < to and count >= 2"));
        }
        let ratio = (to / from).powf(1.0 / (count - 1) as f64);
        let mut grid: Vec<f64> = (0..count).map(|i| from * ratio.powi(i as i32)).collect();
        // Pin the endpoints exactly; powf can overshoot by an ulp.
        grid[0] = from;
        grid[count - 1] = to;
        return Ok(grid);
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected from:to:step"));
        }
        let from: f64 = parts[0].parse().map_err(|_| bad("bad 'from'"))?;
        let to: f64 = parts[1].parse().map_err(|_| bad("bad 'to'"))?;
        let step: f64 = parts[2].parse().map_err(|_| bad("bad 'step'"))?;
        if step.is_nan() || step <= 0.0 || to < from {
            return Err(bad("need step > 0 and to >= from"));
        }
        let count = ((to - from) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| from + i as f64 * step).collect());
    }
    spec.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|_| bad("bad number")))
        .collect()
}

/// Parses antenna pairs like `1x2,2x2` into `(m_t, m_r)` tuples.
pub fn parse_antennas(spec: &str) -> Result<Vec<(usize, usize)>> {
    if spec.trim().is_empty() {
        return Err(Error::Config("antenna list must be nonempty".into()));
    }
    spec.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (t, r) = tok
                .split_once('x')
                .ok_or_else(|| Error::Config(format!("bad antenna pair '{tok}' (want MTxMR)")))?;
            let m_t = t
                .parse()
                .map_err(|_| Error::Config(format!("bad antenna pair '{tok}'")))?;
            let m_r = r
                .parse()
                .map_err(|_| Error::Config(format!("bad antenna pair '{tok}'")))?;
            Ok((m_t, m_r))
        })
        .collect()
}

/// Parses diversity scenarios like `2x50,5x20,20x5` into `(ell, n_c)` pairs.
pub fn parse_scenarios(spec: &str) -> Result<Vec<(usize, usize)>> {
    parse_antennas(spec)
        .map_err(|_| Error::Config(format!("bad scenario list '{spec}' (want ELLxNC,...)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid_is_inclusive() {
        let g = parse_grid("-6:3:0.25").unwrap();
        assert_eq!(g.len(), 37);
        assert_eq!(g[0], -6.0);
        assert!((g[36] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_grid_hits_endpoints() {
        let g = parse_grid("log:0.001:1:4").unwrap();
        assert_eq!(g.len(), 4);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comma_list_and_singleton() {
        assert_eq!(parse_grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn bad_grids_are_config_errors() {
        assert!(parse_grid("3:1:0.5").is_err());
        assert!(parse_grid("log:0:1:5").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn antenna_pairs_parse() {
        assert_eq!(parse_antennas("1x1, 2x2").unwrap(), vec![(1, 1), (2, 2)]);
        assert!(parse_antennas("").is_err());
        assert!(parse_antennas("2y2").is_err());
    }
}

//! Experiment configuration: command-line flags merged over an optional
//! key-value config file (flags win on conflict).
//!
//! Config file format: one `key = value` per line, `#` comments allowed.
//! Recognized keys mirror the flags: `integrand`, `seed`, `out`, `grid`,
//! `nosc`, `tol`, `levels`, `map`, `samples`, `interval`, `weight-grid`,
//! `pair-a`, `pair-b`, `lambda`. List values are comma separated.

use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Laminate,
    Rigidity,
    Moments,
    Recover,
    Stationarity,
    Hpcheck,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub integrand: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub n_osc: Vec<usize>,
    pub grids: Vec<usize>,
    pub tol: Option<f64>,
    pub levels: Vec<f64>,
    pub map: String,
    pub samples: usize,
    pub interval: (f64, f64),
    pub weight_grid: usize,
    pub pair_a: Option<[f64; 4]>,
    pub pair_b: Option<[f64; 4]>,
    pub lambda: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Laminate,
            integrand: "quad".into(),
            seed: 0,
            out: None,
            n_osc: vec![5, 10, 20, 40],
            grids: vec![32, 64, 128],
            tol: None,
            levels: vec![0.25, 1.0, 4.0],
            map: "affine".into(),
            samples: 101,
            interval: (-5.0, 5.0),
            weight_grid: 1000,
            pair_a: None,
            pair_b: None,
            lambda: 0.5,
        }
    }
}

/// One parsed `key = value` assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses the key-value config text. Errors carry line and field
/// diagnostics.
pub fn parse_config_text(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config line {}: expected 'key = value', found '{}'",
                lineno + 1,
                raw.trim()
            ));
        };
        entries.push(ConfigEntry {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line: lineno + 1,
        });
    }
    Ok(entries)
}

fn parse_list<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(|s| {
            s.trim().parse::<T>().map_err(|_| {
                format!(
                    "config line {line}, field '{key}': bad list element '{}'",
                    s.trim()
                )
            })
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T, String> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| format!("config line {line}, field '{key}': bad value '{value}'"))
}

fn parse_mat(value: &str, line: usize, key: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = parse_list(value, line, key)?;
    if v.len() != 4 {
        return Err(format!(
            "config line {line}, field '{key}': expected 4 comma-separated entries, got {}",
            v.len()
        ));
    }
    Ok([v[0], v[1], v[2], v[3]])
}

/// Applies config-file entries to `cfg`. Only fields not already set by
/// flags should be passed here; the caller enforces flag precedence by
/// applying the file first and flags second.
pub fn apply_entries(cfg: &mut ExperimentConfig, entries: &[ConfigEntry]) -> Result<(), String> {
    for e in entries {
        let (key, value, line) = (e.key.as_str(), e.value.as_str(), e.line);
        match key {
            "integrand" => cfg.integrand = value.to_string(),
            "seed" => cfg.seed = parse_scalar(value, line, key)?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "grid" => cfg.grids = parse_list(value, line, key)?,
            "nosc" => cfg.n_osc = parse_list(value, line, key)?,
            "tol" => cfg.tol = Some(parse_scalar(value, line, key)?),
            "levels" => cfg.levels = parse_list(value, line, key)?,
            "map" => cfg.map = value.to_string(),
            "samples" => cfg.samples = parse_scalar(value, line, key)?,
            "interval" => {
                let v: Vec<f64> = parse_list(value, line, key)?;
                if v.len() != 2 {
                    return Err(format!(
                        "config line {line}, field 'interval': expected 'lo, hi'"
                    ));
                }
                cfg.interval = (v[0], v[1]);
            }
            "weight-grid" => cfg.weight_grid = parse_scalar(value, line, key)?,
            "pair-a" => cfg.pair_a = Some(parse_mat(value, line, key)?),
            "pair-b" => cfg.pair_b = Some(parse_mat(value, line, key)?),
            "lambda" => cfg.lambda = parse_scalar(value, line, key)?,
            other => return Err(format!("config line {line}: unknown field '{other}'")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_applies_entries() {
        let text = "# comment\nseed = 7\nnosc = 5, 10\ninterval = -3, 3\n";
        let entries = parse_config_text(text).unwrap();
        let mut cfg = ExperimentConfig::default();
        apply_entries(&mut cfg, &entries).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_osc, vec![5, 10]);
        assert_eq!(cfg.interval, (-3.0, 3.0));
    }

    #[test]
    fn reports_line_and_field() {
        let err = parse_config_text("seed 7\n").unwrap_err();
        assert!(err.contains("line 1"), "{err}");
        let entries = parse_config_text("nosc = 5, x\n").unwrap();
        let mut cfg = ExperimentConfig::default();
        let err = apply_entries(&mut cfg, &entries).unwrap_err();
        assert!(err.contains("line 1") && err.contains("nosc"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let entries = parse_config_text("grids = 8\n").unwrap();
        let mut cfg = ExperimentConfig::default();
        assert!(apply_entries(&mut cfg, &entries).is_err());
    }
}

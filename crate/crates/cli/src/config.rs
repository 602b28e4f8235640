//! Flat `key = value` experiment settings, merged with command-line flags.

use crate::CliError;
use scv::{InterpolationMode, Method};
use std::path::Path;
use std::str::FromStr;

/// Every knob a campaign reads. `None` falls back to the subcommand default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub methods: Option<Vec<Method>>,
    pub s: Option<usize>,
    pub d: Option<usize>,
    pub p: Option<f64>,
    pub m_list: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub deltas: Option<Vec<f64>>,
    pub thresholds: Option<Vec<f64>>,
    pub bins: Option<usize>,
    pub trials: Option<usize>,
    pub mode: Option<InterpolationMode>,
}

fn parse_one<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim().parse().map_err(|_| CliError::Config(format!("bad value `{raw}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError> {
    let items: Vec<T> = raw.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_one(key, t)).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::Config(format!("empty list for `{key}`")));
    }
    Ok(items)
}

impl Settings {
    /// Parse the file format: one `key = value` per line, `#` starts a
    /// comment, lists are comma separated.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            out.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", lineno + 1, e.message())))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key.to_ascii_lowercase().as_str() {
            "method" | "methods" => {
                self.methods = Some(
                    parse_list::<String>(key, value)?
                        .iter()
                        .map(|m| m.parse().map_err(|e: scv::Error| CliError::Config(e.to_string())))
                        .collect::<Result<_, _>>()?,
                )
            }
            "s" => self.s = Some(parse_one(key, value)?),
            "d" => self.d = Some(parse_one(key, value)?),
            "p" => self.p = Some(parse_one(key, value)?),
            "m" | "m_list" => self.m_list = Some(parse_list(key, value)?),
            "r" | "reps" => self.reps = Some(parse_one(key, value)?),
            "k" => self.k = Some(parse_one(key, value)?),
            "seed" => self.seed = Some(parse_one(key, value)?),
            "delta" | "delta_list" | "deltas" => self.deltas = Some(parse_list(key, value)?),
            "thresholds" | "threshold" => self.thresholds = Some(parse_list(key, value)?),
            "bins" => self.bins = Some(parse_one(key, value)?),
            "trials" => self.trials = Some(parse_one(key, value)?),
            "mode" => self.mode = Some(value.parse().map_err(|e: scv::Error| CliError::Config(e.to_string()))?),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Values set in `over` win.
    pub fn merge(self, over: Settings) -> Settings {
        Settings {
            methods: over.methods.or(self.methods),
            s: over.s.or(self.s),
            d: over.d.or(self.d),
            p: over.p.or(self.p),
            m_list: over.m_list.or(self.m_list),
            reps: over.reps.or(self.reps),
            k: over.k.or(self.k),
            seed: over.seed.or(self.seed),
            deltas: over.deltas.or(self.deltas),
            thresholds: over.thresholds.or(self.thresholds),
            bins: over.bins.or(self.bins),
            trials: over.trials.or(self.trials),
            mode: over.mode.or(self.mode),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_format() {
        let text = "# campaign\nmethod = SCV, CV_MOM\ns = 3\nm_list = 2,4 , 8\nR = 50  # small\n\ndelta = 0.1,0.05\nmode = shifted\nseed=9\n";
        let s = Settings::parse(text).unwrap();
        assert_eq!(s.methods, Some(vec![Method::Scv, Method::CvMom]));
        assert_eq!(s.s, Some(3));
        assert_eq!(s.m_list, Some(vec![2, 4, 8]));
        assert_eq!(s.reps, Some(50));
        assert_eq!(s.deltas, Some(vec![0.1, 0.05]));
        assert_eq!(s.mode, Some(InterpolationMode::Shifted));
        assert_eq!(s.seed, Some(9));
        assert_eq!(s.k, None);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Settings::parse("s 3").is_err());
        assert!(Settings::parse("colour = blue").is_err());
        assert!(Settings::parse("s = two").is_err());
        assert!(Settings::parse("m = ,").is_err());
        assert!(Settings::parse("method = QMC").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = Settings { s: Some(3), k: Some(5), ..Default::default() };
        let flags = Settings { s: Some(2), ..Default::default() };
        let merged = file.merge(flags);
        assert_eq!(merged.s, Some(2));
        assert_eq!(merged.k, Some(5));
    }
}

use std::fmt;
use std::str::FromStr;

use homsense_core::qfi::TablePreset;
use homsense_core::{Convention, PhaseMatchingSpec, SearchWindow, TrialCounts, Which};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const PROVENANCE_TAG: &str = "# homsense-provenance ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// One `omega,t,value` line per grid sample (wigner only).
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Tau,
    Mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
}

/// `start:stop:count` sampling of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        let step = (self.stop - self.start) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { self.stop } else { self.start + step * i as f64 }).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let start: f64 = a.trim().parse().map_err(|e| format!("bad start {a:?}: {e}"))?;
        let stop: f64 = b.trim().parse().map_err(|e| format!("bad stop {b:?}: {e}"))?;
        let count: usize = c.trim().parse().map_err(|e| format!("bad count {c:?}: {e}"))?;
        if count < 2 {
            return Err("a range needs at least 2 points".into());
        }
        if !(start.is_finite() && stop.is_finite() && stop > start) {
            return Err(format!("range {s:?} must be finite and increasing"));
        }
        Ok(Range { start, stop, count })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// `lo:hi` interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("bad bound {a:?}: {e}"))?;
        let hi: f64 = b.trim().parse().map_err(|e| format!("bad bound {b:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
            return Err(format!("interval {s:?} must be finite with lo <= hi"));
        }
        Ok(Interval { lo, hi })
    }
}

pub fn parse_counts(s: &str) -> Result<TrialCounts, String> {
    let v: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("bad count {x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [n0, n1, n2] => Ok(TrialCounts::new(*n0, *n1, *n2)),
        _ => Err(format!("expected n0,n1,n2, got {s:?}")),
    }
}

/// Fully resolved parameters of one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Qfi { repeats: u64 },
    Tables { preset: TablePreset },
    FiSweep { axis: SweepAxis, range: Range, fixed: f64 },
    Wigner { omega: Range, time: Range, method: Method },
    Simulate { mu: f64, tau: f64, trials: u64 },
    Estimate { counts: TrialCounts, which: Which, window: SearchWindow },
    CrStudy { tau: f64, window: SearchWindow, trials: u64, experiments: usize },
}

impl Task {
    pub fn needs_state(&self) -> bool {
        !matches!(self, Task::Tables { .. })
    }
}

/// Everything needed to reproduce one output; serialized into its header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: String,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<PhaseMatchingSpec>,
    pub gamma: f64,
    pub convention: Convention,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    pub fn header(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{PROVENANCE_TAG}{json}\n")
    }

    pub fn from_header(text: &str) -> Result<RunConfig, CliError> {
        let line = text.lines().next().unwrap_or_default();
        let json = line
            .strip_prefix(PROVENANCE_TAG)
            .ok_or_else(|| CliError::Validation("first line is not a homsense provenance header".into()))?;
        serde_json::from_str(json).map_err(|e| CliError::Validation(format!("unreadable provenance header: {e}")))
    }

    pub fn state(&self) -> Result<&PhaseMatchingSpec, CliError> {
        self.state.as_ref().ok_or_else(|| CliError::Validation("this command needs --state".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_and_sample() {
        let r: Range = "-1:1:5".parse().unwrap();
        assert_eq!(r.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!("0:1:1".parse::<Range>().is_err());
        assert!("1:0:4".parse::<Range>().is_err());
        assert!("0:1".parse::<Range>().is_err());
    }

    #[test]
    fn counts_parse() {
        assert_eq!(parse_counts("1, 2,3").unwrap(), TrialCounts::new(1, 2, 3));
        assert!(parse_counts("1,2").is_err());
        assert!(parse_counts("1,-2,3").is_err());
    }

    #[test]
    fn header_round_trips() {
        let cfg = RunConfig {
            version: "0.1.0".into(),
            task: Task::FiSweep { axis: SweepAxis::Tau, range: "0:0.3:7".parse().unwrap(), fixed: 0.1 },
            state: Some(PhaseMatchingSpec::frequency_cat(1.0, 10.0)),
            gamma: 0.3,
            convention: Convention::Canonical,
            format: Format::Csv,
            seed: 7,
        };
        let back = RunConfig::from_header(&cfg.header()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.header(), cfg.header());
    }
}

use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::model::NoiseParams;
use crate::error::{Error, Result};
use crate::reference;

pub const COUNTS_FORMAT_VERSION: u32 = 1;

/// One input/output setting: photons enter `C_k T_l`, detectors watch
/// `C_r` (A) and `T_s` (B) for `frames` frames of `resolving_time_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub frames: u64,
    pub resolving_time_s: f64,
    pub input: (u8, u8),
    pub output: (u8, u8),
}

impl ExperimentConfig {
    pub fn new(frames: u64, input: (u8, u8), output: (u8, u8)) -> Result<Self> {
        let c = ExperimentConfig {
            frames,
            resolving_time_s: reference::RESOLVING_TIME_S,
            input,
            output,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::InvalidCounts("frames must be positive".into()));
        }
        let (k, l) = self.input;
        let (r, s) = self.output;
        if k > 1 || l > 1 || r > 1 || s > 1 {
            return Err(Error::InvalidCounts(format!(
                "qubit labels must be 0 or 1, got input {:?} output {:?}",
                self.input, self.output
            )));
        }
        Ok(())
    }

    /// Position in the canonical `(k, l, r, s)` ordering, 0..16.
    pub fn index(&self) -> usize {
        let (k, l) = self.input;
        let (r, s) = self.output;
        8 * k as usize + 4 * l as usize + 2 * r as usize + s as usize
    }

    /// All 16 settings in canonical order.
    pub fn all(frames: u64) -> Vec<ExperimentConfig> {
        (0..16u8)
            .map(|i| ExperimentConfig {
                frames,
                resolving_time_s: reference::RESOLVING_TIME_S,
                input: (i >> 3 & 1, i >> 2 & 1),
                output: (i >> 1 & 1, i & 1),
            })
            .collect()
    }
}

/// Clicks on A, clicks on B, and coincidences over one counting period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigCounts {
    pub n_a: u64,
    pub n_b: u64,
    pub n_ab: u64,
}

impl ConfigCounts {
    pub fn new(n_a: u64, n_b: u64, n_ab: u64) -> Self {
        ConfigCounts { n_a, n_b, n_ab }
    }

    pub fn validate(&self, frames: u64) -> Result<()> {
        if self.n_ab > self.n_a.min(self.n_b) {
            return Err(Error::InvalidCounts(format!(
                "N_AB = {} exceeds min(N_A, N_B) = {}",
                self.n_ab,
                self.n_a.min(self.n_b)
            )));
        }
        if self.n_a + self.n_b - self.n_ab > frames {
            return Err(Error::InvalidCounts(format!(
                "{} clicking frames out of M = {frames}",
                self.n_a + self.n_b - self.n_ab
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountRecord {
    pub config: ExperimentConfig,
    pub counts: ConfigCounts,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMetadata {
    /// Noise parameters used to generate the data, when known.
    #[serde(default)]
    pub noise: Option<NoiseParams>,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Counts for up to 16 distinct input/output settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountDataset {
    pub format_version: u32,
    #[serde(default)]
    pub metadata: DatasetMetadata,
    pub records: Vec<CountRecord>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    input_k: u8,
    input_l: u8,
    output_r: u8,
    output_s: u8,
    #[serde(rename = "N_A")]
    n_a: u64,
    #[serde(rename = "N_B")]
    n_b: u64,
    #[serde(rename = "N_AB")]
    n_ab: u64,
    #[serde(rename = "M")]
    frames: u64,
}

impl CountDataset {
    pub fn new(records: Vec<CountRecord>, metadata: DatasetMetadata) -> Result<Self> {
        let d = CountDataset {
            format_version: COUNTS_FORMAT_VERSION,
            metadata,
            records,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn empty() -> Self {
        CountDataset {
            format_version: COUNTS_FORMAT_VERSION,
            metadata: DatasetMetadata::default(),
            records: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != COUNTS_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: self.format_version.to_string(),
                supported: COUNTS_FORMAT_VERSION.to_string(),
            });
        }
        let mut seen = BTreeSet::new();
        for r in &self.records {
            r.config.validate()?;
            r.counts.validate(r.config.frames)?;
            if !seen.insert(r.config.index()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate setting input {:?} output {:?}",
                    r.config.input, r.config.output
                )));
            }
        }
        Ok(())
    }

    /// True when all 16 settings are present.
    pub fn is_complete(&self) -> bool {
        self.records.len() == 16
    }

    pub fn require_complete(&self) -> Result<()> {
        self.validate()?;
        if !self.is_complete() {
            return Err(Error::InvalidDataset(format!(
                "{} of 16 input/output settings present",
                self.records.len()
            )));
        }
        Ok(())
    }

    pub fn get(&self, input: (u8, u8), output: (u8, u8)) -> Option<&CountRecord> {
        self.records.iter().find(|r| r.config.input == input && r.config.output == output)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: CountDataset = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    /// CSV with a `#` header line carrying the format version and
    /// resolving time; noise metadata is only kept in the JSON form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let tau = self.records.first().map_or(reference::RESOLVING_TIME_S, |r| r.config.resolving_time_s);
        writeln!(out, "# format_version={} resolving_time_s={tau:e}", self.format_version)?;
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(CsvRow {
                input_k: r.config.input.0,
                input_l: r.config.input.1,
                output_r: r.config.output.0,
                output_s: r.config.output.1,
                n_a: r.counts.n_a,
                n_b: r.counts.n_b,
                n_ab: r.counts.n_ab,
                frames: r.config.frames,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut version = None;
        let mut tau = reference::RESOLVING_TIME_S;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            for (key, value) in line.trim_start_matches('#').split_whitespace().filter_map(|kv| kv.split_once('=')) {
                match key {
                    "format_version" => {
                        version = Some(value.parse().map_err(|_| Error::InvalidDataset(format!("bad version {value}")))?)
                    }
                    "resolving_time_s" => {
                        tau = value.parse().map_err(|_| Error::InvalidDataset(format!("bad resolving time {value}")))?
                    }
                    _ => {}
                }
            }
        }
        let format_version = version.ok_or_else(|| Error::InvalidDataset("missing format_version header".into()))?;
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut records = Vec::new();
        for row in reader.deserialize() {
            let row: CsvRow = row?;
            records.push(CountRecord {
                config: ExperimentConfig {
                    frames: row.frames,
                    resolving_time_s: tau,
                    input: (row.input_k, row.input_l),
                    output: (row.output_r, row.output_s),
                },
                counts: ConfigCounts::new(row.n_a, row.n_b, row.n_ab),
            });
        }
        let d = CountDataset {
            format_version,
            metadata: DatasetMetadata::default(),
            records,
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CountDataset {
        let records = ExperimentConfig::all(1000)
            .into_iter()
            .enumerate()
            .map(|(i, config)| CountRecord {
                config,
                counts: ConfigCounts::new(10 + i as u64, 20, i as u64 % 7),
            })
            .collect();
        CountDataset::new(
            records,
            DatasetMetadata {
                noise: Some(NoiseParams::retrieved()),
                notes: vec!["unit test".into()],
            },
        )
        .unwrap()
    }

    #[test]
    fn canonical_order() {
        let all = ExperimentConfig::all(5);
        assert_eq!(all.len(), 16);
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
        assert_eq!(all[6].input, (0, 1));
        assert_eq!(all[6].output, (1, 0));
    }

    #[test]
    fn csv_round_trip() {
        let d = sample();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# format_version=1"));
        assert!(text.lines().nth(1).unwrap() == "input_k,input_l,output_r,output_s,N_A,N_B,N_AB,M");
        let back = CountDataset::read_csv(&buf[..]).unwrap();
        assert_eq!(back.records, d.records);
    }

    #[test]
    fn json_round_trip() {
        let d = sample();
        assert_eq!(CountDataset::from_json(&d.to_json().unwrap()).unwrap(), d);
    }

    #[test]
    fn rejects_bad_datasets() {
        let mut d = sample();
        d.records[3] = d.records[2];
        assert!(matches!(d.validate(), Err(Error::InvalidDataset(_))));
        let mut d = sample();
        d.records[0].counts = ConfigCounts::new(1, 5, 2);
        assert!(d.validate().is_err());
        let mut d = sample();
        d.format_version = 9;
        assert!(matches!(d.validate(), Err(Error::FormatVersion { .. })));
        let mut d = sample();
        d.records.pop();
        assert!(d.validate().is_ok());
        assert!(d.require_complete().is_err());
        assert!(CountDataset::read_csv("input_k,input_l\n".as_bytes()).is_err());
    }
}

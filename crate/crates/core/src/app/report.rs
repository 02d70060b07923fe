use serde::{Deserialize, Serialize};

use crate::bayes::PosteriorSummary;
use crate::counting::CountDataset;
use crate::error::Result;

pub const BASIS: [&str; 4] = ["C0T0", "C0T1", "C1T0", "C1T1"];

/// Rows are inputs, columns outputs, both in `BASIS` order. Missing cells
/// are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub input: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub coincidences: Table,
    /// Expected accidental coincidences `2 M p_A p_B` with the singles
    /// probabilities taken from the measured singles rates.
    pub accidentals: Table,
    pub pathways: Table,
    /// `posterior` or `raw coincidences`.
    pub pathway_source: String,
}

fn table(name: &str, rows: Vec<TableRow>) -> Table {
    let mut header = vec!["input".to_string()];
    header.extend(BASIS.iter().map(|s| s.to_string()));
    Table {
        name: name.to_string(),
        header,
        rows,
    }
}

fn cells(data: &CountDataset, f: impl Fn(u64, u64, u64, u64) -> f64) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for (i, label) in BASIS.iter().enumerate() {
        let input = ((i / 2) as u8, (i % 2) as u8);
        let values: Vec<Option<f64>> = (0..4)
            .map(|o| {
                data.get(input, ((o / 2) as u8, (o % 2) as u8)).map(|r| {
                    let c = r.counts;
                    f(c.n_a, c.n_b, c.n_ab, r.config.frames)
                })
            })
            .collect();
        if values.iter().any(Option::is_some) {
            rows.push(TableRow {
                input: label.to_string(),
                values,
            });
        }
    }
    rows
}

pub fn build_report(data: &CountDataset, summary: Option<&PosteriorSummary>) -> Result<Report> {
    data.validate()?;
    let coincidences = table("coincidences", cells(data, |_, _, ab, _| ab as f64));
    let accidentals = table(
        "accidentals",
        cells(data, |a, b, _, m| 2.0 * (a as f64) * (b as f64) / m as f64),
    );
    let (pathways, source) = match summary {
        Some(s) => (
            table(
                "pathway_probabilities",
                s.pathway_probabilities
                    .iter()
                    .zip(BASIS)
                    .map(|(row, label)| TableRow {
                        input: label.to_string(),
                        values: row.iter().map(|&p| Some(p)).collect(),
                    })
                    .collect(),
            ),
            "posterior",
        ),
        None => {
            let rows = coincidences
                .rows
                .iter()
                .filter_map(|r| {
                    let total: Option<f64> = r.values.iter().copied().sum();
                    match total {
                        Some(t) if t > 0.0 => Some(TableRow {
                            input: r.input.clone(),
                            values: r.values.iter().map(|v| v.map(|x| x / t)).collect(),
                        }),
                        _ => None,
                    }
                })
                .collect();
            (table("pathway_probabilities", rows), "raw coincidences")
        }
    };
    Ok(Report {
        coincidences,
        accidentals,
        pathways,
        pathway_source: source.to_string(),
    })
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            let mut rec = vec![r.input.clone()];
            rec.extend(r.values.iter().map(|v| v.map_or(String::new(), |x| format!("{x}"))));
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}\n{:<6}", self.name, self.header[0]);
        for h in &self.header[1..] {
            s.push_str(&format!(" {h:>12}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{:<6}", r.input));
            for v in &r.values {
                match v {
                    Some(x) if x.fract() == 0.0 && x.abs() < 1e12 => s.push_str(&format!(" {x:>12}")),
                    Some(x) => s.push_str(&format!(" {x:>12.4}")),
                    None => s.push_str(&format!(" {:>12}", "-")),
                }
            }
            s.push('\n');
        }
        s
    }
}

impl Report {
    pub fn tables(&self) -> [&Table; 3] {
        [&self.coincidences, &self.accidentals, &self.pathways]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for t in self.tables() {
            s.push_str(&t.render());
            s.push('\n');
        }
        s.push_str(&format!("pathway probabilities from {}\n", self.pathway_source));
        s
    }
}

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use recal_core::{LabeledCohort, RiskCohort};

use crate::CliError;

/// Risks this close to 0 or 1 are treated as degenerate.
const EDGE: f64 = 1e-15;

/// A parsed risk file. `raw` keeps the original text fields per record.
#[derive(Debug, Clone)]
pub struct RiskFile {
    pub header: Vec<String>,
    pub raw: Vec<Vec<String>>,
    pub risks: Vec<f64>,
    pub outcomes: Option<Vec<u8>>,
}

impl RiskFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let labeled = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["risk"] => false,
            ["risk", "outcome"] => true,
            _ => {
                return Err(CliError::Header(header.join(",")));
            }
        };

        let mut out = RiskFile {
            header,
            raw: Vec::new(),
            risks: Vec::new(),
            outcomes: labeled.then(Vec::new),
        };
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let risk_text = record.get(0).unwrap_or("");
            let risk: f64 = risk_text.parse().map_err(|_| CliError::Row {
                line,
                message: format!("cannot parse risk {risk_text:?}"),
            })?;
            if !(risk > EDGE && risk < 1.0 - EDGE) {
                return Err(CliError::Row {
                    line,
                    message: format!("risk {risk_text} must lie strictly inside (0, 1)"),
                });
            }
            if let Some(outcomes) = out.outcomes.as_mut() {
                let y = match record.get(1) {
                    Some("0") => 0,
                    Some("1") => 1,
                    other => {
                        return Err(CliError::Row {
                            line,
                            message: format!(
                                "outcome must be 0 or 1, got {:?}",
                                other.unwrap_or("")
                            ),
                        })
                    }
                };
                outcomes.push(y);
            }
            out.risks.push(risk);
            out.raw.push(record.iter().map(str::to_string).collect());
        }
        if out.risks.is_empty() {
            return Err(CliError::Empty);
        }
        Ok(out)
    }

    pub fn cohort(&self) -> Result<RiskCohort, CliError> {
        Ok(RiskCohort::new(self.risks.clone())?)
    }

    pub fn labeled(&self) -> Result<LabeledCohort, CliError> {
        let outcomes = self.outcomes.clone().ok_or(CliError::MissingOutcome)?;
        Ok(LabeledCohort::new(self.risks.clone(), outcomes)?)
    }
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn io::Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(p.display().to_string(), e))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

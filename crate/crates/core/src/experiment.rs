//! JSON experiment descriptions and CSV output.
//!
//! An experiment file looks like
//!
//! ```json
//! { "n": 4,
//!   "phases": [0, 0, 0, 0],
//!   "states": [[1, 0, 0, 0], {"bloch": [1, 0, 0]}, [[[0.5,0],[0,0]],[[0,0],[0.5,0]]], [0, 0, 1, 0]],
//!   "partition": [[0, 1], [2, 3]] }
//! ```
//!
//! Pure states are interleaved `[re, im, …]` amplitude arrays, mixed states
//! row-major matrices of `[re, im]` pairs and qubit states may also be given
//! as `{"bloch": [x, y, z]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bell::ScanRow;
use crate::cyclic::{CyclicConfig, OutcomePattern, Partition};
use crate::error::{Error, Result};
use crate::oracle::OutputPortPattern;
use crate::states::{pure_from_bloch, BlochVector, MixedState, PureState};

/// One input photon's internal state as written in an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Pure(PureState),
    Mixed(MixedState),
    Bloch { bloch: BlochVector },
}

impl StateSpec {
    pub fn to_mixed(&self) -> Result<MixedState> {
        match self {
            StateSpec::Pure(p) => Ok(p.density()),
            StateSpec::Mixed(m) => Ok(m.clone()),
            StateSpec::Bloch { bloch } => Ok(pure_from_bloch(bloch)?.density()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub phases: Vec<f64>,
    pub states: Vec<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<[Vec<usize>; 2]>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("experiment file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phases.len() != self.n || self.states.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "n = {} but {} phases and {} states given",
                self.n,
                self.phases.len(),
                self.states.len()
            )));
        }
        self.cyclic_config()?;
        if let Some(p) = self.partition() {
            p.validate(self.n)?;
        }
        Ok(())
    }

    pub fn cyclic_config(&self) -> Result<CyclicConfig> {
        CyclicConfig::new(self.phases.clone())
    }

    pub fn mixed_states(&self) -> Result<Vec<MixedState>> {
        self.states.iter().map(StateSpec::to_mixed).collect()
    }

    pub fn partition(&self) -> Option<Partition> {
        self.partition
            .as_ref()
            .map(|[a, b]| Partition::new(a.clone(), b.clone()))
    }
}

/// Float with 17 significant digits, `.` as decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `pattern,k,probability` rows for the coincidence sector.
pub fn coincidence_csv(dist: &[(OutcomePattern, f64)]) -> String {
    let mut out = String::from("pattern,k,probability\n");
    for (o, p) in dist {
        let _ = writeln!(out, "{o},{},{}", o.weight(), fmt_f64(*p));
    }
    out
}

/// `pattern,probability` rows; ports joined with `-`.
pub fn port_distribution_csv(dist: &[(OutputPortPattern, f64)]) -> String {
    let mut out = String::from("pattern,probability\n");
    for (l, p) in dist {
        let _ = writeln!(out, "{l},{}", fmt_f64(*p));
    }
    out
}

pub const SCAN_HEADER: &str = "theta,d,re_v11,re_v12,re_v21,re_v22,phase_g11,phase_g12,phase_g21,phase_g22,i_chsh,zeno_limit";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        let c = r.report.correlators;
        let ph = r.report.phases();
        let fields = [
            fmt_f64(r.theta),
            r.d.to_string(),
            fmt_f64(c[0][0]),
            fmt_f64(c[0][1]),
            fmt_f64(c[1][0]),
            fmt_f64(c[1][1]),
            fmt_f64(ph[0][0]),
            fmt_f64(ph[0][1]),
            fmt_f64(ph[1][0]),
            fmt_f64(ph[1][1]),
            fmt_f64(r.report.i_chsh),
            fmt_f64(r.zeno_limit),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Pure states from a JSON array of state specs.
pub fn pure_states_from_json(text: &str) -> Result<Vec<PureState>> {
    let specs: Vec<StateSpec> = serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("state list: {e}")))?;
    specs
        .into_iter()
        .map(|s| match s {
            StateSpec::Pure(p) => Ok(p),
            StateSpec::Bloch { bloch } => pure_from_bloch(&bloch),
            StateSpec::Mixed(_) => Err(Error::InvalidInput("expected a pure state".into())),
        })
        .collect()
}

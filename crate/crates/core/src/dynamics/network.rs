use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single oscillator of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub label: String,
    /// Angular frequency in units of the reference `ω`.
    #[serde(rename = "omega")]
    pub frequency: f64,
}

/// Which control function scales an edge's coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawControl", into = "RawControl")]
pub enum ControlIndex {
    /// Coupling is always on at its base rate.
    Fixed,
    /// 1-based control index.
    Control(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawControl {
    Index(usize),
    Name(String),
}

impl TryFrom<RawControl> for ControlIndex {
    type Error = String;

    fn try_from(raw: RawControl) -> std::result::Result<Self, String> {
        match raw {
            RawControl::Index(0) => Err("control indices are 1-based".into()),
            RawControl::Index(j) => Ok(ControlIndex::Control(j)),
            RawControl::Name(s) if s == "fixed" => Ok(ControlIndex::Fixed),
            RawControl::Name(s) => Err(format!("unknown control `{s}`, expected an index or \"fixed\"")),
        }
    }
}

impl From<ControlIndex> for RawControl {
    fn from(c: ControlIndex) -> Self {
        match c {
            ControlIndex::Fixed => RawControl::Name("fixed".into()),
            ControlIndex::Control(j) => RawControl::Index(j),
        }
    }
}

/// An `x_i x_j` coupling between two modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    #[serde(rename = "i")]
    pub mode_i: usize,
    #[serde(rename = "j")]
    pub mode_j: usize,
    /// Base coupling rate in units of `ω`.
    #[serde(rename = "g")]
    pub base_rate: f64,
    #[serde(rename = "control")]
    pub control: ControlIndex,
}

/// Mode frequencies plus the coupling graph. Always validated on construction
/// and on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct NetworkSpec {
    modes: Vec<Mode>,
    edges: Vec<Edge>,
    n_controls: usize,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    modes: Vec<Mode>,
    edges: Vec<Edge>,
}

impl TryFrom<RawNetwork> for NetworkSpec {
    type Error = Error;

    fn try_from(raw: RawNetwork) -> Result<Self> {
        NetworkSpec::new(raw.modes, raw.edges)
    }
}

impl From<NetworkSpec> for RawNetwork {
    fn from(n: NetworkSpec) -> Self {
        RawNetwork { modes: n.modes, edges: n.edges }
    }
}

impl NetworkSpec {
    pub fn new(modes: Vec<Mode>, edges: Vec<Edge>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Config("network has no modes".into()));
        }
        for m in &modes {
            if !(m.frequency.is_finite() && m.frequency > 0.0) {
                return Err(Error::Config(format!(
                    "mode `{}` has non-positive frequency {}",
                    m.label, m.frequency
                )));
            }
        }
        let mut seen = Vec::with_capacity(edges.len());
        let mut n_controls = 0;
        for e in &edges {
            if e.mode_i >= modes.len() || e.mode_j >= modes.len() {
                return Err(Error::Config(format!(
                    "edge ({}, {}) references a mode outside 0..{}",
                    e.mode_i,
                    e.mode_j,
                    modes.len()
                )));
            }
            if e.mode_i == e.mode_j {
                return Err(Error::Config(format!("self-coupling on mode {}", e.mode_i)));
            }
            if !e.base_rate.is_finite() {
                return Err(Error::Config("non-finite coupling rate".into()));
            }
            let key = (e.mode_i.min(e.mode_j), e.mode_i.max(e.mode_j));
            if seen.contains(&key) {
                return Err(Error::Config(format!("duplicate edge {key:?}")));
            }
            seen.push(key);
            if let ControlIndex::Control(j) = e.control {
                n_controls = n_controls.max(j);
            }
        }
        for j in 1..=n_controls {
            if !edges.iter().any(|e| e.control == ControlIndex::Control(j)) {
                return Err(Error::Config(format!("control {j} drives no edge")));
            }
        }
        Ok(NetworkSpec { modes, edges, n_controls })
    }

    /// Identical modes of frequency `omega` coupled along `links`, where each
    /// link `(i, j)` gets its own control (1-based, in order) at base rate 1.
    pub fn resonant(labels: &[&str], omega: f64, links: &[(usize, usize)]) -> Result<Self> {
        let modes = labels
            .iter()
            .map(|l| Mode { label: (*l).to_string(), frequency: omega })
            .collect();
        let edges = links
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| Edge {
                mode_i: i,
                mode_j: j,
                base_rate: 1.0,
                control: ControlIndex::Control(k + 1),
            })
            .collect();
        NetworkSpec::new(modes, edges)
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    /// Number of independent control functions `M`.
    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

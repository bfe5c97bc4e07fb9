//! Piecewise-constant control protocols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TAU;

/// Provenance carried alongside a stored protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolMeta {
    pub seed: u64,
    pub task: String,
}

/// `M` control functions, each constant on `N` equal segments of a total
/// duration `T` (in units of `τ`). Values are effective couplings `λ_jk g`
/// in units of `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProtocol", into = "RawProtocol")]
pub struct Protocol {
    duration: f64,
    n_segments: usize,
    n_controls: usize,
    /// Row-major by control, then segment.
    values: Vec<f64>,
    meta: Option<ProtocolMeta>,
}

#[derive(Serialize, Deserialize)]
struct RawProtocol {
    #[serde(rename = "T")]
    duration: f64,
    #[serde(rename = "N")]
    n_segments: usize,
    #[serde(rename = "M")]
    n_controls: usize,
    values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<ProtocolMeta>,
}

impl TryFrom<RawProtocol> for Protocol {
    type Error = Error;

    fn try_from(raw: RawProtocol) -> Result<Self> {
        if raw.values.len() != raw.n_controls || raw.values.iter().any(|row| row.len() != raw.n_segments) {
            return Err(Error::Config(format!(
                "values grid must be {} rows of {} segments",
                raw.n_controls, raw.n_segments
            )));
        }
        let flat = raw.values.concat();
        let mut p = Protocol::from_parameter_vector(raw.duration, raw.n_controls, raw.n_segments, &flat)?;
        p.meta = raw.meta;
        Ok(p)
    }
}

impl From<Protocol> for RawProtocol {
    fn from(p: Protocol) -> Self {
        RawProtocol {
            duration: p.duration,
            n_segments: p.n_segments,
            n_controls: p.n_controls,
            values: p.values.chunks(p.n_segments).map(<[f64]>::to_vec).collect(),
            meta: p.meta,
        }
    }
}

impl Protocol {
    /// The all-zero protocol.
    pub fn zeros(duration: f64, n_controls: usize, n_segments: usize) -> Result<Self> {
        Self::from_parameter_vector(duration, n_controls, n_segments, &vec![0.0; n_controls * n_segments])
    }

    /// Inverse of [`Protocol::as_parameter_vector`]: entry `j * N + k` is control
    /// `j` on segment `k`.
    pub fn from_parameter_vector(
        duration: f64,
        n_controls: usize,
        n_segments: usize,
        params: &[f64],
    ) -> Result<Self> {
        if n_controls == 0 || n_segments == 0 {
            return Err(Error::Argument("a protocol needs at least one control and one segment".into()));
        }
        if params.len() != n_controls * n_segments {
            return Err(Error::Argument(format!(
                "expected {} parameters ({} controls x {} segments), got {}",
                n_controls * n_segments,
                n_controls,
                n_segments,
                params.len()
            )));
        }
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::Argument(format!("duration {duration} must be finite and non-negative")));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("non-finite control value".into()));
        }
        Ok(Protocol { duration, n_segments, n_controls, values: params.to_vec(), meta: None })
    }

    pub fn with_meta(mut self, meta: ProtocolMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn meta(&self) -> Option<&ProtocolMeta> {
        self.meta.as_ref()
    }

    /// Duration in units of `τ`.
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    /// Control `j` (0-based) on segment `k`.
    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n_segments + k]
    }

    pub fn segment_controls(&self, k: usize) -> Vec<f64> {
        (0..self.n_controls).map(|j| self.value(j, k)).collect()
    }

    /// Segment length in units of `1/ω`.
    pub fn segment_time(&self) -> f64 {
        self.duration * TAU / self.n_segments as f64
    }

    pub fn as_parameter_vector(&self) -> &[f64] {
        &self.values
    }

    /// Same values grid stretched or compressed onto `new_duration`.
    pub fn rescale(&self, new_duration: f64) -> Result<Protocol> {
        if !(new_duration.is_finite() && new_duration >= 0.0) {
            return Err(Error::Argument(format!("duration {new_duration} must be finite and non-negative")));
        }
        Ok(Protocol { duration: new_duration, ..self.clone() })
    }

    /// `N / (2T)` in units of `1/τ`.
    pub fn implied_bandwidth(&self) -> Result<f64> {
        if self.duration == 0.0 {
            return Err(Error::UndefinedBandwidth);
        }
        Ok(self.n_segments as f64 / (2.0 * self.duration))
    }

    /// This protocol followed by `next`, as one protocol over the combined
    /// duration. Only defined when both have the same segment length and
    /// control count.
    pub fn concat(&self, next: &Protocol) -> Result<Protocol> {
        if self.n_controls != next.n_controls {
            return Err(Error::Argument("control counts differ".into()));
        }
        let n = self.n_segments + next.n_segments;
        let duration = self.duration + next.duration;
        let seg_a = self.duration / self.n_segments as f64;
        let seg_b = next.duration / next.n_segments as f64;
        if (seg_a - seg_b).abs() > 1e-15 * seg_a.max(seg_b).max(1.0) {
            return Err(Error::Argument("segment lengths differ".into()));
        }
        let mut values = Vec::with_capacity(self.n_controls * n);
        for j in 0..self.n_controls {
            values.extend_from_slice(&self.values[j * self.n_segments..(j + 1) * self.n_segments]);
            values.extend_from_slice(&next.values[j * next.n_segments..(j + 1) * next.n_segments]);
        }
        Protocol::from_parameter_vector(duration, self.n_controls, n, &values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Protocol {
        Protocol::from_parameter_vector(0.3, 2, 3, &[1.0, -2.0, 0.5, 0.25, 3.0, -1.5]).unwrap()
    }

    #[test]
    fn rescale_keeps_values() {
        let p = sample();
        assert_eq!(p.rescale(p.duration()).unwrap(), p);
        let half = p.rescale(0.15).unwrap();
        assert_eq!(half.as_parameter_vector(), p.as_parameter_vector());
        assert_eq!(half.segment_time(), p.segment_time() / 2.0);
        assert_eq!(half.rescale(0.3).unwrap(), p);
        assert!(p.rescale(-0.1).is_err());
    }

    #[test]
    fn parameter_ordering() {
        let p = Protocol::from_parameter_vector(1.0, 1, 5, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(p.segment_controls(3), vec![4.0]);

        let v: Vec<f64> = (0..20).map(f64::from).collect();
        let p = Protocol::from_parameter_vector(1.0, 2, 10, &v).unwrap();
        assert_eq!(p.as_parameter_vector().len(), 20);
        assert_eq!(p.value(0, 9), 9.0);
        assert_eq!(p.value(1, 0), 10.0);
        assert!(Protocol::from_parameter_vector(1.0, 2, 10, &v[..19]).is_err());
    }

    #[test]
    fn bandwidth() {
        let p = Protocol::zeros(0.05, 1, 5).unwrap();
        assert!((p.implied_bandwidth().unwrap() - 50.0).abs() < 1e-12);
        let p = Protocol::zeros(1.0, 1, 10).unwrap();
        assert_eq!(p.implied_bandwidth().unwrap(), 5.0);
        let p = Protocol::zeros(0.5, 1, 1).unwrap();
        assert_eq!(p.implied_bandwidth().unwrap(), 1.0);
        let p = Protocol::zeros(0.0, 1, 1).unwrap();
        assert_eq!(p.implied_bandwidth(), Err(Error::UndefinedBandwidth));
    }

    #[test]
    fn json_layout() {
        let p = sample().with_meta(ProtocolMeta { seed: 4, task: "swap2".into() });
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["T"], 0.3);
        assert_eq!(v["N"], 3);
        assert_eq!(v["M"], 2);
        assert_eq!(v["values"][1][2], -1.5);
        assert_eq!(v["meta"]["task"], "swap2");
        let bad = r#"{"T":1.0,"N":2,"M":1,"values":[[1.0]]}"#;
        assert!(serde_json::from_str::<Protocol>(bad).is_err());
    }

    #[test]
    fn concat_layout() {
        let p = Protocol::from_parameter_vector(0.2, 2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let q = Protocol::from_parameter_vector(0.1, 2, 1, &[5.0, 6.0]).unwrap();
        let pq = p.concat(&q).unwrap();
        assert_eq!(pq.as_parameter_vector(), &[1.0, 2.0, 5.0, 3.0, 4.0, 6.0]);
        assert!((pq.duration() - 0.3).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(
            duration in 0.0f64..10.0,
            values in proptest::collection::vec(-1e6f64..1e6, 6),
        ) {
            let p = Protocol::from_parameter_vector(duration, 2, 3, &values).unwrap();
            let text = serde_json::to_string(&p).unwrap();
            let back: Protocol = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn parameter_vector_round_trip(values in proptest::collection::vec(-50f64..50.0, 12)) {
            let p = Protocol::from_parameter_vector(0.7, 3, 4, &values).unwrap();
            prop_assert_eq!(p.as_parameter_vector(), &values[..]);
        }
    }
}

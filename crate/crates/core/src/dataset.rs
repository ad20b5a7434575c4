use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{run_sweeps, GibbsTarget};
use crate::graph::pair_count;
use crate::meter::SweepMeter;
use crate::model::{ModelFamily, MrfModel, Observation};
use crate::params::ParamPoint;
use crate::state::{EdgeState, LatentState, SpinState};

/// Ground truth recorded alongside simulated data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetTruth {
    pub theta_x: Vec<f64>,
    pub theta_y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<i8>>,
}

/// On-disk dataset schema. Spin values are -1/+1, edge values 0/1 in
/// lexicographic `(i, j)` pair order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_count: Option<usize>,
    y: Vec<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<DatasetTruth>,
}

/// Observed data plus the model family shape it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub family: ModelFamily,
    pub y: LatentState,
    pub truth: Option<DatasetTruth>,
}

impl Dataset {
    pub fn new(family: ModelFamily, y: LatentState, truth: Option<DatasetTruth>) -> Result<Self> {
        let expected = match &family {
            ModelFamily::Ising { graph } => graph.node_count(),
            ModelFamily::Ergm { node_count, .. } => pair_count(*node_count),
        };
        if y.len() != expected {
            return Err(Error::ShapeMismatch { context: "dataset y", expected, got: y.len() });
        }
        match (&family, &y) {
            (ModelFamily::Ising { .. }, LatentState::Spin(_)) => {}
            (ModelFamily::Ergm { .. }, LatentState::Edge(_)) => {}
            _ => return Err(Error::Dataset("state family does not match model family".into())),
        }
        Ok(Self { family, y, truth })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match &self.family {
            ModelFamily::Ising { graph } => {
                let (rows, cols) = match graph.kind() {
                    crate::graph::GraphKind::Lattice2d { rows, cols } => (rows, cols),
                    crate::graph::GraphKind::General => {
                        return Err(Error::Dataset(
                            "only lattice Ising datasets have a file representation".into(),
                        ))
                    }
                };
                DatasetFile {
                    model: "ising".into(),
                    rows: Some(rows),
                    cols: Some(cols),
                    node_count: None,
                    y: self.y.to_ints(),
                    truth: self.truth.clone(),
                }
            }
            ModelFamily::Ergm { node_count, .. } => DatasetFile {
                model: "ergm".into(),
                rows: None,
                cols: None,
                node_count: Some(*node_count),
                y: self.y.to_ints(),
                truth: self.truth.clone(),
            },
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DatasetFile = serde_json::from_str(text)?;
        match file.model.as_str() {
            "ising" => {
                let rows = file.rows.ok_or_else(|| Error::Dataset("ising dataset needs rows".into()))?;
                let cols = file.cols.ok_or_else(|| Error::Dataset("ising dataset needs cols".into()))?;
                let graph = crate::graph::GraphStructure::lattice2d(rows, cols)?;
                let y = SpinState::new(file.y)?;
                Dataset::new(ModelFamily::Ising { graph }, y.into(), file.truth)
            }
            "ergm" => {
                let n = file
                    .node_count
                    .ok_or_else(|| Error::Dataset("ergm dataset needs node_count".into()))?;
                let values: Result<Vec<u8>> = file
                    .y
                    .iter()
                    .map(|&v| {
                        u8::try_from(v).map_err(|_| Error::Dataset("edge values must be 0 or 1".into()))
                    })
                    .collect();
                let y = EdgeState::new(values?)?;
                Dataset::new(
                    ModelFamily::Ergm { node_count: n, two_star: Default::default() },
                    y.into(),
                    file.truth,
                )
            }
            other => Err(Error::Dataset(format!("unknown model kind {other:?}"))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Simulates a dataset from the model: `x` via `sweeps` Gibbs sweeps
/// targeting `f(.|theta_x)` from a uniform-random start, then `y` exactly
/// from `g(.|x, theta_y)` per component (for a directly observed model the
/// simulated field itself is the observation).
pub fn simulate_dataset(
    theta: &ParamPoint,
    model: &MrfModel,
    sweeps: usize,
    rng: &mut impl Rng,
    meter: &SweepMeter,
) -> Result<Dataset> {
    if sweeps == 0 {
        return Err(Error::InvalidConfig("simulation needs at least one sweep".into()));
    }
    model.check_param(theta)?;
    let x0 = model.uniform_state(rng);
    let x = run_sweeps(x0, model, &GibbsTarget::Prior { theta: theta.clone() }, sweeps, rng, meter)?;
    let (y, truth_x) = match model.observation {
        Observation::Direct => (x.clone(), None),
        Observation::Noisy => (model.sample_noise(&x, theta.theta_y, rng)?, Some(x.to_ints())),
    };
    Dataset::new(
        model.family.clone(),
        y,
        Some(DatasetTruth {
            theta_x: theta.theta_x.clone(),
            theta_y: theta.theta_y,
            x: truth_x,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphStructure;
    use crate::model::TwoStarVariant;

    #[test]
    fn json_round_trip_ising() {
        let graph = GraphStructure::lattice2d(2, 2).unwrap();
        let y = SpinState::new(vec![1, -1, 1, 1]).unwrap();
        let ds = Dataset::new(ModelFamily::Ising { graph }, y.into(), None).unwrap();
        let text = ds.to_json().unwrap();
        let back = Dataset::from_json(&text).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn json_round_trip_ergm() {
        let y = EdgeState::new(vec![1, 0, 1]).unwrap();
        let ds = Dataset::new(
            ModelFamily::Ergm { node_count: 3, two_star: TwoStarVariant::Standard },
            y.into(),
            Some(DatasetTruth { theta_x: vec![0.5, -0.2], theta_y: 1.0, x: None }),
        )
        .unwrap();
        let back = Dataset::from_json(&ds.to_json().unwrap()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let graph = GraphStructure::lattice2d(2, 2).unwrap();
        let y = SpinState::new(vec![1, -1]).unwrap();
        assert!(Dataset::new(ModelFamily::Ising { graph }, y.into(), None).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"model": "ising", "rows": 1, "cols": 2, "y": [1, -1], "bogus": 3}"#;
        assert!(Dataset::from_json(text).is_err());
    }

    #[test]
    fn simulate_noise_free_limit() {
        let model = MrfModel::ising(GraphStructure::lattice2d(3, 3).unwrap(), Observation::Noisy);
        let theta = ParamPoint::new(vec![0.2], 50.0).unwrap();
        let meter = SweepMeter::new();
        let mut rng = crate::rng::substream(11, &[]);
        let ds = simulate_dataset(&theta, &model, 10, &mut rng, &meter).unwrap();
        let truth = ds.truth.as_ref().unwrap();
        // theta_y = 50 : y = x with overwhelming probability
        assert_eq!(ds.y.to_ints(), truth.x.clone().unwrap());
        assert_eq!(meter.total(), 10);
    }

    #[test]
    fn simulate_zero_coupling_noise_is_fair_coin() {
        let model = MrfModel::ising(GraphStructure::lattice2d(10, 10).unwrap(), Observation::Noisy);
        let theta = ParamPoint::new(vec![0.0], 0.0).unwrap();
        let meter = SweepMeter::new();
        let mut rng = crate::rng::substream(12, &[]);
        let mut agree = 0usize;
        let mut total = 0usize;
        for _ in 0..20 {
            let ds = simulate_dataset(&theta, &model, 1, &mut rng, &meter).unwrap();
            let x = ds.truth.as_ref().unwrap().x.clone().unwrap();
            agree += ds.y.to_ints().iter().zip(&x).filter(|(a, b)| a == b).count();
            total += x.len();
        }
        let frac = agree as f64 / total as f64;
        // 2000 Bernoulli(0.5) trials: 5 sigma ~ 0.056
        assert!((frac - 0.5).abs() < 0.056, "agreement fraction {frac}");
    }
}

//! Model families: Ising lattices and exponential random graph models,
//! their unnormalised densities, sufficient statistics and noise terms.
//!
//! Densities are split as `gamma(x, y | theta) = gamma(x | theta_x) *
//! g(y | x, theta_y)` where only the interaction factor carries an
//! intractable normaliser; the noise factor includes its (tractable)
//! normaliser, so `log_unnorm_joint` equals the log joint up to
//! `log Z(theta_x)` alone.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, pair_index, GraphStructure};
use crate::params::ParamPoint;
use crate::state::{EdgeState, LatentState, SpinState};

/// Which two-star statistic an ERGM uses.
///
/// `Standard` is the usual count of two-paths, `sum_k C(deg_k, 2)`.
/// `IndexRestricted` is the literal triple sum `sum_{i<j<k} x_ik x_jk`,
/// which only counts stars whose centre has the largest node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoStarVariant {
    #[default]
    Standard,
    IndexRestricted,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    Ising { graph: GraphStructure },
    Ergm { node_count: usize, two_star: TwoStarVariant },
}

/// Whether the field is observed directly or through per-component noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    Direct,
    Noisy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrfModel {
    pub family: ModelFamily,
    pub observation: Observation,
}

/// log(exp(t) + exp(-t)), stable for large |t|.
pub fn log_two_cosh(t: f64) -> f64 {
    t.abs() + (-2.0 * t.abs()).exp().ln_1p()
}

/// Ising interaction term `theta_x * sum_{(i,j) in N} x_i x_j`
/// (log gamma(x | theta_x), no normaliser).
pub fn ising_log_unnorm_prior(x: &SpinState, theta_x: f64, g: &GraphStructure) -> Result<f64> {
    if x.len() != g.node_count() {
        return Err(Error::ShapeMismatch {
            context: "ising prior state",
            expected: g.node_count(),
            got: x.len(),
        });
    }
    Ok(theta_x * ising_edge_sum(x, g) as f64)
}

/// `sum_{(i,j) in N} x_i x_j` (the S1 statistic of a spin configuration).
pub fn ising_edge_sum(x: &SpinState, g: &GraphStructure) -> i64 {
    g.edges()
        .iter()
        .map(|&(i, j)| (x.values[i as usize] as i64) * (x.values[j as usize] as i64))
        .sum()
}

/// Ising noise term `theta_y * sum_k x_k y_k - T log(e^ty + e^-ty)`,
/// normalised in y.
pub fn ising_log_noise(x: &SpinState, y: &SpinState, theta_y: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            context: "ising noise states",
            expected: x.len(),
            got: y.len(),
        });
    }
    let agree: i64 = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(&a, &b)| (a as i64) * (b as i64))
        .sum();
    Ok(theta_y * agree as f64 - x.len() as f64 * log_two_cosh(theta_y))
}

/// Edge count and two-star count of a graph configuration.
pub fn ergm_stats(x: &EdgeState, n: usize, variant: TwoStarVariant) -> Result<(i64, i64)> {
    if x.len() != pair_count(n) {
        return Err(Error::ShapeMismatch {
            context: "ergm state",
            expected: pair_count(n),
            got: x.len(),
        });
    }
    let mut deg = vec![0i64; n];
    let mut lower_deg = vec![0i64; n]; // edges (v, k) with v < k, per k
    let mut edges = 0i64;
    let mut idx = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if x.values[idx] == 1 {
                edges += 1;
                deg[i] += 1;
                deg[j] += 1;
                lower_deg[j] += 1;
            }
            idx += 1;
        }
    }
    let two_stars = match variant {
        TwoStarVariant::Standard => deg.iter().map(|&d| d * (d - 1) / 2).sum(),
        TwoStarVariant::IndexRestricted => lower_deg.iter().map(|&d| d * (d - 1) / 2).sum(),
    };
    Ok((edges, two_stars))
}

/// ERGM interaction term `theta_x' S(x)` with `S = (edges, two-stars)`.
pub fn ergm_log_unnorm_prior(
    x: &EdgeState,
    theta_x: &[f64],
    n: usize,
    variant: TwoStarVariant,
) -> Result<f64> {
    if theta_x.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: theta_x.len() });
    }
    let (s1, s2) = ergm_stats(x, n, variant)?;
    Ok(theta_x[0] * s1 as f64 + theta_x[1] * s2 as f64)
}

/// ERGM noise term `theta_y * sum_k (2x_k-1)(2y_k-1) - E log(e^ty + e^-ty)`.
pub fn ergm_log_noise(x: &EdgeState, y: &EdgeState, theta_y: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            context: "ergm noise states",
            expected: x.len(),
            got: y.len(),
        });
    }
    let agree: i64 = x
        .values
        .iter()
        .zip(&y.values)
        .map(|(&a, &b)| (2 * a as i64 - 1) * (2 * b as i64 - 1))
        .sum();
    Ok(theta_y * agree as f64 - x.len() as f64 * log_two_cosh(theta_y))
}

impl MrfModel {
    pub fn ising(graph: GraphStructure, observation: Observation) -> Self {
        Self { family: ModelFamily::Ising { graph }, observation }
    }

    pub fn ergm(node_count: usize, two_star: TwoStarVariant, observation: Observation) -> Self {
        Self {
            family: ModelFamily::Ergm { node_count, two_star },
            observation,
        }
    }

    /// Number of binary variables in a configuration.
    pub fn site_count(&self) -> usize {
        match &self.family {
            ModelFamily::Ising { graph } => graph.node_count(),
            ModelFamily::Ergm { node_count, .. } => pair_count(*node_count),
        }
    }

    pub fn theta_x_dim(&self) -> usize {
        match &self.family {
            ModelFamily::Ising { .. } => 1,
            ModelFamily::Ergm { .. } => 2,
        }
    }

    pub fn has_noise(&self) -> bool {
        self.observation == Observation::Noisy
    }

    /// Dimension of the free parameter vector.
    pub fn free_dim(&self) -> usize {
        self.theta_x_dim() + usize::from(self.has_noise())
    }

    pub fn check_param(&self, theta: &ParamPoint) -> Result<()> {
        if theta.theta_x.len() != self.theta_x_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.theta_x_dim(),
                got: theta.theta_x.len(),
            });
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite("parameter point".into()));
        }
        Ok(())
    }

    /// log gamma(x | theta_x), the interaction term without its normaliser.
    pub fn log_unnorm_prior(&self, x: &LatentState, theta: &ParamPoint) -> Result<f64> {
        self.check_param(theta)?;
        match &self.family {
            ModelFamily::Ising { graph } => ising_log_unnorm_prior(x.as_spin()?, theta.theta_x[0], graph),
            ModelFamily::Ergm { node_count, two_star } => {
                ergm_log_unnorm_prior(x.as_edge()?, &theta.theta_x, *node_count, *two_star)
            }
        }
    }

    /// log g(y | x, theta_y), normalised in y. Zero for direct observation.
    pub fn log_noise(&self, x: &LatentState, y: &LatentState, theta: &ParamPoint) -> Result<f64> {
        if self.observation == Observation::Direct {
            return Ok(0.0);
        }
        match &self.family {
            ModelFamily::Ising { .. } => ising_log_noise(x.as_spin()?, y.as_spin()?, theta.theta_y),
            ModelFamily::Ergm { .. } => ergm_log_noise(x.as_edge()?, y.as_edge()?, theta.theta_y),
        }
    }

    /// log gamma(x, y | theta): interaction term plus noise term. Equals the
    /// log joint density up to the intractable `log Z(theta_x)` only. For a
    /// directly observed model pass the observed configuration as `x` (and
    /// `y`, which is ignored).
    pub fn log_unnorm_joint(&self, x: &LatentState, y: &LatentState, theta: &ParamPoint) -> Result<f64> {
        Ok(self.log_unnorm_prior(x, theta)? + self.log_noise(x, y, theta)?)
    }

    /// The S1 statistic of a configuration: neighbour agreement for Ising,
    /// edge count for ERGM. Recorded in chain traces.
    pub fn s1(&self, x: &LatentState) -> Result<f64> {
        match &self.family {
            ModelFamily::Ising { graph } => Ok(ising_edge_sum(x.as_spin()?, graph) as f64),
            ModelFamily::Ergm { node_count, two_star } => {
                Ok(ergm_stats(x.as_edge()?, *node_count, *two_star)?.0 as f64)
            }
        }
    }

    /// Uniform-random configuration (each component a fair coin).
    pub fn uniform_state(&self, rng: &mut impl Rng) -> LatentState {
        match &self.family {
            ModelFamily::Ising { graph } => {
                let values = (0..graph.node_count())
                    .map(|_| if rng.random_bool(0.5) { 1i8 } else { -1 })
                    .collect();
                LatentState::Spin(SpinState { values })
            }
            ModelFamily::Ergm { node_count, .. } => {
                let values = (0..pair_count(*node_count))
                    .map(|_| u8::from(rng.random_bool(0.5)))
                    .collect();
                LatentState::Edge(EdgeState { values })
            }
        }
    }

    /// Draws `y ~ g(.|x, theta_y)` exactly: each component agrees with `x`
    /// with probability `e^ty / (e^ty + e^-ty)` independently.
    pub fn sample_noise(&self, x: &LatentState, theta_y: f64, rng: &mut impl Rng) -> Result<LatentState> {
        let p_agree = 1.0 / (1.0 + (-2.0 * theta_y).exp());
        match x {
            LatentState::Spin(s) => {
                let values = s
                    .values
                    .iter()
                    .map(|&v| if rng.random_bool(p_agree) { v } else { -v })
                    .collect();
                Ok(LatentState::Spin(SpinState { values }))
            }
            LatentState::Edge(e) => {
                let values = e
                    .values
                    .iter()
                    .map(|&v| if rng.random_bool(p_agree) { v } else { 1 - v })
                    .collect();
                Ok(LatentState::Edge(EdgeState { values }))
            }
        }
    }

    /// Edge index of pair `(i, j)` in ERGM state vectors.
    pub fn ergm_pair_index(&self, i: usize, j: usize) -> Result<usize> {
        match &self.family {
            ModelFamily::Ergm { node_count, .. } => Ok(pair_index(*node_count, i.min(j), i.max(j))),
            ModelFamily::Ising { .. } => Err(Error::InvalidConfig("pair index only defined for ERGM".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphStructure;

    fn lattice(r: usize, c: usize) -> GraphStructure {
        GraphStructure::lattice2d(r, c).unwrap()
    }

    fn checkerboard_2x2() -> SpinState {
        // row-major 2x2: (+1, -1, -1, +1); all 4 edges disagree
        SpinState::new(vec![1, -1, -1, 1]).unwrap()
    }

    #[test]
    fn ising_prior_examples() {
        let g = lattice(2, 2);
        let all_up = SpinState::constant(4, 1);
        assert_eq!(ising_log_unnorm_prior(&all_up, 0.0, &g).unwrap(), 0.0);
        assert_eq!(ising_log_unnorm_prior(&all_up, 0.5, &g).unwrap(), 2.0);
        assert_eq!(ising_log_unnorm_prior(&checkerboard_2x2(), 0.5, &g).unwrap(), -2.0);
    }

    #[test]
    fn ising_prior_shape_error() {
        let g = lattice(2, 2);
        let short = SpinState::constant(3, 1);
        assert!(ising_log_unnorm_prior(&short, 1.0, &g).is_err());
    }

    #[test]
    fn ising_noise_examples() {
        let x = SpinState::constant(4, 1);
        let v = ising_log_noise(&x, &x, 0.0).unwrap();
        assert!((v + 4.0 * 2.0f64.ln()).abs() < 1e-12);

        let one = SpinState::constant(1, 1);
        let got = ising_log_noise(&one, &one, 1.0).unwrap();
        let expect = 1.0 - (1f64.exp() + (-1f64).exp()).ln();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - -0.126928).abs() < 1e-5);

        let flipped = SpinState::constant(1, -1);
        let got = ising_log_noise(&one, &flipped, 1.0).unwrap();
        let expect = -1.0 - (1f64.exp() + (-1f64).exp()).ln();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn ergm_stats_examples() {
        let empty = EdgeState::empty(pair_count(3));
        assert_eq!(ergm_stats(&empty, 3, TwoStarVariant::Standard).unwrap(), (0, 0));

        let triangle = EdgeState::new(vec![1, 1, 1]).unwrap();
        assert_eq!(ergm_stats(&triangle, 3, TwoStarVariant::Standard).unwrap(), (3, 3));

        // 3-leaf star on 4 nodes with hub 0: pairs (0,1), (0,2), (0,3)
        let mut star = EdgeState::empty(pair_count(4));
        for j in 1..4 {
            star.values[pair_index(4, 0, j)] = 1;
        }
        assert_eq!(ergm_stats(&star, 4, TwoStarVariant::Standard).unwrap(), (3, 3));
    }

    #[test]
    fn ergm_stats_complete_graph() {
        for n in 2..7 {
            let complete = EdgeState::complete(pair_count(n));
            let (s1, s2) = ergm_stats(&complete, n, TwoStarVariant::Standard).unwrap();
            assert_eq!(s1 as usize, pair_count(n));
            assert_eq!(s2 as usize, n * (n - 1) * (n - 2) / 2);
        }
    }

    #[test]
    fn index_restricted_two_star_undercounts() {
        // star with hub 0 has no i<j<k stars at all: its centre has the
        // smallest index, so the literal triple sum sees nothing.
        let mut star = EdgeState::empty(pair_count(4));
        for j in 1..4 {
            star.values[pair_index(4, 0, j)] = 1;
        }
        assert_eq!(ergm_stats(&star, 4, TwoStarVariant::IndexRestricted).unwrap(), (3, 0));
        // triangle: only centre 2 (edges (0,2),(1,2)) qualifies
        let triangle = EdgeState::new(vec![1, 1, 1]).unwrap();
        assert_eq!(ergm_stats(&triangle, 3, TwoStarVariant::IndexRestricted).unwrap(), (3, 1));
    }

    #[test]
    fn ergm_prior_examples() {
        let triangle = EdgeState::new(vec![1, 1, 1]).unwrap();
        let empty = EdgeState::empty(3);
        assert_eq!(
            ergm_log_unnorm_prior(&empty, &[2.3, -0.7], 3, TwoStarVariant::Standard).unwrap(),
            0.0
        );
        assert_eq!(
            ergm_log_unnorm_prior(&triangle, &[1.0, 0.0], 3, TwoStarVariant::Standard).unwrap(),
            3.0
        );
        assert_eq!(
            ergm_log_unnorm_prior(&triangle, &[-2.0, 0.5], 3, TwoStarVariant::Standard).unwrap(),
            -4.5
        );
        assert!(ergm_log_unnorm_prior(&triangle, &[1.0], 3, TwoStarVariant::Standard).is_err());
    }

    #[test]
    fn ergm_noise_examples() {
        let present = EdgeState::new(vec![1]).unwrap();
        let v = ergm_log_noise(&present, &present, 0.0).unwrap();
        assert!((v + 2.0f64.ln()).abs() < 1e-12);

        let v = ergm_log_noise(&present, &present, 2.0).unwrap();
        let expect = 2.0 - (2f64.exp() + (-2f64).exp()).ln();
        assert!((v - expect).abs() < 1e-12);
        assert!((v - -0.018150).abs() < 1e-5);

        let x = EdgeState::new(vec![1, 0]).unwrap();
        let y = EdgeState::new(vec![0, 1]).unwrap();
        let v = ergm_log_noise(&x, &y, 1.0).unwrap();
        let expect = -2.0 - 2.0 * (1f64.exp() + (-1f64).exp()).ln();
        assert!((v - expect).abs() < 1e-12);
    }

    #[test]
    fn joint_is_additive() {
        let g = lattice(2, 2);
        let model = MrfModel::ising(g.clone(), Observation::Noisy);
        let x: LatentState = SpinState::constant(4, 1).into();
        let theta = ParamPoint::new(vec![0.5], 0.0).unwrap();
        let joint = model.log_unnorm_joint(&x, &x, &theta).unwrap();
        assert!((joint - (2.0 - 4.0 * 2.0f64.ln())).abs() < 1e-12);

        let ergm = MrfModel::ergm(3, TwoStarVariant::Standard, Observation::Noisy);
        let t: LatentState = EdgeState::new(vec![1, 1, 1]).unwrap().into();
        let theta = ParamPoint::new(vec![1.0, 0.0], 0.0).unwrap();
        let joint = ergm.log_unnorm_joint(&t, &t, &theta).unwrap();
        assert!((joint - (3.0 - 3.0 * 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn global_spin_flip_symmetry() {
        let g = lattice(3, 3);
        let x = SpinState::new(vec![1, -1, 1, 1, -1, -1, 1, 1, -1]).unwrap();
        let flipped = SpinState::new(x.values.iter().map(|&v| -v).collect()).unwrap();
        let a = ising_log_unnorm_prior(&x, 0.73, &g).unwrap();
        let b = ising_log_unnorm_prior(&flipped, 0.73, &g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_sampling_limits() {
        let model = MrfModel::ising(lattice(2, 2), Observation::Noisy);
        let x: LatentState = SpinState::constant(4, 1).into();
        let mut rng = crate::rng::substream(7, &[0]);
        // theta_y = 50: agreement probability ~ 1
        let y = model.sample_noise(&x, 50.0, &mut rng).unwrap();
        assert_eq!(y, x);
    }
}

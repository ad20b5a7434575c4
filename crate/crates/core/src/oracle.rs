//! Exact enumeration oracle for small models: partition functions,
//! evidence terms, state probabilities and grid posteriors. Everything
//! here is brute force over the `2^T` configurations and exists to
//! validate the samplers at desk scale.

use crate::error::{Error, Result};
use crate::graph::GraphStructure;
use crate::log_sum_exp;
use crate::model::{
    ergm_stats, ising_edge_sum, log_two_cosh, ModelFamily, MrfModel, Observation,
};
use crate::params::{ParamPoint, PriorSpec};
use crate::state::{EdgeState, LatentState, SpinState};

/// Hard cap on the number of binary variables enumeration will touch.
pub const ENUMERATION_LIMIT: usize = 20;

fn check_size(sites: usize) -> Result<()> {
    if sites > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { node_count: sites, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// Configuration with site `k` high iff bit `k` of `bits` is set.
pub fn state_from_bits(model: &MrfModel, bits: usize) -> LatentState {
    let t = model.site_count();
    match &model.family {
        ModelFamily::Ising { .. } => {
            let values = (0..t).map(|k| if bits >> k & 1 == 1 { 1i8 } else { -1 }).collect();
            LatentState::Spin(SpinState { values })
        }
        ModelFamily::Ergm { .. } => {
            let values = (0..t).map(|k| (bits >> k & 1) as u8).collect();
            LatentState::Edge(EdgeState { values })
        }
    }
}

/// Bit index of a configuration (inverse of [`state_from_bits`]).
pub fn bits_from_state(x: &LatentState) -> usize {
    let mut bits = 0usize;
    match x {
        LatentState::Spin(s) => {
            for (k, &v) in s.values.iter().enumerate() {
                if v == 1 {
                    bits |= 1 << k;
                }
            }
        }
        LatentState::Edge(e) => {
            for (k, &v) in e.values.iter().enumerate() {
                if v == 1 {
                    bits |= 1 << k;
                }
            }
        }
    }
    bits
}

/// Histogram of an integer statistic vector over all configurations;
/// collapses the `2^T` sum into one term per distinct statistic value so
/// grids of parameter points can be evaluated cheaply.
#[derive(Debug, Clone)]
pub struct StatHistogram {
    /// (statistic vector, number of configurations attaining it)
    pub entries: Vec<(Vec<i64>, u64)>,
}

impl StatHistogram {
    fn build(sites: usize, mut stat: impl FnMut(usize) -> Vec<i64>) -> Result<Self> {
        check_size(sites)?;
        let mut map: std::collections::HashMap<Vec<i64>, u64> = std::collections::HashMap::new();
        for bits in 0..1usize << sites {
            *map.entry(stat(bits)).or_insert(0) += 1;
        }
        let mut entries: Vec<_> = map.into_iter().collect();
        entries.sort();
        Ok(Self { entries })
    }

    /// `log sum over configurations of exp(coeffs . stats)`.
    pub fn log_sum(&self, coeffs: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .entries
            .iter()
            .map(|(stats, count)| {
                let dot: f64 = stats.iter().zip(coeffs).map(|(&s, &c)| s as f64 * c).sum();
                dot + (*count as f64).ln()
            })
            .collect();
        log_sum_exp(&terms)
    }
}

/// Histogram of the interaction statistics of the latent field:
/// `(S1)` for Ising, `(S1, S2)` for ERGM.
pub fn prior_stat_histogram(model: &MrfModel) -> Result<StatHistogram> {
    match &model.family {
        ModelFamily::Ising { graph } => {
            let g = graph.clone();
            StatHistogram::build(model.site_count(), move |bits| {
                let x = spins_of(bits, g.node_count());
                vec![ising_edge_sum(&x, &g)]
            })
        }
        ModelFamily::Ergm { node_count, two_star } => {
            let (n, v) = (*node_count, *two_star);
            StatHistogram::build(model.site_count(), move |bits| {
                let x = edges_of(bits, crate::graph::pair_count(n));
                let (s1, s2) = ergm_stats(&x, n, v).expect("shape fixed by construction");
                vec![s1, s2]
            })
        }
    }
}

/// Histogram of `(interaction stats of x, agreement statistic of (x, y))`
/// for a fixed observation `y` of a noisy model.
pub fn joint_stat_histogram(model: &MrfModel, y: &LatentState) -> Result<StatHistogram> {
    match &model.family {
        ModelFamily::Ising { graph } => {
            let g = graph.clone();
            let ys = y.as_spin()?.clone();
            StatHistogram::build(model.site_count(), move |bits| {
                let x = spins_of(bits, g.node_count());
                let agree: i64 = x
                    .values
                    .iter()
                    .zip(&ys.values)
                    .map(|(&a, &b)| a as i64 * b as i64)
                    .sum();
                vec![ising_edge_sum(&x, &g), agree]
            })
        }
        ModelFamily::Ergm { node_count, two_star } => {
            let (n, v) = (*node_count, *two_star);
            let ye = y.as_edge()?.clone();
            StatHistogram::build(model.site_count(), move |bits| {
                let x = edges_of(bits, crate::graph::pair_count(n));
                let agree: i64 = x
                    .values
                    .iter()
                    .zip(&ye.values)
                    .map(|(&a, &b)| (2 * a as i64 - 1) * (2 * b as i64 - 1))
                    .sum();
                let (s1, s2) = ergm_stats(&x, n, v).expect("shape fixed by construction");
                vec![s1, s2, agree]
            })
        }
    }
}

fn spins_of(bits: usize, len: usize) -> SpinState {
    SpinState {
        values: (0..len).map(|k| if bits >> k & 1 == 1 { 1i8 } else { -1 }).collect(),
    }
}

fn edges_of(bits: usize, len: usize) -> EdgeState {
    EdgeState { values: (0..len).map(|k| (bits >> k & 1) as u8).collect() }
}

/// Exact `log Z(theta_x) = log sum_x exp(theta_x sum_edges x_i x_j)` of an
/// Ising graph by full enumeration.
pub fn enumerate_log_z(g: &GraphStructure, theta_x: f64) -> Result<f64> {
    let model = MrfModel::ising(g.clone(), Observation::Direct);
    enumerate_log_z_model(&model, &ParamPoint::new(vec![theta_x], 0.0)?)
}

/// Exact interaction-prior log normaliser for either family.
pub fn enumerate_log_z_model(model: &MrfModel, theta: &ParamPoint) -> Result<f64> {
    model.check_param(theta)?;
    let hist = prior_stat_histogram(model)?;
    Ok(hist.log_sum(&theta.theta_x))
}

/// Exact `log phi(theta, y) = log sum_x gamma(x, y | theta)`, the
/// normaliser the SMC sampler estimates (`Z(theta_x) p(y | theta)` for a
/// noisy model; `gamma(y | theta)` itself when observed directly).
pub fn enumerate_log_phi(model: &MrfModel, theta: &ParamPoint, y: &LatentState) -> Result<f64> {
    model.check_param(theta)?;
    match model.observation {
        Observation::Direct => model.log_unnorm_prior(y, theta),
        Observation::Noisy => {
            let hist = joint_stat_histogram(model, y)?;
            let mut coeffs = theta.theta_x.clone();
            coeffs.push(theta.theta_y);
            Ok(hist.log_sum(&coeffs) - model.site_count() as f64 * log_two_cosh(theta.theta_y))
        }
    }
}

/// Exact probability of every configuration under the interaction prior
/// `f(x | theta_x)`, indexed by state bits.
pub fn enumerate_prior_probs(model: &MrfModel, theta: &ParamPoint) -> Result<Vec<f64>> {
    check_size(model.site_count())?;
    let logs: Vec<f64> = (0..1usize << model.site_count())
        .map(|bits| model.log_unnorm_prior(&state_from_bits(model, bits), theta))
        .collect::<Result<_>>()?;
    let log_z = log_sum_exp(&logs);
    Ok(logs.iter().map(|l| (l - log_z).exp()).collect())
}

/// Exact probability of every configuration under the posterior
/// `p(x | theta, y)` of a noisy model, indexed by state bits.
pub fn enumerate_posterior_probs(
    model: &MrfModel,
    theta: &ParamPoint,
    y: &LatentState,
) -> Result<Vec<f64>> {
    check_size(model.site_count())?;
    let logs: Vec<f64> = (0..1usize << model.site_count())
        .map(|bits| model.log_unnorm_joint(&state_from_bits(model, bits), y, theta))
        .collect::<Result<_>>()?;
    let log_z = log_sum_exp(&logs);
    Ok(logs.iter().map(|l| (l - log_z).exp()).collect())
}

/// One axis of a parameter grid: `n` evenly spaced nodes spanning
/// `[lo, hi]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || n < 1 {
            return Err(Error::InvalidConfig(format!("bad grid axis [{lo}, {hi}] x {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n).map(|i| self.lo + h * i as f64).collect()
    }

    fn trapezoid_weight(&self, i: usize) -> f64 {
        if self.n == 1 {
            return self.hi - self.lo;
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        if i == 0 || i + 1 == self.n {
            0.5 * h
        } else {
            h
        }
    }

    /// Index of the grid node whose surrounding cell contains `v`
    /// (values outside the range clamp to the end nodes).
    pub fn bin(&self, v: f64) -> usize {
        if self.n == 1 {
            return 0;
        }
        let h = (self.hi - self.lo) / (self.n - 1) as f64;
        let idx = ((v - self.lo) / h).round();
        (idx.max(0.0) as usize).min(self.n - 1)
    }
}

/// Posterior `p(theta | y)` evaluated on a grid of the free parameter
/// vector and normalised by the trapezoid rule.
#[derive(Debug, Clone)]
pub struct GridPosterior {
    pub axes: Vec<GridAxis>,
    /// Unnormalised log posterior at each node, row-major in axis order.
    pub log_density: Vec<f64>,
    /// Trapezoid-weighted node masses, normalised to sum to one.
    pub mass: Vec<f64>,
}

impl GridPosterior {
    pub fn node_count(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.axes.len()];
        for d in (0..self.axes.len()).rev() {
            idx[d] = flat % self.axes[d].n;
            flat /= self.axes[d].n;
        }
        idx
    }

    /// Marginal probability mass over the nodes of one axis.
    pub fn marginal_mass(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes[axis].n];
        for (flat, &m) in self.mass.iter().enumerate() {
            out[self.unravel(flat)[axis]] += m;
        }
        out
    }

    /// Fraction of samples falling in each node cell of one axis.
    pub fn bin_samples(&self, axis: usize, samples: &[f64]) -> Vec<f64> {
        let ax = self.axes[axis];
        let mut out = vec![0.0; ax.n];
        for &s in samples {
            out[ax.bin(s)] += 1.0;
        }
        let total = samples.len() as f64;
        for v in &mut out {
            *v /= total;
        }
        out
    }
}

/// Total variation distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Exact posterior of the free parameters on a grid, by enumeration of the
/// latent space at every node. The grid axes line up with the model's free
/// parameter vector (`theta_x` components, then `theta_y` when noisy).
pub fn exact_posterior_grid(
    model: &MrfModel,
    y: &LatentState,
    prior: &PriorSpec,
    axes: &[GridAxis],
) -> Result<GridPosterior> {
    if axes.len() != model.free_dim() {
        return Err(Error::DimensionMismatch { expected: model.free_dim(), got: axes.len() });
    }
    check_size(model.site_count())?;

    // one histogram pass over the latent space serves every grid node
    let hist = match model.observation {
        Observation::Noisy => joint_stat_histogram(model, y)?,
        Observation::Direct => prior_stat_histogram(model)?,
    };
    let prior_hist = prior_stat_histogram(model)?;

    let axis_values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let total: usize = axes.iter().map(|a| a.n).product();
    let mut log_density = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        let free: Vec<f64> = idx.iter().zip(&axis_values).map(|(&i, vals)| vals[i]).collect();
        let theta = ParamPoint::from_free(&free, model.theta_x_dim(), model.has_noise())?;
        let log_prior = prior.log_density(&free);
        let ld = if log_prior == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let log_z = prior_hist.log_sum(&theta.theta_x);
            let log_phi = match model.observation {
                Observation::Noisy => {
                    let mut coeffs = theta.theta_x.clone();
                    coeffs.push(theta.theta_y);
                    hist.log_sum(&coeffs) - model.site_count() as f64 * log_two_cosh(theta.theta_y)
                }
                Observation::Direct => model.log_unnorm_prior(y, &theta)?,
            };
            log_prior + log_phi - log_z
        };
        log_density.push(ld);
        // advance the multi-index, last axis fastest
        for d in (0..axes.len()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].n {
                break;
            }
            idx[d] = 0;
        }
    }

    // trapezoid-rule normalisation over the grid
    let max = log_density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::NonFinite("posterior vanished on the whole grid".into()));
    }
    let mut mass = vec![0.0; total];
    let mut sum = 0.0;
    for (flat, m) in mass.iter_mut().enumerate() {
        let mut weight = 1.0;
        let mut rem = flat;
        for d in (0..axes.len()).rev() {
            let i = rem % axes[d].n;
            rem /= axes[d].n;
            weight *= axes[d].trapezoid_weight(i);
        }
        *m = weight * (log_density[flat] - max).exp();
        sum += *m;
    }
    for m in &mut mass {
        *m /= sum;
    }
    Ok(GridPosterior { axes: axes.to_vec(), log_density, mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TwoStarVariant;
    use crate::params::ComponentPrior;

    #[test]
    fn log_z_zero_coupling_counts_states() {
        for (r, c) in [(1, 2), (2, 2), (2, 3), (3, 3)] {
            let g = GraphStructure::lattice2d(r, c).unwrap();
            let lz = enumerate_log_z(&g, 0.0).unwrap();
            assert!((lz - (r * c) as f64 * 2.0f64.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn log_z_2x2_half_coupling() {
        // 2x2 cycle: disagreement count over the 4 edges is 0, 2 or 4;
        // Z(0.5) = 2 e^2 + 12 + 2 e^-2
        let g = GraphStructure::lattice2d(2, 2).unwrap();
        let lz = enumerate_log_z(&g, 0.5).unwrap();
        let expect = (2.0 * 2f64.exp() + 12.0 + 2.0 * (-2f64).exp()).ln();
        assert!((lz - expect).abs() < 1e-12);
        assert!((lz.exp() - 27.049).abs() < 1e-3);
    }

    #[test]
    fn log_z_single_edge() {
        let g = GraphStructure::general(2, vec![(0, 1)]).unwrap();
        let lz = enumerate_log_z(&g, 1.0).unwrap();
        let expect = (2.0 * 1f64.exp() + 2.0 * (-1f64).exp()).ln();
        assert!((lz - expect).abs() < 1e-12);
    }

    #[test]
    fn enumeration_size_guard() {
        let g = GraphStructure::lattice2d(5, 5).unwrap();
        assert!(matches!(
            enumerate_log_z(&g, 0.1),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn ergm_log_z_matches_direct_enumeration() {
        let model = MrfModel::ergm(4, TwoStarVariant::Standard, Observation::Direct);
        let theta = ParamPoint::new(vec![0.4, -0.2], 0.0).unwrap();
        let via_hist = enumerate_log_z_model(&model, &theta).unwrap();
        let mut terms = Vec::new();
        for bits in 0..64usize {
            let x = state_from_bits(&model, bits);
            terms.push(model.log_unnorm_prior(&x, &theta).unwrap());
        }
        assert!((via_hist - log_sum_exp(&terms)).abs() < 1e-10);
    }

    #[test]
    fn log_phi_matches_direct_sum() {
        let g = GraphStructure::lattice2d(2, 2).unwrap();
        let model = MrfModel::ising(g, Observation::Noisy);
        let theta = ParamPoint::new(vec![0.5], 0.3).unwrap();
        let y = state_from_bits(&model, 0b1011);
        let via_hist = enumerate_log_phi(&model, &theta, &y).unwrap();
        let mut terms = Vec::new();
        for bits in 0..16usize {
            let x = state_from_bits(&model, bits);
            terms.push(model.log_unnorm_joint(&x, &y, &theta).unwrap());
        }
        assert!((via_hist - log_sum_exp(&terms)).abs() < 1e-10);
    }

    #[test]
    fn single_point_grid_normalises_to_one() {
        let g = GraphStructure::lattice2d(2, 2).unwrap();
        let model = MrfModel::ising(g, Observation::Noisy);
        let y = state_from_bits(&model, 0b0110);
        let prior = PriorSpec::new(vec![
            ComponentPrior::Uniform { lo: 0.0, hi: 3.0 },
            ComponentPrior::Uniform { lo: 0.0, hi: 3.0 },
        ])
        .unwrap();
        let axes = [GridAxis { lo: 0.4, hi: 0.6, n: 1 }, GridAxis { lo: 0.1, hi: 0.3, n: 1 }];
        let grid = exact_posterior_grid(&model, &y, &prior, &axes).unwrap();
        assert_eq!(grid.mass.len(), 1);
        assert!((grid.mass[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_even_in_theta_y() {
        // global spin flip maps the agreement statistic to its negation, so
        // the evidence is even in theta_y for any observation
        let g = GraphStructure::lattice2d(2, 2).unwrap();
        let model = MrfModel::ising(g, Observation::Noisy);
        let y = state_from_bits(&model, 0b0011);
        let prior = PriorSpec::new(vec![
            ComponentPrior::Uniform { lo: 0.0, hi: 3.0 },
            ComponentPrior::Uniform { lo: -1.0, hi: 1.0 },
        ])
        .unwrap();
        let axes = [GridAxis { lo: 0.0, hi: 3.0, n: 7 }, GridAxis { lo: -1.0, hi: 1.0, n: 9 }];
        let grid = exact_posterior_grid(&model, &y, &prior, &axes).unwrap();
        let marg = grid.marginal_mass(1);
        for i in 0..marg.len() {
            let j = marg.len() - 1 - i;
            assert!((marg[i] - marg[j]).abs() < 1e-10, "theta_y marginal not even");
        }
    }

    #[test]
    fn grid_marginals_sum_to_one() {
        let g = GraphStructure::lattice2d(2, 2).unwrap();
        let model = MrfModel::ising(g, Observation::Noisy);
        let y = state_from_bits(&model, 0b0110);
        let prior = PriorSpec::new(vec![
            ComponentPrior::Uniform { lo: 0.0, hi: 3.0 },
            ComponentPrior::Uniform { lo: 0.0, hi: 3.0 },
        ])
        .unwrap();
        let axes = [GridAxis { lo: 0.0, hi: 3.0, n: 12 }, GridAxis { lo: 0.0, hi: 3.0, n: 10 }];
        let grid = exact_posterior_grid(&model, &y, &prior, &axes).unwrap();
        for axis in 0..2 {
            let m = grid.marginal_mass(axis);
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        assert_eq!(grid.node_count(), 120);
    }

    #[test]
    fn bin_assignment_clamps() {
        let ax = GridAxis { lo: 0.0, hi: 3.0, n: 4 }; // nodes at 0, 1, 2, 3
        assert_eq!(ax.bin(-5.0), 0);
        assert_eq!(ax.bin(0.49), 0);
        assert_eq!(ax.bin(0.51), 1);
        assert_eq!(ax.bin(2.9), 3);
        assert_eq!(ax.bin(99.0), 3);
    }

    #[test]
    fn prior_probs_match_density_ratios() {
        let g = GraphStructure::general(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let model = MrfModel::ising(g, Observation::Direct);
        let theta = ParamPoint::new(vec![0.8], 0.0).unwrap();
        let probs = enumerate_prior_probs(&model, &theta).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // all-up and all-down states are the two modes and equal
        assert!((probs[0b111] - probs[0b000]).abs() < 1e-15);
        assert!(probs[0b111] > probs[0b001]);
    }
}

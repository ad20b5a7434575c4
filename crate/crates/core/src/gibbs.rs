//! Single-site Gibbs kernels for the interaction prior `f(x|theta)`, the
//! posterior `p(x|theta,y)`, the geometric bridges of the extended exchange
//! algorithm, and the tempered targets of the SMC sampler.
//!
//! All of these are exponential-family densities in the configuration, so
//! one sweep implementation covers them: each target reduces to effective
//! interaction/observation couplings, and a site's conditional log odds is
//! a local function of its neighbourhood. Sweeps visit sites in fixed
//! ascending order.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::index_pair;
use crate::meter::SweepMeter;
use crate::model::{ModelFamily, MrfModel, Observation, TwoStarVariant};
use crate::params::ParamPoint;
use crate::state::LatentState;

/// A density the single-site sampler can target.
#[derive(Debug, Clone)]
pub enum GibbsTarget {
    /// `f(x | theta_x)`, the interaction prior.
    Prior { theta: ParamPoint },
    /// `p(x | theta, y)` for a noisy observation `y`.
    Posterior { theta: ParamPoint, y: LatentState },
    /// Geometric bridge `gamma(.|theta*)^beta * gamma(.|theta)^(1-beta)`
    /// between two interaction priors.
    Bridge { theta: ParamPoint, theta_star: ParamPoint, beta: f64 },
    /// `[gamma(x|theta) g(y|x,theta)]^beta`, the tempered posterior.
    TemperedPosterior { theta: ParamPoint, y: LatentState, beta: f64 },
}

/// Effective couplings a target reduces to: interaction parameters,
/// observation coupling, and the observation it conditions on.
struct Effective<'a> {
    theta_x: [f64; 2],
    theta_y: f64,
    y: Option<&'a LatentState>,
}

impl GibbsTarget {
    pub fn beta(&self) -> f64 {
        match self {
            GibbsTarget::Bridge { beta, .. } | GibbsTarget::TemperedPosterior { beta, .. } => *beta,
            _ => 1.0,
        }
    }

    fn effective(&self, model: &MrfModel) -> Result<Effective<'_>> {
        let dim = model.theta_x_dim();
        let pack = |v: &[f64]| -> [f64; 2] {
            let mut out = [0.0; 2];
            out[..v.len()].copy_from_slice(v);
            out
        };
        match self {
            GibbsTarget::Prior { theta } => {
                model.check_param(theta)?;
                Ok(Effective { theta_x: pack(&theta.theta_x), theta_y: 0.0, y: None })
            }
            GibbsTarget::Posterior { theta, y } => {
                model.check_param(theta)?;
                if model.observation != Observation::Noisy {
                    return Err(Error::InvalidConfig(
                        "posterior target requires a noisy observation model".into(),
                    ));
                }
                Ok(Effective { theta_x: pack(&theta.theta_x), theta_y: theta.theta_y, y: Some(y) })
            }
            GibbsTarget::Bridge { theta, theta_star, beta } => {
                model.check_param(theta)?;
                model.check_param(theta_star)?;
                if !(0.0..=1.0).contains(beta) {
                    return Err(Error::InvalidConfig(format!("bridge exponent {beta} outside [0,1]")));
                }
                let mut mixed = [0.0; 2];
                for d in 0..dim {
                    mixed[d] = beta * theta_star.theta_x[d] + (1.0 - beta) * theta.theta_x[d];
                }
                Ok(Effective { theta_x: mixed, theta_y: 0.0, y: None })
            }
            GibbsTarget::TemperedPosterior { theta, y, beta } => {
                model.check_param(theta)?;
                if model.observation != Observation::Noisy {
                    return Err(Error::InvalidConfig(
                        "tempered posterior requires a noisy observation model".into(),
                    ));
                }
                if !(0.0..=1.0).contains(beta) {
                    return Err(Error::InvalidConfig(format!("temper exponent {beta} outside [0,1]")));
                }
                let mut scaled = [0.0; 2];
                for d in 0..dim {
                    scaled[d] = beta * theta.theta_x[d];
                }
                Ok(Effective { theta_x: scaled, theta_y: beta * theta.theta_y, y: Some(y) })
            }
        }
    }

    /// Unnormalised log target density at `x` (the quantity whose local
    /// differences drive the conditional odds; also the SMC weight
    /// evaluator). The tempered variant includes the scaled noise
    /// normaliser so it is exactly `beta * log gamma(x, y | theta)`.
    pub fn log_unnorm_density(&self, model: &MrfModel, x: &LatentState) -> Result<f64> {
        match self {
            GibbsTarget::Prior { theta } => model.log_unnorm_prior(x, theta),
            GibbsTarget::Posterior { theta, y } => model.log_unnorm_joint(x, y, theta),
            GibbsTarget::Bridge { theta, theta_star, beta } => {
                let a = model.log_unnorm_prior(x, theta_star)?;
                let b = model.log_unnorm_prior(x, theta)?;
                Ok(beta * a + (1.0 - beta) * b)
            }
            GibbsTarget::TemperedPosterior { theta, y, beta } => {
                Ok(beta * model.log_unnorm_joint(x, y, theta)?)
            }
        }
    }
}

/// Log odds `log[p(x_k = hi | x_{!=k}) / p(x_k = lo | x_{!=k})]` under the
/// target, computed from the cliques containing site `k` only
/// (`hi`/`lo` are +1/-1 for spins and 1/0 for edges).
pub fn conditional_log_odds(
    model: &MrfModel,
    target: &GibbsTarget,
    x: &LatentState,
    site: usize,
) -> Result<f64> {
    if site >= model.site_count() {
        return Err(Error::IndexOutOfRange { index: site, len: model.site_count() });
    }
    let eff = target.effective(model)?;
    match &model.family {
        ModelFamily::Ising { graph } => {
            let spins = &x.as_spin()?.values;
            let mut nbr_sum = 0i64;
            for &w in graph.neighbors(site) {
                nbr_sum += spins[w as usize] as i64;
            }
            let mut odds = 2.0 * eff.theta_x[0] * nbr_sum as f64;
            if let Some(y) = eff.y {
                odds += 2.0 * eff.theta_y * y.as_spin()?.values[site] as f64;
            }
            Ok(odds)
        }
        ModelFamily::Ergm { node_count, two_star } => {
            let edges = &x.as_edge()?.values;
            let n = *node_count;
            let (i, j) = index_pair(n, site);
            let delta_s2 = ergm_two_star_delta(edges, n, i, j, *two_star);
            let mut odds = eff.theta_x[0] + eff.theta_x[1] * delta_s2 as f64;
            if let Some(y) = eff.y {
                odds += 2.0 * eff.theta_y * (2.0 * y.as_edge()?.values[site] as f64 - 1.0);
            }
            Ok(odds)
        }
    }
}

/// Change in the two-star statistic when edge `(i, j)` is toggled on,
/// with the edge itself excluded from the degree counts.
fn ergm_two_star_delta(edges: &[u8], n: usize, i: usize, j: usize, variant: TwoStarVariant) -> i64 {
    let site = crate::graph::pair_index(n, i, j);
    let mut delta = 0i64;
    match variant {
        TwoStarVariant::Standard => {
            for v in 0..n {
                if v == i || v == j {
                    continue;
                }
                let (a, b) = (i.min(v), i.max(v));
                if edges[crate::graph::pair_index(n, a, b)] == 1 {
                    delta += 1;
                }
                let (a, b) = (j.min(v), j.max(v));
                if edges[crate::graph::pair_index(n, a, b)] == 1 {
                    delta += 1;
                }
            }
        }
        TwoStarVariant::IndexRestricted => {
            // toggling (i, j) with i < j changes C(lowdeg_j, 2) only
            for v in 0..j {
                let idx = crate::graph::pair_index(n, v, j);
                if idx != site && edges[idx] == 1 {
                    delta += 1;
                }
            }
        }
    }
    delta
}

#[inline]
fn sigmoid(odds: f64) -> f64 {
    1.0 / (1.0 + (-odds).exp())
}

/// One full pass over all sites in ascending order, resampling each site
/// from its full conditional under `target`. Counts one sweep on `meter`.
pub fn gibbs_sweep(
    x: &mut LatentState,
    model: &MrfModel,
    target: &GibbsTarget,
    rng: &mut impl Rng,
    meter: &SweepMeter,
) -> Result<()> {
    let eff = target.effective(model)?;
    match &model.family {
        ModelFamily::Ising { graph } => {
            let y_spins: Option<Vec<i8>> = match eff.y {
                Some(y) => Some(y.as_spin()?.values.clone()),
                None => None,
            };
            let spins = match x {
                LatentState::Spin(s) => &mut s.values,
                LatentState::Edge(_) => return Err(Error::Dataset("ising sweep on edge state".into())),
            };
            if spins.len() != graph.node_count() {
                return Err(Error::ShapeMismatch {
                    context: "gibbs sweep state",
                    expected: graph.node_count(),
                    got: spins.len(),
                });
            }
            // p(+1) per (neighbour sum, observed value); neighbour sums lie
            // in [-max_degree, max_degree]
            let span = 2 * graph.max_degree() + 1;
            let offset = graph.max_degree() as i64;
            let mut p_plus = vec![[0.0f64; 2]; span];
            for (s, p) in p_plus.iter_mut().enumerate() {
                let nbr = s as i64 - offset;
                let base = 2.0 * eff.theta_x[0] * nbr as f64;
                p[0] = sigmoid(base - 2.0 * eff.theta_y); // y = -1
                p[1] = sigmoid(base + 2.0 * eff.theta_y); // y = +1
            }
            for k in 0..spins.len() {
                let mut nbr_sum = 0i64;
                for &w in graph.neighbors(k) {
                    nbr_sum += spins[w as usize] as i64;
                }
                let y_col = match &y_spins {
                    Some(ys) => usize::from(ys[k] > 0),
                    None => 1, // theta_y is zero; column is irrelevant
                };
                let p = p_plus[(nbr_sum + offset) as usize][y_col];
                spins[k] = if rng.random::<f64>() < p { 1 } else { -1 };
            }
        }
        ModelFamily::Ergm { node_count, two_star } => {
            let n = *node_count;
            let y_edges: Option<Vec<u8>> = match eff.y {
                Some(y) => Some(y.as_edge()?.values.clone()),
                None => None,
            };
            let edges = match x {
                LatentState::Edge(e) => &mut e.values,
                LatentState::Spin(_) => return Err(Error::Dataset("ergm sweep on spin state".into())),
            };
            if edges.len() != crate::graph::pair_count(n) {
                return Err(Error::ShapeMismatch {
                    context: "gibbs sweep state",
                    expected: crate::graph::pair_count(n),
                    got: edges.len(),
                });
            }
            // degree caches, maintained across flips within the sweep
            let mut deg = vec![0i64; n];
            let mut lowdeg = vec![0i64; n];
            let mut idx = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if edges[idx] == 1 {
                        deg[i] += 1;
                        deg[j] += 1;
                        lowdeg[j] += 1;
                    }
                    idx += 1;
                }
            }
            // p(1) per (two-star delta, observed value)
            let span = 2 * n.max(2) - 3;
            let mut p_on = vec![[0.0f64; 2]; span];
            for (d, p) in p_on.iter_mut().enumerate() {
                let base = eff.theta_x[0] + eff.theta_x[1] * d as f64;
                p[0] = sigmoid(base - 2.0 * eff.theta_y); // y = 0
                p[1] = sigmoid(base + 2.0 * eff.theta_y); // y = 1
            }
            let mut site = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let present = edges[site] == 1;
                    let delta = match two_star {
                        TwoStarVariant::Standard => {
                            (deg[i] - i64::from(present)) + (deg[j] - i64::from(present))
                        }
                        TwoStarVariant::IndexRestricted => lowdeg[j] - i64::from(present),
                    };
                    debug_assert_eq!(delta, ergm_two_star_delta(edges, n, i, j, *two_star));
                    let y_col = match &y_edges {
                        Some(ys) => ys[site] as usize,
                        None => 1,
                    };
                    let p = p_on[delta as usize][y_col];
                    let new = u8::from(rng.random::<f64>() < p);
                    if new != edges[site] {
                        let d = if new == 1 { 1 } else { -1 };
                        deg[i] += d;
                        deg[j] += d;
                        lowdeg[j] += d;
                        edges[site] = new;
                    }
                    site += 1;
                }
            }
        }
    }
    meter.add(1);
    Ok(())
}

/// Applies `sweeps` Gibbs sweeps to `x0`; zero sweeps returns it unchanged.
pub fn run_sweeps(
    x0: LatentState,
    model: &MrfModel,
    target: &GibbsTarget,
    sweeps: usize,
    rng: &mut impl Rng,
    meter: &SweepMeter,
) -> Result<LatentState> {
    let mut x = x0;
    for _ in 0..sweeps {
        gibbs_sweep(&mut x, model, target, rng, meter)?;
    }
    Ok(x)
}

//! Stationary distribution solvers and blocking probabilities.
//!
//! Two independent routes compute the steady state:
//!
//! * [`solve_iterative`] sweeps the normalized balance equations state by
//!   state until the distribution stops moving. This is the production path.
//! * [`solve_exact`] solves the global balance system directly by dense LU
//!   factorization and acts as the oracle the iteration is tested against.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::model::{admits, transitions_out, Scheme, SystemParams, TrafficClass};
use crate::space::StateSpace;

/// A stationary distribution aligned to a [`StateSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    /// Probability per state, in the space's lexicographic order.
    pub probs: Vec<f64>,
    /// Sweeps performed (0 for the direct solver).
    pub iterations: u64,
    /// False when the iteration hit its sweep limit before settling.
    pub converged: bool,
    /// Maximum absolute global-balance violation of `probs`.
    pub residual: f64,
}

/// Per-class packet blocking probabilities.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BlockingReport {
    pub p_block_d2d: f64,
    pub p_block_cc: f64,
    pub p_block_wifi: f64,
}

impl BlockingReport {
    pub fn get(&self, class: TrafficClass) -> f64 {
        match class {
            TrafficClass::D2d => self.p_block_d2d,
            TrafficClass::Cc => self.p_block_cc,
            TrafficClass::Wifi => self.p_block_wifi,
        }
    }
}

/// Update order for the iterative sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    /// Each state update sees the values already refreshed earlier in the
    /// same sweep. Converges on every configuration we have tested and is
    /// the default.
    InPlace,
    /// Every update reads the previous iterate. Kept for comparison; on
    /// birth-death-like chains this variant can oscillate and report
    /// non-convergence.
    Simultaneous,
}

/// Transposed adjacency of the chain: incoming edges and total exit rates,
/// both indexed by state position.
struct Topology {
    incoming: Vec<Vec<(usize, f64)>>,
    out_rate: Vec<f64>,
}

fn topology(space: &StateSpace, p: &SystemParams, scheme: Scheme) -> Topology {
    let n = space.len();
    let mut incoming = vec![Vec::new(); n];
    let mut out_rate = vec![0.0; n];
    for (k, &s) in space.states().iter().enumerate() {
        for t in transitions_out(s, p, scheme) {
            let target = space
                .index_of(t.target)
                .expect("transition target outside the enumerated space");
            incoming[target].push((k, t.rate));
            out_rate[k] += t.rate;
        }
    }
    Topology { incoming, out_rate }
}

/// Iterative fixed-point solver with the default in-place update order.
///
/// Starts from the uniform vector, refreshes every state in lexicographic
/// order from its balance equation, renormalizes, and stops once the largest
/// elementwise change drops to `alpha`. Reaching `max_iter` first is reported
/// through `converged = false`, not as an error.
pub fn solve_iterative(
    space: &StateSpace,
    p: &SystemParams,
    scheme: Scheme,
    alpha: f64,
    max_iter: u64,
) -> Result<StationaryDistribution, Error> {
    solve_iterative_with(space, p, scheme, alpha, max_iter, UpdateMode::InPlace)
}

/// Iterative solver with an explicit [`UpdateMode`].
pub fn solve_iterative_with(
    space: &StateSpace,
    p: &SystemParams,
    scheme: Scheme,
    alpha: f64,
    max_iter: u64,
    mode: UpdateMode,
) -> Result<StationaryDistribution, Error> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidTolerance(alpha));
    }
    if max_iter == 0 {
        return Err(Error::InvalidSimConfig("max_iter must be at least 1".into()));
    }

    let n = space.len();
    let topo = topology(space, p, scheme);
    let mut pi = vec![1.0 / n as f64; n];
    let mut prev = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        prev.copy_from_slice(&pi);
        match mode {
            UpdateMode::InPlace => {
                for k in 0..n {
                    if topo.out_rate[k] > 0.0 {
                        pi[k] = inflow(&topo.incoming[k], &pi) / topo.out_rate[k];
                    }
                }
            }
            UpdateMode::Simultaneous => {
                for k in 0..n {
                    if topo.out_rate[k] > 0.0 {
                        pi[k] = inflow(&topo.incoming[k], &prev) / topo.out_rate[k];
                    }
                }
            }
        }
        let total: f64 = pi.iter().sum();
        if total > 0.0 {
            for x in pi.iter_mut() {
                *x /= total;
            }
        }
        let delta = pi
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if delta <= alpha {
            converged = true;
            break;
        }
    }

    let residual = residual_of(&pi, &topo);
    Ok(StationaryDistribution {
        probs: pi,
        iterations,
        converged,
        residual,
    })
}

fn inflow(edges: &[(usize, f64)], source: &[f64]) -> f64 {
    edges.iter().map(|&(q, rate)| rate * source[q]).sum()
}

/// Direct solver: builds the generator, replaces the lexicographically last
/// balance row with the normalization constraint, and LU-solves. Errors with
/// [`Error::SingularSystem`] if the chain is reducible, which the
/// reachable-closure construction is meant to rule out.
pub fn solve_exact(
    space: &StateSpace,
    p: &SystemParams,
    scheme: Scheme,
) -> Result<StationaryDistribution, Error> {
    let n = space.len();
    if n == 0 {
        return Err(Error::SingularSystem);
    }

    // Row k of `a` is the balance equation of state k: inflow minus outflow.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (k, &s) in space.states().iter().enumerate() {
        for t in transitions_out(s, p, scheme) {
            let target = space
                .index_of(t.target)
                .expect("transition target outside the enumerated space");
            a[(target, k)] += t.rate;
            a[(k, k)] -= t.rate;
        }
    }
    for k in 0..n {
        a[(n - 1, k)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;

    let solution = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
    let mut pi: Vec<f64> = solution.iter().copied().collect();
    for x in pi.iter_mut() {
        if *x < 0.0 {
            if *x < -1e-9 {
                return Err(Error::SingularSystem);
            }
            *x = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    if !(total > 0.0) {
        return Err(Error::SingularSystem);
    }
    for x in pi.iter_mut() {
        *x /= total;
    }

    let topo = topology(space, p, scheme);
    let residual = residual_of(&pi, &topo);
    Ok(StationaryDistribution {
        probs: pi,
        iterations: 0,
        converged: true,
        residual,
    })
}

/// Maximum absolute difference between probability inflow and outflow over
/// all states: zero exactly at stationarity.
pub fn balance_residual(
    dist: &StationaryDistribution,
    space: &StateSpace,
    p: &SystemParams,
    scheme: Scheme,
) -> f64 {
    let topo = topology(space, p, scheme);
    residual_of(&dist.probs, &topo)
}

fn residual_of(pi: &[f64], topo: &Topology) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..pi.len() {
        let inflow = inflow(&topo.incoming[k], pi);
        let outflow = pi[k] * topo.out_rate[k];
        worst = worst.max((inflow - outflow).abs());
    }
    worst
}

/// Per-class blocking probabilities: the stationary mass of states whose
/// arrival guard rejects that class.
pub fn blocking_probabilities(
    dist: &StationaryDistribution,
    space: &StateSpace,
    p: &SystemParams,
    scheme: Scheme,
) -> BlockingReport {
    let mut blocked = [0.0f64; 3];
    for (k, &s) in space.states().iter().enumerate() {
        for (slot, class) in TrafficClass::ALL.iter().enumerate() {
            if !admits(*class, s, p, scheme) {
                blocked[slot] += dist.probs[k];
            }
        }
    }
    BlockingReport {
        p_block_d2d: blocked[0],
        p_block_cc: blocked[1],
        p_block_wifi: blocked[2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::State;
    use approx::assert_abs_diff_eq;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    /// Closed-form blocking of an M/M/k/k loss system, by the standard
    /// recursion `B_k = a B_{k-1} / (k + a B_{k-1})`.
    fn erlang_b(servers: u32, offered: f64) -> f64 {
        let mut b = 1.0;
        for k in 1..=servers {
            b = offered * b / (f64::from(k) + offered * b);
        }
        b
    }

    fn wifi_only() -> SystemParams {
        let mut p = defaults();
        p.lambda_total = 0.0;
        p
    }

    fn cc_only() -> SystemParams {
        let mut p = defaults();
        p.rho = 0.0;
        p.lambda_total = 150.0;
        p.lambda_wifi = 0.0;
        p
    }

    #[test]
    fn single_state_space_solves_trivially() {
        let mut p = defaults();
        p.lambda_total = 0.0;
        p.lambda_wifi = 0.0;
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        assert_eq!(exact.probs, vec![1.0]);
        assert_eq!(exact.residual, 0.0);
        let iter = solve_iterative(&sp, &p, Scheme::Proposed, 1e-6, 100).unwrap();
        assert_eq!(iter.probs, vec![1.0]);
        assert_eq!(iter.iterations, 1);
        assert!(iter.converged);
        let report = blocking_probabilities(&iter, &sp, &p, Scheme::Proposed);
        assert_eq!(
            (report.p_block_d2d, report.p_block_cc, report.p_block_wifi),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn two_state_birth_death_is_symmetric() {
        // One Wi-Fi channel with arrival rate equal to the service rate.
        let mut p = defaults();
        p.lambda_total = 0.0;
        p.lambda_wifi = 2.0;
        p.r_u_wf = 2.0;
        p.cap_u = 2.0;
        p.theta_u = 0.0;
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        assert_eq!(sp.states(), &[State::EMPTY, State::new(0, 0, 0, 1)]);
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        assert_abs_diff_eq!(exact.probs[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(exact.probs[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn wifi_only_blocking_matches_erlang_b() {
        let p = wifi_only();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        let report = blocking_probabilities(&exact, &sp, &p, Scheme::Proposed);
        // Four unlicensed channels, offered load 100 / 2 = 50.
        assert_abs_diff_eq!(report.p_block_wifi, erlang_b(4, 50.0), epsilon = 1e-9);
        assert_eq!(report.p_block_d2d, 0.0);
        assert_eq!(report.p_block_cc, 0.0);
    }

    #[test]
    fn wifi_only_marginal_matches_erlang_distribution() {
        let p = wifi_only();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        // Truncated Poisson over n = 0..=4 with offered load 50.
        let offered = 50.0f64;
        let mut weights = [0.0f64; 5];
        let mut factorial = 1.0;
        for (n, w) in weights.iter_mut().enumerate() {
            if n > 0 {
                factorial *= n as f64;
            }
            *w = offered.powi(n as i32) / factorial;
        }
        let total: f64 = weights.iter().sum();
        for (k, &s) in sp.states().iter().enumerate() {
            let expected = weights[s.n as usize] / total;
            assert_abs_diff_eq!(exact.probs[k], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn cc_only_blocking_matches_erlang_b() {
        let p = cc_only();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        let report = blocking_probabilities(&exact, &sp, &p, Scheme::Proposed);
        // Downlink capacity bounds CC at 4 servers; per-packet rate 1.
        assert_abs_diff_eq!(report.p_block_cc, erlang_b(4, 150.0), epsilon = 1e-9);
    }

    #[test]
    fn iterative_agrees_with_exact_on_defaults() {
        let p = defaults();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        let iter = solve_iterative(&sp, &p, Scheme::Proposed, 1e-6, 100_000).unwrap();
        assert!(iter.converged, "iteration failed to settle");
        assert!(iter.residual <= 1e-5, "residual {}", iter.residual);
        let worst = exact
            .probs
            .iter()
            .zip(iter.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6 * 10.0, "elementwise gap {worst}");
        let sum: f64 = iter.probs.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn iterative_hits_requested_accuracy_at_tight_alpha() {
        // Stiff configurations inflate the change-to-error ratio; a tighter
        // alpha still lands the iterate on the exact solution.
        let mut p = defaults();
        p.rho = 0.9;
        let sp = StateSpace::enumerate(&p, Scheme::Underlay).unwrap();
        let exact = solve_exact(&sp, &p, Scheme::Underlay).unwrap();
        let iter = solve_iterative(&sp, &p, Scheme::Underlay, 1e-9, 100_000).unwrap();
        assert!(iter.converged);
        let worst = exact
            .probs
            .iter()
            .zip(iter.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-7, "elementwise gap {worst}");
    }

    #[test]
    fn simultaneous_mode_reports_honestly() {
        // The previous-iterate sweep oscillates on birth-death chains; it
        // must say so instead of pretending to converge.
        let p = wifi_only();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let jac = solve_iterative_with(&sp, &p, Scheme::Proposed, 1e-6, 500, UpdateMode::Simultaneous)
            .unwrap();
        assert!(!jac.converged);
        assert_eq!(jac.iterations, 500);
        // On a single-state space both modes settle immediately.
        let mut p0 = defaults();
        p0.lambda_total = 0.0;
        p0.lambda_wifi = 0.0;
        let sp0 = StateSpace::enumerate(&p0, Scheme::Proposed).unwrap();
        let jac0 =
            solve_iterative_with(&sp0, &p0, Scheme::Proposed, 1e-6, 500, UpdateMode::Simultaneous)
                .unwrap();
        assert!(jac0.converged);
    }

    #[test]
    fn residual_detects_non_stationary_vectors() {
        let p = defaults();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let uniform = StationaryDistribution {
            probs: vec![1.0 / sp.len() as f64; sp.len()],
            iterations: 0,
            converged: false,
            residual: 0.0,
        };
        let r = balance_residual(&uniform, &sp, &p, Scheme::Proposed);
        assert!(r > 0.1, "uniform residual {r} unexpectedly small");
        let exact = solve_exact(&sp, &p, Scheme::Proposed).unwrap();
        assert!(exact.residual <= 1e-10);
    }

    #[test]
    fn invalid_tolerance_is_rejected() {
        let p = defaults();
        let sp = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        assert!(matches!(
            solve_iterative(&sp, &p, Scheme::Proposed, 0.0, 10),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(matches!(
            solve_iterative(&sp, &p, Scheme::Proposed, -1.0, 10),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn departure_rates_scale_linearly_with_occupancy() {
        let p = defaults();
        let base = transitions_out(State::new(1, 1, 1, 1), &p, Scheme::Proposed);
        let scaled = transitions_out(State::new(2, 1, 1, 1), &p, Scheme::Proposed);
        let rate_of = |ts: &[crate::model::Transition], kind| {
            ts.iter()
                .find(|t| t.kind == kind)
                .map(|t| t.rate)
                .unwrap()
        };
        use crate::model::TransitionKind::D2dLicensedDeparture;
        assert_abs_diff_eq!(
            rate_of(&scaled, D2dLicensedDeparture),
            2.0 * rate_of(&base, D2dLicensedDeparture),
            epsilon = 1e-12
        );
    }

    #[test]
    fn scheme_reduction_yields_identical_blocking() {
        let mut p = defaults();
        p.theta_u = p.cap_u;
        p.cap_dd = p.cap_up;
        let sp_prop = StateSpace::enumerate(&p, Scheme::Proposed).unwrap();
        let sp_under = StateSpace::enumerate(&p, Scheme::Underlay).unwrap();
        assert_eq!(sp_prop.states(), sp_under.states());
        let a = solve_exact(&sp_prop, &p, Scheme::Proposed).unwrap();
        let b = solve_exact(&sp_under, &p, Scheme::Underlay).unwrap();
        let ra = blocking_probabilities(&a, &sp_prop, &p, Scheme::Proposed);
        let rb = blocking_probabilities(&b, &sp_under, &p, Scheme::Underlay);
        assert_abs_diff_eq!(ra.p_block_d2d, rb.p_block_d2d, epsilon = 1e-12);
        assert_abs_diff_eq!(ra.p_block_cc, rb.p_block_cc, epsilon = 1e-12);
        assert_abs_diff_eq!(ra.p_block_wifi, rb.p_block_wifi, epsilon = 1e-12);
    }
}

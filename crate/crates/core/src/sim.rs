//! Discrete-event simulator for the same traffic and admission model.
//!
//! Three independent Poisson arrival streams feed the threshold-based
//! admission control; every admitted packet holds an exponential service
//! time matching its class's departure rate in the analytic chain. Because
//! arrivals are Poisson, long-run per-class blocking fractions converge to
//! the stationary blocking probabilities, which makes the simulator an
//! independent cross-check of the solvers.
//!
//! Replications differ only through derived sub-seeds; everything is
//! deterministic given the configuration.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Error;
use crate::model::{
    admit_cc, admit_d2d_licensed, admit_d2d_unlicensed, admit_wifi, Scheme, State, SystemParams,
    TrafficClass,
};

/// Simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    pub scheme: Scheme,
    /// Master seed; replication k runs on `sub_seed(seed, k)`.
    pub seed: u64,
    /// Simulated time units per replication.
    pub horizon: f64,
    /// Simulated time discarded before statistics collection.
    pub warmup: f64,
    pub replications: u32,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        self.params.ensure_bounded(self.scheme)?;
        if !(self.warmup >= 0.0) || !(self.horizon > self.warmup) {
            return Err(Error::InvalidSimConfig(format!(
                "need horizon > warmup >= 0, got horizon {} warmup {}",
                self.horizon, self.warmup
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidSimConfig(
                "need at least one replication".to_string(),
            ));
        }
        Ok(())
    }
}

/// Per-class counters and the across-replication interval estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassStats {
    /// Arrivals observed after warmup, totaled over replications.
    pub offered: u64,
    /// Rejected arrivals after warmup, totaled over replications.
    pub blocked: u64,
    /// Mean of per-replication blocking fractions.
    pub estimate: f64,
    /// 95% confidence half-width of the estimate (Student t over
    /// replication means; zero for a single replication).
    pub half_width: f64,
}

/// Aggregated simulation output.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimStats {
    pub d2d: ClassStats,
    pub cc: ClassStats,
    pub wifi: ClassStats,
    /// Time-weighted mean occupancy per state dimension `(i, j, m, n)`.
    pub mean_occupancy: [f64; 4],
}

impl SimStats {
    pub fn class(&self, class: TrafficClass) -> &ClassStats {
        match class {
            TrafficClass::D2d => &self.d2d,
            TrafficClass::Cc => &self.cc,
            TrafficClass::Wifi => &self.wifi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ServiceKind {
    D2dLicensed,
    Cc,
    D2dUnlicensed,
    Wifi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EventKind {
    Arrive(TrafficClass),
    Depart(ServiceKind),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    /// Insertion counter; breaks (measure-zero) time ties deterministically.
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want earliest first.
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Stream derivation: replication k simulates on `splitmix64(seed ^ (k+1)*phi)`
/// where phi is the 64-bit golden-ratio constant.
pub fn sub_seed(seed: u64, replication: u32) -> u64 {
    let mixed = seed ^ (u64::from(replication) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    splitmix64(mixed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Replication {
    offered: [u64; 3],
    blocked: [u64; 3],
    /// Integral of each occupancy dimension over the measured window.
    occupancy_time: [f64; 4],
    /// Time spent per state over the measured window (only when requested).
    state_time: Option<BTreeMap<State, f64>>,
    observed: f64,
}

fn exp_sample(rng: &mut ChaCha12Rng, rate: f64) -> f64 {
    // Inverse transform on (0, 1]; rate is strictly positive here.
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

fn run_replication(cfg: &SimConfig, replication: u32, collect_states: bool) -> Replication {
    let p = &cfg.params;
    let scheme = cfg.scheme;
    let mut rng = ChaCha12Rng::seed_from_u64(sub_seed(cfg.seed, replication));
    let mut heap: BinaryHeap<Event> = BinaryHeap::new();
    let mut seq = 0u64;
    let push = |heap: &mut BinaryHeap<Event>, seq: &mut u64, time: f64, kind: EventKind| {
        heap.push(Event { time, seq: *seq, kind });
        *seq += 1;
    };

    for class in TrafficClass::ALL {
        let rate = class.arrival_rate(p);
        if rate > 0.0 {
            let t = exp_sample(&mut rng, rate);
            push(&mut heap, &mut seq, t, EventKind::Arrive(class));
        }
    }

    let mut state = State::EMPTY;
    let mut clock = 0.0f64;
    let mut rep = Replication {
        offered: [0; 3],
        blocked: [0; 3],
        occupancy_time: [0.0; 4],
        state_time: collect_states.then(BTreeMap::new),
        observed: cfg.horizon - cfg.warmup,
    };

    let account = |rep: &mut Replication, state: State, from: f64, to: f64| {
        let lo = from.max(cfg.warmup);
        let hi = to.min(cfg.horizon);
        if hi > lo {
            let dt = hi - lo;
            rep.occupancy_time[0] += dt * f64::from(state.i);
            rep.occupancy_time[1] += dt * f64::from(state.j);
            rep.occupancy_time[2] += dt * f64::from(state.m);
            rep.occupancy_time[3] += dt * f64::from(state.n);
            if let Some(map) = rep.state_time.as_mut() {
                *map.entry(state).or_insert(0.0) += dt;
            }
        }
    };

    while let Some(ev) = heap.pop() {
        if ev.time > cfg.horizon {
            break;
        }
        account(&mut rep, state, clock, ev.time);
        clock = ev.time;

        match ev.kind {
            EventKind::Arrive(class) => {
                let rate = class.arrival_rate(p);
                push(
                    &mut heap,
                    &mut seq,
                    clock + exp_sample(&mut rng, rate),
                    EventKind::Arrive(class),
                );
                let counted = clock >= cfg.warmup;
                let slot = class as usize;
                if counted {
                    rep.offered[slot] += 1;
                }
                match class {
                    TrafficClass::D2d => {
                        if admit_d2d_unlicensed(state, p, scheme) {
                            state.m += 1;
                            let t = exp_sample(&mut rng, p.rate_d2d_unlicensed());
                            push(
                                &mut heap,
                                &mut seq,
                                clock + t,
                                EventKind::Depart(ServiceKind::D2dUnlicensed),
                            );
                        } else if admit_d2d_licensed(state, p, scheme) {
                            state.i += 1;
                            let t = exp_sample(&mut rng, p.rate_d2d_licensed());
                            push(
                                &mut heap,
                                &mut seq,
                                clock + t,
                                EventKind::Depart(ServiceKind::D2dLicensed),
                            );
                        } else if counted {
                            rep.blocked[slot] += 1;
                        }
                    }
                    TrafficClass::Cc => {
                        if admit_cc(state, p, scheme) {
                            state.j += 1;
                            let t = exp_sample(&mut rng, p.rate_cc());
                            push(&mut heap, &mut seq, clock + t, EventKind::Depart(ServiceKind::Cc));
                        } else if counted {
                            rep.blocked[slot] += 1;
                        }
                    }
                    TrafficClass::Wifi => {
                        if admit_wifi(state, p, scheme) {
                            state.n += 1;
                            let t = exp_sample(&mut rng, p.rate_wifi());
                            push(
                                &mut heap,
                                &mut seq,
                                clock + t,
                                EventKind::Depart(ServiceKind::Wifi),
                            );
                        } else if counted {
                            rep.blocked[slot] += 1;
                        }
                    }
                }
            }
            EventKind::Depart(kind) => match kind {
                ServiceKind::D2dLicensed => state.i -= 1,
                ServiceKind::Cc => state.j -= 1,
                ServiceKind::D2dUnlicensed => state.m -= 1,
                ServiceKind::Wifi => state.n -= 1,
            },
        }
        debug_assert!(
            state.is_legal(p),
            "simulated state {state} violates capacity bounds at t={clock}"
        );
    }
    account(&mut rep, state, clock, cfg.horizon);
    rep
}

/// Runs the configured replications and aggregates blocking statistics.
pub fn simulate(cfg: &SimConfig) -> Result<SimStats, Error> {
    cfg.validate()?;
    let reps: Vec<Replication> = (0..cfg.replications)
        .map(|k| run_replication(cfg, k, false))
        .collect();

    let t_quantile = if reps.len() > 1 {
        let dof = (reps.len() - 1) as f64;
        StudentsT::new(0.0, 1.0, dof)
            .expect("valid t distribution")
            .inverse_cdf(0.975)
    } else {
        0.0
    };

    let mut classes = [ClassStats {
        offered: 0,
        blocked: 0,
        estimate: 0.0,
        half_width: 0.0,
    }; 3];
    for (slot, stats) in classes.iter_mut().enumerate() {
        let fractions: Vec<f64> = reps
            .iter()
            .map(|r| {
                if r.offered[slot] == 0 {
                    0.0
                } else {
                    r.blocked[slot] as f64 / r.offered[slot] as f64
                }
            })
            .collect();
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        let half_width = if fractions.len() > 1 {
            let var = fractions.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                / (fractions.len() - 1) as f64;
            t_quantile * (var / fractions.len() as f64).sqrt()
        } else {
            0.0
        };
        stats.offered = reps.iter().map(|r| r.offered[slot]).sum();
        stats.blocked = reps.iter().map(|r| r.blocked[slot]).sum();
        stats.estimate = mean;
        stats.half_width = half_width;
    }

    let mut mean_occupancy = [0.0f64; 4];
    for (dim, out) in mean_occupancy.iter_mut().enumerate() {
        *out = reps
            .iter()
            .map(|r| r.occupancy_time[dim] / r.observed)
            .sum::<f64>()
            / reps.len() as f64;
    }

    Ok(SimStats {
        d2d: classes[0],
        cc: classes[1],
        wifi: classes[2],
        mean_occupancy,
    })
}

/// Time-weighted empirical state distribution over the measured window,
/// merged across replications. Entries are sorted by state and sum to one.
pub fn occupancy_distribution(cfg: &SimConfig) -> Result<Vec<(State, f64)>, Error> {
    cfg.validate()?;
    let mut merged: BTreeMap<State, f64> = BTreeMap::new();
    let mut total = 0.0f64;
    for k in 0..cfg.replications {
        let rep = run_replication(cfg, k, true);
        for (s, dt) in rep.state_time.expect("state histogram requested") {
            *merged.entry(s).or_insert(0.0) += dt;
        }
        total += rep.observed;
    }
    Ok(merged.into_iter().map(|(s, dt)| (s, dt / total)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{blocking_probabilities, solve_exact};
    use crate::space::StateSpace;

    fn config(params: SystemParams, scheme: Scheme) -> SimConfig {
        SimConfig {
            params,
            scheme,
            seed: 42,
            horizon: 1e5,
            warmup: 1e3,
            replications: 10,
        }
    }

    #[test]
    fn no_traffic_produces_no_events() {
        let mut p = SystemParams::default();
        p.lambda_total = 0.0;
        p.lambda_wifi = 0.0;
        let mut cfg = config(p, Scheme::Proposed);
        cfg.horizon = 100.0;
        cfg.warmup = 1.0;
        let stats = simulate(&cfg).unwrap();
        for class in TrafficClass::ALL {
            let c = stats.class(class);
            assert_eq!(c.offered, 0);
            assert_eq!(c.blocked, 0);
            assert_eq!(c.estimate, 0.0);
        }
        assert_eq!(stats.mean_occupancy, [0.0; 4]);
        let occ = occupancy_distribution(&cfg).unwrap();
        assert_eq!(occ, vec![(State::EMPTY, 1.0)]);
    }

    #[test]
    fn identical_configs_give_bit_identical_stats() {
        let mut cfg = config(SystemParams::default(), Scheme::Proposed);
        cfg.horizon = 500.0;
        cfg.warmup = 5.0;
        cfg.replications = 3;
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate(&SimConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c, "different seeds should perturb the run");
    }

    #[test]
    fn wifi_only_blocking_matches_erlang_b() {
        let mut p = SystemParams::default();
        p.lambda_total = 0.0;
        let cfg = config(p, Scheme::Proposed);
        let stats = simulate(&cfg).unwrap();
        // Closed-form M/M/4/4 blocking at offered load 50.
        let expected = 0.921_662_519_922_657;
        assert!(
            (stats.wifi.estimate - expected).abs() <= 3.0 * stats.wifi.half_width,
            "wifi {} +- {} vs {expected}",
            stats.wifi.estimate,
            stats.wifi.half_width
        );
        assert!(stats.wifi.half_width < 0.005, "CI {}", stats.wifi.half_width);
        assert_eq!(stats.d2d.offered, 0);
        assert_eq!(stats.cc.offered, 0);
    }

    #[test]
    fn offered_counts_are_poisson_consistent() {
        let mut cfg = config(SystemParams::default(), Scheme::Proposed);
        cfg.horizon = 2e3;
        cfg.warmup = 20.0;
        cfg.replications = 5;
        let stats = simulate(&cfg).unwrap();
        let window = (cfg.horizon - cfg.warmup) * f64::from(cfg.replications);
        for class in TrafficClass::ALL {
            let mean = class.arrival_rate(&cfg.params) * window;
            let sd = mean.sqrt();
            let observed = stats.class(class).offered as f64;
            assert!(
                (observed - mean).abs() <= 5.0 * sd,
                "{}: observed {observed}, expected {mean} +- 5*{sd}",
                class.name()
            );
        }
    }

    #[test]
    fn occupancy_matches_stationary_distribution() {
        let mut cfg = config(SystemParams::default(), Scheme::Proposed);
        cfg.seed = 7;
        cfg.replications = 5;
        let occ = occupancy_distribution(&cfg).unwrap();
        let total: f64 = occ.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() <= 1e-9, "mass sums to {total}");

        let sp = StateSpace::enumerate(&cfg.params, cfg.scheme).unwrap();
        let exact = solve_exact(&sp, &cfg.params, cfg.scheme).unwrap();
        let mut tv = 0.0;
        let mut seen = 0.0;
        for (s, w) in &occ {
            let idx = sp.index_of(*s).expect("simulated state outside the space");
            tv += (w - exact.probs[idx]).abs();
            seen += exact.probs[idx];
        }
        tv += 1.0 - seen; // states never visited
        tv /= 2.0;
        assert!(tv <= 0.02, "total-variation distance {tv}");
    }

    #[test]
    fn underlay_run_stays_inside_underlay_space() {
        let mut cfg = config(SystemParams::default(), Scheme::Underlay);
        cfg.horizon = 2e3;
        cfg.warmup = 20.0;
        cfg.replications = 2;
        let occ = occupancy_distribution(&cfg).unwrap();
        let sp = StateSpace::enumerate(&cfg.params, cfg.scheme).unwrap();
        for (s, w) in occ {
            assert!(sp.contains(s), "state {s} (mass {w}) outside the space");
        }
    }

    #[test]
    fn pasta_agreement_on_defaults() {
        let mut cfg = config(SystemParams::default(), Scheme::Proposed);
        cfg.horizon = 2e4;
        cfg.warmup = 200.0;
        cfg.replications = 5;
        let stats = simulate(&cfg).unwrap();
        let sp = StateSpace::enumerate(&cfg.params, cfg.scheme).unwrap();
        let exact = solve_exact(&sp, &cfg.params, cfg.scheme).unwrap();
        let report = blocking_probabilities(&exact, &sp, &cfg.params, cfg.scheme);
        for class in TrafficClass::ALL {
            let sim = stats.class(class);
            let analytic = report.get(class);
            assert!(
                (sim.estimate - analytic).abs() <= 3.0 * sim.half_width,
                "{}: simulated {} +- {} vs analytic {analytic}",
                class.name(),
                sim.estimate,
                sim.half_width
            );
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = SystemParams::default();
        let mut cfg = config(p, Scheme::Proposed);
        cfg.warmup = cfg.horizon;
        assert!(simulate(&cfg).is_err());
        let mut cfg = config(p, Scheme::Proposed);
        cfg.replications = 0;
        assert!(simulate(&cfg).is_err());
        let mut zero_rate = p;
        zero_rate.r_u_wf = 0.0;
        let cfg = config(zero_rate, Scheme::Proposed);
        assert!(matches!(simulate(&cfg), Err(Error::UnboundedStateSpace(_))));
    }
}

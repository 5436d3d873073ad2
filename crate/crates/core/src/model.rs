//! Traffic model: scenario parameters, the system state, admission guards,
//! and per-state transition rates.
//!
//! The system is a four-dimensional continuous-time Markov chain. A state
//! `(i, j, m, n)` counts in-service packets per class: `i` D2D packets on
//! licensed uplink channels, `j` conventional-cellular (CC) packets each
//! holding an uplink/downlink channel pair, `m` D2D packets on the unlicensed
//! band, and `n` Wi-Fi packets on the unlicensed band. Arrivals are Poisson,
//! packet sizes exponential, and admission is governed by a threshold-based
//! flow control that routes D2D traffic to the unlicensed band while it is
//! lightly loaded and to the licensed band otherwise.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// All rates, capacities, and thresholds defining one scenario.
///
/// Everything is expressed in normalized units: bit rates in multiples of a
/// reference channel rate, arrival rates in events per unit time, and packet
/// size through its reciprocal mean `mu`. The default values describe the
/// bundled reference scenario (see `scenarios/default.cfg`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Total arrival rate of gNB packet requests.
    pub lambda_total: f64,
    /// Probability that a gNB request selects D2D mode; the remainder uses CC.
    pub rho: f64,
    /// Wi-Fi packet arrival rate.
    pub lambda_wifi: f64,
    /// Reciprocal mean packet size.
    pub mu: f64,
    /// Per-packet D2D bit rate on the licensed band.
    pub r_l_dd: f64,
    /// Per-packet CC uplink bit rate.
    pub r_up_cc: f64,
    /// Per-packet CC downlink bit rate.
    pub r_dw_cc: f64,
    /// Per-packet D2D bit rate on the unlicensed band.
    pub r_u_dd: f64,
    /// Per-packet Wi-Fi bit rate on the unlicensed band.
    pub r_u_wf: f64,
    /// Licensed capacity dedicated to D2D (used by the overlay scheme).
    pub cap_dd: f64,
    /// Licensed uplink capacity shared by D2D and CC.
    pub cap_up: f64,
    /// Licensed downlink capacity for CC.
    pub cap_dw: f64,
    /// Unlicensed band capacity shared by D2D and Wi-Fi.
    pub cap_u: f64,
    /// Unlicensed flow-control threshold: load D2D may occupy before being
    /// steered to the licensed band. The complement `cap_u - theta_u` is the
    /// share reserved for Wi-Fi.
    pub theta_u: f64,
    /// Licensed threshold `cap_up - cap_dd`; recorded for scheme
    /// construction, it does not enter any admission guard directly.
    pub theta_l: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            lambda_total: 200.0,
            rho: 0.25,
            lambda_wifi: 100.0,
            mu: 1.0,
            r_l_dd: 1.0,
            r_up_cc: 1.0,
            r_dw_cc: 1.0,
            r_u_dd: 2.0,
            r_u_wf: 2.0,
            cap_dd: 2.0,
            cap_up: 6.0,
            cap_dw: 4.0,
            cap_u: 8.0,
            theta_u: 4.0,
            theta_l: 4.0,
        }
    }
}

impl SystemParams {
    /// Arrival rate of D2D packet requests.
    pub fn lambda_d2d(&self) -> f64 {
        self.rho * self.lambda_total
    }

    /// Arrival rate of CC packet requests.
    pub fn lambda_cc(&self) -> f64 {
        (1.0 - self.rho) * self.lambda_total
    }

    /// Per-packet service rate of a licensed D2D transmission.
    pub fn rate_d2d_licensed(&self) -> f64 {
        self.mu * self.r_l_dd
    }

    /// Per-packet service rate of a CC transmission. A CC packet holds an
    /// uplink/downlink pair, giving the combined rate `(mu/2)(r_up + r_dw)`.
    pub fn rate_cc(&self) -> f64 {
        0.5 * self.mu * (self.r_up_cc + self.r_dw_cc)
    }

    /// Per-packet service rate of an unlicensed D2D transmission.
    pub fn rate_d2d_unlicensed(&self) -> f64 {
        self.mu * self.r_u_dd
    }

    /// Per-packet service rate of a Wi-Fi transmission.
    pub fn rate_wifi(&self) -> f64 {
        self.mu * self.r_u_wf
    }

    /// Checks domain constraints, naming the offending field on failure.
    ///
    /// `theta_u` larger than `cap_u` is allowed: admission clamps the
    /// effective threshold to the band capacity, so sweeps past `cap_u`
    /// saturate instead of escaping the state space.
    pub fn validate(&self) -> Result<(), Error> {
        let nonneg = [
            ("lambda_total", self.lambda_total),
            ("rho", self.rho),
            ("lambda_wifi", self.lambda_wifi),
            ("mu", self.mu),
            ("r_l_dd", self.r_l_dd),
            ("r_up_cc", self.r_up_cc),
            ("r_dw_cc", self.r_dw_cc),
            ("r_u_dd", self.r_u_dd),
            ("r_u_wf", self.r_u_wf),
            ("cap_dd", self.cap_dd),
            ("cap_up", self.cap_up),
            ("cap_dw", self.cap_dw),
            ("cap_u", self.cap_u),
            ("theta_u", self.theta_u),
            ("theta_l", self.theta_l),
        ];
        for (key, value) in nonneg {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter {
                    key: key.to_string(),
                    message: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        if self.rho > 1.0 {
            return Err(Error::InvalidParameter {
                key: "rho".to_string(),
                message: format!("must lie in [0, 1], got {}", self.rho),
            });
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidParameter {
                key: "mu".to_string(),
                message: format!("must be > 0, got {}", self.mu),
            });
        }
        if self.cap_dd > self.cap_up {
            return Err(Error::InvalidParameter {
                key: "cap_dd".to_string(),
                message: format!(
                    "dedicated D2D capacity {} exceeds uplink capacity {}",
                    self.cap_dd, self.cap_up
                ),
            });
        }
        Ok(())
    }

    /// Fails if some traffic class offers load while its packets occupy zero
    /// bit rate: such packets are always admitted and never bound the state
    /// counts, so the reachable set would be infinite.
    pub fn ensure_bounded(&self, scheme: Scheme) -> Result<(), Error> {
        let _ = scheme;
        if self.lambda_d2d() > 0.0 && self.r_u_dd == 0.0 {
            return Err(Error::UnboundedStateSpace(
                "D2D traffic offered with r_u_dd = 0".to_string(),
            ));
        }
        if self.lambda_d2d() > 0.0 && self.r_l_dd == 0.0 {
            return Err(Error::UnboundedStateSpace(
                "D2D traffic offered with r_l_dd = 0".to_string(),
            ));
        }
        if self.lambda_cc() > 0.0 && self.r_up_cc == 0.0 && self.r_dw_cc == 0.0 {
            return Err(Error::UnboundedStateSpace(
                "CC traffic offered with r_up_cc = r_dw_cc = 0".to_string(),
            ));
        }
        if self.lambda_wifi > 0.0 && self.r_u_wf == 0.0 {
            return Err(Error::UnboundedStateSpace(
                "Wi-Fi traffic offered with r_u_wf = 0".to_string(),
            ));
        }
        Ok(())
    }
}

/// Band-allocation scheme variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Threshold-based flow control: D2D prefers the unlicensed band while
    /// its load is below `theta_u`, spilling into the shared licensed uplink
    /// pool otherwise.
    Proposed,
    /// D2D confined to its dedicated licensed share `cap_dd`, CC confined to
    /// the remainder; unlicensed flow control unchanged.
    Overlay,
    /// D2D and CC compete for the full licensed pool and unlicensed flow
    /// control is disabled (effective threshold equals the band capacity).
    Underlay,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Overlay, Scheme::Underlay];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Overlay => "overlay",
            Scheme::Underlay => "underlay",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "proposed" => Ok(Scheme::Proposed),
            "overlay" => Ok(Scheme::Overlay),
            "underlay" => Ok(Scheme::Underlay),
            other => Err(format!(
                "unknown scheme `{other}` (expected proposed, overlay, or underlay)"
            )),
        }
    }
}

/// The chain state: in-service packet counts per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    /// Licensed D2D packets.
    pub i: u32,
    /// CC packets (each holds one uplink and one downlink channel).
    pub j: u32,
    /// Unlicensed D2D packets.
    pub m: u32,
    /// Wi-Fi packets.
    pub n: u32,
}

impl State {
    pub const EMPTY: State = State { i: 0, j: 0, m: 0, n: 0 };

    pub fn new(i: u32, j: u32, m: u32, n: u32) -> State {
        State { i, j, m, n }
    }

    /// Occupied bit rate on the licensed uplink pool.
    pub fn licensed_load(&self, p: &SystemParams) -> f64 {
        f64::from(self.i) * p.r_l_dd + f64::from(self.j) * p.r_up_cc
    }

    /// Occupied bit rate on the licensed downlink pool.
    pub fn downlink_load(&self, p: &SystemParams) -> f64 {
        f64::from(self.j) * p.r_dw_cc
    }

    /// Occupied bit rate on the unlicensed band.
    pub fn unlicensed_load(&self, p: &SystemParams) -> f64 {
        f64::from(self.m) * p.r_u_dd + f64::from(self.n) * p.r_u_wf
    }

    /// Capacity constraints every state must satisfy.
    pub fn is_legal(&self, p: &SystemParams) -> bool {
        self.licensed_load(p) <= p.cap_up
            && self.downlink_load(p) <= p.cap_dw
            && self.unlicensed_load(p) <= p.cap_u
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.i, self.j, self.m, self.n)
    }
}

/// Effective unlicensed threshold: the configured `theta_u` clamped to the
/// band capacity (proposed/overlay), or the full capacity under underlay,
/// where flow control is disabled.
pub fn effective_theta_u(p: &SystemParams, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Proposed | Scheme::Overlay => p.theta_u.min(p.cap_u),
        Scheme::Underlay => p.cap_u,
    }
}

/// Admission of a D2D packet onto the unlicensed band: the band must stay
/// within the effective threshold after adding one D2D packet.
pub fn admit_d2d_unlicensed(s: State, p: &SystemParams, scheme: Scheme) -> bool {
    s.unlicensed_load(p) <= effective_theta_u(p, scheme) - p.r_u_dd
}

/// Admission of a D2D packet onto the licensed band: taken only when the
/// unlicensed band is already loaded past the threshold, and the licensed
/// pool still fits one more D2D packet. Under overlay the fit is against the
/// dedicated D2D share instead of the shared uplink pool; the pool-capacity
/// conjunct is implied on every reachable overlay state and only matters on
/// legal-but-unreachable inputs, where it keeps targets inside the capacity
/// region.
pub fn admit_d2d_licensed(s: State, p: &SystemParams, scheme: Scheme) -> bool {
    let heavy = s.unlicensed_load(p) > effective_theta_u(p, scheme) - p.r_u_dd;
    let pool_fits = s.licensed_load(p) <= p.cap_up - p.r_l_dd;
    let fits = match scheme {
        Scheme::Proposed | Scheme::Underlay => pool_fits,
        Scheme::Overlay => f64::from(s.i) * p.r_l_dd <= p.cap_dd - p.r_l_dd && pool_fits,
    };
    heavy && fits
}

/// Admission of a CC packet: one uplink and one downlink channel must fit.
/// Under overlay, CC draws from its own share `cap_up - cap_dd`, which the
/// dedicated D2D occupancy does not touch; as above, the pool conjunct is
/// redundant on reachable states.
pub fn admit_cc(s: State, p: &SystemParams, scheme: Scheme) -> bool {
    let pool_ok = s.licensed_load(p) <= p.cap_up - p.r_up_cc;
    let up_ok = match scheme {
        Scheme::Proposed | Scheme::Underlay => pool_ok,
        Scheme::Overlay => {
            f64::from(s.j) * p.r_up_cc <= (p.cap_up - p.cap_dd) - p.r_up_cc && pool_ok
        }
    };
    up_ok && s.downlink_load(p) <= p.cap_dw - p.r_dw_cc
}

/// Admission of a Wi-Fi packet: plain capacity check on the unlicensed band.
pub fn admit_wifi(s: State, p: &SystemParams, _scheme: Scheme) -> bool {
    s.unlicensed_load(p) <= p.cap_u - p.r_u_wf
}

/// Traffic classes as seen by arrivals (D2D routing between bands happens
/// after arrival, so there is a single D2D arrival stream).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficClass {
    D2d,
    Cc,
    Wifi,
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 3] = [TrafficClass::D2d, TrafficClass::Cc, TrafficClass::Wifi];

    pub fn name(self) -> &'static str {
        match self {
            TrafficClass::D2d => "d2d",
            TrafficClass::Cc => "cc",
            TrafficClass::Wifi => "wifi",
        }
    }

    pub fn arrival_rate(self, p: &SystemParams) -> f64 {
        match self {
            TrafficClass::D2d => p.lambda_d2d(),
            TrafficClass::Cc => p.lambda_cc(),
            TrafficClass::Wifi => p.lambda_wifi,
        }
    }
}

/// True when an arrival of `class` at state `s` would be accepted somewhere.
pub fn admits(class: TrafficClass, s: State, p: &SystemParams, scheme: Scheme) -> bool {
    match class {
        TrafficClass::D2d => {
            admit_d2d_unlicensed(s, p, scheme) || admit_d2d_licensed(s, p, scheme)
        }
        TrafficClass::Cc => admit_cc(s, p, scheme),
        TrafficClass::Wifi => admit_wifi(s, p, scheme),
    }
}

/// Kind tag for a single transition of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    D2dLicensedArrival,
    CcArrival,
    D2dUnlicensedArrival,
    WifiArrival,
    D2dLicensedDeparture,
    CcDeparture,
    D2dUnlicensedDeparture,
    WifiDeparture,
}

impl TransitionKind {
    pub fn is_arrival(self) -> bool {
        matches!(
            self,
            TransitionKind::D2dLicensedArrival
                | TransitionKind::CcArrival
                | TransitionKind::D2dUnlicensedArrival
                | TransitionKind::WifiArrival
        )
    }
}

/// One outgoing transition: target state and rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub target: State,
    pub rate: f64,
    pub kind: TransitionKind,
}

/// All outgoing transitions from `s` with positive rate, in a fixed order:
/// the four admission-guarded arrivals, then the four departures. The D2D
/// licensed and unlicensed arrivals are mutually exclusive by construction
/// (their unlicensed-load conditions are complementary).
pub fn transitions_out(s: State, p: &SystemParams, scheme: Scheme) -> Vec<Transition> {
    let mut out = Vec::with_capacity(8);
    let lam_d2d = p.lambda_d2d();
    let lam_cc = p.lambda_cc();

    if lam_d2d > 0.0 && admit_d2d_licensed(s, p, scheme) {
        out.push(Transition {
            target: State::new(s.i + 1, s.j, s.m, s.n),
            rate: lam_d2d,
            kind: TransitionKind::D2dLicensedArrival,
        });
    }
    if lam_cc > 0.0 && admit_cc(s, p, scheme) {
        out.push(Transition {
            target: State::new(s.i, s.j + 1, s.m, s.n),
            rate: lam_cc,
            kind: TransitionKind::CcArrival,
        });
    }
    if lam_d2d > 0.0 && admit_d2d_unlicensed(s, p, scheme) {
        out.push(Transition {
            target: State::new(s.i, s.j, s.m + 1, s.n),
            rate: lam_d2d,
            kind: TransitionKind::D2dUnlicensedArrival,
        });
    }
    if p.lambda_wifi > 0.0 && admit_wifi(s, p, scheme) {
        out.push(Transition {
            target: State::new(s.i, s.j, s.m, s.n + 1),
            rate: p.lambda_wifi,
            kind: TransitionKind::WifiArrival,
        });
    }

    if s.i > 0 {
        out.push(Transition {
            target: State::new(s.i - 1, s.j, s.m, s.n),
            rate: f64::from(s.i) * p.rate_d2d_licensed(),
            kind: TransitionKind::D2dLicensedDeparture,
        });
    }
    if s.j > 0 {
        out.push(Transition {
            target: State::new(s.i, s.j - 1, s.m, s.n),
            rate: f64::from(s.j) * p.rate_cc(),
            kind: TransitionKind::CcDeparture,
        });
    }
    if s.m > 0 {
        out.push(Transition {
            target: State::new(s.i, s.j, s.m - 1, s.n),
            rate: f64::from(s.m) * p.rate_d2d_unlicensed(),
            kind: TransitionKind::D2dUnlicensedDeparture,
        });
    }
    if s.n > 0 {
        out.push(Transition {
            target: State::new(s.i, s.j, s.m, s.n - 1),
            rate: f64::from(s.n) * p.rate_wifi(),
            kind: TransitionKind::WifiDeparture,
        });
    }

    out.retain(|t| t.rate > 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn derived_arrival_rates_split_exactly() {
        let p = defaults();
        assert_eq!(p.lambda_d2d(), 50.0);
        assert_eq!(p.lambda_cc(), 150.0);
        assert_eq!(p.lambda_d2d() + p.lambda_cc(), p.lambda_total);
    }

    #[test]
    fn d2d_unlicensed_guard_on_defaults() {
        let p = defaults();
        assert!(admit_d2d_unlicensed(State::EMPTY, &p, Scheme::Proposed));
        assert!(admit_d2d_unlicensed(State::new(0, 0, 1, 0), &p, Scheme::Proposed));
        assert!(!admit_d2d_unlicensed(State::new(0, 0, 0, 2), &p, Scheme::Proposed));
    }

    #[test]
    fn d2d_licensed_guard_on_defaults() {
        let p = defaults();
        // Unlicensed heavy, licensed fits.
        assert!(admit_d2d_licensed(State::new(0, 0, 0, 2), &p, Scheme::Proposed));
        // Unlicensed light: routed to the unlicensed band instead.
        assert!(!admit_d2d_licensed(State::EMPTY, &p, Scheme::Proposed));
        // Licensed full.
        assert!(!admit_d2d_licensed(State::new(6, 0, 0, 2), &p, Scheme::Proposed));
    }

    #[test]
    fn cc_guard_on_defaults() {
        let p = defaults();
        assert!(admit_cc(State::EMPTY, &p, Scheme::Proposed));
        // Downlink full: j = 4 of capacity 4.
        assert!(!admit_cc(State::new(0, 4, 0, 0), &p, Scheme::Proposed));
        // Uplink full: 5 + 1 > 6 - 1.
        assert!(!admit_cc(State::new(5, 1, 0, 0), &p, Scheme::Proposed));
    }

    #[test]
    fn wifi_guard_on_defaults() {
        let p = defaults();
        assert!(admit_wifi(State::new(0, 0, 0, 3), &p, Scheme::Proposed));
        assert!(!admit_wifi(State::new(0, 0, 2, 2), &p, Scheme::Proposed));
        assert!(admit_wifi(State::new(0, 0, 1, 2), &p, Scheme::Proposed));
    }

    #[test]
    fn transitions_from_empty_state() {
        let p = defaults();
        let ts = transitions_out(State::EMPTY, &p, Scheme::Proposed);
        assert_eq!(ts.len(), 3);
        let find = |kind| ts.iter().find(|t| t.kind == kind).copied();
        let unl = find(TransitionKind::D2dUnlicensedArrival).unwrap();
        assert_eq!(unl.target, State::new(0, 0, 1, 0));
        assert_eq!(unl.rate, 50.0);
        let cc = find(TransitionKind::CcArrival).unwrap();
        assert_eq!(cc.target, State::new(0, 1, 0, 0));
        assert_eq!(cc.rate, 150.0);
        let wf = find(TransitionKind::WifiArrival).unwrap();
        assert_eq!(wf.target, State::new(0, 0, 0, 1));
        assert_eq!(wf.rate, 100.0);
        // No licensed D2D arrival while the unlicensed band is light.
        assert!(find(TransitionKind::D2dLicensedArrival).is_none());
    }

    #[test]
    fn transitions_from_interior_state() {
        // Verified against an independent enumeration of the guard formulas:
        // at (1,1,1,1) the unlicensed band is heavy (load 4 > 2), so the D2D
        // arrival goes licensed; all four departures are active.
        let p = defaults();
        let ts = transitions_out(State::new(1, 1, 1, 1), &p, Scheme::Proposed);
        assert_eq!(ts.len(), 7);
        let get = |kind| ts.iter().find(|t| t.kind == kind).copied();
        assert_eq!(get(TransitionKind::D2dLicensedArrival).unwrap().rate, 50.0);
        assert!(get(TransitionKind::D2dUnlicensedArrival).is_none());
        assert_eq!(get(TransitionKind::CcArrival).unwrap().rate, 150.0);
        assert_eq!(get(TransitionKind::WifiArrival).unwrap().rate, 100.0);
        assert_eq!(get(TransitionKind::D2dLicensedDeparture).unwrap().rate, 1.0);
        assert_eq!(get(TransitionKind::CcDeparture).unwrap().rate, 1.0);
        assert_eq!(get(TransitionKind::D2dUnlicensedDeparture).unwrap().rate, 2.0);
        assert_eq!(get(TransitionKind::WifiDeparture).unwrap().rate, 2.0);
    }

    #[test]
    fn transitions_from_wifi_saturated_state() {
        let p = defaults();
        let ts = transitions_out(State::new(0, 0, 0, 4), &p, Scheme::Proposed);
        assert_eq!(ts.len(), 3);
        let get = |kind| ts.iter().find(|t| t.kind == kind).copied();
        assert_eq!(get(TransitionKind::WifiDeparture).unwrap().rate, 8.0);
        assert_eq!(
            get(TransitionKind::D2dLicensedArrival).unwrap().target,
            State::new(1, 0, 0, 4)
        );
        assert_eq!(get(TransitionKind::CcArrival).unwrap().rate, 150.0);
        assert!(get(TransitionKind::WifiArrival).is_none());
    }

    #[test]
    fn validate_rejects_out_of_range_rho() {
        let mut p = defaults();
        p.rho = 1.5;
        let err = p.validate().unwrap_err();
        assert!(err.to_string().contains("rho"));
    }

    #[test]
    fn validate_rejects_dedicated_exceeding_uplink() {
        let mut p = defaults();
        p.cap_dd = 7.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_rate_admissible_class_is_unbounded() {
        let mut p = defaults();
        p.r_u_wf = 0.0;
        assert!(matches!(
            p.ensure_bounded(Scheme::Proposed),
            Err(Error::UnboundedStateSpace(_))
        ));
        p.lambda_wifi = 0.0;
        assert!(p.ensure_bounded(Scheme::Proposed).is_ok());
    }

    #[test]
    fn underlay_matches_proposed_when_threshold_open() {
        // With theta_u at capacity and the dedicated share covering the whole
        // pool, proposed and underlay guards agree on every legal state.
        let mut p = defaults();
        p.theta_u = p.cap_u;
        p.cap_dd = p.cap_up;
        for i in 0..=6 {
            for j in 0..=4 {
                for m in 0..=4 {
                    for n in 0..=4 {
                        let s = State::new(i, j, m, n);
                        if !s.is_legal(&p) {
                            continue;
                        }
                        for class in TrafficClass::ALL {
                            assert_eq!(
                                admits(class, s, &p, Scheme::Proposed),
                                admits(class, s, &p, Scheme::Underlay),
                                "class {} at {s}",
                                class.name()
                            );
                        }
                    }
                }
            }
        }
    }
}

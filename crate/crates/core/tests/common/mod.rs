//! Shared test oracles, kept independent of the library's implementation
//! paths: the closed-form loss formula, a brute-force reachability
//! enumerator over the raw integer box, and the blocking-set membership
//! conditions written as literal inequalities.

use bandalloc::model::{Scheme, State, SystemParams};

/// Blocking probability of an M/M/k/k loss system via the standard
/// recursion `B_k = a B_{k-1} / (k + a B_{k-1})`.
pub fn erlang_b(servers: u32, offered: f64) -> f64 {
    let mut b = 1.0;
    for k in 1..=servers {
        b = offered * b / (f64::from(k) + offered * b);
    }
    b
}

/// Effective unlicensed threshold, written out per scheme.
pub fn theta_effective(p: &SystemParams, scheme: Scheme) -> f64 {
    match scheme {
        Scheme::Underlay => p.cap_u,
        _ => {
            if p.theta_u < p.cap_u {
                p.theta_u
            } else {
                p.cap_u
            }
        }
    }
}

fn lic(s: &State, p: &SystemParams) -> f64 {
    f64::from(s.i) * p.r_l_dd + f64::from(s.j) * p.r_up_cc
}

fn unl(s: &State, p: &SystemParams) -> f64 {
    f64::from(s.m) * p.r_u_dd + f64::from(s.n) * p.r_u_wf
}

/// Literal blocking-set membership for D2D packets: the licensed pool cannot
/// fit another D2D packet while the unlicensed band sits past its threshold.
/// The overlay form also blocks when the shared pool itself is exhausted,
/// which on reachable states is implied by the dedicated-share condition.
pub fn blocked_set_d2d(s: &State, p: &SystemParams, scheme: Scheme) -> bool {
    let licensed_unfit = match scheme {
        Scheme::Overlay => {
            f64::from(s.i) * p.r_l_dd > p.cap_dd - p.r_l_dd || lic(s, p) > p.cap_up - p.r_l_dd
        }
        _ => lic(s, p) > p.cap_up - p.r_l_dd,
    };
    let unlicensed_heavy = unl(s, p) > theta_effective(p, scheme) - p.r_u_dd;
    licensed_unfit && unlicensed_heavy
}

/// Literal blocking-set membership for CC packets: uplink or downlink side
/// cannot fit another channel pair.
pub fn blocked_set_cc(s: &State, p: &SystemParams, scheme: Scheme) -> bool {
    let up_unfit = match scheme {
        Scheme::Overlay => {
            f64::from(s.j) * p.r_up_cc > (p.cap_up - p.cap_dd) - p.r_up_cc
                || lic(s, p) > p.cap_up - p.r_up_cc
        }
        _ => lic(s, p) > p.cap_up - p.r_up_cc,
    };
    up_unfit || f64::from(s.j) * p.r_dw_cc > p.cap_dw - p.r_dw_cc
}

/// Literal blocking-set membership for Wi-Fi packets.
pub fn blocked_set_wifi(s: &State, p: &SystemParams, _scheme: Scheme) -> bool {
    unl(s, p) > p.cap_u - p.r_u_wf
}

fn step_targets(s: &State, p: &SystemParams, scheme: Scheme) -> Vec<State> {
    let mut out = Vec::new();
    // Arrivals, routed by the literal blocking-set conditions.
    if p.lambda_d2d() > 0.0 && !blocked_set_d2d(s, p, scheme) {
        if unl(s, p) <= theta_effective(p, scheme) - p.r_u_dd {
            out.push(State::new(s.i, s.j, s.m + 1, s.n));
        } else {
            out.push(State::new(s.i + 1, s.j, s.m, s.n));
        }
    }
    if p.lambda_cc() > 0.0 && !blocked_set_cc(s, p, scheme) {
        out.push(State::new(s.i, s.j + 1, s.m, s.n));
    }
    if p.lambda_wifi > 0.0 && !blocked_set_wifi(s, p, scheme) {
        out.push(State::new(s.i, s.j, s.m, s.n + 1));
    }
    // Departures: any occupied dimension may release one packet. These
    // matter for reachability because admission guards couple dimensions
    // (a licensed D2D packet admitted under a loaded unlicensed band stays
    // after that load drains away).
    if s.i > 0 {
        out.push(State::new(s.i - 1, s.j, s.m, s.n));
    }
    if s.j > 0 {
        out.push(State::new(s.i, s.j - 1, s.m, s.n));
    }
    if s.m > 0 {
        out.push(State::new(s.i, s.j, s.m - 1, s.n));
    }
    if s.n > 0 {
        out.push(State::new(s.i, s.j, s.m, s.n - 1));
    }
    out
}

/// Brute-force reachable set: fixpoint closure inside the raw integer box,
/// computed without the library's breadth-first enumeration or guard
/// functions (set scans with literal inequality predicates instead).
pub fn brute_force_reachable(p: &SystemParams, scheme: Scheme) -> Vec<State> {
    let bound = |cap: f64, rate: f64| -> u32 {
        if rate > 0.0 {
            (cap / rate).floor() as u32
        } else {
            0
        }
    };
    let i_max = bound(p.cap_up, p.r_l_dd);
    let j_max = bound(p.cap_up, p.r_up_cc).min(bound(p.cap_dw, p.r_dw_cc));
    let m_max = bound(p.cap_u, p.r_u_dd);
    let n_max = bound(p.cap_u, p.r_u_wf);

    let mut reachable = vec![State::EMPTY];
    let mut changed = true;
    while changed {
        changed = false;
        let mut next = reachable.clone();
        for s in &reachable {
            for t in step_targets(s, p, scheme) {
                if t.i > i_max || t.j > j_max || t.m > m_max || t.n > n_max {
                    continue;
                }
                if !t.is_legal(p) {
                    continue;
                }
                if !next.contains(&t) {
                    next.push(t);
                    changed = true;
                }
            }
        }
        reachable = next;
    }
    reachable.sort_unstable();
    reachable
}

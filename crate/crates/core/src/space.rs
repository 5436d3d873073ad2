//! Enumeration of the reachable state set with a dense bidirectional index.
//!
//! The operative state space is the breadth-first closure of the empty state
//! under the model's transitions. Admission guards keep every reachable
//! state within the capacity constraints, and the closure definition keeps
//! the chain on a single communicating class, which the solvers rely on.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::{DefaultHasher, Hash, Hasher};

use crate::error::Error;
use crate::model::{transitions_out, Scheme, State, SystemParams};

/// The enumerated state set, sorted lexicographically by `(i, j, m, n)`,
/// together with the inverse index used by the vectorized solvers.
#[derive(Debug, Clone)]
pub struct StateSpace {
    states: Vec<State>,
    index: HashMap<State, usize>,
    fingerprint: u64,
}

impl StateSpace {
    /// Enumerates the reachable closure of the empty state for `(p, scheme)`.
    ///
    /// Deterministic: repeated calls yield identical ordered lists. Fails if
    /// the parameters admit an unbounded class (see
    /// [`SystemParams::ensure_bounded`]) or violate their domain constraints.
    pub fn enumerate(p: &SystemParams, scheme: Scheme) -> Result<StateSpace, Error> {
        p.validate()?;
        p.ensure_bounded(scheme)?;

        let mut index = HashMap::new();
        let mut queue = VecDeque::new();
        index.insert(State::EMPTY, 0);
        queue.push_back(State::EMPTY);
        while let Some(s) = queue.pop_front() {
            debug_assert!(s.is_legal(p), "reachable state {s} escapes capacity bounds");
            for t in transitions_out(s, p, scheme) {
                if !index.contains_key(&t.target) {
                    index.insert(t.target, 0);
                    queue.push_back(t.target);
                }
            }
        }

        let mut states: Vec<State> = index.keys().copied().collect();
        states.sort_unstable();
        for (pos, s) in states.iter().enumerate() {
            index.insert(*s, pos);
        }

        Ok(StateSpace {
            states,
            index,
            fingerprint: fingerprint(p, scheme),
        })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, s: State) -> bool {
        self.index.contains_key(&s)
    }

    /// Dense position of `s` in lexicographic order, if reachable.
    pub fn index_of(&self, s: State) -> Option<usize> {
        self.index.get(&s).copied()
    }

    /// Hash of the `(SystemParams, Scheme)` pair that produced this space.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Debug dump: one state per line as `i,j,m,n` in lexicographic order.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.states.len() * 8);
        for s in &self.states {
            writeln!(out, "{},{},{},{}", s.i, s.j, s.m, s.n).expect("string write");
        }
        out
    }
}

fn fingerprint(p: &SystemParams, scheme: Scheme) -> u64 {
    let mut h = DefaultHasher::new();
    for v in [
        p.lambda_total,
        p.rho,
        p.lambda_wifi,
        p.mu,
        p.r_l_dd,
        p.r_up_cc,
        p.r_dw_cc,
        p.r_u_dd,
        p.r_u_wf,
        p.cap_dd,
        p.cap_up,
        p.cap_dw,
        p.cap_u,
        p.theta_u,
        p.theta_l,
    ] {
        v.to_bits().hash(&mut h);
    }
    scheme.name().hash(&mut h);
    h.finish()
}

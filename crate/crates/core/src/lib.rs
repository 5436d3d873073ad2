//! Analysis of licensed/unlicensed band sharing between device-to-device
//! (D2D), conventional cellular (CC), and Wi-Fi traffic.
//!
//! The system is modeled as a four-dimensional continuous-time Markov chain
//! with threshold-based flow control steering D2D packets between the
//! unlicensed and licensed bands. The crate provides:
//!
//! * the traffic model itself — parameters, state, admission guards, and
//!   transition rates ([`model`]);
//! * enumeration of the reachable state space ([`space`]);
//! * stationary solvers — a fixed-point iteration and a direct LU oracle —
//!   plus per-class blocking probabilities ([`solver`]);
//! * an independent discrete-event simulator with confidence intervals
//!   ([`sim`]);
//! * scenario files, parameter sweeps, scheme comparison, and
//!   solver-versus-simulator validation ([`scenario`], [`sweep`]).
//!
//! The `bandalloc` binary exposes all of it as CLI subcommands; see the
//! repository README.
//!
//! ```
//! use bandalloc::{Scheme, StateSpace, SystemParams};
//! use bandalloc::solver::{blocking_probabilities, solve_exact};
//!
//! let params = SystemParams::default();
//! let space = StateSpace::enumerate(&params, Scheme::Proposed)?;
//! let dist = solve_exact(&space, &params, Scheme::Proposed)?;
//! let report = blocking_probabilities(&dist, &space, &params, Scheme::Proposed);
//! assert!(report.p_block_wifi > 0.9); // the default scenario runs hot
//! # Ok::<(), bandalloc::Error>(())
//! ```

pub mod error;
pub mod model;
pub mod scenario;
pub mod sim;
pub mod solver;
pub mod space;
pub mod sweep;

pub use error::Error;
pub use model::{Scheme, State, SystemParams, TrafficClass};
pub use scenario::{Scenario, SolverChoice};
pub use sim::{SimConfig, SimStats};
pub use solver::{BlockingReport, StationaryDistribution};
pub use space::StateSpace;

//! Simulator for adaptive multi-metric routing in vehicular networks.
//!
//! Vehicles move on a straight multi-lane road dotted with road side units.
//! A packet travels hop by hop from a random source to a random destination;
//! each hop is chosen by one of five routing schemes and succeeds with the
//! reception probability of a shadowed, Rayleigh-faded radio link.
//!
//! The crate is organised bottom-up: [`topology`] and [`channel`] model the
//! world, [`netstate`] holds loads, delays and path constraints, [`routing`]
//! is the adaptive scheme, [`baselines`] the comparison schemes, and [`sim`]
//! runs episodes and density sweeps. [`io`] reads configs and writes results.

// `!(x <= y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod error;
pub mod io;
pub mod links;
pub mod netstate;
pub mod rng;
pub mod routing;
pub mod sim;
pub mod topology;

pub use channel::{ChannelParams, LinkQuality};
pub use error::{Error, Result};
pub use links::{FadingField, FadingMode, LinkEnv};
pub use netstate::{PathConstraints, PathRecord};
pub use routing::{MetricWeights, ProposedParams, RouteDecision, TransmissionMode};
pub use sim::{Algorithm, Episode, EpisodeMetrics, SimConfig, SweepRow, Termination};
pub use topology::{RsuId, Topology, TopologyParams, Vec2, VehicleId};

//! Hotplug coded caching: finite-field primitives, MDS placement codes,
//! private and non-private delivery schemes, converse bounds and exact
//! verification oracles.

pub mod bounds;
pub mod gf;
pub mod mds;
pub mod model;
pub mod schemes;
pub mod verify;
pub mod cli;

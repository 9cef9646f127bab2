//! Geodetic cycle decompositions of edge-weighted graphs.
//!
//! Finite graphs are handled exactly: every cycle splits into geodetic cycles
//! no longer than itself. Locally finite infinite graphs are approached through
//! a hierarchy of finite truncations whose auxiliary "outer" edges carry
//! certified distance intervals; on those truncations the crate decomposes
//! cycles into short geodetic cycles, follows chains of restrictions, and runs
//! the stage-wise generating construction to a finite depth.
//!
//! All lengths are exact rationals ([`Length`]).

pub mod cycle;
pub mod decompose;
pub mod edgeset;
pub mod error;
pub mod experiments;
pub mod geodesy;
pub mod graph;
pub mod length;
pub mod pipeline;
pub mod truncation;
pub mod cli;

pub use cycle::{decompose_into_circuits, is_cycle_space_member, Cycle, Path};
pub use edgeset::{gf2_rank, set_length, symmetric_sum, EdgeSet};
pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Graph, GraphDocument, VertexId};
pub use length::Length;

//! Exact tools for 3-colorings of triangle-free plane graphs: counting and
//! extension, request graphs and their gadgets, 5-cycle decompositions,
//! list-coloring hypothesis checks, Clebsch-graph homomorphisms and cogs.

pub mod clebsch;
pub mod cogs;
pub mod coloring;
pub mod decomposition;
pub mod embed;
pub mod generate;
pub mod io;
pub mod listcolor;
pub mod par;
pub mod plane_graph;
pub mod requests;
pub mod verify;

pub use coloring::{Color, Coloring, ColoringError};
pub use par::Jobs;
pub use plane_graph::{CycleRef, EmbeddingError, Face, OuterFace, PlaneGraph, Vertex};
pub use requests::{RequestGraph, SatisfactionResult, Weight};

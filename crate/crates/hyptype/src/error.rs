//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must be connected")]
    Disconnected,
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("unknown vertex v{0}")]
    UnknownVertex(u32),
    #[error("unknown edge e{0}")]
    UnknownEdge(u32),
    #[error("duplicate vertex id v{0}")]
    DuplicateVertex(u32),
    #[error("duplicate edge id e{0}")]
    DuplicateEdge(u32),
    #[error("edge e{0} must have positive length")]
    NonpositiveLength(u32),
    #[error("edge e{0} has no length assigned")]
    MissingLength(u32),
    #[error("deleting edge e{0} would disconnect the graph")]
    WouldDisconnect(u32),
    #[error("operation requires genus at least {required}, found {found}")]
    GenusTooSmall { required: u32, found: u32 },
    #[error("operation requires a stable graph, but vertex v{0} is unstable")]
    Unstable(u32),
    #[error("operation requires a 2-connected graph: {0}")]
    NotTwoConnected(String),
    #[error("operation requires a loopless graph, found loop e{0}")]
    HasLoop(u32),
    #[error("{what} exceeds the size guard: {found} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        found: usize,
    },
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("ear decomposition failure: {0}")]
    EarPipeline(String),
    #[error("internal verification failure: {0}")]
    Verification(String),
    #[error("{0}")]
    Document(String),
    #[error("bounds are infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

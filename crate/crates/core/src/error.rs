use std::io;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rank {src} cannot send to rank {dst} (p = {ranks})")]
    InvalidDestination { src: usize, dst: usize, ranks: usize },

    #[error("deadlock: every live rank is blocked and no message is in flight")]
    Deadlock,

    #[error("protocol violation at rank {rank}: {detail}")]
    Protocol { rank: usize, detail: String },

    #[error("node {node} is out of range for a graph with {nodes} nodes")]
    NodeOutOfRange { node: NodeId, nodes: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn protocol(rank: usize, detail: impl Into<String>) -> Self {
        Error::Protocol {
            rank,
            detail: detail.into(),
        }
    }
}

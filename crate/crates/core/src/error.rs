use thiserror::Error;

/// Errors raised by graph construction, matrix kernels and the closed forms.
///
/// [`Error::name`] gives the stable identifier printed by the command-line
/// tool.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("graph has no blocks")]
    EmptyGraph,
    #[error("block {index} has an empty part (m = {m}, n = {n})")]
    InvalidBlock { index: usize, m: usize, n: usize },
    #[error("bad attachment: {0}")]
    BadAttachment(String),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph is not connected")]
    NotConnected,
    #[error("block containing vertices {0:?} has an odd cycle")]
    BlockNotBipartite(Vec<usize>),
    #[error("block containing vertices {0:?} is bipartite but not complete bipartite")]
    BlockNotCompleteBipartite(Vec<usize>),
    #[error("edge ({0}, {1}) is a loop or repeats an earlier edge")]
    MultiEdgeOrLoop(usize, usize),

    #[error("q must be nonzero")]
    ZeroQ,
    #[error("1 - q^2 (m-1)(n-1) vanishes for block(s) {0:?}")]
    VanishingBlockDenominator(Vec<usize>),
    #[error("a I + b J is singular (a = {a}, a + n b = {a_plus_nb})")]
    SingularForm { a: String, a_plus_nb: String },
    #[error("leading {0}x{0} block is singular")]
    SingularLeadingBlock(usize),
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("operation needs at least two blocks")]
    NotEnoughBlocks,
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SingularMatrix => "SingularMatrix",
            Error::InvalidRational(_) => "InvalidRational",
            Error::EmptyGraph => "EmptyGraph",
            Error::InvalidBlock { .. } => "InvalidBlock",
            Error::BadAttachment(_) => "BadAttachment",
            Error::VertexOutOfRange(_) => "VertexOutOfRange",
            Error::NotConnected => "NotConnected",
            Error::BlockNotBipartite(_) => "BlockNotBipartite",
            Error::BlockNotCompleteBipartite(_) => "BlockNotCompleteBipartite",
            Error::MultiEdgeOrLoop(..) => "MultiEdgeOrLoop",
            Error::ZeroQ => "ZeroQ",
            Error::VanishingBlockDenominator(_) => "VanishingBlockDenominator",
            Error::SingularForm { .. } => "SingularForm",
            Error::SingularLeadingBlock(_) => "SingularLeadingBlock",
            Error::SingularParameter(_) => "SingularParameter",
            Error::NotEnoughBlocks => "NotEnoughBlocks",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

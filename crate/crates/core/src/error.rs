use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// The interface hypothesis an element violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisKind {
    /// An edge is crossed more than once.
    MultipleEdgeCrossings,
    /// The interface crosses the element boundary at other than two edges.
    CrossingCount,
    /// The interface cuts an element touching the outer boundary.
    BoundaryElementCut,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interface hypothesis violated at element {element}: {kind:?}")]
    Hypothesis { element: usize, kind: HypothesisKind },

    #[error("degenerate cut in element {element}: {reason}")]
    DegenerateCut { element: usize, reason: String },

    #[error("ill-conditioned local IFE system in element {element} (condition {condition:.3e})")]
    IllConditioned { element: usize, condition: f64 },

    #[error("point ({x}, {y}) lies outside element {element}")]
    OutsideElement { element: usize, x: f64, y: f64 },

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("solver did not reach tolerance: relative residual {residual:.3e} > {tolerance:.3e}")]
    NotConverged { residual: f64, tolerance: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("stage `{stage}` failed for N = {n}: {source}")]
    Stage {
        stage: &'static str,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tag an error with the pipeline stage and mesh size it came from.
    pub fn at_stage(self, stage: &'static str, n: usize) -> Error {
        Error::Stage { stage, n, source: Box::new(self) }
    }
}

use thiserror::Error;

/// Every failure the library can report.
///
/// The variant name doubles as the machine-readable error name printed by the
/// command-line tool (`error: <Name>: <detail>`).
#[derive(Debug, Error)]
pub enum SvemError {
    #[error("point {0} lies on the projection singularity of the surface")]
    DegeneratePoint(String),
    #[error("face {face}: {reason}")]
    DegenerateFace { face: usize, reason: String },
    #[error("face {face} is not star-shaped (empty kernel)")]
    EmptyKernel { face: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("{0}")]
    InvalidMesh(String),
    #[error("{0}")]
    SeamMismatch(String),
    #[error("{0}")]
    ToleranceAmbiguity(String),
    #[error("face {face}: singular local projector system")]
    SingularLocalSystem { face: usize },
    #[error("{0}")]
    ConstraintMismatch(String),
    #[error("{0}")]
    SingularSystem(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("level {level}: {source}")]
    AtLevel { level: usize, source: Box<SvemError> },
}

impl SvemError {
    /// Stable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            SvemError::DegeneratePoint(_) => "DegeneratePoint",
            SvemError::DegenerateFace { .. } => "DegenerateFace",
            SvemError::EmptyKernel { .. } => "EmptyKernel",
            SvemError::InvalidParameter(_) => "InvalidParameter",
            SvemError::InvalidMesh(_) => "InvalidMesh",
            SvemError::SeamMismatch(_) => "SeamMismatch",
            SvemError::ToleranceAmbiguity(_) => "ToleranceAmbiguity",
            SvemError::SingularLocalSystem { .. } => "SingularLocalSystem",
            SvemError::ConstraintMismatch(_) => "ConstraintMismatch",
            SvemError::SingularSystem(_) => "SingularSystem",
            SvemError::Parse { .. } => "ParseError",
            SvemError::Io(_) => "IoError",
            SvemError::AtLevel { source, .. } => source.name(),
        }
    }
}

pub type Result<T, E = SvemError> = std::result::Result<T, E>;

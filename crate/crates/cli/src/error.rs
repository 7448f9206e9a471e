use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes. Every error maps to exactly one of these.
pub mod exit {
    pub const OK: u8 = 0;
    /// A certification suite had a failing case.
    pub const CERTIFY_FAILED: u8 = 1;
    /// Bad command line, unreadable or malformed spec file, invalid parameters.
    pub const INPUT: u8 = 2;
    /// Regularity violation, failed height solve, or too few regular points.
    pub const GEOMETRY: u8 = 3;
    /// Mesh export produced fewer than three vertices.
    pub const MESH_TOO_SMALL: u8 = 4;
    /// Report or mesh could not be written.
    pub const OUTPUT: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    ReadInput { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Spec { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] sepcurv::Error),
    #[error("{0} certification case(s) failed")]
    CertifyFailed(usize),
    #[error("mesh has {0} valid vertices, at least 3 are needed")]
    MeshTooSmall(usize),
    #[error("cannot write {target}: {source}")]
    Output { target: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::ReadInput { .. } | CliError::Spec { .. } => exit::INPUT,
            CliError::Core(e) if e.is_point_failure() => exit::GEOMETRY,
            CliError::Core(_) => exit::INPUT,
            CliError::CertifyFailed(_) => exit::CERTIFY_FAILED,
            CliError::MeshTooSmall(_) => exit::MESH_TOO_SMALL,
            CliError::Output { .. } => exit::OUTPUT,
        }
    }

    pub(crate) fn output(target: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let target = target.into();
        move |source| CliError::Output { target, source }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_split_by_cause() {
        let e = CliError::from(sepcurv::Error::Regularity("f'_n vanishes".into()));
        assert_eq!(e.exit_code(), exit::GEOMETRY);
        let e = CliError::from(sepcurv::Error::NoSignChange {
            lo: 0.0,
            hi: 1.0,
            g_lo: 1.0,
            g_hi: 2.0,
        });
        assert_eq!(e.exit_code(), exit::GEOMETRY);
        let e = CliError::from(sepcurv::Error::Index {
            i: 1,
            j: 1,
            reason: "equal indices",
        });
        assert_eq!(e.exit_code(), exit::INPUT);
        assert_eq!(CliError::MeshTooSmall(2).exit_code(), exit::MESH_TOO_SMALL);
    }
}

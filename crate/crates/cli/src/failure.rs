use std::fmt;
use std::path::PathBuf;

use chainforge::Error;

/// Everything that ends a run early, with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(PathBuf, std::io::Error),
    /// A core error, optionally tied to the file it came from.
    Core(Option<PathBuf>, Error),
    /// A check ran and did not pass.
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(..) => 1,
            Failure::Check(_) => 3,
            Failure::Core(_, e) => match e {
                Error::IllPosedTarget { .. }
                | Error::Degenerate { .. }
                | Error::Unattainable { .. }
                | Error::Infeasible(_)
                | Error::EmptyNullSpace { .. }
                | Error::NoConvergence(_) => 2,
                Error::VerificationFailed { .. } => 3,
                Error::InvalidChain(_)
                | Error::ReducibleChain { .. }
                | Error::NotMirrorSymmetric { .. }
                | Error::InvalidPartition(_)
                | Error::InvalidProblem(_)
                | Error::Parse { .. }
                | Error::InvalidArgument(_) => 1,
            },
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Core(Some(p), e) => write!(f, "{}: {e}", p.display()),
            Failure::Core(None, e) => write!(f, "{e}"),
            Failure::Check(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(None, e)
    }
}

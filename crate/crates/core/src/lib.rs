//! Optimistic no-regret dynamics (OFTRL, OOMD, OMWU, OGDA) in two-player
//! zero-sum matrix games, together with the instrumentation needed to study
//! their last-, random- and best-iterate convergence.
//!
//! The x-player minimizes `x^T A y` and receives the loss vector `A y`; the
//! y-player receives `-A^T x`. All dynamics start from uniform strategies.

pub mod dynamics;
pub mod error;
pub mod figure;
pub mod game;
pub mod hardness;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod regularizers;
pub mod simplex;
pub mod verify;

pub use dynamics::{Algorithm, DynamicsConfig, JointIterate, Record, Trajectory};
pub use error::{Error, Result};
pub use game::{MatrixGame, NashPoint2x2};
pub use regularizers::Regularizer;
pub use simplex::SimplexPoint;

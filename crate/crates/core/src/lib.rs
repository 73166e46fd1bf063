//! Numerical-optimization library around a window-controlled momentum
//! optimizer: the optimizer itself and seven classical baselines behind one
//! stepping interface, differentiable test objectives with analytic
//! gradients, a trajectory-recording run loop, and empirical convergence
//! diagnostics.

pub mod diagnostics;
pub mod error;
pub mod objectives;
pub mod optim;
pub mod runner;
pub mod trajectory;
pub mod vector;

pub use error::{Error, Result};
pub use optim::{Optimizer, StepInput, StepStats};
pub use trajectory::{RunMeta, Trajectory, TrajectoryRecord};
pub use vector::ParamVector;

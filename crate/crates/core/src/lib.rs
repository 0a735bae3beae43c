//! Nesterov's accelerated gradient method, the r-parameterized family of
//! schemes, proximal and restarted variants, and a continuous-time engine for
//! the damped ODE `X'' + (r/t) X' + ∇f(X) = 0`.
//!
//! The crate is `no_std` and only needs `alloc`. Every convergence claim
//! about these methods (rate certificates, energy decay, oscillation spacing,
//! restart times) has a diagnostic in [`analysis`] that measures it on a trace.
//!
//! Layout:
//!
//! * [`objectives`]: smooth and composite objectives, and the standard catalog.
//! * [`prox`]: proximal operators, the proximal subgradient, the lasso
//!   directional subgradient.
//! * [`schemes`]: gradient descent, Nesterov's scheme, the generalized family,
//!   speed and gradient restarting.
//! * [`ode`]: the smoothed-ODE integrator, the composite (lasso) ODE, and Bessel
//!   closed forms for quadratics.
//! * [`analysis`]: energy functionals, scaled errors, roots, deviations, fits.
//! * [`problems`]: seeded generators for the experiment suites.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` rejects NaN along with nonpositive values; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod linalg;
pub mod objectives;
pub mod ode;
pub mod problems;
pub mod prox;
pub mod rng;
pub mod schemes;
pub mod special;

pub use error::{Error, Result};
pub use objectives::{CompositeObjective, Smooth, StandardObjective};
pub use ode::{ContinuousTrace, OdeParams};
pub use problems::{ProblemInstance, ProblemName, ProblemSpec, Scale};
pub use prox::ProxSpec;
pub use schemes::{IterateTrace, Optimum, Restart, SchemeParams};

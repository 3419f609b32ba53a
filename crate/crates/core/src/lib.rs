//! Numerical kernel for studying total scalar curvature under weak convergence
//! of metrics.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides
//!
//! - [`quad`]: adaptive Gauss–Kronrod quadrature with honest error estimates,
//! - [`geomcore`]: scalar curvature under conformal change and total scalar
//!   curvature of radially symmetric conformal metrics,
//! - [`radial`]: the counterexample families with analytic derivatives, their
//!   closed-form integrals and lower bounds,
//! - [`norms`]: sup-norms and `W^{1,p}` norms of `g_i - g` and trend fitting,
//! - [`flows`]: Ricci, Ricci–DeTurck and heat flow on periodic grids.
#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod flows;
pub mod geomcore;
pub(crate) mod math;
pub mod norms;
pub mod quad;
pub mod radial;
pub mod special;

pub use error::{Error, Result};

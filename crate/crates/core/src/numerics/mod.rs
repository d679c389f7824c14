//! Numerical kernel shared by every other module.

pub mod hermitian;
pub mod ks;
pub mod ode;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod tridiag;

pub use hermitian::{eig_hermitian, hermitian_to_tridiagonal, HermitianMatrix};
pub use ks::{kolmogorov_cdf, ks_distance, ks_two_sample, ks_two_sample_critical, EmpiricalSample};
pub use ode::{integrate_ode, integrate_ode_on_grid, integrate_ode_with, OdeOptions, Trajectory};
pub use rng::{RngStream, StreamId};
pub use sampling::{sample_chi, sample_gamma};
pub use tridiag::{eig_sym_tridiagonal, SymTridiagonal};

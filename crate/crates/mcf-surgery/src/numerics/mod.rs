//! Small numerical kernels shared by every module: finite-difference weights
//! on scattered nodes, tridiagonal and small dense solvers, cubic splines,
//! smoothstep bumps,
//! the scaled Bessel kernel for axisymmetric Gaussian integrals, adaptive
//! quadrature, and a tiny deterministic RNG.

pub mod bessel;
pub mod dense;
pub mod quad;
pub mod rng;
pub mod smoothstep;
pub mod spline;
pub mod stencil;
pub mod tridiag;

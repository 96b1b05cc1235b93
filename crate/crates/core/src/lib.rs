//! Exact and Monte Carlo verification of balanced cut properties of
//! quasi-random hypergraphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`]: colex ranking of k-subsets, size-constrained set
//!   partitions, exact binomials.
//! * [`linalg`]: dense matrices over the rationals with exact rank, affine
//!   solving and nullspaces.
//! * [`intersection`]: the partition/transversal matrices `A(t,k,v)` and the
//!   inclusion matrices `B(t,h,k)` together with their rank predictions.
//! * [`johnson`]: Johnson scheme matrices, closed-form eigenvalues, the Gram
//!   matrix spectrum and the good-function count.
//! * [`hypergraph`]: random generators `G_k(n,p)` and `C_k(n,p)`, cut
//!   statistics and the multilinear cut-density identity.
//! * [`structure`]: solution vectors of the fractional balanced-cut system,
//!   density vectors, quotient graphs and the cut norm.
//! * [`io`]: plain-text file formats shared with the command-line tool.

pub mod combinatorics;
pub mod error;
pub mod hypergraph;
pub mod intersection;
pub mod io;
pub mod johnson;
pub mod linalg;
pub mod rational;
pub mod structure;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

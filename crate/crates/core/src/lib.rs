//! Direct decompositions of finitely generated torsion-free nilpotent groups
//! given by unitriangular rational matrices.

pub mod abelian_factor;
pub mod corpus;
pub mod direct_decomp;
pub mod error;
pub mod exactmat;
pub mod liealg;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod tgroup;
pub mod zlattice;

pub use abelian_factor::{strip_abelian, AbelianSplit};
pub use corpus::{CorpusSpec, Family};
pub use direct_decomp::{decompose, verify, DecompCertificate};
pub use error::{Error, Result};
pub use exactmat::{NilMat, RatMat, UniMat};
pub use liealg::{LieAlg, LieDecomposition, Subspace};
pub use rational::Rational;
pub use tgroup::{MalcevBasis, TGroup};
pub use zlattice::{IntMat, Lattice};

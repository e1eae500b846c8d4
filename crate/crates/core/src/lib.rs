//! Exact truncated computations for the higher-genus Kashiwara-Vergne equations.

pub mod alphabet;
pub mod automorphism;
pub mod constructions;
pub mod cyclic;
pub mod derivation;
pub mod divergence;
pub mod error;
pub mod expansion;
pub mod json;
pub mod kv;
pub mod lie;
pub mod linalg;
pub mod lyndon;
pub mod random;
pub mod rational;
pub mod scalar;
pub mod solver;
pub mod tensor;

pub use alphabet::{Alphabet, Letter, Word};
pub use automorphism::Automorphism;
pub use cyclic::{CyclicSeries, CyclicWord};
pub use derivation::{Derivation, TangentialDerivation};
pub use error::{AlgebraError, Result};
pub use kv::{KVInstance, KVSolution, ResidualReport};
pub use lie::LieSeries;
pub use linalg::PivotOrder;
pub use rational::Rational;
pub use scalar::ScalarSeries;
pub use solver::{solve_kv, Strategy};
pub use tensor::TensorSeries;

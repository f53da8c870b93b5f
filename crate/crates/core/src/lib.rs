//! Trotterized real-time dynamics of the lattice Schwinger model in its
//! spin formulation: Pauli algebra, the Hamiltonian, state-vector evolution,
//! product formulas, native-gate compilation, error bounds and observables.
//!
//! Sites are 0-based throughout; site 0 is the most significant bit of a
//! basis index and the leftmost character of a bitstring. `Z|0⟩ = |0⟩`.

pub mod bounds;
pub mod compiler;
pub mod dense;
pub mod error;
pub mod model;
pub mod observables;
pub mod pauli;
pub mod state;
pub mod trotter;

pub use compiler::{compile_step, count_gates, verify_circuit, GateCount, NativeCircuit, NativeGate};
pub use dense::{spectral_norm, to_dense, DenseOperator, DEFAULT_DENSE_LIMIT};
pub use error::{Error, Result};
pub use model::{bare_vacuum, build_model, symmetry_charge, Hopping, ModelParams, SchwingerModel};
pub use pauli::{commutator, multiply, Pauli, PauliString, PauliTerm, TermSum};
pub use state::{exact_evolve, PopulationTable, StateVector};
pub use trotter::{build_step, evolve, OrderingScheme, Protection, StepSequence, TrotterPlan};

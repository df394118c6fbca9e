//! Exact symbolic algebra of site-local operators on a blockade lattice.

mod commutator;
mod letter;
mod model;
mod operator;
mod word;

pub use commutator::{
    ad_power, ad_powers, ad_step_by_symmetrization, commutator_h, hamiltonian, hamiltonian_terms,
    vacuum_moments, Budget, HamiltonianTerms,
};
pub use letter::Letter;
pub use model::{ModelSpec, Topology};
pub use operator::OperatorSum;
pub use word::Word;

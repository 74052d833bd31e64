//! Arithmetic in the Hecke fields of the lift spaces: elements, norms,
//! Kummer-Dedekind primes, ideal membership, eigenvectors over the field,
//! and the congruence checks between the nonlift and the lifts.

mod congruence;
mod eigvec;
mod field;
mod ideal;
mod lattice;
mod linalg;

pub use congruence::{verify_congruence, Claim, CongruenceInput, CongruenceReport};
pub use eigvec::{apply, apply_shifted, eigenvector_coeffs, kernel_vector, proportionality, EigenCoeffs};
pub use field::{Elem, NumberField};
pub use ideal::{
    aux_divides, find_aux, kummer_dedekind, member_via_residue, member_via_witness, KDPrime, Membership, PGIdeal,
};
pub use lattice::{Ideal, Lattice, Order};
pub use linalg::{charpoly_q, det, kernel, solve, FieldOps, Rationals};

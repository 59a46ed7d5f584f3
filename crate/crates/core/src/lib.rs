//! Exact computation of the modular data of twisted Drinfeld doubles of
//! small finite groups.

pub mod cohomology;
pub mod cyclotomic;
pub mod db;
pub mod equivalence;
pub mod error;
pub mod group;
mod int;
pub mod modular;
pub mod projrep;
mod snf;

pub use cohomology::{Cocycle3, CohomologyClasses, Orbit, TwoCocycle};
pub use cyclotomic::Cyclotomic;
pub use db::{Database, GenerateOptions, Manifest};
pub use equivalence::{EquivClassReport, PermutationWitness};
pub use error::*;
pub use group::{Automorphism, ConjClass, FiniteGroup, Subgroup};
pub use modular::{ModularData, Objects, SimpleObject, Strategy, VerificationReport};
pub use projrep::{CharacterTable, ProjChar};

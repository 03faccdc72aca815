//! Simplicial DGAs, chain homotopy diagrams and combinatorial sheaves for
//! Legendrian surface fronts over a simplicial base.

pub mod chd;
pub mod cobar;
pub mod dga;
pub mod front;
pub mod homalg;
pub mod sheaf;
pub mod simplex;
pub mod strat;

pub use chd::{Augmentation, CHD};
pub use cobar::{CobarElement, SimplexIndex};
pub use dga::{build_dga, SimplicialDGA};
pub use front::{Diagnostic, FrontComplex};
pub use homalg::{
    AlgebraError, ChainMap, CochainComplex, CommutativeSquare, GradedLinearMap, GradedModule,
    Matrix, PrimeField,
};
pub use sheaf::{build_sheaf, verify_axioms, AxiomReport, CheckResult, SheafFunctor};
pub use strat::{build_strata, HandleCell, StratPoset, Stratum, StratumType};

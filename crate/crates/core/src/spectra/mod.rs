//! Bound-state structure of a gadget: the determinant polynomial
//! `W(z) = det gamma(z)`, its root census, the catalog of confined,
//! unconfined and half-bound states, and the real eigenbranches of
//! `gamma(x)`.

mod bound;
mod branches;
mod polynomial;

pub use bound::{
    bound_state_catalog, confined_states, count_identity_check, root_location_report, BoundStateCatalog,
    ConfinedClass, ConfinedState, ConfinedStates, HalfBoundState, CountIdentityReport, RootLocationReport,
    RootNullSpace, UnconfinedState,
};
pub use branches::{
    derivative_check, eigenbranches, find_crossings, BranchCrossing, DerivativeReport,
    EigenbranchTable, DEFAULT_BRANCH_DELTA, DEFAULT_GRID_SIZE,
};
pub use polynomial::{root_census, w_polynomial, Root, RootCensus, RootClass, WPolynomial};

pub mod cantor;
pub mod contfrac;
pub mod cylinder;
pub mod dimension;
pub mod dirichlet;
pub mod field;
pub mod growth;
pub mod laurent;
pub mod poly;
pub mod rational;
pub mod stochastic;

pub use contfrac::{
    check_identities, convergents, expand_by_gauss_map, expand_rational, expand_truncated,
    reconstruct, relative_error_log, CfError, CfExpansion, Convergent, Identity, StopReason, Target,
};
pub use field::{FieldError, FieldSpec};
pub use laurent::{LaurentError, LaurentSeries, Valuation};
pub use poly::{enumerate_polys, Degree, Poly, PolyError};
pub use rational::ExactRational;

//! Exact rational algebra of uni-trivalent diagrams on string-link skeletons.

pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod forest;
pub mod hopf;
pub mod lie;
pub mod linalg;
pub mod relations;
pub mod spaces;
pub mod verify;

pub use diagram::{canonicalize, Diagram, DiagramClass, End};
pub use error::{Error, Result};
pub use enumerate::{count, enumerate, enumerate_diagrams, EnumSpec, Shape, SizeFilter};
pub use linalg::{subspace_equal, Basis, LinComb, QuotientSpace, RationalVector, Span, Q};
pub use relations::{RelKind, RelationSet};
pub use spaces::{algebra, algebra_coords, forest_module, lie_module, size_filtration, stu_expand, Mode};
pub use lie::{bracket, graded_dims, jacobi_check, structure_constants, tree_bracket, JacobiReport, LieElement};
pub use verify::{run_check, CheckParams, CheckReport, CHECKS};

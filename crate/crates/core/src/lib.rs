//! Linear triple systems: the closure operator, spreading and expansion
//! checks, explicit constructions, a small extremal search and the numeric
//! density bounds.
//!
//! ```
//! use linear_triples::{bose_skolem, is_spreading, SpreadingMode};
//!
//! let sys = bose_skolem(5).unwrap();
//! assert!(sys.is_steiner());
//! assert!(is_spreading(&sys, SpreadingMode::Reduced).unwrap().holds);
//! ```

pub mod bounds;
pub mod cli;
pub mod closure;
pub mod constructions;
pub mod enumerate;
pub mod extremal;
pub mod format;
pub mod system;

pub use bounds::{
    average_value_ratio, bounds_report, construction_density, lower_bound_constants, restricted_sumset, sumset, tau,
    BoundsError, BoundsReport, Density, ResidueSet,
};
pub use closure::{
    closure, expander_deficiency, is_spreading, is_strongly_connected, is_weakly_spreading, neighbourhood, CheckError,
    ExpanderReport, PropertyVerdict, SpreadingMode, Witness,
};
pub use constructions::{
    bose_skolem, cayley_latin, crowning, latin_square_system, spreading_6p3, star_expansion, star_edge_vertex,
    ConstructionError, ConstructionParams, Family, Spreading6p3Layout,
};
pub use extremal::{min_weakly_spreading, ordering_witness, SearchError, SearchResult, TripleOrdering};
pub use format::{parse_system, serialize_system, FormatError};
pub use system::{build_system, SystemError, Triple, TripleSystem, Vertex, VertexSet};

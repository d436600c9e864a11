//! Numerical dynamics of piecewise, regularized and blown-up vector fields.

pub mod equilibrium;
pub mod error;
pub mod field;
pub mod geometry;
pub mod integral;
pub mod jet;
pub mod ode;
pub mod poincare;
pub mod section;

pub use error::DynError;
pub use field::{FamilyChartVf, FnField, PolyField, QuadratureVf, RegularizedVf, VectorField};
pub use ode::{fmt12, integrate, integrate_with_events, Event, EventRecord, IntegratorConfig, Trajectory};
pub use section::{Orientation, Section};
pub use poincare::{
    divergence_derivative, find_cycle, flow_to_section, regularized_poincare, sewing_poincare, transition_map, CycleConfig,
    FirstReturnMap, Multiplier, PoincareResult, RegularizedReturnMap, ReturnMap, SewingLeg, SewingMap, SewingSegment,
    Transition, TransitionConfig, TransitionMap,
};
pub use equilibrium::{classify_equilibrium, find_equilibrium, Classification, EquilibriumInfo, DEGENERACY_TOL};
pub use geometry::{hausdorff, polyline_dist, resample};
pub use integral::{darboux_h, first_integral_drift};
pub use jet::{jet_transform, transform_field, AffineChange, Jet};

//! Tripartite entanglement quantifiers for pure qubit states, their
//! behavior under binary local POVMs, and a search for LOCC-monotonicity
//! violations.
//!
//! All numerical code is generic over [`Real`], implemented for `f32`,
//! `f64` and the double-double [`twofloat::TwoFloat`]. The aliases below fix
//! the two scalar types used in practice.
//!
//! ```
//! use trifill::{named_state, MeasureId, State};
//!
//! let w: State = named_state("w3".parse().unwrap()).unwrap();
//! let fill = trifill::evaluate(&MeasureId::fill(), &w).unwrap();
//! assert!((fill - 8.0 / 9.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod formats;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod qstate;
pub mod scalar;
pub mod search;
pub mod suites;

pub use error::{Error, Result};
pub use locc::{
    apply_binary_povm, average_gap, det_transformation_check, diagonal_squared_concurrence_gap, povm_from_angles,
    random_povm, tau_gap_closed_form, BinaryPovm, GapReport, PovmAngles,
};
pub use measures::{
    acin_cbc_squared, concurrence_fill, concurrence_of_assistance, evaluate, g_quantity, nqubit_s, one_to_other_concurrence,
    perimeter, side_product_s, three_tangle, wootters_concurrence, Bipartition, MeasureId, MeasureKind,
};
pub use qstate::{
    acin_from_thetas, acin_state, apply_local_unitary, make_pure_state, named_state, random_pure_state, reduced_density,
    AcinParams, DensityMatrix, NamedState, Party, PartySet, PureState, ThetaParams,
};
pub use scalar::Real;
pub use search::{reproduce_case, search_violation, verify_certificate, PaperCase, SearchConfig, SearchPoint, ViolationCertificate};

/// Double-precision state.
pub type State = PureState<f64>;
/// Double-double state, for cases where `f64` cancellation matters.
pub type StateDd = PureState<twofloat::TwoFloat>;
pub type Povm = BinaryPovm<f64>;
pub type PovmDd = BinaryPovm<twofloat::TwoFloat>;
pub type Density = DensityMatrix<f64>;
pub type Report = GapReport<f64>;

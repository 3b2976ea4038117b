//! Wigner–Yanase skew information, local quantum uncertainty (LQU) and
//! steering-induced skew information on finite-dimensional quantum states,
//! together with randomized verification of the bounds that relate them.
//!
//! All numerical code is generic over the real scalar ([`Real`]: `f32` or
//! `f64`); the aliases at the crate root fix it to `f64` (and `f32` with a
//! `32` suffix). The verification harness and its reports are `f64` only.

pub mod error;
pub mod matcore;
pub mod metrics;
pub mod optimize;
pub mod quantum;
pub mod scalar;
pub mod steering;
pub mod verify;

pub use error::{Error, Result};
pub use matcore::Subsystem;
pub use scalar::Real;

pub type ComplexMatrix = matcore::CMatrix<f64>;
pub type DensityMatrix = quantum::DensityMatrix<f64>;
pub type BipartiteState = quantum::BipartiteState<f64>;
pub type Observable = quantum::Observable<f64>;
pub type NondegenerateObservable = quantum::NondegenerateObservable<f64>;
pub type Spectrum = quantum::Spectrum<f64>;
pub type ObservableBasis = quantum::ObservableBasis<f64>;
pub type KrausChannel = quantum::KrausChannel<f64>;
pub type MeasurementBasis = steering::MeasurementBasis<f64>;
pub type SteeringEnsemble = steering::SteeringEnsemble<f64>;
pub type LquResult = metrics::LquResult<f64>;
pub type HermitianEigen = matcore::HermitianEigen<f64>;

pub type ComplexMatrix32 = matcore::CMatrix<f32>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type BipartiteState32 = quantum::BipartiteState<f32>;
pub type Observable32 = quantum::Observable<f32>;
pub type NondegenerateObservable32 = quantum::NondegenerateObservable<f32>;
pub type KrausChannel32 = quantum::KrausChannel<f32>;
pub type MeasurementBasis32 = steering::MeasurementBasis<f32>;

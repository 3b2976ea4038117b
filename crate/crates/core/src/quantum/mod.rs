//! States, observables and channels, with their seeded random generators.

pub mod channel;
pub mod observable;
pub mod random;
pub mod state;

pub use channel::{commuting_kraus_channel, dephasing, fully_depolarizing_qubit, random_cptp, KrausChannel};
pub use observable::{
    gell_mann_basis, random_nondegenerate_observable, NondegenerateObservable, Observable, ObservableBasis, Spectrum,
};
pub use random::{gaussian_matrix, haar_unitary, stream, Stream};
pub use state::{ginibre_state, BipartiteState, DensityMatrix};

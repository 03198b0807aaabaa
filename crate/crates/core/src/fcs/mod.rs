//! Classical post-processing of characteristic-function samples.

mod cumulants;
mod dft;
mod distribution;
mod stencil;

pub use cumulants::{moments_to_cumulants, CumulantSet};
pub use dft::{dft_reconstruct, min_sampling_points, IMAG_RESIDUE_TOLERANCE};
pub use distribution::{trace_distance, Distribution};
pub use stencil::{
    base_stencil, build_stencil, estimate_moments, richardson_combine, richardson_stencil,
    MomentEstimate, Stencil,
};

pub mod abstract_rates;
pub mod decay_bounds;
pub mod error;
pub mod gt_sim;
pub mod modal_rates;
pub mod numeric;
pub mod par;
pub mod smallmat;
pub mod spectral_lyapunov;

pub use error::{Error, Result};

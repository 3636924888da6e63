pub mod brute_oracle;
pub mod cli;
pub mod error;
pub mod exact_enum;
pub mod hyper_constants;
pub mod markov_props;
pub mod numeric;
pub mod psht_sim;

pub use error::{Error, Result};

//! Exact enumeration: the genus recurrence for closed triangulations, polygon
//! counts for planar disks, and their partition functions.

mod count_table;
pub mod limbs;
pub mod persist;
mod polygon;

pub use count_table::{gj_extend, ln_biguint, max_genus, ratio_biguint, tau_ratio, CountTable};
pub use polygon::{
    adaptive_table, partition_function, partition_moments, polygon_counts,
    polygon_counts_closed_form, PolygonCountTable, J_MAX_CAP,
};

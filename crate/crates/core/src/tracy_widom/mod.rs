//! Tracy-Widom machinery.

pub mod cache;
pub mod painleve;
pub mod tables;

pub use cache::{resolve_cache_dir, TableMeta, TableStore, CACHE_ENV};
pub use painleve::{
    hastings_mcleod_left, solve_painleve2, solve_painleve2_on_grid, PainleveSolution,
};
pub use tables::{
    build_tw_table, build_tw_table_with, convolve, convolve_self, critical_value, lambda0_cdf,
    lambda0_table, two_sided_p_value, DistributionTable, F4Convention, TableLabel,
};

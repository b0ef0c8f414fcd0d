//! Truncated q-series arithmetic and the classical q-function toolkit:
//! Pochhammer symbols, theta functions, congruence products, series
//! inversion, bilateral (Jacobi-triple-product) sums and Bailey-pair checks.

mod bailey;
mod products;
mod series;

pub use bailey::{bailey_pair_check, jtp_check, slater_f1, slater_f2, BaileyPair, CheckReport};
pub use products::{
    bilateral_sum, multi_theta, pochhammer, product_from_residues, theta, ProductFactor,
    ProductSpec,
};
pub use series::TruncatedSeries;

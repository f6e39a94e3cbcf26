//! Vietoris-Rips persistence barcodes and the barcode calculus for finite
//! metric spaces.
//!
//! The pipeline: build or load a finite metric space ([`metric`]), construct
//! its open Vietoris-Rips or ℓ∞-Čech filtration ([`complex`]), reduce the
//! boundary matrix over a prime field to get a barcode ([`persistence`]),
//! then operate on barcodes directly: bottleneck distance ([`bottleneck`]),
//! Künneth products, wedge sums and closed-form oracles ([`algebra`]),
//! metric invariants with bound checks ([`invariants`]), and the ℓ∞ lab
//! around the Kuratowski embedding ([`linf`]).
//!
//! Everything is immutable after construction and safe to share across
//! threads.
//!
//! ```
//! use vrcalc::{compute_barcode, sample_circle, vr_filtration};
//!
//! // four equally spaced points on the unit circle
//! let space = sample_circle(4, 1.0).unwrap();
//! let filtration = vr_filtration(&space, 2, f64::INFINITY).unwrap();
//! let barcode = compute_barcode(&filtration, 2, 1).unwrap();
//!
//! // one loop, born at the edge length and filled at the antipodal scale
//! let h1 = barcode.in_dim(1);
//! assert_eq!(h1.len(), 1);
//! assert_eq!((h1[0].birth, h1[0].death), (std::f64::consts::FRAC_PI_2, std::f64::consts::PI));
//! ```

pub mod algebra;
pub mod barcode;
pub mod bottleneck;
pub mod complex;
pub mod invariants;
pub mod io;
pub mod linf;
pub mod metric;
pub mod persistence;

pub use algebra::{
    kunneth_product, oracle_circle, oracle_linf_sphere, oracle_linf_square,
    oracle_sphere_fundamental, wedge_sum,
};
pub use barcode::{max_persistence, reduced_barcode, Barcode, BarcodeError, Interval};
pub use bottleneck::{bottleneck, Matching};
pub use complex::{
    cech_linf_filtration, check_cech_vr, vr_filtration, ComplexError, Filtration, Simplex,
};
pub use invariants::{
    bounds_report, hyperbolicity, jung_domain_max, jung_psi, sfillrad, spread, spread_k,
    BoundsConfig, InvariantError, InvariantReport,
};
pub use linf::{katz_bicombing, katz_property_check, kuratowski, LinfError, LinfVector};
pub use metric::{
    linf_distortion, linf_product, metric_glue, perturb, sample_circle, sample_linf_sphere,
    sample_sphere, DistanceMatrix, MetricError, SpaceSpec,
};
pub use persistence::{compute_barcode, PersistenceError};

//! Clustering of learned features, ACC/NMI/purity, and noise injection.

mod kmeans;
mod metrics;
mod noise;

pub use kmeans::{kmeans, kmeans_restarts, KMeansRun};
pub use metrics::{accuracy, nmi, purity, Labeling, Metrics};
pub use noise::{add_gaussian_noise, gaussian_noise, snr_db};

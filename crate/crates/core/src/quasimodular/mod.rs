//! Eisenstein series, the ring of quasimodular forms and recognition of q-series.

pub mod checks;
pub mod qmpoly;
pub mod recognize;
pub mod series;

pub use checks::{
    anomaly_check, anomaly_sides, q_bracket_anomaly, quasimodular_preimage, skoruppa_check, skoruppa_report,
    surjectivity_witness, verify_density, verify_theorem, AnomalySides, SkoruppaReport, VerifyReport,
};
pub use qmpoly::{GMono, QMPoly};
pub use series::{eisenstein, QSeries};
pub use recognize::recognize;

//! Runtime certificates for the convergence hypotheses and conclusion.

mod certify;
mod consensus;
mod metrics;

pub use certify::{certify, CertificateReport, Verdict};
pub use consensus::{
    consensus_embed, consensus_oracle_compare, consensus_unembed, ConsensusComparison,
    ConsensusEmbedding,
};
pub use metrics::{hemisphere_certificate, lyapunov_value, sync_error, Containment};

pub(crate) use metrics::{edge_energy, max_pairwise_angle};

//! Random Hermitian ensembles, tensor embeddings and spectral statistics.

mod eigen;
mod modified;
mod operator;
mod sampling;
mod spectrum;
mod structured;
mod tensor;

pub use eigen::{eigenvalues, eigenvalues_validated, operator_norm, RECONSTRUCTION_TOLERANCE};
pub use modified::{
    environment_size, limit_law, run_spectrum_experiment, sample_modified, ModifiedEnsemble, MomentComparison,
    SpectrumReport,
};
pub use operator::{check_memory, HermitianOperator, DEFAULT_MEMORY_CAP, HERMITIAN_TOLERANCE};
pub use sampling::{complex_normal, sample_gue, sample_induced_state, sample_wishart, SeedScheme};
pub use spectrum::{empirical_moment, histogram, sample_norm, Histogram, SampleMeta, SpectralSample};
pub use structured::{lanczos_extremes, lanczos_largest, trace_out_b, EmbeddedSum};
pub use tensor::{
    embed, embed_sum, pad_with_identity, partial_transpose, symmetrize, tensor_sum, SYMMETRIZE_MAX_K,
};

pub use faer::{c64, Mat};

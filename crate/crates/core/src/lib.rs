//! Coding for trace reconstruction over independent deletion channels.
//!
//! Codewords are split into blocks of length `ell = floor(1/p)`. Delimiter
//! bits at the block boundaries let the receiver recover the exact number of
//! deletions each block suffered in every trace, so each block can be
//! reconstructed on its own with bitwise majority alignment (BMA). A global
//! run-length limit of `floor(sqrt(ell))` keeps BMA effective with a constant
//! number of traces.
//!
//! The crate also provides the deletion channel, a coded-BMA baseline and a
//! Monte-Carlo harness reporting edit-distance error and failure rates.

pub mod channel;
pub mod code;
pub mod delimiter;
pub mod error;
pub mod experiment;
pub mod lambert;
pub mod metrics;
pub mod model;
pub mod reconstruct;

pub use channel::{generate_traces, substream, transmit, ChannelSpec};
pub use code::{
    encode_systematic, extract_info, is_member_c, max_run_length, rate, redundancy_bounds, redundancy_d,
    sample_codeword, sample_codeword_rejection, CodewordSampler, ConstrainedSampler,
};
pub use delimiter::{
    boundary_consistent, delimiter_layout, is_member_d, realign_segments, segment_trace, stamp, SegmentStatus,
    Segmentation,
};
pub use error::CodeError;
pub use experiment::{run_experiment, ExperimentConfig, Scheme, Simulation};
pub use lambert::{delta_star, lambert_w0, select_delta};
pub use metrics::{levenshtein, SummaryStats, TrialResult};
pub use model::{
    claim1_bounds_hold, derive_params, parse_bitstring, BitString, BlockLayout, CodeParams, ParamError, Trace,
};
pub use reconstruct::{bma, reconstruct_coded_bma, reconstruct_ours, sample_rll_sequence, BlockMatrix};

//! Ordered partial-error-pattern decoding of short binary linear codes.
//!
//! The crate contains the code constructions ([`code`]), the BPSK/AWGN
//! channel ([`channel`]), the logistic-weight pattern stream ([`patterns`]),
//! the pattern-based decoders ([`decoders`]), operation metering
//! ([`complexity`]) and a Monte Carlo BLER harness ([`harness`]).

pub mod channel;
pub mod code;
pub mod patterns;
pub mod complexity;
pub mod decoders;
pub mod harness;

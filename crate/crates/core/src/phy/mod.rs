//! Link-level simulation of the PNC multiple-access phase: channel coding,
//! BPSK over a simulated flat-fading two-user channel, and the XOR-CD /
//! RMUD / SIC decoder chain with linear CRC verification.

mod channel;
mod coding;
mod crc;
mod decoders;

pub use channel::{
    estimate_gains, pilot_symbols, MacChannel, MacChannelRealization, PhyError,
};
pub use coding::{
    conv_encode, encode_frame, viterbi_decode_tb, CodedFrame, FrameFormat, CODE_STREAMS,
    CONSTRAINT_LEN, GENERATORS,
};
pub use crc::{crc32_linear, crc_ok, CRC32_POLY};
pub use decoders::{
    decode_pipeline, rmud_decode, sic_decode, simulate_frame, xor_cd_decode, DecodeOutcome,
    DecoderOptions, SimulationOptions,
};

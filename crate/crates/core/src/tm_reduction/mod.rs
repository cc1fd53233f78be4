//! Space-bounded Turing machines to the word problem of a fixed automaton group.

pub mod assembly;
pub mod encoding;
pub mod tm_mode;

pub use assembly::{
    assemble, full_size, level_states, Assembly, AssemblyOptions, HardInstance, Provenance,
};
pub use encoding::{build_r0, encode_binary, encoded_name, encoded_size, CodeTable};
pub use tm_mode::{
    build_tm_mode, default_block_length, find_unrefuted_tableau, is_all_id, is_single_r,
    pad_entries, symbol_letter, tableau_word, tm_alphabet, tm_mode_sequences, tm_mode_size,
    TableauLimits, TmMode, DOLLAR, HASH, ONE, ZERO,
};

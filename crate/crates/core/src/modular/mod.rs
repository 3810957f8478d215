//! `SL₂(ℤ)`: words, permutation representations of finite-index subgroups,
//! low-index enumeration and congruence testing.

mod congruence;
mod lowindex;
mod rep;
mod word;

pub use congruence::*;
pub use lowindex::low_index_reps;
pub use rep::{PermRep, PermRepFile};
pub use word::{
    is_pm_identity_mod, matrix_to_word, word_eval, word_eval_mod, Gen, ModularWord, Syllable,
};

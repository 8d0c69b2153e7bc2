//! Words, Lyndon words and the truncated tensor algebra.

mod lyndon;
mod tensor;
mod word;

pub use lyndon::{is_lyndon, lyndon_words, standard_factorization};
pub use tensor::{
    exp_series, graded_project, log_series, tensor_product, TensorElement, TensorSpace,
};
pub use word::{lex_compare, Grading, Word};

/// `|w|` plus the number of time letters in `w`.
pub fn graded_degree(w: &Word) -> usize {
    w.graded_degree()
}

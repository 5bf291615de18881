//! Formula syntax, quantifier rank and the sentence generators.

mod ast;
mod gen;
mod parse;

pub use ast::{
    and, atom, descending_omega, eq, exists, forall, iff, implies, not, omega_vars, or, Formula, OmegaMatrix,
};
pub use gen::{
    atomic_type, clique_omission, gamma_vocabulary, gamma_witness, hintikka, hintikka_params, linear_order_axioms,
    pc_translate, sigma_sentences, wellorder_formulas, SigmaSentences, DEFAULT_VARIABLE_BUDGET,
};
pub use parse::{is_plain_name, parse, parse_checked, parse_file, At, FormulaError};

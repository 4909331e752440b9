//! Tree decompositions and their compilation into incidence terms with a
//! label budget of 2 vertex labels and `2k+3` edge labels.

mod compile;
mod decomposition;
mod ktree;

pub use compile::{td_to_term, Compiled, SIZE_FACTOR};
pub use decomposition::{parse_td, TdError, TreeDecomposition};
pub use ktree::{dicycle_with_td, dipath_with_td, gen_partial_ktree};

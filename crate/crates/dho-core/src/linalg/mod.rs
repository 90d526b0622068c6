//! Linear operators and subspaces of `V(n, q)`.
//!
//! Two representations live here. The workhorse is the bit-packed `F_2`
//! path ([`BitMat`], [`BitSubspace`], [`BitForm`]): rows are machine words,
//! elimination is word-parallel, and everything the equivalence engine
//! touches stays in this form. Fields with `q > 2` use the dense
//! context-driven path ([`FMat`], [`FSubspace`], [`FForm`]), which is only
//! exercised at tiny dimensions.

mod bit;
mod gen;

pub use bit::{BitForm, BitMat, BitSubspace};
pub(crate) use bit::mask as bit_mask;
pub use gen::{vcode, vdecode, FForm, FMat, FSubspace, SubfieldSplit};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("gram matrix must be symmetric and invertible")]
    BadGram,
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("skew normalization requires characteristic 2, got p = {0}")]
    OddCharacteristic(u64),
}

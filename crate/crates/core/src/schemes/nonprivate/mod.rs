//! Schemes without demand privacy.

mod flex;
mod ht1;
mod ht2;
mod yma_plus;

pub use flex::{flex_default_l, Flex};
pub use ht1::Ht1;
pub use ht2::Ht2;
pub use yma_plus::YmaPlus;

//! Demand-private schemes.

mod ht1_pk;
mod ht3_pk;
mod ht_vu;
mod pk_plus;
mod vu;

pub use ht1_pk::Ht1Pk;
pub use ht3_pk::Ht3Pk;
pub use ht_vu::{expanded_demand, public_offset, HtVu};
pub use pk_plus::PkPlus;
pub use vu::VuWrap;

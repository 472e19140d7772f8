pub mod actions;
pub mod averages;
pub mod equations;
pub mod folner;
pub mod linforms;
pub mod multfn;
pub mod numtheory;
pub mod par;
pub mod sum;
pub mod uniformity;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

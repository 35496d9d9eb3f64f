pub mod analysis;
pub mod frontend;
pub mod library;
pub mod petri;
pub mod props;
pub mod trace;

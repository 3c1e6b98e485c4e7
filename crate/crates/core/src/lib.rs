pub mod bisim;
pub mod cellularity;
pub mod familial;
pub mod lts;
pub mod spec;
pub mod random;
pub mod term;

pub mod analysis;
pub mod campaign;
pub mod evaluation;
pub mod genotype;
pub mod objectives;
pub mod search;
pub mod seed;

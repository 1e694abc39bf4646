pub mod bitvec;
pub mod codes;
pub mod error;
pub mod oracle;
pub mod tree;
pub mod audit;
pub mod lca;
pub mod miner;
pub mod baseline;
pub mod check;
pub mod io;
pub mod input;

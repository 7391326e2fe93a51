pub mod analysis;
pub mod bath;
pub mod cli;
pub mod error;
pub mod ibm;
pub mod quad;
pub mod special;
pub mod tempo;

pub mod checks;
pub mod domain;
pub mod error;
pub mod gamma;
pub mod hankel;
pub mod norms;
pub mod oracles;
pub mod output;
pub mod series;
pub mod summation;

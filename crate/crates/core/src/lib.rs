pub mod number;
pub mod poly;
pub mod expr;
pub mod linalg;
pub mod jet;
pub mod geometry;
pub mod expansion;
pub mod reduce;
pub mod oracle;
pub mod cli;

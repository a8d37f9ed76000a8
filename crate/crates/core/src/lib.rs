pub mod adp;
pub mod classifier;
pub mod corpus;
pub mod eval;
pub mod labels;
pub mod numerics;
pub mod path;
pub mod subtree;
pub mod synthetic;
pub mod text;

pub mod cantor;
pub mod dimension;
pub mod dirichlet;
pub mod expand;
pub mod mc;
pub mod measure;

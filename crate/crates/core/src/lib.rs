#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod counterexample;
pub mod dirichlet;
pub mod domains;
pub mod embeddings;
pub mod hypergeom;
pub mod kernels;
pub mod numerics;
pub mod operators;

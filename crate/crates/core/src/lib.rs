//! Bibliometric benchmarking: attribute publications to researchers, compute
//! h, g and variant indexes over a publication window, and summarize them per
//! scientific field.

pub mod benchstats;
pub mod cli;
pub mod corpus;
pub mod disambig;
pub mod indices;
pub mod names;
pub mod profile;
pub mod synthgen;

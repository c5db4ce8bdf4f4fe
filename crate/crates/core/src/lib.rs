//! Preprojective algebras of Dynkin species over finite-field towers.

pub mod field_tower;
pub mod species;
pub mod tensor_algebra;
pub mod ar_knitting;
pub mod homological;
pub mod nakayama;
pub mod segre;
pub mod acceptance;

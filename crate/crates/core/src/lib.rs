pub mod deck;
pub mod constraints;
pub mod repository;
pub mod jargon;
pub mod service;
pub mod cli;

//! Desk-scale workbench for chain logic: finitely presented ω-chain models, a formula
//! language with tuple and ω blocks, chain and classical evaluators, solvers for the
//! chain Ehrenfeucht–Fraïssé game and the borrowing game, back-and-forth families,
//! and Chu transforms between finite logic instances.

pub mod analysis;
pub mod chu;
pub mod fixtures;
pub mod formulas;
pub mod games;
pub mod semantics;
pub mod structures;

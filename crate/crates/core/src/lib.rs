//! Evaluation harness for machine-generated BPMN process models.
//!
//! Candidate models are compared with one or more gold-standard models on
//! structure (concept precision/recall, graph edit distance) and behavior
//! (execution traces of a token game). Quality is combined with generation
//! cost and wall-clock time, and Pareto fronts are computed over the three
//! two-dimensional projections of (quality, cost, time).

pub mod assignment;
pub mod bpmn_model;
pub mod matching;
pub mod quality_metrics;
pub mod behavior;
pub mod economics;
pub mod pareto;
pub mod bench;
pub mod cli;

//! Predictive prototyping engine: corpus handling, retrieval, LLM-backed
//! cost/performance/usability prediction, statistics and benchmark reports.

pub mod assets;
pub mod corpus;
pub mod gateway;
pub mod predictor;
pub mod report;
pub mod retrieval;
pub mod seed;
pub mod statlab;
pub mod usability;

#[cfg(test)]
mod test_http;

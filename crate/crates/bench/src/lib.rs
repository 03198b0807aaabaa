//! Shared fixtures for the benchmarks.

use qfcs_core::model::prepare_state;
use qfcs_core::{MfimParams, NumberOperator, Preparation, PureState};

/// The evolved chain and its domain-wall operator at length `length`.
pub fn chain_fixture(length: usize) -> (MfimParams, PureState, NumberOperator) {
    let params = MfimParams {
        length,
        ..MfimParams::default()
    };
    let state = prepare_state(&params, Preparation::Exact).expect("valid fixture");
    let op = NumberOperator::domain_walls(length).expect("even length");
    (params, state, op)
}

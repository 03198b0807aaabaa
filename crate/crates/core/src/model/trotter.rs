use super::MfimParams;
use crate::error::{Error, Result};
use crate::statevector::{Gate, PureState};

/// Second-order product formula with layer order `[X/2, Z/2, ZZ, Z/2, X/2]` per step.
pub fn trotter_evolve(state: &PureState, params: &MfimParams, steps: usize) -> Result<PureState> {
    params.validate()?;
    if steps == 0 {
        return Err(Error::arg("trotter steps must be >= 1"));
    }
    let l = params.length;
    if state.num_qubits() != l {
        return Err(Error::arg(format!(
            "state has {} qubits, chain has {l} sites",
            state.num_qubits()
        )));
    }
    let dt = params.time / steps as f64;
    let j = params.coupling;
    // exp(+iJ h_x (dt/2) X) = R_x(−J h_x dt), likewise for Z
    let half_x = Gate::rx(-j * params.field_x * dt);
    let half_z = Gate::rz(-j * params.field_z * dt);
    let bond_angle = j * dt;

    let mut out = state.clone();
    for _ in 0..steps {
        for q in 0..l {
            out.apply_gate(q, &half_x)?;
        }
        for q in 0..l {
            out.apply_gate(q, &half_z)?;
        }
        for i in 0..l {
            out.apply_zz_rotation(i, (i + 1) % l, bond_angle)?;
        }
        for q in 0..l {
            out.apply_gate(q, &half_z)?;
        }
        for q in 0..l {
            out.apply_gate(q, &half_x)?;
        }
    }
    Ok(out)
}

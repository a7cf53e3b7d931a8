//! Nodal model of the averaging network.
//!
//! `N` branches, each a resistor of `N·R` driven by one pixel voltage, meet at
//! a common node that is pulled to `-vdd` through a single resistor `R`. The
//! source follower reading the average is treated as an ideal unity buffer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use super::CircuitParams;
use crate::error::{Result, SimError};

/// Multiplicative resistor perturbations for the branches of one network.
///
/// `network_id` distinguishes the physically distinct networks of a pooled
/// frame so each gets its own draw from the same seed. With zero mismatch
/// every factor is exactly 1.
pub fn branch_factors(params: &CircuitParams, network_id: u64, branches: usize) -> Vec<f64> {
    if params.mismatch_sigma == 0.0 {
        return vec![1.0; branches];
    }
    let seed = params
        .rng_seed
        .wrapping_add(network_id.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = LogNormal::new(0.0, params.mismatch_sigma).expect("sigma validated >= 0");
    (0..branches).map(|_| dist.sample(&mut rng)).collect()
}

/// Solved network: the common node voltage plus the total branch conductance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NetworkSolution {
    pub node: f64,
    branch_conductance: f64,
    pull_conductance: f64,
    vdd: f64,
}

impl NetworkSolution {
    /// Conductance-weighted mean of the inputs recovered from the node voltage.
    pub fn average(&self) -> f64 {
        (self.node * (self.branch_conductance + self.pull_conductance)
            + self.pull_conductance * self.vdd)
            / self.branch_conductance
    }
}

fn check_inputs(inputs: &[f64], vdd: f64) -> Result<()> {
    if inputs.is_empty() {
        return Err(SimError::EmptyBranchSet);
    }
    if let Some(v) = inputs.iter().find(|v| !(**v >= 0.0 && **v <= vdd)) {
        return Err(SimError::config(format!(
            "branch input {v} V outside [0, {vdd}] V"
        )));
    }
    Ok(())
}

pub(crate) fn solve_network(
    inputs: &[f64],
    params: &CircuitParams,
    vdd: f64,
    network_id: u64,
) -> Result<NetworkSolution> {
    check_inputs(inputs, vdd)?;
    let n = inputs.len() as f64;
    let factors = branch_factors(params, network_id, inputs.len());
    let pull = 1.0 / params.resistance;

    // KCL at the node: sum g_i (V_i - G) + g0 (-vdd - G) = 0
    let mut g_sum = 0.0;
    let mut gv_sum = 0.0;
    for (v, f) in inputs.iter().zip(&factors) {
        let g = 1.0 / (n * params.resistance * f);
        g_sum += g;
        gv_sum += g * v;
    }
    let node = (gv_sum - pull * vdd) / (g_sum + pull);
    Ok(NetworkSolution {
        node,
        branch_conductance: g_sum,
        pull_conductance: pull,
        vdd,
    })
}

/// Voltage of the common node `G` for the given branch inputs.
///
/// Equals `(mean(inputs) - vdd) / 2` when there is no mismatch.
pub fn resistor_network_node_voltage(
    inputs: &[f64],
    params: &CircuitParams,
    vdd: f64,
) -> Result<f64> {
    Ok(solve_network(inputs, params, vdd, 0)?.node)
}

/// Averaged output voltage as seen through the source follower, clamped to
/// `[0, vdd]`.
pub fn analog_average(inputs: &[f64], params: &CircuitParams, vdd: f64) -> Result<f64> {
    let avg = solve_network(inputs, params, vdd, 0)?.average();
    Ok(avg.clamp(0.0, vdd))
}

/// Whether the node stays in the intended operating region, i.e. at or below
/// zero and no lower than `-vdd/2`. Invalid inputs yield `false`.
pub fn check_operating_region(inputs: &[f64], params: &CircuitParams, vdd: f64) -> bool {
    let eps = 1e-12 * vdd;
    match resistor_network_node_voltage(inputs, params, vdd) {
        Ok(g) => g <= eps && g >= -vdd / 2.0 - eps,
        Err(_) => false,
    }
}

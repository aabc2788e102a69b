use nalgebra::{DMatrix, DVector};

use super::case::NetworkCase;
use crate::error::{Error, Result};

/// Solution of the lossless DC power-flow equations.
#[derive(Debug, Clone, PartialEq)]
pub struct DcPowerFlow {
    pub slack: usize,
    /// Bus voltage angles in radians, zero at the slack bus.
    pub angles: Vec<f64>,
    /// Branch flows `b (theta_from - theta_to)`, in branch order.
    pub flows: Vec<f64>,
    /// Injection picked up by the slack bus beyond its scheduled net injection.
    pub slack_mismatch: f64,
}

/// Solves `B theta = P` with `theta[slack] = 0`. Any system-wide mismatch
/// between generation and load is absorbed at the slack bus.
pub fn base_dc_power_flow(case: &NetworkCase, slack: usize) -> Result<DcPowerFlow> {
    let n = case.num_buses();
    if slack >= n {
        return Err(Error::Validation(format!("slack bus index {slack} out of range")));
    }
    // Reduced system drops the slack row/column.
    let reduced = |i: usize| {
        if i < slack {
            Some(i)
        } else if i > slack {
            Some(i - 1)
        } else {
            None
        }
    };
    let mut b = DMatrix::<f64>::zeros(n - 1, n - 1);
    for br in case.branches() {
        let (f, t, y) = (br.from, br.to, br.susceptance_pu);
        if let Some(rf) = reduced(f) {
            b[(rf, rf)] += y;
        }
        if let Some(rt) = reduced(t) {
            b[(rt, rt)] += y;
        }
        if let (Some(rf), Some(rt)) = (reduced(f), reduced(t)) {
            b[(rf, rt)] -= y;
            b[(rt, rf)] -= y;
        }
    }
    let injections = DVector::from_iterator(
        n - 1,
        case.buses().iter().enumerate().filter(|&(i, _)| i != slack).map(|(_, b)| b.net_injection()),
    );
    let theta =
        b.lu().solve(&injections).ok_or_else(|| Error::Numeric("reduced susceptance matrix is singular".into()))?;

    let angles: Vec<f64> = (0..n).map(|i| reduced(i).map_or(0.0, |r| theta[r])).collect();
    let flows: Vec<f64> =
        case.branches().iter().map(|br| br.susceptance_pu * (angles[br.from] - angles[br.to])).collect();
    let scheduled: f64 = case.buses().iter().map(|b| b.net_injection()).sum();
    Ok(DcPowerFlow { slack, angles, flows, slack_mismatch: -scheduled })
}

/// Returns a copy of `case` with `base_flow_pu` filled from a DC power flow.
pub fn with_base_flows(case: &NetworkCase, slack: usize) -> Result<NetworkCase> {
    let pf = base_dc_power_flow(case, slack)?;
    let mut out = case.clone();
    for (br, flow) in out.branches_mut().iter_mut().zip(pf.flows) {
        br.base_flow_pu = flow;
    }
    Ok(out)
}

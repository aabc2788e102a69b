use num_traits::Float;

use super::ModelLayout;
use crate::error::{Error, Result};
use crate::graph::SignedCycle;
use crate::milp::{LinearConstraint, VarId};
use crate::net::NetworkCase;

pub const FAMILY_KVL: &str = "cycle_kvl";
pub const FAMILY_TRIANGLE: &str = "triangle";

/// Sum of `ratios` minus its two smallest entries.
///
/// Any cycle that is not fully closed has at least two open edges, so the
/// largest angle sum its closed part can carry is bounded by the rest.
pub fn compute_mc<T: Float>(ratios: &[T]) -> T {
    let mut sorted: Vec<T> = ratios.iter().map(|r| r.abs()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    sorted.iter().skip(2).fold(T::zero(), |acc, &r| acc + r)
}

/// `M_C` of a cycle of `case`, from each branch's `limit / b`.
pub fn cycle_mc(case: &NetworkCase, cycle: &SignedCycle) -> Result<f64> {
    let ratios = cycle
        .edge_ids()
        .map(|e| case.branches().get(e).map(|b| b.angle_capacity()))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::Contract("cycle references a branch outside the case".into()))?;
    Ok(compute_mc(&ratios))
}

/// The pair `±sum sgn p/b <= (M_C/2) sum y` for one cycle.
pub fn kvl_rows(case: &NetworkCase, layout: &ModelLayout, cycle: &SignedCycle) -> Result<[LinearConstraint; 2]> {
    if cycle.len() < 3 {
        return Err(Error::Contract(format!("KVL cycle has only {} edges", cycle.len())));
    }
    let half_mc = 0.5 * cycle_mc(case, cycle)?;
    let mut upper: Vec<(VarId, f64)> = Vec::with_capacity(2 * cycle.len());
    let mut lower: Vec<(VarId, f64)> = Vec::with_capacity(2 * cycle.len());
    for &(e, sign) in &cycle.edges {
        let coef = f64::from(sign) / case.branches()[e].susceptance_pu;
        upper.push((layout.p[e], coef));
        lower.push((layout.p[e], coef));
        upper.push((layout.y[e], -half_mc));
        lower.push((layout.y[e], half_mc));
    }
    Ok([LinearConstraint::le(FAMILY_KVL, upper, 0.0), LinearConstraint::ge(FAMILY_KVL, lower, 0.0)])
}

/// `y_e - sum(other y) <= 0` for each edge of a triangle.
pub fn triangle_rows(layout: &ModelLayout, triangle: &SignedCycle) -> Result<Vec<LinearConstraint>> {
    if triangle.len() != 3 {
        return Err(Error::Contract(format!("triangle cut on a cycle of length {}", triangle.len())));
    }
    let ids: Vec<usize> = triangle.edge_ids().collect();
    Ok(ids
        .iter()
        .map(|&e| {
            let terms = ids.iter().map(|&o| (layout.y[o], if o == e { 1.0 } else { -1.0 })).collect();
            LinearConstraint::le(FAMILY_TRIANGLE, terms, 0.0)
        })
        .collect())
}

//! Deterministic inequalities of the partitioned and dual statistics as
//! margin reports. A check holds when `lhs ≤ rhs`.

use super::{
    dual_fr_statistic, fr_statistic, partition_fr, perturbed_pair, DegreeConstant, LabeledPointSet,
    PartitionOptions,
};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: u64,
    pub rhs: u64,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    /// `rhs − lhs`; negative on violation.
    pub fn margin(&self) -> i128 {
        i128::from(self.rhs) - i128::from(self.lhs)
    }
}

/// `R ≤ Σ R_i + 2|D|` for the `l^d` partition.
pub fn subadditivity(
    sample: &LabeledPointSet,
    l: usize,
    opts: PartitionOptions,
) -> Result<InequalityCheck> {
    let rep = partition_fr(sample, l, opts)?;
    Ok(InequalityCheck {
        name: "subadditivity",
        lhs: rep.global_r as u64,
        rhs: (rep.sum_cell_r() + 2 * rep.crossing_edge_count) as u64,
    })
}

/// `R ≤ R*` and `R* ≤ R + c_d·2^d` on the single-cell frame.
pub fn dual_sandwich(
    sample: &LabeledPointSet,
    c_d: DegreeConstant,
    opts: PartitionOptions,
) -> Result<[InequalityCheck; 2]> {
    let fr = fr_statistic(sample);
    let dual = dual_fr_statistic(sample, 1, opts)?;
    let c = c_d.resolve(sample.dim(), &[&fr.tree]) as u64;
    let r = fr.r_statistic as u64;
    let r_star = dual.total() as u64;
    Ok([
        InequalityCheck {
            name: "dual lower",
            lhs: r,
            rhs: r_star,
        },
        InequalityCheck {
            name: "dual upper",
            lhs: r_star,
            rhs: r.saturating_add(c.saturating_mul(pow_sat(2, sample.dim()))),
        },
    ])
}

/// `Σ_i R*_i ≤ R*(l=1) + c_d·2^d·l^d`.
pub fn dual_superadditivity(
    sample: &LabeledPointSet,
    l: usize,
    c_d: DegreeConstant,
    opts: PartitionOptions,
) -> Result<InequalityCheck> {
    let whole = dual_fr_statistic(sample, 1, opts)?;
    let parts = dual_fr_statistic(sample, l, opts)?;
    let d = sample.dim();
    let c = c_d.resolve(d, &[&fr_statistic(sample).tree]) as u64;
    let slack = c
        .saturating_mul(pow_sat(2, d))
        .saturating_mul(pow_sat(l as u64, d));
    Ok(InequalityCheck {
        name: "dual superadditivity",
        lhs: parts.total() as u64,
        rhs: (whole.total() as u64).saturating_add(slack),
    })
}

/// `|ΔR| ≤ 4·c_d` for moving pooled point `index` to `new_position`.
///
/// With [`DegreeConstant::Auto`] in d ≥ 3 the constant is the larger maximum
/// degree of the two trees.
pub fn one_point_move(
    sample: &LabeledPointSet,
    index: usize,
    new_position: &[f64],
    c_d: DegreeConstant,
) -> Result<InequalityCheck> {
    let (before, after) = perturbed_pair(sample, index, new_position)?;
    let c = c_d.resolve(sample.dim(), &[&before.tree, &after.tree]) as u64;
    Ok(InequalityCheck {
        name: "one-point move",
        lhs: before.r_statistic.abs_diff(after.r_statistic) as u64,
        rhs: 4 * c,
    })
}

fn pow_sat(base: u64, exp: usize) -> u64 {
    base.saturating_pow(u32::try_from(exp).unwrap_or(u32::MAX))
}

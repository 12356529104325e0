//! Area/runtime and energy/runtime Pareto frontiers.
//!
//! A point dominates another when it is no worse in both metrics and
//! strictly better in one. Exact duplicates do not dominate each other, so
//! duplicated frontier points are all kept.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Split};
use crate::trace::PatternKind;

use super::SweepRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMetric {
    Area,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct ParetoPoint<S> {
    pub config_id: String,
    pub pattern: PatternKind,
    pub normalized_runtime: S,
    pub area_mm2: S,
    pub energy_pj: S,
    pub area_optimal: bool,
    pub energy_optimal: bool,
}

impl<S> ParetoPoint<S> {
    pub fn both(&self) -> bool {
        self.area_optimal && self.energy_optimal
    }
}

/// `a` dominates `b` (both metrics minimised).
pub fn dominates<S: Scalar>(a: (S, S), b: (S, S)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && (a.0 < b.0 || a.1 < b.1)
}

/// Indices of the non-dominated points, ascending.
pub fn pareto_front<S: Scalar>(points: &[(S, S)]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("pareto input"));
    }
    if let Some(i) = points.iter().position(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::InvalidConfig(format!("pareto point {i} is not finite")));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (points[a], points[b]);
        pa.0.partial_cmp(&pb.0)
            .unwrap()
            .then(pa.1.partial_cmp(&pb.1).unwrap())
            .then(a.cmp(&b))
    });
    let mut keep = Vec::new();
    let mut last: Option<(S, S)> = None;
    for i in order {
        let p = points[i];
        let take = match last {
            None => true,
            Some(l) => p.1 < l.1 || p == l,
        };
        if take {
            keep.push(i);
            last = Some(p);
        }
    }
    keep.sort_unstable();
    Ok(keep)
}

fn metric<S: Scalar>(row: &SweepRow<S>, m: CostMetric) -> S {
    match m {
        CostMetric::Area => row.cost.mmu_area_mm2.total(),
        CostMetric::Energy => row.cost.mmu_energy_pj.total(),
    }
}

fn flags<S: Scalar>(rows: &[&SweepRow<S>]) -> Result<(Vec<bool>, Vec<bool>)> {
    let mark = |m| -> Result<Vec<bool>> {
        let pts: Vec<_> = rows.iter().map(|r| (metric(r, m), r.cost.normalized_runtime)).collect();
        let mut f = vec![false; rows.len()];
        for i in pareto_front(&pts)? {
            f[i] = true;
        }
        Ok(f)
    };
    Ok((mark(CostMetric::Area)?, mark(CostMetric::Energy)?))
}

/// The frontier of `rows` in (`x`, normalized runtime), with both flags
/// computed over `rows`. Rows are compared as given; restrict them to one
/// pattern first to get per-pattern frontiers.
pub fn pareto<S: Scalar>(rows: &[SweepRow<S>], x: CostMetric) -> Result<Vec<ParetoPoint<S>>> {
    let refs: Vec<&SweepRow<S>> = rows.iter().collect();
    let (area, energy) = flags(&refs)?;
    Ok(rows
        .iter()
        .enumerate()
        .filter(|&(i, _)| match x {
            CostMetric::Area => area[i],
            CostMetric::Energy => energy[i],
        })
        .map(|(i, r)| ParetoPoint {
            config_id: r.config_id.clone(),
            pattern: r.pattern,
            normalized_runtime: r.cost.normalized_runtime,
            area_mm2: r.cost.mmu_area_mm2.total(),
            energy_pj: r.cost.mmu_energy_pj.total(),
            area_optimal: area[i],
            energy_optimal: energy[i],
        })
        .collect())
}

/// Sets `area_optimal` and `energy_optimal` on every row, comparing only
/// rows of the same pattern.
pub fn annotate_pareto<S: Scalar>(rows: &mut [SweepRow<S>]) -> Result<()> {
    let mut patterns: Vec<PatternKind> = rows.iter().map(|r| r.pattern).collect();
    patterns.sort_by_key(|p| p.ordinal());
    patterns.dedup();
    for pattern in patterns {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].pattern == pattern).collect();
        let group: Vec<&SweepRow<S>> = idx.iter().map(|&i| &rows[i]).collect();
        let (area, energy) = flags(&group)?;
        for (k, &i) in idx.iter().enumerate() {
            rows[i].area_optimal = area[k];
            rows[i].energy_optimal = energy[k];
        }
    }
    Ok(())
}

/// CPU/accelerator split of area and energy for one optimal design.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct SplitRow<S> {
    pub config_id: String,
    pub pattern: PatternKind,
    pub area_mm2: Split<S>,
    pub energy_pj: Split<S>,
    pub area_optimal: bool,
    pub energy_optimal: bool,
}

/// Side splits of the rows flagged optimal by either metric.
pub fn split_breakdown<S: Scalar>(rows: &[SweepRow<S>]) -> Vec<SplitRow<S>> {
    rows.iter()
        .filter(|r| r.area_optimal || r.energy_optimal)
        .map(|r| SplitRow {
            config_id: r.config_id.clone(),
            pattern: r.pattern,
            area_mm2: r.cost.mmu_area_mm2,
            energy_pj: r.cost.mmu_energy_pj,
            area_optimal: r.area_optimal,
            energy_optimal: r.energy_optimal,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_example() {
        let pts = [(1.0, 10.0), (2.0, 5.0), (3.0, 6.0)];
        assert_eq!(pareto_front(&pts).unwrap(), vec![0, 1]);
    }

    #[test]
    fn single_and_duplicates() {
        assert_eq!(pareto_front(&[(4.0, 4.0)]).unwrap(), vec![0]);
        assert_eq!(pareto_front(&[(2.0, 5.0), (1.0, 9.0), (2.0, 5.0)]).unwrap(), vec![0, 1, 2]);
        // same x, worse y is dominated; same y, worse x too
        assert_eq!(pareto_front(&[(1.0, 5.0), (1.0, 6.0), (2.0, 5.0)]).unwrap(), vec![0]);
    }

    #[test]
    fn errors() {
        assert!(pareto_front::<f64>(&[]).is_err());
        assert!(pareto_front(&[(1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn dominance_definition() {
        assert!(dominates((1.0, 1.0), (1.0, 2.0)));
        assert!(!dominates((1.0, 1.0), (1.0, 1.0)));
        assert!(!dominates((1.0, 3.0), (2.0, 2.0)));
    }
}

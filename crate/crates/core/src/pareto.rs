//! Two-dimensional Pareto fronts over metric projections.
//!
//! Fronts are computed per pair of axes (quality/cost, quality/time,
//! cost/time), each with its own optimization direction. Points with
//! identical coordinates are all kept on the front.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economics::MetricPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Map a coordinate so that smaller is always better.
    fn key(self, v: f64) -> f64 {
        match self {
            Direction::Minimize => v,
            Direction::Maximize => -v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub x: Direction,
    pub y: Direction,
}

impl Orientation {
    pub const fn new(x: Direction, y: Direction) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParetoError {
    #[error("cannot compute a Pareto front of an empty point set")]
    EmptyInput,
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
}

/// Indices of the non-dominated input points, sorted by x (then index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParetoFront {
    pub members: Vec<usize>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }
}

/// `a` is at least as good as `b` on both axes and strictly better on one.
pub fn dominates(a: Point2, b: Point2, orientation: Orientation) -> bool {
    let (ax, ay) = (orientation.x.key(a.x), orientation.y.key(a.y));
    let (bx, by) = (orientation.x.key(b.x), orientation.y.key(b.y));
    ax <= bx && ay <= by && (ax < bx || ay < by)
}

/// Non-dominated subset by sort-and-sweep, O(n log n).
pub fn pareto_front_2d(
    points: &[Point2],
    orientation: Orientation,
) -> Result<ParetoFront, ParetoError> {
    if points.is_empty() {
        return Err(ParetoError::EmptyInput);
    }
    if let Some(i) = points
        .iter()
        .position(|p| !p.x.is_finite() || !p.y.is_finite())
    {
        return Err(ParetoError::NonFinite(i));
    }
    let keyed: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (orientation.x.key(p.x), orientation.y.key(p.y)))
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        keyed[a]
            .0
            .total_cmp(&keyed[b].0)
            .then(keyed[a].1.total_cmp(&keyed[b].1))
    });

    let mut members = Vec::new();
    let mut best_y = f64::INFINITY;
    let mut i = 0;
    while i < order.len() {
        // Group of equal x; its best y is at the group's head after sorting.
        let x = keyed[order[i]].0;
        let group_min = keyed[order[i]].1;
        let mut j = i;
        while j < order.len() && keyed[order[j]].0 == x {
            j += 1;
        }
        if group_min < best_y {
            members.extend(
                order[i..j]
                    .iter()
                    .copied()
                    .filter(|&k| keyed[k].1 == group_min),
            );
            best_y = group_min;
        }
        i = j;
    }
    members.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    Ok(ParetoFront { members })
}

/// One of the three pairwise perspectives on (quality, cost, time).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    QualityCost,
    QualityTime,
    CostTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    Quality,
    Cost,
    Time,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Quality => "quality",
            Axis::Cost => "cost",
            Axis::Time => "time",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Axis::Quality => Direction::Maximize,
            Axis::Cost | Axis::Time => Direction::Minimize,
        }
    }

    pub fn value(self, p: &MetricPoint) -> f64 {
        match self {
            Axis::Quality => p.quality,
            Axis::Cost => p.cost_usd,
            Axis::Time => p.time_seconds,
        }
    }
}

impl Projection {
    pub const ALL: [Projection; 3] = [
        Projection::QualityCost,
        Projection::QualityTime,
        Projection::CostTime,
    ];

    pub fn axes(self) -> (Axis, Axis) {
        match self {
            Projection::QualityCost => (Axis::Quality, Axis::Cost),
            Projection::QualityTime => (Axis::Quality, Axis::Time),
            Projection::CostTime => (Axis::Cost, Axis::Time),
        }
    }

    pub fn orientation(self) -> Orientation {
        let (x, y) = self.axes();
        Orientation::new(x.direction(), y.direction())
    }

    /// File stem shared by the front table and the plot, e.g. `pareto_quality_cost`.
    pub fn stem(self) -> String {
        let (x, y) = self.axes();
        format!("pareto_{}_{}", x.name(), y.name())
    }

    pub fn project(self, points: &[MetricPoint]) -> Vec<Point2> {
        let (x, y) = self.axes();
        points
            .iter()
            .map(|p| Point2::new(x.value(p), y.value(p)))
            .collect()
    }

    pub fn front(self, points: &[MetricPoint]) -> Result<ParetoFront, ParetoError> {
        pareto_front_2d(&self.project(points), self.orientation())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const QC: Orientation = Orientation::new(Direction::Maximize, Direction::Minimize);

    fn naive(points: &[Point2], o: Orientation) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| !points.iter().any(|&q| dominates(q, points[i], o)))
            .collect()
    }

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(Point2::new(0.9, 1.0), Point2::new(0.8, 2.0), QC));
        let a = Point2::new(0.9, 1.0);
        assert!(!dominates(a, a, QC));
        assert!(!dominates(Point2::new(0.9, 2.0), Point2::new(0.8, 1.0), QC));
    }

    #[test]
    fn single_dominating_point() {
        let pts = [
            Point2::new(0.95, 0.1),
            Point2::new(0.5, 1.0),
            Point2::new(0.9, 0.2),
            Point2::new(0.1, 5.0),
        ];
        assert_eq!(pareto_front_2d(&pts, QC).unwrap().members, [0]);
    }

    #[test]
    fn trade_off_curve_is_all_front() {
        let pts: Vec<_> = (0..10)
            .map(|i| Point2::new(i as f64 / 10.0, 1.0 + i as f64))
            .collect();
        assert_eq!(
            pareto_front_2d(&pts, QC).unwrap().members,
            (0..10).collect::<Vec<_>>()
        );
    }

    #[test]
    fn duplicates_are_all_kept() {
        let pts = [
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.5, 2.0),
        ];
        assert_eq!(pareto_front_2d(&pts, QC).unwrap().members, [0, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(pareto_front_2d(&[], QC), Err(ParetoError::EmptyInput));
        assert_eq!(
            pareto_front_2d(&[Point2::new(0.0, f64::NAN)], QC),
            Err(ParetoError::NonFinite(0))
        );
    }

    #[test]
    fn projection_names() {
        let stems: Vec<_> = Projection::ALL.iter().map(|p| p.stem()).collect();
        assert_eq!(
            stems,
            ["pareto_quality_cost", "pareto_quality_time", "pareto_cost_time"]
        );
    }

    fn arb_points() -> impl Strategy<Value = Vec<Point2>> {
        // A coarse grid makes ties and duplicates common.
        prop::collection::vec((0u8..12, 0u8..12), 1..60).prop_map(|v| {
            v.into_iter()
                .map(|(x, y)| Point2::new(x as f64 / 4.0, y as f64 / 4.0 + 0.25))
                .collect()
        })
    }

    fn arb_orientation() -> impl Strategy<Value = Orientation> {
        let d = prop_oneof![Just(Direction::Maximize), Just(Direction::Minimize)];
        (d.clone(), d).prop_map(|(x, y)| Orientation::new(x, y))
    }

    proptest! {
        #[test]
        fn sweep_equals_naive(points in arb_points(), o in arb_orientation()) {
            let front = pareto_front_2d(&points, o).unwrap();
            prop_assert_eq!(sorted(front.members), naive(&points, o));
        }

        #[test]
        fn dominance_is_irreflexive_and_antisymmetric(
            a in (0u8..5, 0u8..5), b in (0u8..5, 0u8..5), o in arb_orientation()
        ) {
            let a = Point2::new(a.0 as f64, a.1 as f64);
            let b = Point2::new(b.0 as f64, b.1 as f64);
            prop_assert!(!dominates(a, a, o));
            prop_assert!(!(dominates(a, b, o) && dominates(b, a, o)));
        }

        #[test]
        fn log_scaling_preserves_front(points in arb_points(), o in arb_orientation()) {
            let logged: Vec<_> = points.iter().map(|p| Point2::new(p.x.ln_1p(), p.y.ln())).collect();
            let a = sorted(pareto_front_2d(&points, o).unwrap().members);
            let b = sorted(pareto_front_2d(&logged, o).unwrap().members);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn dominated_point_leaves_front_unchanged(points in arb_points(), pick in any::<prop::sample::Index>()) {
            let front = pareto_front_2d(&points, QC).unwrap();
            let anchor = points[front.members[pick.index(front.len())]];
            let mut extended = points.clone();
            extended.push(Point2::new(anchor.x - 0.1, anchor.y + 0.1));
            prop_assert_eq!(pareto_front_2d(&extended, QC).unwrap(), front);
        }

        #[test]
        fn dominating_point_joins_front(points in arb_points()) {
            let mut extended = points.clone();
            extended.push(Point2::new(100.0, -100.0));
            let front = pareto_front_2d(&extended, QC).unwrap();
            prop_assert_eq!(front.members, vec![points.len()]);
        }
    }
}

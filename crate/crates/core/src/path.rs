//! Piecewise-linear sample paths and the sup-norm.

use crate::error::{invalid, Result};
use crate::grid::{approx_eq, TimeGrid};

/// Grid values of a path, interpolated linearly between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points().len() {
            return invalid(format!(
                "path has {} values for {} grid points",
                values.len(),
                grid.points().len()
            ));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.points().len(), values.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.grid.horizon()
    }

    /// Linear interpolation at `s`, clamped to `[0, T]`.
    pub fn eval(&self, s: f64) -> f64 {
        interpolate(self.grid.points(), &self.values, s)
    }

    /// `sup_{0 ≤ r ≤ s} |y(r)|`.
    pub fn sup_norm_until(&self, s: f64) -> f64 {
        let pts = self.grid.points();
        let k = pts.partition_point(|&t| t <= s);
        let head = self.values[..k].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if k < pts.len() {
            head.max(self.eval(s).abs())
        } else {
            head
        }
    }

    /// The prefix ending at grid point `k` (inclusive).
    pub fn prefix(&self, k: usize) -> PathPrefix<'_> {
        PathPrefix::new(&self.grid.points()[..=k], &self.values[..=k])
    }

    /// Values at the points of a coarser grid nested in this one.
    pub fn restrict(&self, coarse: &TimeGrid) -> Result<SamplePath> {
        let Some(idx) = coarse.embedding_in(&self.grid) else {
            return invalid("coarse grid is not nested in the path grid");
        };
        let values = idx.iter().map(|&j| self.values[j]).collect();
        Ok(SamplePath::from_parts(coarse.clone(), values))
    }
}

/// Borrowed view of a path known up to its last grid point.
///
/// Drifts read the channel output through this view. Interpolation between
/// the stored points is linear; evaluation beyond the end returns the last
/// value (the prefix is frozen there).
#[derive(Debug, Clone, Copy)]
pub struct PathPrefix<'a> {
    times: &'a [f64],
    values: &'a [f64],
}

impl<'a> PathPrefix<'a> {
    pub fn new(times: &'a [f64], values: &'a [f64]) -> Self {
        assert!(!times.is_empty(), "a path prefix needs at least one point");
        assert_eq!(times.len(), values.len());
        Self { times, values }
    }

    pub fn times(&self) -> &'a [f64] {
        self.times
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Value at the end of the prefix.
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn at(&self, t: f64) -> f64 {
        interpolate(self.times, self.values, t)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn interpolate(times: &[f64], values: &[f64], s: f64) -> f64 {
    let n = times.len();
    if s <= times[0] {
        return values[0];
    }
    if s >= times[n - 1] {
        return values[n - 1];
    }
    let k = times.partition_point(|&t| t <= s);
    let (t0, t1) = (times[k - 1], times[k]);
    let (y0, y1) = (values[k - 1], values[k]);
    y0 + (s - t0) / (t1 - t0) * (y1 - y0)
}

/// `sup_{0 ≤ s ≤ T} |a(s) − b(s)|`, exact for piecewise-linear paths: the
/// difference is linear between points of the union grid, so the maximum is
/// attained at one of them.
pub fn sup_distance(a: &SamplePath, b: &SamplePath) -> Result<f64> {
    if !approx_eq(a.horizon(), b.horizon()) {
        return invalid(format!(
            "paths have different horizons ({} and {})",
            a.horizon(),
            b.horizon()
        ));
    }
    if a.grid == b.grid {
        return Ok(a
            .values
            .iter()
            .zip(&b.values)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs())));
    }
    let mut sup = 0.0f64;
    for &t in a.grid.points().iter().chain(b.grid.points()) {
        sup = sup.max((a.eval(t) - b.eval(t)).abs());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(points: Vec<f64>, values: Vec<f64>) -> SamplePath {
        SamplePath::new(TimeGrid::new(points).unwrap(), values).unwrap()
    }

    #[test]
    fn interpolation_between_points() {
        let p = path(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, -2.0]);
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(1.5), 0.0);
        assert_eq!(p.eval(2.0), -2.0);
        assert_eq!(p.sup_norm_until(0.5), 1.0);
        assert_eq!(p.sup_norm_until(1.75), 2.0);
        assert_eq!(p.sup_norm_until(2.0), 2.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = TimeGrid::even(1.0, 2).unwrap();
        assert!(SamplePath::new(g, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn distance_to_self_is_zero() {
        let p = path(vec![0.0, 0.3, 1.0], vec![0.0, -0.4, 0.9]);
        assert_eq!(sup_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn endpoint_sup() {
        let a = path(vec![0.0, 1.0], vec![0.0, 0.0]);
        let b = path(vec![0.0, 1.0], vec![0.0, 2.0]);
        assert_eq!(sup_distance(&a, &b).unwrap(), 2.0);
    }

    #[test]
    fn union_grid_catches_interior_peak() {
        let a = path(vec![0.0, 1.0], vec![0.0, 0.0]);
        let b = path(vec![0.0, 0.5, 1.0], vec![0.0, 3.0, 0.0]);
        assert_eq!(sup_distance(&a, &b).unwrap(), 3.0);
        assert_eq!(sup_distance(&b, &a).unwrap(), 3.0);
    }

    #[test]
    fn different_horizons_rejected() {
        let a = path(vec![0.0, 1.0], vec![0.0, 0.0]);
        let b = path(vec![0.0, 2.0], vec![0.0, 0.0]);
        assert!(sup_distance(&a, &b).is_err());
    }

    #[test]
    fn prefix_view() {
        let p = path(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 3.0]);
        let pre = p.prefix(1);
        assert_eq!(pre.len(), 2);
        assert_eq!(pre.end_time(), 0.5);
        assert_eq!(pre.last(), 1.0);
        assert_eq!(pre.at(0.25), 0.5);
        assert_eq!(pre.at(0.9), 1.0);
        assert_eq!(pre.sup_norm(), 1.0);
    }

    fn arb_path() -> impl Strategy<Value = SamplePath> {
        prop::collection::vec((0.01f64..0.5, -3.0f64..3.0), 1..12).prop_map(|steps| {
            let mut t = 0.0;
            let mut pts = vec![0.0];
            let mut vals = vec![0.0];
            for (dt, v) in &steps {
                t += dt;
                pts.push(t);
                vals.push(*v);
            }
            // rescale to horizon 1
            let pts = pts.iter().map(|x| x / t).collect::<Vec<_>>();
            let mut pts = pts;
            *pts.last_mut().unwrap() = 1.0;
            path(pts, vals)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn sup_distance_is_a_metric(a in arb_path(), b in arb_path(), c in arb_path()) {
            let ab = sup_distance(&a, &b).unwrap();
            let ba = sup_distance(&b, &a).unwrap();
            let bc = sup_distance(&b, &c).unwrap();
            let ac = sup_distance(&a, &c).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, ba);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}

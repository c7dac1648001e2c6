//! Grid curves over the element index square, the triangular start curve,
//! the triangle-cap regions the bisection shrinks, and winding numbers of
//! closed grid curves about the origin.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }
}

/// A walk in Z^2 whose steps stay put or move one unit along an axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCurve {
    pub points: Vec<GridPoint>,
}

impl GridCurve {
    pub fn new(points: Vec<GridPoint>) -> Self {
        GridCurve { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.points.len() >= 2 && self.points.first() == self.points.last()
    }

    /// Every step stays or moves by exactly one unit in one coordinate.
    pub fn is_grid_curve(&self) -> bool {
        self.points.windows(2).all(|w| {
            let dx = (w[1].x - w[0].x).abs();
            let dy = (w[1].y - w[0].y).abs();
            dx + dy <= 1
        })
    }

    /// Simple: after dropping stationary repeats, non-consecutive points are
    /// distinct (start and end count as consecutive).
    pub fn is_simple_closed(&self) -> bool {
        if !self.is_closed() {
            return false;
        }
        let mut ring: Vec<GridPoint> = Vec::new();
        for p in &self.points[..self.points.len() - 1] {
            if ring.last() != Some(p) {
                ring.push(*p);
            }
        }
        if ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        let mut seen = ring.clone();
        seen.sort_by_key(|p| (p.x, p.y));
        seen.dedup();
        seen.len() == ring.len()
    }

    /// Twice the signed area enclosed by a closed curve (shoelace).
    pub fn signed_area2(&self) -> i64 {
        self.points
            .windows(2)
            .map(|w| w[0].x * w[1].y - w[1].x * w[0].y)
            .sum()
    }
}

/// The triangular closed curve on `[m]^2`: the bottom row left to right, the
/// right column bottom to top, and the staircase hugging the diagonal back
/// down to the start.
pub fn triangular_curve(m: usize) -> GridCurve {
    assert!(m >= 2, "triangular curve needs m >= 2");
    TrapezoidRegion::full(m).boundary()
}

/// Cells `(i, j)` with `i_lo <= i <= i_hi`, `j_lo <= j <= j_hi`, `j <= i`;
/// cell `(i, j)` is the unit square with corners `(i, j)` and `(i+1, j+1)`.
/// The full triangle region for `[m]^2` uses cells `1 <= j <= i <= m - 1`.
/// Bounds are kept trimmed so every row and column is nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrapezoidRegion {
    i_lo: i64,
    i_hi: i64,
    j_lo: i64,
    j_hi: i64,
}

impl TrapezoidRegion {
    pub fn full(m: usize) -> Self {
        assert!(m >= 2);
        let hi = (m - 1) as i64;
        TrapezoidRegion {
            i_lo: 1,
            i_hi: hi,
            j_lo: 1,
            j_hi: hi,
        }
    }

    fn trimmed(i_lo: i64, i_hi: i64, j_lo: i64, j_hi: i64) -> Option<Self> {
        let i_lo = i_lo.max(j_lo);
        let j_hi = j_hi.min(i_hi);
        if i_lo > i_hi || j_lo > j_hi {
            None
        } else {
            Some(TrapezoidRegion {
                i_lo,
                i_hi,
                j_lo,
                j_hi,
            })
        }
    }

    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        (self.i_lo, self.i_hi, self.j_lo, self.j_hi)
    }

    pub fn height(&self) -> i64 {
        self.j_hi - self.j_lo + 1
    }

    pub fn width(&self) -> i64 {
        self.i_hi - self.i_lo + 1
    }

    /// Left end of the cell row `j`.
    fn row_start(&self, j: i64) -> i64 {
        self.i_lo.max(j)
    }

    pub fn cell_count(&self) -> u64 {
        (self.j_lo..=self.j_hi)
            .map(|j| (self.i_hi - self.row_start(j) + 1) as u64)
            .sum()
    }

    /// The boundary as a simple closed grid curve, counterclockwise,
    /// starting at the bottom-left lattice corner. For the full triangle
    /// this reproduces the triangular curve exactly.
    pub fn boundary(&self) -> GridCurve {
        let mut pts = Vec::new();
        let start = GridPoint::new(self.row_start(self.j_lo), self.j_lo);
        pts.push(start);
        // Bottom edge, rightwards.
        for x in start.x + 1..=self.i_hi + 1 {
            pts.push(GridPoint::new(x, self.j_lo));
        }
        // Right edge, upwards.
        for y in self.j_lo + 1..=self.j_hi + 1 {
            pts.push(GridPoint::new(self.i_hi + 1, y));
        }
        // Top edge, leftwards.
        let top_left = self.row_start(self.j_hi);
        for x in (top_left..=self.i_hi).rev() {
            pts.push(GridPoint::new(x, self.j_hi + 1));
        }
        // Staircase back down along the left side.
        for j in (self.j_lo..=self.j_hi).rev() {
            pts.push(GridPoint::new(self.row_start(j), j));
            if j > self.j_lo {
                let next = self.row_start(j - 1);
                for x in (next..self.row_start(j)).rev() {
                    pts.push(GridPoint::new(x, j));
                }
            }
        }
        debug_assert_eq!(pts.first(), pts.last());
        GridCurve::new(pts)
    }

    /// Splits by a horizontal grid chord into near-equal-height parts (the
    /// lower part may be one row shorter); height-1 regions split by a
    /// vertical chord instead. Each part keeps at most 5/6 of the cells.
    ///
    /// Panics on single-cell regions: their boundary image can never have
    /// odd winding, so asking to split one is a caller bug.
    pub fn split(&self) -> (TrapezoidRegion, TrapezoidRegion) {
        assert!(self.cell_count() > 1, "a single grid cell is never split");
        let (a, b) = if self.height() >= 2 {
            let cut = self.j_lo + self.height() / 2;
            (
                TrapezoidRegion::trimmed(self.i_lo, self.i_hi, self.j_lo, cut - 1),
                TrapezoidRegion::trimmed(self.i_lo, self.i_hi, cut, self.j_hi),
            )
        } else {
            let cut = self.i_lo + self.width() / 2;
            (
                TrapezoidRegion::trimmed(self.i_lo, cut - 1, self.j_lo, self.j_hi),
                TrapezoidRegion::trimmed(cut, self.i_hi, self.j_lo, self.j_hi),
            )
        };
        let (a, b) = (a.expect("lower part nonempty"), b.expect("upper part nonempty"));
        debug_assert_eq!(a.cell_count() + b.cell_count(), self.cell_count());
        debug_assert!(6 * a.cell_count().max(b.cell_count()) <= 5 * self.cell_count());
        (a, b)
    }

    /// Every admissible split (both parts nonempty and within the 5/6 area
    /// bound), best first: the near-equal chord of the preferred orientation
    /// leads, then its neighbors, then the other orientation. The first
    /// entry is always [`TrapezoidRegion::split`]'s result; the alternatives
    /// let a caller sidestep a chord whose image is unusable.
    pub fn split_candidates(&self) -> Vec<(TrapezoidRegion, TrapezoidRegion)> {
        let total = self.cell_count();
        if total <= 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut horizontal: Vec<i64> = (self.j_lo + 1..=self.j_hi).collect();
        let h_mid = self.j_lo + self.height() / 2;
        horizontal.sort_by_key(|&c| ((c - h_mid).abs(), c));
        let mut vertical: Vec<i64> = (self.i_lo + 1..=self.i_hi).collect();
        let v_mid = self.i_lo + self.width() / 2;
        vertical.sort_by_key(|&c| ((c - v_mid).abs(), c));

        let push_h = |out: &mut Vec<_>, cut: i64| {
            if let (Some(a), Some(b)) = (
                TrapezoidRegion::trimmed(self.i_lo, self.i_hi, self.j_lo, cut - 1),
                TrapezoidRegion::trimmed(self.i_lo, self.i_hi, cut, self.j_hi),
            ) {
                if 6 * a.cell_count().max(b.cell_count()) <= 5 * total {
                    out.push((a, b));
                }
            }
        };
        let push_v = |out: &mut Vec<_>, cut: i64| {
            if let (Some(a), Some(b)) = (
                TrapezoidRegion::trimmed(self.i_lo, cut - 1, self.j_lo, self.j_hi),
                TrapezoidRegion::trimmed(cut, self.i_hi, self.j_lo, self.j_hi),
            ) {
                if 6 * a.cell_count().max(b.cell_count()) <= 5 * total {
                    out.push((a, b));
                }
            }
        };
        if self.height() >= 2 {
            for c in &horizontal {
                push_h(&mut out, *c);
            }
            for c in &vertical {
                push_v(&mut out, *c);
            }
        } else {
            for c in &vertical {
                push_v(&mut out, *c);
            }
            for c in &horizontal {
                push_h(&mut out, *c);
            }
        }
        out
    }
}

/// Winding number of a closed grid curve about the origin, by counting
/// signed crossings of the open rightward ray. Runs that arrive at the axis
/// from below and leave below (or above/above) do not count. Consecutive
/// repeated points are tolerated.
pub fn winding(curve: &GridCurve) -> Result<i64> {
    if curve.points.iter().any(|p| p.x == 0 && p.y == 0) {
        return Err(Error::InvalidInput(
            "winding is undefined: the curve passes through the origin".into(),
        ));
    }
    if !curve.is_closed() {
        return Err(Error::InvalidInput("winding needs a closed curve".into()));
    }
    // Ring without the duplicated endpoint or stationary repeats.
    let mut ring: Vec<GridPoint> = Vec::new();
    for p in &curve.points[..curve.points.len() - 1] {
        if ring.last() != Some(p) {
            ring.push(*p);
        }
    }
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    let n = ring.len();
    let Some(start) = ring.iter().position(|p| p.y != 0) else {
        return Ok(0); // flat curve on the axis encloses nothing
    };

    let mut crossings = 0i64;
    let mut prev_side = ring[start].y.signum();
    let mut idx = 1;
    while idx <= n {
        let p = ring[(start + idx) % n];
        if p.y != 0 {
            prev_side = p.y.signum();
            idx += 1;
            continue;
        }
        // A maximal run on the axis; x keeps its sign along it because the
        // origin is excluded.
        let on_positive_ray = p.x > 0;
        let entry = prev_side;
        while idx <= n && ring[(start + idx) % n].y == 0 {
            idx += 1;
        }
        let exit = ring[(start + idx) % n].y.signum();
        if on_positive_ray && exit != entry {
            crossings += exit; // +1 south-to-north, -1 north-to-south
        }
        prev_side = exit;
    }
    Ok(crossings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(pts: &[(i64, i64)]) -> GridCurve {
        GridCurve::new(pts.iter().map(|&(x, y)| GridPoint::new(x, y)).collect())
    }

    #[test]
    fn triangular_curve_m2_is_the_unit_square() {
        let t = triangular_curve(2);
        assert_eq!(
            t,
            curve(&[(1, 1), (2, 1), (2, 2), (1, 2), (1, 1)])
        );
        assert_eq!(t.signed_area2(), 2);
    }

    #[test]
    fn triangular_curve_m3_has_the_staircase() {
        let t = triangular_curve(3);
        assert_eq!(
            t,
            curve(&[
                (1, 1),
                (2, 1),
                (3, 1),
                (3, 2),
                (3, 3),
                (2, 3),
                (2, 2),
                (1, 2),
                (1, 1),
            ])
        );
        assert_eq!(t.signed_area2(), 6); // area 3 = m(m-1)/2
    }

    #[test]
    fn triangular_curve_shape_properties() {
        for m in 2..40usize {
            let t = triangular_curve(m);
            assert!(t.is_closed());
            assert!(t.is_grid_curve());
            assert!(t.is_simple_closed());
            let area2 = t.signed_area2();
            assert_eq!(area2, (m * (m - 1)) as i64, "enclosed area is m(m-1)/2");
            assert_eq!(
                TrapezoidRegion::full(m).cell_count() as i64 * 2,
                area2
            );
        }
    }

    #[test]
    fn region_boundary_matches_cells() {
        let r = TrapezoidRegion::trimmed(2, 6, 1, 4).unwrap();
        let b = r.boundary();
        assert!(b.is_simple_closed() && b.is_grid_curve());
        assert_eq!(b.signed_area2(), 2 * r.cell_count() as i64);
        // A region straddling the diagonal gets a staircase boundary.
        let r = TrapezoidRegion::trimmed(1, 7, 3, 7).unwrap();
        let b = r.boundary();
        assert!(b.is_simple_closed());
        assert_eq!(b.signed_area2(), 2 * r.cell_count() as i64);
    }

    #[test]
    fn split_examples() {
        // 4x4 rectangle: two 4x2 halves.
        let r = TrapezoidRegion::trimmed(5, 8, 1, 4).unwrap();
        let (a, b) = r.split();
        assert_eq!(a.cell_count(), 8);
        assert_eq!(b.cell_count(), 8);
        assert!(4 * a.cell_count() <= 3 * r.cell_count());

        // Height 1, width 3: vertical split into widths 1 and 2.
        let r = TrapezoidRegion::trimmed(4, 6, 2, 2).unwrap();
        let (a, b) = r.split();
        assert_eq!(a.cell_count() + b.cell_count(), 3);
        assert_eq!(a.cell_count().max(b.cell_count()), 2);
        assert!(6 * 2 <= 5 * 3);

        // Height 3: rows split 1 + 2.
        let r = TrapezoidRegion::trimmed(1, 4, 2, 4).unwrap();
        let (a, b) = r.split();
        assert_eq!(a.height(), 1);
        assert_eq!(b.height(), 2);
        assert!(6 * a.cell_count().max(b.cell_count()) <= 5 * r.cell_count());
    }

    #[test]
    fn split_full_triangle_balances_rows() {
        // Cell rows of widths 3, 2, 1 from the bottom; the single wide
        // bottom row balances the two narrow ones.
        let r = TrapezoidRegion::trimmed(1, 3, 1, 3).unwrap();
        assert_eq!(r.cell_count(), 6);
        let (a, b) = r.split();
        assert_eq!(a.cell_count(), 3);
        assert_eq!(b.cell_count(), 3);
    }

    #[test]
    fn winding_basic_loops() {
        // Counterclockwise unit-step square around the origin.
        let sq = curve(&[
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
            (1, 0),
            (1, 1),
        ]);
        assert_eq!(winding(&sq).unwrap(), 1);
        let cw: Vec<GridPoint> = sq.points.iter().rev().copied().collect();
        assert_eq!(winding(&GridCurve::new(cw)).unwrap(), -1);
    }

    #[test]
    fn winding_zero_when_left_of_origin() {
        let c = curve(&[
            (-2, 0),
            (-1, 0),
            (-1, 1),
            (-2, 1),
            (-2, 0),
        ]);
        assert_eq!(winding(&c).unwrap(), 0);
    }

    #[test]
    fn touching_the_ray_and_returning_does_not_count() {
        // Arrives at (2, 0) from below, wanders along the axis, returns
        // below: no crossing.
        let c = curve(&[
            (1, -1),
            (2, -1),
            (2, 0),
            (3, 0),
            (3, -1),
            (2, -1),
            (1, -1),
        ]);
        assert_eq!(winding(&c).unwrap(), 0);
        // Same arrival but departing above, on a loop enclosing the origin:
        // the run on the ray counts as one signed crossing.
        let c = curve(&[
            (1, -1),
            (2, -1),
            (2, 0),
            (3, 0),
            (3, 1),
            (2, 1),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ]);
        assert_eq!(winding(&c).unwrap(), 1);
    }

    #[test]
    fn winding_rejects_origin_on_curve() {
        let c = curve(&[(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]);
        assert!(winding(&c).is_err());
    }

    #[test]
    fn winding_tolerates_stationary_steps() {
        let c = curve(&[
            (1, 1),
            (1, 1),
            (-1, 1),
            (-1, -1),
            (-1, -1),
            (1, -1),
            (1, 1),
        ]);
        // Not unit steps, but winding only needs the vertex sequence; use a
        // refined version with intermediate points.
        let refined = curve(&[
            (1, 1),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (-1, -1),
            (0, -1),
            (1, -1),
            (1, 0),
            (1, 1),
        ]);
        assert!(refined.is_grid_curve());
        assert_eq!(winding(&refined).unwrap(), 1);
        let _ = c;
    }
}

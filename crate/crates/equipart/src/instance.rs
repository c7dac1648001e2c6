//! Input conditioning: duality, general-position checking, canonical
//! coordinates (prescribed direction rotated to vertical, colors split by the
//! z-median, colors separated in x by an exact shear), and dummy-point
//! padding with optional seeded perturbation.

use crate::error::{Error, Result};
use crate::geom::{rotation_to_vertical, AffineMap, OrientedPlane, Point3};
use crate::scalar::{denominator_lcm, floor, int, Scalar, Sgn};
use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Color of a point (below/above the first plane) and of its dual plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Red => write!(f, "red"),
            Color::Blue => write!(f, "blue"),
        }
    }
}

/// The non-vertical plane `z = a x + b y + c` dual to a point, with its color
/// and the index of the source point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPlane {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub color: Color,
    pub source_index: usize,
}

impl DualPlane {
    /// Height of the plane above `p`: positive when the plane lies strictly
    /// above the point.
    pub fn height_above(&self, p: &Point3) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c - &p.z
    }

    pub fn side_of(&self, p: &Point3) -> Sgn {
        Sgn::of(&self.height_above(p))
    }

    /// The plane as an oriented plane `{-a x - b y + z = c}` (normal side up).
    pub fn as_plane(&self) -> OrientedPlane {
        OrientedPlane {
            normal: [-self.a.clone(), -self.b.clone(), Scalar::one()],
            offset: self.c.clone(),
        }
    }
}

/// Maps the point `(p1,p2,p3)` to the plane `z = p1 x + p2 y - p3`.
pub fn dualize(p: &Point3, color: Color, index: usize) -> DualPlane {
    DualPlane {
        a: p.x.clone(),
        b: p.y.clone(),
        c: -p.z.clone(),
        color,
        source_index: index,
    }
}

/// One violating tuple of the general-position conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GpViolation {
    TwoSameZ(usize, usize),
    ThreeInVerticalPlane(usize, usize, usize),
    FourCoplanar(usize, usize, usize, usize),
}

impl fmt::Display for GpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GpViolation::TwoSameZ(i, j) => {
                write!(f, "points {i} and {j} share a z-coordinate")
            }
            GpViolation::ThreeInVerticalPlane(i, j, k) => {
                write!(f, "points {i}, {j}, {k} lie in a vertical plane")
            }
            GpViolation::FourCoplanar(i, j, k, l) => {
                write!(f, "points {i}, {j}, {k}, {l} are coplanar")
            }
        }
    }
}

/// Result of a general-position check; a violation is a value, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GpStatus {
    Ok,
    Violation(GpViolation),
}

impl GpStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, GpStatus::Ok)
    }
}

/// Integer coordinate rows with per-axis denominators cleared. The checks
/// below are invariant under independent positive axis scalings.
fn integer_rows(points: &[Point3]) -> Vec<[BigInt; 3]> {
    let axis = |get: fn(&Point3) -> &Scalar| -> Vec<BigInt> {
        let l = denominator_lcm(points.iter().map(get));
        points
            .iter()
            .map(|p| (get(p) * BigRational::from_integer(l.clone())).numer().clone())
            .collect()
    };
    let xs = axis(|p| &p.x);
    let ys = axis(|p| &p.y);
    let zs = axis(|p| &p.z);
    (0..points.len())
        .map(|i| [xs[i].clone(), ys[i].clone(), zs[i].clone()])
        .collect()
}

fn rows_fit_i64(rows: &[[BigInt; 3]], bound: i64) -> Option<Vec<[i64; 3]>> {
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let mut small = [0i64; 3];
        for (axis, v) in r.iter().enumerate() {
            let x = i64::try_from(v).ok()?;
            if x.abs() > bound {
                return None;
            }
            small[axis] = x;
        }
        out.push(small);
    }
    Some(out)
}

/// Checks the three exact conditions: no two points share a z-coordinate, no
/// three lie in a vertical plane, no four are coplanar.
pub fn general_position_check(points: &[Point3]) -> GpStatus {
    let rows = integer_rows(points);
    // Entry bound keeping a 3x3 determinant of differences inside i128.
    if let Some(small) = rows_fit_i64(&rows, 1 << 39) {
        general_position_small(&small)
    } else {
        general_position_big(&rows)
    }
}

fn general_position_small(p: &[[i64; 3]]) -> GpStatus {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| p[i][2]);
    for w in order.windows(2) {
        if p[w[0]][2] == p[w[1]][2] {
            return GpStatus::Violation(GpViolation::TwoSameZ(
                w[0].min(w[1]),
                w[0].max(w[1]),
            ));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let ux = (p[j][0] - p[i][0]) as i128;
            let uy = (p[j][1] - p[i][1]) as i128;
            for k in j + 1..n {
                let vx = (p[k][0] - p[i][0]) as i128;
                let vy = (p[k][1] - p[i][1]) as i128;
                if ux * vy - uy * vx == 0 {
                    return GpStatus::Violation(GpViolation::ThreeInVerticalPlane(i, j, k));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let u = diff3(&p[j], &p[i]);
            for k in j + 1..n {
                let v = diff3(&p[k], &p[i]);
                let nx = u[1] * v[2] - u[2] * v[1];
                let ny = u[2] * v[0] - u[0] * v[2];
                let nz = u[0] * v[1] - u[1] * v[0];
                for l in k + 1..n {
                    let w = diff3(&p[l], &p[i]);
                    if nx * w[0] + ny * w[1] + nz * w[2] == 0 {
                        return GpStatus::Violation(GpViolation::FourCoplanar(i, j, k, l));
                    }
                }
            }
        }
    }
    GpStatus::Ok
}

fn diff3(a: &[i64; 3], b: &[i64; 3]) -> [i128; 3] {
    [
        (a[0] - b[0]) as i128,
        (a[1] - b[1]) as i128,
        (a[2] - b[2]) as i128,
    ]
}

fn general_position_big(p: &[[BigInt; 3]]) -> GpStatus {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| p[i][2].cmp(&p[j][2]));
    for w in order.windows(2) {
        if p[w[0]][2] == p[w[1]][2] {
            return GpStatus::Violation(GpViolation::TwoSameZ(
                w[0].min(w[1]),
                w[0].max(w[1]),
            ));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let ux = &p[j][0] - &p[i][0];
            let uy = &p[j][1] - &p[i][1];
            for k in j + 1..n {
                let vx = &p[k][0] - &p[i][0];
                let vy = &p[k][1] - &p[i][1];
                if (&ux * &vy - &uy * &vx).is_zero() {
                    return GpStatus::Violation(GpViolation::ThreeInVerticalPlane(i, j, k));
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let u: Vec<BigInt> = (0..3).map(|t| &p[j][t] - &p[i][t]).collect();
            for k in j + 1..n {
                let v: Vec<BigInt> = (0..3).map(|t| &p[k][t] - &p[i][t]).collect();
                let nx = &u[1] * &v[2] - &u[2] * &v[1];
                let ny = &u[2] * &v[0] - &u[0] * &v[2];
                let nz = &u[0] * &v[1] - &u[1] * &v[0];
                for l in k + 1..n {
                    let w: Vec<BigInt> = (0..3).map(|t| &p[l][t] - &p[i][t]).collect();
                    if (&nx * &w[0] + &ny * &w[1] + &nz * &w[2]).is_zero() {
                        return GpStatus::Violation(GpViolation::FourCoplanar(i, j, k, l));
                    }
                }
            }
        }
    }
    GpStatus::Ok
}

/// A point set in canonical coordinates: the prescribed direction is
/// vertical, the first plane is `z = 0` through the median point, red points
/// sit in `z < 0, x > 0` and blue points in `z > 0, x < 0`. All coordinates
/// are integers (the integerizing scale is part of the recorded transform).
#[derive(Debug, Clone)]
pub struct ColoredInstance {
    pub red: Vec<Point3>,
    pub blue: Vec<Point3>,
    /// Indices of red/blue points in the input list handed to `canonicalize`.
    pub red_source: Vec<usize>,
    pub blue_source: Vec<usize>,
    pub median_source: Option<usize>,
    pub median_point: Option<Point3>,
    pub k: usize,
    /// The plane `z = 0` in canonical coordinates.
    pub h1: OrientedPlane,
    /// Input frame -> canonical frame. Invertible by construction.
    pub forward: AffineMap,
}

impl ColoredInstance {
    /// `|red| = |blue| = 4k + 3`.
    pub fn side_count(&self) -> usize {
        4 * self.k + 3
    }

    /// Number of points represented, including the median point if any.
    pub fn total_points(&self) -> usize {
        self.red.len() + self.blue.len() + usize::from(self.median_source.is_some())
    }

    /// Maps a plane found in canonical coordinates back to the input frame.
    pub fn plane_to_input_frame(&self, plane: &OrientedPlane) -> OrientedPlane {
        self.forward.pullback_plane(plane)
    }

    /// Dual planes of both colors, reds first, in instance order.
    pub fn dual_planes(&self) -> Vec<DualPlane> {
        let mut planes = Vec::with_capacity(self.red.len() + self.blue.len());
        for (i, p) in self.red.iter().enumerate() {
            planes.push(dualize(p, Color::Red, self.red_source.get(i).copied().unwrap_or(i)));
        }
        for (i, p) in self.blue.iter().enumerate() {
            planes.push(dualize(
                p,
                Color::Blue,
                self.blue_source.get(i).copied().unwrap_or(i),
            ));
        }
        planes
    }

    /// Builds an instance directly from colored canonical points. Intended
    /// for tests and small drivers; checks the coloring invariants and
    /// integerizes coordinates (recording the scale in the transform).
    pub fn from_colored_points(red: Vec<Point3>, blue: Vec<Point3>) -> Result<Self> {
        if red.len() != blue.len() || red.len() % 4 != 3 {
            return Err(Error::InvalidInput(
                "need |red| = |blue| = 4k + 3 canonical points".into(),
            ));
        }
        let k = (red.len() - 3) / 4;
        let l = denominator_lcm(
            red.iter()
                .chain(blue.iter())
                .flat_map(|p| p.coords().into_iter()),
        );
        let lq = BigRational::from_integer(l.clone());
        let scale = |p: &Point3| Point3::new(&p.x * &lq, &p.y * &lq, &p.z * &lq);
        let red: Vec<Point3> = red.iter().map(scale).collect();
        let blue: Vec<Point3> = blue.iter().map(scale).collect();
        for p in &red {
            if !(p.z.is_negative() && p.x.is_positive()) {
                return Err(Error::InvalidInput("red points need z < 0 and x > 0".into()));
            }
        }
        for p in &blue {
            if !(p.z.is_positive() && p.x.is_negative()) {
                return Err(Error::InvalidInput("blue points need z > 0 and x < 0".into()));
            }
        }
        let red_source = (0..red.len()).collect();
        let blue_source = (red.len()..red.len() + blue.len()).collect();
        let mut forward = AffineMap::identity();
        for row in forward.linear.iter_mut().enumerate() {
            row.1[row.0] = lq.clone();
        }
        Ok(ColoredInstance {
            red,
            blue,
            red_source,
            blue_source,
            median_source: None,
            median_point: None,
            k,
            h1: OrientedPlane::horizontal(Scalar::zero()),
            forward,
        })
    }
}

/// Rotates the prescribed direction to vertical, splits colors at the
/// z-median, and shears red into `x > 0` and blue into `x < 0`.
///
/// Requires `|points| = 8k + 7` with `k >= 1` and general position after the
/// rotation. The full coplanarity condition is the caller's precondition
/// (the partition pipeline enforces it via padding); this function verifies
/// the conditions it directly relies on: pairwise-distinct z and, after the
/// shear, no three points in a vertical plane.
pub fn canonicalize(points: &[Point3], v: &[Scalar; 3]) -> Result<ColoredInstance> {
    let n = points.len();
    if n < 15 || n % 8 != 7 {
        return Err(Error::InvalidInput(format!(
            "canonical instance needs 8k + 7 points with k >= 1, got {n}"
        )));
    }
    let k = (n - 7) / 8;

    let rot = AffineMap::linear_map(rotation_to_vertical(v)?);
    let rotated: Vec<Point3> = points.iter().map(|p| rot.apply(p)).collect();

    // One global scale so every coordinate becomes an integer; the dual
    // arrangement of an integer instance has integer plane coefficients.
    let l = denominator_lcm(rotated.iter().flat_map(|p| p.coords().into_iter()));
    let lq = BigRational::from_integer(l.clone());
    let scale = AffineMap {
        linear: [
            [lq.clone(), Scalar::zero(), Scalar::zero()],
            [Scalar::zero(), lq.clone(), Scalar::zero()],
            [Scalar::zero(), Scalar::zero(), lq.clone()],
        ],
        translate: [Scalar::zero(), Scalar::zero(), Scalar::zero()],
    };
    let scaled: Vec<Point3> = rotated.iter().map(|p| scale.apply(p)).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| scaled[i].z.cmp(&scaled[j].z));
    for w in order.windows(2) {
        if scaled[w[0]].z == scaled[w[1]].z {
            return Err(Error::Degenerate(format!(
                "points {} and {} share a height along the prescribed direction",
                w[0].min(w[1]),
                w[0].max(w[1])
            )));
        }
    }
    let median_source = order[4 * k + 3];
    let z_med = scaled[median_source].z.clone();
    let translate = AffineMap {
        linear: AffineMap::identity().linear,
        translate: [Scalar::zero(), Scalar::zero(), -z_med.clone()],
    };
    let shifted: Vec<Point3> = scaled.iter().map(|p| translate.apply(p)).collect();

    // Smallest integer slope putting every red point into x - s z > 0 and
    // every blue point into x - s z < 0; s = 0 when already separated.
    let mut max_ratio: Option<Scalar> = None;
    for (i, p) in shifted.iter().enumerate() {
        if i == median_source {
            continue;
        }
        let r = &p.x / &p.z;
        if max_ratio.as_ref().map_or(true, |m| &r > m) {
            max_ratio = Some(r);
        }
    }
    let max_ratio = max_ratio.expect("n >= 15");
    let mut s = if max_ratio.is_negative() {
        BigInt::zero()
    } else {
        floor(&max_ratio) + 1
    };

    let mut attempts = 0;
    loop {
        let shear = AffineMap {
            linear: [
                [
                    Scalar::one(),
                    Scalar::zero(),
                    BigRational::from_integer(-s.clone()),
                ],
                [Scalar::zero(), Scalar::one(), Scalar::zero()],
                [Scalar::zero(), Scalar::zero(), Scalar::one()],
            ],
            translate: [Scalar::zero(), Scalar::zero(), Scalar::zero()],
        };
        let sheared: Vec<Point3> = shifted.iter().map(|p| shear.apply(p)).collect();
        if no_three_in_vertical_plane(&sheared) {
            let mut red = Vec::new();
            let mut blue = Vec::new();
            let mut red_source = Vec::new();
            let mut blue_source = Vec::new();
            for (i, p) in sheared.iter().enumerate() {
                if i == median_source {
                    continue;
                }
                if p.z.is_negative() {
                    if !p.x.is_positive() {
                        return Err(Error::Internal("shear failed to separate red".into()));
                    }
                    red.push(p.clone());
                    red_source.push(i);
                } else {
                    if !p.x.is_negative() {
                        return Err(Error::Internal("shear failed to separate blue".into()));
                    }
                    blue.push(p.clone());
                    blue_source.push(i);
                }
            }
            debug_assert_eq!(red.len(), 4 * k + 3);
            debug_assert_eq!(blue.len(), 4 * k + 3);
            let forward = shear.compose(&translate).compose(&scale).compose(&rot);
            return Ok(ColoredInstance {
                median_point: Some(sheared[median_source].clone()),
                red,
                blue,
                red_source,
                blue_source,
                median_source: Some(median_source),
                k,
                h1: OrientedPlane::horizontal(Scalar::zero()),
                forward,
            });
        }
        s += 1;
        attempts += 1;
        if attempts > 200 {
            return Err(Error::Degenerate(
                "no admissible shear found; perturb the input".into(),
            ));
        }
    }
}

fn no_three_in_vertical_plane(points: &[Point3]) -> bool {
    let rows = integer_rows(points);
    let n = rows.len();
    if let Some(small) = rows_fit_i64(&rows, 1 << 62) {
        for i in 0..n {
            for j in i + 1..n {
                let ux = (small[j][0] as i128) - (small[i][0] as i128);
                let uy = (small[j][1] as i128) - (small[i][1] as i128);
                for k in j + 1..n {
                    let vx = (small[k][0] as i128) - (small[i][0] as i128);
                    let vy = (small[k][1] as i128) - (small[i][1] as i128);
                    match ux.checked_mul(vy).and_then(|a| uy.checked_mul(vx).map(|b| (a, b))) {
                        Some((a, b)) => {
                            if a == b {
                                return false;
                            }
                        }
                        None => {
                            // Rare overflow: redo this triple exactly.
                            let a = BigInt::from(ux) * BigInt::from(vy);
                            let b = BigInt::from(uy) * BigInt::from(vx);
                            if a == b {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        return true;
    }
    for i in 0..n {
        for j in i + 1..n {
            let ux = &rows[j][0] - &rows[i][0];
            let uy = &rows[j][1] - &rows[i][1];
            for k in j + 1..n {
                let vx = &rows[k][0] - &rows[i][0];
                let vy = &rows[k][1] - &rows[i][1];
                if &ux * &vy == &uy * &vx {
                    return false;
                }
            }
        }
    }
    true
}

/// Result of padding (and possibly perturbing) an input set.
#[derive(Debug, Clone)]
pub struct PaddedSet {
    /// Original points (jittered when perturbation was applied) followed by
    /// the dummy points.
    pub points: Vec<Point3>,
    pub original_count: usize,
    pub dummy_count: usize,
    /// True when the original points were jittered.
    pub perturbed: bool,
    /// Strict bound on the per-coordinate jitter that was applied.
    pub jitter_bound: Option<Scalar>,
}

impl PaddedSet {
    pub fn dummy_indices(&self) -> std::ops::Range<usize> {
        self.original_count..self.points.len()
    }
}

const JITTER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const DUMMY_SALT: u64 = 0x6c62_272e_07bb_0142;

/// Pads with dummy points far outside the bounding box until the count is
/// `7 (mod 8)`, and, when allowed, jitters degenerate inputs into general
/// position. Deterministic in `(points, seed, allow_perturb)`.
///
/// Dummy placement never moves user points: if only dummy-involving tuples
/// are degenerate, new dummy positions are drawn without requiring consent.
pub fn pad_and_perturb(
    points: &[Point3],
    seed: u64,
    allow_perturb: bool,
) -> Result<PaddedSet> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let mut working: Vec<Point3> = points.to_vec();
    let mut perturbed = false;
    let mut jitter_bound = None;

    match general_position_check(&working) {
        GpStatus::Ok => {}
        GpStatus::Violation(v) if !allow_perturb => {
            return Err(Error::Degenerate(format!("{v}; rerun with perturbation enabled")));
        }
        GpStatus::Violation(_) => {
            let delta = jitter_magnitude(&working);
            let mut done = false;
            for attempt in 0..64u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed ^ JITTER_SALT.wrapping_mul(attempt + 1),
                );
                let jittered: Vec<Point3> = working
                    .iter()
                    .map(|p| {
                        let mut j = |q: &Scalar| q + &delta * lattice_fraction(&mut rng);
                        Point3::new(j(&p.x), j(&p.y), j(&p.z))
                    })
                    .collect();
                if general_position_check(&jittered).is_ok() {
                    working = jittered;
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(Error::Degenerate(
                    "could not perturb the input into general position".into(),
                ));
            }
            perturbed = true;
            jitter_bound = Some(delta);
        }
    }

    let n = working.len();
    let dummy_count = (7 + 8 - n % 8) % 8;
    if dummy_count == 0 {
        return Ok(PaddedSet {
            points: working,
            original_count: n,
            dummy_count: 0,
            perturbed,
            jitter_bound,
        });
    }

    let mut big = BigInt::one();
    for p in &working {
        for c in p.coords() {
            let m = floor(&c.abs()) + 1;
            if m > big {
                big = m;
            }
        }
    }
    let far = BigInt::from(4) * big + 16;

    for attempt in 0..64u64 {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ DUMMY_SALT.wrapping_mul(attempt + 1));
        let mut candidate = working.clone();
        for i in 0..dummy_count {
            let coord = |rng: &mut ChaCha8Rng, sign: i64| -> Scalar {
                let off: u64 = rng.gen_range(0..1u64 << 40);
                BigRational::from_integer(
                    BigInt::from(sign) * (&far + BigInt::from(off)),
                )
            };
            // Alternate the dummies between the far-below and far-above
            // half-spaces so the z-median stays near the user points.
            let zs = if i % 2 == 0 { 1 } else { -1 };
            let xs = if rng.gen::<bool>() { 1 } else { -1 };
            let ys = if rng.gen::<bool>() { 1 } else { -1 };
            let x = coord(&mut rng, xs);
            let y = coord(&mut rng, ys);
            let z = coord(&mut rng, zs);
            candidate.push(Point3::new(x, y, z));
        }
        if general_position_check(&candidate).is_ok() {
            return Ok(PaddedSet {
                points: candidate,
                original_count: n,
                dummy_count,
                perturbed,
                jitter_bound,
            });
        }
    }
    Err(Error::Internal(
        "exhausted dummy placement attempts without reaching general position".into(),
    ))
}

/// Uniform lattice rational in (-1, 1) with denominator 2^20.
fn lattice_fraction(rng: &mut ChaCha8Rng) -> Scalar {
    let denom = 1i64 << 20;
    let num: i64 = rng.gen_range(-(denom - 1)..denom);
    BigRational::new(BigInt::from(num), BigInt::from(denom))
}

/// Strictly less than half the minimum positive pairwise distance.
fn jitter_magnitude(points: &[Point3]) -> Scalar {
    let mut min_dist: Option<Scalar> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = linf_distance(&points[i], &points[j]);
            if d.is_zero() {
                continue;
            }
            if min_dist.as_ref().map_or(true, |m| &d < m) {
                min_dist = Some(d);
            }
        }
    }
    min_dist.unwrap_or_else(|| int(1)) / int(4)
}

fn linf_distance(a: &Point3, b: &Point3) -> Scalar {
    let dx = (&a.x - &b.x).abs();
    let dy = (&a.y - &b.y).abs();
    let dz = (&a.z - &b.z).abs();
    let m = if dx > dy { dx } else { dy };
    if m > dz {
        m
    } else {
        dz
    }
}

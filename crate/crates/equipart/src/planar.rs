//! Planar subroutines.
//!
//! Two jobs live here: the symbolic cross-section solver that finds the
//! half-line where the two median levels meet as `y -> -infinity`, and a
//! standalone four-partition of a weighted planar point set in which a
//! prescribed direction bisects the angle between the two halving lines.

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::instance::{Color, ColoredInstance, DualPlane};
use crate::scalar::{int, Scalar, Sgn};
use crate::symbolic::SymbolicValue;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::cmp::Ordering;

/// A line `z = slope * x + intercept` in the moving cross-section, with the
/// intercept linear in the slice parameter.
#[derive(Debug, Clone)]
pub struct SliceLine {
    pub slope: Scalar,
    pub intercept: SymbolicValue,
}

impl SliceLine {
    pub fn value_at(&self, x: &SymbolicValue) -> SymbolicValue {
        &(x * &self.slope) + &self.intercept
    }
}

/// Where the increasing red median level meets the decreasing blue one.
#[derive(Debug, Clone)]
pub struct SliceCrossing {
    pub red: usize,
    pub blue: usize,
    pub abscissa: SymbolicValue,
}

fn median_rank(n: usize) -> usize {
    // 1-based rank of the median level among n lines.
    (n + 1) / 2
}

fn level_value(lines: &[SliceLine], rank: usize, x: &SymbolicValue) -> SymbolicValue {
    let mut values: Vec<SymbolicValue> = lines.iter().map(|l| l.value_at(x)).collect();
    values.sort();
    values.swap_remove(rank - 1)
}

/// Finds the unique crossing of the two median levels at the symbolic slice.
///
/// Red slopes must all be positive and blue slopes all negative, so the two
/// levels are strictly increasing/decreasing and cross exactly once. The
/// crossing abscissa is a ratio of symbolic values with constant denominator,
/// hence itself symbolic.
pub fn median_cross_section(
    red: &[SliceLine],
    blue: &[SliceLine],
) -> Result<SliceCrossing> {
    if red.is_empty() || blue.is_empty() {
        return Err(Error::InvalidInput("need at least one line of each color".into()));
    }
    for l in red {
        if !l.slope.is_positive() {
            return Err(Error::InvalidInput("red slice slopes must be positive".into()));
        }
    }
    for l in blue {
        if !l.slope.is_negative() {
            return Err(Error::InvalidInput("blue slice slopes must be negative".into()));
        }
    }
    let red_rank = median_rank(red.len());
    let blue_rank = median_rank(blue.len());

    // Candidate abscissas: all red-blue crossings. The answer is one of them.
    let mut candidates: Vec<SymbolicValue> = Vec::with_capacity(red.len() * blue.len());
    for r in red {
        for b in blue {
            let diff = &b.intercept - &r.intercept;
            candidates.push(&diff / &(&r.slope - &b.slope));
        }
    }
    candidates.sort();
    candidates.dedup();

    let sign_at = |x: &SymbolicValue| -> Ordering {
        level_value(red, red_rank, x).cmp(&level_value(blue, blue_rank, x))
    };

    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    let abscissa = loop {
        if lo > hi {
            return Err(Error::Internal(
                "median levels failed to cross at an enumerated abscissa".into(),
            ));
        }
        let mid = lo + (hi - lo) / 2;
        match sign_at(&candidates[mid]) {
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => {
                if mid == 0 {
                    return Err(Error::Internal(
                        "median level crossing lies before every candidate".into(),
                    ));
                }
                hi = mid - 1;
            }
            Ordering::Equal => break candidates[mid].clone(),
        }
    };

    let level = level_value(red, red_rank, &abscissa);
    let pick = |lines: &[SliceLine]| -> Result<usize> {
        let mut found = None;
        for (i, l) in lines.iter().enumerate() {
            if l.value_at(&abscissa) == level {
                if found.is_some() {
                    return Err(Error::Degenerate(
                        "tie in the symbolic slice; general position violated".into(),
                    ));
                }
                found = Some(i);
            }
        }
        found.ok_or_else(|| Error::Internal("median line vanished at the crossing".into()))
    };
    Ok(SliceCrossing {
        red: pick(red)?,
        blue: pick(blue)?,
        abscissa,
    })
}

/// The `-y`-infinite half-line of the level intersection curve.
#[derive(Debug, Clone)]
pub struct StartEdge {
    /// Index into the instance's red points/planes.
    pub red: usize,
    /// Index into the instance's blue points/planes.
    pub blue: usize,
    /// A concrete point in the interior of the unbounded edge.
    pub point: Point3,
    /// Direction of traversal; the y-component is positive.
    pub direction: [Scalar; 3],
}

pub(crate) fn slice_lines(planes: &[DualPlane]) -> Vec<SliceLine> {
    planes
        .iter()
        .map(|p| SliceLine {
            slope: p.a.clone(),
            intercept: SymbolicValue::new(p.b.clone(), p.c.clone()),
        })
        .collect()
}

/// Computes the red/blue plane pair carrying the `-y`-infinite half-line of
/// the intersection of the two median levels, plus a concrete interior point
/// of that edge obtained by stepping one unit below the lowest arrangement
/// vertex on the carrying line. All decisions are made symbolically.
pub fn start_edge(instance: &ColoredInstance) -> Result<StartEdge> {
    let planes = instance.dual_planes();
    let reds: Vec<&DualPlane> = planes.iter().filter(|p| p.color == Color::Red).collect();
    let blues: Vec<&DualPlane> = planes.iter().filter(|p| p.color == Color::Blue).collect();
    let crossing = median_cross_section(
        &slice_lines(&reds.iter().map(|p| (*p).clone()).collect::<Vec<_>>()),
        &slice_lines(&blues.iter().map(|p| (*p).clone()).collect::<Vec<_>>()),
    )?;
    let r = reds[crossing.red];
    let b = blues[crossing.blue];

    // The intersection line of the two dual planes, parameterized by y = t:
    //   x(t) = alpha t + beta,  z(t) = a_r x(t) + b_r t + c_r.
    let denom = &r.a - &b.a; // positive: red slope > 0 > blue slope
    debug_assert!(denom.is_positive());
    let alpha = (&b.b - &r.b) / &denom;
    let beta = (&b.c - &r.c) / &denom;

    let point_at = |t: &Scalar| -> Point3 {
        let x = &alpha * t + &beta;
        let z = &r.a * &x + &r.b * t + &r.c;
        Point3::new(x, t.clone(), z)
    };

    // First arrangement vertex on the line in increasing y; any point below
    // it is interior to the unbounded edge.
    let mut lowest: Option<Scalar> = None;
    for p in &planes {
        if std::ptr::eq(p, r) || std::ptr::eq(p, b) {
            continue;
        }
        // Height of plane p above the moving point, linear in t.
        let at0 = p.height_above(&point_at(&Scalar::zero()));
        let at1 = p.height_above(&point_at(&Scalar::one()));
        let slope = &at1 - &at0;
        if slope.is_zero() {
            continue;
        }
        let t = -at0 / slope;
        if lowest.as_ref().map_or(true, |cur| &t < cur) {
            lowest = Some(t);
        }
    }
    let t0 = lowest.map_or_else(Scalar::zero, |t| t - int(1));
    let z_dir = &r.a * &alpha + &r.b;
    Ok(StartEdge {
        red: crossing.red,
        blue: crossing.blue,
        point: point_at(&t0),
        direction: [alpha, Scalar::one(), z_dir],
    })
}

// ---------------------------------------------------------------------------
// Planar four-partition with a prescribed angle bisector.
// ---------------------------------------------------------------------------

/// A weighted point in the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPoint2 {
    pub x: Scalar,
    pub y: Scalar,
    pub weight: Scalar,
}

impl WeightedPoint2 {
    pub fn new(x: Scalar, y: Scalar, weight: Scalar) -> Result<Self> {
        if !weight.is_positive() {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(WeightedPoint2 { x, y, weight })
    }

    pub fn unit(x: Scalar, y: Scalar) -> Self {
        WeightedPoint2 {
            x,
            y,
            weight: Scalar::one(),
        }
    }
}

/// An oriented line `{ p : <p, normal> = offset }`; the normal side is
/// positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedLine2 {
    pub normal: [Scalar; 2],
    pub offset: Scalar,
}

impl OrientedLine2 {
    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Scalar {
        &self.normal[0] * x + &self.normal[1] * y - &self.offset
    }

    pub fn side(&self, x: &Scalar, y: &Scalar) -> Sgn {
        Sgn::of(&self.eval(x, y))
    }

    /// Primitive-integer, orientation-preserving representative.
    pub fn normalized(&self) -> OrientedLine2 {
        let l = crate::scalar::denominator_lcm(
            self.normal.iter().chain(std::iter::once(&self.offset)),
        );
        let ints: Vec<BigInt> = self
            .normal
            .iter()
            .chain(std::iter::once(&self.offset))
            .map(|q| (q * BigRational::from_integer(l.clone())).numer().clone())
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num::Integer::gcd(&g, v);
        }
        if g.is_zero() {
            g = BigInt::one();
        }
        OrientedLine2 {
            normal: [
                BigRational::from_integer(&ints[0] / &g),
                BigRational::from_integer(&ints[1] / &g),
            ],
            offset: BigRational::from_integer(&ints[2] / &g),
        }
    }
}

/// Result of the prescribed-bisector four-partition.
///
/// Quadrants are indexed `[N, E, S, W]` where N is the positive side of both
/// lines, E is positive for `line1` only at small opening angles... concretely
/// N = (+,+), W = (+,-), E = (-,+), S = (-,-) in (line1, line2) sign order.
#[derive(Debug, Clone)]
pub struct FourPartition {
    pub line1: OrientedLine2,
    pub line2: OrientedLine2,
    /// Direction of `line1`: the first line direction clockwise from `v`.
    pub dir1: [Scalar; 2],
    /// Direction of `line2`: the first line direction counterclockwise.
    pub dir2: [Scalar; 2],
    /// Open-quadrant weights `[N, E, S, W]`.
    pub quadrants: [Scalar; 4],
    /// Total weight sitting on either line.
    pub on_lines: Scalar,
}

/// Diagnostic trail of the sweep, for verification.
#[derive(Debug, Clone)]
pub struct SweepDiagnostics {
    /// Sign of (N + S) - (E + W) at every swept candidate, in sweep order.
    pub balance_signs: Vec<i8>,
    /// Index of the candidate that was returned.
    pub chosen: usize,
}

#[derive(Clone)]
struct IPoint2 {
    x: i128,
    y: i128,
    weight: Scalar,
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn primitive(v: [i128; 2]) -> [i128; 2] {
    let g = gcd128(v[0], v[1]);
    if g == 0 {
        v
    } else {
        [v[0] / g, v[1] / g]
    }
}

fn cross(a: [i128; 2], b: [i128; 2]) -> i128 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [i128; 2], b: [i128; 2]) -> i128 {
    a[0] * b[0] + a[1] * b[1]
}

fn rot90(v: [i128; 2]) -> [i128; 2] {
    [-v[1], v[0]]
}

/// Reflection of `u` across the axis spanned by `v`, scaled positive.
fn reflect(u: [i128; 2], v: [i128; 2]) -> [i128; 2] {
    let s = dot(u, v);
    let n = dot(v, v);
    primitive([2 * s * v[0] - n * u[0], 2 * s * v[1] - n * u[1]])
}

/// Four-partition of positively weighted planar points such that `v` exactly
/// bisects the angle between the two returned halving lines.
///
/// The sweep walks the quarter turn of normal directions, evaluating the
/// finitely many combinatorially distinct configurations, and returns the
/// first (smallest opening angle) candidate whose open quadrants all carry at
/// most `W/4 + max single weight` (tightened by the on-line mass at that
/// candidate). Each line's open sides carry at most `W/2` by construction.
pub fn four_partition_with_bisector(
    points: &[WeightedPoint2],
    v: &[Scalar; 2],
) -> Result<FourPartition> {
    four_partition_sweep(points, v).map(|(fp, _)| fp)
}

/// Same as [`four_partition_with_bisector`] but also returns the sweep trail.
pub fn four_partition_sweep(
    points: &[WeightedPoint2],
    v: &[Scalar; 2],
) -> Result<(FourPartition, SweepDiagnostics)> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one weighted point".into()));
    }
    for p in points {
        if !p.weight.is_positive() {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
    }
    if v[0].is_zero() && v[1].is_zero() {
        return Err(Error::InvalidInput("bisector direction must be nonzero".into()));
    }

    // Integerize coordinates (common positive scale, recorded for the output
    // offsets) and the direction.
    let scale = crate::scalar::denominator_lcm(points.iter().flat_map(|p| [&p.x, &p.y]));
    let sq = BigRational::from_integer(scale.clone());
    let ipts: Vec<IPoint2> = points
        .iter()
        .map(|p| {
            let xi = (&p.x * &sq).numer().clone();
            let yi = (&p.y * &sq).numer().clone();
            Ok(IPoint2 {
                x: i128::try_from(&xi).map_err(|_| too_big())?,
                y: i128::try_from(&yi).map_err(|_| too_big())?,
                weight: p.weight.clone(),
            })
        })
        .collect::<Result<_>>()?;
    let vl = crate::scalar::denominator_lcm(v.iter());
    let vq = BigRational::from_integer(vl);
    let vi = primitive([
        i128::try_from((&v[0] * &vq).numer()).map_err(|_| too_big())?,
        i128::try_from((&v[1] * &vq).numer()).map_err(|_| too_big())?,
    ]);

    let total: Scalar = points.iter().map(|p| p.weight.clone()).sum();
    let wmax = points
        .iter()
        .map(|p| p.weight.clone())
        .max()
        .expect("nonempty");

    let candidates = sweep_candidates(&ipts, vi);
    let mut signs = Vec::with_capacity(candidates.len());
    let mut evals: Vec<Evaluation> = Vec::with_capacity(candidates.len());
    for u in &candidates {
        let ev = evaluate_candidate(&ipts, *u, vi, &total);
        signs.push(balance_sign(&ev));
        evals.push(ev);
    }
    if !evals.iter().any(|ev| quadrants_ok(ev, &total, &wmax)) {
        // Rare fallback: refine every interval where the balance changes
        // sign with the configurations anchored inside it.
        for w in 0..candidates.len() - 1 {
            if signs[w] == signs[w + 1] {
                continue;
            }
            for u in refine_candidates(&ipts, vi, candidates[w], candidates[w + 1]) {
                let ev = evaluate_candidate(&ipts, u, vi, &total);
                signs.push(balance_sign(&ev));
                evals.push(ev);
            }
        }
    }
    // Deterministic pick that commutes with quarter-turn rotations of `v`
    // (which reverse the sweep): the most balanced admissible candidate.
    let chosen_idx = evals
        .iter()
        .enumerate()
        .filter(|(_, ev)| quadrants_ok(ev, &total, &wmax))
        .min_by(|(ia, a), (ib, b)| selection_key(a).cmp(&selection_key(b)).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Internal("no admissible four-partition candidate found".into()))?;
    let ev = evals[chosen_idx].clone();

    // Map the integer-frame lines back to the input frame: coordinates were
    // scaled by `scale`, so offsets divide by it.
    let descale = BigRational::from_integer(scale);
    let line = |normal: [i128; 2], offset2: i128| -> OrientedLine2 {
        OrientedLine2 {
            normal: [
                BigRational::from_integer(BigInt::from(normal[0])),
                BigRational::from_integer(BigInt::from(normal[1])),
            ],
            offset: BigRational::new(BigInt::from(offset2), BigInt::from(2)) / &descale,
        }
        .normalized()
    };
    let l1 = line(ev.u, ev.c1_twice);
    let l2 = line(ev.w, ev.c2_twice);
    // line1 runs along u rotated -90 (the first direction clockwise from v),
    // line2 along w rotated +90 (the first counterclockwise).
    let d1 = primitive([ev.u[1], -ev.u[0]]);
    let d2 = primitive(rot90(ev.w));
    let as_dir = |d: [i128; 2]| -> [Scalar; 2] {
        [
            BigRational::from_integer(BigInt::from(d[0])),
            BigRational::from_integer(BigInt::from(d[1])),
        ]
    };
    Ok((
        FourPartition {
            line1: l1,
            line2: l2,
            dir1: as_dir(d1),
            dir2: as_dir(d2),
            quadrants: ev.quadrants.clone(),
            on_lines: ev.on_lines.clone(),
        },
        SweepDiagnostics {
            balance_signs: signs,
            chosen: chosen_idx,
        },
    ))
}

fn too_big() -> Error {
    Error::InvalidInput("planar coordinates exceed the supported integer range".into())
}

/// All coarse sweep candidates in angular order: the sector endpoints, every
/// direction critical for either line family, and a sample inside every gap.
fn sweep_candidates(points: &[IPoint2], v: [i128; 2]) -> Vec<[i128; 2]> {
    let u_start = v;
    let u_end = rot90(v);
    let in_sector = |u: [i128; 2]| -> bool {
        cross(u_start, u) >= 0
            && cross(u, u_end) >= 0
            && (dot(u, u_start) > 0 || dot(u, u_end) > 0)
    };
    let mut criticals: Vec<[i128; 2]> = Vec::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let delta = [points[i].x - points[j].x, points[i].y - points[j].y];
            if delta == [0, 0] {
                continue;
            }
            let c = primitive(rot90(delta));
            if in_sector(c) {
                criticals.push(c);
            }
            // Critical for the reflected family: w || rot90(delta).
            let r = reflect(c, v);
            if in_sector(r) {
                criticals.push(r);
            }
        }
    }
    // `cross(a,b) > 0` means a is clockwise of b within the sector, i.e. a
    // comes first in the sweep from u_start towards u_end.
    criticals.sort_by(|a, b| {
        let c = cross(*a, *b);
        if c > 0 {
            Ordering::Less
        } else if c < 0 {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    criticals.dedup();
    criticals.retain(|&c| c != primitive(u_start) && c != primitive(u_end));

    let mut out = Vec::with_capacity(2 * criticals.len() + 3);
    let mut prev = primitive(u_start);
    out.push(prev);
    for c in criticals {
        let mid = primitive([prev[0] + c[0], prev[1] + c[1]]);
        if mid != prev && mid != c {
            out.push(mid);
        }
        out.push(c);
        prev = c;
    }
    let endp = primitive(u_end);
    let mid = primitive([prev[0] + endp[0], prev[1] + endp[1]]);
    if mid != prev && mid != endp {
        out.push(mid);
    }
    out.push(endp);
    out
}

#[derive(Debug, Clone)]
struct Evaluation {
    u: [i128; 2],
    w: [i128; 2],
    /// Twice the line offsets in the integer frame (offsets can be
    /// half-integral when chosen inside an open gap).
    c1_twice: i128,
    c2_twice: i128,
    quadrants: [Scalar; 4],
    on_lines: Scalar,
}

/// Twice the halving offset along `normal`: the closed interval of valid
/// offsets is computed from the weighted projections and its midpoint is
/// taken, which keeps the line off the points whenever possible.
fn halving_offset_twice(points: &[IPoint2], normal: [i128; 2], total: &Scalar) -> i128 {
    let mut proj: Vec<(i128, &Scalar)> = points
        .iter()
        .map(|p| (normal[0] * p.x + normal[1] * p.y, &p.weight))
        .collect();
    proj.sort_by_key(|e| e.0);
    let half = total / int(2);
    // Lowest valid value: smallest s with weight(> s) <= W/2.
    let mut above = total.clone();
    let mut lo = proj[0].0;
    let mut i = 0;
    while i < proj.len() {
        let s = proj[i].0;
        let mut group = Scalar::zero();
        while i < proj.len() && proj[i].0 == s {
            group += proj[i].1;
            i += 1;
        }
        above -= group;
        if above <= half {
            lo = s;
            break;
        }
    }
    // Highest valid value: largest s with weight(< s) <= W/2.
    let mut below = total.clone();
    let mut hi = proj[proj.len() - 1].0;
    let mut i = proj.len();
    while i > 0 {
        let s = proj[i - 1].0;
        let mut group = Scalar::zero();
        while i > 0 && proj[i - 1].0 == s {
            group += proj[i - 1].1;
            i -= 1;
        }
        below -= group;
        if below <= half {
            hi = s;
            break;
        }
    }
    debug_assert!(lo <= hi);
    lo + hi
}

fn evaluate_candidate(
    points: &[IPoint2],
    u: [i128; 2],
    v: [i128; 2],
    total: &Scalar,
) -> Evaluation {
    let w = reflect(u, v);
    let c1 = halving_offset_twice(points, u, total);
    let c2 = halving_offset_twice(points, w, total);
    let mut quadrants = [
        Scalar::zero(),
        Scalar::zero(),
        Scalar::zero(),
        Scalar::zero(),
    ];
    let mut on_lines = Scalar::zero();
    for p in points {
        let s1 = (2 * (u[0] * p.x + u[1] * p.y) - c1).signum();
        let s2 = (2 * (w[0] * p.x + w[1] * p.y) - c2).signum();
        if s1 == 0 || s2 == 0 {
            on_lines += &p.weight;
            continue;
        }
        let q = match (s1 > 0, s2 > 0) {
            (true, true) => 0,   // N
            (false, true) => 1,  // E
            (false, false) => 2, // S
            (true, false) => 3,  // W
        };
        quadrants[q] += &p.weight;
    }
    Evaluation {
        u,
        w,
        c1_twice: c1,
        c2_twice: c2,
        quadrants,
        on_lines,
    }
}

fn balance_sign(ev: &Evaluation) -> i8 {
    let x = &ev.quadrants[0] + &ev.quadrants[2];
    let y = &ev.quadrants[1] + &ev.quadrants[3];
    match x.cmp(&y) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn quadrants_ok(ev: &Evaluation, total: &Scalar, wmax: &Scalar) -> bool {
    // The intermediate-value candidates satisfy the strict bound
    // quadrant < (W + on + 2 wmax)/4, which for unit weights is the
    // ceil(count/4) guarantee; the documented contract adds
    // quadrant <= W/4 + wmax.
    let loose = total / int(4) + wmax;
    let tight = (total + &ev.on_lines + int(2) * wmax) / int(4);
    ev.quadrants.iter().all(|q| q <= &loose && q < &tight)
}

/// Rotation-invariant ordering of admissible candidates: smallest maximal
/// quadrant first, then the most balanced north-south versus east-west
/// split, then the least on-line mass, and finally the canonical form of the
/// unordered line pair. Quarter-turn rotations of `v` permute quadrant
/// labels and swap the lines, leaving every component unchanged, so ties
/// never depend on the sweep direction.
fn selection_key(ev: &Evaluation) -> (Scalar, Scalar, Scalar, [[i128; 3]; 2]) {
    let max_q = ev
        .quadrants
        .iter()
        .cloned()
        .max()
        .expect("four quadrants");
    let x = &ev.quadrants[0] + &ev.quadrants[2];
    let y = &ev.quadrants[1] + &ev.quadrants[3];
    let d = if x >= y { &x - &y } else { &y - &x };
    let mut lines = [
        canonical_line(ev.u, ev.c1_twice),
        canonical_line(ev.w, ev.c2_twice),
    ];
    lines.sort();
    (max_q, d, ev.on_lines.clone(), lines)
}

/// Sign- and scale-free representative of the support of
/// `{p : 2 <p, normal> = offset2}`.
fn canonical_line(normal: [i128; 2], offset2: i128) -> [i128; 3] {
    let mut t = [2 * normal[0], 2 * normal[1], offset2];
    let mut g = gcd128(gcd128(t[0], t[1]), t[2]);
    if g == 0 {
        g = 1;
    }
    for v in &mut t {
        *v /= g;
    }
    if let Some(first) = t.iter().find(|v| **v != 0) {
        if *first < 0 {
            for v in &mut t {
                *v = -*v;
            }
        }
    }
    t
}

/// Fine candidates strictly inside one coarse interval: directions at which
/// a point crosses one of the (fixed-anchor) rotating lines.
fn refine_candidates(
    points: &[IPoint2],
    v: [i128; 2],
    a: [i128; 2],
    b: [i128; 2],
) -> Vec<[i128; 2]> {
    let inside =
        |u: [i128; 2]| -> bool { cross(a, u) > 0 && cross(u, b) > 0 };
    let sample = primitive([a[0] + b[0], a[1] + b[1]]);
    let mut anchors: Vec<[i128; 2]> = Vec::new();
    // Anchor = doubled midpoint of the valid offset interval along each
    // normal, expressed as a point: events happen when u is perpendicular to
    // (2 p - anchor_pair_sum).
    for normal in [sample, reflect(sample, v)] {
        let mut proj: Vec<(i128, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (normal[0] * p.x + normal[1] * p.y, i))
            .collect();
        proj.sort();
        // Use every adjacent pair bracketing the middle as anchor sources.
        for win in proj.windows(2) {
            let (i, j) = (win[0].1, win[1].1);
            anchors.push([points[i].x + points[j].x, points[i].y + points[j].y]);
        }
        for &(_, i) in &proj {
            anchors.push([2 * points[i].x, 2 * points[i].y]);
        }
    }
    let mut out = Vec::new();
    for p in points {
        for anc in &anchors {
            let delta = [2 * p.x - anc[0], 2 * p.y - anc[1]];
            if delta == [0, 0] {
                continue;
            }
            for cand in [primitive(rot90(delta)), reflect(primitive(rot90(delta)), v)] {
                if inside(cand) {
                    out.push(cand);
                }
            }
        }
    }
    out.sort_by(|x, y| {
        let c = cross(*x, *y);
        if c > 0 {
            Ordering::Less
        } else if c < 0 {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    out.dedup();
    // Interleave gap samples.
    let mut all = Vec::with_capacity(2 * out.len() + 1);
    let mut prev = a;
    for c in out {
        let mid = primitive([prev[0] + c[0], prev[1] + c[1]]);
        if inside(mid) {
            all.push(mid);
        }
        all.push(c);
        prev = c;
    }
    let mid = primitive([prev[0] + b[0], prev[1] + b[1]]);
    if inside(mid) {
        all.push(mid);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn sym(s: i64, c: i64) -> SymbolicValue {
        SymbolicValue::new(int(s), int(c))
    }

    fn line(slope: i64, b: i64, c: i64) -> SliceLine {
        SliceLine {
            slope: int(slope),
            intercept: sym(b, c),
        }
    }

    #[test]
    fn singleton_families_cross_at_their_intersection() {
        // z = x and z = -x: crossing at x = 0.
        let red = [line(1, 0, 0)];
        let blue = [line(-1, 0, 0)];
        let c = median_cross_section(&red, &blue).unwrap();
        assert_eq!((c.red, c.blue), (0, 0));
        assert_eq!(c.abscissa, SymbolicValue::zero());
    }

    #[test]
    fn three_by_three_matches_concrete_substitution() {
        let red = [line(1, 2, 0), line(2, -1, 3), line(3, 1, -2)];
        let blue = [line(-1, 1, 1), line(-2, 3, 0), line(-3, -2, 2)];
        let c = median_cross_section(&red, &blue).unwrap();

        // Oracle: substitute a concrete very negative d and solve by brute
        // force over all red-blue crossings of the concrete lines.
        let d = int(-1_000_000);
        let conc = |l: &SliceLine| (l.slope.clone(), l.intercept.eval(&d));
        let reds: Vec<_> = red.iter().map(conc).collect();
        let blues: Vec<_> = blue.iter().map(conc).collect();
        let mut found = None;
        for (i, r) in reds.iter().enumerate() {
            for (j, b) in blues.iter().enumerate() {
                let x = (&b.1 - &r.1) / (&r.0 - &b.0);
                let val = |l: &(Scalar, Scalar)| &l.0 * &x + &l.1;
                let mut rv: Vec<Scalar> = reds.iter().map(val).collect();
                let mut bv: Vec<Scalar> = blues.iter().map(val).collect();
                rv.sort();
                bv.sort();
                if rv[1] == val(r) && bv[1] == val(b) && val(r) == val(b) {
                    found = Some((i, j, x));
                }
            }
        }
        let (i, j, x) = found.expect("concrete crossing exists");
        assert_eq!((c.red, c.blue), (i, j));
        assert_eq!(c.abscissa.eval(&d), x);
    }

    #[test]
    fn constant_shift_keeps_the_pair() {
        let red = [line(1, 2, 0), line(2, -1, 3), line(3, 1, -2)];
        let blue = [line(-1, 1, 1), line(-2, 3, 0), line(-3, -2, 2)];
        let base = median_cross_section(&red, &blue).unwrap();
        // Shift all blue constants by a small c; slope-decided comparisons
        // ignore bounded constant shifts, so the pair is unchanged.
        let shifted: Vec<SliceLine> = blue
            .iter()
            .map(|l| SliceLine {
                slope: l.slope.clone(),
                intercept: SymbolicValue::new(
                    l.intercept.slope.clone(),
                    &l.intercept.constant + ratio(1, 7),
                ),
            })
            .collect();
        let moved = median_cross_section(&red, &shifted).unwrap();
        assert_eq!((base.red, base.blue), (moved.red, moved.blue));
        assert_ne!(base.abscissa, moved.abscissa);
    }

    fn upts(coords: &[(i64, i64)]) -> Vec<WeightedPoint2> {
        coords
            .iter()
            .map(|&(x, y)| WeightedPoint2::unit(int(x), int(y)))
            .collect()
    }

    #[test]
    fn symmetric_square_opens_to_the_diagonals() {
        let pts = upts(&[(1, 1), (-1, 1), (1, -1), (-1, -1)]);
        let v = [int(0), int(1)];
        let fp = four_partition_with_bisector(&pts, &v).unwrap();
        for q in &fp.quadrants {
            assert!(*q <= int(1));
        }
        // v bisects the angle: reflecting dir1 across v gives -dir2 or dir2.
        let refl = [-fp.dir1[0].clone(), fp.dir1[1].clone()];
        let c = &refl[0] * &fp.dir2[1] - &refl[1] * &fp.dir2[0];
        assert!(c.is_zero());
        // The diagonal lines pass through the corner points.
        let on: usize = pts
            .iter()
            .filter(|p| {
                fp.line1.side(&p.x, &p.y) == Sgn::Zero || fp.line2.side(&p.x, &p.y) == Sgn::Zero
            })
            .count();
        assert_eq!(on, 4);
    }

    #[test]
    fn single_point_all_quadrants_empty() {
        let pts = upts(&[(3, 7)]);
        let v = [int(1), int(2)];
        let fp = four_partition_with_bisector(&pts, &v).unwrap();
        for q in &fp.quadrants {
            assert!(q.is_zero());
        }
        assert_eq!(fp.line1.side(&int(3), &int(7)), Sgn::Zero);
        assert_eq!(fp.line2.side(&int(3), &int(7)), Sgn::Zero);
    }

    #[test]
    fn zero_total_weight_is_rejected() {
        assert!(four_partition_with_bisector(&[], &[int(0), int(1)]).is_err());
        assert!(WeightedPoint2::new(int(0), int(0), int(0)).is_err());
    }

    #[test]
    fn sixteen_random_points_quarter_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let pts: Vec<WeightedPoint2> = (0..16)
            .map(|_| {
                WeightedPoint2::unit(
                    int(rng.gen_range(-1000..1000)),
                    int(rng.gen_range(-1000..1000)),
                )
            })
            .collect();
        let v = [int(0), int(1)];
        let (fp, diag) = four_partition_sweep(&pts, &v).unwrap();
        for q in &fp.quadrants {
            assert!(*q <= int(4), "open quadrant exceeded n/4: {q}");
        }
        // Halving: each open side of each line carries at most 8.
        for line in [&fp.line1, &fp.line2] {
            let mut pos = 0;
            let mut neg = 0;
            for p in &pts {
                match line.side(&p.x, &p.y) {
                    Sgn::Pos => pos += 1,
                    Sgn::Neg => neg += 1,
                    Sgn::Zero => {}
                }
            }
            assert!(pos <= 8 && neg <= 8);
        }
        // The balance x - y changes sign exactly once on this generic
        // instance, and the chosen candidate sits in the sign-change window.
        let nonzero: Vec<i8> = diag
            .balance_signs
            .iter()
            .copied()
            .filter(|&s| s != 0)
            .collect();
        let changes = nonzero.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 1);
        let first_neg = diag
            .balance_signs
            .iter()
            .position(|&s| s < 0)
            .expect("sign change exists");
        let last_pos = diag
            .balance_signs
            .iter()
            .rposition(|&s| s > 0)
            .expect("positive start");
        assert!(
            diag.chosen + 2 >= first_neg.min(last_pos) && diag.chosen <= first_neg.max(last_pos) + 2,
            "chosen {} outside sign-change window [{}, {}]",
            diag.chosen,
            first_neg.min(last_pos),
            first_neg.max(last_pos)
        );
    }

    #[test]
    fn rotation_action_swaps_the_lines() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<WeightedPoint2> = (0..13)
            .map(|_| {
                WeightedPoint2::unit(
                    int(rng.gen_range(-500..500)),
                    int(rng.gen_range(-500..500)),
                )
            })
            .collect();
        let v = [int(0), int(1)];
        let gv = [int(-1), int(0)]; // v rotated 90 degrees counterclockwise
        let base = four_partition_with_bisector(&pts, &v).unwrap();
        let turned = four_partition_with_bisector(&pts, &gv).unwrap();
        // l1(g v) = l2(v): same support, same direction.
        assert_lines_equal_directed(&turned.line1, &turned.dir1, &base.line2, &base.dir2);
        // l2(g v) = -l1(v): same support, opposite direction.
        let neg = [-base.dir1[0].clone(), -base.dir1[1].clone()];
        assert_lines_equal_directed(&turned.line2, &turned.dir2, &base.line1, &neg);
    }

    fn assert_lines_equal_directed(
        a: &OrientedLine2,
        da: &[Scalar; 2],
        b: &OrientedLine2,
        db: &[Scalar; 2],
    ) {
        let an = a.normalized();
        let bn = b.normalized();
        let same = an == bn
            || an
                == OrientedLine2 {
                    normal: [-bn.normal[0].clone(), -bn.normal[1].clone()],
                    offset: -bn.offset.clone(),
                };
        assert!(same, "line supports differ: {an:?} vs {bn:?}");
        let c = &da[0] * &db[1] - &da[1] * &db[0];
        let d = &da[0] * &db[0] + &da[1] * &db[1];
        assert!(c.is_zero() && d.is_positive(), "directions differ");
    }
}

//! Brute-force oracles: an independent reconstruction of the level
//! intersection curve, the exhaustive zero-pair sweep, the exhaustive
//! triple search for small inputs, and a concrete-slice solver. These take
//! routes disjoint from the production code paths so the two can check each
//! other.

use crate::error::{Error, Result};
use crate::geom::{OrientedPlane, Point3};
use crate::instance::{Color, ColoredInstance, DualPlane};
use crate::levels::LevelCurve;
use crate::partition::{verify, PartitionReport};
use crate::scalar::{Scalar, Sgn};
use crate::search::{xy, XYPair};
use num::{One, Zero};

/// Visits every ordered element pair `(i, j)` with its `(X, Y)` value using
/// one full evaluation per row and constant work per step.
pub fn scan_pairs(curve: &LevelCurve, mut visit: impl FnMut(usize, usize, XYPair)) {
    let m = curve.m();
    for i in 0..m {
        let mut cur = xy(curve, i, 0);
        visit(i, 0, cur);
        for j in 1..m {
            let t = curve.transitions[j - 1];
            let (sign_from, sign_to) = if (j - 1) % 2 == 0 {
                (t.edge_sign, 0)
            } else {
                (0, t.edge_sign)
            };
            let other = curve.sign_of(i, t.plane) as i64;
            let delta = other * (sign_to - sign_from) as i64;
            match t.plane.color {
                Color::Red => cur.x += delta,
                Color::Blue => cur.y += delta,
            }
            visit(i, j, cur);
        }
    }
}

/// All element pairs `i < j` with `X = Y = 0`, by exhaustive sweep.
pub fn oracle_pairs(curve: &LevelCurve) -> Vec<(usize, usize)> {
    let mut zeros = Vec::new();
    scan_pairs(curve, |i, j, v| {
        if i < j && v.is_zero() {
            zeros.push((i, j));
        }
    });
    zeros
}

/// Rebuilds the intersection curve of the two median levels directly from
/// the arrangement: for every red-blue plane pair, every interval of their
/// intersection line between consecutive crossings with other planes is
/// classified by brute force, and the qualifying intervals are chained by
/// their endpoints. Returns the ordered edge pair sequence and the vertex
/// positions between them.
pub fn brute_force_curve(
    instance: &ColoredInstance,
) -> Result<(Vec<(usize, usize)>, Vec<Point3>)> {
    let planes = instance.dual_planes();
    let reds: Vec<&DualPlane> = planes.iter().filter(|p| p.color == Color::Red).collect();
    let blues: Vec<&DualPlane> = planes.iter().filter(|p| p.color == Color::Blue).collect();
    let k = instance.k;

    struct Piece {
        lower: Option<Scalar>,
        upper: Option<Scalar>,
        red: usize,
        blue: usize,
    }
    let mut pieces: Vec<Piece> = Vec::new();

    for (ri, r) in reds.iter().enumerate() {
        for (bi, b) in blues.iter().enumerate() {
            let denom = &r.a - &b.a;
            let alpha = (&b.b - &r.b) / &denom;
            let beta = (&b.c - &r.c) / &denom;
            let point_at = |t: &Scalar| -> Point3 {
                let x = &alpha * t + &beta;
                let z = &r.a * &x + &r.b * t + &r.c;
                Point3::new(x, t.clone(), z)
            };
            let mut crossings: Vec<Scalar> = Vec::new();
            for p in &planes {
                if std::ptr::eq(p, *r) || std::ptr::eq(p, *b) {
                    continue;
                }
                let h0 = p.height_above(&point_at(&Scalar::zero()));
                let h1 = p.height_above(&point_at(&Scalar::one()));
                let slope = &h1 - &h0;
                if slope.is_zero() {
                    continue;
                }
                crossings.push(-h0 / slope);
            }
            crossings.sort();
            crossings.dedup();
            let mut sample_ts: Vec<(Option<Scalar>, Option<Scalar>, Scalar)> = Vec::new();
            if crossings.is_empty() {
                sample_ts.push((None, None, Scalar::zero()));
            } else {
                sample_ts.push((
                    None,
                    Some(crossings[0].clone()),
                    &crossings[0] - Scalar::one(),
                ));
                for w in crossings.windows(2) {
                    sample_ts.push((
                        Some(w[0].clone()),
                        Some(w[1].clone()),
                        (&w[0] + &w[1]) / crate::scalar::int(2),
                    ));
                }
                let last = crossings.last().unwrap();
                sample_ts.push((Some(last.clone()), None, last + Scalar::one()));
            }
            for (lower, upper, t) in sample_ts {
                let p = point_at(&t);
                let below = |family: &[&DualPlane]| {
                    family
                        .iter()
                        .filter(|pl| pl.side_of(&p) == Sgn::Neg)
                        .count()
                };
                let on = |family: &[&DualPlane]| {
                    family
                        .iter()
                        .filter(|pl| pl.side_of(&p) == Sgn::Zero)
                        .count()
                };
                if below(&reds) == 2 * k + 1
                    && below(&blues) == 2 * k + 1
                    && on(&reds) == 1
                    && on(&blues) == 1
                {
                    pieces.push(Piece {
                        lower,
                        upper,
                        red: ri,
                        blue: bi,
                    });
                }
            }
        }
    }

    // Chain the qualifying intervals by y; the curve is a single
    // y-monotone bi-infinite path, so the pieces must tile.
    pieces.sort_by(|a, b| match (&a.lower, &b.lower) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    });
    if pieces.is_empty() {
        return Err(Error::Internal("no level-intersection edges found".into()));
    }
    let mut edges = Vec::with_capacity(pieces.len());
    let mut vertices = Vec::with_capacity(pieces.len().saturating_sub(1));
    for (idx, piece) in pieces.iter().enumerate() {
        edges.push((piece.red, piece.blue));
        match (&piece.upper, pieces.get(idx + 1)) {
            (Some(t), Some(next)) => {
                if next.lower.as_ref() != Some(t) {
                    return Err(Error::Internal(
                        "level-intersection pieces do not chain".into(),
                    ));
                }
                let r = reds[piece.red];
                let b = blues[piece.blue];
                let denom = &r.a - &b.a;
                let alpha = (&b.b - &r.b) / &denom;
                let beta = (&b.c - &r.c) / &denom;
                let x = &alpha * t + &beta;
                let z = &r.a * &x + &r.b * t + &r.c;
                vertices.push(Point3::new(x, t.clone(), z));
            }
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => {
                return Err(Error::Internal(
                    "level-intersection pieces do not terminate correctly".into(),
                ));
            }
        }
    }
    Ok((edges, vertices))
}

/// The smallest y-coordinate over all vertices of the full dual arrangement,
/// or `None` when there are none. Any slice strictly below it crosses only
/// edges, which certifies concrete-slice comparisons.
pub fn min_arrangement_vertex_y(instance: &ColoredInstance) -> Option<Scalar> {
    let planes = instance.dual_planes();
    let n = planes.len();
    let mut best: Option<Scalar> = None;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                // Solve a x + b y - z = -c for the three planes.
                let (p, q, r) = (&planes[i], &planes[j], &planes[l]);
                let det = det3(
                    [&p.a, &p.b, &-Scalar::one()],
                    [&q.a, &q.b, &-Scalar::one()],
                    [&r.a, &r.b, &-Scalar::one()],
                );
                if det.is_zero() {
                    continue;
                }
                let y = det3(
                    [&p.a, &-p.c.clone(), &-Scalar::one()],
                    [&q.a, &-q.c.clone(), &-Scalar::one()],
                    [&r.a, &-r.c.clone(), &-Scalar::one()],
                ) / &det;
                if best.as_ref().map_or(true, |cur| &y < cur) {
                    best = Some(y);
                }
            }
        }
    }
    best
}

fn det3(r0: [&Scalar; 3], r1: [&Scalar; 3], r2: [&Scalar; 3]) -> Scalar {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// Brute-force crossing of the two median levels in the concrete vertical
/// slice `y = d`: enumerates every red-blue crossing and tests median-level
/// membership directly.
pub fn slice_crossing_concrete(
    instance: &ColoredInstance,
    d: &Scalar,
) -> Result<(usize, usize)> {
    let planes = instance.dual_planes();
    let lines = |color: Color| -> Vec<(Scalar, Scalar)> {
        planes
            .iter()
            .filter(|p| p.color == color)
            .map(|p| (p.a.clone(), &p.b * d + &p.c))
            .collect()
    };
    let reds = lines(Color::Red);
    let blues = lines(Color::Blue);
    let below_rank = |fam: &[(Scalar, Scalar)], x: &Scalar, z: &Scalar| -> (usize, usize) {
        let mut below = 0;
        let mut on = 0;
        for (a, c) in fam {
            let v = a * x + c;
            match v.cmp(z) {
                std::cmp::Ordering::Less => below += 1,
                std::cmp::Ordering::Equal => on += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
        (below, on)
    };
    let k = instance.k;
    let mut found = None;
    for (i, r) in reds.iter().enumerate() {
        for (j, b) in blues.iter().enumerate() {
            let x = (&b.1 - &r.1) / (&r.0 - &b.0);
            let z = &r.0 * &x + &r.1;
            let (rb, ron) = below_rank(&reds, &x, &z);
            let (bb, bon) = below_rank(&blues, &x, &z);
            if rb == 2 * k + 1 && bb == 2 * k + 1 && ron == 1 && bon == 1 {
                if found.is_some() {
                    return Err(Error::Degenerate(
                        "multiple median crossings in the concrete slice".into(),
                    ));
                }
                found = Some((i, j));
            }
        }
    }
    found.ok_or_else(|| Error::Internal("no median crossing in the concrete slice".into()))
}

/// Output of the exhaustive small-input search.
#[derive(Debug, Clone)]
pub struct TripleOracle {
    pub planes: [OrientedPlane; 3],
    pub report: PartitionReport,
}

struct Candidate {
    plane: OrientedPlane,
    above: u32,
    below: u32,
}

/// Exhaustive eight-partition search for `|P| <= 31`: the first plane is
/// horizontal through the z-median point (exactly as the main pipeline with
/// the default direction), the other two run over all planes through three
/// points that bisect both colors. Inputs of at most seven points get the
/// same put-everything-on-the-planes construction the pipeline uses.
pub fn oracle_triples(points: &[Point3]) -> Result<TripleOracle> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    if n > 31 {
        return Err(Error::InvalidInput(format!(
            "exhaustive oracle is capped at 31 points, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .z
            .cmp(&points[j].z)
            .then_with(|| points[i].x.cmp(&points[j].x))
            .then_with(|| points[i].y.cmp(&points[j].y))
    });
    let median = order[(n + 1) / 2 - 1];
    let z_med = points[median].z.clone();
    let h1 = OrientedPlane::horizontal(z_med.clone());

    if n <= 7 {
        let rest: Vec<usize> = order.iter().copied().filter(|&i| i != median).collect();
        let first: Vec<&Point3> = rest.iter().take(3).map(|&i| &points[i]).collect();
        let second: Vec<&Point3> = rest.iter().skip(3).map(|&i| &points[i]).collect();
        let planes = [
            h1,
            crate::geom::plane_through(&first),
            crate::geom::plane_through(&second),
        ];
        let report = verify(points, &planes);
        debug_assert!(report.valid);
        return Ok(TripleOracle { planes, report });
    }

    let mut color_of: Vec<Option<Color>> = vec![None; n];
    let mut red_total = 0usize;
    let mut blue_total = 0usize;
    for (i, p) in points.iter().enumerate() {
        match p.z.cmp(&z_med) {
            std::cmp::Ordering::Less => {
                color_of[i] = Some(Color::Red);
                red_total += 1;
            }
            std::cmp::Ordering::Greater => {
                color_of[i] = Some(Color::Blue);
                blue_total += 1;
            }
            std::cmp::Ordering::Equal => {}
        }
    }

    let idxs: Vec<usize> = (0..n).filter(|&i| i != median).collect();
    let candidates = match small_integer_rows(points) {
        Some(rows) => candidates_small(points, &rows, &idxs, &color_of, red_total, blue_total),
        None => candidates_rational(points, &idxs, &color_of, red_total, blue_total),
    };

    let mut h1_above = 0u32;
    let mut h1_below = 0u32;
    for (i, p) in points.iter().enumerate() {
        match h1.side(p) {
            Sgn::Pos => h1_above |= 1 << i,
            Sgn::Neg => h1_below |= 1 << i,
            Sgn::Zero => {}
        }
    }

    let cap = (n / 8) as u32;
    for (i, c1) in candidates.iter().enumerate() {
        for c2 in candidates.iter().skip(i + 1) {
            let mut ok = true;
            'masks: for s1 in [h1_above, h1_below] {
                for s2 in [c1.above, c1.below] {
                    for s3 in [c2.above, c2.below] {
                        if (s1 & s2 & s3).count_ones() > cap {
                            ok = false;
                            break 'masks;
                        }
                    }
                }
            }
            if ok {
                let planes = [h1.clone(), c1.plane.clone(), c2.plane.clone()];
                let report = verify(points, &planes);
                debug_assert!(report.valid);
                return Ok(TripleOracle { planes, report });
            }
        }
    }
    Err(Error::Internal(
        "exhaustive search found no valid plane triple".into(),
    ))
}

/// Integer coordinate rows when every coordinate is an integer small enough
/// for overflow-free i128 plane predicates.
fn small_integer_rows(points: &[Point3]) -> Option<Vec<[i64; 3]>> {
    let bound = 1i64 << 24;
    points
        .iter()
        .map(|p| {
            let mut row = [0i64; 3];
            for (t, c) in p.coords().into_iter().enumerate() {
                if !crate::scalar::is_integer(c) {
                    return None;
                }
                let v = i64::try_from(c.numer()).ok()?;
                if v.abs() > bound {
                    return None;
                }
                row[t] = v;
            }
            Some(row)
        })
        .collect()
}

fn bisect_filter(
    color_of: &[Option<Color>],
    sides: impl Iterator<Item = (usize, i8)>,
    red_total: usize,
    blue_total: usize,
) -> Option<(u32, u32)> {
    let mut above = 0u32;
    let mut below = 0u32;
    let mut red_above = 0;
    let mut red_below = 0;
    let mut blue_above = 0;
    let mut blue_below = 0;
    for (i, s) in sides {
        if s > 0 {
            above |= 1 << i;
            match color_of[i] {
                Some(Color::Red) => red_above += 1,
                Some(Color::Blue) => blue_above += 1,
                None => {}
            }
        } else if s < 0 {
            below |= 1 << i;
            match color_of[i] {
                Some(Color::Red) => red_below += 1,
                Some(Color::Blue) => blue_below += 1,
                None => {}
            }
        }
    }
    let ok = red_above <= red_total / 2
        && red_below <= red_total / 2
        && blue_above <= blue_total / 2
        && blue_below <= blue_total / 2;
    ok.then_some((above, below))
}

fn candidates_small(
    points: &[Point3],
    rows: &[[i64; 3]],
    idxs: &[usize],
    color_of: &[Option<Color>],
    red_total: usize,
    blue_total: usize,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for a in 0..idxs.len() {
        for b in a + 1..idxs.len() {
            for c in b + 1..idxs.len() {
                let (pa, pb, pc) = (rows[idxs[a]], rows[idxs[b]], rows[idxs[c]]);
                let u = [
                    (pb[0] - pa[0]) as i128,
                    (pb[1] - pa[1]) as i128,
                    (pb[2] - pa[2]) as i128,
                ];
                let w = [
                    (pc[0] - pa[0]) as i128,
                    (pc[1] - pa[1]) as i128,
                    (pc[2] - pa[2]) as i128,
                ];
                let nx = u[1] * w[2] - u[2] * w[1];
                let ny = u[2] * w[0] - u[0] * w[2];
                let nz = u[0] * w[1] - u[1] * w[0];
                if nx == 0 && ny == 0 && nz == 0 {
                    continue;
                }
                let off = nx * pa[0] as i128 + ny * pa[1] as i128 + nz * pa[2] as i128;
                let sides = rows.iter().enumerate().map(|(i, r)| {
                    let v =
                        nx * r[0] as i128 + ny * r[1] as i128 + nz * r[2] as i128 - off;
                    (i, v.signum() as i8)
                });
                if let Some((above, below)) =
                    bisect_filter(color_of, sides, red_total, blue_total)
                {
                    let _ = points;
                    let plane = OrientedPlane {
                        normal: [
                            Scalar::from_integer(nx.into()),
                            Scalar::from_integer(ny.into()),
                            Scalar::from_integer(nz.into()),
                        ],
                        offset: Scalar::from_integer(off.into()),
                    };
                    out.push(Candidate {
                        plane,
                        above,
                        below,
                    });
                }
            }
        }
    }
    out
}

fn candidates_rational(
    points: &[Point3],
    idxs: &[usize],
    color_of: &[Option<Color>],
    red_total: usize,
    blue_total: usize,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for a in 0..idxs.len() {
        for b in a + 1..idxs.len() {
            for c in b + 1..idxs.len() {
                let tri = [&points[idxs[a]], &points[idxs[b]], &points[idxs[c]]];
                let plane = crate::geom::plane_through(&tri);
                if plane.normal.iter().all(|q| q.is_zero()) {
                    continue;
                }
                let sides = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, plane.side(p).as_i8()));
                if let Some((above, below)) =
                    bisect_filter(color_of, sides, red_total, blue_total)
                {
                    out.push(Candidate {
                        plane,
                        above,
                        below,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, InstanceKind};
    use crate::instance::canonicalize;
    use crate::levels::trace;
    use crate::scalar::int;

    fn traced(n: usize, seed: u64) -> (ColoredInstance, LevelCurve) {
        let pts = generate(InstanceKind::Random, n, seed).unwrap();
        let inst = canonicalize(&pts, &[int(0), int(0), int(1)]).unwrap();
        let curve = trace(&inst).unwrap();
        (inst, curve)
    }

    #[test]
    fn zero_set_is_nonempty_and_pairs_are_vertices() {
        let (_, curve) = traced(15, 2);
        let zeros = oracle_pairs(&curve);
        assert!(!zeros.is_empty());
        for (i, j) in zeros {
            assert!(curve.elements[i].is_vertex());
            assert!(curve.elements[j].is_vertex());
            assert!(xy(&curve, i, j).is_zero());
        }
    }

    #[test]
    fn scan_matches_direct_evaluation() {
        let (_, curve) = traced(15, 3);
        scan_pairs(&curve, |i, j, v| {
            let direct = xy(&curve, i, j);
            assert_eq!(v, direct, "mismatch at ({i}, {j})");
        });
    }

    #[test]
    fn triples_oracle_on_seeded_instance() {
        let pts = generate(InstanceKind::Random, 15, 2).unwrap();
        let oracle = oracle_triples(&pts).unwrap();
        assert!(oracle.report.valid);
        for (_, &count) in &oracle.report.octant_counts {
            assert!(count <= 1);
        }
    }

    #[test]
    fn triples_oracle_trivial_seven_and_size_cap() {
        let pts = generate(InstanceKind::Random, 7, 1).unwrap();
        let oracle = oracle_triples(&pts).unwrap();
        assert!(oracle.report.valid);
        assert!(oracle.report.octant_counts.values().all(|&c| c == 0));

        let big = generate(InstanceKind::Random, 32, 1).unwrap();
        assert!(matches!(oracle_triples(&big), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn triples_oracle_agrees_with_pipeline_at_23() {
        let pts = generate(InstanceKind::Random, 23, 6).unwrap();
        let oracle = oracle_triples(&pts).unwrap();
        let run = crate::partition::eight_partition(
            &pts,
            &[int(0), int(0), int(1)],
            1,
            crate::partition::PartitionOptions::default(),
        )
        .unwrap();
        assert_eq!(oracle.report.valid, run.report.valid);
        assert!(oracle.report.valid);
    }

    #[test]
    fn slice_crossing_matches_symbolic_start() {
        let (inst, curve) = traced(15, 4);
        let d = min_arrangement_vertex_y(&inst)
            .map(|y| y - int(1))
            .unwrap_or_else(|| int(0));
        let (ri, bi) = slice_crossing_concrete(&inst, &d).unwrap();
        let start = crate::planar::start_edge(&inst).unwrap();
        assert_eq!((start.red, start.blue), (ri, bi));
        // And the traced curve's first edge is that pair.
        match &curve.elements[0] {
            crate::levels::CurveElement::Edge { red, blue } => {
                assert_eq!((*red, *blue), (ri, bi));
            }
            _ => panic!("first element must be an edge"),
        }
    }
}

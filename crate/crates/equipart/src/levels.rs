//! Tracing the intersection curve of the two median levels.
//!
//! The curve is a single y-monotone bi-infinite chain in the arrangement of
//! the dual planes. It is traced edge by edge: from a point on the current
//! edge, the next vertex is the first plane hit by the ray running in the
//! +y direction along the supporting line, found by an exact minimum over
//! all candidate planes. That is a naive O(n) advance per element; per-step
//! timings are recorded so the gap to the asymptotically fast structures
//! stays measurable.

use crate::error::{Error, Result};
use crate::geom::{HomPoint, Point3};
use crate::instance::{Color, ColoredInstance};
use crate::planar::start_edge;
use crate::scalar::{is_integer, scalar_string, Sgn};
use num::{BigInt, Signed, Zero};
use serde_json::json;
use std::time::Instant;

/// Reference to one dual plane of the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlaneRef {
    pub color: Color,
    pub index: usize,
}

/// One element of the traced curve. Elements alternate edge, vertex, edge,
/// ...; the first and last are unbounded edges represented by a base point
/// plus the traversal direction.
#[derive(Debug, Clone)]
pub enum CurveElement {
    Edge {
        red: usize,
        blue: usize,
    },
    Vertex {
        position: Point3,
        /// The red plane and blue plane of the incoming edge plus the plane
        /// entering here.
        planes: [PlaneRef; 3],
        /// The plane entering at this vertex relative to the previous edge.
        new_plane: PlaneRef,
    },
}

impl CurveElement {
    pub fn is_vertex(&self) -> bool {
        matches!(self, CurveElement::Vertex { .. })
    }
}

/// Plane with integer coefficients `z = a x + b y + c`; canonical instances
/// have integer coordinates, so their duals always fit this form.
#[derive(Debug, Clone)]
pub(crate) struct IntPlane {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl IntPlane {
    /// Sign-carrying numerator of the plane height above a homogeneous
    /// point (positive: the plane lies strictly above).
    fn eval(&self, p: &HomPoint) -> BigInt {
        &self.a * &p.x + &self.b * &p.y + &self.c * &p.w - &p.z
    }

    /// Derivative of the height along an integer direction.
    fn along(&self, d: &[BigInt; 3]) -> BigInt {
        &self.a * &d[0] + &self.b * &d[1] - &d[2]
    }
}

/// Change of exactly one plane's classification between two consecutive
/// elements: the plane is incident to the vertex side and strictly sided on
/// the edge side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Transition {
    pub plane: PlaneRef,
    /// The plane's side on the edge element of the pair (+1 above, -1 below).
    pub edge_sign: i8,
}

/// Exact above/below tallies of the dual planes around a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideCounts {
    pub red_above: usize,
    pub red_below: usize,
    pub blue_above: usize,
    pub blue_below: usize,
    pub red_on: Vec<usize>,
    pub blue_on: Vec<usize>,
}

/// The traced curve with everything the search needs: per-element sample
/// points, per-element plane signs, and the single-plane change records.
#[derive(Debug, Clone)]
pub struct LevelCurve {
    pub k: usize,
    pub elements: Vec<CurveElement>,
    pub(crate) reds: Vec<IntPlane>,
    pub(crate) blues: Vec<IntPlane>,
    pub(crate) samples: Vec<HomPoint>,
    pub(crate) transitions: Vec<Transition>,
    pub(crate) sign_red: Vec<Vec<i8>>,
    pub(crate) sign_blue: Vec<Vec<i8>>,
    pub step_times_us: Vec<u64>,
}

impl LevelCurve {
    /// Number of elements (edges plus vertices).
    pub fn m(&self) -> usize {
        self.elements.len()
    }

    pub fn red_count(&self) -> usize {
        self.reds.len()
    }

    pub fn blue_count(&self) -> usize {
        self.blues.len()
    }

    /// A point in the relative interior of element `i` (the vertex itself
    /// for vertex elements).
    pub fn sample(&self, i: usize) -> Point3 {
        self.samples[i].to_point()
    }

    pub fn vertex_position(&self, i: usize) -> Option<Point3> {
        match &self.elements[i] {
            CurveElement::Vertex { position, .. } => Some(position.clone()),
            CurveElement::Edge { .. } => None,
        }
    }

    /// Sign of the given plane at element `i`'s sample.
    pub fn sign_of(&self, i: usize, plane: PlaneRef) -> i8 {
        match plane.color {
            Color::Red => self.sign_red[i][plane.index],
            Color::Blue => self.sign_blue[i][plane.index],
        }
    }

    /// Exact side counts at an arbitrary point.
    pub fn side_counts_at_point(&self, p: &Point3) -> SideCounts {
        let hp = HomPoint::from_point(p);
        let classify = |planes: &[IntPlane]| {
            let mut above = 0;
            let mut below = 0;
            let mut on = Vec::new();
            for (i, pl) in planes.iter().enumerate() {
                match Sgn::of_int(&pl.eval(&hp)) {
                    Sgn::Pos => above += 1,
                    Sgn::Neg => below += 1,
                    Sgn::Zero => on.push(i),
                }
            }
            (above, below, on)
        };
        let (red_above, red_below, red_on) = classify(&self.reds);
        let (blue_above, blue_below, blue_on) = classify(&self.blues);
        SideCounts {
            red_above,
            red_below,
            blue_above,
            blue_below,
            red_on,
            blue_on,
        }
    }

    /// Side counts at the stored interior sample of element `i`.
    pub fn side_counts_at_element(&self, i: usize) -> SideCounts {
        self.side_counts_at_point(&self.sample(i))
    }

    /// Serializes the curve (elements, exact vertex coordinates, per-step
    /// timings) as a JSON document.
    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|e| match e {
                CurveElement::Edge { red, blue } => json!({
                    "edge": { "red": red, "blue": blue }
                }),
                CurveElement::Vertex {
                    position,
                    planes,
                    new_plane,
                } => json!({
                    "vertex": {
                        "position": [
                            scalar_string(&position.x),
                            scalar_string(&position.y),
                            scalar_string(&position.z),
                        ],
                        "planes": planes.iter().map(plane_ref_json).collect::<Vec<_>>(),
                        "new_plane": plane_ref_json(new_plane),
                    }
                }),
            })
            .collect();
        json!({
            "m": self.m(),
            "k": self.k,
            "elements": elements,
            "step_times_us": self.step_times_us,
        })
    }
}

fn plane_ref_json(p: &PlaneRef) -> serde_json::Value {
    json!({ "color": p.color.to_string(), "index": p.index })
}

fn int_planes(points: &[Point3]) -> Result<Vec<IntPlane>> {
    points
        .iter()
        .map(|p| {
            if !(is_integer(&p.x) && is_integer(&p.y) && is_integer(&p.z)) {
                return Err(Error::InvalidInput(
                    "instance coordinates must be integers; canonicalize first".into(),
                ));
            }
            Ok(IntPlane {
                a: p.x.numer().clone(),
                b: p.y.numer().clone(),
                c: -p.z.numer().clone(),
            })
        })
        .collect()
}

/// Primitive integer direction of the intersection line of a red and a blue
/// plane, oriented towards +y.
fn edge_direction(red: &IntPlane, blue: &IntPlane) -> [BigInt; 3] {
    let dx = &blue.b - &red.b;
    let dy = &red.a - &blue.a; // positive: red slope > 0 > blue slope
    let dz = &red.a * &dx + &red.b * &dy;
    debug_assert!(dy.is_positive());
    let mut g = num::Integer::gcd(&dx, &dy);
    g = num::Integer::gcd(&g, &dz);
    if g.is_zero() {
        return [dx, dy, dz];
    }
    [&dx / &g, &dy / &g, &dz / &g]
}

/// Traces the full intersection curve of the two median levels, from the
/// `-y`-infinite half-line to the `+y`-infinite one.
pub fn trace(instance: &ColoredInstance) -> Result<LevelCurve> {
    let reds = int_planes(&instance.red)?;
    let blues = int_planes(&instance.blue)?;
    let start = start_edge(instance)?;

    let mut red_idx = start.red;
    let mut blue_idx = start.blue;
    let mut base = HomPoint::from_point(&start.point);
    let mut dir = edge_direction(&reds[red_idx], &blues[blue_idx]);

    let mut elements: Vec<CurveElement> = vec![CurveElement::Edge {
        red: red_idx,
        blue: blue_idx,
    }];
    let mut edge_dirs: Vec<[BigInt; 3]> = vec![dir.clone()];
    let mut transitions: Vec<Transition> = Vec::new();
    let mut vertex_points: Vec<HomPoint> = Vec::new();
    let mut step_times_us: Vec<u64> = Vec::new();

    let plane_at = |r: usize| -> PlaneRef {
        PlaneRef {
            color: Color::Red,
            index: r,
        }
    };

    loop {
        let tick = Instant::now();
        // First plane hit by the +y ray from `base` along `dir`.
        let mut best: Option<(BigInt, BigInt, PlaneRef)> = None; // (|f|, |g|, plane)
        let mut consider = |plane: &IntPlane, pref: PlaneRef| -> Result<()> {
            let f = plane.eval(&base);
            if f.is_zero() {
                // Incident at the base vertex; the ray never re-crosses it.
                return Ok(());
            }
            let g = plane.along(&dir);
            if g.is_zero() || f.is_positive() == g.is_positive() {
                return Ok(()); // parallel, or hit lies behind
            }
            let p = f.abs();
            let q = g.abs();
            match &best {
                None => best = Some((p, q, pref)),
                Some((bp, bq, _)) => {
                    let lhs = &p * bq;
                    let rhs = bp * &q;
                    if lhs == rhs {
                        return Err(Error::Degenerate(
                            "ray hits two planes at the same parameter; general position violated"
                                .into(),
                        ));
                    }
                    if lhs < rhs {
                        best = Some((p, q, pref));
                    }
                }
            }
            Ok(())
        };
        for (i, plane) in reds.iter().enumerate() {
            if i != red_idx {
                consider(plane, plane_at(i))?;
            }
        }
        for (i, plane) in blues.iter().enumerate() {
            if i != blue_idx {
                consider(
                    plane,
                    PlaneRef {
                        color: Color::Blue,
                        index: i,
                    },
                )?;
            }
        }

        let Some((p, q, hit)) = best else {
            step_times_us.push(tick.elapsed().as_micros() as u64);
            break; // final unbounded edge
        };

        // Vertex = base + (p / (w q)) * dir, homogeneous.
        let vertex = HomPoint::new(
            &base.x * &q + &p * &dir[0],
            &base.y * &q + &p * &dir[1],
            &base.z * &q + &p * &dir[2],
            &base.w * &q,
        );
        debug_assert!(vertex.cmp_y(&base) == std::cmp::Ordering::Greater);

        let incoming = [
            plane_at(red_idx),
            PlaneRef {
                color: Color::Blue,
                index: blue_idx,
            },
            hit,
        ];
        // Entering plane's side on the previous edge.
        let f_sign = match hit.color {
            Color::Red => Sgn::of_int(&reds[hit.index].eval(&base)),
            Color::Blue => Sgn::of_int(&blues[hit.index].eval(&base)),
        };
        transitions.push(Transition {
            plane: hit,
            edge_sign: f_sign.as_i8(),
        });
        elements.push(CurveElement::Vertex {
            position: vertex.to_point(),
            planes: incoming,
            new_plane: hit,
        });

        // Swap the plane of the hit's color; the dropped plane becomes
        // strictly sided on the outgoing edge.
        let dropped = match hit.color {
            Color::Red => {
                let d = plane_at(red_idx);
                red_idx = hit.index;
                d
            }
            Color::Blue => {
                let d = PlaneRef {
                    color: Color::Blue,
                    index: blue_idx,
                };
                blue_idx = hit.index;
                d
            }
        };
        dir = edge_direction(&reds[red_idx], &blues[blue_idx]);
        let dropped_side = match dropped.color {
            Color::Red => Sgn::of_int(&reds[dropped.index].along(&dir)),
            Color::Blue => Sgn::of_int(&blues[dropped.index].along(&dir)),
        };
        if dropped_side.is_zero() {
            return Err(Error::Degenerate(
                "outgoing edge stays inside a plane it should leave".into(),
            ));
        }
        transitions.push(Transition {
            plane: dropped,
            edge_sign: dropped_side.as_i8(),
        });
        elements.push(CurveElement::Edge {
            red: red_idx,
            blue: blue_idx,
        });
        edge_dirs.push(dir.clone());
        vertex_points.push(vertex.clone());
        base = vertex;
        step_times_us.push(tick.elapsed().as_micros() as u64);
    }

    let m = elements.len();
    debug_assert!(m % 2 == 1, "curve must start and end with edges");

    // Interior samples: the start point for the first edge, vertex positions
    // for vertices, midpoints between neighbor vertices for interior edges,
    // one unit past the last vertex for the final edge.
    let mut samples: Vec<HomPoint> = Vec::with_capacity(m);
    samples.push(HomPoint::from_point(&start.point));
    for (t, v) in vertex_points.iter().enumerate() {
        samples.push(v.clone());
        let edge_element = 2 * t + 2;
        if edge_element == m - 1 {
            samples.push(v.offset_by(&edge_dirs[t + 1], 1));
        } else {
            samples.push(HomPoint::midpoint(v, &vertex_points[t + 1]));
        }
    }
    debug_assert_eq!(samples.len(), m);

    let sign_matrix = |planes: &[IntPlane]| -> Vec<Vec<i8>> {
        samples
            .iter()
            .map(|s| {
                planes
                    .iter()
                    .map(|pl| Sgn::of_int(&pl.eval(s)).as_i8())
                    .collect()
            })
            .collect()
    };
    let sign_red = sign_matrix(&reds);
    let sign_blue = sign_matrix(&blues);

    Ok(LevelCurve {
        k: instance.k,
        elements,
        reds,
        blues,
        samples,
        transitions,
        sign_red,
        sign_blue,
        step_times_us,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, InstanceKind};
    use crate::instance::canonicalize;
    use crate::oracle::brute_force_curve;
    use crate::scalar::int;

    fn canonical(n: usize, seed: u64) -> ColoredInstance {
        let pts = generate(InstanceKind::Random, n, seed).unwrap();
        canonicalize(&pts, &[int(0), int(0), int(1)]).unwrap()
    }

    #[test]
    fn k0_instance_matches_direct_construction() {
        // |R| = |B| = 3: the whole 6-plane arrangement is small enough to
        // enumerate directly.
        let red = vec![
            Point3::from_ints(4, 1, -3),
            Point3::from_ints(6, -2, -7),
            Point3::from_ints(3, 5, -2),
        ];
        let blue = vec![
            Point3::from_ints(-5, 2, 4),
            Point3::from_ints(-2, -3, 6),
            Point3::from_ints(-7, 1, 9),
        ];
        let inst = ColoredInstance::from_colored_points(red, blue).unwrap();
        let curve = trace(&inst).unwrap();
        assert!(curve.m() >= 1 && curve.m() % 2 == 1);

        let (oracle_edges, oracle_vertices) = brute_force_curve(&inst).unwrap();
        let traced_edges: Vec<(usize, usize)> = curve
            .elements
            .iter()
            .filter_map(|e| match e {
                CurveElement::Edge { red, blue } => Some((*red, *blue)),
                _ => None,
            })
            .collect();
        assert_eq!(traced_edges, oracle_edges);
        let traced_vertices: Vec<Point3> = (0..curve.m())
            .filter_map(|i| curve.vertex_position(i))
            .collect();
        assert_eq!(traced_vertices, oracle_vertices);
    }

    #[test]
    fn seeded_instance_matches_brute_force_curve() {
        let inst = canonical(15, 2);
        let curve = trace(&inst).unwrap();
        let (oracle_edges, oracle_vertices) = brute_force_curve(&inst).unwrap();
        let traced_edges: Vec<(usize, usize)> = curve
            .elements
            .iter()
            .filter_map(|e| match e {
                CurveElement::Edge { red, blue } => Some((*red, *blue)),
                _ => None,
            })
            .collect();
        assert_eq!(traced_edges, oracle_edges);
        let traced_vertices: Vec<Point3> = (0..curve.m())
            .filter_map(|i| curve.vertex_position(i))
            .collect();
        assert_eq!(traced_vertices, oracle_vertices);
    }

    #[test]
    fn edge_midpoints_sit_on_both_median_levels() {
        let inst = canonical(15, 3);
        let k = inst.k;
        let curve = trace(&inst).unwrap();
        for (i, e) in curve.elements.iter().enumerate() {
            if e.is_vertex() {
                continue;
            }
            let counts = curve.side_counts_at_element(i);
            // One plane of each color through the edge, 2k+1 strictly below
            // and 2k+1 strictly above per color.
            assert_eq!(counts.red_on.len(), 1);
            assert_eq!(counts.blue_on.len(), 1);
            assert_eq!(counts.red_below, 2 * k + 1);
            assert_eq!(counts.red_above, 2 * k + 1);
            assert_eq!(counts.blue_below, 2 * k + 1);
            assert_eq!(counts.blue_above, 2 * k + 1);
        }
    }

    #[test]
    fn ends_share_planes_with_all_other_sides_flipped() {
        let inst = canonical(15, 4);
        let curve = trace(&inst).unwrap();
        let m = curve.m();
        let (CurveElement::Edge { red: r0, blue: b0 }, CurveElement::Edge { red: r1, blue: b1 }) =
            (&curve.elements[0], &curve.elements[m - 1])
        else {
            panic!("ends must be edges");
        };
        assert_eq!(r0, r1, "ends lie on the same red plane");
        assert_eq!(b0, b1, "ends lie on the same blue plane");
        // Far along each half-line every other plane's side flips.
        let first = curve.side_counts_at_element(0);
        let last = curve.side_counts_at_element(m - 1);
        assert_eq!(first.red_above, last.red_below);
        assert_eq!(first.blue_above, last.blue_below);
        for i in 0..curve.red_count() {
            if first.red_on.contains(&i) {
                continue;
            }
            let a = curve.sign_red[0][i];
            let b = curve.sign_red[m - 1][i];
            assert_eq!(a, -b, "red plane {i} must flip sides");
        }
        for i in 0..curve.blue_count() {
            if first.blue_on.contains(&i) {
                continue;
            }
            assert_eq!(curve.sign_blue[0][i], -curve.sign_blue[m - 1][i]);
        }
    }

    #[test]
    fn vertices_strictly_increase_in_y() {
        let inst = canonical(23, 5);
        let curve = trace(&inst).unwrap();
        let ys: Vec<_> = (0..curve.m())
            .filter_map(|i| curve.vertex_position(i).map(|p| p.y))
            .collect();
        assert!(!ys.is_empty());
        for w in ys.windows(2) {
            assert!(w[0] < w[1], "vertex y-coordinates must increase");
        }
    }

    #[test]
    fn each_step_changes_exactly_one_plane() {
        let inst = canonical(15, 6);
        let curve = trace(&inst).unwrap();
        for i in 0..curve.m() - 1 {
            let t = curve.transitions[i];
            // The transition plane is incident on the vertex side and
            // strictly sided on the edge side.
            let (edge_el, vert_el) = if i % 2 == 0 { (i, i + 1) } else { (i + 1, i) };
            assert_eq!(curve.sign_of(vert_el, t.plane), 0);
            assert_eq!(curve.sign_of(edge_el, t.plane), t.edge_sign);
            assert_ne!(t.edge_sign, 0);
            // All other planes keep their sides across the step.
            for r in 0..curve.red_count() {
                let pr = PlaneRef {
                    color: Color::Red,
                    index: r,
                };
                if pr == t.plane {
                    continue;
                }
                let (a, b) = (curve.sign_of(i, pr), curve.sign_of(i + 1, pr));
                if a != 0 && b != 0 {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn retrace_with_shuffled_plane_order_is_identical() {
        let pts = generate(InstanceKind::Random, 15, 8).unwrap();
        let inst = canonicalize(&pts, &[int(0), int(0), int(1)]).unwrap();
        let curve = trace(&inst).unwrap();

        // Shuffle the red and blue lists; the traced sequence must be the
        // same once mapped through the permutation.
        let mut shuffled = inst.clone();
        shuffled.red.rotate_left(3);
        shuffled.red_source.rotate_left(3);
        shuffled.blue.rotate_left(5);
        shuffled.blue_source.rotate_left(5);
        let curve2 = trace(&shuffled).unwrap();
        assert_eq!(curve.m(), curve2.m());
        // rotate_left(3) moves the plane at old index i to (i + len - 3) % len.
        let red_map = |i: usize| (i + inst.red.len() - 3) % inst.red.len();
        let blue_map = |i: usize| (i + inst.blue.len() - 5) % inst.blue.len();
        for (a, b) in curve.elements.iter().zip(curve2.elements.iter()) {
            match (a, b) {
                (
                    CurveElement::Edge { red: r1, blue: b1 },
                    CurveElement::Edge { red: r2, blue: b2 },
                ) => {
                    assert_eq!(red_map(*r1), *r2);
                    assert_eq!(blue_map(*b1), *b2);
                }
                (
                    CurveElement::Vertex { position: p1, .. },
                    CurveElement::Vertex { position: p2, .. },
                ) => assert_eq!(p1, p2),
                _ => panic!("element kinds diverged"),
            }
        }
    }

    #[test]
    fn side_counts_partition_the_planes() {
        let inst = canonical(15, 9);
        let curve = trace(&inst).unwrap();
        // A point below everything.
        let deep = Point3::from_ints(0, 0, -(1 << 55));
        let c = curve.side_counts_at_point(&deep);
        assert_eq!(c.red_below, 0);
        assert_eq!(c.red_above, 7);
        assert_eq!(c.blue_above, 7);
        // A generic point: counts sum to the family sizes.
        let p = Point3::from_ints(17, -5, 3);
        let c = curve.side_counts_at_point(&p);
        assert_eq!(c.red_above + c.red_below + c.red_on.len(), 7);
        assert_eq!(c.blue_above + c.blue_below + c.blue_on.len(), 7);
    }
}

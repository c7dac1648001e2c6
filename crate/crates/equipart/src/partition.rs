//! End-to-end eight-partition pipeline and the exact verification report.
//!
//! The pipeline: rotate the prescribed direction to vertical, pad (and on
//! consent perturb) into a canonical-size general-position set, split colors
//! at the median and shear them apart, trace the intersection of the two
//! median levels in the dual, search it for a vertex pair with vanishing
//! sign counts, dualize those vertices into the remaining two planes, map
//! everything back, strip the dummies and verify by direct counting.

use crate::error::{Error, Result};
use crate::geom::{plane_through, rotation_to_vertical, AffineMap, OrientedPlane, Point3, SignVector};
use crate::instance::{canonicalize, pad_and_perturb, ColoredInstance};
use crate::levels::{trace, LevelCurve};
use crate::scalar::{scalar_string, Scalar, Sgn};
use crate::search::{search, SearchOutcome};
use serde::Serialize;
use std::collections::BTreeMap;

/// Options of the partition pipeline.
#[derive(Debug, Clone, Copy, Default)]
pub struct PartitionOptions {
    /// Consent to jitter degenerate inputs. Off by default: perturbation
    /// changes answers, so refusing degenerate input is the safe behavior.
    pub allow_perturb: bool,
}

/// Exact plane coefficients in text form.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PlaneRecord {
    pub normal: [String; 3],
    pub offset: String,
}

impl PlaneRecord {
    fn of(plane: &OrientedPlane) -> Self {
        let c = plane.coeff_strings();
        PlaneRecord {
            normal: [c[0].clone(), c[1].clone(), c[2].clone()],
            offset: c[3].clone(),
        }
    }
}

/// Bisection status of one plane of the triple.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SinglePlaneStatus {
    pub plane: usize,
    pub above: usize,
    pub below: usize,
    pub on: usize,
    pub bisects: bool,
}

/// Four-partition status of a plane pair.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PairStatus {
    pub planes: [usize; 2],
    pub quadrant_counts: BTreeMap<String, usize>,
    pub four_partitions: bool,
}

/// How the instance reached the algorithm.
#[derive(Debug, Clone, Serialize, Default, PartialEq, Eq)]
pub struct Provenance {
    pub original_n: usize,
    pub seed: Option<u64>,
    pub direction: Option<[String; 3]>,
    pub k: Option<usize>,
    /// `4k + 2` for canonical instances.
    pub cap_n: Option<i64>,
    pub dummies_added: usize,
    /// When true, the reported counts refer to the jittered points.
    pub perturbed: bool,
    pub trivial_small_case: bool,
}

/// The verification artifact: exact octant counts, alternating sums, on-plane
/// incidences and sub-tuple partition statuses.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct PartitionReport {
    pub n: usize,
    /// `floor(n / 8)`: the octant bound.
    pub floor_octant: usize,
    pub valid: bool,
    pub planes: [PlaneRecord; 3],
    /// Open-octant populations keyed by sign vector, e.g. `"+-+"`.
    pub octant_counts: BTreeMap<String, usize>,
    /// Alternating sums over all seven non-identity sign vectors; all zero
    /// exactly when the triple eight-partitions (with counting measure).
    pub alternating_sums: BTreeMap<String, i64>,
    /// Indices of input points incident to each plane.
    pub on_plane: Vec<Vec<usize>>,
    pub single_planes: Vec<SinglePlaneStatus>,
    pub plane_pairs: Vec<PairStatus>,
    pub provenance: Provenance,
}

impl PartitionReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Exact octant classification of `points` against the plane triple, plus
/// alternating sums and the bisection/four-partition status of every
/// sub-tuple.
pub fn verify(points: &[Point3], planes: &[OrientedPlane; 3]) -> PartitionReport {
    let n = points.len();
    let sides: Vec<[Sgn; 3]> = points
        .iter()
        .map(|p| [planes[0].side(p), planes[1].side(p), planes[2].side(p)])
        .collect();

    let mut octant_counts: BTreeMap<String, usize> = SignVector::all(3)
        .into_iter()
        .map(|sv| (sv.to_string(), 0))
        .collect();
    let mut on_plane: Vec<Vec<usize>> = vec![Vec::new(); 3];
    for (idx, s) in sides.iter().enumerate() {
        for (pl, sign) in s.iter().enumerate() {
            if sign.is_zero() {
                on_plane[pl].push(idx);
            }
        }
        if s.iter().all(|sign| !sign.is_zero()) {
            let key: String = s
                .iter()
                .map(|sign| if *sign == Sgn::Pos { '+' } else { '-' })
                .collect();
            *octant_counts.get_mut(&key).expect("all keys present") += 1;
        }
    }

    let count_of = |sv: &SignVector| -> i64 {
        octant_counts[&sv.to_string()] as i64
    };
    let mut alternating_sums = BTreeMap::new();
    for alpha in SignVector::all(3) {
        if alpha.is_identity() {
            continue;
        }
        let mut sum = 0i64;
        for beta in SignVector::all(3) {
            let sign = if alpha.minus_overlap(&beta) % 2 == 0 {
                1
            } else {
                -1
            };
            sum += sign * count_of(&beta);
        }
        alternating_sums.insert(alpha.to_string(), sum);
    }

    let mut single_planes = Vec::with_capacity(3);
    for pl in 0..3 {
        let above = sides.iter().filter(|s| s[pl] == Sgn::Pos).count();
        let below = sides.iter().filter(|s| s[pl] == Sgn::Neg).count();
        single_planes.push(SinglePlaneStatus {
            plane: pl,
            above,
            below,
            on: n - above - below,
            bisects: above <= n / 2 && below <= n / 2,
        });
    }

    let mut plane_pairs = Vec::with_capacity(3);
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let mut quadrant_counts: BTreeMap<String, usize> = SignVector::all(2)
            .into_iter()
            .map(|sv| (sv.to_string(), 0))
            .collect();
        for s in &sides {
            if s[a].is_zero() || s[b].is_zero() {
                continue;
            }
            let key: String = [s[a], s[b]]
                .iter()
                .map(|sign| if *sign == Sgn::Pos { '+' } else { '-' })
                .collect();
            *quadrant_counts.get_mut(&key).expect("keys") += 1;
        }
        let four_partitions = quadrant_counts.values().all(|&c| c <= n / 4);
        plane_pairs.push(PairStatus {
            planes: [a, b],
            quadrant_counts,
            four_partitions,
        });
    }

    let valid = octant_counts.values().all(|&c| c <= n / 8);
    PartitionReport {
        n,
        floor_octant: n / 8,
        valid,
        planes: [
            PlaneRecord::of(&planes[0]),
            PlaneRecord::of(&planes[1]),
            PlaneRecord::of(&planes[2]),
        ],
        octant_counts,
        alternating_sums,
        on_plane,
        single_planes,
        plane_pairs,
        provenance: Provenance {
            original_n: n,
            ..Provenance::default()
        },
    }
}

/// The dual plane of a point, as an oriented plane with unit z-coefficient.
pub fn dual_vertex_plane(p: &Point3) -> OrientedPlane {
    OrientedPlane {
        normal: [-p.x.clone(), -p.y.clone(), Scalar::from_integer(1.into())],
        offset: -p.z.clone(),
    }
}

/// Everything a pipeline run produces; the planes and report are the
/// contract, the rest feeds logs, statistics and cross-checks.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub planes: [OrientedPlane; 3],
    pub report: PartitionReport,
    pub instance: Option<ColoredInstance>,
    pub curve: Option<LevelCurve>,
    pub search: Option<SearchOutcome>,
}

/// Computes an eight-partition of `points` with the first plane normal to
/// `v`: every open octant of the returned triple contains at most
/// `floor(n / 8)` of the points. Deterministic in `(points, v, seed)`.
pub fn eight_partition(
    points: &[Point3],
    v: &[Scalar; 3],
    seed: u64,
    opts: PartitionOptions,
) -> Result<PipelineRun> {
    if points.is_empty() {
        return Err(Error::InvalidInput("need at least one point".into()));
    }
    let rot = AffineMap::linear_map(rotation_to_vertical(v)?);
    let rotated: Vec<Point3> = points.iter().map(|p| rot.apply(p)).collect();

    let mut provenance = Provenance {
        original_n: points.len(),
        seed: Some(seed),
        direction: Some([
            scalar_string(&v[0]),
            scalar_string(&v[1]),
            scalar_string(&v[2]),
        ]),
        ..Provenance::default()
    };

    if points.len() <= 7 {
        // Three planes can hold 1 + 3 + 3 = 7 points, leaving every open
        // octant empty.
        provenance.trivial_small_case = true;
        let mut order: Vec<usize> = (0..rotated.len()).collect();
        order.sort_by(|&i, &j| {
            rotated[i]
                .z
                .cmp(&rotated[j].z)
                .then_with(|| rotated[i].x.cmp(&rotated[j].x))
                .then_with(|| rotated[i].y.cmp(&rotated[j].y))
        });
        let median = order[(order.len() + 1) / 2 - 1];
        let h1 = OrientedPlane::horizontal(rotated[median].z.clone());
        let rest: Vec<usize> = order.into_iter().filter(|&i| i != median).collect();
        let first: Vec<&Point3> = rest.iter().take(3).map(|&i| &rotated[i]).collect();
        let second: Vec<&Point3> = rest.iter().skip(3).map(|&i| &rotated[i]).collect();
        let h2 = plane_through(&first);
        let h3 = plane_through(&second);
        let planes = [
            rot.pullback_plane(&h1).normalized(),
            rot.pullback_plane(&h2).normalized(),
            rot.pullback_plane(&h3).normalized(),
        ];
        let mut report = verify(points, &planes);
        report.provenance = provenance;
        if !report.valid {
            return Err(Error::Internal(
                "trivial small-case partition failed verification".into(),
            ));
        }
        return Ok(PipelineRun {
            planes,
            report,
            instance: None,
            curve: None,
            search: None,
        });
    }

    let padded = pad_and_perturb(&rotated, seed, opts.allow_perturb)?;
    provenance.dummies_added = padded.dummy_count;
    provenance.perturbed = padded.perturbed;

    let e3 = [
        Scalar::from_integer(0.into()),
        Scalar::from_integer(0.into()),
        Scalar::from_integer(1.into()),
    ];
    let instance = canonicalize(&padded.points, &e3)?;
    provenance.k = Some(instance.k);
    provenance.cap_n = Some(4 * instance.k as i64 + 2);

    let curve = trace(&instance)?;
    let outcome = search(&curve)?;

    let p = curve
        .vertex_position(outcome.i)
        .ok_or_else(|| Error::Internal("search returned a non-vertex first element".into()))?;
    let q = curve
        .vertex_position(outcome.j)
        .ok_or_else(|| Error::Internal("search returned a non-vertex second element".into()))?;
    let h2 = dual_vertex_plane(&p);
    let h3 = dual_vertex_plane(&q);
    // Dual planes are never vertical by construction; keep the audit anyway.
    let one = Scalar::from_integer(1.into());
    if h2.normal[2] != one || h3.normal[2] != one {
        return Err(Error::Internal("dual plane lost its vertical-free form".into()));
    }

    // Map back: canonical frame <- padded(rotated) frame <- input frame.
    let total = instance.forward.compose(&rot);
    let planes = [
        total.pullback_plane(&instance.h1).normalized(),
        total.pullback_plane(&h2).normalized(),
        total.pullback_plane(&h3).normalized(),
    ];

    // The planes partition the points the algorithm actually ran on: the
    // originals, or their jittered stand-ins when perturbation was allowed.
    let reported_points: Vec<Point3> = if padded.perturbed {
        let rot_inv = rot.inverse()?;
        padded.points[..padded.original_count]
            .iter()
            .map(|p| rot_inv.apply(p))
            .collect()
    } else {
        points.to_vec()
    };
    let mut report = verify(&reported_points, &planes);
    report.provenance = provenance;
    if !report.valid {
        return Err(Error::Internal(
            "partition failed exact verification after dummy stripping".into(),
        ));
    }
    Ok(PipelineRun {
        planes,
        report,
        instance: Some(instance),
        curve: Some(curve),
        search: Some(outcome),
    })
}

/// Red/blue split of the reported points relative to the first plane, for
/// checks that speak about colors in the input frame.
pub fn colors_by_first_plane(points: &[Point3], h1: &OrientedPlane) -> (Vec<usize>, Vec<usize>) {
    let mut red = Vec::new();
    let mut blue = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match h1.side(p) {
            Sgn::Neg => red.push(i),
            Sgn::Pos => blue.push(i),
            Sgn::Zero => {}
        }
    }
    (red, blue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, InstanceKind};
    use crate::scalar::int;

    fn e3() -> [Scalar; 3] {
        [int(0), int(0), int(1)]
    }

    #[test]
    fn tiny_inputs_take_the_trivial_branch() {
        for n in 1..=7usize {
            let pts = generate(InstanceKind::Random, n, 40 + n as u64).unwrap();
            let run = eight_partition(&pts, &e3(), 1, PartitionOptions::default()).unwrap();
            assert!(run.report.valid);
            assert!(run.report.provenance.trivial_small_case);
            assert!(run.report.octant_counts.values().all(|&c| c == 0));
            assert!(run.report.alternating_sums.values().all(|&s| s == 0));
            assert!(run.curve.is_none());
        }
    }

    #[test]
    fn seeded_fifteen_has_exactly_one_point_per_octant() {
        let pts = generate(InstanceKind::Random, 15, 1).unwrap();
        let run = eight_partition(&pts, &e3(), 1, PartitionOptions::default()).unwrap();
        assert!(run.report.valid);
        for (_, &c) in &run.report.octant_counts {
            assert_eq!(c, 1);
        }
        for (_, &s) in &run.report.alternating_sums {
            assert_eq!(s, 0);
        }
        // H2 and H3 each hold exactly 3 points with both colors present.
        let h1 = &run.planes[0];
        let (red, blue) = colors_by_first_plane(&pts, h1);
        assert_eq!(red.len(), 7);
        assert_eq!(blue.len(), 7);
        for pl in 1..3 {
            let on = &run.report.on_plane[pl];
            assert_eq!(on.len(), 3);
            assert!(on.iter().any(|i| red.contains(i)));
            assert!(on.iter().any(|i| blue.contains(i)));
        }
    }

    #[test]
    fn twenty_points_get_three_dummies_and_a_valid_result() {
        let pts = generate(InstanceKind::Random, 20, 3).unwrap();
        let run = eight_partition(&pts, &e3(), 5, PartitionOptions::default()).unwrap();
        assert_eq!(run.report.provenance.dummies_added, 3);
        assert_eq!(run.report.n, 20);
        assert!(run.report.valid);
        assert!(run.report.octant_counts.values().all(|&c| c <= 2));
    }

    #[test]
    fn prescribed_direction_is_honored() {
        let pts = generate(InstanceKind::Random, 15, 6).unwrap();
        let v = [int(2), int(-1), int(3)];
        let run = eight_partition(&pts, &v, 1, PartitionOptions::default()).unwrap();
        assert!(run.report.valid);
        let n = &run.planes[0].normal;
        // Normal is a positive multiple of v.
        let t = &n[0] / &v[0];
        assert!(t > int(0));
        assert_eq!(&n[1] / &v[1], t);
        assert_eq!(&n[2] / &v[2], t);
    }

    #[test]
    fn degenerate_without_consent_fails_with_consent_succeeds() {
        let mut pts = generate(InstanceKind::Random, 15, 7).unwrap();
        pts[1].z = pts[0].z.clone(); // two equal heights
        let err = eight_partition(&pts, &e3(), 1, PartitionOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
        let run = eight_partition(
            &pts,
            &e3(),
            1,
            PartitionOptions {
                allow_perturb: true,
            },
        )
        .unwrap();
        assert!(run.report.valid);
        assert!(run.report.provenance.perturbed);
    }

    #[test]
    fn wrong_triple_fails_verification() {
        let pts = generate(InstanceKind::Random, 16, 9).unwrap();
        // Three parallel planes cannot eight-partition a generic set.
        let planes = [
            OrientedPlane::horizontal(int(-1_000_000)),
            OrientedPlane::horizontal(int(0)),
            OrientedPlane::horizontal(int(1_000_000)),
        ];
        let report = verify(&pts, &planes);
        assert!(!report.valid);
        assert!(report.octant_counts.values().any(|&c| c > 2));
        assert!(report.alternating_sums.values().any(|&s| s != 0));
    }

    #[test]
    fn determinism_full_run() {
        let pts = generate(InstanceKind::Random, 23, 11).unwrap();
        let a = eight_partition(&pts, &e3(), 4, PartitionOptions::default()).unwrap();
        let b = eight_partition(&pts, &e3(), 4, PartitionOptions::default()).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(
            a.report.to_json_string(),
            b.report.to_json_string()
        );
    }
}

//! Instance generators: random points in a cube, and an adversarial family
//! (a flat cluster in a thin rectangle plus near-circle points in the plane
//! `x = 0`, the two groups strictly separated by a plane `x = delta`) built
//! to inflate the traced level-intersection curve.

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::instance::general_position_check;
use crate::scalar::Scalar;
use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Random,
    Adversarial,
}

impl std::str::FromStr for InstanceKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(InstanceKind::Random),
            "adversarial" => Ok(InstanceKind::Adversarial),
            other => Err(format!("unknown instance kind `{other}`")),
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceKind::Random => write!(f, "random"),
            InstanceKind::Adversarial => write!(f, "adversarial"),
        }
    }
}

/// Deterministic in `(kind, size, seed)`. General position is enforced by
/// rejection: a violating draw is discarded and redrawn from the next
/// substream.
pub fn generate(kind: InstanceKind, size: usize, seed: u64) -> Result<Vec<Point3>> {
    if size == 0 {
        return Err(Error::InvalidInput("size must be at least 1".into()));
    }
    for attempt in 0..256u64 {
        let points = match kind {
            InstanceKind::Random => draw_random(size, seed, attempt),
            InstanceKind::Adversarial => draw_adversarial(size, seed, attempt),
        };
        if size < 2 || general_position_check(&points).is_ok() {
            return Ok(points);
        }
    }
    Err(Error::Internal(
        "generator failed to reach general position after 256 attempts".into(),
    ))
}

const RANDOM_SALT: u64 = 0x51_7c_c1_b7_27_22_0a_95;
const ADV_SALT: u64 = 0xb5_02_6f_5a_a9_64_19_e9;

fn draw_random(size: usize, seed: u64, attempt: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ RANDOM_SALT.wrapping_mul(attempt + 1));
    let bound = 1i64 << 20;
    (0..size)
        .map(|_| {
            Point3::from_ints(
                rng.gen_range(-bound..=bound),
                rng.gen_range(-bound..=bound),
                rng.gen_range(-bound..=bound),
            )
        })
        .collect()
}

/// Lattice rational in (-1, 1) with denominator 2^18.
fn jitter(rng: &mut ChaCha8Rng) -> Scalar {
    let d = 1i64 << 18;
    BigRational::new(BigInt::from(rng.gen_range(-(d - 1)..d)), BigInt::from(d))
}

/// Lattice rational in (0, 1) with denominator 2^20.
fn unit_fraction(rng: &mut ChaCha8Rng) -> Scalar {
    let d = 1i64 << 20;
    BigRational::new(BigInt::from(rng.gen_range(1..d)), BigInt::from(d))
}

fn q(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The adversarial layout: `floor((size-1)/2)` near-circle points around the
/// unit circle in the plane `x = 0` centered at the origin, the remaining
/// `size - 1` group points flattened into a thin rectangle
/// `(1/4, 3/4] x (0, 2^-12]` of the xy-plane, and one extra point at
/// `x ~ 3/16` destined to carry the first plane when the prescribed normal is
/// `(1,0,0)`. Everything gets a tiny jitter; the groups stay strictly
/// separated by `x = 1/8`.
///
/// All coordinates are dyadic: a generated instance clears to small integers
/// under one power-of-two scale, which keeps the exact pipeline fast.
fn draw_adversarial(size: usize, seed: u64, attempt: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ADV_SALT.wrapping_mul(attempt + 1));
    let circle_count = (size - 1) / 2;
    let cluster_count = size - 1 - circle_count;
    let mut points = Vec::with_capacity(size);

    let eps = q(1, 1 << 12);
    // Dyadic spacing fine enough for the cluster to fit in (1/4, 3/4].
    let mut spacing_log = 2;
    while (cluster_count as i64 + 1) > (1i64 << (spacing_log - 1)) {
        spacing_log += 1;
    }
    for i in 0..cluster_count {
        // Evenly spread abscissas keep the slopes of halving pairs tame.
        let x = q(1, 4)
            + q((i as i64) + 1, 1 << spacing_log)
            + jitter(&mut rng) * q(1, 1 << 18);
        let y = &eps * unit_fraction(&mut rng);
        let z = jitter(&mut rng) * q(1, 1 << 10);
        points.push(Point3::new(x, y, z));
    }

    for j in 0..circle_count {
        // Dyadic point near angle 2*pi*(j + 1/2)/count on the unit circle.
        let theta =
            2.0 * std::f64::consts::PI * (j as f64 + 0.5) / circle_count.max(1) as f64;
        let snap = |v: f64| -> Scalar { q((v * (1 << 20) as f64).round() as i64, 1 << 20) };
        let x = jitter(&mut rng) * q(1, 1 << 10);
        points.push(Point3::new(
            x,
            snap(theta.cos()) + jitter(&mut rng) * q(1, 1 << 10),
            snap(theta.sin()) + jitter(&mut rng) * q(1, 1 << 10),
        ));
    }

    if points.len() < size {
        // The median carrier, strictly between the two groups in x.
        points.push(Point3::new(
            q(3, 16) + jitter(&mut rng) * q(1, 1 << 10),
            jitter(&mut rng),
            jitter(&mut rng),
        ));
    }
    points
}

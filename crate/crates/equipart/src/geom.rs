//! Core geometric types: points, oriented planes, sign vectors, affine maps,
//! and the homogeneous integer points used by the exact inner loops.

use crate::error::{Error, Result};
use crate::scalar::{int, scalar_string, Scalar, Sgn};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::fmt;

/// A point in R^3 with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Point3 { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Point3::new(int(x), int(y), int(z))
    }

    pub fn coords(&self) -> [&Scalar; 3] {
        [&self.x, &self.y, &self.z]
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            scalar_string(&self.x),
            scalar_string(&self.y),
            scalar_string(&self.z)
        )
    }
}

/// An oriented affine plane `{ x : <x, normal> = offset }`.
///
/// The normal picks the positive side: `H\u{207a} = { x : <x,normal> > offset }`.
/// Negating all four coefficients yields the same support with the sides
/// swapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedPlane {
    pub normal: [Scalar; 3],
    pub offset: Scalar,
}

impl OrientedPlane {
    pub fn new(normal: [Scalar; 3], offset: Scalar) -> Result<Self> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidInput("plane normal must be nonzero".into()));
        }
        Ok(OrientedPlane { normal, offset })
    }

    /// Horizontal plane `z = c`, oriented upward.
    pub fn horizontal(c: Scalar) -> Self {
        OrientedPlane {
            normal: [Scalar::zero(), Scalar::zero(), Scalar::one()],
            offset: c,
        }
    }

    /// `<p, normal> - offset`.
    pub fn eval(&self, p: &Point3) -> Scalar {
        &self.normal[0] * &p.x + &self.normal[1] * &p.y + &self.normal[2] * &p.z - &self.offset
    }

    /// Which side of the plane `p` lies on (`Pos` is the normal side).
    pub fn side(&self, p: &Point3) -> Sgn {
        Sgn::of(&self.eval(p))
    }

    /// `-H`: same support, opposite orientation.
    pub fn negated(&self) -> Self {
        OrientedPlane {
            normal: [
                -self.normal[0].clone(),
                -self.normal[1].clone(),
                -self.normal[2].clone(),
            ],
            offset: -self.offset.clone(),
        }
    }

    /// Rescales by a positive rational so the four coefficients become
    /// coprime integers. Orientation is preserved.
    pub fn normalized(&self) -> Self {
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
            g = g.gcd(v);
        }
        if g.is_zero() {
            g = BigInt::one();
        }
        let q = |v: &BigInt| BigRational::from_integer(v / &g);
        OrientedPlane {
            normal: [q(&ints[0]), q(&ints[1]), q(&ints[2])],
            offset: q(&ints[3]),
        }
    }

    pub fn coeff_strings(&self) -> [String; 4] {
        [
            scalar_string(&self.normal[0]),
            scalar_string(&self.normal[1]),
            scalar_string(&self.normal[2]),
            scalar_string(&self.offset),
        ]
    }
}

/// A string of k signs in {+,-}, k <= 3, indexing orthants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector {
    /// Bit i set means coordinate i is minus.
    minus_bits: u8,
    len: u8,
}

impl SignVector {
    pub fn new(signs: &[bool]) -> Self {
        // true = minus
        assert!((1..=3).contains(&signs.len()));
        let mut bits = 0u8;
        for (i, &m) in signs.iter().enumerate() {
            if m {
                bits |= 1 << i;
            }
        }
        SignVector {
            minus_bits: bits,
            len: signs.len() as u8,
        }
    }

    pub fn identity(len: usize) -> Self {
        assert!((1..=3).contains(&len));
        SignVector {
            minus_bits: 0,
            len: len as u8,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_identity(&self) -> bool {
        self.minus_bits == 0
    }

    pub fn minus_at(&self, i: usize) -> bool {
        self.minus_bits >> i & 1 == 1
    }

    /// All 2^k sign vectors of length `len`, identity first.
    pub fn all(len: usize) -> Vec<SignVector> {
        assert!((1..=3).contains(&len));
        (0..1u8 << len)
            .map(|bits| SignVector {
                minus_bits: bits,
                len: len as u8,
            })
            .collect()
    }

    /// Number of coordinates where both vectors are minus.
    pub fn minus_overlap(&self, other: &SignVector) -> u32 {
        debug_assert_eq!(self.len, other.len);
        (self.minus_bits & other.minus_bits).count_ones()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", if self.minus_at(i) { '-' } else { '+' })?;
        }
        Ok(())
    }
}

/// An invertible affine map `p -> M p + t` with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: [[Scalar; 3]; 3],
    pub translate: [Scalar; 3],
}

impl AffineMap {
    pub fn identity() -> Self {
        let z = Scalar::zero;
        let o = Scalar::one;
        AffineMap {
            linear: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]],
            translate: [z(), z(), z()],
        }
    }

    pub fn linear_map(m: [[Scalar; 3]; 3]) -> Self {
        AffineMap {
            linear: m,
            translate: [Scalar::zero(), Scalar::zero(), Scalar::zero()],
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        let row = |r: &[Scalar; 3], t: &Scalar| -> Scalar {
            &r[0] * &p.x + &r[1] * &p.y + &r[2] * &p.z + t
        };
        Point3 {
            x: row(&self.linear[0], &self.translate[0]),
            y: row(&self.linear[1], &self.translate[1]),
            z: row(&self.linear[2], &self.translate[2]),
        }
    }

    /// `self \u{2218} other`: applies `other` first.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let mut linear = std::array::from_fn(|_| std::array::from_fn(|_| Scalar::zero()));
        let lin: &mut [[Scalar; 3]; 3] = &mut linear;
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Scalar::zero();
                for (l, other_row) in other.linear.iter().enumerate() {
                    acc += &self.linear[i][l] * &other_row[j];
                }
                lin[i][j] = acc;
            }
        }
        let mut translate = std::array::from_fn(|_| Scalar::zero());
        let tr: &mut [Scalar; 3] = &mut translate;
        for i in 0..3 {
            let mut acc = self.translate[i].clone();
            for (l, t) in other.translate.iter().enumerate() {
                acc += &self.linear[i][l] * t;
            }
            tr[i] = acc;
        }
        AffineMap { linear, translate }
    }

    pub fn det(&self) -> Scalar {
        let m = &self.linear;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::Internal("singular affine map".into()));
        }
        let m = &self.linear;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| -> Scalar {
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        };
        // Inverse of the linear part via the adjugate.
        let inv = [
            [cof(1, 2, 1, 2) / &d, -(cof(0, 2, 1, 2) / &d), cof(0, 1, 1, 2) / &d],
            [-(cof(1, 2, 0, 2) / &d), cof(0, 2, 0, 2) / &d, -(cof(0, 1, 0, 2) / &d)],
            [cof(1, 2, 0, 1) / &d, -(cof(0, 2, 0, 1) / &d), cof(0, 1, 0, 1) / &d],
        ];
        let mut t = std::array::from_fn(|_| Scalar::zero());
        let tr: &mut [Scalar; 3] = &mut t;
        for i in 0..3 {
            let mut acc = Scalar::zero();
            for (l, tl) in self.translate.iter().enumerate() {
                acc -= &inv[i][l] * tl;
            }
            tr[i] = acc;
        }
        Ok(AffineMap {
            linear: inv,
            translate: t,
        })
    }

    /// Given a plane in the image frame, returns the plane in the source
    /// frame whose image is the given plane. Offsets follow from
    /// `<M p + t, w> = a  <=>  <p, M^T w> = a - <t, w>`.
    pub fn pullback_plane(&self, plane: &OrientedPlane) -> OrientedPlane {
        let w = &plane.normal;
        let col = |j: usize| -> Scalar {
            &self.linear[0][j] * &w[0] + &self.linear[1][j] * &w[1] + &self.linear[2][j] * &w[2]
        };
        let shift: Scalar = self
            .translate
            .iter()
            .zip(w.iter())
            .map(|(t, wi)| t * wi)
            .sum();
        OrientedPlane {
            normal: [col(0), col(1), col(2)],
            offset: &plane.offset - shift,
        }
    }
}

/// A point in R^3 as an integer homogeneous 4-tuple `(x, y, z, w)`, `w > 0`,
/// representing `(x/w, y/w, z/w)`. Kept reduced so coordinate sizes stay
/// bounded along long traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomPoint {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
    pub w: BigInt,
}

impl HomPoint {
    pub fn new(x: BigInt, y: BigInt, z: BigInt, w: BigInt) -> Self {
        debug_assert!(w.is_positive());
        let mut p = HomPoint { x, y, z, w };
        p.reduce();
        p
    }

    pub fn from_point(p: &Point3) -> Self {
        let l = crate::scalar::denominator_lcm(p.coords().into_iter());
        let conv = |q: &Scalar| (q * BigRational::from_integer(l.clone())).numer().clone();
        HomPoint::new(conv(&p.x), conv(&p.y), conv(&p.z), l)
    }

    pub fn to_point(&self) -> Point3 {
        Point3 {
            x: BigRational::new(self.x.clone(), self.w.clone()),
            y: BigRational::new(self.y.clone(), self.w.clone()),
            z: BigRational::new(self.z.clone(), self.w.clone()),
        }
    }

    fn reduce(&mut self) {
        let mut g = self.w.clone();
        for v in [&self.x, &self.y, &self.z] {
            g = g.gcd(v);
            if g.is_one() {
                return;
            }
        }
        self.x = &self.x / &g;
        self.y = &self.y / &g;
        self.z = &self.z / &g;
        self.w = &self.w / &g;
    }

    /// Midpoint of two points.
    pub fn midpoint(a: &HomPoint, b: &HomPoint) -> HomPoint {
        HomPoint::new(
            &a.x * &b.w + &b.x * &a.w,
            &a.y * &b.w + &b.y * &a.w,
            &a.z * &b.w + &b.z * &a.w,
            BigInt::from(2) * &a.w * &b.w,
        )
    }

    /// `self + s * dir` for an integer direction.
    pub fn offset_by(&self, dir: &[BigInt; 3], s: i64) -> HomPoint {
        let s = BigInt::from(s);
        HomPoint::new(
            &self.x + &self.w * &dir[0] * &s,
            &self.y + &self.w * &dir[1] * &s,
            &self.z + &self.w * &dir[2] * &s,
            self.w.clone(),
        )
    }

    /// Compares the y-coordinates of two points.
    pub fn cmp_y(&self, other: &HomPoint) -> std::cmp::Ordering {
        (&self.y * &other.w).cmp(&(&other.y * &self.w))
    }
}

/// A plane through up to three points. Used by the trivial small-input
/// branch, where every input point must land on one of the output planes.
///
/// Collinear or repeated points are fine; some plane through them is
/// returned. With no points this is the `z = 0` plane.
pub fn plane_through(points: &[&Point3]) -> OrientedPlane {
    assert!(points.len() <= 3);
    match points.len() {
        0 => OrientedPlane::horizontal(Scalar::zero()),
        1 => OrientedPlane::horizontal(points[0].z.clone()),
        2 => plane_containing_two(points[0], points[1]),
        _ => {
            let (a, b, c) = (points[0], points[1], points[2]);
            let u = [&b.x - &a.x, &b.y - &a.y, &b.z - &a.z];
            let v = [&c.x - &a.x, &c.y - &a.y, &c.z - &a.z];
            let n = cross(&u, &v);
            if n.iter().all(|q| q.is_zero()) {
                // Collinear (or coincident): fall back to a containing plane.
                return plane_containing_two(a, b);
            }
            let offset = &n[0] * &a.x + &n[1] * &a.y + &n[2] * &a.z;
            OrientedPlane { normal: n, offset }
        }
    }
}

fn plane_containing_two(a: &Point3, b: &Point3) -> OrientedPlane {
    let d = [&b.x - &a.x, &b.y - &a.y, &b.z - &a.z];
    if d.iter().all(|q| q.is_zero()) {
        return OrientedPlane::horizontal(a.z.clone());
    }
    // Cross the segment direction with whichever axis is least aligned.
    for axis in [
        [Scalar::one(), Scalar::zero(), Scalar::zero()],
        [Scalar::zero(), Scalar::one(), Scalar::zero()],
        [Scalar::zero(), Scalar::zero(), Scalar::one()],
    ] {
        let n = cross(&d, &axis);
        if !n.iter().all(|q| q.is_zero()) {
            let offset = &n[0] * &a.x + &n[1] * &a.y + &n[2] * &a.z;
            return OrientedPlane { normal: n, offset };
        }
    }
    unreachable!("nonzero vector crosses some axis nontrivially")
}

fn cross<T: std::borrow::Borrow<Scalar>>(u: &[T; 3], v: &[T; 3]) -> [Scalar; 3] {
    let (u0, u1, u2) = (u[0].borrow(), u[1].borrow(), u[2].borrow());
    let (v0, v1, v2) = (v[0].borrow(), v[1].borrow(), v[2].borrow());
    [u1 * v2 - u2 * v1, u2 * v0 - u0 * v2, u0 * v1 - u1 * v0]
}

/// Integer rotation-like matrix whose third row is a positive multiple of
/// `v`; used to turn the prescribed direction into "vertical". The rows are
/// mutually orthogonal, so the map is a rotation composed with positive
/// axis scalings.
pub fn rotation_to_vertical(v: &[Scalar; 3]) -> Result<[[Scalar; 3]; 3]> {
    if v.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidInput("direction vector must be nonzero".into()));
    }
    // Clear denominators and strip the content so the rows stay small.
    let l = crate::scalar::denominator_lcm(v.iter());
    let mut vi: Vec<BigInt> = v
        .iter()
        .map(|q| (q * BigRational::from_integer(l.clone())).numer().clone())
        .collect();
    let mut g = BigInt::zero();
    for c in &vi {
        g = g.gcd(c);
    }
    for c in &mut vi {
        *c = &*c / &g;
    }
    let v3: [Scalar; 3] = std::array::from_fn(|i| BigRational::from_integer(vi[i].clone()));
    if v3[0].is_zero() && v3[1].is_zero() {
        // Already vertical: keep the frame (flip y to preserve orientation
        // when pointing down).
        let s = if v3[2].is_positive() { Scalar::one() } else { -Scalar::one() };
        return Ok([
            [Scalar::one(), Scalar::zero(), Scalar::zero()],
            [Scalar::zero(), s.clone(), Scalar::zero()],
            [Scalar::zero(), Scalar::zero(), s],
        ]);
    }
    let axes = [
        [Scalar::one(), Scalar::zero(), Scalar::zero()],
        [Scalar::zero(), Scalar::one(), Scalar::zero()],
        [Scalar::zero(), Scalar::zero(), Scalar::one()],
    ];
    for axis in &axes {
        let r1 = cross(&v3, axis);
        if r1.iter().all(|q| q.is_zero()) {
            continue;
        }
        let r2 = cross(&v3, &r1);
        // det [r1; r2; v] = |r1|^2 |v|^2 > 0.
        return Ok([r1, r2, v3]);
    }
    unreachable!("nonzero v is not parallel to all three axes")
}

//! Text formats.
//!
//! Point files are UTF-8 text, one point per line, fields separated by
//! whitespace; each field is a decimal literal (`-3`, `4.25`, `1.5e-3`) or a
//! rational `num/den`. Lines whose first non-blank character is `#` and
//! blank lines are ignored. Weighted planar files carry `x y weight`; plane
//! files carry exactly three data lines of four fields (normal and offset).

use crate::error::{Error, Result};
use crate::geom::{OrientedPlane, Point3};
use crate::planar::WeightedPoint2;
use crate::scalar::{scalar_string, Scalar};
use num::{BigInt, BigRational, Signed, Zero};

/// Parses one number: decimal literal or `num/den` rational.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    parse_scalar_inner(text).ok_or_else(|| Error::Parse {
        line: 0,
        msg: format!("malformed number `{text}`"),
    })
}

fn parse_scalar_inner(text: &str) -> Option<Scalar> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let n = parse_int(num)?;
        let d = parse_int(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    // Decimal: [sign] digits [. digits] [e [sign] digits]
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e.parse().ok()?;
            // Untrusted input must not force astronomically long integers.
            if exp.unsigned_abs() > 65_536 {
                return None;
            }
            (m, exp)
        }
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigInt::parse_bytes(joined.as_bytes(), 10)?;
    if sign < 0 {
        value = -value;
    }
    let shift = exp as i64 - frac_part.len() as i64;
    Some(apply_pow10(value, shift))
}

fn apply_pow10(value: BigInt, shift: i64) -> Scalar {
    if shift >= 0 {
        BigRational::from_integer(value * BigInt::from(10u32).pow(shift as u32))
    } else {
        BigRational::new(value, BigInt::from(10u32).pow((-shift) as u32))
    }
}

fn parse_int(text: &str) -> Option<BigInt> {
    let text = text.trim();
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, text.strip_prefix('+').unwrap_or(text)),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut v = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    if sign < 0 {
        v = -v;
    }
    Some(v)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn fields_of(line: usize, text: &str, expected: usize) -> Result<Vec<Scalar>> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line,
            msg: format!("expected {expected} fields, found {}", fields.len()),
        });
    }
    fields
        .into_iter()
        .map(|f| {
            parse_scalar_inner(f).ok_or_else(|| Error::Parse {
                line,
                msg: format!("malformed number `{f}`"),
            })
        })
        .collect()
}

/// Parses a 3D point file.
pub fn parse_points3(text: &str) -> Result<Vec<Point3>> {
    let mut out = Vec::new();
    for (line, content) in data_lines(text) {
        let mut f = fields_of(line, content, 3)?;
        let z = f.pop().expect("three fields");
        let y = f.pop().expect("two fields");
        let x = f.pop().expect("one field");
        out.push(Point3::new(x, y, z));
    }
    Ok(out)
}

/// Parses a weighted planar point file (`x y weight` per line).
pub fn parse_weighted2(text: &str) -> Result<Vec<WeightedPoint2>> {
    let mut out = Vec::new();
    for (line, content) in data_lines(text) {
        let mut f = fields_of(line, content, 3)?;
        let w = f.pop().expect("three fields");
        let y = f.pop().expect("two fields");
        let x = f.pop().expect("one field");
        if !w.is_positive() {
            return Err(Error::Parse {
                line,
                msg: "weight must be positive".into(),
            });
        }
        out.push(WeightedPoint2 { x, y, weight: w });
    }
    Ok(out)
}

/// Parses a plane-triple file: exactly three data lines of four fields each.
pub fn parse_planes3(text: &str) -> Result<[OrientedPlane; 3]> {
    let mut planes = Vec::new();
    for (line, content) in data_lines(text) {
        let mut f = fields_of(line, content, 4)?;
        let offset = f.pop().expect("four fields");
        let n3 = f.pop().expect("three fields");
        let n2 = f.pop().expect("two fields");
        let n1 = f.pop().expect("one field");
        let plane = OrientedPlane::new([n1, n2, n3], offset).map_err(|_| Error::Parse {
            line,
            msg: "plane normal must be nonzero".into(),
        })?;
        planes.push(plane);
    }
    planes.try_into().map_err(|v: Vec<OrientedPlane>| Error::Parse {
        line: 0,
        msg: format!("expected exactly 3 planes, found {}", v.len()),
    })
}

/// Parses a comma-separated direction like `0,0,1` or `1/2,-1,3.5`.
pub fn parse_direction3(text: &str) -> Result<[Scalar; 3]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected three comma-separated numbers, found {}", parts.len()),
        });
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(parse_scalar(p)?);
    }
    if out.iter().all(|c| c.is_zero()) {
        return Err(Error::Parse {
            line: 0,
            msg: "direction must be nonzero".into(),
        });
    }
    Ok(out.try_into().expect("three entries"))
}

/// Parses a 2D direction like `0,1`.
pub fn parse_direction2(text: &str) -> Result<[Scalar; 2]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected two comma-separated numbers, found {}", parts.len()),
        });
    }
    let mut out = Vec::with_capacity(2);
    for p in parts {
        out.push(parse_scalar(p)?);
    }
    if out.iter().all(|c| c.is_zero()) {
        return Err(Error::Parse {
            line: 0,
            msg: "direction must be nonzero".into(),
        });
    }
    Ok(out.try_into().expect("two entries"))
}

/// Formats points in the syntax `parse_points3` accepts.
pub fn format_points3(points: &[Point3]) -> String {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!(
            "{} {} {}\n",
            scalar_string(&p.x),
            scalar_string(&p.y),
            scalar_string(&p.z)
        ));
    }
    out
}

/// The plain-text plane format: three lines of four exact rationals.
pub fn format_planes3(planes: &[OrientedPlane; 3]) -> String {
    let mut out = String::new();
    for plane in planes {
        let c = plane.coeff_strings();
        out.push_str(&format!("{} {} {} {}\n", c[0], c[1], c[2], c[3]));
    }
    out
}

//! Closed convex feasible sets and their Euclidean projections.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::descriptor::{fmt_list, Value};
use crate::error::{check_dim, invalid, Result};

pub type Vector = DVector<f64>;

/// A closed convex set in R^n.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vector,
        upper: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    /// `{ v >= 0, sum(v) = scale }`
    Simplex {
        dim: usize,
        scale: f64,
    },
    /// Cartesian product; blocks occupy consecutive coordinates.
    Product(Vec<ConstraintSet>),
}

/// Diameter or norm bound of a set, which may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Extent {
    Finite(f64),
    Unbounded,
}

impl Extent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Unbounded => None,
        }
    }
}

impl ConstraintSet {
    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("set dimension must be positive"));
        }
        Ok(ConstraintSet::WholeSpace { dim })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(invalid("box must have at least one coordinate"));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(invalid(format!(
                    "box coordinate {i}: lower {l} exceeds upper {u}"
                )));
            }
        }
        Ok(ConstraintSet::Box {
            lower: Vector::from_vec(lower),
            upper: Vector::from_vec(upper),
        })
    }

    /// `[lo, hi]^dim`
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("ball must have at least one coordinate"));
        }
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!(
                "ball radius must be finite and non-negative, got {radius}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("ball center must be finite"));
        }
        Ok(ConstraintSet::Ball {
            center: Vector::from_vec(center),
            radius,
        })
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("simplex dimension must be positive"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid(format!(
                "simplex scale must be positive, got {scale}"
            )));
        }
        Ok(ConstraintSet::Simplex { dim, scale })
    }

    pub fn product(blocks: Vec<ConstraintSet>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("product needs at least one block"));
        }
        Ok(ConstraintSet::Product(blocks))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::WholeSpace { dim } | ConstraintSet::Simplex { dim, .. } => *dim,
            ConstraintSet::Box { lower, .. } => lower.len(),
            ConstraintSet::Ball { center, .. } => center.len(),
            ConstraintSet::Product(blocks) => blocks.iter().map(|b| b.dim()).sum(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.diameter(), Extent::Finite(_))
    }

    /// Euclidean projection.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        check_dim(self.dim(), v.len())?;
        if v.iter().any(|c| c.is_nan()) {
            return Err(invalid("cannot project a vector containing NaN"));
        }
        Ok(self.project_unchecked(v))
    }

    pub(crate) fn project_unchecked(&self, v: &Vector) -> Vector {
        match self {
            ConstraintSet::WholeSpace { .. } => v.clone(),
            ConstraintSet::Box { lower, upper } => {
                Vector::from_fn(v.len(), |i, _| v[i].clamp(lower[i], upper[i]))
            }
            ConstraintSet::Ball { center, radius } => {
                let d = v - center;
                let n = d.norm();
                if n <= *radius {
                    v.clone()
                } else {
                    center + d * (*radius / n)
                }
            }
            ConstraintSet::Simplex { scale, .. } => project_simplex(v, *scale),
            ConstraintSet::Product(blocks) => {
                let mut out = Vector::zeros(v.len());
                let mut off = 0;
                for b in blocks {
                    let n = b.dim();
                    let part = b.project_unchecked(&v.rows(off, n).into_owned());
                    out.rows_mut(off, n).copy_from(&part);
                    off += n;
                }
                out
            }
        }
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> Result<bool> {
        check_dim(self.dim(), v.len())?;
        Ok(self.contains_unchecked(v, tol))
    }

    fn contains_unchecked(&self, v: &Vector, tol: f64) -> bool {
        if v.iter().any(|c| c.is_nan()) {
            return false;
        }
        match self {
            ConstraintSet::WholeSpace { .. } => true,
            ConstraintSet::Box { lower, upper } => {
                (0..v.len()).all(|i| v[i] >= lower[i] - tol && v[i] <= upper[i] + tol)
            }
            ConstraintSet::Ball { center, radius } => (v - center).norm() <= radius + tol,
            ConstraintSet::Simplex { scale, .. } => {
                v.iter().all(|&c| c >= -tol) && (v.sum() - scale).abs() <= tol
            }
            ConstraintSet::Product(blocks) => {
                let mut off = 0;
                blocks.iter().all(|b| {
                    let n = b.dim();
                    let ok = b.contains_unchecked(&v.rows(off, n).into_owned(), tol);
                    off += n;
                    ok
                })
            }
        }
    }

    pub fn diameter(&self) -> Extent {
        match self {
            ConstraintSet::WholeSpace { .. } => Extent::Unbounded,
            ConstraintSet::Box { lower, upper } => finite_or_unbounded((upper - lower).norm()),
            ConstraintSet::Ball { radius, .. } => Extent::Finite(2.0 * radius),
            ConstraintSet::Simplex { dim, scale } => Extent::Finite(if *dim > 1 {
                scale * std::f64::consts::SQRT_2
            } else {
                0.0
            }),
            ConstraintSet::Product(blocks) => sum_of_squares(blocks.iter().map(|b| b.diameter())),
        }
    }

    /// `max { ||v|| : v in set }`
    pub fn max_norm(&self) -> Extent {
        match self {
            ConstraintSet::WholeSpace { .. } => Extent::Unbounded,
            ConstraintSet::Box { lower, upper } => {
                let s: f64 = lower
                    .iter()
                    .zip(upper.iter())
                    .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                    .sum();
                finite_or_unbounded(s.sqrt())
            }
            ConstraintSet::Ball { center, radius } => Extent::Finite(center.norm() + radius),
            ConstraintSet::Simplex { scale, .. } => Extent::Finite(*scale),
            ConstraintSet::Product(blocks) => sum_of_squares(blocks.iter().map(|b| b.max_norm())),
        }
    }

    /// Smallest axis-aligned box containing the set, if bounded.
    pub fn bounding_box(&self) -> Option<(Vector, Vector)> {
        match self {
            ConstraintSet::WholeSpace { .. } => None,
            ConstraintSet::Box { lower, upper } => {
                if lower.iter().chain(upper.iter()).all(|c| c.is_finite()) {
                    Some((lower.clone(), upper.clone()))
                } else {
                    None
                }
            }
            ConstraintSet::Ball { center, radius } => {
                Some((center.add_scalar(-radius), center.add_scalar(*radius)))
            }
            ConstraintSet::Simplex { dim, scale } => {
                Some((Vector::zeros(*dim), Vector::from_element(*dim, *scale)))
            }
            ConstraintSet::Product(blocks) => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for b in blocks {
                    let (l, h) = b.bounding_box()?;
                    lo.extend(l.iter());
                    hi.extend(h.iter());
                }
                Some((Vector::from_vec(lo), Vector::from_vec(hi)))
            }
        }
    }

    /// Parses the descriptor syntax printed by `Display`.
    pub fn from_descriptor(v: &Value) -> Result<Self> {
        let c = v
            .as_call()
            .ok_or_else(|| invalid(format!("expected a set descriptor, got '{v}'")))?;
        match c.name.as_str() {
            "whole" | "whole_space" => {
                c.expect_keys(&["dim"])?;
                Self::whole_space(c.usize_or("dim", 0)?)
            }
            "box" => {
                c.expect_keys(&["lower", "upper", "dim", "lo", "hi"])?;
                if c.get("lower").is_some() {
                    Self::boxed(c.require_list("lower")?, c.require_list("upper")?)
                } else {
                    let dim = c.usize_or("dim", 0)?;
                    Self::cube(dim, c.require_f64("lo")?, c.require_f64("hi")?)
                }
            }
            "ball" => {
                c.expect_keys(&["center", "radius", "dim"])?;
                let center = match c.get("center") {
                    Some(_) => c.require_list("center")?,
                    None => vec![0.0; c.usize_or("dim", 0)?],
                };
                Self::ball(center, c.require_f64("radius")?)
            }
            "simplex" => {
                c.expect_keys(&["dim", "scale"])?;
                Self::simplex(c.usize_or("dim", 0)?, c.f64_or("scale", 1.0)?)
            }
            "product" => {
                c.expect_keys(&[])?;
                let blocks = c
                    .positional()
                    .map(Self::from_descriptor)
                    .collect::<Result<_>>()?;
                Self::product(blocks)
            }
            other => Err(invalid(format!("unknown set kind '{other}'"))),
        }
    }
}

impl std::str::FromStr for ConstraintSet {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_descriptor(&Value::parse(s)?)
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSet::WholeSpace { dim } => write!(f, "whole(dim={dim})"),
            ConstraintSet::Box { lower, upper } => write!(
                f,
                "box(lower={}, upper={})",
                fmt_list(lower.as_slice()),
                fmt_list(upper.as_slice())
            ),
            ConstraintSet::Ball { center, radius } => {
                write!(
                    f,
                    "ball(center={}, radius={radius})",
                    fmt_list(center.as_slice())
                )
            }
            ConstraintSet::Simplex { dim, scale } => write!(f, "simplex(dim={dim}, scale={scale})"),
            ConstraintSet::Product(blocks) => {
                f.write_str("product(")?;
                for (i, b) in blocks.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{b}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn finite_or_unbounded(v: f64) -> Extent {
    if v.is_finite() {
        Extent::Finite(v)
    } else {
        Extent::Unbounded
    }
}

fn sum_of_squares(parts: impl Iterator<Item = Extent>) -> Extent {
    let mut s = 0.0;
    for p in parts {
        match p {
            Extent::Finite(v) => s += v * v,
            Extent::Unbounded => return Extent::Unbounded,
        }
    }
    Extent::Finite(s.sqrt())
}

/// Sort-and-threshold projection onto `{ w >= 0, sum(w) = scale }`.
fn project_simplex(v: &Vector, scale: f64) -> Vector {
    let mut u: Vec<f64> = v.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - scale) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.map(|c| (c - theta).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn box_clamps_coordinatewise() {
        let b = ConstraintSet::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(b.project(&v(&[2.0, -1.0])).unwrap(), v(&[1.0, 0.0]));
    }

    #[test]
    fn ball_scales_radially() {
        let b = ConstraintSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = b.project(&v(&[3.0, 4.0])).unwrap();
        assert_relative_eq!(p, v(&[0.6, 0.8]), epsilon = 1e-15);
    }

    #[test]
    fn simplex_examples() {
        let s = ConstraintSet::simplex(2, 1.0).unwrap();
        assert_relative_eq!(s.project(&v(&[0.5, 0.5])).unwrap(), v(&[0.5, 0.5]));
        let s3 = ConstraintSet::simplex(3, 1.0).unwrap();
        assert_relative_eq!(
            s3.project(&v(&[1.0, 1.0, 1.0])).unwrap(),
            v(&[1.0, 1.0, 1.0]) / 3.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(s.project(&v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));
    }

    #[test]
    fn whole_space_is_identity_and_unbounded() {
        let w = ConstraintSet::whole_space(3).unwrap();
        let x = v(&[1.0, -2.0, 7.5]);
        assert_eq!(w.project(&x).unwrap(), x);
        assert_eq!(w.diameter(), Extent::Unbounded);
        assert_eq!(w.max_norm(), Extent::Unbounded);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = ConstraintSet::cube(2, 0.0, 1.0).unwrap();
        assert!(b.project(&v(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn diameters_and_norms() {
        let b = ConstraintSet::cube(2, -1.0, 1.0).unwrap();
        assert_relative_eq!(b.diameter().finite().unwrap(), 8f64.sqrt());
        assert_relative_eq!(b.max_norm().finite().unwrap(), 2f64.sqrt());
        let ball = ConstraintSet::ball(vec![3.0, 4.0], 1.0).unwrap();
        assert_eq!(ball.diameter(), Extent::Finite(2.0));
        assert_eq!(ball.max_norm(), Extent::Finite(6.0));
        let s = ConstraintSet::simplex(3, 2.0).unwrap();
        assert_relative_eq!(s.diameter().finite().unwrap(), 2.0 * 2f64.sqrt());
    }

    #[test]
    fn invalid_constructors() {
        assert!(ConstraintSet::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(ConstraintSet::ball(vec![0.0], -1.0).is_err());
        assert!(ConstraintSet::simplex(2, 0.0).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        let sets = [
            ConstraintSet::boxed(vec![-1.0, 0.25], vec![1.0, 3.0]).unwrap(),
            ConstraintSet::ball(vec![0.1, 0.2], 0.7).unwrap(),
            ConstraintSet::simplex(4, 1.5).unwrap(),
            ConstraintSet::whole_space(2).unwrap(),
            ConstraintSet::product(vec![
                ConstraintSet::ball(vec![0.0], 1.0).unwrap(),
                ConstraintSet::cube(1, -2.0, 2.0).unwrap(),
            ])
            .unwrap(),
        ];
        for s in sets {
            let back: ConstraintSet = s.to_string().parse().unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn product_projects_blockwise() {
        let p = ConstraintSet::product(vec![
            ConstraintSet::ball(vec![0.0, 0.0], 1.0).unwrap(),
            ConstraintSet::cube(1, 0.0, 1.0).unwrap(),
        ])
        .unwrap();
        let out = p.project(&v(&[3.0, 4.0, 5.0])).unwrap();
        assert_relative_eq!(out, v(&[0.6, 0.8, 1.0]), epsilon = 1e-15);
    }
}

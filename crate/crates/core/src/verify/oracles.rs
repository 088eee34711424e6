use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::{ConstraintSet, Vector};
use crate::objective::{check_symmetric, eigen_range, zoo, Matrix, MinimaxProblem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    pub points: usize,
    pub max_rel_error_x: f64,
    pub max_rel_error_y: f64,
    pub pass: bool,
}

impl FdReport {
    pub fn max_rel_error(&self) -> f64 {
        self.max_rel_error_x.max(self.max_rel_error_y)
    }
}

/// Tolerance on the relative gradient error used by [`finite_diff_check`].
pub const FD_RTOL: f64 = 1e-6;

/// Random point of a set, pulled 10% toward a fixed feasible anchor.
pub(crate) fn sample_point(set: &ConstraintSet, rng: &mut impl Rng) -> Vector {
    let n = set.dim();
    match set.bounding_box() {
        None => Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)),
        Some((lo, hi)) => {
            let u = Vector::from_fn(n, |i, _| lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>());
            let anchor = set.project_unchecked(&((&lo + &hi) * 0.5));
            let p = set.project_unchecked(&u);
            &anchor + (p - &anchor) * 0.9
        }
    }
}

fn central_diff(f: impl Fn(&Vector) -> f64, at: &Vector) -> Vector {
    let h0 = f64::EPSILON.cbrt();
    Vector::from_fn(at.len(), |i, _| {
        let h = h0 * (1.0 + at[i].abs());
        let mut p = at.clone();
        let mut m = at.clone();
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (p[i] - m[i])
    })
}

fn rel_error(fd: &Vector, analytic: &Vector) -> f64 {
    (fd - analytic).norm() / analytic.norm().max(1.0)
}

/// Compares analytic gradients with central differences at random points.
///
/// The relative error is `|g_fd - g| / max(|g|, 1)`, with step
/// `eps^{1/3} (1 + |coordinate|)`.
pub fn finite_diff_check(problem: &MinimaxProblem, n_points: usize, seed: u64) -> Result<FdReport> {
    if n_points == 0 {
        return Err(invalid("finite_diff_check needs at least one point"));
    }
    let mut rng = zoo::rng(seed);
    let (mut ex, mut ey) = (0.0f64, 0.0f64);
    for _ in 0..n_points {
        let x = sample_point(&problem.x_set, &mut rng);
        let y = sample_point(&problem.y_set, &mut rng);
        let fx = central_diff(|v| problem.value(v, &y), &x);
        let fy = central_diff(|v| problem.value(&x, v), &y);
        let ax = rel_error(&fx, &problem.grad_x(&x, &y));
        let ay = rel_error(&fy, &problem.grad_y(&x, &y));
        ex = if ax.is_nan() {
            f64::INFINITY
        } else {
            ex.max(ax)
        };
        ey = if ay.is_nan() {
            f64::INFINITY
        } else {
            ey.max(ay)
        };
    }
    Ok(FdReport {
        points: n_points,
        max_rel_error_x: ex,
        max_rel_error_y: ey,
        pass: ex <= FD_RTOL && ey <= FD_RTOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SaddleOracle {
    Saddle {
        x: Vector,
        y: Vector,
    },
    /// A or C is not positive definite, or the optimality system is singular
    Indefinite,
}

/// Unconstrained saddle of `x'Ax/2 + a'x + x'By - y'Cy/2 - c'y` from the
/// linear system `Ax + By = -a`, `B'x - Cy = c`.
pub fn saddle_oracle_quadratic(
    a_mat: &Matrix,
    b_mat: &Matrix,
    c_mat: &Matrix,
    a_lin: &Vector,
    c_lin: &Vector,
) -> Result<SaddleOracle> {
    check_symmetric(a_mat, "A")?;
    check_symmetric(c_mat, "C")?;
    let (nx, ny) = (a_mat.nrows(), c_mat.nrows());
    check_dim(nx, b_mat.nrows())?;
    check_dim(ny, b_mat.ncols())?;
    check_dim(nx, a_lin.len())?;
    check_dim(ny, c_lin.len())?;
    if eigen_range(a_mat).0 <= 0.0 || eigen_range(c_mat).0 <= 0.0 {
        return Ok(SaddleOracle::Indefinite);
    }
    let n = nx + ny;
    let mut kkt = DMatrix::zeros(n, n);
    kkt.view_mut((0, 0), (nx, nx)).copy_from(a_mat);
    kkt.view_mut((0, nx), (nx, ny)).copy_from(b_mat);
    kkt.view_mut((nx, 0), (ny, nx))
        .copy_from(&b_mat.transpose());
    kkt.view_mut((nx, nx), (ny, ny)).copy_from(&(-c_mat));
    let mut rhs = Vector::zeros(n);
    rhs.rows_mut(0, nx).copy_from(&(-a_lin));
    rhs.rows_mut(nx, ny).copy_from(c_lin);
    match kkt.lu().solve(&rhs) {
        Some(z) if z.iter().all(|v| v.is_finite()) => Ok(SaddleOracle::Saddle {
            x: z.rows(0, nx).into_owned(),
            y: z.rows(nx, ny).into_owned(),
        }),
        _ => Ok(SaddleOracle::Indefinite),
    }
}

/// Grid extremes of `f` over `X x Y`, with a rigorous padding.
///
/// `pad` bounds how far the true extremes can lie outside `[min, max]`:
/// every feasible point is within `delta` of a projected grid point, so
/// `|f(z) - f(g)| <= |grad f(g)| delta + L delta^2 / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridExtremum {
    pub min: f64,
    pub max: f64,
    pub pad: f64,
    pub resolution: usize,
    pub points: usize,
}

impl GridExtremum {
    pub fn lower(&self) -> f64 {
        self.min - self.pad
    }

    pub fn upper(&self) -> f64 {
        self.max + self.pad
    }
}

pub const GRID_POINT_LIMIT: usize = 10_000_000;

pub fn grid_extremum(problem: &MinimaxProblem, resolution: usize) -> Result<GridExtremum> {
    if resolution < 2 {
        return Err(invalid("grid resolution must be at least 2"));
    }
    let (bx, by) = match (problem.x_set.bounding_box(), problem.y_set.bounding_box()) {
        (Some(bx), Some(by)) => (bx, by),
        _ => {
            return Err(Error::Unsupported(
                "grid search needs bounded X and Y".into(),
            ))
        }
    };
    let (nx, ny) = (problem.dim_x(), problem.dim_y());
    let d = nx + ny;
    let total = (resolution as f64).powi(d as i32);
    if total > GRID_POINT_LIMIT as f64 {
        return Err(Error::Unsupported(format!(
            "grid of {resolution}^{d} points exceeds the limit of {GRID_POINT_LIMIT}"
        )));
    }
    let lo: Vec<f64> = bx.0.iter().chain(by.0.iter()).copied().collect();
    let hi: Vec<f64> = bx.1.iter().chain(by.1.iter()).copied().collect();
    let step: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) / (resolution - 1) as f64)
        .collect();
    let delta = 0.5 * step.iter().map(|s| s * s).sum::<f64>().sqrt();

    let mut idx = vec![0usize; d];
    let (mut fmin, mut fmax, mut gmax) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    let mut points = 0;
    loop {
        let x = Vector::from_fn(nx, |i, _| lo[i] + step[i] * idx[i] as f64);
        let y = Vector::from_fn(ny, |j, _| lo[nx + j] + step[nx + j] * idx[nx + j] as f64);
        let x = problem.x_set.project_unchecked(&x);
        let y = problem.y_set.project_unchecked(&y);
        let v = problem.value(&x, &y);
        fmin = fmin.min(v);
        fmax = fmax.max(v);
        let g =
            (problem.grad_x(&x, &y).norm_squared() + problem.grad_y(&x, &y).norm_squared()).sqrt();
        gmax = gmax.max(g);
        points += 1;

        let mut i = 0;
        loop {
            if i == d {
                let pad = gmax * delta + problem.constants.joint_lipschitz() * delta * delta / 2.0;
                return Ok(GridExtremum {
                    min: fmin,
                    max: fmax,
                    pad,
                    resolution,
                    points,
                });
            }
            idx[i] += 1;
            if idx[i] < resolution {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Lower and upper bounds on `f` over `X x Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionRange {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds from a Taylor estimate around a feasible point, tightened by a
/// padded grid search when the grid is small enough.
pub fn function_range(problem: &MinimaxProblem) -> Result<FunctionRange> {
    let (sx, sy) = match (
        problem.x_set.diameter().finite(),
        problem.y_set.diameter().finite(),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "function range needs bounded X and Y".into(),
            ))
        }
    };
    let (bx, by) = (
        problem.x_set.bounding_box().expect("bounded"),
        problem.y_set.bounding_box().expect("bounded"),
    );
    let x0 = problem.x_set.project_unchecked(&((&bx.0 + &bx.1) * 0.5));
    let y0 = problem.y_set.project_unchecked(&((&by.0 + &by.1) * 0.5));
    let r = (sx * sx + sy * sy).sqrt();
    let f0 = problem.value(&x0, &y0);
    let g0 =
        (problem.grad_x(&x0, &y0).norm_squared() + problem.grad_y(&x0, &y0).norm_squared()).sqrt();
    let spread = g0 * r + problem.constants.joint_lipschitz() * r * r / 2.0;
    let mut range = FunctionRange {
        lower: f0 - spread,
        upper: f0 + spread,
    };

    let d = (problem.dim_x() + problem.dim_y()) as f64;
    let res = (2e5f64.powf(1.0 / d).floor() as usize).min(201);
    if res >= 3 {
        let g = grid_extremum(problem, res)?;
        range.lower = range.lower.max(g.lower());
        range.upper = range.upper.min(g.upper());
    }
    Ok(range)
}

/// Least-squares slope of `ln T` against `ln(1/eps)`.
///
/// Points must have strictly decreasing eps and non-decreasing T.
pub fn rate_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for w in points.windows(2) {
        if !(w[1].0 < w[0].0) {
            return Err(invalid("eps values must be strictly decreasing"));
        }
        if w[1].1 < w[0].1 {
            return Err(invalid(
                "iteration counts must be non-decreasing as eps shrinks",
            ));
        }
    }
    if points
        .iter()
        .any(|&(e, t)| !(e > 0.0) || !(t > 0.0) || !e.is_finite() || !t.is_finite())
    {
        return Err(invalid("eps and T must be positive and finite"));
    }
    let xs: Vec<f64> = points.iter().map(|p| -p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

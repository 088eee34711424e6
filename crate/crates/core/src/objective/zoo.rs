//! Seeded problem generators, addressable by descriptor from config files.
//!
//! ```text
//! quadratic(seed=7, nx=5, ny=5, kind=nc_sc, coupling=1, bound=1)   # `regime=` is accepted for `kind=`
//! bilinear(n=1, scale=1, bound=1)
//! sine(seed=1, nx=2, ny=2, mu=1, coupling=1, bound=2)
//! svm(seed=1, points=8, dim=2, x_radius=2, u_radius=0.5, v_lo=-1, v_hi=1)
//! ```

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    make_bilinear, make_nc_sc_sine, make_quadratic, make_robust_svm_toy, spectral_norm, Matrix,
    MinimaxProblem, SvmData,
};
use crate::descriptor::{Call, Value};
use crate::error::{invalid, Result};
use crate::geometry::{ConstraintSet, Vector};

pub const NAMES: [&str; 4] = ["quadratic", "bilinear", "sine", "svm"];

/// Curvature pattern for a random quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticKind {
    NcSc,
    NcC,
    ScNc,
    CNc,
    /// strongly convex in x and strongly concave in y
    ScSc,
}

impl std::str::FromStr for QuadraticKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nc_sc" => QuadraticKind::NcSc,
            "nc_c" => QuadraticKind::NcC,
            "sc_nc" => QuadraticKind::ScNc,
            "c_nc" => QuadraticKind::CNc,
            "sc_sc" => QuadraticKind::ScSc,
            _ => return Err(invalid(format!("unknown quadratic kind '{s}'"))),
        })
    }
}

/// Settings for [`random_quadratic`].
#[derive(Clone, Debug)]
pub struct QuadraticSpec {
    pub seed: u64,
    pub nx: usize,
    pub ny: usize,
    pub kind: QuadraticKind,
    /// spectral norm of the coupling block
    pub coupling: f64,
    /// half-width of the box constraints; infinite means unconstrained
    pub bound: f64,
    /// scale of the linear terms
    pub linear: f64,
}

impl QuadraticSpec {
    pub fn new(seed: u64, nx: usize, ny: usize, kind: QuadraticKind) -> Self {
        QuadraticSpec {
            seed,
            nx,
            ny,
            kind,
            coupling: 1.0,
            bound: 1.0,
            linear: 0.1,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    gaussian(rng, n, n).qr().q()
}

/// `Q diag(eigs) Q'` with a random rotation, symmetrized.
fn with_spectrum(rng: &mut ChaCha8Rng, eigs: &[f64]) -> Matrix {
    let n = eigs.len();
    let q = random_orthogonal(rng, n);
    let d = Matrix::from_diagonal(&Vector::from_column_slice(eigs));
    let m = &q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Eigenvalues in `[lo, hi]`; the first is pinned to `lo` and, when there
/// is room, the last to `hi`, so the extremes are attained.
fn spectrum(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    e[0] = lo;
    if n > 1 {
        e[n - 1] = hi;
    }
    e
}

fn bounded_or_whole(n: usize, bound: f64) -> Result<ConstraintSet> {
    if bound.is_infinite() {
        ConstraintSet::whole_space(n)
    } else {
        ConstraintSet::cube(n, -bound, bound)
    }
}

fn normalized_coupling(rng: &mut ChaCha8Rng, nx: usize, ny: usize, scale: f64) -> Matrix {
    let g = gaussian(rng, nx, ny);
    let n = spectral_norm(&g);
    g * (scale / n)
}

pub fn random_quadratic(spec: &QuadraticSpec) -> Result<MinimaxProblem> {
    if spec.nx == 0 || spec.ny == 0 {
        return Err(invalid("quadratic dimensions must be positive"));
    }
    if !(spec.coupling > 0.0) || !(spec.bound > 0.0) {
        return Err(invalid("quadratic coupling and bound must be positive"));
    }
    if spec.kind == QuadraticKind::NcC && spec.ny < 2 {
        return Err(invalid("nc_c quadratics need ny >= 2 so the concave block has both a zero and a positive eigenvalue"));
    }
    if spec.kind == QuadraticKind::CNc && spec.nx < 2 {
        return Err(invalid("c_nc quadratics need nx >= 2 so the convex block has both a zero and a positive eigenvalue"));
    }
    let mut r = rng(spec.seed);
    let (ax, cy) = match spec.kind {
        QuadraticKind::NcSc => ((-1.0, 1.0), (0.5, 1.5)),
        QuadraticKind::NcC => ((-1.0, 1.0), (0.0, 1.5)),
        QuadraticKind::ScNc => ((0.5, 1.5), (-1.0, 1.0)),
        QuadraticKind::CNc => ((0.0, 1.5), (-1.0, 1.0)),
        QuadraticKind::ScSc => ((0.5, 1.5), (0.5, 1.5)),
    };
    let ea = spectrum(&mut r, spec.nx, ax.0, ax.1);
    let a = with_spectrum(&mut r, &ea);
    let ec = spectrum(&mut r, spec.ny, cy.0, cy.1);
    let c = with_spectrum(&mut r, &ec);
    let b = normalized_coupling(&mut r, spec.nx, spec.ny, spec.coupling);
    let a_lin = gaussian(&mut r, spec.nx, 1).column(0) * spec.linear;
    let c_lin = gaussian(&mut r, spec.ny, 1).column(0) * spec.linear;
    let mut p = make_quadratic(
        a,
        b,
        c,
        a_lin,
        c_lin,
        bounded_or_whole(spec.nx, spec.bound)?,
        bounded_or_whole(spec.ny, spec.bound)?,
    )?;
    p.name = format!("quadratic-{}-s{}", kind_name(spec.kind), spec.seed);
    Ok(p)
}

fn kind_name(k: QuadraticKind) -> &'static str {
    match k {
        QuadraticKind::NcSc => "nc_sc",
        QuadraticKind::NcC => "nc_c",
        QuadraticKind::ScNc => "sc_nc",
        QuadraticKind::CNc => "c_nc",
        QuadraticKind::ScSc => "sc_sc",
    }
}

/// `x'(scale I)y` on `[-bound, bound]^n` squared.
pub fn scaled_bilinear(n: usize, scale: f64, bound: f64) -> Result<MinimaxProblem> {
    let mut p = make_bilinear(
        Matrix::identity(n, n) * scale,
        bounded_or_whole(n, bound)?,
        bounded_or_whole(n, bound)?,
    )?;
    p.name = format!("bilinear-n{n}");
    Ok(p)
}

pub fn random_sine(
    seed: u64,
    nx: usize,
    ny: usize,
    mu: f64,
    coupling: f64,
    bound: f64,
) -> Result<MinimaxProblem> {
    let mut r = rng(seed);
    let b = normalized_coupling(&mut r, nx, ny, coupling);
    let mut p = make_nc_sc_sine(
        b,
        mu,
        bounded_or_whole(nx, bound)?,
        bounded_or_whole(ny, bound)?,
    )?;
    p.name = format!("sine-s{seed}");
    Ok(p)
}

pub fn random_svm(
    seed: u64,
    points: usize,
    dim: usize,
    x_radius: f64,
    u_radius: f64,
    v_lo: f64,
    v_hi: f64,
) -> Result<MinimaxProblem> {
    let mut r = rng(seed);
    let labels: Vec<f64> = (0..points)
        .map(|_| if r.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let mut features = gaussian(&mut r, points, dim) * 0.5;
    for (i, l) in labels.iter().enumerate() {
        features[(i, 0)] += l;
    }
    let mut p = make_robust_svm_toy(SvmData { features, labels }, x_radius, u_radius, v_lo, v_hi)?;
    p.name = format!("svm-s{seed}");
    Ok(p)
}

/// Builds a problem from a descriptor such as `quadratic(seed=3, kind=nc_c)`.
pub fn build(v: &Value) -> Result<MinimaxProblem> {
    let c = v
        .as_call()
        .ok_or_else(|| invalid(format!("expected a problem descriptor, got '{v}'")))?;
    build_call(&c)
}

fn build_call(c: &Call) -> Result<MinimaxProblem> {
    match c.name.as_str() {
        "quadratic" => {
            c.expect_keys(&[
                "seed", "nx", "ny", "kind", "regime", "coupling", "bound", "linear",
            ])?;
            let kind = c
                .ident("kind")?
                .or(c.ident("regime")?)
                .unwrap_or("nc_sc")
                .parse()?;
            let mut spec = QuadraticSpec::new(
                c.u64_or("seed", 0)?,
                c.usize_or("nx", 2)?,
                c.usize_or("ny", 2)?,
                kind,
            );
            spec.coupling = c.f64_or("coupling", spec.coupling)?;
            spec.bound = c.f64_or("bound", spec.bound)?;
            spec.linear = c.f64_or("linear", spec.linear)?;
            random_quadratic(&spec)
        }
        "bilinear" => {
            c.expect_keys(&["n", "scale", "bound"])?;
            scaled_bilinear(
                c.usize_or("n", 1)?,
                c.f64_or("scale", 1.0)?,
                c.f64_or("bound", 1.0)?,
            )
        }
        "sine" => {
            c.expect_keys(&["seed", "nx", "ny", "mu", "coupling", "bound"])?;
            random_sine(
                c.u64_or("seed", 0)?,
                c.usize_or("nx", 2)?,
                c.usize_or("ny", 2)?,
                c.f64_or("mu", 1.0)?,
                c.f64_or("coupling", 1.0)?,
                c.f64_or("bound", 2.0)?,
            )
        }
        "svm" => {
            c.expect_keys(&[
                "seed", "points", "dim", "x_radius", "u_radius", "v_lo", "v_hi",
            ])?;
            random_svm(
                c.u64_or("seed", 0)?,
                c.usize_or("points", 8)?,
                c.usize_or("dim", 2)?,
                c.f64_or("x_radius", 2.0)?,
                c.f64_or("u_radius", 0.5)?,
                c.f64_or("v_lo", -1.0)?,
                c.f64_or("v_hi", 1.0)?,
            )
        }
        other => Err(invalid(format!(
            "unknown problem '{other}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

//! Seeded point-set generators. Every output is checked for general position.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};
use crate::num::{int, pow2_neg, Rational};

/// Default perturbation scale for lattices.
pub const GRID_PERTURBATION_BITS: u32 = 20;
/// Resolution of uniform and circle coordinates.
const COORD_BITS: u32 = 32;
const MAX_REDRAWS: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Grid,
    Uniform,
    Circle,
    MomentCurve,
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Kind::Grid),
            "uniform" => Ok(Kind::Uniform),
            "circle" => Ok(Kind::Circle),
            "moment-curve" | "moment" => Ok(Kind::MomentCurve),
            other => Err(Error::UnsupportedGenerator(other.to_string())),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Grid => "grid",
            Kind::Uniform => "uniform",
            Kind::Circle => "circle",
            Kind::MomentCurve => "moment-curve",
        })
    }
}

fn dyadic(k: i64, bits: u32) -> Rational {
    Rational::new(BigInt::from(k), BigInt::one() << bits)
}

fn from_coords(coords: Vec<Vec<Rational>>) -> Result<PointSet> {
    PointSet::from_coords(coords)
}

pub fn generate(kind: Kind, n: usize, seed: u64, dim: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    match (kind, dim) {
        (Kind::Grid, 2) => grid(n),
        (Kind::Uniform, 2 | 3) => uniform(n, seed, dim),
        (Kind::Circle, 2) => circle(n),
        (Kind::MomentCurve, 3) => moment_curve(n),
        (_, 2 | 3) => Err(Error::UnsupportedGenerator(format!("{kind} in dimension {dim}"))),
        (_, d) => Err(Error::UnsupportedDimension(d)),
    }
}

/// The `ceil(sqrt n)`-wide integer lattice in row-major order, truncated to
/// `n` points and perturbed.
pub fn grid(n: usize) -> Result<PointSet> {
    let side = crate::num::ceil_sqrt(n as u64) as usize;
    let raw: Vec<Point> =
        (0..n).map(|i| Point::new(i, vec![int((i % side) as i64), int((i / side) as i64)])).collect();
    perturb(&PointSet::new_unchecked(raw)?, &pow2_neg(GRID_PERTURBATION_BITS))
}

/// Independent uniform points in `[0, 1]^dim` on a `2^-32` lattice. A draw
/// that is not in general position is replaced by the next draw.
pub fn uniform(n: usize, seed: u64, dim: usize) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..MAX_REDRAWS {
        let coords: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..dim).map(|_| dyadic(rng.random_range(0..=(1i64 << COORD_BITS)), COORD_BITS)).collect())
            .collect();
        match from_coords(coords) {
            Ok(set) => return Ok(set),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one draw"))
}

/// Roots of unity rounded to `2^-32`.
pub fn circle(n: usize) -> Result<PointSet> {
    let scale = (1u64 << COORD_BITS) as f64;
    let coords = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            vec![dyadic((a.cos() * scale).round() as i64, COORD_BITS), dyadic((a.sin() * scale).round() as i64, COORD_BITS)]
        })
        .collect();
    from_coords(coords)
}

/// `(i, i^2, i^3)` for `i = 1..=n`.
pub fn moment_curve(n: usize) -> Result<PointSet> {
    let coords = (1..=n as i64).map(|i| vec![int(i), int(i * i), int(i * i * i)]).collect();
    from_coords(coords)
}

/// Moves point `i` by `(eps i, eps^2 i^2)` in the plane or
/// `(eps i, eps^2 i^2, eps^3 i^3)` in space. The offsets lie on a moment
/// curve, so collinear lattice rows are broken apart.
pub fn perturb(points: &PointSet, eps: &Rational) -> Result<PointSet> {
    let moved = points
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s = Rational::from_integer(BigInt::from(i));
            let mut step = Rational::one();
            let mut scale = Rational::one();
            let coords = p
                .coords
                .iter()
                .map(|c| {
                    step *= eps;
                    scale *= &s;
                    c + &step * &scale
                })
                .collect();
            Point::new(p.id, coords)
        })
        .collect();
    PointSet::new(moved)
}

//! Exact geometric predicates over rational points in the plane and in 3-space.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{fmt_rational, sign_of, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Negative,
    On,
    Positive,
}

impl Side {
    pub fn value(self) -> i32 {
        match self {
            Side::Negative => -1,
            Side::On => 0,
            Side::Positive => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub id: usize,
    pub coords: Vec<Rational>,
}

impl Point {
    pub fn new(id: usize, coords: Vec<Rational>) -> Self {
        Self { id, coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// The hyperplane `<normal, x> = offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if !(2..=3).contains(&normal.len()) {
            return Err(Error::UnsupportedDimension(normal.len()));
        }
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::Degenerate("hyperplane normal is the zero vector".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `<normal, x> - offset`.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = -self.offset.clone();
        for (a, v) in self.normal.iter().zip(x) {
            acc += a * v;
        }
        acc
    }

    pub fn negated(&self) -> Self {
        Self {
            normal: self.normal.iter().map(|a| -a).collect(),
            offset: -self.offset.clone(),
        }
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "y", "z"];
        let terms: Vec<String> = self
            .normal
            .iter()
            .zip(names)
            .map(|(a, n)| format!("{}*{}", fmt_rational(a), n))
            .collect();
        write!(f, "{} = {}", terms.join(" + "), fmt_rational(&self.offset))
    }
}

/// Nonnegative multiple of one half, stored as the doubled integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfCount(u64);

impl HalfCount {
    pub fn from_halves(halves: u64) -> Self {
        Self(halves)
    }

    pub fn from_whole(whole: u64) -> Self {
        Self(2 * whole)
    }

    pub fn halves(self) -> u64 {
        self.0
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.0), BigInt::from(2))
    }
}

impl fmt::Display for HalfCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

pub fn side_of(h: &Hyperplane, p: &Point) -> Result<Side> {
    if h.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: p.dim() });
    }
    Ok(side_of_coords(h, &p.coords))
}

fn side_of_coords(h: &Hyperplane, x: &[Rational]) -> Side {
    let v = h.eval(x);
    if v.is_zero() {
        Side::On
    } else if v.is_positive() {
        Side::Positive
    } else {
        Side::Negative
    }
}

/// Strict crossing: `p` and `q` lie on opposite open sides of `h`.
pub fn edge_crosses(h: &Hyperplane, p: &Point, q: &Point) -> Result<bool> {
    let sp = side_of(h, p)?;
    let sq = side_of(h, q)?;
    if sp == Side::On || sq == Side::On {
        return Err(Error::Degenerate(format!(
            "point {} lies on the hyperplane {h}",
            if sp == Side::On { p.id } else { q.id }
        )));
    }
    Ok(sp.value() * sq.value() == -1)
}

/// Lines strictly separating `p` and `q` count one, lines through either point count one half.
pub fn crossing_distance(lines: &[Hyperplane], p: &Point, q: &Point) -> Result<HalfCount> {
    crossing_distance_coords(lines, &p.coords, &q.coords)
}

fn crossing_distance_coords(lines: &[Hyperplane], p: &[Rational], q: &[Rational]) -> Result<HalfCount> {
    let mut halves = 0u64;
    for h in lines {
        if h.dim() != p.len() || h.dim() != q.len() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: p.len() });
        }
        let sp = side_of_coords(h, p);
        let sq = side_of_coords(h, q);
        if sp == Side::On || sq == Side::On {
            halves += 1;
        } else if sp != sq {
            halves += 2;
        }
    }
    Ok(HalfCount(halves))
}

/// Intersection point of two non-parallel lines in the plane.
pub fn line_intersection(a: &Hyperplane, b: &Hyperplane) -> Option<[Rational; 2]> {
    let det = &a.normal[0] * &b.normal[1] - &a.normal[1] * &b.normal[0];
    if det.is_zero() {
        return None;
    }
    let x = (&a.offset * &b.normal[1] - &b.offset * &a.normal[1]) / &det;
    let y = (&a.normal[0] * &b.offset - &b.normal[0] * &a.offset) / &det;
    Some([x, y])
}

/// Number of arrangement vertices of `lines` within crossing distance `r` of `p`.
pub fn crossing_disk_size(lines: &[Hyperplane], p: &Point, r: HalfCount) -> Result<usize> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    if let Some(h) = lines.iter().find(|h| h.dim() != 2) {
        return Err(Error::UnsupportedDimension(h.dim()));
    }
    let mut vertices: Vec<[Rational; 2]> = Vec::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if let Some(v) = line_intersection(a, b) {
                if !vertices.contains(&v) {
                    vertices.push(v);
                }
            }
        }
    }
    let mut count = 0;
    for v in &vertices {
        if crossing_distance_coords(lines, &p.coords, v)? <= r {
            count += 1;
        }
    }
    Ok(count)
}

/// Points in general position with exact rational coordinates.
///
/// Alongside the rational coordinates the set keeps a copy scaled by the
/// common denominator, so orientation tests run on integers.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
    dim: usize,
    scaled: Vec<Vec<BigInt>>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points
    }
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let set = Self::new_unchecked(points)?;
        set.check_general_position()?;
        Ok(set)
    }

    /// Labels points by their position.
    pub fn from_coords(coords: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(coords.into_iter().enumerate().map(|(i, c)| Point::new(i, c)).collect())
    }

    /// Validates ids and dimension only; general position is the caller's concern.
    pub fn new_unchecked(points: Vec<Point>) -> Result<Self> {
        let dim = points.first().map(Point::dim).ok_or(Error::EmptyInput)?;
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let mut ids: Vec<usize> = points.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Degenerate("duplicate point ids".into()));
        }
        let mut lcm = BigInt::one();
        for p in &points {
            for c in &p.coords {
                lcm = lcm.lcm(c.denom());
            }
        }
        let scaled = points
            .iter()
            .map(|p| p.coords.iter().map(|c| c.numer() * (&lcm / c.denom())).collect())
            .collect();
        Ok(Self { points, dim, scaled })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Points at the given positions, keeping their ids.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut points = Vec::with_capacity(indices.len());
        for &i in indices {
            let p = self.points.get(i).ok_or(Error::IndexOutOfRange { index: i, size: self.len() })?;
            points.push(p.clone());
        }
        Self::new_unchecked(points)
    }

    pub fn check_general_position(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.scaled[i] == self.scaled[j] {
                    return Err(Error::Degenerate(format!(
                        "points {} and {} coincide",
                        self.points[i].id, self.points[j].id
                    )));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if self.collinear(i, j, k) {
                        return Err(Error::Degenerate(format!(
                            "points {}, {}, {} are collinear",
                            self.points[i].id, self.points[j].id, self.points[k].id
                        )));
                    }
                    if self.dim == 3 {
                        for l in k + 1..n {
                            if self.orient3d(i, j, k, l) == 0 {
                                return Err(Error::Degenerate(format!(
                                    "points {}, {}, {}, {} are coplanar",
                                    self.points[i].id, self.points[j].id, self.points[k].id, self.points[l].id
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn diff(&self, a: usize, b: usize) -> Vec<BigInt> {
        self.scaled[b].iter().zip(&self.scaled[a]).map(|(x, y)| x - y).collect()
    }

    fn collinear(&self, i: usize, j: usize, k: usize) -> bool {
        let u = self.diff(i, j);
        let v = self.diff(i, k);
        if self.dim == 2 {
            (&u[0] * &v[1] - &u[1] * &v[0]).is_zero()
        } else {
            cross3(&u, &v).iter().all(Zero::is_zero)
        }
    }

    /// Sign of the orientation determinant of `a, b, c` in the plane.
    pub fn orient2d(&self, a: usize, b: usize, c: usize) -> i32 {
        let u = self.diff(a, b);
        let v = self.diff(a, c);
        sign_of(&(&u[0] * &v[1] - &u[1] * &v[0]))
    }

    /// Sign of `det[b - a, c - a, d - a]`.
    pub fn orient3d(&self, a: usize, b: usize, c: usize, d: usize) -> i32 {
        let u = self.diff(a, b);
        let v = self.diff(a, c);
        let w = self.diff(a, d);
        let cr = cross3(&u, &v);
        sign_of(&(&cr[0] * &w[0] + &cr[1] * &w[1] + &cr[2] * &w[2]))
    }

    /// Side of point `p` relative to the hyperplane through the `dim` points `basis`,
    /// oriented like [`PointSet::hyperplane_through`].
    pub fn orient(&self, basis: &[usize], p: usize) -> i32 {
        match basis {
            [a, b] => self.orient2d(*a, *b, p),
            [a, b, c] => self.orient3d(*a, *b, *c, p),
            _ => panic!("orientation basis must have 2 or 3 points"),
        }
    }

    /// Hyperplane through `dim` affinely independent points, with the normal
    /// oriented so that [`side_of`] agrees with [`PointSet::orient`].
    pub fn hyperplane_through(&self, basis: &[usize]) -> Result<Hyperplane> {
        let a = &self.points[basis[0]].coords;
        let sub = |k: usize| -> Vec<Rational> {
            self.points[basis[k]].coords.iter().zip(a).map(|(x, y)| x - y).collect()
        };
        let normal = match basis.len() {
            2 => {
                let u = sub(1);
                vec![-u[1].clone(), u[0].clone()]
            }
            3 => {
                let u = sub(1);
                let v = sub(2);
                vec![
                    &u[1] * &v[2] - &u[2] * &v[1],
                    &u[2] * &v[0] - &u[0] * &v[2],
                    &u[0] * &v[1] - &u[1] * &v[0],
                ]
            }
            k => return Err(Error::UnsupportedDimension(k)),
        };
        let offset = normal.iter().zip(a).map(|(n, x)| n * x).sum();
        Hyperplane::new(normal, offset)
    }

    /// True when segments `ab` and `cd` cross at a single interior point.
    /// Segments sharing an endpoint never cross.
    pub fn segments_cross(&self, a: usize, b: usize, c: usize, d: usize) -> bool {
        debug_assert_eq!(self.dim, 2);
        if a == c || a == d || b == c || b == d {
            return false;
        }
        let o1 = self.orient2d(a, b, c);
        let o2 = self.orient2d(a, b, d);
        let o3 = self.orient2d(c, d, a);
        let o4 = self.orient2d(c, d, b);
        o1 * o2 < 0 && o3 * o4 < 0
    }

    /// Squared Euclidean distance between two points.
    pub fn dist2(&self, a: usize, b: usize) -> Rational {
        self.points[a]
            .coords
            .iter()
            .zip(&self.points[b].coords)
            .map(|(x, y)| {
                let d = x - y;
                &d * &d
            })
            .sum()
    }
}

fn cross3(u: &[BigInt], v: &[BigInt]) -> [BigInt; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};

    fn pt(x: Rational, y: Rational) -> Point {
        Point::new(0, vec![x, y])
    }

    fn vline(x: Rational) -> Hyperplane {
        Hyperplane::new(vec![int(1), int(0)], x).unwrap()
    }

    #[test]
    fn side_of_examples() {
        let h = vline(ratio(1, 2));
        assert_eq!(side_of(&h, &pt(int(0), int(0))).unwrap(), Side::Negative);
        assert_eq!(side_of(&h, &pt(int(1), int(0))).unwrap(), Side::Positive);
        assert_eq!(side_of(&h, &pt(ratio(1, 2), int(7))).unwrap(), Side::On);
        let p3 = Point::new(0, vec![int(0), int(0), int(0)]);
        assert!(matches!(side_of(&h, &p3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn edge_crosses_examples() {
        let h = vline(ratio(1, 2));
        assert!(edge_crosses(&h, &pt(int(0), int(0)), &pt(int(1), int(0))).unwrap());
        assert!(!edge_crosses(&h, &pt(int(0), int(0)), &pt(ratio(1, 4), int(0))).unwrap());
        let diag = Hyperplane::new(vec![int(1), int(1)], int(1)).unwrap();
        assert!(edge_crosses(&diag, &pt(int(0), int(0)), &pt(int(1), int(1))).unwrap());
        let on = pt(ratio(1, 2), int(3));
        assert!(matches!(edge_crosses(&h, &on, &pt(int(0), int(0))), Err(Error::Degenerate(_))));
    }

    #[test]
    fn zero_normal_is_rejected() {
        assert!(Hyperplane::new(vec![int(0), int(0)], int(1)).is_err());
    }

    #[test]
    fn crossing_distance_examples() {
        let lines = vec![vline(ratio(1, 2)), vline(ratio(3, 2))];
        let d = crossing_distance(&lines, &pt(int(0), int(0)), &pt(int(2), int(0))).unwrap();
        assert_eq!(d, HalfCount::from_whole(2));

        let one = vec![vline(ratio(1, 2))];
        let d = crossing_distance(&one, &pt(int(0), int(0)), &pt(ratio(1, 2), int(0))).unwrap();
        assert_eq!(d, HalfCount::from_halves(1));
        assert_eq!(d.to_string(), "1/2");

        let p = pt(int(5), int(5));
        assert_eq!(crossing_distance(&lines, &p, &p).unwrap(), HalfCount::from_whole(0));
        let on = pt(ratio(1, 2), int(1));
        assert_eq!(crossing_distance(&lines, &on, &on).unwrap(), HalfCount::from_halves(1));
    }

    #[test]
    fn crossing_disk_examples() {
        let lines = vec![vline(int(1)), Hyperplane::new(vec![int(0), int(1)], int(1)).unwrap()];
        let p = pt(int(0), int(0));
        assert_eq!(crossing_disk_size(&lines, &p, HalfCount::from_whole(1)).unwrap(), 1);
        assert_eq!(crossing_disk_size(&lines, &p, HalfCount::from_halves(1)).unwrap(), 0);
        let p3 = Point::new(0, vec![int(0), int(0), int(0)]);
        assert!(matches!(
            crossing_disk_size(&lines, &p3, HalfCount::from_whole(1)),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn point_set_rejects_degenerate_input() {
        let coll = vec![vec![int(0), int(0)], vec![int(1), int(1)], vec![int(2), int(2)]];
        assert!(matches!(PointSet::from_coords(coll), Err(Error::Degenerate(_))));
        let dup = vec![vec![int(0), int(0)], vec![int(0), int(0)]];
        assert!(matches!(PointSet::from_coords(dup), Err(Error::Degenerate(_))));
        let coplanar = vec![
            vec![int(0), int(0), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(1), int(1), int(0)],
        ];
        assert!(matches!(PointSet::from_coords(coplanar), Err(Error::Degenerate(_))));
        let mixed = vec![vec![int(0), int(0)], vec![int(1), int(0), int(0)]];
        assert!(matches!(PointSet::from_coords(mixed), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(PointSet::from_coords(vec![vec![int(1)]]), Err(Error::UnsupportedDimension(1))));
    }

    #[test]
    fn hyperplane_through_agrees_with_orientation() {
        let ps = PointSet::from_coords(vec![
            vec![int(0), int(0), int(0)],
            vec![int(3), int(1), int(0)],
            vec![int(1), int(4), int(1)],
            vec![int(2), int(2), int(5)],
            vec![ratio(1, 3), int(-2), int(-1)],
        ])
        .unwrap();
        let h = ps.hyperplane_through(&[0, 1, 2]).unwrap();
        for p in 3..5 {
            assert_eq!(side_of(&h, ps.point(p)).unwrap().value(), ps.orient(&[0, 1, 2], p));
        }
    }

    #[test]
    fn segment_crossing() {
        let ps = PointSet::from_coords(vec![
            vec![int(0), int(0)],
            vec![int(2), int(2)],
            vec![int(0), int(2)],
            vec![int(2), int(1)],
        ])
        .unwrap();
        assert!(ps.segments_cross(0, 1, 2, 3));
        assert!(!ps.segments_cross(0, 2, 1, 3));
        assert!(!ps.segments_cross(0, 1, 1, 3));
    }
}

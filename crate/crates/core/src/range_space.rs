//! Set systems over a finite ground set: halfspace ranges of a point set, or
//! explicit user-supplied families.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::{Hyperplane, PointSet};
use crate::num::{pow2_neg, rational_sign, Rational};

/// Initial tilt magnitude for representative hyperplanes.
pub const PERTURBATION_BITS: u32 = 40;

/// One side of a partition of the ground set.
///
/// Members never include index 0, so a partition and its complement map to
/// the same range. When present, `rep` has every member strictly on its
/// positive side and every other ground point strictly on its negative side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Range {
    pub members: FixedBitSet,
    pub rep: Option<Hyperplane>,
}

impl Range {
    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }

    /// True when exactly one endpoint lies in the range.
    pub fn crossed_by(&self, a: usize, b: usize) -> bool {
        self.members.contains(a) != self.members.contains(b)
    }

    pub fn to_hex(&self, ground_size: usize) -> String {
        bitset_hex(&self.members, ground_size)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ground {
    Points(PointSet),
    Abstract(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeSpace {
    ground: Ground,
    ranges: Vec<Range>,
}

impl RangeSpace {
    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn ground_size(&self) -> usize {
        match &self.ground {
            Ground::Points(p) => p.len(),
            Ground::Abstract(n) => *n,
        }
    }

    pub fn points(&self) -> Option<&PointSet> {
        match &self.ground {
            Ground::Points(p) => Some(p),
            Ground::Abstract(_) => None,
        }
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self.ground, Ground::Points(_))
    }

    pub fn ranges(&self) -> &[Range] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// One hex-encoded bitset per line, bit `i` for ground index `i`.
    pub fn dump_hex(&self) -> String {
        let n = self.ground_size();
        let mut out = String::new();
        for r in &self.ranges {
            out.push_str(&r.to_hex(n));
            out.push('\n');
        }
        out
    }
}

fn bitset_hex(bits: &FixedBitSet, n: usize) -> String {
    let digits = n.div_ceil(4).max(1);
    (0..digits)
        .rev()
        .map(|d| {
            let nibble = (0..4).filter(|b| bits.contains(4 * d + b)).fold(0u32, |acc, b| acc | (1 << b));
            char::from_digit(nibble, 16).unwrap()
        })
        .collect()
}

/// Flips to the side excluding index 0; `None` for the trivial partitions.
fn canonicalize(mut members: FixedBitSet, n: usize) -> Option<FixedBitSet> {
    if members.contains(0) {
        members.toggle_range(..);
    }
    let count = members.count_ones(..);
    if count == 0 || count == n {
        None
    } else {
        Some(members)
    }
}

/// Every distinct partition of `points` cut out by a hyperplane avoiding them.
///
/// A partition realized by some hyperplane can be realized by one passing
/// through `d` of the points, with those points pushed to either side, so the
/// construction enumerates `d`-subsets and their `2^d` side assignments.
pub fn canonical_ranges(points: &PointSet) -> Result<RangeSpace> {
    let n = points.len();
    let d = points.dim();
    let mut ranges = Vec::new();
    if n == 2 && d == 3 {
        ranges.push(bisector_range(points)?);
    } else if n >= d {
        let mut seen: HashSet<FixedBitSet> = HashSet::new();
        for basis in combinations(n, d) {
            let sides: Vec<i32> = (0..n).map(|p| if basis.contains(&p) { 0 } else { points.orient(&basis, p) }).collect();
            for mask in 0..(1u32 << d) {
                let signs: Vec<i32> = (0..d).map(|k| if mask & (1 << k) != 0 { 1 } else { -1 }).collect();
                let mut positive = FixedBitSet::with_capacity(n);
                for (p, &s) in sides.iter().enumerate() {
                    let side = match basis.iter().position(|&b| b == p) {
                        Some(k) => signs[k],
                        None => s,
                    };
                    positive.set(p, side > 0);
                }
                let Some(members) = canonicalize(positive, n) else { continue };
                if seen.contains(&members) {
                    continue;
                }
                let rep = perturbed_rep(points, &basis, &signs, &members)?;
                seen.insert(members.clone());
                ranges.push(Range { members, rep: Some(rep) });
            }
        }
    }
    Ok(RangeSpace { ground: Ground::Points(points.clone()), ranges })
}

fn bisector_range(points: &PointSet) -> Result<Range> {
    let a = &points.point(0).coords;
    let b = &points.point(1).coords;
    let normal: Vec<Rational> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let offset = normal.iter().zip(a.iter().zip(b)).map(|(n, (x, y))| n * (x + y) * &half).sum();
    let mut members = FixedBitSet::with_capacity(2);
    members.insert(1);
    Ok(Range { members, rep: Some(Hyperplane::new(normal, offset)?) })
}

/// Tilts the hyperplane through `basis` so that basis point `k` lands on side
/// `signs[k]` and all other points keep their side.
fn perturbed_rep(points: &PointSet, basis: &[usize], signs: &[i32], members: &FixedBitSet) -> Result<Hyperplane> {
    let h = points.hyperplane_through(basis)?;
    let a = &points.point(basis[0]).coords;
    let dirs: Vec<Vec<Rational>> = basis[1..]
        .iter()
        .map(|&b| points.point(b).coords.iter().zip(a).map(|(x, y)| x - y).collect())
        .collect();
    // f(x) = s_0 + <w, x - a> with w in span(dirs) and f(basis[k]) = s_k.
    let targets: Vec<Rational> = signs[1..].iter().map(|s| Rational::from_integer(BigInt::from(s - signs[0]))).collect();
    let beta = solve_gram(&dirs, &targets);
    let dim = points.dim();
    let mut w = vec![Rational::zero(); dim];
    for (bk, u) in beta.iter().zip(&dirs) {
        for (wi, ui) in w.iter_mut().zip(u) {
            *wi += bk * ui;
        }
    }
    let alpha = Rational::from_integer(BigInt::from(signs[0]));
    let w_dot_a: Rational = w.iter().zip(a).map(|(x, y)| x * y).sum();

    let want: Vec<i32> = (0..points.len())
        .map(|p| match basis.iter().position(|&b| b == p) {
            Some(k) => signs[k],
            None => points.orient(basis, p),
        })
        .collect();

    let mut eps = pow2_neg(PERTURBATION_BITS);
    for _ in 0..8 {
        let normal: Vec<Rational> = h.normal.iter().zip(&w).map(|(n, wi)| n + &eps * wi).collect();
        let offset = &h.offset - &eps * (&alpha - &w_dot_a);
        let g = Hyperplane::new(normal, offset)?;
        let ok = points.points().iter().zip(&want).all(|(p, &s)| rational_sign(&g.eval(&p.coords)) == s);
        if ok {
            let first = members.ones().next().expect("nontrivial range");
            let oriented = if want[first] > 0 { g } else { g.negated() };
            return Ok(oriented);
        }
        eps = &eps * &eps;
    }
    Err(Error::Degenerate(format!("could not separate partition through points {basis:?}")))
}

/// Solves `G beta = targets` with `G` the Gram matrix of `dirs` (at most 2x2).
fn solve_gram(dirs: &[Vec<Rational>], targets: &[Rational]) -> Vec<Rational> {
    let dot = |u: &[Rational], v: &[Rational]| -> Rational { u.iter().zip(v).map(|(x, y)| x * y).sum() };
    match dirs.len() {
        1 => vec![&targets[0] / dot(&dirs[0], &dirs[0])],
        2 => {
            let g00 = dot(&dirs[0], &dirs[0]);
            let g01 = dot(&dirs[0], &dirs[1]);
            let g11 = dot(&dirs[1], &dirs[1]);
            let det = &g00 * &g11 - &g01 * &g01;
            vec![
                (&targets[0] * &g11 - &targets[1] * &g01) / &det,
                (&g00 * &targets[1] - &g01 * &targets[0]) / &det,
            ]
        }
        _ => Vec::new(),
    }
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// Normalizes an explicit family: canonical orientation, trivial sets dropped,
/// duplicates merged (first occurrence wins).
pub fn explicit_ranges(ground_size: usize, sets: &[Vec<usize>]) -> Result<RangeSpace> {
    let mut seen = HashSet::new();
    let mut ranges = Vec::new();
    for set in sets {
        let mut bits = FixedBitSet::with_capacity(ground_size);
        for &i in set {
            if i >= ground_size {
                return Err(Error::IndexOutOfRange { index: i, size: ground_size });
            }
            bits.insert(i);
        }
        if let Some(members) = canonicalize(bits, ground_size) {
            if seen.insert(members.clone()) {
                ranges.push(Range { members, rep: None });
            }
        }
    }
    Ok(RangeSpace { ground: Ground::Abstract(ground_size), ranges })
}

/// Maximum over ranges of the number of edges with exactly one endpoint inside.
pub fn crossing_number(edges: &[(usize, usize)], space: &RangeSpace) -> usize {
    crossings_per_range(edges, space).into_iter().max().unwrap_or(0)
}

pub fn crossings_per_range(edges: &[(usize, usize)], space: &RangeSpace) -> Vec<usize> {
    space
        .ranges
        .iter()
        .map(|r| edges.iter().filter(|&&(a, b)| r.crossed_by(a, b)).count())
        .collect()
}

/// The induced set system on `subset`; local index `i` is the `i`-th smallest
/// element of `subset`.
pub fn restrict(space: &RangeSpace, subset: &[usize]) -> Result<RangeSpace> {
    let mut xs = subset.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = space.ground_size();
    if let Some(&bad) = xs.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, size: n });
    }
    match &space.ground {
        Ground::Points(points) => canonical_ranges(&points.subset(&xs)?),
        Ground::Abstract(_) => {
            let sets: Vec<Vec<usize>> = space
                .ranges
                .iter()
                .map(|r| xs.iter().enumerate().filter(|(_, &g)| r.contains(g)).map(|(l, _)| l).collect())
                .collect();
            explicit_ranges(xs.len(), &sets)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::side_of;
    use crate::num::int;

    fn square() -> PointSet {
        PointSet::from_coords(vec![
            vec![int(0), int(0)],
            vec![int(1), int(0)],
            vec![int(1), int(1)],
            vec![int(0), int(1)],
        ])
        .unwrap()
    }

    fn triangle() -> PointSet {
        PointSet::from_coords(vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap()
    }

    fn member_sets(space: &RangeSpace) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = space.ranges().iter().map(|r| r.members.ones().collect()).collect();
        v.sort();
        v
    }

    #[test]
    fn triangle_has_three_singleton_ranges() {
        let r = canonical_ranges(&triangle()).unwrap();
        assert_eq!(member_sets(&r), vec![vec![1], vec![1, 2], vec![2]]);
    }

    #[test]
    fn square_has_six_ranges_and_no_diagonal_split() {
        let r = canonical_ranges(&square()).unwrap();
        assert_eq!(r.len(), 6);
        let sets = member_sets(&r);
        // {A, C} | {B, D} would appear as {1, 3}.
        assert!(!sets.contains(&vec![1, 3]));
        assert!(sets.contains(&vec![1, 2]));
        assert!(sets.contains(&vec![2, 3]));
    }

    #[test]
    fn two_points_give_one_range() {
        let p2 = PointSet::from_coords(vec![vec![int(0), int(0)], vec![int(3), int(1)]]).unwrap();
        assert_eq!(canonical_ranges(&p2).unwrap().len(), 1);
        let p3 = PointSet::from_coords(vec![vec![int(0), int(0), int(0)], vec![int(3), int(1), int(2)]]).unwrap();
        assert_eq!(canonical_ranges(&p3).unwrap().len(), 1);
    }

    #[test]
    fn representatives_realize_their_partition() {
        for ps in [square(), triangle()] {
            let r = canonical_ranges(&ps).unwrap();
            for range in r.ranges() {
                let rep = range.rep.as_ref().unwrap();
                for (i, p) in ps.points().iter().enumerate() {
                    let side = side_of(rep, p).unwrap().value();
                    assert_eq!(side, if range.contains(i) { 1 } else { -1 });
                }
            }
        }
    }

    #[test]
    fn explicit_examples() {
        let r = explicit_ranges(4, &[vec![0], vec![0, 1], vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(r.len(), 2);
        let r = explicit_ranges(2, &[vec![0], vec![1]]).unwrap();
        assert_eq!(r.len(), 1);
        assert!(matches!(explicit_ranges(3, &[vec![5]]), Err(Error::IndexOutOfRange { index: 5, size: 3 })));
        assert!(explicit_ranges(3, &[vec![], vec![0, 1, 2]]).unwrap().is_empty());
    }

    #[test]
    fn crossing_number_examples() {
        let r = canonical_ranges(&triangle()).unwrap();
        assert_eq!(crossing_number(&[], &r), 0);
        assert_eq!(crossing_number(&[(0, 1), (1, 2)], &r), 2);
    }

    #[test]
    fn restrict_examples() {
        let tri = canonical_ranges(&triangle()).unwrap();
        assert_eq!(restrict(&tri, &[0, 1, 2]).unwrap(), tri);
        assert_eq!(restrict(&tri, &[0, 1]).unwrap().len(), 1);
        let sq = canonical_ranges(&square()).unwrap();
        assert_eq!(restrict(&sq, &[0, 1, 3]).unwrap().len(), 3);
        assert!(matches!(restrict(&sq, &[]), Err(Error::EmptySubset)));
        assert!(matches!(restrict(&sq, &[9]), Err(Error::IndexOutOfRange { .. })));

        let abs = explicit_ranges(4, &[vec![1], vec![1, 2], vec![3]]).unwrap();
        assert_eq!(restrict(&abs, &[0, 1, 2, 3]).unwrap(), abs);
        // On {1, 2}: {1} and {1, 2}∩X = X (trivial) and {} -> one range.
        assert_eq!(restrict(&abs, &[1, 2]).unwrap().len(), 1);
    }

    #[test]
    fn hex_dump() {
        let r = explicit_ranges(5, &[vec![1], vec![0, 1, 2]]).unwrap();
        assert_eq!(r.dump_hex(), "02\n18\n");
    }

    #[test]
    fn combinations_are_lexicographic() {
        let c: Vec<Vec<usize>> = combinations(4, 2).collect();
        assert_eq!(c, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(2, 3).count(), 0);
    }
}

//! File formats: point sets and abstract set systems as JSON.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::num::{fmt_rational, parse_rational, Rational};
use crate::range_space::{explicit_ranges, RangeSpace};

fn coord(v: &Value) -> Result<Rational> {
    match v {
        // Numbers keep their source text, so decimals parse exactly.
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

/// Raw coordinates of `[[x, y], ...]` or `[[x, y, z], ...]`, without any
/// geometric checks.
pub fn parse_coords(text: &str) -> Result<Vec<Vec<Rational>>> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Array(rows) = value else {
        return Err(Error::Parse("point file must be a JSON array".into()));
    };
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut coords = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let Value::Array(xs) = row else {
            return Err(Error::Parse(format!("point {i} is not an array")));
        };
        coords.push(xs.iter().map(coord).collect::<Result<Vec<_>>>()?);
    }
    Ok(coords)
}

/// Parses a point file; ids are array positions and the set must be in
/// general position.
pub fn parse_points(text: &str) -> Result<PointSet> {
    PointSet::from_coords(parse_coords(text)?)
}

fn coord_value(r: &Rational) -> Value {
    if r.is_integer() {
        match r.numer().to_string().parse() {
            Ok(n) => Value::Number(n),
            Err(_) => Value::String(fmt_rational(r)),
        }
    } else {
        Value::String(fmt_rational(r))
    }
}

/// Integers as JSON numbers, everything else as `"p/q"` strings.
pub fn points_to_json(points: &PointSet) -> String {
    let rows: Vec<Value> =
        points.points().iter().map(|p| Value::Array(p.coords.iter().map(coord_value).collect())).collect();
    let mut out = serde_json::to_string(&Value::Array(rows)).expect("plain JSON values serialize");
    out.push('\n');
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub ground: usize,
    pub sets: Vec<Vec<usize>>,
}

pub fn parse_set_system(text: &str) -> Result<RangeSpace> {
    let sys: SetSystem = serde_json::from_str(text)?;
    if sys.ground == 0 {
        return Err(Error::EmptyInput);
    }
    explicit_ranges(sys.ground, &sys.sets)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    parse_points(&fs::read_to_string(path)?)
}

pub fn read_coords(path: &Path) -> Result<Vec<Vec<Rational>>> {
    parse_coords(&fs::read_to_string(path)?)
}

pub fn read_set_system(path: &Path) -> Result<RangeSpace> {
    parse_set_system(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};

    #[test]
    fn points_parse_numbers_and_fractions() {
        let p = parse_points(r#"[[0, 0.5], ["1/3", -2], [1e1, "7"]]"#).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.point(0).coords, vec![int(0), ratio(1, 2)]);
        assert_eq!(p.point(1).coords, vec![ratio(1, 3), int(-2)]);
        assert_eq!(p.point(2).coords, vec![int(10), int(7)]);
    }

    #[test]
    fn long_decimals_stay_exact() {
        let p = parse_points("[[0.1000000000000000000001, 0], [0, 1]]").unwrap();
        assert_eq!(p.point(0).coords[0], parse_rational("1000000000000000000001/10000000000000000000000").unwrap());
    }

    #[test]
    fn points_round_trip() {
        let p = parse_points(r#"[["1/3", 0], [2, "5/7"], [4, 4]]"#).unwrap();
        let text = points_to_json(&p);
        assert_eq!(text, "[[\"1/3\",0],[2,\"5/7\"],[4,4]]\n");
        assert_eq!(parse_points(&text).unwrap(), p);
    }

    #[test]
    fn bad_point_files() {
        assert!(matches!(parse_points("[]"), Err(Error::EmptyInput)));
        assert!(parse_points("{}").is_err());
        assert!(parse_points("[[0, true]]").is_err());
        assert!(parse_points("[[0, 0], [1, 1, 1]]").is_err());
        assert!(parse_points("[[0, 0], [0, 0]]").is_err());
    }

    #[test]
    fn set_systems() {
        let r = parse_set_system(r#"{"ground": 4, "sets": [[0, 1], [2]]}"#).unwrap();
        assert_eq!(r.ground_size(), 4);
        assert!(!r.is_geometric());
        assert!(parse_set_system(r#"{"ground": 2, "sets": [[5]]}"#).is_err());
        assert!(parse_set_system(r#"{"ground": 0, "sets": []}"#).is_err());
    }
}

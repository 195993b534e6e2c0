use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// A domain element: a named point of an abstract finite domain, or an exact
/// rational point on the line or in the plane.
///
/// JSON form: symbolic points are strings (`"x1"`), numeric points are arrays
/// of rational strings (`["1/2"]`, `["1/2", "0/1"]`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Symbol(String),
    Line(Rational),
    Plane(Rational, Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Symbolic,
    Line,
    Plane,
}

impl Point {
    pub fn sym(name: impl Into<String>) -> Self {
        Point::Symbol(name.into())
    }

    pub fn line(x: Rational) -> Self {
        Point::Line(x)
    }

    pub fn plane(x: Rational, y: Rational) -> Self {
        Point::Plane(x, y)
    }

    pub fn kind(&self) -> PointKind {
        match self {
            Point::Symbol(_) => PointKind::Symbolic,
            Point::Line(_) => PointKind::Line,
            Point::Plane(..) => PointKind::Plane,
        }
    }

    pub fn as_line(&self) -> Option<&Rational> {
        match self {
            Point::Line(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_plane(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Point::Plane(x, y) => Some((x, y)),
            _ => None,
        }
    }

    /// Translates a numeric point. Symbolic points have no geometry and are
    /// returned unchanged.
    pub fn offset(&self, dx: &Rational, dy: &Rational) -> Point {
        match self {
            Point::Symbol(_) => self.clone(),
            Point::Line(x) => Point::Line(x + dx),
            Point::Plane(x, y) => Point::Plane(x + dx, y + dy),
        }
    }
}

/// Checks that all points share one kind. Returns the kind, or `None` for an
/// empty slice.
pub fn common_kind<'a>(points: impl IntoIterator<Item = &'a Point>) -> Result<Option<PointKind>, String> {
    let mut kind = None;
    for p in points {
        match kind {
            None => kind = Some(p.kind()),
            Some(k) if k != p.kind() => return Err(format!("mixed point kinds: {k:?} and {:?} at {p}", p.kind())),
            _ => {}
        }
    }
    Ok(kind)
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Symbol(s) => f.write_str(s),
            Point::Line(x) => write!(f, "({x})"),
            Point::Plane(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Symbol(name) => s.serialize_str(name),
            Point::Line(x) => {
                let mut seq = s.serialize_seq(Some(1))?;
                seq.serialize_element(&rational::format(x))?;
                seq.end()
            }
            Point::Plane(x, y) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&rational::format(x))?;
                seq.serialize_element(&rational::format(y))?;
                seq.end()
            }
        }
    }
}

struct PointVisitor;

impl<'de> Visitor<'de> for PointVisitor {
    type Value = Point;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a point name or an array of one or two rational strings")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Point, E> {
        Ok(Point::Symbol(v.to_owned()))
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point, A::Error> {
        let mut coords: Vec<Rational> = Vec::with_capacity(2);
        while let Some(c) = seq.next_element::<String>()? {
            coords.push(rational::parse(&c).map_err(de::Error::custom)?);
        }
        match coords.len() {
            1 => Ok(Point::Line(coords.pop().unwrap())),
            2 => {
                let y = coords.pop().unwrap();
                let x = coords.pop().unwrap();
                Ok(Point::Plane(x, y))
            }
            n => Err(de::Error::custom(format!("points have 1 or 2 coordinates, got {n}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Point, D::Error> {
        d.deserialize_any(PointVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn json_forms() {
        let p = Point::plane(q(1, 2), q(0, 1));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["1/2","0/1"]"#);
        assert_eq!(serde_json::from_str::<Point>(&s).unwrap(), p);
        assert_eq!(serde_json::from_str::<Point>(r#""x3""#).unwrap(), Point::sym("x3"));
        assert_eq!(serde_json::from_str::<Point>(r#"["0.7"]"#).unwrap(), Point::line(q(7, 10)));
        assert!(serde_json::from_str::<Point>(r#"["1","2","3"]"#).is_err());
    }

    #[test]
    fn mixed_kinds_rejected() {
        let pts = [Point::sym("a"), Point::line(q(1, 1))];
        assert!(common_kind(&pts).is_err());
        assert_eq!(common_kind(&pts[..1]).unwrap(), Some(PointKind::Symbolic));
    }
}

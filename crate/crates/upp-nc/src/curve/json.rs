use serde::{Deserialize, Serialize};

use super::{Curve, Element, Point, Segment, Sequence};
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, ExtendedValue, Rational};

/// Wire form of a curve. Every number is a `p/q` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub sequence: Vec<ElementJson>,
    #[serde(rename = "T")]
    pub t: String,
    pub d: String,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ElementJson {
    Point {
        t: String,
        v: String,
    },
    Segment {
        start: String,
        end: String,
        #[serde(rename = "rightLimitAtStart")]
        right_limit_at_start: String,
        #[serde(rename = "leftLimitAtEnd")]
        left_limit_at_end: String,
    },
}

fn value(s: &str) -> Result<ExtendedValue> {
    s.parse()
}

fn time(s: &str) -> Result<Rational> {
    parse_rational(s)
}

impl ElementJson {
    pub fn to_element(&self) -> Result<Element> {
        Ok(match self {
            ElementJson::Point { t, v } => Point::new(time(t)?, value(v)?).into(),
            ElementJson::Segment { start, end, right_limit_at_start, left_limit_at_end } => {
                Segment::new(time(start)?, time(end)?, value(right_limit_at_start)?, value(left_limit_at_end)?).into()
            }
        })
    }

    pub fn from_element(e: &Element) -> Self {
        match e {
            Element::Point(p) => ElementJson::Point { t: format_rational(&p.time), v: p.value.to_string() },
            Element::Segment(s) => ElementJson::Segment {
                start: format_rational(&s.start),
                end: format_rational(&s.end),
                right_limit_at_start: s.right_limit_at_start.to_string(),
                left_limit_at_end: s.left_limit_at_end.to_string(),
            },
        }
    }
}

impl CurveJson {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses the numbers and validates every curve invariant.
    pub fn to_curve(&self) -> Result<Curve> {
        let elements = self.sequence.iter().map(ElementJson::to_element).collect::<Result<Vec<_>>>()?;
        let seq = Sequence::new(elements)?;
        Curve::new(seq, time(&self.t)?, time(&self.d)?, time(&self.c)?)
    }

    pub fn from_curve(c: &Curve) -> Self {
        CurveJson {
            sequence: c.sequence().elements().iter().map(ElementJson::from_element).collect(),
            t: format_rational(c.pseudo_period_start()),
            d: format_rational(c.pseudo_period_length()),
            c: format_rational(c.pseudo_period_height()),
        }
    }
}

impl Curve {
    pub fn from_json(text: &str) -> Result<Curve> {
        CurveJson::parse(text)?.to_curve()
    }

    /// Pretty-printed JSON; stable for a given curve.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CurveJson::from_curve(self)).expect("serializable")
    }
}

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An axis range `min:max:count`, linear or log-spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize, log: bool) -> Result<Self> {
        if count < 1 {
            return Err(Error::Parse("grid count must be at least 1".into()));
        }
        if !(min.is_finite() && max.is_finite()) || !(min < max) {
            return Err(Error::Parse(format!("grid range needs finite min < max, got {min}:{max}")));
        }
        if log && !(min > 0.0) {
            return Err(Error::Parse(format!("log spacing needs min > 0, got {min}")));
        }
        Ok(AxisRange { min, max, count, log })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let steps = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let u = i as f64 / steps;
                if i == 0 {
                    self.min
                } else if i == self.count - 1 {
                    self.max
                } else if self.log {
                    (self.min.ln() + u * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + u * (self.max - self.min)
                }
            })
            .collect()
    }
}

impl fmt::Display for AxisRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}{}", self.min, self.max, self.count, if self.log { ":log" } else { "" })
    }
}

/// Sampling grid over the compactified strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub t1: AxisRange,
    pub t2: AxisRange,
    pub include_boundary: bool,
}

pub const DEFAULT_T1: AxisRange = AxisRange { min: -4.0, max: 4.0, count: 41, log: false };
pub const DEFAULT_T2: AxisRange = AxisRange { min: 1e-2, max: 1e2, count: 41, log: true };

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t1: DEFAULT_T1, t2: DEFAULT_T2, include_boundary: true }
    }
}

impl GridSpec {
    /// Parses `t1=<min>:<max>:<count>[,t2=<min>:<max>:<count>[:log]]`; either
    /// key may be omitted and falls back to the default axis.
    pub fn parse(spec: &str, include_boundary: bool) -> Result<Self> {
        let mut t1 = None;
        let mut t2 = None;
        for part in spec.split(',').map(str::trim) {
            let (key, range) =
                part.split_once('=').ok_or_else(|| Error::Parse(format!("grid item {part:?} is not key=range")))?;
            let slot = match key.trim() {
                "t1" => &mut t1,
                "t2" => &mut t2,
                other => return Err(Error::Parse(format!("unknown grid key {other:?}"))),
            };
            if slot.is_some() {
                return Err(Error::Parse(format!("grid key {key} given twice")));
            }
            *slot = Some(parse_range(range)?);
        }
        Ok(GridSpec { t1: t1.unwrap_or(DEFAULT_T1), t2: t2.unwrap_or(DEFAULT_T2), include_boundary })
    }
}

fn parse_range(s: &str) -> Result<AxisRange> {
    let fields: Vec<&str> = s.split(':').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {x:?} in range {s:?}")));
    let log = match fields.len() {
        3 => false,
        4 if fields[3] == "log" => true,
        4 if fields[3] == "lin" => false,
        _ => return Err(Error::Parse(format!("range {s:?} is not min:max:count[:log]"))),
    };
    let count = fields[2].parse::<usize>().map_err(|_| Error::Parse(format!("bad count {:?} in range {s:?}", fields[2])))?;
    AxisRange::new(num(fields[0])?, num(fields[1])?, count, log)
}

use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Value};

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::exec::{try_map, Execution};
use crate::linalg::Matrix;
use crate::specfun::AdaptiveOptions;
use crate::spectral::{
    gamma_a_matrix_with, gamma_a_scalar_with, gamma_b_boundary, gamma_b_with, gamma_c_with, phi_a_with, phi_plus,
    CompactPoint, HalfLineEnd, Space,
};
use crate::symbols::{parse_symbol, CatalogSymbol, Symbol1D, Symbol2D, SymbolHalfLine};

/// What `sample` evaluates. For `a-*` and `c-*` the grid coordinates are
/// `(x1, x2)`; for `phi-a` they are `(t1, t2)`; `b-1n` reads only `t2` and
/// `phi-plus` only `t1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    #[value(name = "b-1n")]
    B1n,
    #[value(name = "a-1n")]
    A1n,
    #[value(name = "a-n1")]
    An1,
    #[value(name = "c-1n")]
    C1n,
    #[value(name = "c-n1")]
    Cn1,
    #[value(name = "phi-a")]
    PhiA,
    #[value(name = "phi-plus")]
    PhiPlus,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::B1n => "b-1n",
            Case::A1n => "a-1n",
            Case::An1 => "a-n1",
            Case::C1n => "c-1n",
            Case::Cn1 => "c-n1",
            Case::PhiA => "phi-a",
            Case::PhiPlus => "phi-plus",
        }
    }

    /// Whether boundary strata are defined for this case.
    pub fn has_boundary(self) -> bool {
        matches!(self, Case::B1n | Case::PhiA | Case::PhiPlus)
    }
}

/// A grid point as written to CSV/JSON; coordinates a case ignores are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub kind: &'static str,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

impl SamplePoint {
    fn from_compact(p: CompactPoint) -> Self {
        let (t1, t2) = p.coords();
        SamplePoint { kind: p.kind(), t1: Some(t1), t2: Some(t2) }
    }
}

#[derive(Debug, Clone)]
enum Parsed {
    Nothing,
    Line(Symbol1D),
    HalfLine(SymbolHalfLine),
    Plane(Symbol2D),
}

/// A case bound to its symbol and size.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub case: Case,
    pub n: usize,
    pub quad: AdaptiveOptions,
    symbol_spec: Option<String>,
    symbol: Parsed,
}

fn usage(e: Error) -> Error {
    match e {
        Error::Parse(_) => e,
        other => Error::Parse(other.to_string()),
    }
}

impl Sampler {
    pub fn new(case: Case, symbol: Option<&str>, n: usize, quad: AdaptiveOptions) -> Result<Self> {
        crate::specfun::check_n(n).map_err(usage)?;
        let need = || symbol.ok_or_else(|| Error::Parse(format!("case {} needs --symbol", case.name())));
        let parsed = match case {
            Case::PhiPlus => Parsed::Nothing,
            Case::B1n => Parsed::HalfLine(parse_symbol(need()?)?.into_half_line().map_err(usage)?),
            Case::A1n | Case::An1 | Case::PhiA => Parsed::Line(parse_symbol(need()?)?.into_line().map_err(usage)?),
            Case::C1n | Case::Cn1 => Parsed::Plane(parse_plane(need()?)?),
        };
        Ok(Sampler { case, n, quad, symbol_spec: symbol.map(String::from), symbol: parsed })
    }

    /// Grid points in output order: interior first, then bottom, top, left
    /// and right strata when the boundary is included.
    pub fn points(&self, grid: &GridSpec) -> Vec<SamplePoint> {
        let (t1s, t2s) = (grid.t1.values(), grid.t2.values());
        let inf = f64::INFINITY;
        let boundary = grid.include_boundary && self.case.has_boundary();
        let mut pts = Vec::new();
        match self.case {
            Case::PhiPlus => {
                let mut ts = t1s;
                if boundary {
                    ts.insert(0, -inf);
                    ts.push(inf);
                }
                pts.extend(ts.into_iter().map(|t| SamplePoint { kind: "bottom", t1: Some(t), t2: None }));
            }
            Case::B1n => {
                if boundary {
                    pts.push(SamplePoint { kind: "bottom", t1: None, t2: Some(0.0) });
                }
                pts.extend(t2s.iter().map(|&t| SamplePoint { kind: "interior", t1: None, t2: Some(t) }));
                if boundary {
                    pts.push(SamplePoint { kind: "top", t1: None, t2: Some(inf) });
                }
            }
            _ => {
                for &t1 in &t1s {
                    for &t2 in &t2s {
                        pts.push(SamplePoint { kind: "interior", t1: Some(t1), t2: Some(t2) });
                    }
                }
                if boundary {
                    let mut edge_t2 = vec![0.0];
                    edge_t2.extend_from_slice(&t2s);
                    edge_t2.push(inf);
                    let strata = t1s
                        .iter()
                        .map(|&t1| CompactPoint::Bottom { t1 })
                        .chain(t1s.iter().map(|&t1| CompactPoint::Top { t1 }))
                        .chain(edge_t2.iter().map(|&t2| CompactPoint::Left { t2 }))
                        .chain(edge_t2.iter().map(|&t2| CompactPoint::Right { t2 }));
                    pts.extend(strata.map(SamplePoint::from_compact));
                }
            }
        }
        pts
    }

    pub fn eval(&self, p: &SamplePoint) -> Result<Matrix> {
        let n = self.n;
        let q = self.quad;
        let coord = |c: Option<f64>, name: &str| c.ok_or_else(|| Error::Domain(format!("point lacks {name}")));
        match (&self.symbol, self.case) {
            (_, Case::PhiPlus) => Ok(phi_plus(n, coord(p.t1, "t1")?)?.entries),
            (Parsed::HalfLine(b), Case::B1n) => {
                let x2 = coord(p.t2, "t2")?;
                if x2 == 0.0 {
                    Ok(gamma_b_boundary(b, n, HalfLineEnd::Zero)?.entries)
                } else if x2 == f64::INFINITY {
                    Ok(gamma_b_boundary(b, n, HalfLineEnd::Infinity)?.entries)
                } else {
                    Ok(gamma_b_with(b, n, x2, q)?.entries)
                }
            }
            (Parsed::Line(a), Case::A1n) => {
                Ok(Matrix::scalar(n, gamma_a_scalar_with(a, coord(p.t1, "t1")?, coord(p.t2, "t2")?, q)?))
            }
            (Parsed::Line(a), Case::An1) => Ok(gamma_a_matrix_with(a, n, coord(p.t1, "t1")?, coord(p.t2, "t2")?, q)?.entries),
            (Parsed::Plane(c), Case::C1n | Case::Cn1) => {
                let space = if self.case == Case::C1n { Space::OneN } else { Space::NOne };
                Ok(gamma_c_with(c, n, coord(p.t1, "t1")?, coord(p.t2, "t2")?, space, q)?.entries)
            }
            (Parsed::Line(a), Case::PhiA) => {
                let pt = CompactPoint::from_coords(coord(p.t1, "t1")?, coord(p.t2, "t2")?)?;
                Ok(phi_a_with(a, n, pt, q)?.entries)
            }
            _ => Err(Error::Domain(format!("case {} does not match its symbol", self.case.name()))),
        }
    }

    pub fn eval_all(&self, pts: &[SamplePoint], exec: Execution) -> Result<Vec<Matrix>> {
        try_map(exec, pts, |p| self.eval(p))
    }

    pub fn symbol_spec(&self) -> Option<&str> {
        self.symbol_spec.as_deref()
    }
}

/// `c` for the `c-*` cases: a line symbol acts on `u`, a `b:` symbol on `v`,
/// and `<line>*<b:...>` gives the product.
fn parse_plane(spec: &str) -> Result<Symbol2D> {
    if let Some(idx) = spec.find("*b:") {
        let a = parse_symbol(&spec[..idx])?.into_line().map_err(usage)?;
        let b = parse_symbol(&spec[idx + 1..])?.into_half_line().map_err(usage)?;
        return Ok(Symbol2D::product(a, b));
    }
    Ok(match parse_symbol(spec)? {
        CatalogSymbol::HalfLine(b) => Symbol2D::from_half_line(b),
        line => line.into_plane(),
    })
}

/// `-inf` / `+inf` for infinities, shortest round-trip decimal otherwise.
pub fn format_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x != 0.0 && (x.abs() < 1e-5 || x.abs() >= 1e16) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Inverse of [`format_f64`].
pub fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "+inf" | "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}"))),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, pts: &[SamplePoint], mats: &[Matrix]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "t1", "t2", "j", "k", "value"])?;
    for (p, m) in pts.iter().zip(mats) {
        let (t1, t2) = (opt(p.t1), opt(p.t2));
        for j in 0..m.n() {
            for k in 0..m.n() {
                w.write_record([p.kind, &t1, &t2, &(j + 1).to_string(), &(k + 1).to_string(), &format_f64(m[(j, k)])])?;
            }
        }
    }
    w.flush()
}

fn json_num(x: Option<f64>) -> Value {
    match x {
        None => Value::Null,
        Some(v) if v.is_infinite() => Value::String(format_f64(v)),
        Some(v) => json!(v),
    }
}

pub fn to_json(sampler: &Sampler, grid: &GridSpec, pts: &[SamplePoint], mats: &[Matrix]) -> Value {
    let samples: Vec<Value> = pts
        .iter()
        .zip(mats)
        .map(|(p, m)| json!({"point": {"kind": p.kind, "t1": json_num(p.t1), "t2": json_num(p.t2)}, "matrix": m.rows()}))
        .collect();
    json!({
        "case": sampler.case.name(),
        "n": sampler.n,
        "symbol": sampler.symbol_spec(),
        "grid": {"t1": grid.t1.to_string(), "t2": grid.t2.to_string(), "include_boundary": grid.include_boundary},
        "samples": samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.0, 1.0, -2.5, 0.1, 1e-7, 3.0e20, 0.3989422804014327, f64::INFINITY, f64::NEG_INFINITY] {
            let s = format_f64(x);
            assert_eq!(parse_f64(&s).unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn phi_a_points_cover_strata() {
        let s = Sampler::new(Case::PhiA, Some("sigmoid"), 1, AdaptiveOptions::default()).unwrap();
        let g = GridSpec::parse("t1=-1:1:3,t2=0.5:2:2", true).unwrap();
        let pts = s.points(&g);
        assert_eq!(pts.len(), 6 + 3 + 3 + 4 + 4);
        let right2 = pts.iter().find(|p| p.kind == "right" && p.t2 == Some(2.0)).unwrap();
        assert!((s.eval(right2).unwrap()[(0, 0)] + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_kinds_are_checked() {
        let q = AdaptiveOptions::default();
        assert!(matches!(Sampler::new(Case::B1n, Some("sigmoid"), 2, q), Err(Error::Parse(_))));
        assert!(matches!(Sampler::new(Case::PhiA, Some("b:inv1p"), 2, q), Err(Error::Parse(_))));
        assert!(matches!(Sampler::new(Case::PhiA, None, 2, q), Err(Error::Parse(_))));
        assert!(matches!(Sampler::new(Case::PhiPlus, None, 13, q), Err(Error::Parse(_))));
        assert!(Sampler::new(Case::B1n, Some("const:1"), 2, q).is_ok());
        assert!(Sampler::new(Case::C1n, Some("sigmoid*b:ind01"), 2, q).is_ok());
        assert!(Sampler::new(Case::Cn1, Some("b:ind01"), 2, q).is_ok());
    }
}

//! Symbol classes: bounded functions on the line with limits at infinity and
//! one-sided limits at breakpoints, functions on the half line with limits at
//! `0` and `+inf`, and two-variable nilpotent symbols.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type LineFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A jump location with its one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    pub left: f64,
    pub right: f64,
}

/// Bounded real symbol on the line with declared limits `a(-inf)`, `a(+inf)`.
#[derive(Clone)]
pub struct Symbol1D {
    name: String,
    eval: LineFn,
    pub limit_neg_inf: f64,
    pub limit_pos_inf: f64,
    pub breakpoints: Vec<Breakpoint>,
    /// Points where the symbol is continuous but not smooth; quadrature
    /// splits there as well.
    pub kinks: Vec<f64>,
    pub smooth: bool,
    pub sup_norm: f64,
    /// How close `eval(+-1e6)` must be to the declared limits.
    pub approach_tol: f64,
    constant: Option<f64>,
}

impl Symbol1D {
    pub fn new<F>(name: impl Into<String>, f: F, limit_neg_inf: f64, limit_pos_inf: f64, sup_norm: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Symbol1D {
            name: name.into(),
            eval: Arc::new(f),
            limit_neg_inf,
            limit_pos_inf,
            breakpoints: Vec::new(),
            kinks: Vec::new(),
            smooth: true,
            sup_norm,
            approach_tol: 1e-5,
            constant: None,
        }
    }

    pub fn with_breakpoint(mut self, at: f64, left: f64, right: f64) -> Self {
        self.breakpoints.push(Breakpoint { at, left, right });
        self.smooth = false;
        self
    }

    pub fn with_kinks(mut self, kinks: &[f64]) -> Self {
        self.kinks.extend_from_slice(kinks);
        self.smooth = false;
        self
    }

    pub fn constant(c: f64) -> Self {
        let mut s = Symbol1D::new(format!("const:{c}"), move |_| c, c, c, c.abs());
        s.constant = Some(c);
        s
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `chi_+ = 1_{[0, +inf]}`, right-continuous at `0`.
    pub fn chi_plus() -> Self {
        Symbol1D::new("chi+", |s| if s >= 0.0 { 1.0 } else { 0.0 }, 0.0, 1.0, 1.0).with_breakpoint(0.0, 0.0, 1.0)
    }

    /// `chi_- = 1 - chi_+`.
    pub fn chi_minus() -> Self {
        Symbol1D::new("chi-", |s| if s >= 0.0 { 0.0 } else { 1.0 }, 1.0, 0.0, 1.0).with_breakpoint(0.0, 1.0, 0.0)
    }

    /// `s / sqrt(s^2 + 1)`.
    pub fn sigmoid() -> Self {
        let mut s = Symbol1D::new("sigmoid", |s: f64| s / s.hypot(1.0), -1.0, 1.0, 1.0);
        // 1 - s/sqrt(s^2+1) ~ 1/(2 s^2) = 5e-13 at 1e6
        s.approach_tol = 1e-11;
        s
    }

    /// `1 / (s^2 + 1)`.
    pub fn witch() -> Self {
        Symbol1D::new("witch", |s| 1.0 / (s * s + 1.0), 0.0, 0.0, 1.0)
    }

    /// `|s| / (s^2 + 1)`, continuous at `0` with value `0`.
    pub fn abs_witch() -> Self {
        Symbol1D::new("abswitch", |s: f64| s.abs() / (s * s + 1.0), 0.0, 0.0, 0.5).with_kinks(&[0.0])
    }

    /// Tent kernel `(1/alpha) T((y - r)/alpha)` with `T(y) = max(0, 1 - |y|)`.
    pub fn triangle(alpha: f64, r: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !r.is_finite() {
            return Err(Error::Domain(format!("triangle needs alpha > 0 and finite r, got ({alpha}, {r})")));
        }
        let f = move |y: f64| (1.0 - ((y - r) / alpha).abs()).max(0.0) / alpha;
        Ok(Symbol1D::new(format!("triangle:{alpha},{r}"), f, 0.0, 0.0, 1.0 / alpha).with_kinks(&[r - alpha, r, r + alpha]))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    fn breakpoint_at(&self, at: f64) -> Option<&Breakpoint> {
        self.breakpoints.iter().find(|b| b.at == at)
    }

    /// `a(0-)`.
    pub fn left_limit_at_zero(&self) -> f64 {
        self.breakpoint_at(0.0).map_or_else(|| self.eval(0.0), |b| b.left)
    }

    /// `a(0+)`.
    pub fn right_limit_at_zero(&self) -> f64 {
        self.breakpoint_at(0.0).map_or_else(|| self.eval(0.0), |b| b.right)
    }

    /// Breakpoint and kink locations, sorted.
    pub fn split_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.breakpoints.iter().map(|b| b.at).chain(self.kinks.iter().copied()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Fails unless every breakpoint sits at `0`.
    pub fn require_pc_at_zero(&self) -> Result<()> {
        match self.breakpoints.iter().find(|b| b.at != 0.0) {
            Some(b) => Err(Error::UnsupportedClass(format!(
                "symbol {} jumps at {}; only jumps at 0 are supported",
                self.name, b.at
            ))),
            None => Ok(()),
        }
    }

    /// `a + jump * chi_+`.
    pub fn add_jump(&self, jump: f64) -> Symbol1D {
        if jump == 0.0 {
            return self.clone();
        }
        let base = self.eval.clone();
        let mut out = self.clone();
        out.name = format!("pc:{}+{}*chi+", self.name, jump);
        out.eval = Arc::new(move |s| base(s) + if s >= 0.0 { jump } else { 0.0 });
        out.limit_pos_inf += jump;
        out.sup_norm += jump.abs();
        out.constant = None;
        out.smooth = false;
        let (left, right) = (self.left_limit_at_zero(), self.right_limit_at_zero() + jump);
        out.breakpoints.retain(|b| b.at != 0.0);
        out.breakpoints.push(Breakpoint { at: 0.0, left, right });
        out
    }

    /// Max deviation of `eval(-+1e6)` from the declared limits.
    pub fn limit_defect(&self) -> f64 {
        (self.eval(-1e6) - self.limit_neg_inf).abs().max((self.eval(1e6) - self.limit_pos_inf).abs())
    }
}

impl fmt::Debug for Symbol1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol1D")
            .field("name", &self.name)
            .field("limits", &(self.limit_neg_inf, self.limit_pos_inf))
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

/// Splits `a` in `PC(R, {0})` as `a = a_hat + jump * chi_+` with `a_hat`
/// continuous at `0` (taking the value `a(0-)` there).
pub fn pc_decompose(a: &Symbol1D) -> Result<(Symbol1D, f64)> {
    a.require_pc_at_zero()?;
    let jump = a.right_limit_at_zero() - a.left_limit_at_zero();
    if jump == 0.0 {
        let mut cont = a.clone();
        cont.breakpoints.clear();
        return Ok((cont, 0.0));
    }
    let base = a.eval.clone();
    let mut cont = a.clone();
    cont.name = format!("{}-{}*chi+", a.name, jump);
    cont.eval = Arc::new(move |s| base(s) - if s >= 0.0 { jump } else { 0.0 });
    cont.limit_pos_inf -= jump;
    cont.breakpoints.clear();
    cont.kinks.push(0.0);
    cont.constant = None;
    Ok((cont, jump))
}

/// Bounded symbol on `(0, +inf)` with limits `b(0+)` and `b(+inf)`.
#[derive(Clone)]
pub struct SymbolHalfLine {
    name: String,
    eval: LineFn,
    pub limit_zero: f64,
    pub limit_inf: f64,
    /// Jump locations in `(0, +inf)`.
    pub breakpoints: Vec<f64>,
    pub sup_norm: f64,
    pub approach_tol: f64,
}

impl SymbolHalfLine {
    pub fn new<F>(name: impl Into<String>, f: F, limit_zero: f64, limit_inf: f64, sup_norm: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SymbolHalfLine {
            name: name.into(),
            eval: Arc::new(f),
            limit_zero,
            limit_inf,
            breakpoints: Vec::new(),
            sup_norm,
            approach_tol: 1e-5,
        }
    }

    pub fn constant(c: f64) -> Self {
        SymbolHalfLine::new(format!("const:{c}"), move |_| c, c, c, c.abs())
    }

    /// `1 / (1 + y)`.
    pub fn inv1p() -> Self {
        SymbolHalfLine::new("b:inv1p", |y| 1.0 / (1.0 + y), 1.0, 0.0, 1.0)
    }

    /// Indicator of `(0, 1)`.
    pub fn ind01() -> Self {
        let mut b = SymbolHalfLine::new("b:ind01", |y| if y < 1.0 { 1.0 } else { 0.0 }, 1.0, 0.0, 1.0);
        b.breakpoints.push(1.0);
        b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    /// Max deviation of `eval` near `0` and far out from the declared limits.
    pub fn limit_defect(&self) -> f64 {
        (self.eval(1e-6) - self.limit_zero).abs().max((self.eval(1e6) - self.limit_inf).abs())
    }
}

impl fmt::Debug for SymbolHalfLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolHalfLine")
            .field("name", &self.name)
            .field("limits", &(self.limit_zero, self.limit_inf))
            .finish_non_exhaustive()
    }
}

/// Nilpotent symbol `c(u, v)`, `u = Im z1`, `v = Im z2 - |z1|^2 > 0`.
#[derive(Clone)]
pub struct Symbol2D {
    name: String,
    eval: PlaneFn,
    factors: Option<(Symbol1D, SymbolHalfLine)>,
    pub u_splits: Vec<f64>,
    pub v_splits: Vec<f64>,
    pub sup_norm: f64,
}

impl Symbol2D {
    /// A general two-variable symbol with no declared factorization.
    pub fn new<F>(name: impl Into<String>, f: F, u_splits: &[f64], v_splits: &[f64], sup_norm: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Symbol2D {
            name: name.into(),
            eval: Arc::new(f),
            factors: None,
            u_splits: u_splits.to_vec(),
            v_splits: v_splits.to_vec(),
            sup_norm,
        }
    }

    /// `c(u, v) = a(u) b(v)`.
    pub fn product(a: Symbol1D, b: SymbolHalfLine) -> Self {
        let (fa, fb) = (a.eval.clone(), b.eval.clone());
        Symbol2D {
            name: format!("{}*{}", a.name, b.name),
            eval: Arc::new(move |u, v| fa(u) * fb(v)),
            u_splits: a.split_points(),
            v_splits: b.breakpoints.clone(),
            sup_norm: a.sup_norm * b.sup_norm,
            factors: Some((a, b)),
        }
    }

    /// `c(u, v) = a(u)`.
    pub fn from_line(a: Symbol1D) -> Self {
        let mut c = Self::product(a, SymbolHalfLine::constant(1.0));
        c.name = c.factors.as_ref().unwrap().0.name.clone();
        c
    }

    /// `c(u, v) = b(v)`.
    pub fn from_half_line(b: SymbolHalfLine) -> Self {
        let mut c = Self::product(Symbol1D::constant(1.0), b);
        c.name = c.factors.as_ref().unwrap().1.name.clone();
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        (self.eval)(u, v)
    }

    pub fn factors(&self) -> Option<&(Symbol1D, SymbolHalfLine)> {
        self.factors.as_ref()
    }

    /// Same symbol with the factorization forgotten, forcing the full
    /// two-dimensional quadrature path.
    pub fn without_factorization(&self) -> Self {
        let mut c = self.clone();
        c.factors = None;
        c
    }
}

impl fmt::Debug for Symbol2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol2D")
            .field("name", &self.name)
            .field("factored", &self.factors.is_some())
            .finish_non_exhaustive()
    }
}

/// A catalog entry: either a line symbol or a half-line symbol.
#[derive(Debug, Clone)]
pub enum CatalogSymbol {
    Line(Symbol1D),
    HalfLine(SymbolHalfLine),
}

impl CatalogSymbol {
    pub fn name(&self) -> &str {
        match self {
            CatalogSymbol::Line(a) => a.name(),
            CatalogSymbol::HalfLine(b) => b.name(),
        }
    }

    pub fn into_line(self) -> Result<Symbol1D> {
        match self {
            CatalogSymbol::Line(a) => Ok(a),
            CatalogSymbol::HalfLine(b) => Err(Error::Domain(format!("{} is a half-line symbol", b.name()))),
        }
    }

    /// Half-line symbols pass through; constants convert.
    pub fn into_half_line(self) -> Result<SymbolHalfLine> {
        match self {
            CatalogSymbol::HalfLine(b) => Ok(b),
            CatalogSymbol::Line(a) => match a.constant_value() {
                Some(c) => Ok(SymbolHalfLine::constant(c)),
                None => Err(Error::Domain(format!("{} is not a half-line symbol", a.name()))),
            },
        }
    }

    /// Line symbols act on `u`, half-line symbols on `v`.
    pub fn into_plane(self) -> Symbol2D {
        match self {
            CatalogSymbol::Line(a) => Symbol2D::from_line(a),
            CatalogSymbol::HalfLine(b) => Symbol2D::from_half_line(b),
        }
    }
}

/// Looks up a named catalog symbol.
///
/// `const` takes one parameter (the value), `triangle` takes `(alpha, r)`;
/// the rest take none.
pub fn catalog(name: &str, params: &[f64]) -> Result<CatalogSymbol> {
    let want = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::Domain(format!("{name} takes {k} parameter(s), got {}", params.len())))
        }
    };
    let sym = match name {
        "const" => {
            want(1)?;
            CatalogSymbol::Line(Symbol1D::constant(params[0]))
        }
        "chi_plus" => CatalogSymbol::Line(Symbol1D::chi_plus()),
        "chi_minus" => CatalogSymbol::Line(Symbol1D::chi_minus()),
        "sigmoid" => CatalogSymbol::Line(Symbol1D::sigmoid()),
        "witch" => CatalogSymbol::Line(Symbol1D::witch()),
        "abs_witch" => CatalogSymbol::Line(Symbol1D::abs_witch()),
        "triangle" => {
            want(2)?;
            CatalogSymbol::Line(Symbol1D::triangle(params[0], params[1])?)
        }
        "b_inv1p" => CatalogSymbol::HalfLine(SymbolHalfLine::inv1p()),
        "b_ind01" => CatalogSymbol::HalfLine(SymbolHalfLine::ind01()),
        other => return Err(Error::Domain(format!("unknown catalog symbol {other:?}"))),
    };
    if !matches!(name, "const" | "triangle") {
        want(0)?;
    }
    Ok(sym)
}

/// One instance of every line symbol in the catalog, plus a PC symbol with
/// a nontrivial continuous part.
pub fn line_catalog() -> Vec<Symbol1D> {
    ["const:2", "chi+", "chi-", "sigmoid", "witch", "abswitch", "triangle:1,0", "triangle:0.5,1", "pc:sigmoid+2*chi+"]
        .iter()
        .map(|s| parse_symbol(s).and_then(CatalogSymbol::into_line).expect("catalog entry parses"))
        .collect()
}

/// One instance of every half-line symbol in the catalog.
pub fn half_line_catalog() -> Vec<SymbolHalfLine> {
    vec![SymbolHalfLine::constant(1.0), SymbolHalfLine::inv1p(), SymbolHalfLine::ind01()]
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("not a finite number: {s:?}")))
    }
}

/// Parses the symbol mini-language:
/// `const:<float>`, `chi+`, `chi-`, `sigmoid`, `witch`, `abswitch`,
/// `triangle:<alpha>,<r>`, `pc:<base-name>+<jump>*chi+`, `b:inv1p`, `b:ind01`.
pub fn parse_symbol(spec: &str) -> Result<CatalogSymbol> {
    let spec = spec.trim();
    let bad = |e: Error| match e {
        Error::Parse(m) => Error::Parse(m),
        other => Error::Parse(other.to_string()),
    };
    if let Some(v) = spec.strip_prefix("const:") {
        return catalog("const", &[parse_f64(v)?]).map_err(bad);
    }
    if let Some(rest) = spec.strip_prefix("triangle:") {
        let (a, r) = rest.split_once(',').ok_or_else(|| Error::Parse(format!("triangle needs <alpha>,<r>: {spec:?}")))?;
        return catalog("triangle", &[parse_f64(a)?, parse_f64(r)?]).map_err(bad);
    }
    if let Some(rest) = spec.strip_prefix("pc:") {
        let body = rest
            .strip_suffix("*chi+")
            .ok_or_else(|| Error::Parse(format!("pc symbol must end with *chi+: {spec:?}")))?;
        let (base, jump) = body
            .rsplit_once('+')
            .ok_or_else(|| Error::Parse(format!("pc symbol needs <base>+<jump>: {spec:?}")))?;
        if base.starts_with("pc:") || base.starts_with("b:") {
            return Err(Error::Parse(format!("invalid pc base {base:?}")));
        }
        let base = parse_symbol(base)?.into_line().map_err(bad)?;
        return Ok(CatalogSymbol::Line(base.add_jump(parse_f64(jump)?)));
    }
    let name = match spec {
        "chi+" => "chi_plus",
        "chi-" => "chi_minus",
        "sigmoid" => "sigmoid",
        "witch" => "witch",
        "abswitch" => "abs_witch",
        "b:inv1p" => "b_inv1p",
        "b:ind01" => "b_ind01",
        other => return Err(Error::Parse(format!("unknown symbol {other:?}"))),
    };
    catalog(name, &[]).map_err(bad)
}

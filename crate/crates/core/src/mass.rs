//! Discrete probability mass functions on the integers.
//!
//! A [`MassFunction`] pairs a pure evaluator with declared support bounds and
//! a label. Built-in families, finite mixtures, tables read from text and
//! arbitrary closures are all represented the same way so the solver never
//! needs to know where the masses come from.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use statrs::function::factorial::{binomial, ln_binomial, ln_factorial};
use statrs::function::gamma::ln_gamma;

use crate::error::{HdrError, Result};

/// Tolerance on the total mass of a table-backed distribution.
pub const TABLE_MASS_TOLERANCE: f64 = 1e-9;

/// Tolerance on the sum of mixture weights.
pub const MIXTURE_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Inclusive support bounds; `None` stands for an infinite bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Support {
    pub min: Option<i64>,
    pub max: Option<i64>,
}

impl Support {
    pub const UNBOUNDED: Support = Support {
        min: None,
        max: None,
    };

    pub fn new(min: Option<i64>, max: Option<i64>) -> Self {
        Support { min, max }
    }

    pub fn finite(min: i64, max: i64) -> Self {
        Support {
            min: Some(min),
            max: Some(max),
        }
    }

    pub fn left_bounded(min: i64) -> Self {
        Support {
            min: Some(min),
            max: None,
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.min.is_none_or(|m| x >= m) && self.max.is_none_or(|m| x <= m)
    }

    pub fn is_finite(&self) -> bool {
        self.min.is_some() && self.max.is_some()
    }

    /// Number of integers in the support, when finite and non-empty.
    pub fn size(&self) -> Option<u64> {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) if lo <= hi => Some((hi as i128 - lo as i128 + 1) as u64),
            (Some(_), Some(_)) => Some(0),
            _ => None,
        }
    }

    /// Smallest interval containing both supports.
    pub fn hull(&self, other: &Support) -> Support {
        Support {
            min: self.min.zip(other.min).map(|(a, b)| a.min(b)),
            max: self.max.zip(other.max).map(|(a, b)| a.max(b)),
        }
    }

    /// Bounds as floats, with infinities for missing bounds.
    pub fn as_f64(&self) -> (f64, f64) {
        (
            self.min.map_or(f64::NEG_INFINITY, |m| m as f64),
            self.max.map_or(f64::INFINITY, |m| m as f64),
        )
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.min {
            Some(m) => write!(f, "[{m}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match self.max {
            Some(m) => write!(f, "{m}]"),
            None => write!(f, "+inf)"),
        }
    }
}

/// Built-in parametric families.
///
/// Geometric and negative binomial count failures before the first (resp.
/// `r`-th) success, so both start at 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Poisson {
        lambda: f64,
    },
    Binomial {
        n: u64,
        p: f64,
    },
    Geometric {
        p: f64,
    },
    NegativeBinomial {
        r: f64,
        p: f64,
    },
    Hypergeometric {
        population: u64,
        successes: u64,
        draws: u64,
    },
    Uniform {
        lower: i64,
        upper: i64,
    },
    Point {
        at: i64,
    },
}

impl Family {
    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(HdrError::Spec(format!(
                "poisson rate must be positive, got {lambda}"
            )));
        }
        Ok(Family::Poisson { lambda })
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        check_prob(p, "binomial", true)?;
        Ok(Family::Binomial { n, p })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        check_prob(p, "geometric", false)?;
        Ok(Family::Geometric { p })
    }

    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(HdrError::Spec(format!(
                "negative binomial size must be positive, got {r}"
            )));
        }
        check_prob(p, "negative binomial", false)?;
        Ok(Family::NegativeBinomial { r, p })
    }

    pub fn hypergeometric(population: u64, successes: u64, draws: u64) -> Result<Self> {
        if successes > population || draws > population {
            return Err(HdrError::Spec(format!(
                "hypergeometric needs successes and draws <= population, got ({population}, {successes}, {draws})"
            )));
        }
        Ok(Family::Hypergeometric {
            population,
            successes,
            draws,
        })
    }

    pub fn uniform(lower: i64, upper: i64) -> Result<Self> {
        if lower > upper {
            return Err(HdrError::Spec(format!(
                "uniform bounds out of order: {lower} > {upper}"
            )));
        }
        Ok(Family::Uniform { lower, upper })
    }

    pub fn point(at: i64) -> Self {
        Family::Point { at }
    }

    /// Support bounds matching the family's quantile extremes.
    pub fn support(&self) -> Support {
        match *self {
            Family::Poisson { .. } | Family::Geometric { .. } | Family::NegativeBinomial { .. } => {
                Support::left_bounded(0)
            }
            Family::Binomial { n, .. } => Support::finite(0, n as i64),
            Family::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                let lo = (draws + successes).saturating_sub(population);
                Support::finite(lo as i64, draws.min(successes) as i64)
            }
            Family::Uniform { lower, upper } => Support::finite(lower, upper),
            Family::Point { at } => Support::finite(at, at),
        }
    }

    pub fn pmf(&self, x: i64) -> f64 {
        if !self.support().contains(x) {
            return 0.0;
        }
        match *self {
            Family::Poisson { lambda } => {
                let k = x as u64;
                (x as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
            }
            Family::Binomial { n, p } => binomial_pmf(n, p, x as u64),
            Family::Geometric { p } => {
                if p == 1.0 {
                    if x == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    p * (x as f64 * (-p).ln_1p()).exp()
                }
            }
            Family::NegativeBinomial { r, p } => {
                if p == 1.0 {
                    return if x == 0 { 1.0 } else { 0.0 };
                }
                let xf = x as f64;
                (ln_gamma(xf + r) - ln_gamma(r) - ln_factorial(x as u64)
                    + r * p.ln()
                    + xf * (-p).ln_1p())
                .exp()
            }
            Family::Hypergeometric {
                population,
                successes,
                draws,
            } => {
                let k = x as u64;
                (ln_binomial(successes, k) + ln_binomial(population - successes, draws - k)
                    - ln_binomial(population, draws))
                .exp()
            }
            Family::Uniform { lower, upper } => 1.0 / ((upper as f64 - lower as f64) + 1.0),
            Family::Point { .. } => 1.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Poisson { lambda } => write!(f, "pois({lambda})"),
            Family::Binomial { n, p } => write!(f, "binom({n}, {p})"),
            Family::Geometric { p } => write!(f, "geom({p})"),
            Family::NegativeBinomial { r, p } => write!(f, "nbinom({r}, {p})"),
            Family::Hypergeometric {
                population,
                successes,
                draws,
            } => write!(f, "hyper({population}, {successes}, {draws})"),
            Family::Uniform { lower, upper } => write!(f, "unif({lower}, {upper})"),
            Family::Point { at } => write!(f, "point({at})"),
        }
    }
}

fn check_prob(p: f64, family: &str, allow_zero: bool) -> Result<()> {
    let ok = p.is_finite() && p <= 1.0 && if allow_zero { p >= 0.0 } else { p > 0.0 };
    if ok {
        Ok(())
    } else {
        Err(HdrError::Spec(format!(
            "{family} probability out of range: {p}"
        )))
    }
}

fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let q = 1.0 - p;
    // The coefficient is taken at min(k, n - k) so symmetric cases tie exactly.
    let sym = k.min(n - k);
    if n <= 1000 {
        binomial(n, sym) * p.powi(k as i32) * q.powi((n - k) as i32)
    } else {
        (ln_binomial(n, sym) + k as f64 * p.ln() + (n - k) as f64 * q.ln()).exp()
    }
}

/// Weighted components of a finite mixture.
#[derive(Debug, Clone, Default)]
pub struct MixtureSpec {
    pub components: Vec<(f64, MassFunction)>,
}

impl MixtureSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, weight: f64, component: MassFunction) -> Self {
        self.components.push((weight, component));
        self
    }
}

type Evaluator = dyn Fn(i64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Family(Family),
    Mixture(Arc<[(f64, MassFunction)]>),
    Table(Arc<BTreeMap<i64, f64>>),
    Custom(Arc<Evaluator>),
}

/// An immutable probability mass function over the integers.
#[derive(Clone)]
pub struct MassFunction {
    kind: Kind,
    support: Support,
    label: String,
}

impl fmt::Debug for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            Kind::Family(_) => "family",
            Kind::Mixture(_) => "mixture",
            Kind::Table(_) => "table",
            Kind::Custom(_) => "custom",
        };
        f.debug_struct("MassFunction")
            .field("kind", &kind)
            .field("support", &self.support)
            .field("label", &self.label)
            .finish()
    }
}

impl From<Family> for MassFunction {
    fn from(family: Family) -> Self {
        MassFunction::family(family)
    }
}

impl MassFunction {
    pub fn family(family: Family) -> Self {
        MassFunction {
            support: family.support(),
            label: family.to_string(),
            kind: Kind::Family(family),
        }
    }

    /// Builds a finite mixture. Bounds are the hull of the component bounds.
    pub fn mixture(spec: MixtureSpec) -> Result<Self> {
        if spec.components.is_empty() {
            return Err(HdrError::Spec(
                "mixture needs at least one component".into(),
            ));
        }
        let mut total = 0.0;
        for (w, _) in &spec.components {
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0) {
                return Err(HdrError::Spec(format!("mixture weight out of (0, 1]: {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > MIXTURE_WEIGHT_TOLERANCE {
            return Err(HdrError::Spec(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let support = spec
            .components
            .iter()
            .map(|(_, c)| c.support)
            .reduce(|a, b| a.hull(&b))
            .unwrap_or_default();
        let label = format!(
            "mix({})",
            spec.components
                .iter()
                .map(|(w, c)| format!("{w}:{}", c.label))
                .collect::<Vec<_>>()
                .join(", ")
        );
        Ok(MassFunction {
            kind: Kind::Mixture(spec.components.into()),
            support,
            label,
        })
    }

    /// Table-backed distribution. Unlisted integers carry zero mass.
    ///
    /// With `renormalize` set, a table whose total differs from one is scaled
    /// to sum to one instead of being rejected.
    pub fn from_table(table: BTreeMap<i64, f64>, renormalize: bool) -> Result<Self> {
        for (&x, &m) in &table {
            if !(m.is_finite() && m >= 0.0) {
                return Err(HdrError::InvalidMass { x, mass: m });
            }
        }
        let total: f64 = table.values().sum();
        let mut table = table;
        if (total - 1.0).abs() > TABLE_MASS_TOLERANCE {
            if !renormalize || total <= 0.0 {
                return Err(HdrError::ImproperPmf(format!(
                    "table masses sum to {total}"
                )));
            }
            table.values_mut().for_each(|m| *m /= total);
        }
        let support = match (table.keys().next(), table.keys().next_back()) {
            (Some(&lo), Some(&hi)) => Support::finite(lo, hi),
            _ => return Err(HdrError::ImproperPmf("empty table".into())),
        };
        Ok(MassFunction {
            label: format!("table on {support}"),
            kind: Kind::Table(Arc::new(table)),
            support,
        })
    }

    /// Reads `x,mass` records, one per line. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn load_pmf_table<R: BufRead>(source: R, renormalize: bool) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let rec = line.trim();
            if rec.is_empty() || rec.starts_with('#') {
                continue;
            }
            let (xs, ms) = rec.split_once(',').ok_or_else(|| HdrError::Table {
                line: lineno,
                message: format!("expected `x,mass`, got {rec:?}"),
            })?;
            let x: i64 = xs.trim().parse().map_err(|_| HdrError::Table {
                line: lineno,
                message: format!("bad integer {:?}", xs.trim()),
            })?;
            let mass: f64 = ms.trim().parse().map_err(|_| HdrError::Table {
                line: lineno,
                message: format!("bad mass {:?}", ms.trim()),
            })?;
            if !(mass.is_finite() && mass >= 0.0) {
                return Err(HdrError::InvalidMass { x, mass });
            }
            if table.insert(x, mass).is_some() {
                return Err(HdrError::DuplicateKey { x, line: lineno });
            }
        }
        Self::from_table(table, renormalize)
    }

    /// Wraps an arbitrary evaluator. The closure must be pure; masses
    /// outside `support` are reported as zero without calling it.
    pub fn custom<F>(label: impl Into<String>, support: Support, f: F) -> Self
    where
        F: Fn(i64) -> f64 + Send + Sync + 'static,
    {
        MassFunction {
            kind: Kind::Custom(Arc::new(f)),
            support,
            label: label.into(),
        }
    }

    /// Replaces the declared support bounds.
    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The listed entries, for table-backed instances.
    pub fn table(&self) -> Option<&BTreeMap<i64, f64>> {
        match &self.kind {
            Kind::Table(t) => Some(t),
            _ => None,
        }
    }

    /// `f(x)`, zero outside the declared bounds.
    pub fn mass(&self, x: i64) -> Result<f64> {
        if !self.support.contains(x) {
            return Ok(0.0);
        }
        let m = self.raw(x)?;
        if m.is_finite() && m >= 0.0 {
            Ok(m)
        } else {
            Err(HdrError::InvalidMass { x, mass: m })
        }
    }

    fn raw(&self, x: i64) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Family(f) => f.pmf(x),
            Kind::Table(t) => t.get(&x).copied().unwrap_or(0.0),
            Kind::Custom(f) => f(x),
            Kind::Mixture(parts) => {
                let mut acc = 0.0;
                for (w, c) in parts.iter() {
                    acc += w * c.mass(x)?;
                }
                acc
            }
        })
    }
}

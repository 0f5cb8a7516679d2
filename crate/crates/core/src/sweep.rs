//! Deterministic parameter sweeps: positive-work maps over the two field
//! potentials, work and efficiency curves along one cycle parameter, and
//! discrete extremum detection.
//!
//! Every grid node is an independent task. Results are collected by index,
//! so output is bit-identical for any worker count. Sweeps run on the ambient
//! rayon pool; use [`with_threads`] to pin the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{cycle_report, CycleKind, CycleReport, CycleSpec, OperationMode};
use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::quadrature::QuadratureSettings;

/// Uniform grid with inclusive endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        let g = Self { start, stop, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() || self.stop <= self.start {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 nodes, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.stop - self.start) / (self.steps - 1) as f64
    }

    /// Node `i`; endpoints are reproduced exactly.
    pub fn node(&self, i: usize) -> f64 {
        let n = (self.steps - 1) as f64;
        let t = i as f64;
        if i + 1 == self.steps {
            self.stop
        } else {
            self.start + (self.stop - self.start) * t / n
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.node(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    /// `+` only when the value clears its numerical error band.
    pub fn of(value: f64, band: f64) -> Self {
        if value > band {
            Sign::Positive
        } else if value < -band {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
        }
    }
}

/// Otto work over the `(u_cold, u_hot)` plane. Rows are indexed by `u_hot`,
/// columns by `u_cold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkMap {
    pub axis_u_cold: GridSpec,
    pub axis_u_hot: GridSpec,
    pub t_hot: f64,
    pub t_cold: f64,
    pub values: Vec<Vec<f64>>,
    pub numerics: Vec<Vec<f64>>,
    pub signs: Vec<Vec<Sign>>,
}

impl WorkMap {
    /// `(u_cold, u_hot, work, sign)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (f64, f64, f64, Sign)> + '_ {
        (0..self.axis_u_hot.steps).flat_map(move |i| {
            (0..self.axis_u_cold.steps).map(move |j| {
                (
                    self.axis_u_cold.node(j),
                    self.axis_u_hot.node(i),
                    self.values[i][j],
                    self.signs[i][j],
                )
            })
        })
    }
}

/// Cycle parameters with exactly one hole: the swept one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PartialSpec {
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
    pub u_hot: Option<f64>,
    pub u_cold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    THot,
    TCold,
    UHot,
    UCold,
}

impl SweptParam {
    pub fn is_field(self) -> bool {
        matches!(self, SweptParam::UHot | SweptParam::UCold)
    }
}

impl PartialSpec {
    /// Fix everything except `swept`.
    pub fn sweeping(swept: SweptParam, spec: CycleSpec) -> Self {
        let mut s = PartialSpec {
            t_hot: Some(spec.t_hot),
            t_cold: Some(spec.t_cold),
            u_hot: Some(spec.u_hot),
            u_cold: Some(spec.u_cold),
        };
        match swept {
            SweptParam::THot => s.t_hot = None,
            SweptParam::TCold => s.t_cold = None,
            SweptParam::UHot => s.u_hot = None,
            SweptParam::UCold => s.u_cold = None,
        }
        s
    }

    pub fn swept(&self) -> Result<SweptParam> {
        let holes: Vec<SweptParam> = [
            (self.t_hot, SweptParam::THot),
            (self.t_cold, SweptParam::TCold),
            (self.u_hot, SweptParam::UHot),
            (self.u_cold, SweptParam::UCold),
        ]
        .into_iter()
        .filter_map(|(v, p)| v.is_none().then_some(p))
        .collect();
        match holes.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::InvalidParameter(format!(
                "exactly one cycle parameter must be swept, found {} open",
                holes.len()
            ))),
        }
    }

    pub fn complete(&self, value: f64) -> Result<CycleSpec> {
        let swept = self.swept()?;
        let pick = |slot: Option<f64>, me: SweptParam| {
            slot.unwrap_or(if swept == me { value } else { f64::NAN })
        };
        CycleSpec::new(
            pick(self.t_hot, SweptParam::THot),
            pick(self.t_cold, SweptParam::TCold),
            pick(self.u_hot, SweptParam::UHot),
            pick(self.u_cold, SweptParam::UCold),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Work,
    Efficiency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub cycle: CycleKind,
    pub quantity: Quantity,
    pub swept: SweptParam,
    pub fixed: PartialSpec,
    pub axis: GridSpec,
    pub lambda_so: f64,
}

/// One-parameter sweep. `None` marks nodes where the quantity is undefined
/// (efficiency outside engine operation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub abscissa: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub meta: CurveMeta,
}

impl Curve {
    /// Node with the largest defined value; first one on ties.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.abscissa
            .iter()
            .zip(&self.values)
            .filter_map(|(&x, v)| v.map(|v| (x, v)))
            .fold(None, |best: Option<(f64, f64)>, (x, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((x, v)),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub location: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Within one grid step of the critical potential (field sweeps only).
    pub is_at_critical: bool,
}

/// Runs `f` on a dedicated pool with `threads` workers.
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn otto_work_map(
    grid_u_cold: &GridSpec,
    grid_u_hot: &GridSpec,
    t_hot: f64,
    t_cold: f64,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<WorkMap> {
    grid_u_cold.validate()?;
    grid_u_hot.validate()?;
    let (rows, cols) = (grid_u_hot.steps, grid_u_cold.steps);
    let reports: Vec<CycleReport> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let spec = CycleSpec::new(
                t_hot,
                t_cold,
                grid_u_hot.node(idx / cols),
                grid_u_cold.node(idx % cols),
            )?;
            cycle_report(CycleKind::Otto, &spec, p, q)
        })
        .collect::<Result<_>>()?;

    let mut values = Vec::with_capacity(rows);
    let mut numerics = Vec::with_capacity(rows);
    let mut signs = Vec::with_capacity(rows);
    for row in reports.chunks(cols) {
        values.push(row.iter().map(|r| r.work).collect());
        numerics.push(row.iter().map(|r| r.numerics).collect());
        signs.push(row.iter().map(|r| Sign::of(r.work, r.numerics)).collect());
    }
    Ok(WorkMap {
        axis_u_cold: *grid_u_cold,
        axis_u_hot: *grid_u_hot,
        t_hot,
        t_cold,
        values,
        numerics,
        signs,
    })
}

/// Full cycle reports along one axis, in grid order.
pub fn curve_reports(
    kind: CycleKind,
    fixed: &PartialSpec,
    axis: &GridSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<Vec<CycleReport>> {
    axis.validate()?;
    fixed.swept()?;
    (0..axis.steps)
        .into_par_iter()
        .map(|i| cycle_report(kind, &fixed.complete(axis.node(i))?, p, q))
        .collect()
}

fn curve_from(
    kind: CycleKind,
    quantity: Quantity,
    fixed: &PartialSpec,
    axis: &GridSpec,
    p: &MaterialParams,
    reports: &[CycleReport],
) -> Result<Curve> {
    let values = reports
        .iter()
        .map(|r| match quantity {
            Quantity::Work => Some(r.work),
            Quantity::Efficiency => match r.mode {
                OperationMode::Engine => r.efficiency,
                _ => None,
            },
        })
        .collect();
    Ok(Curve {
        abscissa: axis.nodes(),
        values,
        meta: CurveMeta {
            cycle: kind,
            quantity,
            swept: fixed.swept()?,
            fixed: *fixed,
            axis: *axis,
            lambda_so: p.lambda_so(),
        },
    })
}

pub fn work_curve(
    kind: CycleKind,
    fixed: &PartialSpec,
    axis: &GridSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<Curve> {
    let reports = curve_reports(kind, fixed, axis, p, q)?;
    curve_from(kind, Quantity::Work, fixed, axis, p, &reports)
}

pub fn efficiency_curve(
    kind: CycleKind,
    fixed: &PartialSpec,
    axis: &GridSpec,
    p: &MaterialParams,
    q: &QuadratureSettings,
) -> Result<Curve> {
    let reports = curve_reports(kind, fixed, axis, p, q)?;
    curve_from(kind, Quantity::Efficiency, fixed, axis, p, &reports)
}

/// Strict interior local extrema, compared against both neighbours.
pub fn locate_extrema(curve: &Curve) -> Result<Vec<ExtremumReport>> {
    let n = curve.values.len();
    if n < 3 || curve.abscissa.len() != n {
        return Err(Error::InvalidParameter(format!(
            "extremum search needs a curve of at least 3 nodes, got {n}"
        )));
    }
    let step = curve.meta.axis.spacing();
    let critical = curve.meta.lambda_so;
    let near_critical =
        |x: f64| curve.meta.swept.is_field() && (x - critical).abs() <= step * (1.0 + 1e-9);
    let mut out = Vec::new();
    for i in 1..n - 1 {
        let (Some(l), Some(c), Some(r)) =
            (curve.values[i - 1], curve.values[i], curve.values[i + 1])
        else {
            continue;
        };
        let kind = if c > l && c > r {
            ExtremumKind::Max
        } else if c < l && c < r {
            ExtremumKind::Min
        } else {
            continue;
        };
        let x = curve.abscissa[i];
        out.push(ExtremumReport {
            location: x,
            value: c,
            kind,
            is_at_critical: near_critical(x),
        });
    }
    Ok(out)
}

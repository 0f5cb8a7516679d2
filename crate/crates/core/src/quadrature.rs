//! Adaptive quadrature for smooth integrands on `[0, ∞)` that decay
//! exponentially.
//!
//! The half-line is truncated at a cutoff `K` that starts at
//! `max(initial_cutoff, 60·decay_scale)`. `[0, K]` is split into geometric
//! octaves `[K/2^(j+1), K/2^j]` (plus a small head panel at the origin), so
//! structure at any scale near `k = 0` is seen by the first pass. Panels are
//! then bisected, worst error first, with Gauss–Kronrod pairs until the summed
//! error estimate meets the tolerance. Afterwards the last octave `[K/2, K]`
//! is inspected; if it still contributes more than the tolerance, `K` doubles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of geometric octaves laid over `[0, K]` before adaptation.
const INITIAL_OCTAVES: i32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Lower bound for the starting cutoff, meV.
    pub initial_cutoff: f64,
    pub max_doublings: u32,
    /// Kronrod nodes per panel: 15 or 21.
    pub panel_order: usize,
    /// Panel budget for the bisection phase.
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            initial_cutoff: 0.0,
            max_doublings: 20,
            panel_order: 15,
            max_panels: 4000,
        }
    }
}

impl QuadratureSettings {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_initial_cutoff(mut self, cutoff: f64) -> Self {
        self.initial_cutoff = cutoff;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !self.rel_tol.is_finite() || self.rel_tol <= 0.0 {
            return bad(format!("rel_tol must be > 0, got {}", self.rel_tol));
        }
        if !self.abs_tol.is_finite() || self.abs_tol < 0.0 {
            return bad(format!("abs_tol must be >= 0, got {}", self.abs_tol));
        }
        if !self.initial_cutoff.is_finite() || self.initial_cutoff < 0.0 {
            return bad(format!(
                "initial_cutoff must be >= 0, got {}",
                self.initial_cutoff
            ));
        }
        if self.max_doublings < 1 {
            return bad("max_doublings must be >= 1".into());
        }
        if rule_for(self.panel_order).is_none() {
            return bad(format!(
                "panel_order must be 15 or 21, got {}",
                self.panel_order
            ));
        }
        if self.max_panels < 2 * INITIAL_OCTAVES as usize {
            return bad(format!(
                "max_panels must be at least {}",
                2 * INITIAL_OCTAVES
            ));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cutoff_used: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turns a non-converged result into an error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

/// Integrates `f` over `[0, ∞)`.
///
/// `decay_scale` is the slowest decay length of the integrand (meV). The
/// result is flagged `converged = false` when either the panel budget or the
/// cutoff doublings run out; the error estimate then includes the last
/// octave's contribution.
pub fn integrate_decaying<F>(
    f: F,
    decay_scale: f64,
    settings: &QuadratureSettings,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    settings.validate()?;
    if !decay_scale.is_finite() || decay_scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "decay_scale must be finite and > 0, got {decay_scale}"
        )));
    }
    let rule = rule_for(settings.panel_order).expect("validated");
    let mut engine = Engine {
        f: &f,
        rule,
        evaluations: 0,
    };

    let mut cutoff = settings.initial_cutoff.max(60.0 * decay_scale);
    let mut panels = Vec::with_capacity(256);
    let head = cutoff * 2f64.powi(-INITIAL_OCTAVES);
    panels.push(engine.panel(0.0, head)?);
    for j in (0..INITIAL_OCTAVES).rev() {
        let a = cutoff * 2f64.powi(-(j + 1));
        let b = cutoff * 2f64.powi(-j);
        panels.push(engine.panel(a, b)?);
    }

    let mut converged = engine.refine(&mut panels, settings)?;
    let mut tail_ok = false;
    let mut octave = 0.0;
    for doubling in 0..=settings.max_doublings {
        let total = sum_values(&panels);
        octave = panels
            .iter()
            .filter(|p| p.a >= 0.5 * cutoff)
            .map(|p| p.value)
            .sum::<f64>();
        if octave.abs() < settings.tolerance(total) {
            tail_ok = true;
            break;
        }
        if doubling == settings.max_doublings {
            break;
        }
        panels.push(engine.panel(cutoff, 2.0 * cutoff)?);
        cutoff *= 2.0;
        converged = engine.refine(&mut panels, settings)?;
    }

    let value = sum_values(&panels);
    let mut error_estimate: f64 = panels.iter().map(|p| p.error).sum();
    if !tail_ok {
        error_estimate += octave.abs();
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        cutoff_used: cutoff,
        evaluations: engine.evaluations,
        converged: converged && tail_ok,
    })
}

fn sum_values(panels: &[Panel]) -> f64 {
    panels.iter().map(|p| p.value).sum()
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

struct Engine<'f, F> {
    f: &'f F,
    rule: &'static KronrodRule,
    evaluations: usize,
}

impl<F: Fn(f64) -> f64> Engine<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::InvalidParameter(format!(
                "integrand is not finite at k = {x}: {y}"
            )))
        }
    }

    fn panel(&mut self, a: f64, b: f64) -> Result<Panel> {
        let rule = self.rule;
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let n = rule.xgk.len() - 1;
        let gauss_pairs = n / 2;

        let fc = self.eval(center)?;
        let mut kronrod = rule.wgk[n] * fc;
        let mut gauss = if rule.wg.len() > gauss_pairs {
            rule.wg[gauss_pairs] * fc
        } else {
            0.0
        };
        let mut abs_sum = rule.wgk[n] * fc.abs();
        for j in 0..n {
            let dx = half * rule.xgk[j];
            let f1 = self.eval(center - dx)?;
            let f2 = self.eval(center + dx)?;
            kronrod += rule.wgk[j] * (f1 + f2);
            abs_sum += rule.wgk[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += rule.wg[j / 2] * (f1 + f2);
            }
        }
        let value = kronrod * half;
        let rounding = 50.0 * f64::EPSILON * abs_sum * half.abs();
        let error = ((kronrod - gauss) * half).abs().max(rounding);
        Ok(Panel { a, b, value, error })
    }

    /// Bisects the worst panel until the global estimate meets tolerance.
    /// Returns false if the panel budget was exhausted first.
    fn refine(&mut self, panels: &mut Vec<Panel>, settings: &QuadratureSettings) -> Result<bool> {
        loop {
            let total = sum_values(panels);
            let error: f64 = panels.iter().map(|p| p.error).sum();
            if error <= settings.tolerance(total) {
                return Ok(true);
            }
            if panels.len() >= settings.max_panels {
                return Ok(false);
            }
            let (worst, _) =
                panels
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                        if p.error > acc.1 {
                            (i, p.error)
                        } else {
                            acc
                        }
                    });
            let Panel { a, b, .. } = panels[worst];
            let mid = 0.5 * (a + b);
            if !(mid > a && mid < b) {
                // interval cannot be split further in floating point
                return Ok(false);
            }
            let left = self.panel(a, mid)?;
            let right = self.panel(mid, b)?;
            panels[worst] = left;
            panels.insert(worst + 1, right);
        }
    }
}

struct KronrodRule {
    /// Kronrod abscissae on [0, 1], descending, centre last.
    xgk: &'static [f64],
    wgk: &'static [f64],
    /// Gauss weights for the odd-indexed abscissae (and the centre when present).
    wg: &'static [f64],
}

fn rule_for(order: usize) -> Option<&'static KronrodRule> {
    match order {
        15 => Some(&GK15),
        21 => Some(&GK21),
        _ => None,
    }
}

#[allow(clippy::excessive_precision)]
static GK15: KronrodRule = KronrodRule {
    xgk: &[
        0.991_455_371_120_812_639_206_854_697_526_329,
        0.949_107_912_342_758_524_526_189_684_047_851,
        0.864_864_423_359_769_072_789_712_788_640_926,
        0.741_531_185_599_394_439_863_864_773_280_788,
        0.586_087_235_467_691_130_294_144_845_693_013,
        0.405_845_151_377_397_166_906_606_412_076_961,
        0.207_784_955_007_898_467_600_689_403_773_245,
        0.0,
    ],
    wgk: &[
        0.022_935_322_010_529_224_963_732_008_058_970,
        0.063_092_092_629_978_553_290_700_663_189_204,
        0.104_790_010_322_250_183_839_876_322_541_518,
        0.140_653_259_715_525_918_745_189_590_510_238,
        0.169_004_726_639_267_902_826_583_426_598_550,
        0.190_350_578_064_785_409_913_256_402_421_014,
        0.204_432_940_075_298_892_414_161_999_234_649,
        0.209_482_141_084_727_828_012_999_174_891_714,
    ],
    wg: &[
        0.129_484_966_168_869_693_270_611_432_679_082,
        0.279_705_391_489_276_667_901_467_771_423_780,
        0.381_830_050_505_118_944_950_369_775_488_975,
        0.417_959_183_673_469_387_755_102_040_816_327,
    ],
};

#[allow(clippy::excessive_precision)]
static GK21: KronrodRule = KronrodRule {
    xgk: &[
        0.995_657_163_025_808_080_735_527_280_689_003,
        0.973_906_528_517_171_720_077_964_012_084_452,
        0.930_157_491_355_708_226_001_207_180_059_508,
        0.865_063_366_688_984_510_732_096_688_423_493,
        0.780_817_726_586_416_897_063_717_578_345_042,
        0.679_409_568_299_024_406_234_327_365_114_874,
        0.562_757_134_668_604_683_339_000_099_272_694,
        0.433_395_394_129_247_190_799_265_943_165_784,
        0.294_392_862_701_460_198_131_126_603_103_866,
        0.148_874_338_981_631_210_884_826_001_129_720,
        0.0,
    ],
    wgk: &[
        0.011_694_638_867_371_874_278_064_396_062_192,
        0.032_558_162_307_964_727_478_818_972_459_390,
        0.054_755_896_574_351_996_031_381_300_244_580,
        0.075_039_674_810_919_952_767_043_140_916_190,
        0.093_125_454_583_697_605_535_065_465_083_366,
        0.109_387_158_802_297_641_899_210_590_325_805,
        0.123_491_976_262_065_851_077_958_109_831_074,
        0.134_709_217_311_473_325_928_054_001_771_707,
        0.142_775_938_577_060_080_797_094_273_138_717,
        0.147_739_104_901_338_491_374_841_515_972_068,
        0.149_445_554_002_916_905_664_936_468_389_821,
    ],
    wg: &[
        0.066_671_344_308_688_137_593_568_809_893_332,
        0.149_451_349_150_580_593_145_776_339_657_697,
        0.219_086_362_515_982_043_995_534_934_228_163,
        0.269_266_719_309_996_355_091_226_921_569_469,
        0.295_524_224_714_752_870_173_892_994_651_338,
    ],
};

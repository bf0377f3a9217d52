//! Transmit-side digital electronics.
//!
//! `predistort` inverts the modulator's cosine transfer so that the chain
//! reproduces the target quadratures: the ideal-path inverse is
//! `V = (V_pi / pi) * arccos(target / (A/2))` after dividing the target by
//! the insertion-loss field factor. With extinction compensation enabled the
//! inverse additionally solves the full 2x2 child-MZM map by a damped
//! fixed-point iteration.
//!
//! `dac_quantize` truncates a drive voltage to the converter grid:
//! `m * V_step` with `m = floor(V / V_step)` and `V_step = V_pp / (2^n - 1)`,
//! after clamping the input into `[0, V_pp]`.

use crate::error::{Error, Result};
use crate::modulator::{self, ModulatorConfig};
use crate::rng;
use crate::source::{self, SourceConfig};
use std::f64::consts::PI;

/// DAC resolution and output range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DacConfig {
    /// Resolution in bits, 1..=48.
    pub n_bits: u32,
    /// Peak-to-peak output voltage, > 0. The arccos pre-distortion output
    /// spans exactly [0, V_pi], so V_pp defaults to V_pi upstream.
    pub v_pp_volts: f64,
}

impl DacConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bits < 1 || self.n_bits > 48 {
            return Err(Error::invalid_config(
                "dac.n_bits",
                format!("must be in 1..=48, got {}", self.n_bits),
            ));
        }
        if !(self.v_pp_volts > 0.0) || !self.v_pp_volts.is_finite() {
            return Err(Error::invalid_config(
                "dac.v_pp_volts",
                format!("must be a positive finite number, got {}", self.v_pp_volts),
            ));
        }
        Ok(())
    }

    /// Voltage step `V_pp / (2^n - 1)`.
    pub fn v_step(&self) -> f64 {
        self.v_pp_volts / ((1u64 << self.n_bits) - 1) as f64
    }

    pub fn max_code(&self) -> u64 {
        (1u64 << self.n_bits) - 1
    }
}

/// Truncating (floor) quantization to the DAC grid.
///
/// Out-of-range inputs clamp to `[0, V_pp]`; the output is one of the
/// `2^n` representable levels `m * V_step`.
pub fn dac_quantize(v: f64, cfg: &DacConfig) -> f64 {
    let step = cfg.v_step();
    let clamped = v.clamp(0.0, cfg.v_pp_volts);
    // The relative nudge keeps already-quantized values on their own level
    // despite the divide/multiply round trip.
    let ratio = clamped / step * (1.0 + 4.0 * f64::EPSILON);
    let m = (ratio.floor() as u64).min(cfg.max_code());
    m as f64 * step
}

/// Options for the pre-distortion inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredistortConfig {
    /// Solve the full finite-extinction map instead of the ideal-path
    /// arccos inverse. Off by default: the uncompensated chain displays the
    /// extinction-induced constellation shift.
    pub compensate_extinction: bool,
    /// Relative headroom kept at the arccos domain edges. Targets beyond
    /// `(1 - edge_guard) * A/2` saturate to the guarded edge and are counted
    /// instead of producing NaN from the infinitely steep arccos edge.
    pub edge_guard: f64,
    /// Iteration cap for the extinction-compensating fixed point.
    pub max_iterations: usize,
    /// Damping factor of the fixed point, in (0, 1].
    pub damping: f64,
    /// Convergence tolerance, relative to the half carrier amplitude.
    pub tolerance: f64,
}

impl Default for PredistortConfig {
    fn default() -> Self {
        Self {
            compensate_extinction: false,
            edge_guard: 1e-6,
            max_iterations: 100,
            damping: 0.5,
            tolerance: 1e-12,
        }
    }
}

/// Drive voltages for one symbol, with saturation flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predistorted {
    pub v_x: f64,
    pub v_p: f64,
    pub clipped_x: bool,
    pub clipped_p: bool,
}

impl Predistorted {
    pub fn clipped_count(&self) -> usize {
        usize::from(self.clipped_x) + usize::from(self.clipped_p)
    }
}

fn clamp_cos(value: f64, guard: f64) -> (f64, bool) {
    let limit = 1.0 - guard;
    if value > limit {
        (limit, true)
    } else if value < -limit {
        (-limit, true)
    } else {
        (value, false)
    }
}

/// Inverts the modulator transfer for one target quadrature pair (SNU).
pub fn predistort(
    x_target: f64,
    p_target: f64,
    mod_cfg: &ModulatorConfig,
    pd: &PredistortConfig,
) -> Result<Predistorted> {
    let g = mod_cfg.loss_factor();
    let half_carrier = mod_cfg.carrier_amplitude / 2.0;
    let r = mod_cfg.arm_balance();

    // Ideal-path inverse: divide out the insertion loss, then arccos.
    let (cx0, clip_x) = clamp_cos(x_target / (g * half_carrier), pd.edge_guard);
    let (cp0, clip_p) = clamp_cos(p_target / (g * half_carrier), pd.edge_guard);

    if !pd.compensate_extinction || r >= 1.0 {
        return Ok(Predistorted {
            v_x: mod_cfg.v_pi_volts * cx0.acos() / PI,
            v_p: mod_cfg.v_pi_volts * cp0.acos() / PI,
            clipped_x: clip_x,
            clipped_p: clip_p,
        });
    }

    // Damped fixed point on the child cosines (c_x, c_p) of the full map
    //   x = (g A / 4) ((1+r) c_x - (1-r) s_p)
    //   p = (g A / 4) ((1-r) s_x + (1+r) c_p)
    // with s = sqrt(1 - c^2) >= 0 for drive phases in [0, pi].
    let a4 = g * mod_cfg.carrier_amplitude / 4.0;
    let xn = x_target / a4;
    let pn = p_target / a4;
    let tol = pd.tolerance * g * half_carrier;

    let mut cx = cx0;
    let mut cp = cp0;
    let mut last_clip_x = clip_x;
    let mut last_clip_p = clip_p;
    for _ in 0..pd.max_iterations {
        let sx = (1.0 - cx * cx).sqrt();
        let sp = (1.0 - cp * cp).sqrt();

        let x_now = a4 * ((1.0 + r) * cx - (1.0 - r) * sp);
        let p_now = a4 * ((1.0 - r) * sx + (1.0 + r) * cp);
        if (x_now - x_target).abs() <= tol && (p_now - p_target).abs() <= tol {
            return Ok(Predistorted {
                v_x: mod_cfg.v_pi_volts * cx.acos() / PI,
                v_p: mod_cfg.v_pi_volts * cp.acos() / PI,
                clipped_x: last_clip_x,
                clipped_p: last_clip_p,
            });
        }

        let (cx_next, cx_hit) = clamp_cos((xn + (1.0 - r) * sp) / (1.0 + r), pd.edge_guard);
        let (cp_next, cp_hit) = clamp_cos((pn - (1.0 - r) * sx) / (1.0 + r), pd.edge_guard);
        last_clip_x = cx_hit;
        last_clip_p = cp_hit;
        cx += pd.damping * (cx_next - cx);
        cp += pd.damping * (cp_next - cp);
    }

    if last_clip_x || last_clip_p {
        // The target is outside the reachable set of the finite-extinction
        // map; report the edge solution as a saturation, not a failure.
        return Ok(Predistorted {
            v_x: mod_cfg.v_pi_volts * cx.acos() / PI,
            v_p: mod_cfg.v_pi_volts * cp.acos() / PI,
            clipped_x: true,
            clipped_p: true,
        });
    }
    Err(Error::NonConvergence {
        context: format!("extinction-compensating pre-distortion for target ({x_target}, {p_target})"),
        iterations: pd.max_iterations,
    })
}

/// Pre-distorts a block of symbols.
///
/// Returns the drive voltage series and the number of clipped quadrature
/// samples. With `strict` set, the first saturated symbol aborts with its
/// index instead of clamping.
pub fn predistort_block(
    xs: &[f64],
    ps: &[f64],
    mod_cfg: &ModulatorConfig,
    pd: &PredistortConfig,
    strict: bool,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let mut v_x = Vec::with_capacity(xs.len());
    let mut v_p = Vec::with_capacity(ps.len());
    let mut clipped = 0usize;
    for (i, (&x, &p)) in xs.iter().zip(ps).enumerate() {
        let out = predistort(x, p, mod_cfg, pd)?;
        if strict && (out.clipped_x || out.clipped_p) {
            return Err(Error::Saturation { symbol_index: i });
        }
        clipped += out.clipped_count();
        v_x.push(out.v_x);
        v_p.push(out.v_p);
    }
    Ok((v_x, v_p, clipped))
}

/// Context shared by the points of a DAC-resolution sweep.
#[derive(Debug, Clone)]
pub struct DacSweepContext {
    pub modulation_variance_snu: f64,
    pub n_symbols: usize,
    pub seed: u64,
    pub v_pi_volts: f64,
    /// Half carrier covers this many source standard deviations.
    pub headroom_sigma: f64,
    pub scope: String,
}

impl Default for DacSweepContext {
    fn default() -> Self {
        Self {
            modulation_variance_snu: 2.0,
            n_symbols: 1_000_000,
            seed: 42,
            v_pi_volts: 4.0,
            headroom_sigma: 4.0,
            scope: "eta-vs-dac-bits".to_string(),
        }
    }
}

/// Measured-to-actual variance ratio as a function of DAC resolution.
///
/// Each point runs source -> pre-distortion -> DAC -> ideal modulator and
/// reads the field quadratures directly (ideal measurement). "Actual"
/// variance is the realized sample variance of the drawn targets, so the
/// ratio isolates the quantization effect from source sampling noise. Points
/// use independent sub-streams derived from `(seed, scope, n_bits)`.
pub fn eta_vs_dac_bits(bits: &[u32], ctx: &DacSweepContext) -> Result<Vec<(u32, f64)>> {
    let carrier = 2.0 * ctx.headroom_sigma * ctx.modulation_variance_snu.sqrt();
    let mod_cfg = ModulatorConfig::ideal(ctx.v_pi_volts, carrier);
    let pd = PredistortConfig::default();
    let src = SourceConfig {
        modulation_variance_snu: ctx.modulation_variance_snu,
        n_symbols: ctx.n_symbols,
        seed: ctx.seed,
        ..Default::default()
    };

    let mut out = Vec::with_capacity(bits.len());
    for &n in bits {
        let dac = DacConfig {
            n_bits: n,
            v_pp_volts: ctx.v_pi_volts,
        };
        dac.validate()?;
        let scope = rng::scoped_label(&ctx.scope, &format!("dac.n_bits={n}"));
        let targets = source::draw_quadratures(&src, &scope)?;
        let (v_x, v_p, _clipped) =
            predistort_block(&targets.x, &targets.p, &mod_cfg, &pd, false)?;
        let mut measured_x = Vec::with_capacity(targets.len());
        let mut measured_p = Vec::with_capacity(targets.len());
        for i in 0..targets.len() {
            let field = modulator::modulate(
                dac_quantize(v_x[i], &dac),
                dac_quantize(v_p[i], &dac),
                &mod_cfg,
            );
            measured_x.push(field.amplitude.re);
            measured_p.push(field.amplitude.im);
        }
        let eta = crate::metrics::stats::pooled_variance(&[&measured_x, &measured_p])?
            / crate::metrics::stats::pooled_variance(&[&targets.x, &targets.p])?;
        out.push((n, eta));
    }
    Ok(out)
}

//! Quantitative checks along computed trajectories: the explicit decay
//! bound with its constant, Hölder seminorms on grid functions, the
//! oscillation ladder over shrinking parabolic cylinders, the barrier ODE
//! `m(t)`, and steepening monitors.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fraclap::{normalization_constant, tilde_constant};
use crate::solver::{RunStatus, Trajectory};
use serde::{Deserialize, Serialize};

/// `C(s) = 2s / C_s^{1/(4s)} * sqrt(2/(1+4s))`: the constant of the
/// `sup|theta(t)| <= C(s) t^{-1/(4s)} ||theta_0||_{L^2}` bound.
pub fn decay_constant(s: f64) -> Result<f64> {
    let c_s = normalization_constant(s)?;
    Ok(2.0 * s / c_s.powf(1.0 / (4.0 * s)) * tilde_constant(s))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub sup_abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Rows of `sup|theta(t)|` against the theoretical envelope
/// `C(s) t^{-1/(4s)} ||theta_0||_{L^2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport {
    pub s: f64,
    pub l2_initial: f64,
    pub c_of_s: f64,
    pub t_min: f64,
    pub rows: Vec<DecayRow>,
    /// false when the run blew up before `t_min` (bound not applicable).
    pub applicable: bool,
    /// all ratios at or below one (the bound is an inequality with margin).
    pub pass: bool,
}

pub fn linf_decay_check(traj: &Trajectory, t_min: f64) -> Result<DecayReport> {
    if !(t_min > 0.0) {
        return Err(Error::param("t_min", t_min, "must be positive"));
    }
    let s = traj.config.s;
    let c_of_s = decay_constant(s)?;
    let l2_initial = traj.initial_l2();

    let applicable = match traj.status {
        RunStatus::Completed => true,
        RunStatus::Blowup { t, .. } => t >= t_min,
    };

    let mut rows = Vec::new();
    if applicable {
        for r in traj.series.iter().filter(|r| r.t >= t_min) {
            let bound = c_of_s * r.t.powf(-1.0 / (4.0 * s)) * l2_initial;
            let sup_abs = Trajectory::sup_abs(r);
            rows.push(DecayRow {
                t: r.t,
                sup_abs,
                bound,
                ratio: if bound > 0.0 { sup_abs / bound } else { 0.0 },
            });
        }
    }
    let pass = applicable && rows.iter().all(|r| r.ratio <= 1.0);
    Ok(DecayReport {
        s,
        l2_initial,
        c_of_s,
        t_min,
        rows,
        applicable,
        pass,
    })
}

/// Least-squares slope of `ln y` against `ln t` over rows with t in
/// `[t_lo, t_hi]` and positive y.
pub fn loglog_slope(rows: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(t, y)| *t >= t_lo && *t <= t_hi && *y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// First recorded time at which `sup|theta| <= 1`: the operational T*.
pub fn empirical_t_star(traj: &Trajectory) -> Option<f64> {
    traj.series
        .iter()
        .find(|r| Trajectory::sup_abs(r) <= 1.0)
        .map(|r| r.t)
}

/// Hölder seminorm over dyadic separations: for every grid point, pairs at
/// separations `min_sep * 2^j` up to L/4. `min_sep` must be at least one
/// cell.
pub fn holder_seminorm(field: &SpectralField, alpha: f64, min_sep: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
    }
    let dx = field.dx();
    if min_sep < dx {
        return Err(Error::param(
            "min_sep",
            min_sep,
            "must be at least one grid cell",
        ));
    }
    let n = field.n();
    let l = field.domain_length();
    let values = field.values();

    let mut steps = Vec::new();
    let mut sep = min_sep;
    while sep <= l / 4.0 {
        let step = (sep / dx).round().max(1.0) as usize;
        if step <= n / 4 && steps.last() != Some(&step) {
            steps.push(step);
        }
        sep *= 2.0;
    }

    let mut best = 0.0f64;
    for &step in &steps {
        let d = step as f64 * dx;
        let scale = d.powf(-alpha);
        for i in 0..n {
            let j = (i + step) % n;
            let q = (values[i] - values[j]).abs() * scale;
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

/// Exact all-pairs scan (torus metric), the oracle for the dyadic mode.
/// Quadratic cost; refuses n above 4096.
pub fn holder_seminorm_all_pairs(field: &SpectralField, alpha: f64, min_sep: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::param("alpha", alpha, "must lie in (0, 1)"));
    }
    let n = field.n();
    if n > 4096 {
        return Err(Error::param(
            "n",
            n as f64,
            "all-pairs oracle is limited to n <= 4096",
        ));
    }
    let dx = field.dx();
    let l = field.domain_length();
    let values = field.values();
    let mut best = 0.0f64;
    for i in 0..n {
        for step in 1..=n / 2 {
            let d = (step as f64 * dx).min(l - step as f64 * dx);
            if d < min_sep {
                continue;
            }
            let j = (i + step) % n;
            let q = (values[i] - values[j]).abs() * d.powf(-alpha);
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderLevel {
    pub k: usize,
    pub radius: f64,
    pub time_depth: f64,
    pub osc: Option<f64>,
    pub normalized_osc: Option<f64>,
    pub omitted_reason: Option<String>,
    pub space_samples: usize,
    pub time_samples: usize,
}

/// Oscillation over the nested parabolic cylinders
/// `Q_k = [x0 - r_k, x0 + r_k] x [t0 - r_k^{2s}, t0]`, `r_k = rho^k r0`.
///
/// Oscillation uses raw grid samples in space and linear interpolation in
/// time, both of which can only shrink it; a conservative (smaller) osc is
/// the right side to err on for upper-bound checks. All levels draw from
/// one master time set, so sample sets nest and `osc` is nonincreasing
/// in k.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillationLadder {
    pub rho: f64,
    pub alpha: f64,
    /// center after snapping x0 to the nearest grid node
    pub center: (f64, f64),
    pub r0: f64,
    pub levels: Vec<LadderLevel>,
}

pub fn oscillation_ladder(
    traj: &Trajectory,
    center: (f64, f64),
    rho: f64,
    alpha: f64,
    r0: f64,
    k_max: usize,
) -> Result<OscillationLadder> {
    if !(rho > 0.0 && rho < 1.0 / 400.0) {
        return Err(Error::param("rho", rho, "must lie in (0, 1/400)"));
    }
    if !(r0 > 0.0) {
        return Err(Error::param("r0", r0, "must be positive"));
    }
    if traj.snapshots.is_empty() {
        return Err(Error::Contract("trajectory has no snapshots".into()));
    }
    let s = traj.config.s;
    let grid = &traj.snapshots[0];
    let n = grid.n();
    let dx = grid.dx();
    let half_l = grid.domain_length() / 2.0;

    // snap the spatial center to the grid so every cylinder keeps at least
    // its center column
    let j0 = (((center.0 + half_l) / dx).round() as i64).rem_euclid(n as i64) as usize;
    let x0 = grid.x(j0);
    let t0 = center.1;

    let radii: Vec<f64> = (0..=k_max).map(|k| r0 * rho.powi(k as i32)).collect();
    let depths: Vec<f64> = radii.iter().map(|r| r.powf(2.0 * s)).collect();

    let t_first = traj.times[0];
    let t_last = *traj.times.last().unwrap();

    // master time set: per level its endpoints plus 4 evenly spaced
    // fillers, plus all snapshot times in the widest window; shared across
    // levels so deeper sample sets nest inside shallower ones
    let mut master: Vec<f64> = Vec::new();
    for &tau in &depths {
        for i in 0..4 {
            master.push(t0 - tau + tau * i as f64 / 3.0);
        }
    }
    for &t in &traj.times {
        if t >= t0 - depths[0] && t <= t0 {
            master.push(t);
        }
    }
    master.retain(|&t| t >= t_first - 1e-12 && t <= t_last + 1e-12);
    master.sort_by(|a, b| a.partial_cmp(b).unwrap());
    master.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut levels = Vec::new();
    for k in 0..=k_max {
        let radius = radii[k];
        let tau = depths[k];
        let mut level = LadderLevel {
            k,
            radius,
            time_depth: tau,
            osc: None,
            normalized_osc: None,
            omitted_reason: None,
            space_samples: 0,
            time_samples: 0,
        };
        if t0 - tau < t_first - 1e-12 || t0 > t_last + 1e-12 {
            level.omitted_reason = Some(format!(
                "time window [{:.6}, {:.6}] outside recorded [{:.6}, {:.6}]",
                t0 - tau,
                t0,
                t_first,
                t_last
            ));
            levels.push(level);
            continue;
        }
        if x0 - radius < -half_l || x0 + radius > half_l {
            level.omitted_reason = Some("cylinder exceeds the spatial domain".into());
            levels.push(level);
            continue;
        }

        let reach = (radius / dx).floor() as i64;
        let cols: Vec<usize> = (-reach..=reach)
            .map(|d| ((j0 as i64 + d).rem_euclid(n as i64)) as usize)
            .filter(|&j| (grid.x(j) - x0).abs() <= radius + 1e-12)
            .collect();
        let times: Vec<f64> = master
            .iter()
            .cloned()
            .filter(|&t| t >= t0 - tau - 1e-12 && t <= t0 + 1e-12)
            .collect();

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in &times {
            for &j in &cols {
                if let Some(v) = traj.sample_interpolated(j, t) {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        if !lo.is_finite() || !hi.is_finite() {
            level.omitted_reason = Some("no samples inside the cylinder".into());
        } else {
            let osc = hi - lo;
            level.osc = Some(osc);
            level.normalized_osc = Some(osc / rho.powf(alpha * k as f64));
            level.space_samples = cols.len();
            level.time_samples = times.len();
        }
        levels.push(level);
    }

    Ok(OscillationLadder {
        rho,
        alpha,
        center: (x0, t0),
        r0,
        levels,
    })
}

/// The barrier ODE `m' = c0 |{theta <= 0} cap [-1,1]| - C1 m`,
/// `m(-2/M0) = 0`, computed two ways on the same time grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierTrace {
    pub c0: f64,
    pub c1_const: f64,
    pub m0_const: f64,
    /// space-time measure of `{theta <= 0}` over the early half-window
    /// `[-2/M0, -1/M0]`: the hypothesis constant of the point estimate.
    pub mu: f64,
    pub times: Vec<f64>,
    pub zero_set_measure: Vec<f64>,
    /// Heun steps of the ODE on the trace's time grid.
    pub m_stepped: Vec<f64>,
    /// closed-form convolution `int c0 mu(s) e^{-C1 (t-s)} ds` (trapezoid).
    pub m_closed_form: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Track the ODE along a measure series on `[-2/M0, 0]`. `times` must be
/// strictly increasing and start at `-2/M0` (within 1e-9).
pub fn barrier_ode_track(
    times: &[f64],
    zero_set_measure: &[f64],
    c0: f64,
    c1_const: f64,
    m0_const: f64,
) -> Result<BarrierTrace> {
    if times.len() != zero_set_measure.len() || times.len() < 2 {
        return Err(Error::Contract(
            "times and measure series must match and hold at least two samples".into(),
        ));
    }
    if !(m0_const >= 2.0) {
        return Err(Error::param("m0_const", m0_const, "must be at least 2"));
    }
    if !(c0 > 0.0) || c1_const < 0.0 {
        return Err(Error::param("c0", c0, "c0 positive, C1 nonnegative"));
    }
    let t_start = -2.0 / m0_const;
    if (times[0] - t_start).abs() > 1e-9 {
        return Err(Error::Contract(format!(
            "window must start at -2/M0 = {t_start}, got {}",
            times[0]
        )));
    }

    let npts = times.len();
    let mut m_stepped = vec![0.0; npts];
    let mut m_closed = vec![0.0; npts];
    for i in 1..npts {
        let h = times[i] - times[i - 1];
        if !(h > 0.0) {
            return Err(Error::Contract("times must be strictly increasing".into()));
        }
        // Heun on m' = c0 mu(t) - C1 m
        let f0 = c0 * zero_set_measure[i - 1] - c1_const * m_stepped[i - 1];
        let pred = m_stepped[i - 1] + h * f0;
        let f1 = c0 * zero_set_measure[i] - c1_const * pred;
        m_stepped[i] = m_stepped[i - 1] + 0.5 * h * (f0 + f1);
        // trapezoid convolution advanced by the exact decay factor
        let decay = (-c1_const * h).exp();
        m_closed[i] = m_closed[i - 1] * decay
            + 0.5 * h * (c0 * zero_set_measure[i - 1] * decay + c0 * zero_set_measure[i]);
    }
    let max_discrepancy = m_stepped
        .iter()
        .zip(&m_closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    // hypothesis measure: integral of the series over the early half-window
    let t_half = -1.0 / m0_const;
    let mut mu = 0.0;
    for i in 1..npts {
        let (ta, tb) = (times[i - 1], times[i]);
        if tb <= t_half {
            mu += 0.5 * (tb - ta) * (zero_set_measure[i - 1] + zero_set_measure[i]);
        } else if ta < t_half {
            let w = (t_half - ta) / (tb - ta);
            let mid = zero_set_measure[i - 1] * (1.0 - w) + zero_set_measure[i] * w;
            mu += 0.5 * (t_half - ta) * (zero_set_measure[i - 1] + mid);
        }
    }

    Ok(BarrierTrace {
        c0,
        c1_const,
        m0_const,
        mu,
        times: times.to_vec(),
        zero_set_measure: zero_set_measure.to_vec(),
        m_stepped,
        m_closed_form: m_closed,
        max_discrepancy,
    })
}

/// `|{x in [-1,1] : theta(x, t) <= 0}|` from grid samples at time `t`
/// (linear interpolation between snapshots).
pub fn zero_set_measure(traj: &Trajectory, t: f64) -> Option<f64> {
    let grid = traj.snapshots.first()?;
    let dx = grid.dx();
    let n = grid.n();
    let mut measure = 0.0;
    for j in 0..n {
        let x = grid.x(j);
        if (-1.0..=1.0).contains(&x) {
            let v = traj.sample_interpolated(j, t)?;
            if v <= 0.0 {
                measure += dx;
            }
        }
    }
    Some(measure.min(2.0))
}

/// Steepening monitor: the `(t, max|theta_x|)` series as recorded
/// (spectral differentiation per accepted step; blowup trajectories simply
/// stop early, so every row is finite).
pub fn gradient_growth(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.series.iter().map(|r| (r.t, r.max_grad)).collect()
}

//! Closed-form estimators for conduction, programming energy, RC
//! self-loading time and switching kinetics.
//!
//! Conduction is piecewise in polarity: bulk-limited quadratic transport
//! above the onset threshold, thermionic emission over a field-lowered
//! barrier below the negative threshold, and a quasi-linear ohmic regime
//! in between. The three regimes are fitted independently, so no
//! continuity is forced at the stitching points; [`regime_mismatch`]
//! reports the jumps instead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{BOLTZMANN, ELEMENTARY_CHARGE, VACUUM_PERMITTIVITY};
use crate::scalar::Real;

/// Errors produced by the physics estimators.
#[derive(Debug, Error)]
pub enum PhysicsError {
    /// Parameter record violates a structural invariant.
    #[error("invalid physics parameters: {0}")]
    InvalidParams(String),
    /// Input drives a formula outside its meaningful domain.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Quadratic bulk-limited conduction above the onset threshold.
///
/// Mobility, permittivity, trap occupancy and thickness are not separately
/// identifiable from current-voltage data, so they are lumped into the
/// single coefficient `k_tfl`: `j = k_tfl * v^2` for `v >= v_tr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TflParams<S = f64> {
    /// Lumped coefficient, A m^-2 V^-2.
    pub k_tfl: S,
    /// Onset threshold, V.
    pub v_tr: S,
}

impl<S: Real> TflParams<S> {
    /// Checks `k_tfl > 0` and `v_tr > 0`.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        if !(self.k_tfl > S::zero()) || !(self.v_tr > S::zero()) {
            return Err(PhysicsError::InvalidParams(format!(
                "need k_tfl > 0 and v_tr > 0, got {} and {}",
                self.k_tfl, self.v_tr
            )));
        }
        Ok(())
    }
}

/// Thermionic emission over a field-lowered interface barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchottkyParams<S = f64> {
    /// Effective Richardson prefactor `120 A cm^-2 K^-2 * m*/m0`,
    /// A m^-2 K^-2.
    pub a_eff: S,
    /// Kelvin.
    pub temperature: S,
    /// Barrier height, eV.
    pub phi_b: S,
    /// Relative permittivity entering the barrier-lowering term.
    pub eps_r: S,
}

impl<S: Real> SchottkyParams<S> {
    /// Checks that every field is strictly positive.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        let ok = self.a_eff > S::zero()
            && self.temperature > S::zero()
            && self.phi_b > S::zero()
            && self.eps_r > S::zero();
        if !ok {
            return Err(PhysicsError::InvalidParams(
                "thermionic-emission parameters must all be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Electrode/film stack parameters for the RC self-loading estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcParams<S = f64> {
    /// Series electrode resistance, ohm.
    pub r_el: S,
    /// Absolute film permittivity, F/m.
    pub eps_dev: S,
    /// Film thickness, m.
    pub d: S,
    /// Optional measured capacitance density, F/m^2; when present it must
    /// agree with `eps_dev / d` within 5%.
    pub cap_per_area: Option<S>,
}

impl<S: Real> RcParams<S> {
    /// Checks positivity and the measured-vs-derived capacitance-density
    /// consistency.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        if !(self.r_el > S::zero()) || !(self.d > S::zero()) || !(self.eps_dev > S::zero()) {
            return Err(PhysicsError::InvalidParams(
                "need r_el > 0, eps_dev > 0 and d > 0".into(),
            ));
        }
        if let Some(c) = self.cap_per_area {
            let derived = self.eps_dev / self.d;
            if ((c - derived) / derived).abs() > S::of(0.05) {
                return Err(PhysicsError::InvalidParams(format!(
                    "measured capacitance density {} F/m^2 disagrees with eps_dev/d = {} by more than 5%",
                    c, derived
                )));
            }
        }
        Ok(())
    }

    /// Capacitance density used by the timing formulas, F/m^2.
    pub fn cap_density(&self) -> S {
        self.eps_dev / self.d
    }
}

/// Activation-field switching kinetics: `t = t_inf * exp(e_act / e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MerzParams<S = f64> {
    /// Asymptotic switching time at infinite field, s.
    pub t_inf: S,
    /// Activation field, V/m.
    pub e_act: S,
}

impl<S: Real> MerzParams<S> {
    /// Checks `t_inf > 0` and `e_act > 0`.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        if !(self.t_inf > S::zero()) || !(self.e_act > S::zero()) {
            return Err(PhysicsError::InvalidParams(format!(
                "need t_inf > 0 and e_act > 0, got {} and {}",
                self.t_inf, self.e_act
            )));
        }
        Ok(())
    }
}

/// Complete piecewise conduction description of one resistive state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductionModel<S = f64> {
    pub tfl: TflParams<S>,
    pub schottky: SchottkyParams<S>,
    /// Quasi-linear conductance density between the thresholds, S/m^2.
    pub ohmic_g: S,
    /// Film thickness converting voltage to field, m.
    pub d: S,
}

impl<S: Real> ConductionModel<S> {
    /// Validates every regime record plus `ohmic_g >= 0` and `d > 0`.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        self.tfl.validate()?;
        self.schottky.validate()?;
        if self.ohmic_g < S::zero() {
            return Err(PhysicsError::InvalidParams("need ohmic_g >= 0".into()));
        }
        if !(self.d > S::zero()) {
            return Err(PhysicsError::InvalidParams("need d > 0".into()));
        }
        Ok(())
    }
}

/// Thermionic-emission current density magnitude at field `e_field` (V/m).
///
/// `j = a_eff T^2 exp(-q (phi_b - sqrt(q e / (4 pi eps_r eps0))) / (k T))`.
pub fn schottky_current_density<S: Real>(e_field: S, p: &SchottkyParams<S>) -> S {
    let q = S::of(ELEMENTARY_CHARGE);
    let four_pi_eps = S::of(4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY) * p.eps_r;
    let lowering = (q * e_field / four_pi_eps).sqrt();
    let kt = S::of(BOLTZMANN) * p.temperature;
    let barrier = q * (p.phi_b - lowering);
    p.a_eff * p.temperature * p.temperature * (-barrier / kt).exp()
}

/// Signed current density at applied voltage `v`.
///
/// Quadratic bulk transport for `v >= v_tr`, negative thermionic emission
/// for `v <= -v_tr` (field `|v| / d`), ohmic `ohmic_g * v` in between.
pub fn current_density<S: Real>(v: S, m: &ConductionModel<S>) -> S {
    if v >= m.tfl.v_tr {
        m.tfl.k_tfl * v * v
    } else if v <= -m.tfl.v_tr {
        -schottky_current_density(v.abs() / m.d, &m.schottky)
    } else {
        m.ohmic_g * v
    }
}

/// Relative current-density jumps where the conduction regimes meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMismatch<S = f64> {
    /// `|j_tfl - j_ohmic| / max(...)` at `+v_tr`.
    pub positive: S,
    /// `|j_schottky - j_ohmic| / max(...)` at `-v_tr`.
    pub negative: S,
}

/// Diagnostic for the piecewise stitching: relative jump magnitude at each
/// threshold. Zero means the regimes meet continuously.
pub fn regime_mismatch<S: Real>(m: &ConductionModel<S>) -> RegimeMismatch<S> {
    let rel = |a: S, b: S| {
        let m = a.abs().max(b.abs());
        if m > S::zero() {
            (a - b).abs() / m
        } else {
            S::zero()
        }
    };
    let vt = m.tfl.v_tr;
    let pos = rel(m.tfl.k_tfl * vt * vt, m.ohmic_g * vt);
    let neg = rel(
        schottky_current_density(vt / m.d, &m.schottky),
        m.ohmic_g * vt,
    );
    RegimeMismatch { positive: pos, negative: neg }
}

/// Upper bound for the energy of one programming pulse:
/// `q = |j(v) * area * v| * width`.
pub fn programming_energy<S: Real>(v: S, width: S, area: S, m: &ConductionModel<S>) -> S {
    (current_density(v, m) * area * v).abs() * width
}

/// Charging time constant of the device/electrode divider:
/// `tau = (r_dev r_el / (r_dev + r_el)) * c_dev`.
pub fn tau_rc<S: Real>(r_dev: S, r_el: S, c_dev: S) -> S {
    r_dev * r_el / (r_dev + r_el) * c_dev
}

/// Self-loading time as a function of device area:
/// `tau = v r_el / (v / area + r_el * j(v)) * eps_dev / d`.
///
/// Algebraically identical to [`tau_rc`] with `r_dev = v / (j * area)` and
/// `c_dev = (eps_dev / d) * area`; expressing it through the area makes
/// the scaling trend explicit.
pub fn tau_area<S: Real>(
    v: S,
    area: S,
    rc: &RcParams<S>,
    m: &ConductionModel<S>,
) -> Result<S, PhysicsError> {
    if !(area > S::zero()) {
        return Err(PhysicsError::DegenerateInput("area must be positive".into()));
    }
    if v == S::zero() {
        return Err(PhysicsError::DegenerateInput("v must be nonzero".into()));
    }
    let j = current_density(v, m);
    // Dissipative conduction means j and v share a sign, so the divider
    // below is positive for either pulse polarity.
    if j * v <= S::zero() {
        return Err(PhysicsError::DegenerateInput(format!(
            "conduction is not dissipative at {} V (j = {})",
            v, j
        )));
    }
    Ok(v * rc.r_el / (v / area + rc.r_el * j) * rc.cap_density())
}

/// Switching time at field `e_field` (V/m): `t_inf * exp(e_act / e_field)`,
/// strictly decreasing in the field.
pub fn merz_switching_time<S: Real>(e_field: S, m: &MerzParams<S>) -> S {
    m.t_inf * (m.e_act / e_field).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards;
    use approx::assert_relative_eq;

    fn model() -> ConductionModel {
        cards::reference_conduction()
    }

    fn rc() -> RcParams {
        cards::reference_rc()
    }

    // Calibration targets computed independently at 30-digit precision.
    const J_AT_M3: f64 = 2_199_455.496_310_030_3;
    const Q_AT_M3: f64 = 3.167_215_914_686_443_6e-12;
    const TAU_100UM2_1V: f64 = 2.108_139_955_428_571_4e-8;

    #[test]
    fn current_density_is_zero_at_zero_bias() {
        assert_eq!(current_density(0.0, &model()), 0.0);
    }

    #[test]
    fn negative_high_bias_matches_calibration() {
        let j = current_density(-3.0, &model());
        assert_relative_eq!(j, -J_AT_M3, max_relative = 1e-9);
        assert_relative_eq!(j, -2.2e6, max_relative = 0.01);
    }

    #[test]
    fn quadratic_regime_scales_as_v_squared() {
        let m = model();
        let j1 = current_density(m.tfl.v_tr, &m);
        let j2 = current_density(2.0 * m.tfl.v_tr, &m);
        assert_relative_eq!(j2 / j1, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn ohmic_regime_is_linear_and_signed() {
        let m = model();
        let j = current_density(0.05, &m);
        assert_relative_eq!(j, m.ohmic_g * 0.05, max_relative = 1e-12);
        assert_eq!(current_density(-0.05, &m), -j);
    }

    #[test]
    fn stitching_is_continuous_on_the_positive_side_only() {
        let mm = regime_mismatch(&model());
        assert!(mm.positive < 1e-12, "ohmic_g is chosen to meet the quadratic branch");
        assert!(mm.negative > 0.1, "independently fitted regimes do not meet at -v_tr");
    }

    #[test]
    fn programming_energy_matches_calibration() {
        let q = programming_energy(-3.0, 20e-9, 24e-12, &model());
        assert_relative_eq!(q, Q_AT_M3, max_relative = 1e-9);
        assert!((q - 3.1e-12).abs() <= 0.15 * 3.1e-12);
    }

    #[test]
    fn programming_energy_is_linear_in_width_and_area() {
        let m = model();
        let q = programming_energy(-3.0, 20e-9, 24e-12, &m);
        assert_relative_eq!(programming_energy(-3.0, 40e-9, 24e-12, &m), 2.0 * q, max_relative = 1e-12);
        assert_relative_eq!(programming_energy(-3.0, 20e-9, 48e-12, &m), 2.0 * q, max_relative = 1e-12);
        assert_eq!(programming_energy(-3.0, 0.0, 24e-12, &m), 0.0);
    }

    #[test]
    fn tau_rc_parallel_arithmetic() {
        assert_relative_eq!(tau_rc(5e3, 5e3, 1e-12), 2.5e-9, max_relative = 1e-12);
        // r_dev >> r_el degenerates to r_el * c.
        assert_relative_eq!(tau_rc(1e12, 5e3, 1e-12), 5e3 * 1e-12, max_relative = 1e-6);
        assert!(tau_rc(1e-6, 5e3, 1e-12) < 1e-17);
    }

    #[test]
    fn tau_rc_bounded_by_smaller_resistance() {
        for (rd, rel) in [(1e3_f64, 5e3), (5e3, 5e3), (1e7, 5e3)] {
            let c = 2e-12;
            assert!(tau_rc(rd, rel, c) <= rd.min(rel) * c);
        }
    }

    #[test]
    fn tau_area_matches_calibration_point() {
        let tau = tau_area(1.0, 1e-10, &rc(), &model()).unwrap();
        assert_relative_eq!(tau, TAU_100UM2_1V, max_relative = 1e-9);
        // Within a factor of three of the 20 ns design target.
        assert!(tau < 3.0 * 20e-9 && tau > 20e-9 / 3.0);
    }

    #[test]
    fn tau_area_equals_tau_rc_by_substitution() {
        let (rc, m) = (rc(), model());
        for k in 0..100 {
            let v = 0.2 + 2.8 * (k as f64) / 99.0;
            let area = 1e-12 * (100f64).powf((k as f64 * 7.0 % 100.0) / 99.0);
            let j = current_density(v, &m);
            let r_dev = v / (j * area);
            let c_dev = rc.cap_density() * area;
            let direct = tau_area(v, area, &rc, &m).unwrap();
            let reference = tau_rc(r_dev, rc.r_el, c_dev);
            assert_relative_eq!(direct, reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn tau_area_grows_with_area_and_vanishes_at_zero() {
        let (rc, m) = (rc(), model());
        let mut prev = 0.0;
        for k in 1..=50 {
            let area = 1e-12 * k as f64 * 2.0;
            let tau = tau_area(1.0, area, &rc, &m).unwrap();
            assert!(tau > prev);
            prev = tau;
        }
        assert!(tau_area(1.0, 1e-18, &rc, &m).unwrap() < 1e-15);
    }

    #[test]
    fn tau_area_rejects_degenerate_inputs() {
        let (rc, m) = (rc(), model());
        assert!(tau_area(1.0, 0.0, &rc, &m).is_err());
        assert!(tau_area(0.0, 1e-10, &rc, &m).is_err());
    }

    #[test]
    fn tau_area_is_positive_at_negative_bias() {
        let (rc, m) = (rc(), model());
        let tau = tau_area(-3.0, 1e-10, &rc, &m).unwrap();
        assert!(tau > 0.0);
        let j = current_density(-3.0, &m);
        let reference = tau_rc(-3.0 / (j * 1e-10), rc.r_el, rc.cap_density() * 1e-10);
        assert_relative_eq!(tau, reference, max_relative = 1e-12);
    }

    #[test]
    fn merz_time_limits_and_log_linearity() {
        let m = cards::reference_merz();
        assert_relative_eq!(
            merz_switching_time(1e30, &m),
            m.t_inf,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            merz_switching_time(m.e_act, &m),
            std::f64::consts::E * m.t_inf,
            max_relative = 1e-12
        );
        // ln t is affine in 1/e with slope e_act: exact by construction.
        let (e1, e2) = (4e8, 9e8);
        let slope = (merz_switching_time(e1, &m).ln() - merz_switching_time(e2, &m).ln())
            / (1.0 / e1 - 1.0 / e2);
        assert_relative_eq!(slope, m.e_act, max_relative = 1e-12);
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let t = merz_switching_time(1e8 * k as f64, &m);
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn validation_catches_bad_records() {
        assert!(TflParams { k_tfl: 0.0, v_tr: 0.1 }.validate().is_err());
        assert!(TflParams { k_tfl: 1.0, v_tr: -0.1 }.validate().is_err());
        assert!(SchottkyParams { a_eff: 1e5, temperature: 0.0, phi_b: 0.5, eps_r: 20.0 }
            .validate()
            .is_err());
        assert!(MerzParams { t_inf: -1e-12, e_act: 1e9 }.validate().is_err());
        assert!(RcParams { r_el: 5e3, eps_dev: 2.2e-10, d: 0.0, cap_per_area: None }
            .validate()
            .is_err());
        let mut rc = rc();
        rc.cap_per_area = Some(rc.cap_density() * 1.2);
        assert!(rc.validate().is_err());
        rc.cap_per_area = Some(rc.cap_density() * 1.03);
        assert!(rc.validate().is_ok());
    }
}

//! Field-activated switching-time fit.

use crate::device_physics::MerzParams;
use crate::fitting::{linreg, FitError, FitReport};
use crate::scalar::Real;

/// Fits the switching-time law `t = t_inf exp(e_act / E)` to
/// `(width, v_max)` operating points across a film of thickness `d`.
///
/// Linear least squares of `ln(width)` against `d / v_max`: the slope is
/// the activation field, the intercept the asymptotic time. Two distinct
/// points interpolate exactly. `residual_rms` is in `ln(width)` units.
pub fn fit_merz<S: Real>(
    points: &[(S, S)],
    d: S,
) -> Result<FitReport<MerzParams<S>, S>, FitError> {
    if !(d > S::zero()) {
        return Err(FitError::InvalidArgument("thickness d must be > 0".into()));
    }
    if points.len() < 2 {
        return Err(FitError::InsufficientData(format!(
            "need >= 2 operating points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for (row, &(width, v_max)) in points.iter().enumerate() {
        if !(width > S::zero()) || !(v_max > S::zero()) {
            return Err(FitError::InvalidArgument(format!(
                "width and v_max must be > 0 at point {row}"
            )));
        }
        xs.push(d / v_max);
        ys.push(width.ln());
    }
    let (e_act, ln_t_inf, residual_rms) = linreg(&xs, &ys)
        .ok_or(FitError::DegenerateFit("all operating voltages equal".into()))?;
    Ok(FitReport {
        parameters: MerzParams { t_inf: ln_t_inf.exp(), e_act },
        residual_rms,
        n_points: points.len(),
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards;
    use crate::device_physics::merz_switching_time;
    use approx::assert_relative_eq;

    const D: f64 = 5e-9;

    fn operating_points() -> Vec<(f64, f64)> {
        vec![(20e-6, 2.0), (200e-9, 3.0), (20e-9, 3.75)]
    }

    #[test]
    fn fits_measured_operating_points() {
        let report = fit_merz(&operating_points(), D).unwrap();
        // Same regression as the shipped calibration.
        let reference = cards::reference_merz::<f64>();
        assert_relative_eq!(report.parameters.e_act, reference.e_act, max_relative = 1e-9);
        assert_relative_eq!(report.parameters.t_inf, reference.t_inf, max_relative = 1e-9);
        assert!(report.parameters.e_act > 5e9 && report.parameters.e_act < 7e9);
        assert!(report.parameters.t_inf > 1e-12 && report.parameters.t_inf < 1e-10);
    }

    #[test]
    fn repredicts_widths_within_log_tolerance() {
        let report = fit_merz(&operating_points(), D).unwrap();
        for (width, v) in operating_points() {
            let predicted = merz_switching_time(v / D, &report.parameters);
            assert!(
                (predicted / width).ln().abs() < 5.0_f64.ln(),
                "{v} V: predicted {predicted}, measured {width}"
            );
        }
        assert!(report.residual_rms < 5.0_f64.ln());
    }

    #[test]
    fn two_points_interpolate_exactly() {
        let pts = vec![(20e-6, 2.0), (20e-9, 3.75)];
        let report = fit_merz(&pts, D).unwrap();
        assert!(report.residual_rms < 1e-12);
        for (width, v) in pts {
            let predicted = merz_switching_time(v / D, &report.parameters);
            assert_relative_eq!(predicted, width, max_relative = 1e-9);
        }
    }

    #[test]
    fn round_trips_generator_at_scale() {
        let truth = MerzParams { t_inf: 2e-11, e_act: 5.5e9 };
        let pts: Vec<_> = (0..500)
            .map(|i| {
                let v = 1.5 + 2.5 * i as f64 / 499.0;
                (merz_switching_time(v / D, &truth), v)
            })
            .collect();
        let report = fit_merz(&pts, D).unwrap();
        assert_relative_eq!(report.parameters.e_act, truth.e_act, max_relative = 1e-9);
        assert_relative_eq!(report.parameters.t_inf, truth.t_inf, max_relative = 1e-9);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            fit_merz::<f64>(&[(20e-6, 2.0)], D),
            Err(FitError::InsufficientData(_))
        ));
        assert!(matches!(
            fit_merz(&[(20e-6, 2.0), (200e-9, 2.0)], D),
            Err(FitError::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_merz(&[(20e-6, 2.0), (200e-9, 3.0)], 0.0),
            Err(FitError::InvalidArgument(_))
        ));
        assert!(matches!(
            fit_merz(&[(0.0, 2.0), (200e-9, 3.0)], D),
            Err(FitError::InvalidArgument(_))
        ));
    }
}

//! Model cards: the JSON parameter container and the calibrated reference
//! values for the 5 nm Si-doped hafnia crossbar device.
//!
//! A card bundles every fitted or assumed parameter record behind optional
//! sections, so a fitting run can write a card holding only the sections it
//! produced while simulation commands load fully populated ones. The
//! physical constants the estimators use are embedded verbatim in each card
//! for provenance.
//!
//! The `reference_*` constructors return the calibration shipped with this
//! crate: hysteresis envelopes and validity range from pulsed-measurement
//! fits, conduction and timing parameters matched to the measured
//! current density and switching-time operating points, and the plasticity
//! constants from the update-surface fit.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants;
use crate::device_model::{DeviceRule, EnvelopeParams};
use crate::device_physics::{ConductionModel, MerzParams, RcParams, SchottkyParams, TflParams};
use crate::scalar::Real;
use crate::vdsp::{ScalingFactors, VdspParams};

/// Errors raised while reading, writing, or validating a card.
#[derive(Debug, Error)]
pub enum CardError {
    #[error("card I/O failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("card is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("card section invalid: {0}")]
    Invalid(String),
    #[error("card is missing required section `{0}`")]
    MissingSection(&'static str),
}

/// Physical constants snapshot written into every card.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsCard {
    pub elementary_charge: f64,
    pub boltzmann: f64,
    pub vacuum_permittivity: f64,
}

impl Default for ConstantsCard {
    fn default() -> Self {
        Self {
            elementary_charge: constants::ELEMENTARY_CHARGE,
            boltzmann: constants::BOLTZMANN,
            vacuum_permittivity: constants::VACUUM_PERMITTIVITY,
        }
    }
}

/// Aggregate parameter container serialized as the JSON model card.
///
/// Every section is optional so producers write only what they computed;
/// [`ModelCard::require_device`] and friends give loaders a uniform way to
/// insist on the sections they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct ModelCard<S = f64> {
    pub schema_version: u32,
    #[serde(default)]
    pub constants: Option<ConstantsCard>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceRule<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conduction: Option<ConductionModel<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rc: Option<RcParams<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merz: Option<MerzParams<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vdsp: Option<VdspParams<S>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingFactors<S>>,
}

/// Current card schema version.
pub const CARD_SCHEMA_VERSION: u32 = 1;

impl<S: Real> Default for ModelCard<S> {
    fn default() -> Self {
        Self {
            schema_version: CARD_SCHEMA_VERSION,
            constants: Some(ConstantsCard::default()),
            device: None,
            conduction: None,
            rc: None,
            merz: None,
            vdsp: None,
            scaling: None,
        }
    }
}

impl<S: Real> ModelCard<S> {
    /// Validates every section that is present.
    pub fn validate(&self) -> Result<(), CardError> {
        if self.schema_version == 0 || self.schema_version > CARD_SCHEMA_VERSION {
            return Err(CardError::Invalid(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        let bad = |e: String| CardError::Invalid(e);
        if let Some(d) = &self.device {
            d.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(c) = &self.conduction {
            c.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(r) = &self.rc {
            r.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(m) = &self.merz {
            m.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(v) = &self.vdsp {
            v.validate().map_err(|e| bad(e.to_string()))?;
        }
        if let Some(s) = &self.scaling {
            s.validate().map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }

    pub fn require_device(&self) -> Result<&DeviceRule<S>, CardError> {
        self.device.as_ref().ok_or(CardError::MissingSection("device"))
    }

    pub fn require_conduction(&self) -> Result<&ConductionModel<S>, CardError> {
        self.conduction.as_ref().ok_or(CardError::MissingSection("conduction"))
    }

    pub fn require_rc(&self) -> Result<&RcParams<S>, CardError> {
        self.rc.as_ref().ok_or(CardError::MissingSection("rc"))
    }

    pub fn require_merz(&self) -> Result<&MerzParams<S>, CardError> {
        self.merz.as_ref().ok_or(CardError::MissingSection("merz"))
    }

    pub fn require_vdsp(&self) -> Result<&VdspParams<S>, CardError> {
        self.vdsp.as_ref().ok_or(CardError::MissingSection("vdsp"))
    }
}

/// Writes a card as pretty-printed JSON, validating first.
pub fn save_card<S: Real>(card: &ModelCard<S>, path: impl AsRef<Path>) -> Result<(), CardError> {
    card.validate()?;
    let file = File::create(path)?;
    serde_json::to_writer_pretty(BufWriter::new(file), card)?;
    Ok(())
}

/// Reads and validates a JSON card.
pub fn load_card<S: Real>(path: impl AsRef<Path>) -> Result<ModelCard<S>, CardError> {
    let file = File::open(path)?;
    let card: ModelCard<S> = serde_json::from_reader(BufReader::new(file))?;
    card.validate()?;
    Ok(card)
}

/// Hysteresis rule fitted to the pulsed staircase measurements: shared
/// resistance bounds 1.1-2.5 GOhm, per-branch slope and offset voltages,
/// calibrated out to +/-3.75 V writes.
pub fn reference_device<S: Real>() -> DeviceRule<S> {
    DeviceRule {
        upper: EnvelopeParams {
            r_min: S::of(1.1e9),
            r_max: S::of(2.5e9),
            v0: S::of(0.45),
            v_off: S::of(-1.0),
        },
        lower: EnvelopeParams {
            r_min: S::of(1.1e9),
            r_max: S::of(2.5e9),
            v0: S::of(0.60),
            v_off: S::of(1.6),
        },
        validity_range: S::of(3.75),
        min_pulse_width: S::zero(),
    }
}

/// Conduction model matched to the measured current density: trap-filled
/// limit above +0.14 V, thermionic emission below -0.14 V with barrier and
/// permittivity chosen so J(-3 V) reproduces -2.2e6 A/m^2, and an ohmic
/// bridge between. The positive-side ohmic conductance is continuous with
/// the quadratic branch at the transition voltage.
pub fn reference_conduction<S: Real>() -> ConductionModel<S> {
    ConductionModel {
        tfl: TflParams { k_tfl: S::of(1.0e5), v_tr: S::of(0.14) },
        schottky: SchottkyParams {
            a_eff: S::of(3.0e5),
            temperature: S::of(300.0),
            phi_b: S::of(0.45125),
            eps_r: S::of(20.0),
        },
        ohmic_g: S::of(1.4e4),
        d: S::of(5e-9),
    }
}

/// Electrode and dielectric parameters for the charging-time estimate:
/// 5 kOhm series electrode resistance and a 25 eps_0 film permittivity
/// across the 5 nm stack (0.0443 F/m^2 capacitance density).
pub fn reference_rc<S: Real>() -> RcParams<S> {
    RcParams {
        r_el: S::of(5e3),
        eps_dev: S::of(25.0 * constants::VACUUM_PERMITTIVITY),
        d: S::of(5e-9),
        cap_per_area: None,
    }
}

/// Field-activated switching-time law fitted to the three measured
/// operating points (2 V / 20 us, 3 V / 200 ns, 3.75 V / 20 ns) across the
/// 5 nm film.
pub fn reference_merz<S: Real>() -> MerzParams<S> {
    MerzParams {
        t_inf: S::of(9.56130506601477e-12),
        e_act: S::of(5845023697.60027),
    }
}

/// Plasticity constants from the update-surface fit.
pub fn reference_vdsp<S: Real>() -> VdspParams<S> {
    VdspParams {
        alpha_p: S::of(0.67),
        alpha_d: S::of(0.38),
        theta_p: S::of(0.55),
        theta_d: S::of(0.47),
        gamma_p: S::of(1.62),
        gamma_d: S::of(1.79),
    }
}

/// Fully populated reference card with the membrane-voltage gains tuned
/// for `n_outputs` readout neurons.
pub fn reference_card<S: Real>(n_outputs: usize) -> ModelCard<S> {
    ModelCard {
        device: Some(reference_device()),
        conduction: Some(reference_conduction()),
        rc: Some(reference_rc()),
        merz: Some(reference_merz()),
        vdsp: Some(reference_vdsp()),
        scaling: Some(ScalingFactors::for_output_count(n_outputs)),
        ..ModelCard::default()
    }
}

//! Calibrated constants of the model.
//!
//! Every quantity is expressed per hectare of the representative farm unless
//! its name says otherwise (`farm_area`, `landscape_area`, `n_farmers`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    /// Pollination dependence of OSR yield (t/ha).
    pub alpha1: f64,
    /// Half-saturation of the bee-dependent yield (normalised abundance).
    pub beta1: f64,
    /// Pesticide dependence of OSR yield (t/ha).
    pub alpha2: f64,
    /// Half-saturation of the pesticide-dependent yield.
    pub beta2: f64,
    /// OSR yield independent of bees and pesticides (t/ha).
    pub f_osr3: f64,
    pub chi_w: f64,
    pub chi_g: f64,
    /// Input elasticity of wheat and hay benefits.
    pub epsilon: f64,
    /// Honey production constant (kg/hive).
    pub f_h: f64,
    /// Exponent on the OSR share in honey production.
    pub gamma_osr: f64,
    /// Exponent on the hive density in honey production.
    pub gamma_hive: f64,
    pub x_h_max: f64,
    pub p_osr: f64,
    pub c_osr: f64,
    pub c_p: f64,
    pub p_h: f64,
    pub c_h: f64,
    pub z_hs: f64,
    pub z_ps: f64,
    pub z_pt: f64,
    /// Honeybees per hive.
    pub k_h: f64,
    /// Wild bees per hectare of grassland.
    pub k_w: f64,
    pub delta: f64,
    pub nu: f64,
    /// Species-area slope.
    pub s: f64,
    pub xi_osr: f64,
    pub xi_w: f64,
    pub xi_g: f64,
    pub xi_h: f64,
    /// Wheat toxicity relative to OSR.
    pub theta: f64,
    /// Reference wheat yield for food provision. Uncalibrated placeholder.
    pub y_w: f64,
    /// Reference hay yield for food provision. Uncalibrated placeholder.
    pub y_g: f64,
    pub n_farmers: u32,
    pub farm_area: f64,
    pub landscape_area: f64,
    /// Bee abundance that maps to a normalised abundance of 1.
    pub b_ref: f64,
}

/// Names of the real-valued fields, in declaration order.
pub const REAL_FIELDS: &[&str] = &[
    "alpha1",
    "beta1",
    "alpha2",
    "beta2",
    "f_osr3",
    "chi_w",
    "chi_g",
    "epsilon",
    "f_h",
    "gamma_osr",
    "gamma_hive",
    "x_h_max",
    "p_osr",
    "c_osr",
    "c_p",
    "p_h",
    "c_h",
    "z_hs",
    "z_ps",
    "z_pt",
    "k_h",
    "k_w",
    "delta",
    "nu",
    "s",
    "xi_osr",
    "xi_w",
    "xi_g",
    "xi_h",
    "theta",
    "y_w",
    "y_g",
    "farm_area",
    "landscape_area",
    "b_ref",
];

/// Fields expressed in money; scaling all of them by a common factor scales
/// both profit functions by that factor.
pub const MONETARY_FIELDS: &[&str] = &[
    "chi_w", "chi_g", "p_osr", "c_osr", "c_p", "p_h", "c_h", "z_hs", "z_ps", "z_pt",
];

impl Default for ParameterSet {
    fn default() -> Self {
        Self::default_calibration()
    }
}

impl ParameterSet {
    /// Published calibration for the Plaine & Val de Sèvre landscape.
    pub fn default_calibration() -> Self {
        let mut params = Self {
            alpha1: 1.7,
            beta1: 0.3,
            alpha2: 1.0,
            beta2: 0.3,
            f_osr3: 1.55,
            chi_w: 550.0,
            chi_g: 400.0,
            epsilon: 0.55,
            f_h: 20.0,
            gamma_osr: 0.3,
            gamma_hive: 0.4,
            x_h_max: 0.72,
            p_osr: 350.0,
            c_osr: 550.0,
            c_p: 150.0,
            p_h: 7.0,
            c_h: 100.0,
            z_hs: 28.0,
            z_ps: 1.22,
            z_pt: 50.0,
            k_h: 18_900.0,
            k_w: 5_000.0,
            delta: 0.5,
            nu: 0.5,
            s: 0.25,
            xi_osr: 6_940_000.0,
            xi_w: 4_350_000.0,
            xi_g: 3_417_000.0,
            xi_h: 3_270.0,
            theta: 0.285,
            y_w: 7.0,
            y_g: 6.0,
            n_farmers: 6,
            farm_area: 95.0,
            landscape_area: 570.0,
            b_ref: 0.0,
        };
        params.b_ref = params.derived_b_ref();
        params
    }

    /// Maximum honeybees at full hive capacity plus maximum wild bees.
    pub fn derived_b_ref(&self) -> f64 {
        self.x_h_max * self.k_h + self.k_w
    }

    /// Total farmland of the landscape (ha).
    pub fn farmland_area(&self) -> f64 {
        f64::from(self.n_farmers) * self.farm_area
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.field_ref(name).copied()
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        *self.field_mut(name)? = value;
        Ok(())
    }

    /// Copy with one field replaced. A `b_ref` that tracked its derived value
    /// keeps tracking it when a field it depends on changes.
    pub fn with_override(&self, name: &str, value: f64) -> Result<Self> {
        let tracking = self.b_ref == self.derived_b_ref();
        let mut out = self.clone();
        out.set(name, value)?;
        if tracking && name != "b_ref" {
            out.b_ref = out.derived_b_ref();
        }
        Ok(out)
    }

    /// Multiplies every monetary field by `factor`.
    pub fn scale_money(&self, factor: f64) -> Self {
        let mut scaled = self.clone();
        for name in MONETARY_FIELDS {
            let v = scaled.get(name).expect("monetary field exists");
            scaled.set(name, v * factor).expect("monetary field exists");
        }
        scaled
    }

    /// Every invariant violation, in field order. Empty when valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for name in REAL_FIELDS {
            let v = self.get(name).expect("listed field exists");
            if !v.is_finite() {
                out.push(Violation::new(*name, format!("{name} must be finite")));
            }
        }
        if !out.is_empty() {
            return out;
        }

        let mut open_unit = |name: &str, v: f64| {
            if !(v > 0.0 && v < 1.0) {
                out.push(Violation::new(name, format!("{name} must lie in (0,1)")));
            }
        };
        open_unit("epsilon", self.epsilon);
        open_unit("gamma_osr", self.gamma_osr);
        open_unit("gamma_hive", self.gamma_hive);
        open_unit("nu", self.nu);

        let mut half_open_unit = |name: &str, v: f64| {
            if !(v > 0.0 && v <= 1.0) {
                out.push(Violation::new(name, format!("{name} must lie in (0,1]")));
            }
        };
        half_open_unit("beta1", self.beta1);
        half_open_unit("beta2", self.beta2);

        if !(0.0..=1.0).contains(&self.delta) {
            out.push(Violation::new("delta", "delta must lie in [0,1]"));
        }

        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("chi_w", self.chi_w),
            ("chi_g", self.chi_g),
            ("f_h", self.f_h),
            ("x_h_max", self.x_h_max),
            ("p_osr", self.p_osr),
            ("c_osr", self.c_osr),
            ("c_p", self.c_p),
            ("p_h", self.p_h),
            ("c_h", self.c_h),
            ("k_h", self.k_h),
            ("k_w", self.k_w),
            ("s", self.s),
            ("farm_area", self.farm_area),
            ("landscape_area", self.landscape_area),
            ("b_ref", self.b_ref),
        ] {
            if v <= 0.0 {
                out.push(Violation::new(name, format!("{name} must be strictly positive")));
            }
        }

        for (name, v) in [
            ("f_osr3", self.f_osr3),
            ("z_hs", self.z_hs),
            ("z_ps", self.z_ps),
            ("z_pt", self.z_pt),
            ("xi_osr", self.xi_osr),
            ("xi_w", self.xi_w),
            ("xi_g", self.xi_g),
            ("xi_h", self.xi_h),
            ("theta", self.theta),
            ("y_w", self.y_w),
            ("y_g", self.y_g),
        ] {
            if v < 0.0 {
                out.push(Violation::new(name, format!("{name} must be non-negative")));
            }
        }

        if self.n_farmers == 0 {
            out.push(Violation::new("n_farmers", "n_farmers must be at least 1"));
        }

        let ceiling = self.derived_b_ref();
        if self.b_ref > 0.0 && self.b_ref < ceiling * (1.0 - 1e-12) {
            out.push(Violation::new(
                "b_ref",
                format!(
                    "b_ref must be at least x_h_max*k_h + k_w = {ceiling} so that normalised abundance stays in [0,1]"
                ),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(violations))
        }
    }

    fn field_ref(&self, name: &str) -> Result<&f64> {
        Ok(match name {
            "alpha1" => &self.alpha1,
            "beta1" => &self.beta1,
            "alpha2" => &self.alpha2,
            "beta2" => &self.beta2,
            "f_osr3" => &self.f_osr3,
            "chi_w" => &self.chi_w,
            "chi_g" => &self.chi_g,
            "epsilon" => &self.epsilon,
            "f_h" => &self.f_h,
            "gamma_osr" => &self.gamma_osr,
            "gamma_hive" => &self.gamma_hive,
            "x_h_max" => &self.x_h_max,
            "p_osr" => &self.p_osr,
            "c_osr" => &self.c_osr,
            "c_p" => &self.c_p,
            "p_h" => &self.p_h,
            "c_h" => &self.c_h,
            "z_hs" => &self.z_hs,
            "z_ps" => &self.z_ps,
            "z_pt" => &self.z_pt,
            "k_h" => &self.k_h,
            "k_w" => &self.k_w,
            "delta" => &self.delta,
            "nu" => &self.nu,
            "s" => &self.s,
            "xi_osr" => &self.xi_osr,
            "xi_w" => &self.xi_w,
            "xi_g" => &self.xi_g,
            "xi_h" => &self.xi_h,
            "theta" => &self.theta,
            "y_w" => &self.y_w,
            "y_g" => &self.y_g,
            "farm_area" => &self.farm_area,
            "landscape_area" => &self.landscape_area,
            "b_ref" => &self.b_ref,
            _ => return Err(Error::UnknownParameter(name.to_owned())),
        })
    }

    fn field_mut(&mut self, name: &str) -> Result<&mut f64> {
        // Same table as `field_ref`; kept in sync by the `get_set_cover_every_real_field` test.
        Ok(match name {
            "alpha1" => &mut self.alpha1,
            "beta1" => &mut self.beta1,
            "alpha2" => &mut self.alpha2,
            "beta2" => &mut self.beta2,
            "f_osr3" => &mut self.f_osr3,
            "chi_w" => &mut self.chi_w,
            "chi_g" => &mut self.chi_g,
            "epsilon" => &mut self.epsilon,
            "f_h" => &mut self.f_h,
            "gamma_osr" => &mut self.gamma_osr,
            "gamma_hive" => &mut self.gamma_hive,
            "x_h_max" => &mut self.x_h_max,
            "p_osr" => &mut self.p_osr,
            "c_osr" => &mut self.c_osr,
            "c_p" => &mut self.c_p,
            "p_h" => &mut self.p_h,
            "c_h" => &mut self.c_h,
            "z_hs" => &mut self.z_hs,
            "z_ps" => &mut self.z_ps,
            "z_pt" => &mut self.z_pt,
            "k_h" => &mut self.k_h,
            "k_w" => &mut self.k_w,
            "delta" => &mut self.delta,
            "nu" => &mut self.nu,
            "s" => &mut self.s,
            "xi_osr" => &mut self.xi_osr,
            "xi_w" => &mut self.xi_w,
            "xi_g" => &mut self.xi_g,
            "xi_h" => &mut self.xi_h,
            "theta" => &mut self.theta,
            "y_w" => &mut self.y_w,
            "y_g" => &mut self.y_g,
            "farm_area" => &mut self.farm_area,
            "landscape_area" => &mut self.landscape_area,
            "b_ref" => &mut self.b_ref,
            _ => return Err(Error::UnknownParameter(name.to_owned())),
        })
    }
}

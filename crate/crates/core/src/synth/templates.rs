use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::GestureLabel;

const DEFAULT_TOML: &str = include_str!("../../templates/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    /// Centre as a fraction of the template duration.
    pub center_frac: f64,
    /// Gaussian standard deviation in seconds.
    pub width_s: f64,
    /// Signed peak height at the reference distance.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassTemplate {
    pub label: GestureLabel,
    pub duration_s: f64,
    pub pulses: Vec<Pulse>,
}

impl ClassTemplate {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(format!("template {}: {m}", self.label)));
        if !(2.0..=3.0).contains(&self.duration_s) {
            return fail(format!("duration {} s outside [2, 3]", self.duration_s));
        }
        if !(1..=4).contains(&self.pulses.len()) {
            return fail(format!("{} pulses, expected 1 to 4", self.pulses.len()));
        }
        for (i, p) in self.pulses.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.center_frac) {
                return fail(format!("pulse {i} centre {} outside [0, 1]", p.center_frac));
            }
            if !(p.width_s > 0.0 && p.width_s.is_finite()) {
                return fail(format!("pulse {i} width must be positive"));
            }
            if !p.amplitude.is_finite() || p.amplitude == 0.0 {
                return fail(format!("pulse {i} amplitude must be finite and nonzero"));
            }
        }
        if self
            .pulses
            .windows(2)
            .any(|w| w[1].center_frac <= w[0].center_frac)
        {
            return fail("pulse centres must be strictly increasing".into());
        }
        Ok(())
    }

    /// Pulse sum at `t` seconds after onset, with the time axis stretched by
    /// `time_scale`.
    pub fn value_at(&self, t: f64, time_scale: f64) -> f64 {
        self.pulses
            .iter()
            .map(|p| {
                let z =
                    (t - p.center_frac * self.duration_s * time_scale) / (p.width_s * time_scale);
                p.amplitude * (-0.5 * z * z).exp()
            })
            .sum()
    }

    /// Mean square of the unjittered template over its own duration.
    pub fn mean_power(&self, sample_rate_hz: f64) -> f64 {
        let n = (self.duration_s * sample_rate_hz).round().max(1.0) as usize;
        (0..n)
            .map(|i| self.value_at(i as f64 / sample_rate_hz, 1.0).powi(2))
            .sum::<f64>()
            / n as f64
    }
}

/// One template per gesture label, in label order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateSet {
    #[serde(rename = "template")]
    templates: Vec<ClassTemplate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    template: Vec<ClassTemplate>,
}

impl TemplateSet {
    pub fn new(mut templates: Vec<ClassTemplate>) -> Result<Self> {
        templates.sort_by_key(|t| t.label);
        for t in &templates {
            t.validate()?;
        }
        let labels: Vec<GestureLabel> = templates.iter().map(|t| t.label).collect();
        if labels != GestureLabel::ALL {
            return Err(Error::Config(format!(
                "need exactly one template per label a..h, got {}",
                labels.iter().map(|l| l.to_string()).collect::<String>()
            )));
        }
        Ok(Self { templates })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSet = toml::from_str(text)?;
        Self::new(raw.template)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn get(&self, label: GestureLabel) -> &ClassTemplate {
        &self.templates[label.ordinal()]
    }

    pub fn templates(&self) -> &[ClassTemplate] {
        &self.templates
    }

    /// Average of [`ClassTemplate::mean_power`] over the set.
    pub fn reference_power(&self, sample_rate_hz: f64) -> f64 {
        self.templates
            .iter()
            .map(|t| t.mean_power(sample_rate_hz))
            .sum::<f64>()
            / self.templates.len() as f64
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::from_toml(DEFAULT_TOML).expect("bundled templates are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_set_loads() {
        let set = TemplateSet::default();
        assert_eq!(set.templates().len(), 8);
        for l in GestureLabel::ALL {
            assert_eq!(set.get(l).label, l);
        }
    }

    #[test]
    fn rejects_bad_templates() {
        let base = TemplateSet::default().get(GestureLabel::B).clone();
        let mut t = base.clone();
        t.duration_s = 3.5;
        assert!(t.validate().is_err());
        let mut t = base.clone();
        t.pulses.swap(0, 1);
        assert!(t.validate().is_err());
        let mut t = base.clone();
        t.pulses = vec![base.pulses[0]; 5];
        assert!(t.validate().is_err());
        let mut t = base;
        t.pulses.clear();
        assert!(t.validate().is_err());
    }

    #[test]
    fn set_needs_every_label() {
        let mut all = TemplateSet::default().templates().to_vec();
        all.pop();
        assert!(TemplateSet::new(all.clone()).is_err());
        all.push(all[0].clone());
        assert!(TemplateSet::new(all).is_err());
        assert!(TemplateSet::from_toml("[[template]]\nlabel = \"a\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn single_pulse_power() {
        let t = ClassTemplate {
            label: GestureLabel::A,
            duration_s: 2.0,
            pulses: vec![Pulse {
                center_frac: 0.5,
                width_s: 0.1,
                amplitude: 2.0,
            }],
        };
        assert!((t.value_at(1.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((t.value_at(2.0, 2.0) - 2.0).abs() < 1e-15);
        // Integral of a squared Gaussian: A^2 * w * sqrt(pi), spread over D.
        let expect = 4.0 * 0.1 * std::f64::consts::PI.sqrt() / 2.0;
        assert!((t.mean_power(1000.0) - expect).abs() < 1e-6);
    }
}

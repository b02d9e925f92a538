use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    #[default]
    Lin,
    Log,
}

/// `points` values from `min` to `max`, both included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Grid {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err("min and max must be finite".into());
        }
        if self.points == 0 {
            return Err("points must be at least 1".into());
        }
        if self.points == 1 && self.min != self.max {
            return Err(format!("points = 1 requires min = max (got {} and {})", self.min, self.max));
        }
        if self.points > 1 && self.min >= self.max {
            return Err("min must be below max".into());
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err("log scale requires min > 0".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.points {
                    return self.max;
                }
                let u = i as f64 / n;
                match self.scale {
                    Scale::Lin => self.min + (self.max - self.min) * u,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * u).exp(),
                }
            })
            .collect()
    }
}

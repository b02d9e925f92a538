use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Gain rate, loss rate, intra-cell and inter-cell coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub gamma_g: f64,
    pub gamma_l: f64,
    pub g: f64,
    pub h: f64,
}

impl Rates {
    pub fn new(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> Self {
        Self { gamma_g, gamma_l, g, h }
    }

    /// `Γ_g Γ_l`.
    pub fn product(&self) -> f64 {
        self.gamma_g * self.gamma_l
    }

    pub fn mean_rate(&self) -> f64 {
        0.5 * (self.gamma_g + self.gamma_l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "FM_UP")]
    FmUp,
    #[serde(rename = "FM_DOWN")]
    FmDown,
    #[serde(rename = "AM")]
    Am,
    #[serde(rename = "PT")]
    Pt,
    #[serde(rename = "PPT")]
    Ppt,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::FmUp => "FM_UP",
            Phase::FmDown => "FM_DOWN",
            Phase::Am => "AM",
            Phase::Pt => "PT",
            Phase::Ppt => "PPT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    Region(Phase),
    /// A point exactly on a phase boundary, with the two adjacent phases.
    Boundary(Phase, Phase),
}

impl PhaseLabel {
    pub fn name(&self) -> String {
        match self {
            PhaseLabel::Region(p) => p.name().to_string(),
            PhaseLabel::Boundary(a, b) => format!("BOUNDARY({}|{})", a.name(), b.name()),
        }
    }

    pub fn region(&self) -> Option<Phase> {
        match self {
            PhaseLabel::Region(p) => Some(*p),
            PhaseLabel::Boundary(..) => None,
        }
    }
}

fn below(gamma_g: f64, gamma_l: f64) -> Phase {
    if gamma_g > gamma_l {
        Phase::FmUp
    } else if gamma_l > gamma_g {
        Phase::FmDown
    } else {
        Phase::Pt
    }
}

/// Large-spin phase of the chain. The curves `Γ_g Γ_l = (g ± h)^2` separate
/// the antialigned, pseudo-symmetric and ferromagnetic regions; below the
/// lower curve the symmetric line `Γ_g = Γ_l` is its own phase.
pub fn classify_phase(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> PhaseLabel {
    let p = gamma_g * gamma_l;
    let upper = (g + h) * (g + h);
    let lower = (g - h) * (g - h);
    if p > upper {
        PhaseLabel::Region(Phase::Am)
    } else if p == upper {
        if upper == lower {
            PhaseLabel::Boundary(Phase::Am, below(gamma_g, gamma_l))
        } else {
            PhaseLabel::Boundary(Phase::Am, Phase::Ppt)
        }
    } else if p > lower {
        PhaseLabel::Region(Phase::Ppt)
    } else if p == lower {
        PhaseLabel::Boundary(Phase::Ppt, below(gamma_g, gamma_l))
    } else {
        PhaseLabel::Region(below(gamma_g, gamma_l))
    }
}

/// Labels on the grid `gamma = max (i + 1) / n`, indexed `[i_g][i_l]`.
pub fn phase_raster(n: usize, max: f64, g: f64, h: f64) -> Vec<Vec<PhaseLabel>> {
    let axis: Vec<f64> = (0..n).map(|i| max * (i + 1) as f64 / n as f64).collect();
    axis.iter()
        .map(|&gg| axis.iter().map(|&gl| classify_phase(gg, gl, g, h)).collect())
        .collect()
}

/// Number of 8-connected components of every region label in a raster.
/// Boundary pixels are not counted.
pub fn region_components(raster: &[Vec<PhaseLabel>]) -> BTreeMap<&'static str, usize> {
    let rows = raster.len();
    let cols = raster.first().map_or(0, |r| r.len());
    let mut seen = vec![vec![false; cols]; rows];
    let mut counts = BTreeMap::new();
    for i in 0..rows {
        for j in 0..cols {
            let Some(phase) = raster[i][j].region() else { continue };
            if seen[i][j] {
                continue;
            }
            *counts.entry(phase.name()).or_insert(0) += 1;
            let mut stack = vec![(i, j)];
            seen[i][j] = true;
            while let Some((x, y)) = stack.pop() {
                for dx in -1i64..=1 {
                    for dy in -1i64..=1 {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= rows as i64 || ny >= cols as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if !seen[nx][ny] && raster[nx][ny].region() == Some(phase) {
                            seen[nx][ny] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(classify_phase(2.0, 2.0, 1.0, 0.5), PhaseLabel::Region(Phase::Am));
        assert_eq!(classify_phase(1.0, 1.0, 1.0, 0.5), PhaseLabel::Region(Phase::Ppt));
        assert_eq!(classify_phase(0.3, 0.3, 1.0, 0.5), PhaseLabel::Region(Phase::Pt));
        assert_eq!(classify_phase(0.4, 0.1, 1.0, 0.5), PhaseLabel::Region(Phase::FmUp));
        assert_eq!(classify_phase(0.1, 0.4, 1.0, 0.5), PhaseLabel::Region(Phase::FmDown));
    }

    #[test]
    fn boundaries_are_flagged() {
        assert_eq!(classify_phase(1.5, 1.5, 1.0, 0.5), PhaseLabel::Boundary(Phase::Am, Phase::Ppt));
        assert_eq!(classify_phase(0.5, 0.5, 1.0, 0.5), PhaseLabel::Boundary(Phase::Ppt, Phase::Pt));
        assert_eq!(classify_phase(1.0, 1.0, 1.0, 0.0), PhaseLabel::Boundary(Phase::Am, Phase::Pt));
    }
}

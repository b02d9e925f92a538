use serde::Serialize;
use spinlab_core::c64;

use crate::error::{HpaError, HpaResult};
use crate::gaussian::Orientation;
use crate::lattice::{bloch_moments, reference};
use crate::phase::{Phase, Rates};

fn domain(msg: impl Into<String>) -> HpaError {
    HpaError::Domain(msg.into())
}

fn check_rates(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> HpaResult<()> {
    for (name, v) in [("gamma_g", gamma_g), ("gamma_l", gamma_l), ("g", g), ("h", h)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(domain(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    if g <= 0.0 {
        return Err(domain("g > 0 is required"));
    }
    Ok(())
}

/// Checks the stability conditions of the polarized reference of `phase`.
pub fn check_stability(gamma_g: f64, gamma_l: f64, g: f64, h: f64, phase: Phase) -> HpaResult<()> {
    check_rates(gamma_g, gamma_l, g, h)?;
    let p = gamma_g * gamma_l;
    let lower = (g - h) * (g - h);
    let upper = (g + h) * (g + h);
    match phase {
        Phase::FmUp => {
            if gamma_g <= gamma_l {
                return Err(domain(format!("gamma_g > gamma_l violated ({gamma_g} <= {gamma_l})")));
            }
            if p >= lower {
                return Err(domain(format!("(g-h)^2 > gamma_g*gamma_l violated ({lower} <= {p})")));
            }
        }
        Phase::FmDown => {
            if gamma_l <= gamma_g {
                return Err(domain(format!("gamma_l > gamma_g violated ({gamma_l} <= {gamma_g})")));
            }
            if p >= lower {
                return Err(domain(format!("(g-h)^2 > gamma_g*gamma_l violated ({lower} <= {p})")));
            }
        }
        Phase::Am => {
            if p <= upper {
                return Err(domain(format!("gamma_g*gamma_l > (g+h)^2 violated ({p} <= {upper})")));
            }
        }
        Phase::Pt | Phase::Ppt => {
            return Err(domain(format!("{} has no stable polarized reference", phase.name())));
        }
    }
    Ok(())
}

/// `C = sqrt([(g-h)^2 - P][(g+h)^2 - P])` with `P = gamma_g gamma_l`. Both
/// brackets share a sign in the ordered phases, so the product is positive.
pub fn c_factor(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> f64 {
    let p = gamma_g * gamma_l;
    (((g - h) * (g - h) - p) * ((g + h) * (g + h) - p)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KOccupations {
    pub n_a: f64,
    pub n_b: f64,
    /// `<c_{a,k}^dag c_{b,k}>`.
    pub ab: c64,
}

/// Fluctuation occupations at momentum `k`. The all-up phase uses the
/// closed forms with `g_k = g + h e^{ik}`; the other two ordered phases are
/// evaluated from the stationary Bloch moments.
pub fn occupations_k(k: f64, gamma_g: f64, gamma_l: f64, g: f64, h: f64, phase: Phase) -> HpaResult<KOccupations> {
    check_stability(gamma_g, gamma_l, g, h, phase)?;
    if phase == Phase::FmUp {
        let gk = c64::new(g, 0.0) + c64::from_polar(h, k);
        let gk2 = gk.norm_sqr();
        let p = gamma_g * gamma_l;
        let den = (gamma_g - gamma_l) * (gk2 - p);
        return Ok(KOccupations {
            n_a: gamma_l * gk2 / den,
            n_b: gamma_l * (gk2 + gamma_g * (gamma_g - gamma_l)) / den,
            ab: c64::new(0.0, 1.0) * gk * (p / den),
        });
    }
    let sigma = bloch_moments(&Rates::new(gamma_g, gamma_l, g, h), phase, k)?;
    Ok(KOccupations {
        n_a: sigma[(0, 0)].re - 0.5,
        n_b: sigma[(1, 1)].re - 0.5,
        ab: sigma[(1, 0)],
    })
}

/// Site-local fluctuation numbers of an ordered phase. `<S^z_x> =
/// sign_x (S - n_x)` with `sign` the reference orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Magnetizations {
    pub orientation_a: Orientation,
    pub orientation_b: Orientation,
    pub n_a: f64,
    pub n_b: f64,
}

impl Magnetizations {
    /// `(<S^z_a>, <S^z_b>)` at spin `s`.
    pub fn sz(&self, s: f64) -> (f64, f64) {
        (
            self.orientation_a.sign() * (s - self.n_a),
            self.orientation_b.sign() * (s - self.n_b),
        )
    }
}

pub fn magnetizations(gamma_g: f64, gamma_l: f64, g: f64, h: f64, phase: Phase) -> HpaResult<Magnetizations> {
    check_stability(gamma_g, gamma_l, g, h, phase)?;
    let c = c_factor(gamma_g, gamma_l, g, h);
    let p = gamma_g * gamma_l;
    let (oa, ob) = reference(phase)?;
    let (n_a, n_b) = match phase {
        Phase::FmUp => {
            let f = gamma_l / (gamma_g - gamma_l);
            (f * (1.0 + p / c), f * (1.0 + gamma_g * gamma_g / c))
        }
        Phase::FmDown => {
            let f = gamma_g / (gamma_l - gamma_g);
            (f * (1.0 + gamma_l * gamma_l / c), f * (1.0 + p / c))
        }
        Phase::Am => {
            let x = -1.0 + p / c;
            (gamma_l / (gamma_l + gamma_g) * x, gamma_g / (gamma_l + gamma_g) * x)
        }
        Phase::Pt | Phase::Ppt => unreachable!("rejected by check_stability"),
    };
    Ok(Magnetizations { orientation_a: oa, orientation_b: ob, n_a, n_b })
}

/// Site-local `<c_{a,n}^dag c_{b,n}>` in the all-up phase.
pub fn cross_correlation_fm_up(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> HpaResult<c64> {
    check_stability(gamma_g, gamma_l, g, h, Phase::FmUp)?;
    let c = c_factor(gamma_g, gamma_l, g, h);
    let p = gamma_g * gamma_l;
    let re = p / (2.0 * g * (gamma_g - gamma_l)) * (1.0 + (p + g * g - h * h) / c);
    Ok(c64::new(0.0, re))
}

/// Spatial ratio `r` of the fluctuation correlator `<c_{a,n}^dag c_{a,n+s}>
/// ~ r^{s-1}`: the positive root in the antialigned phase, a negative one in
/// the aligned phases.
pub fn correlation_ratio(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> HpaResult<f64> {
    check_rates(gamma_g, gamma_l, g, h)?;
    if h <= 0.0 {
        return Err(domain("h > 0 is required (the dimer has no spatial correlations)"));
    }
    let p = gamma_g * gamma_l;
    let c = c_factor(gamma_g, gamma_l, g, h);
    let b = 2.0 * g * h;
    let r = if p > (g + h) * (g + h) {
        (p - g * g - h * h - c) / b
    } else if p < (g - h) * (g - h) && gamma_g != gamma_l {
        -(g * g + h * h - p - c) / b
    } else {
        return Err(domain("correlation length is defined only inside the ordered phases"));
    };
    if !(r.abs() < 1.0) {
        return Err(domain(format!("|lambda| < 1 violated (lambda = {r})")));
    }
    Ok(r)
}

/// `xi = -1 / ln|lambda|`.
pub fn correlation_length(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> HpaResult<f64> {
    let r = correlation_ratio(gamma_g, gamma_l, g, h)?;
    Ok(-1.0 / r.abs().ln())
}

/// Leading behaviour `(|P - P_c| / (g h))^{-1/2}` near the nearer boundary
/// `P_c = (g +- h)^2`.
pub fn correlation_length_asymptote(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> HpaResult<f64> {
    check_rates(gamma_g, gamma_l, g, h)?;
    if h <= 0.0 {
        return Err(domain("h > 0 is required"));
    }
    let p = gamma_g * gamma_l;
    let eps = if p > (g + h) * (g + h) {
        p - (g + h) * (g + h)
    } else if p < (g - h) * (g - h) {
        (g - h) * (g - h) - p
    } else {
        return Err(domain("inside the PPT window"));
    };
    Ok((eps / (g * h)).powf(-0.5))
}

/// Closed-form dimer purity.
pub fn purity_closed(gamma_g: f64, gamma_l: f64, g: f64, phase: Phase) -> HpaResult<f64> {
    check_stability(gamma_g, gamma_l, g, 0.0, phase)?;
    let p = gamma_g * gamma_l;
    let (sum2, diff2, g2) = ((gamma_g + gamma_l).powi(2), (gamma_g - gamma_l).powi(2), g * g);
    Ok(match phase {
        Phase::Am => sum2 * (p - g2) / (g2 * diff2 + p * sum2),
        _ => diff2 * (g2 - p) / (p * diff2 + g2 * sum2),
    })
}

/// Closed-form dimer negativity where one is known: zero in the aligned
/// phases, `g / (2 Gbar)` on the symmetric line of the antialigned phase.
/// `None` elsewhere in the antialigned phase.
pub fn negativity_closed(gamma_g: f64, gamma_l: f64, g: f64, phase: Phase) -> HpaResult<Option<f64>> {
    check_stability(gamma_g, gamma_l, g, 0.0, phase)?;
    Ok(match phase {
        Phase::Am if gamma_g == gamma_l => Some(g / (2.0 * gamma_g)),
        Phase::Am => None,
        _ => Some(0.0),
    })
}

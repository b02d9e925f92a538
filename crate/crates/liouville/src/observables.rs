use faer::Mat;
use spinlab_core::models::ModelKind;
use spinlab_core::spin::SpinMatrices;
use spinlab_core::{c64, ModelOperators, SparseMatrix};

use crate::error::{LiouvilleError, LiouvilleResult};
use crate::steady::SteadyState;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityObservables {
    pub purity: f64,
    pub impurity: f64,
    /// `(<S^x>, <S^y>, <S^z>)` per site, spin models only.
    pub magnetization: Vec<[f64; 3]>,
    /// `<M_z> / (2S)` with `M_z` the total magnetization, spin models only.
    pub order_parameter: Option<f64>,
    /// `P(m_a, m_b)` of the first two sites, indexed from `m = S` downward.
    pub joint_distribution: Option<Vec<Vec<f64>>>,
    /// Fock-state populations, boson models only.
    pub photon_distribution: Option<Vec<f64>>,
    pub photon_number: Option<f64>,
}

/// `Tr(rho op)`.
pub fn expectation(rho: &Mat<c64>, op: &SparseMatrix) -> c64 {
    op.triplets().map(|(r, c, v)| v * rho[(c, r)]).sum()
}

pub fn purity(rho: &Mat<c64>) -> f64 {
    let d = rho.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (rho[(i, j)] * rho[(j, i)]).re;
        }
    }
    acc
}

/// Splits a Fock distribution at the deepest minimum between its two highest
/// local maxima and returns the weights of the lower and upper lobe. `None`
/// if the distribution has a single maximum.
pub fn lobe_weights(p: &[f64]) -> Option<(f64, f64)> {
    let n = p.len();
    let is_peak = |k: usize| {
        let left = k == 0 || p[k] > p[k - 1];
        let right = k + 1 == n || p[k] >= p[k + 1];
        left && right && p[k] > 0.0
    };
    let mut peaks: Vec<usize> = (0..n).filter(|&k| is_peak(k)).collect();
    if peaks.len() < 2 {
        return None;
    }
    peaks.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap());
    let (lo, hi) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
    let split = (lo..=hi).min_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap())?;
    let lower: f64 = p[..split].iter().sum::<f64>() + 0.5 * p[split];
    let upper: f64 = p[split + 1..].iter().sum::<f64>() + 0.5 * p[split];
    Some((lower, upper))
}

/// Population of the Fock states `n >= from`.
pub fn tail_mass(p: &[f64], from: usize) -> f64 {
    p.iter().skip(from).map(|v| v.abs()).sum()
}

pub fn observables(state: &SteadyState, model: &ModelOperators) -> LiouvilleResult<DensityObservables> {
    let rho = &state.rho;
    if rho.nrows() != model.dim() {
        return Err(LiouvilleError::InvalidArgument("state and model dimensions differ".into()));
    }
    let p = purity(rho);
    let mut out = DensityObservables {
        purity: p,
        impurity: 1.0 / p,
        magnetization: Vec::new(),
        order_parameter: None,
        joint_distribution: None,
        photon_distribution: None,
        photon_number: None,
    };
    let diag: Vec<f64> = (0..model.dim()).map(|i| rho[(i, i)].re).collect();
    match model.kind {
        ModelKind::Spins { s } => {
            let sp = SpinMatrices::new(s)?;
            let (sx, sy) = (sp.s_x(), sp.s_y());
            let space = &model.space;
            let mut total_z = 0.0;
            for site in 0..space.n_sites() {
                let x = expectation(rho, &space.embed(&sx, site)?).re;
                let y = expectation(rho, &space.embed(&sy, site)?).re;
                let z = expectation(rho, &space.embed(&sp.s_z, site)?).re;
                total_z += z;
                out.magnetization.push([x, y, z]);
            }
            out.order_parameter = Some(total_z / (2.0 * s));
            if space.n_sites() >= 2 {
                let n = sp.dim();
                let mut joint = vec![vec![0.0; n]; n];
                for (idx, &w) in diag.iter().enumerate() {
                    joint[space.local_index(idx, 0)][space.local_index(idx, 1)] += w;
                }
                out.joint_distribution = Some(joint);
            }
        }
        ModelKind::Boson { .. } => {
            out.photon_number = Some(diag.iter().enumerate().map(|(n, w)| n as f64 * w).sum());
            out.photon_distribution = Some(diag);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::SolveMethod;
    use spinlab_core::models::build_chain;
    use spinlab_core::ChainSpec;

    #[test]
    fn lobes_of_two_bumps() {
        let p: Vec<f64> = (0..60)
            .map(|n| {
                let n = n as f64;
                0.3 * (-(n * n) / 4.0).exp() + 0.7 * (-((n - 30.0) * (n - 30.0)) / 20.0).exp()
            })
            .collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|v| v / total).collect();
        let (lo, hi) = lobe_weights(&p).unwrap();
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!(lo > 0.1 && hi > 0.6);
        let single: Vec<f64> = (0..20).map(|n| (-(n as f64 - 5.0).powi(2)).exp()).collect();
        assert!(lobe_weights(&single).is_none());
    }

    #[test]
    fn fully_mixed_purity() {
        let model = build_chain(&ChainSpec::dimer(1.0, 1.0, 1.0, 1.0)).unwrap();
        let d = model.dim();
        let rho = Mat::<c64>::from_fn(d, d, |i, j| if i == j { c64::new(1.0 / d as f64, 0.0) } else { c64::new(0.0, 0.0) });
        let st = SteadyState { rho, residual: 0.0, method: SolveMethod::BorderedLu };
        let obs = observables(&st, &model).unwrap();
        assert!((obs.purity - 1.0 / d as f64).abs() < 1e-15);
        assert!(obs.magnetization.iter().all(|m| m.iter().all(|v| v.abs() < 1e-15)));
        let total: f64 = obs.joint_distribution.unwrap().iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}

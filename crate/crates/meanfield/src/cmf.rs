use serde::Serialize;
use spinlab_core::spin::spin_coherent_state;
use spinlab_core::{c64, ProductSpace, SparseMatrix, SpinMatrices};

use crate::error::{MeanFieldError, MeanFieldResult};

/// Largest cluster Hilbert dimension accepted by [`cmf_solve`].
pub const DEFAULT_MAX_CLUSTER_DIM: usize = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CmfSpec {
    /// Cluster size: unit cells, or single sites for the transformed model.
    pub n_c: usize,
    pub s: f64,
    pub g: f64,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    /// Single-site chain obtained by rotating every gain site by pi about x;
    /// requires `gamma_g = gamma_l` and `h = g`.
    pub transformed: bool,
    /// Length of one averaging window.
    pub window: f64,
    /// Convergence threshold on successive window averages, in units of `S`.
    pub tol: f64,
    pub max_windows: usize,
    pub max_dim: usize,
}

impl CmfSpec {
    pub fn transformed(n_c: usize, s: f64, g: f64, gamma: f64) -> Self {
        Self {
            n_c,
            s,
            g,
            h: g,
            gamma_g: gamma,
            gamma_l: gamma,
            transformed: true,
            window: 50.0,
            tol: 1e-4,
            max_windows: 400,
            max_dim: DEFAULT_MAX_CLUSTER_DIM,
        }
    }

    pub fn untransformed(n_c: usize, s: f64, g: f64, h: f64, gamma_g: f64, gamma_l: f64) -> Self {
        Self { h, gamma_g, gamma_l, transformed: false, ..Self::transformed(n_c, s, g, gamma_g) }
    }

    pub fn n_sites(&self) -> usize {
        if self.transformed {
            self.n_c
        } else {
            2 * self.n_c
        }
    }

    pub fn validate(&self) -> MeanFieldResult<()> {
        let bad = |m: String| Err(MeanFieldError::InvalidArgument(m));
        if self.n_c == 0 {
            return bad("cluster size must be at least 1".into());
        }
        for (name, v) in [("g", self.g), ("h", self.h), ("gamma_g", self.gamma_g), ("gamma_l", self.gamma_l)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        if self.transformed && (self.gamma_g != self.gamma_l || self.h != self.g) {
            return bad("the transformed model needs gamma_g = gamma_l and h = g".into());
        }
        if !(self.window > 0.0 && self.tol > 0.0 && self.max_windows >= 2) {
            return bad("window, tol and max_windows must be positive (max_windows >= 2)".into());
        }
        let local = (2.0 * self.s).round() as usize + 1;
        let dim = (local as f64).powi(self.n_sites() as i32);
        if dim > self.max_dim as f64 {
            return bad(format!("cluster dimension {dim} exceeds the budget {}", self.max_dim));
        }
        Ok(())
    }
}

/// Initial product state of the cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    /// Every spin polarized along `+z`; the transverse moments vanish at all
    /// times.
    None,
    /// Every spin a coherent state at polar angle `theta`, azimuth `phi`.
    Tilt { theta: f64, phi: f64 },
    /// Per-sublattice coherent states (gain sites, loss sites); the
    /// transformed model uses the first pair only.
    Staggered { a: (f64, f64), b: (f64, f64) },
}

#[derive(Debug, Clone, Serialize)]
pub struct CmfReport {
    pub n_c: usize,
    pub s: f64,
    pub transformed: bool,
    /// Window-averaged `sqrt(<S^x>^2 + <S^y>^2)` of every site.
    pub s_perp_sites: Vec<f64>,
    /// Mean of `s_perp_sites` over the gain sites (all sites when
    /// transformed).
    pub s_perp: f64,
    /// Window-averaged `<S^z>` of every site.
    pub s_z: Vec<f64>,
    /// `(<S^x>, <S^y>, <S^z>)` of every site at the end of the run.
    pub final_moments: Vec<[f64; 3]>,
    pub windows: usize,
    pub last_change: f64,
    pub time: f64,
}

struct Cluster {
    dim: usize,
    sx: Vec<SparseMatrix>,
    sy: Vec<SparseMatrix>,
    sz: Vec<SparseMatrix>,
    /// `-i H_0 - sum r J^dag J`.
    g0: SparseMatrix,
    jumps: Vec<(f64, SparseMatrix)>,
    /// `(site, partner, coupling, y_sign)`: site feels
    /// `(coupling/S)(<Sx_partner> Sx_site + y_sign <Sy_partner> Sy_site)`.
    boundary: Vec<(usize, usize, f64, f64)>,
    s: f64,
}

fn build_cluster(spec: &CmfSpec) -> MeanFieldResult<Cluster> {
    let sp = SpinMatrices::new(spec.s)?;
    let n = spec.n_sites();
    let space = ProductSpace::uniform(n, sp.dim())?;
    let (sxl, syl) = (sp.s_x(), sp.s_y());
    let mut sx = Vec::new();
    let mut sy = Vec::new();
    let mut sz = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for site in 0..n {
        sx.push(space.embed(&sxl, site)?);
        sy.push(space.embed(&syl, site)?);
        sz.push(space.embed(&sp.s_z, site)?);
        plus.push(space.embed(&sp.s_plus, site)?);
        minus.push(space.embed(&sp.s_minus, site)?);
    }
    let s = spec.s;
    let one = c64::new(1.0, 0.0);
    let y_sign = if spec.transformed { -1.0 } else { 1.0 };
    let mut bonds: Vec<(usize, usize, f64)> = Vec::new();
    let mut jumps = Vec::new();
    let mut boundary = Vec::new();
    if spec.transformed {
        for i in 0..n - 1 {
            bonds.push((i, i + 1, spec.g));
        }
        for i in 0..n {
            jumps.push((spec.gamma_g / (2.0 * s), minus[i].clone()));
        }
        boundary.push((0, n - 1, spec.g, y_sign));
        boundary.push((n - 1, 0, spec.g, y_sign));
    } else {
        for cell in 0..spec.n_c {
            bonds.push((2 * cell, 2 * cell + 1, spec.g));
            if cell + 1 < spec.n_c {
                bonds.push((2 * cell + 1, 2 * cell + 2, spec.h));
            }
            jumps.push((spec.gamma_g / (2.0 * s), plus[2 * cell].clone()));
            jumps.push((spec.gamma_l / (2.0 * s), minus[2 * cell + 1].clone()));
        }
        boundary.push((0, n - 1, spec.h, y_sign));
        boundary.push((n - 1, 0, spec.h, y_sign));
    }
    let dim = space.total_dim();
    let mut h0 = SparseMatrix::zeros(dim, dim);
    for (i, j, coupling) in bonds {
        let xx = sx[i].matmul(&sx[j])?;
        let yy = sy[i].matmul(&sy[j])?;
        h0 = SparseMatrix::linear_combination(&[
            (one, &h0),
            (c64::new(coupling / s, 0.0), &xx),
            (c64::new(y_sign * coupling / s, 0.0), &yy),
        ])?;
    }
    let mut g0 = h0.scale(c64::new(0.0, -1.0));
    for (rate, j) in &jumps {
        let jdj = j.adjoint().matmul(j)?;
        g0 = SparseMatrix::linear_combination(&[(one, &g0), (c64::new(-rate, 0.0), &jdj)])?;
    }
    Ok(Cluster { dim, sx, sy, sz, g0, jumps, boundary, s })
}

/// `A rho` for row-major `rho`.
fn left_mul(a: &SparseMatrix, rho: &[c64], d: usize, out: &mut [c64]) {
    out.iter_mut().for_each(|v| *v = c64::new(0.0, 0.0));
    for r in 0..d {
        let (cols, vals) = a.row(r);
        for (&k, &v) in cols.iter().zip(vals) {
            let src = &rho[k * d..(k + 1) * d];
            let dst = &mut out[r * d..(r + 1) * d];
            for (o, x) in dst.iter_mut().zip(src) {
                *o += v * x;
            }
        }
    }
}

fn expect(op: &SparseMatrix, rho: &[c64], d: usize) -> f64 {
    op.triplets().map(|(r, c, v)| (v * rho[c * d + r]).re).sum()
}

impl Cluster {
    fn moments(&self, rho: &[c64]) -> Vec<[f64; 3]> {
        (0..self.sx.len())
            .map(|i| {
                [
                    expect(&self.sx[i], rho, self.dim),
                    expect(&self.sy[i], rho, self.dim),
                    expect(&self.sz[i], rho, self.dim),
                ]
            })
            .collect()
    }

    /// Right-hand side of the nonlinear cluster master equation.
    fn rhs(&self, rho: &[c64], out: &mut [c64], scratch: &mut [c64]) {
        let d = self.dim;
        // G rho with G = g0 - i H_mf(rho).
        left_mul(&self.g0, rho, d, out);
        for &(site, partner, coupling, y_sign) in &self.boundary {
            let mx = expect(&self.sx[partner], rho, d);
            let my = expect(&self.sy[partner], rho, d);
            for (op, m) in [(&self.sx[site], mx), (&self.sy[site], y_sign * my)] {
                if m == 0.0 {
                    continue;
                }
                left_mul(op, rho, d, scratch);
                let f = c64::new(0.0, -coupling * m / self.s);
                out.iter_mut().zip(scratch.iter()).for_each(|(o, x)| *o += f * x);
            }
        }
        // Add (G rho)^dag = rho G^dag.
        for r in 0..d {
            for c in r..d {
                let a = out[r * d + c];
                let b = out[c * d + r];
                let v = a + b.conj();
                out[r * d + c] = v;
                out[c * d + r] = v.conj();
            }
        }
        for (rate, j) in &self.jumps {
            // 2r J rho J^dag, assembled entrywise from the sparse rows.
            left_mul(j, rho, d, scratch);
            for r in 0..d {
                if j.row(r).0.is_empty() {
                    continue;
                }
                for c in 0..d {
                    let mut acc = c64::new(0.0, 0.0);
                    let (ccols, cvals) = j.row(c);
                    for (&k, &v) in ccols.iter().zip(cvals) {
                        acc += scratch[r * d + k] * v.conj();
                    }
                    out[r * d + c] += acc * (2.0 * rate);
                }
            }
        }
    }
}

fn product_state(spec: &CmfSpec, bias: Bias, d: usize) -> MeanFieldResult<Vec<c64>> {
    let n = spec.n_sites();
    let angles = |site: usize| -> (f64, f64) {
        match bias {
            Bias::None => (0.0, 0.0),
            Bias::Tilt { theta, phi } => (theta, phi),
            Bias::Staggered { a, b } => {
                if spec.transformed || site % 2 == 0 {
                    a
                } else {
                    b
                }
            }
        }
    };
    let mut psi = vec![c64::new(1.0, 0.0)];
    for site in 0..n {
        let (theta, phi) = angles(site);
        let local = spin_coherent_state(spec.s, theta, phi)?;
        psi = psi.iter().flat_map(|a| local.iter().map(move |b| a * b)).collect();
    }
    debug_assert_eq!(psi.len(), d);
    let mut rho = vec![c64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            rho[r * d + c] = psi[r] * psi[c].conj();
        }
    }
    Ok(rho)
}

/// Propagates the self-consistent cluster master equation window by window
/// until the window-averaged transverse polarization and magnetizations
/// change by less than `tol * S` between successive windows.
pub fn cmf_solve(spec: &CmfSpec, bias: Bias) -> MeanFieldResult<CmfReport> {
    spec.validate()?;
    let cl = build_cluster(spec)?;
    let d = cl.dim;
    let mut rho = product_state(spec, bias, d)?;
    let mf_bound: f64 = cl.boundary.iter().map(|b| 2.0 * b.2 * spec.s).sum();
    let dt = (0.25 / (cl.g0.norm_inf() + mf_bound)).min(0.02);
    let steps = (spec.window / dt).ceil() as usize;
    let dt = spec.window / steps as f64;
    let n = spec.n_sites();
    let n2 = d * d;
    let (mut k1, mut k2, mut k3, mut k4) = (vec![c64::new(0.0, 0.0); n2], vec![c64::new(0.0, 0.0); n2], vec![c64::new(0.0, 0.0); n2], vec![c64::new(0.0, 0.0); n2]);
    let mut tmp = vec![c64::new(0.0, 0.0); n2];
    let mut scratch = vec![c64::new(0.0, 0.0); n2];
    let mut previous: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    let gain_sites: Vec<usize> = if spec.transformed { (0..n).collect() } else { (0..n).step_by(2).collect() };
    for window in 1..=spec.max_windows {
        let mut perp = vec![0.0; n];
        let mut z = vec![0.0; n];
        for _ in 0..steps {
            cl.rhs(&rho, &mut k1, &mut scratch);
            for i in 0..n2 {
                tmp[i] = rho[i] + k1[i] * (0.5 * dt);
            }
            cl.rhs(&tmp, &mut k2, &mut scratch);
            for i in 0..n2 {
                tmp[i] = rho[i] + k2[i] * (0.5 * dt);
            }
            cl.rhs(&tmp, &mut k3, &mut scratch);
            for i in 0..n2 {
                tmp[i] = rho[i] + k3[i] * dt;
            }
            cl.rhs(&tmp, &mut k4, &mut scratch);
            for i in 0..n2 {
                rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
            }
            for (i, m) in cl.moments(&rho).iter().enumerate() {
                perp[i] += m[0].hypot(m[1]) / steps as f64;
                z[i] += m[2] / steps as f64;
            }
        }
        let current: Vec<f64> = perp.iter().chain(z.iter()).copied().collect();
        if let Some(prev) = &previous {
            last_change = prev.iter().zip(&current).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / spec.s;
            if last_change < spec.tol {
                let s_perp = gain_sites.iter().map(|&i| perp[i]).sum::<f64>() / gain_sites.len() as f64;
                return Ok(CmfReport {
                    n_c: spec.n_c,
                    s: spec.s,
                    transformed: spec.transformed,
                    s_perp_sites: perp,
                    s_perp,
                    s_z: z,
                    final_moments: cl.moments(&rho),
                    windows: window,
                    last_change,
                    time: window as f64 * spec.window,
                });
            }
        }
        if rho.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(MeanFieldError::NotConverged { windows: window, amplitude: f64::INFINITY });
        }
        previous = Some(current);
    }
    Err(MeanFieldError::NotConverged { windows: spec.max_windows, amplitude: last_change })
}

/// Solves from two initial biases and reports whether they settle on
/// different states (by more than `10 tol S` in any window average).
pub fn cmf_bistability(spec: &CmfSpec, first: Bias, second: Bias) -> MeanFieldResult<(CmfReport, CmfReport, bool)> {
    let a = cmf_solve(spec, first)?;
    let b = cmf_solve(spec, second)?;
    let differs = a
        .s_perp_sites
        .iter()
        .chain(&a.s_z)
        .zip(b.s_perp_sites.iter().chain(&b.s_z))
        .any(|(x, y)| (x - y).abs() > 10.0 * spec.tol * spec.s);
    Ok((a, b, differs))
}

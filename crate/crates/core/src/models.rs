//! Hamiltonians and jump operators for the gain/loss spin chain and the
//! driven Kerr oscillator.
//!
//! Dissipators follow `D[J] rho = 2 J rho J^† - J^† J rho - rho J^† J`, each
//! weighted by the rate stored next to its jump operator.

use serde::{Deserialize, Serialize};

use crate::boson::BosonMatrices;
use crate::error::{CoreError, CoreResult};
use crate::space::ProductSpace;
use crate::sparse::SparseMatrix;
use crate::spin::{twice_spin, SpinMatrices};
use crate::c64;

/// Largest Hilbert dimension the model builders accept by default.
pub const DEFAULT_MAX_HILBERT_DIM: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_cells: usize,
    pub s: f64,
    pub g: f64,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl ChainSpec {
    /// Single gain/loss pair without inter-cell coupling.
    pub fn dimer(s: f64, g: f64, gamma_g: f64, gamma_l: f64) -> Self {
        Self {
            n_cells: 1,
            s,
            g,
            h: 0.0,
            gamma_g,
            gamma_l,
            boundary: Boundary::Open,
        }
    }

    pub fn validate(&self) -> CoreResult<()> {
        twice_spin(self.s)?;
        if self.s == 0.0 {
            return Err(CoreError::InvalidArgument("spin must be positive".into()));
        }
        if self.n_cells == 0 {
            return Err(CoreError::InvalidArgument("n_cells must be at least 1".into()));
        }
        for (name, v) in [
            ("g", self.g),
            ("h", self.h),
            ("gamma_g", self.gamma_g),
            ("gamma_l", self.gamma_l),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.n_cells == 1 {
            if self.boundary == Boundary::Periodic {
                return Err(CoreError::InvalidArgument(
                    "a periodic chain needs at least two cells".into(),
                ));
            }
            if self.h != 0.0 {
                return Err(CoreError::InvalidArgument(
                    "a single open cell is the dimer and requires h = 0".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        2 * self.n_cells
    }

    /// Site index of the gain spin of cell `n`.
    pub fn site_a(n: usize) -> usize {
        2 * n
    }

    /// Site index of the loss spin of cell `n`.
    pub fn site_b(n: usize) -> usize {
        2 * n + 1
    }

    /// Coupled site pairs with their coupling constant.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_cells;
        let mut out = Vec::with_capacity(2 * n);
        for cell in 0..n {
            out.push((Self::site_a(cell), Self::site_b(cell), self.g));
            let last = cell + 1 == n;
            if !last || self.boundary == Boundary::Periodic {
                out.push((Self::site_b(cell), Self::site_a((cell + 1) % n), self.h));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrSpec {
    pub delta: f64,
    pub u: f64,
    pub f: f64,
    pub gamma: f64,
    pub d: f64,
    pub cutoff: usize,
}

impl KerrSpec {
    /// Spec with the default Fock cutoff `4 D`.
    pub fn with_default_cutoff(delta: f64, u: f64, f: f64, gamma: f64, d: f64) -> Self {
        Self {
            delta,
            u,
            f,
            gamma,
            d,
            cutoff: (4.0 * d).ceil() as usize,
        }
    }

    pub fn validate(&self) -> CoreResult<()> {
        if !(self.gamma > 0.0) {
            return Err(CoreError::InvalidArgument("gamma must be positive".into()));
        }
        if !(self.d >= 1.0) {
            return Err(CoreError::InvalidArgument("D must be at least 1".into()));
        }
        if (self.cutoff as f64) < 4.0 * self.d {
            return Err(CoreError::InvalidArgument(format!(
                "cutoff {} is below 4 D = {}",
                self.cutoff,
                4.0 * self.d
            )));
        }
        for (name, v) in [("delta", self.delta), ("u", self.u), ("f", self.f)] {
            if !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub op: SparseMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Spin chain with the given spin length on every site.
    Spins { s: f64 },
    /// Single truncated boson mode.
    Boson { cutoff: usize },
}

#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub hamiltonian: SparseMatrix,
    pub jumps: Vec<Jump>,
    pub space: ProductSpace,
    pub kind: ModelKind,
    /// Integer U(1) charge of every basis state, present when the
    /// Hamiltonian conserves it and every jump shifts it by a fixed amount.
    pub charges: Option<Vec<i64>>,
}

impl ModelOperators {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn validate(&self) -> CoreResult<()> {
        let d = self.dim();
        if !self.hamiltonian.is_square() {
            return Err(CoreError::InvalidArgument("Hamiltonian is not square".into()));
        }
        let scale = self.hamiltonian.max_abs().max(1.0);
        if self.hamiltonian.hermiticity_defect() > 1e-12 * scale {
            return Err(CoreError::InvalidArgument("Hamiltonian is not Hermitian".into()));
        }
        for j in &self.jumps {
            if j.op.nrows() != d || j.op.ncols() != d {
                return Err(CoreError::DimensionMismatch {
                    expected: d,
                    found: j.op.nrows(),
                });
            }
            if !(j.rate >= 0.0 && j.rate.is_finite()) {
                return Err(CoreError::InvalidArgument("jump rates must be non-negative".into()));
            }
        }
        if let Some(c) = &self.charges {
            if c.len() != d {
                return Err(CoreError::DimensionMismatch {
                    expected: d,
                    found: c.len(),
                });
            }
        }
        Ok(())
    }
}

pub fn build_chain(spec: &ChainSpec) -> CoreResult<ModelOperators> {
    build_chain_with_budget(spec, DEFAULT_MAX_HILBERT_DIM)
}

pub fn build_chain_with_budget(spec: &ChainSpec, max_dim: usize) -> CoreResult<ModelOperators> {
    spec.validate()?;
    let spin = SpinMatrices::new(spec.s)?;
    let local = spin.dim();
    let n_sites = spec.n_sites();
    let dim = (local as u128).checked_pow(n_sites as u32).unwrap_or(u128::MAX);
    if dim > max_dim as u128 {
        return Err(CoreError::Budget {
            dim: dim.min(usize::MAX as u128) as usize,
            limit: max_dim,
        });
    }
    let space = ProductSpace::uniform(n_sites, local)?;
    let plus: Vec<SparseMatrix> = (0..n_sites)
        .map(|k| space.embed(&spin.s_plus, k))
        .collect::<CoreResult<_>>()?;
    let minus: Vec<SparseMatrix> = plus.iter().map(SparseMatrix::adjoint).collect();

    let norm = 1.0 / (2.0 * spec.s);
    let mut h = SparseMatrix::zeros(space.total_dim(), space.total_dim());
    for (i, j, coupling) in spec.bonds() {
        if coupling == 0.0 {
            continue;
        }
        let hop = plus[i].matmul(&minus[j])?;
        let bond = hop.add(&hop.adjoint())?;
        h = h.add(&bond.scale(c64::new(coupling * norm, 0.0)))?;
    }

    let mut jumps = Vec::with_capacity(n_sites);
    for cell in 0..spec.n_cells {
        if spec.gamma_g > 0.0 {
            jumps.push(Jump {
                rate: spec.gamma_g * norm,
                op: plus[ChainSpec::site_a(cell)].clone(),
            });
        }
        if spec.gamma_l > 0.0 {
            jumps.push(Jump {
                rate: spec.gamma_l * norm,
                op: minus[ChainSpec::site_b(cell)].clone(),
            });
        }
    }

    let two_s = twice_spin(spec.s)? as i64;
    let charges = (0..space.total_dim())
        .map(|idx| {
            space
                .digits(idx)
                .iter()
                .map(|&i| two_s - 2 * i as i64)
                .sum::<i64>()
        })
        .collect();

    let model = ModelOperators {
        hamiltonian: h,
        jumps,
        space,
        kind: ModelKind::Spins { s: spec.s },
        charges: Some(charges),
    };
    model.validate()?;
    Ok(model)
}

/// `H = -Δ c^†c + (U/D) c^†c^†cc + √D F (c^† + c)` with a single jump `c`
/// at rate `γ`, so the field amplitude decays at rate `γ`.
pub fn build_kerr(spec: &KerrSpec) -> CoreResult<ModelOperators> {
    spec.validate()?;
    let b = BosonMatrices::new(spec.cutoff)?;
    let a = SparseMatrix::from_dense(&b.a);
    let a_dag = a.adjoint();
    let n = a_dag.matmul(&a)?;
    let pair = a_dag.matmul(&a_dag)?.matmul(&a)?.matmul(&a)?;
    let drive = a.add(&a_dag)?;
    let h = SparseMatrix::linear_combination(&[
        (c64::new(-spec.delta, 0.0), &n),
        (c64::new(spec.u / spec.d, 0.0), &pair),
        (c64::new(spec.d.sqrt() * spec.f, 0.0), &drive),
    ])?;
    let model = ModelOperators {
        hamiltonian: h,
        jumps: vec![Jump {
            rate: spec.gamma,
            op: a,
        }],
        space: ProductSpace::new(vec![b.dim()])?,
        kind: ModelKind::Boson {
            cutoff: spec.cutoff,
        },
        charges: None,
    };
    model.validate()?;
    Ok(model)
}

//! Jacobi iteration of the discrete steady-state heat equation and the
//! homotopy it induces between two fields.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::{neighbor_table, GridField, Topology};

/// Largest mesh side accepted by [`spectral_radius_diagnostic`].
pub const MAX_SPECTRAL_N: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatConfig {
    pub epsilon: f64,
    pub max_steps: usize,
    pub topology: Topology,
}

impl HeatConfig {
    pub fn new(epsilon: f64, max_steps: usize, topology: Topology) -> Result<Self> {
        let cfg = HeatConfig {
            epsilon,
            max_steps,
            topology,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Input(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Input("max_steps must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig {
            epsilon: 1e-3,
            max_steps: 500,
            topology: Topology::Square,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltReason {
    Epsilon,
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct HeatRun {
    steps: Vec<GridField>,
    halted_by: HaltReason,
    topology: Topology,
}

impl HeatRun {
    pub fn steps(&self) -> &[GridField] {
        &self.steps
    }

    pub fn step(&self, k: usize) -> Result<&GridField> {
        self.steps
            .get(k)
            .ok_or_else(|| Error::Range(format!("step {k} beyond final step {}", self.final_step())))
    }

    /// Index of the last computed step (T).
    pub fn final_step(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn halted_by(&self) -> HaltReason {
        self.halted_by
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n(&self) -> usize {
        self.steps[0].n()
    }
}

/// Subtracts the mean difference from `g` so the difference field has zero
/// average. Returns `(g - offset) - f` together with the offset.
pub fn center_difference(f: &GridField, g: &GridField) -> Result<(GridField, f64)> {
    if f.n() != g.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            actual: g.n(),
        });
    }
    let offset = g.mean() - f.mean();
    let values = g
        .values()
        .iter()
        .zip(f.values())
        .map(|(&gv, &fv)| (gv - offset) - fv)
        .collect();
    Ok((f.with_values(values), offset))
}

/// One Jacobi sweep: every point becomes the mean of its four neighbor slots.
pub fn jacobi_step(u: &GridField, topology: Topology) -> GridField {
    let table = neighbor_table(topology, u.n());
    jacobi_with_table(u, &table)
}

fn jacobi_with_table(u: &GridField, table: &[[usize; 4]]) -> GridField {
    let v = u.values();
    let out = table
        .iter()
        .map(|&[a, b, c, d]| ((v[a] + v[b]) + (v[c] + v[d])) * 0.25)
        .collect();
    u.with_values(out)
}

/// Iterates [`jacobi_step`] until no point changes by more than `epsilon`
/// or `max_steps` sweeps have been taken.
pub fn run_heat(u0: &GridField, cfg: &HeatConfig) -> Result<HeatRun> {
    cfg.validate()?;
    let table = neighbor_table(cfg.topology, u0.n());
    let mut steps = vec![u0.clone()];
    let halted_by = loop {
        let cur = steps.last().expect("non-empty");
        let next = jacobi_with_table(cur, &table);
        let change = cur
            .values()
            .iter()
            .zip(next.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        steps.push(next);
        if change <= cfg.epsilon {
            break HaltReason::Epsilon;
        }
        if steps.len() > cfg.max_steps {
            break HaltReason::MaxSteps;
        }
    };
    Ok(HeatRun {
        steps,
        halted_by,
        topology: cfg.topology,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HomotopyMode {
    /// `f + u_t`, running from the centered `g` to (approximately) `f`.
    AddF,
    /// `u_t` alone, running from the difference field to a constant.
    #[default]
    DifferenceOnly,
}

impl std::str::FromStr for HomotopyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "add-f" => Ok(HomotopyMode::AddF),
            "difference-only" => Ok(HomotopyMode::DifferenceOnly),
            other => Err(Error::Input(format!("unknown homotopy mode '{other}'"))),
        }
    }
}

pub fn homotopy_field(
    f: &GridField,
    run: &HeatRun,
    step: usize,
    mode: HomotopyMode,
) -> Result<GridField> {
    let u = run.step(step)?;
    match mode {
        HomotopyMode::DifferenceOnly => Ok(u.clone()),
        HomotopyMode::AddF => {
            if f.n() != u.n() {
                return Err(Error::Dimension {
                    expected: u.n(),
                    actual: f.n(),
                });
            }
            let values = f.values().iter().zip(u.values()).map(|(a, b)| a + b).collect();
            Ok(f.with_values(values))
        }
    }
}

/// Mean absolute per-point change between `step - 1` and `step`.
pub fn mean_absolute_change(run: &HeatRun, step: usize) -> Result<f64> {
    if step == 0 {
        return Err(Error::Range("mean absolute change needs step >= 1".into()));
    }
    let cur = run.step(step)?;
    let prev = run.step(step - 1)?;
    let sum: f64 = cur
        .values()
        .iter()
        .zip(prev.values())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(sum / cur.values().len() as f64)
}

/// Spectral radius of the Jacobi iteration matrix `N / 4`, overall and
/// restricted to fields with zero mean.
pub fn spectral_radius_diagnostic(topology: Topology, n: usize) -> Result<(f64, f64)> {
    if n > MAX_SPECTRAL_N {
        return Err(Error::Capacity(format!(
            "dense eigensolve limited to n <= {MAX_SPECTRAL_N}, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Precondition(format!("mesh side must be >= 2, got {n}")));
    }
    let size = n * n;
    let mut m = DMatrix::<f64>::zeros(size, size);
    for (p, nb) in neighbor_table(topology, n).iter().enumerate() {
        for &q in nb {
            m[(p, q)] += 0.25;
        }
    }
    let rho = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.abs()));

    // project out the constant direction: P M P with P = I - 11^T / size
    let mut proj = DMatrix::<f64>::identity(size, size);
    proj.add_scalar_mut(-1.0 / size as f64);
    let restricted = &proj * m * &proj;
    let rho_zero_mean = SymmetricEigen::new(restricted)
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.abs()));
    Ok((rho, rho_zero_mean))
}

//! Radial grids and moment integrals for isotropic distributions.
//!
//! Every distribution in this crate depends on the momentum only through
//! `r = |v|`, so integrals over momentum space reduce to
//! `∫ g(|v|) dv = 4π ∫₀^∞ g(r) r² dr`. A [`RadialGrid`] carries nodes and
//! plain-measure weights for `∫₀^∞ · dr`; the `r²` factor is applied by
//! [`DistributionState::moments`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest node count supported by the exponentially-weighted rule. Beyond
/// this the smallest weights underflow.
pub const MAX_LAGUERRE_NODES: usize = 160;

/// Points per panel of the uniform rule.
pub const UNIFORM_PANEL_POINTS: usize = 4;

const EXPONENTIAL_TOLERANCE: f64 = 1e-12;
const UNIFORM_TOLERANCE: f64 = 1e-8;

// 4-point Gauss-Legendre rule on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_2,
    0.652_145_154_862_546_2,
    0.347_854_845_137_453_8,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Gauss-Laguerre nodes for the weight `e^{-r}` on `(0, ∞)`.
    Exponential,
    /// Equal-width panels on `(0, r_max]`, each integrated with a 4-point
    /// Gauss-Legendre rule. The tail beyond `r_max` is dropped.
    Uniform,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleKind::Exponential => f.write_str("exponential"),
            RuleKind::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for RuleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exponential" | "laguerre" => Ok(RuleKind::Exponential),
            "uniform" => Ok(RuleKind::Uniform),
            other => Err(format!(
                "unknown grid rule `{other}` (expected exponential|uniform)"
            )),
        }
    }
}

/// Quadrature nodes and weights on `r ∈ (0, ∞)`.
///
/// `integrate(g) = Σ wᵢ g(rᵢ) ≈ ∫₀^∞ g(r) dr`. Nodes are strictly increasing
/// and positive, weights positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    rule: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: Option<f64>,
    tolerance: f64,
}

impl RadialGrid {
    /// Builds a grid of `n_nodes` points.
    ///
    /// `r_max` is required for [`RuleKind::Uniform`] and ignored otherwise.
    /// The uniform rule needs `n_nodes` to be a multiple of
    /// [`UNIFORM_PANEL_POINTS`].
    pub fn new(rule: RuleKind, n_nodes: usize, r_max: Option<f64>) -> Result<Self> {
        if n_nodes < 4 {
            return Err(Error::InvalidNodeCount {
                rule,
                n: n_nodes,
                reason: "at least 4 nodes are required",
            });
        }
        let (nodes, weights, r_max) = match rule {
            RuleKind::Exponential => {
                if n_nodes > MAX_LAGUERRE_NODES {
                    return Err(Error::InvalidNodeCount {
                        rule,
                        n: n_nodes,
                        reason: "at most 160 nodes are supported",
                    });
                }
                let (x, w) = gauss_laguerre(n_nodes);
                (x, w, None)
            }
            RuleKind::Uniform => {
                let r_max = r_max.ok_or(Error::MissingCutoff)?;
                if !(r_max.is_finite() && r_max > 0.0) {
                    return Err(Error::NonPositiveCutoff(r_max));
                }
                if !n_nodes.is_multiple_of(UNIFORM_PANEL_POINTS) {
                    return Err(Error::InvalidNodeCount {
                        rule,
                        n: n_nodes,
                        reason: "node count must be a multiple of 4",
                    });
                }
                let (x, w) = composite_legendre(n_nodes / UNIFORM_PANEL_POINTS, r_max);
                (x, w, Some(r_max))
            }
        };

        let mut grid = RadialGrid {
            rule,
            nodes,
            weights,
            r_max,
            tolerance: 0.0,
        };
        grid.tolerance = grid.declared_tolerance();
        Ok(grid)
    }

    /// The default grid: 64 exponentially-weighted nodes.
    pub fn default_grid() -> Self {
        RadialGrid::new(RuleKind::Exponential, 64, None).expect("default grid is valid")
    }

    pub fn rule(&self) -> RuleKind {
        self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> Option<f64> {
        self.r_max
    }

    /// Relative accuracy this grid promises for moment integrals of smooth,
    /// exponentially decaying integrands.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `Σ wᵢ g(rᵢ)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * g(r))
            .sum()
    }

    /// Relative error of the grid on `∫ r² e^{-r} dr = 2` and
    /// `∫ r³ e^{-r} dr = 6`, whichever is larger.
    pub fn gamma_check(&self) -> f64 {
        let i2 = self.integrate(|r| r * r * (-r).exp());
        let i3 = self.integrate(|r| r * r * r * (-r).exp());
        ((i2 - 2.0).abs() / 2.0).max((i3 - 6.0).abs() / 6.0)
    }

    fn declared_tolerance(&self) -> f64 {
        let measured = self.gamma_check();
        match self.rule {
            RuleKind::Exponential => EXPONENTIAL_TOLERANCE.max(10.0 * measured),
            RuleKind::Uniform => {
                let r_max = self.r_max.unwrap_or(0.0);
                if self.len() >= 400 && r_max >= 40.0 {
                    UNIFORM_TOLERANCE
                } else {
                    UNIFORM_TOLERANCE.max(10.0 * measured)
                }
            }
        }
    }
}

/// Gauss-Laguerre nodes with plain-measure weights `wᵢ e^{xᵢ}`, so that
/// `Σ wᵢ g(xᵢ) ≈ ∫₀^∞ g`.
fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0_f64;
    for i in 0..n {
        // Asymptotic starting guesses for the i-th root.
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut deriv = 0.0;
        let mut prev = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = laguerre_pair(n, z);
            deriv = (nf * p - nf * p_prev) / z;
            prev = p_prev;
            let dz = p / deriv;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        // Polish once more at the converged root.
        let (p, p_prev) = laguerre_pair(n, z);
        if p != 0.0 {
            deriv = (nf * p - nf * p_prev) / z;
            prev = p_prev;
        }
        x[i] = z;
        w[i] = -z.exp() / (deriv * nf * prev);
    }
    (x, w)
}

/// `(L_n(z), L_{n-1}(z))` by the three-term recurrence.
fn laguerre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

fn composite_legendre(panels: usize, r_max: f64) -> (Vec<f64>, Vec<f64>) {
    let h = r_max / panels as f64;
    let mut nodes = Vec::with_capacity(panels * UNIFORM_PANEL_POINTS);
    let mut weights = Vec::with_capacity(panels * UNIFORM_PANEL_POINTS);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Covariant number and energy moments, `ρ = ∫F dv` and `E = ∫|v| F dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub rho: f64,
    pub energy: f64,
}

impl MomentPair {
    pub fn new(rho: f64, energy: f64) -> Self {
        MomentPair { rho, energy }
    }

    pub fn is_positive(&self) -> bool {
        self.rho > 0.0 && self.energy > 0.0 && self.rho.is_finite() && self.energy.is_finite()
    }

    /// `T = E / (3ρ)`.
    pub fn temperature(&self) -> Result<f64> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::NonPositiveMoments {
                rho: self.rho,
                energy: self.energy,
            });
        }
        Ok(self.energy / (3.0 * self.rho))
    }

    /// `ρ / (3T)³ = ρ⁴ / E³`, the quantity that selects the Bose-Einstein
    /// fugacity.
    pub fn degeneracy_ratio(&self) -> Result<f64> {
        if !self.is_positive() {
            return Err(Error::NonPositiveMoments {
                rho: self.rho,
                energy: self.energy,
            });
        }
        let x = self.rho / self.energy;
        Ok(self.rho * x * x * x)
    }

    /// Largest relative deviation of either component from `other`.
    pub fn relative_deviation(&self, other: &MomentPair) -> f64 {
        let dr = (self.rho - other.rho).abs() / other.rho.abs();
        let de = (self.energy - other.energy).abs() / other.energy.abs();
        dr.max(de)
    }
}

/// Node samples of an isotropic distribution at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    time: f64,
}

impl DistributionState {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidTime(time));
        }
        Ok(DistributionState { grid, values, time })
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F, time: f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        DistributionState::new(grid, values, time)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        DistributionState {
            grid,
            values,
            time: 0.0,
        }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<RadialGrid>, values: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        DistributionState { grid, values, time }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn same_grid(&self, other: &DistributionState) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// Multiplies every sample by `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| s * v).collect();
        DistributionState::new(self.grid.clone(), values, self.time)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `max_i |F_i - G_i|`.
    pub fn linf_distance(&self, other: &DistributionState) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `ρ = 4π Σ wᵢ rᵢ² Fᵢ` and `E = 4π Σ wᵢ rᵢ³ Fᵢ`.
    pub fn moments(&self) -> MomentPair {
        let mut rho = 0.0;
        let mut energy = 0.0;
        for ((&r, &w), &f) in self
            .grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
        {
            let a = w * r * r * f;
            rho += a;
            energy += a * r;
        }
        MomentPair {
            rho: 4.0 * PI * rho,
            energy: 4.0 * PI * energy,
        }
    }
}

/// Result of [`moment_match`]: `F₀(r) = amplitude · G(scale · r)`.
#[derive(Debug, Clone)]
pub struct MomentMatch {
    pub state: DistributionState,
    pub amplitude: f64,
    pub scale: f64,
}

/// Rescales a template profile `G` to `F₀(r) = α G(λ r)` so that the grid
/// moments of `F₀` equal `target`.
///
/// `(α, λ)` start from the closed-form scaling laws `ρ ↦ α λ⁻³ ρ`,
/// `E ↦ α λ⁻⁴ E`; a few fixed-point passes then absorb the small departure
/// of the discrete moments from exact scaling.
pub fn moment_match<G>(
    grid: &Arc<RadialGrid>,
    template: G,
    target: MomentPair,
) -> Result<MomentMatch>
where
    G: Fn(f64) -> f64,
{
    if !target.is_positive() {
        return Err(Error::NonPositiveMoments {
            rho: target.rho,
            energy: target.energy,
        });
    }
    let base = DistributionState::from_fn(grid.clone(), &template, 0.0)?;
    if base.is_zero() {
        return Err(Error::ZeroTemplate);
    }
    let m = base.moments();
    if !m.is_positive() {
        return Err(Error::ZeroTemplate);
    }

    let target_ratio = target.energy / target.rho;
    let mut scale = (m.energy / m.rho) / target_ratio;
    let mut shaped = base;
    for _ in 0..8 {
        if scale != 1.0 {
            shaped = DistributionState::from_fn(grid.clone(), |r| template(scale * r), 0.0)?;
        }
        let ms = shaped.moments();
        if !ms.is_positive() {
            return Err(Error::ZeroTemplate);
        }
        let correction = (ms.energy / ms.rho) / target_ratio;
        if (correction - 1.0).abs() <= 4.0 * f64::EPSILON {
            break;
        }
        scale *= correction;
    }
    let rho_shaped = shaped.moments().rho;
    let amplitude = target.rho / rho_shaped;
    let state = shaped.scaled(amplitude)?;
    Ok(MomentMatch {
        state,
        amplitude,
        scale,
    })
}

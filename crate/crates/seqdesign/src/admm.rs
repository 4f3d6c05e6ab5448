//! Consensus ℓp-box ADMM engine.
//!
//! The binary design problem is relaxed to a consensus problem: two global
//! copies X₁ ∈ box, X₂ ∈ ℓp-sphere are tied to one local copy Z_o per
//! pair-lag term through the perturbed constraint A·Z_o + σ·Ẑ_o = X̄ with
//! X̄ = [X₁; X₂] and A = [I; I]. Each iteration runs three closed-form steps:
//!
//!   S.1  X̄  ← projections of the ρ-weighted average of (ĀZ̄_o − Λ_o/ρ_o);
//!   S.2  per o: Ẑ_o from its exact quadratic minimizer, then Z_o from the
//!        minimizer of the majorized surrogate built at the averaged design
//!        point X = AᵀX̄/2 (weights follow the q-power max-smoothing);
//!   S.3  per o: dual ascent Λ_o ← Λ_o + ρ_o(X̄ − ĀZ̄_o).
//!
//! Stacked 2N×M quantities are stored as separate top/bottom N×M blocks; all
//! cross-term reductions run in the fixed lexicographic order of the index
//! set so results are reproducible regardless of how callers parallelize.

use crate::correlation::{correlate, sidelobe_metrics, SidelobeMetrics};
use crate::error::Error;
use crate::gradient::{add_scaled_grad_f_squared, grad_f_squared, LipschitzParams};
use crate::projection::{project_box_mut, project_lp_sphere_mut};
use crate::types::{
    enumerate_index_set, CorrelationMode, DesignTarget, PairLagIndex, SequenceSet, ShiftSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhoRule {
    /// ρ_o = 8·L_o, the constant envelope of the 8·w_o·L_o sufficient-decrease
    /// condition (valid for every weight since w_o <= 1).
    Auto,
    /// One fixed value for every o.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// X₂ is projected onto the ℓp-sphere (the full algorithm).
    LpBox,
    /// X₂ is box-projected like X₁ (the plain box relaxation baseline).
    BoxOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightRefresh {
    /// Recompute the q-power weights from the current Z_o every iteration.
    EveryIter,
    /// Keep the initial unit weights; matches the constant-weight setting of
    /// the monotonicity assertions.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmmConfig {
    /// Sphere exponent (> 0). The default 2 makes the projection a rescale.
    pub p: f64,
    /// Max-smoothing exponent (integer > 2); the weights use power q−2.
    pub q: u32,
    /// Perturbation scale σ > 0 of the slack variable.
    pub sigma: f64,
    pub rho_rule: RhoRule,
    pub max_iters: usize,
    /// Termination threshold on R + D.
    pub tol: f64,
    pub seed: u64,
    pub variant: Variant,
    pub weight_refresh: WeightRefresh,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: 6,
            sigma: 1e-2,
            rho_rule: RhoRule::Fixed(0.125),
            max_iters: 500,
            tol: 1e-3,
            seed: 0,
            variant: Variant::LpBox,
            weight_refresh: WeightRefresh::EveryIter,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !self.p.is_finite() || self.p <= 0.0 {
            return Err(Error::Config(format!("sphere exponent p={} must be > 0", self.p)));
        }
        if self.q <= 2 {
            return Err(Error::Config(format!("smoothing exponent q={} must be > 2", self.q)));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Config(format!("sigma={} must be > 0", self.sigma)));
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::Config(format!("tol={} must be > 0", self.tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if let RhoRule::Fixed(v) = self.rho_rule {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Config(format!("fixed rho={v} must be > 0")));
            }
        }
        Ok(())
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Max-form objective of the sign-quantized design point.
    pub objective: f64,
    pub isl: f64,
    pub psl: f64,
    /// R = Σ_o ‖X − Z_o‖_F² with X the averaged design point.
    pub primal_residual: f64,
    /// D = Σ_o ‖Z_o − Z_o^prev‖_F².
    pub dual_residual: f64,
    pub lagrangian: f64,
    /// max_o ‖X̄ − ĀZ̄_o‖_F.
    pub violation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotMetrics {
    pub objective: f64,
    pub isl: f64,
    pub psl: f64,
    pub islr_db: f64,
    pub pslr_db: f64,
}

impl SnapshotMetrics {
    fn of(x: &SequenceSet, shift: &ShiftSpec) -> Self {
        let m = sidelobe_metrics(x, shift);
        Self {
            objective: m.objective,
            isl: m.isl,
            psl: m.psl,
            islr_db: crate::correlation::islr_db_from(m.isl, x.n_len(), x.m_count()),
            pslr_db: crate::correlation::pslr_db_from(m.psl, x.n_len(), x.m_count()),
        }
    }
}

/// Full result of one solver run: per-iteration trace, before/after metrics,
/// and the binary output set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n_len: usize,
    pub m_count: usize,
    pub mode: CorrelationMode,
    pub intervals: Vec<(usize, usize)>,
    pub config: AdmmConfig,
    pub status: TerminationStatus,
    pub iterations: usize,
    pub c_bound: f64,
    pub lipschitz: f64,
    pub initial: SnapshotMetrics,
    #[serde(rename = "final")]
    pub final_metrics: SnapshotMetrics,
    pub sequences: SequenceSet,
    pub trace: Vec<IterationRecord>,
}

/// R = Σ_o ‖x − z_o‖_F² over flat column-major buffers.
pub fn primal_residual_sum(x: &[f64], zs: &[Vec<f64>]) -> f64 {
    zs.iter()
        .map(|z| x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum()
}

/// Normalized q-power weights w_o = (f_o / max f)^{q−2} in [0, 1]; all-zero
/// residuals give unit weights (the objective is already zero).
pub fn weights_from_residuals(f: &[f64], q: u32) -> Vec<f64> {
    let fmax = f.iter().cloned().fold(0.0f64, f64::max);
    if fmax <= 0.0 {
        return vec![1.0; f.len()];
    }
    let e = (q - 2) as i32;
    f.iter().map(|&fo| (fo / fmax).powi(e)).collect()
}

/// D = Σ_o ‖z_o − z_o'‖_F² between two per-term snapshots.
pub fn dual_residual_sum(prev: &[Vec<f64>], next: &[Vec<f64>]) -> f64 {
    prev.iter()
        .zip(next)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The consensus solver. Single-owner: one instance per run; concurrent runs
/// use separate instances.
pub struct Solver {
    n: usize,
    m: usize,
    shift: ShiftSpec,
    target: DesignTarget,
    index_set: Vec<PairLagIndex>,
    config: AdmmConfig,
    lip: LipschitzParams,
    rng: ChaCha8Rng,
    iter: usize,
    // Global copies (N×M column-major blocks of the stacked X̄).
    x1: Vec<f64>,
    x2: Vec<f64>,
    /// Averaged design point Aᵀ·X̄/2, refreshed after every x-update.
    design: SequenceSet,
    // Per-term state, indexed like `index_set`.
    z: Vec<Vec<f64>>,
    z_hat1: Vec<Vec<f64>>,
    z_hat2: Vec<Vec<f64>>,
    lambda1: Vec<Vec<f64>>,
    lambda2: Vec<Vec<f64>>,
    rho: Vec<f64>,
    weights: Vec<f64>,
}

impl Solver {
    /// Initializes per the standard scheme: X₁ = X₂ = seeded random ±1,
    /// Z_o = X-init and Ẑ_o = 0 (so ĀZ̄_o = X̄ exactly), duals uniform in
    /// [-1, 1], unit weights, penalties from the rho rule.
    pub fn new(
        n: usize,
        m: usize,
        shift: &ShiftSpec,
        config: AdmmConfig,
    ) -> Result<Self, Error> {
        config.validate()?;
        if n < 2 {
            return Err(Error::Config(format!("sequence length N={n} must be >= 2")));
        }
        if m < 1 {
            return Err(Error::Config("sequence count M must be >= 1".into()));
        }
        if shift.ranges().last().map(|&(_, b)| b >= n) == Some(true) {
            return Err(Error::Config("shift set exceeds the lag bound N-1".into()));
        }
        let nm = n * m;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let x_init: Vec<f64> =
            (0..nm).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let index_set = enumerate_index_set(m, shift);
        let count = index_set.len();

        let mut lambda1 = Vec::with_capacity(count);
        let mut lambda2 = Vec::with_capacity(count);
        for _ in 0..count {
            lambda1.push((0..nm).map(|_| rng.gen_range(-1.0..1.0)).collect());
            lambda2.push((0..nm).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }

        // The iterate bound: X₂ starts binary, so c = 1 unless a custom init
        // ever exceeds the box.
        let c = x_init.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let lip = LipschitzParams::new(n, c);
        let weights: Vec<f64> = vec![1.0; count];
        let rho: Vec<f64> = weights
            .iter()
            .map(|_| match config.rho_rule {
                RhoRule::Auto => 8.0 * lip.bound,
                RhoRule::Fixed(v) => v,
            })
            .collect();

        let design = SequenceSet::new(n, m, x_init.clone())?;
        Ok(Self {
            n,
            m,
            shift: shift.clone(),
            target: DesignTarget::new(n),
            index_set,
            config,
            lip,
            rng,
            iter: 0,
            x1: x_init.clone(),
            x2: x_init.clone(),
            design,
            z: vec![x_init; count],
            z_hat1: vec![vec![0.0; nm]; count],
            z_hat2: vec![vec![0.0; nm]; count],
            lambda1,
            lambda2,
            rho,
            weights,
        })
    }

    pub fn index_set(&self) -> &[PairLagIndex] {
        &self.index_set
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lip.bound
    }

    pub fn c_bound(&self) -> f64 {
        self.lip.c_hat
    }

    pub fn iteration(&self) -> usize {
        self.iter
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn z(&self, o: usize) -> &[f64] {
        &self.z[o]
    }

    pub fn z_hat(&self, o: usize) -> (&[f64], &[f64]) {
        (&self.z_hat1[o], &self.z_hat2[o])
    }

    pub fn lambda(&self, o: usize) -> (&[f64], &[f64]) {
        (&self.lambda1[o], &self.lambda2[o])
    }

    /// The averaged design point Aᵀ·X̄/2 as a sequence set.
    pub fn design_point(&self) -> &SequenceSet {
        &self.design
    }

    #[doc(hidden)]
    pub fn zero_duals(&mut self) {
        for o in 0..self.index_set.len() {
            self.lambda1[o].iter_mut().for_each(|v| *v = 0.0);
            self.lambda2[o].iter_mut().for_each(|v| *v = 0.0);
        }
    }

    fn refresh_design(&mut self) {
        let n = self.n;
        for col in 0..self.m {
            let x1 = &self.x1[col * n..(col + 1) * n];
            let x2 = &self.x2[col * n..(col + 1) * n];
            let dst = self.design.column_mut(col);
            for k in 0..n {
                dst[k] = 0.5 * (x1[k] + x2[k]);
            }
        }
    }

    /// S.1: blockwise averaged solution of the X̄ subproblem, then the box and
    /// sphere projections. Errors out on non-finite intermediates rather than
    /// letting the clamp mask them.
    pub fn x_update(&mut self) -> Result<(), Error> {
        let nm = self.n * self.m;
        let sigma = self.config.sigma;
        let mut acc1 = vec![0.0; nm];
        let mut acc2 = vec![0.0; nm];
        let mut rho_sum = 0.0;
        // Fixed lexicographic reduction order.
        for o in 0..self.index_set.len() {
            let rho = self.rho[o];
            rho_sum += rho;
            let (z, zh1, zh2) = (&self.z[o], &self.z_hat1[o], &self.z_hat2[o]);
            let (l1, l2) = (&self.lambda1[o], &self.lambda2[o]);
            for e in 0..nm {
                acc1[e] += rho * (z[e] + sigma * zh1[e]) - l1[e];
                acc2[e] += rho * (z[e] + sigma * zh2[e]) - l2[e];
            }
        }
        let inv = 1.0 / rho_sum;
        for e in 0..nm {
            acc1[e] *= inv;
            acc2[e] *= inv;
        }
        if !acc1.iter().chain(acc2.iter()).all(|v| v.is_finite()) {
            return Err(Error::Divergence { iteration: self.iter });
        }
        project_box_mut(&mut acc1);
        self.x1 = acc1;
        match self.config.variant {
            Variant::BoxOnly => project_box_mut(&mut acc2),
            Variant::LpBox => {
                if project_lp_sphere_mut(&mut acc2, self.config.p).is_err() {
                    // Measure-zero event: restart the sphere copy from a
                    // seeded random binary point instead of dying mid-run.
                    log::warn!("zero input to the sphere projection; substituting random ±1");
                    for v in acc2.iter_mut() {
                        *v = if self.rng.gen::<bool>() { 1.0 } else { -1.0 };
                    }
                }
            }
        }
        self.x2 = acc2;
        self.refresh_design();
        Ok(())
    }

    /// f_o evaluated at each term's own local copy Z_o.
    fn residuals_at_z(&self) -> Vec<f64> {
        self.index_set
            .iter()
            .enumerate()
            .map(|(oi, o)| {
                let z = &self.z[oi];
                let (xi, xj) = (&z[o.i * self.n..(o.i + 1) * self.n], &z[o.j * self.n..(o.j + 1) * self.n]);
                (crate::correlation::correlate_columns(xi, xj, o.lag, self.shift.mode())
                    - self.target.value(o))
                .abs()
            })
            .collect()
    }

    /// Residuals f_o at the current design point, in index-set order.
    fn residuals_at_design(&self) -> Vec<f64> {
        let mode = self.shift.mode();
        self.index_set
            .iter()
            .map(|o| (correlate(&self.design, o.i, o.j, o.lag, mode) - self.target.value(o)).abs())
            .collect()
    }

    /// Normalized q-power weights from the residuals at the current averaged
    /// design point (the same point the surrogate linearizes at); all-zero
    /// residuals yield unit weights. The penalties are left untouched.
    pub fn compute_weights(&mut self) {
        let f = self.residuals_at_design();
        self.weights = weights_from_residuals(&f, self.config.q);
    }

    /// S.2 for every o, in the given processing order (the result does not
    /// depend on the order: terms are independent).
    fn z_update_ordered(&mut self, order: &[usize]) {
        let nm = self.n * self.m;
        let sigma = self.config.sigma;
        let l_bound = self.lip.bound;
        for &oi in order {
            let o = self.index_set[oi];
            let rho = self.rho[oi];
            let w = self.weights[oi];
            // Exact minimizer of the slack subproblem.
            let hat_scale = 1.0 / ((rho + 1.0) * sigma);
            {
                let z = &self.z[oi];
                let zh1 = &mut self.z_hat1[oi];
                let zh2 = &mut self.z_hat2[oi];
                let (l1, l2) = (&self.lambda1[oi], &self.lambda2[oi]);
                for e in 0..nm {
                    zh1[e] = (l1[e] + rho * (self.x1[e] - z[e])) * hat_scale;
                    zh2[e] = (l2[e] + rho * (self.x2[e] - z[e])) * hat_scale;
                }
            }
            let denom = 2.0 * rho + w * l_bound;
            let inv_denom = 1.0 / denom;
            {
                let z = &mut self.z[oi];
                let (zh1, zh2) = (&self.z_hat1[oi], &self.z_hat2[oi]);
                let (l1, l2) = (&self.lambda1[oi], &self.lambda2[oi]);
                let x_local = self.design.data();
                for e in 0..nm {
                    let numer = (l1[e] - rho * sigma * zh1[e]) + (l2[e] - rho * sigma * zh2[e]);
                    z[e] = x_local[e] + numer * inv_denom;
                }
            }
            add_scaled_grad_f_squared(
                &self.design,
                &o,
                &self.target,
                self.shift.mode(),
                -w * inv_denom,
                &mut self.z[oi],
            );
        }
    }

    /// S.2: perturbation variables from their exact minimizer, then each Z_o
    /// from the minimizer of the majorized surrogate at the design point.
    pub fn z_update(&mut self) {
        let order: Vec<usize> = (0..self.index_set.len()).collect();
        self.z_update_ordered(&order);
    }

    #[doc(hidden)]
    pub fn z_update_with_order(&mut self, order: &[usize]) {
        self.z_update_ordered(order);
    }

    /// S.3: Λ_o ← Λ_o + ρ_o(X̄ − ĀZ̄_o) for every o independently.
    pub fn dual_update(&mut self) {
        let nm = self.n * self.m;
        let sigma = self.config.sigma;
        for oi in 0..self.index_set.len() {
            let rho = self.rho[oi];
            let z = &self.z[oi];
            let (zh1, zh2) = (&self.z_hat1[oi], &self.z_hat2[oi]);
            let l1 = &mut self.lambda1[oi];
            let l2 = &mut self.lambda2[oi];
            for e in 0..nm {
                l1[e] += rho * (self.x1[e] - z[e] - sigma * zh1[e]);
                l2[e] += rho * (self.x2[e] - z[e] - sigma * zh2[e]);
            }
        }
    }

    /// ‖X̄ − ĀZ̄_o‖_F for one term.
    pub fn constraint_violation(&self, oi: usize) -> f64 {
        let sigma = self.config.sigma;
        let z = &self.z[oi];
        let (zh1, zh2) = (&self.z_hat1[oi], &self.z_hat2[oi]);
        let mut acc = 0.0;
        for e in 0..z.len() {
            let d1 = self.x1[e] - z[e] - sigma * zh1[e];
            let d2 = self.x2[e] - z[e] - sigma * zh2[e];
            acc += d1 * d1 + d2 * d2;
        }
        acc.sqrt()
    }

    /// ‖X̄ − A·Z_o‖_F, the gap to the unperturbed constraint.
    pub fn unperturbed_gap(&self, oi: usize) -> f64 {
        let mut acc = 0.0;
        for (e, &zv) in self.z[oi].iter().enumerate() {
            let d1 = self.x1[e] - zv;
            let d2 = self.x2[e] - zv;
            acc += d1 * d1 + d2 * d2;
        }
        acc.sqrt()
    }

    /// The smoothed augmented Lagrangian
    /// Σ_o [w_o f_o²(Z_o) + (σ²/2)‖Ẑ_o‖_F² + ⟨Λ_o, X̄−ĀZ̄_o⟩ + (ρ_o/2)‖X̄−ĀZ̄_o‖_F²].
    pub fn lagrangian(&self) -> f64 {
        let sigma = self.config.sigma;
        let f = self.residuals_at_z();
        let mut total = 0.0;
        for (oi, fo) in f.iter().enumerate() {
            let z = &self.z[oi];
            let (zh1, zh2) = (&self.z_hat1[oi], &self.z_hat2[oi]);
            let (l1, l2) = (&self.lambda1[oi], &self.lambda2[oi]);
            let mut hat_sq = 0.0;
            let mut inner = 0.0;
            let mut vio_sq = 0.0;
            for e in 0..z.len() {
                let d1 = self.x1[e] - z[e] - sigma * zh1[e];
                let d2 = self.x2[e] - z[e] - sigma * zh2[e];
                hat_sq += zh1[e] * zh1[e] + zh2[e] * zh2[e];
                inner += l1[e] * d1 + l2[e] * d2;
                vio_sq += d1 * d1 + d2 * d2;
            }
            total += self.weights[oi] * fo * fo
                + 0.5 * sigma * sigma * hat_sq
                + inner
                + 0.5 * self.rho[oi] * vio_sq;
        }
        total
    }

    /// Value of the majorized surrogate 𝒰_o at a candidate Z, holding the
    /// current X̄, Ẑ_o and Λ_o fixed. The z-update is its exact minimizer.
    pub fn surrogate_value(&self, oi: usize, z_cand: &[f64]) -> f64 {
        let o = self.index_set[oi];
        let (rho, w) = (self.rho[oi], self.weights[oi]);
        let sigma = self.config.sigma;
        let x_local = self.design.data();
        let f0 = {
            let d = correlate(&self.design, o.i, o.j, o.lag, self.shift.mode())
                - self.target.value(&o);
            d * d
        };
        let grad = grad_f_squared(&self.design, &o, &self.target, self.shift.mode());
        let diff: Vec<f64> = z_cand.iter().zip(x_local).map(|(a, b)| a - b).collect();
        let lin = dot(&grad, &diff);
        let prox = diff.iter().map(|d| d * d).sum::<f64>();
        let (zh1, zh2) = (&self.z_hat1[oi], &self.z_hat2[oi]);
        let (l1, l2) = (&self.lambda1[oi], &self.lambda2[oi]);
        let mut inner = 0.0;
        let mut vio_sq = 0.0;
        let mut hat_sq = 0.0;
        for e in 0..z_cand.len() {
            let d1 = self.x1[e] - z_cand[e] - sigma * zh1[e];
            let d2 = self.x2[e] - z_cand[e] - sigma * zh2[e];
            inner += l1[e] * d1 + l2[e] * d2;
            vio_sq += d1 * d1 + d2 * d2;
            hat_sq += zh1[e] * zh1[e] + zh2[e] * zh2[e];
        }
        w * (f0 + lin) + 0.5 * w * self.lip.bound * prox
            + inner
            + 0.5 * rho * vio_sq
            + 0.5 * sigma * sigma * hat_sq
    }

    /// One full iteration (S.1–S.3). Returns the trace record, or an error if
    /// the state went non-finite.
    pub fn step(&mut self) -> Result<IterationRecord, Error> {
        self.iter += 1;
        self.x_update()?;
        if self.config.weight_refresh == WeightRefresh::EveryIter {
            self.compute_weights();
        }
        let z_prev = self.z.clone();
        self.z_update();
        self.dual_update();

        let r = primal_residual_sum(self.design.data(), &self.z);
        let d = dual_residual_sum(&z_prev, &self.z);
        let violation = (0..self.index_set.len())
            .map(|oi| self.constraint_violation(oi))
            .fold(0.0f64, f64::max);
        let lagrangian = self.lagrangian();
        let quantized = self.design.sign_quantized();
        let SidelobeMetrics { psl, isl, objective } = sidelobe_metrics(&quantized, &self.shift);
        let record = IterationRecord {
            k: self.iter,
            objective,
            isl,
            psl,
            primal_residual: r,
            dual_residual: d,
            lagrangian,
            violation,
        };
        let finite = r.is_finite()
            && d.is_finite()
            && violation.is_finite()
            && lagrangian.is_finite()
            && objective.is_finite();
        if finite {
            Ok(record)
        } else {
            Err(Error::Divergence { iteration: self.iter })
        }
    }

    /// Runs the loop to termination: R + D ≤ tol, the iteration cap, or a
    /// divergence abort (status records which; a diverged run keeps its
    /// partial trace).
    pub fn run(mut self) -> RunReport {
        let initial = SnapshotMetrics::of(&self.design, &self.shift);
        let mut trace = Vec::new();
        let mut status = TerminationStatus::MaxIterations;
        while self.iter < self.config.max_iters {
            match self.step() {
                Ok(record) => {
                    let done = record.primal_residual + record.dual_residual <= self.config.tol;
                    trace.push(record);
                    if done {
                        status = TerminationStatus::Converged;
                        break;
                    }
                }
                Err(_) => {
                    status = TerminationStatus::Diverged;
                    break;
                }
            }
        }
        let sequences = self.design.sign_quantized();
        let final_metrics = SnapshotMetrics::of(&sequences, &self.shift);
        RunReport {
            n_len: self.n,
            m_count: self.m,
            mode: self.shift.mode(),
            intervals: self.shift.ranges().to_vec(),
            config: self.config,
            status,
            iterations: self.iter,
            c_bound: self.lip.c_hat,
            lipschitz: self.lip.bound,
            initial,
            final_metrics,
            sequences,
            trace,
        }
    }
}

/// Builds a solver and runs it to termination.
pub fn solve(
    n: usize,
    m: usize,
    shift: &ShiftSpec,
    config: AdmmConfig,
) -> Result<RunReport, Error> {
    Ok(Solver::new(n, m, shift, config)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn spec(n: usize) -> ShiftSpec {
        ShiftSpec::sidelobes(CorrelationMode::Aperiodic, n)
    }

    #[test]
    fn config_validation() {
        assert!(AdmmConfig::default().validate().is_ok());
        assert!(AdmmConfig { q: 2, ..Default::default() }.validate().is_err());
        assert!(AdmmConfig { sigma: 0.0, ..Default::default() }.validate().is_err());
        assert!(AdmmConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(AdmmConfig { max_iters: 0, ..Default::default() }.validate().is_err());
        assert!(
            AdmmConfig { rho_rule: RhoRule::Fixed(0.0), ..Default::default() }
                .validate()
                .is_err()
        );
    }

    #[test]
    fn init_satisfies_the_perturbed_constraint_exactly() {
        let solver = Solver::new(16, 2, &spec(16), AdmmConfig::default()).unwrap();
        for oi in 0..solver.index_set().len() {
            assert_eq!(solver.constraint_violation(oi), 0.0);
        }
        assert_eq!(solver.weights().iter().copied().fold(f64::MAX, f64::min), 1.0);
    }

    #[test]
    fn init_is_seed_deterministic() {
        let a = Solver::new(12, 1, &spec(12), AdmmConfig { seed: 9, ..Default::default() });
        let b = Solver::new(12, 1, &spec(12), AdmmConfig { seed: 9, ..Default::default() });
        let (a, b) = (a.unwrap(), b.unwrap());
        assert_eq!(a.x1(), b.x1());
        assert_eq!(a.x2(), b.x2());
        for oi in 0..a.index_set().len() {
            assert_eq!(a.lambda(oi), b.lambda(oi));
            assert_eq!(a.z(oi), b.z(oi));
        }
    }

    #[test]
    fn auto_rho_from_the_lipschitz_rule() {
        // N = 10, c = 1, w = 1: L = 22, rho = 176.
        let config = AdmmConfig { rho_rule: RhoRule::Auto, ..Default::default() };
        let solver = Solver::new(10, 1, &spec(10), config).unwrap();
        assert_eq!(solver.lipschitz_bound(), 22.0);
        assert!(solver.rho().iter().all(|&r| r == 176.0));
    }

    #[test]
    fn x_update_single_term_identity() {
        // Single o, rho = 1, lambda = 0: the averaged solution is exactly
        // A·Z̄_o, and at a binary consensus point the projections fix it.
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 1)], 6).unwrap();
        let config = AdmmConfig {
            rho_rule: RhoRule::Fixed(1.0),
            seed: 3,
            ..Default::default()
        };
        let mut solver = Solver::new(6, 1, &shift, config).unwrap();
        solver.zero_duals();
        let before = (solver.x1().to_vec(), solver.x2().to_vec());
        solver.x_update().unwrap();
        assert_eq!(solver.x1(), &before.0[..]);
        assert_eq!(solver.x2(), &before.1[..]);
    }

    #[test]
    fn x_update_is_the_rho_weighted_mean() {
        // Verified against the minimum property of the quadratic: random
        // perturbations never decrease the objective of the X̄ subproblem.
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 3)], 8).unwrap();
        let mut solver = Solver::new(8, 1, &shift, AdmmConfig { seed: 5, ..Default::default() })
            .unwrap();
        // Desynchronize the state so the subproblem is non-trivial.
        solver.x_update().unwrap();
        solver.z_update();
        solver.dual_update();
        solver.x_update().unwrap();

        let count = solver.index_set().len();
        let nm = 8;
        let sigma = solver.config.sigma;
        let objective = |x1: &[f64], x2: &[f64]| -> f64 {
            let mut total = 0.0;
            for oi in 0..count {
                let z = solver.z(oi);
                let (zh1, zh2) = solver.z_hat(oi);
                let (l1, l2) = solver.lambda(oi);
                let rho = solver.rho()[oi];
                for e in 0..nm {
                    let d1 = x1[e] - z[e] - sigma * zh1[e];
                    let d2 = x2[e] - z[e] - sigma * zh2[e];
                    total += l1[e] * d1 + l2[e] * d2 + 0.5 * rho * (d1 * d1 + d2 * d2);
                }
            }
            total
        };
        let base = objective(solver.x1(), solver.x2());
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            // Feasible perturbations: stay in the box / on the sphere.
            let mut x1: Vec<f64> = solver
                .x1()
                .iter()
                .map(|&v| (v + rng.gen_range(-1e-3..1e-3)).clamp(-1.0, 1.0))
                .collect();
            let mut x2: Vec<f64> =
                solver.x2().iter().map(|&v| v + rng.gen_range(-1e-3..1e-3)).collect();
            crate::projection::project_box_mut(&mut x1);
            crate::projection::project_lp_sphere_mut(&mut x2, 2.0).unwrap();
            assert!(objective(&x1, &x2) >= base - 1e-9);
        }
    }

    #[test]
    fn weights_follow_the_q_power_normalization() {
        // f = [2, 4], q = 4: w = [(2/4)^2, 1] = [0.25, 1].
        assert_eq!(weights_from_residuals(&[2.0, 4.0], 4), vec![0.25, 1.0]);
        // Large q concentrates everything on the max term.
        assert_eq!(weights_from_residuals(&[2.0, 4.0], 12), vec![0.5f64.powi(10), 1.0]);
        // Equal residuals: all weights 1.
        assert_eq!(weights_from_residuals(&[3.0, 3.0, 3.0], 6), vec![1.0; 3]);
        // All-zero residuals fall back to unit weights.
        assert_eq!(weights_from_residuals(&[0.0, 0.0], 6), vec![1.0, 1.0]);
    }

    #[test]
    fn compute_weights_reads_the_design_point() {
        // At init the local copies equal the design point, so both residual
        // routes coincide; weights are the q-power normalization of the
        // init-sequence residuals.
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 4)], 12).unwrap();
        let mut solver =
            Solver::new(12, 1, &shift, AdmmConfig { seed: 10, ..Default::default() }).unwrap();
        let at_z = solver.residuals_at_z();
        let at_x = solver.residuals_at_design();
        assert_eq!(at_z, at_x);
        solver.compute_weights();
        assert_eq!(solver.weights(), &weights_from_residuals(&at_x, 6)[..]);
        assert!(solver.weights().iter().all(|&w| (0.0..=1.0).contains(&w)));
        assert!(solver.weights().iter().any(|&w| w == 1.0));
    }

    #[test]
    fn stationary_consensus_point_is_a_fixed_point() {
        // L = {0}, binary init: f = 0 and the gradient vanishes, duals
        // zeroed. The z-update must reproduce the design point exactly and
        // the run terminates at the first iteration with zero residuals.
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(0, 0)], 8).unwrap();
        let mut solver = Solver::new(8, 1, &shift, AdmmConfig { seed: 2, ..Default::default() })
            .unwrap();
        solver.zero_duals();
        let x_init = solver.x1().to_vec();
        let record = solver.step().unwrap();
        assert_eq!(solver.z(0), &x_init[..]);
        let (zh1, zh2) = solver.z_hat(0);
        assert!(zh1.iter().chain(zh2).all(|&v| v == 0.0));
        assert_eq!(record.primal_residual, 0.0);
        assert_eq!(record.dual_residual, 0.0);
        assert_eq!(record.violation, 0.0);
    }

    #[test]
    fn dual_update_is_rho_times_violation() {
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 4)], 12).unwrap();
        let mut solver =
            Solver::new(12, 1, &shift, AdmmConfig { seed: 6, ..Default::default() }).unwrap();
        solver.x_update().unwrap();
        solver.compute_weights();
        solver.z_update();
        let before: Vec<(Vec<f64>, Vec<f64>)> = (0..solver.index_set().len())
            .map(|oi| (solver.lambda1[oi].clone(), solver.lambda2[oi].clone()))
            .collect();
        let violations: Vec<f64> =
            (0..solver.index_set().len()).map(|oi| solver.constraint_violation(oi)).collect();
        solver.dual_update();
        for oi in 0..solver.index_set().len() {
            let (l1, l2) = solver.lambda(oi);
            let mut diff_sq = 0.0;
            for e in 0..l1.len() {
                let d1 = l1[e] - before[oi].0[e];
                let d2 = l2[e] - before[oi].1[e];
                diff_sq += d1 * d1 + d2 * d2;
            }
            let expect = solver.rho()[oi] * violations[oi];
            assert!((diff_sq.sqrt() - expect).abs() <= 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn residual_helpers_match_frobenius_arithmetic() {
        // Consensus: zero residuals.
        let x = vec![1.0, -1.0];
        let zs = vec![x.clone()];
        assert_eq!(primal_residual_sum(&x, &zs), 0.0);
        assert_eq!(dual_residual_sum(&zs, &zs), 0.0);
        // A jump by the all-ones matrix at N=2, M=1 has D = 2.
        let moved = vec![vec![2.0, 0.0]];
        assert_eq!(dual_residual_sum(&zs, &moved), 2.0);
    }

    #[test]
    fn lagrangian_reduces_to_weighted_objective_at_feasible_zero_dual_points() {
        let shift = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 5)], 9).unwrap();
        let mut solver =
            Solver::new(9, 1, &shift, AdmmConfig { seed: 8, ..Default::default() }).unwrap();
        solver.zero_duals();
        // Init is a feasible consensus point with Ẑ = 0: the Lagrangian is
        // exactly F(X) = Σ_o w_o f_o²(X).
        let f = solver.residuals_at_z();
        let expect: f64 =
            f.iter().zip(solver.weights()).map(|(fo, w)| w * fo * fo).sum();
        assert!((solver.lagrangian() - expect).abs() <= 1e-12 * expect.max(1.0));
    }

    #[test]
    fn same_seed_same_report() {
        let shift = spec(16);
        let config = AdmmConfig { seed: 31, max_iters: 40, ..Default::default() };
        let a = solve(16, 1, &shift, config).unwrap();
        let b = solve(16, 1, &shift, config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn z_update_order_does_not_change_state() {
        let shift = spec(12);
        let config = AdmmConfig { seed: 13, ..Default::default() };
        let mut fwd = Solver::new(12, 1, &shift, config).unwrap();
        let mut rev = Solver::new(12, 1, &shift, config).unwrap();
        for _ in 0..3 {
            fwd.x_update().unwrap();
            rev.x_update().unwrap();
            fwd.compute_weights();
            rev.compute_weights();
            let order_fwd: Vec<usize> = (0..fwd.index_set().len()).collect();
            let mut order_rev = order_fwd.clone();
            order_rev.reverse();
            fwd.z_update_with_order(&order_fwd);
            rev.z_update_with_order(&order_rev);
            fwd.dual_update();
            rev.dual_update();
        }
        assert_eq!(fwd.x1(), rev.x1());
        for oi in 0..fwd.index_set().len() {
            assert_eq!(fwd.z(oi), rev.z(oi));
            assert_eq!(fwd.lambda(oi), rev.lambda(oi));
        }
    }

    #[test]
    fn output_is_always_binary() {
        let report = solve(
            16,
            2,
            &ShiftSpec::new(CorrelationMode::Periodic, &[(1, 8)], 16).unwrap(),
            AdmmConfig { seed: 4, max_iters: 30, ..Default::default() },
        )
        .unwrap();
        assert!(report.sequences.is_binary());
        assert!(report.iterations <= 30);
    }
}

//! Projections onto the box [-1,1]^{N×M} and the ℓp-sphere ‖X‖_p^p = MN.
//!
//! Binary matrices lie on both sets, which is exactly why their intersection
//! can replace the binary constraint. Both operators work on flat buffers;
//! the sphere projection is a pure rescale so direction is preserved.

use crate::error::Error;

/// Entrywise clamp to [-1, 1], in place.
pub fn project_box_mut(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(-1.0, 1.0);
    }
}

pub fn project_box(x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    project_box_mut(&mut out);
    out
}

/// Rescales `x` so that Σ|x_k|^p equals its length exactly (the ℓp-sphere of
/// radius (MN)^{1/p}). Errors on the zero matrix, whose projection is
/// undefined; the solver substitutes a seeded random binary point instead.
pub fn project_lp_sphere_mut(x: &mut [f64], p: f64) -> Result<(), Error> {
    assert!(p > 0.0, "sphere exponent p must be positive");
    let norm_p = lp_norm_pow(x, p);
    if norm_p == 0.0 {
        return Err(Error::SingularProjection);
    }
    let scale = (x.len() as f64 / norm_p).powf(1.0 / p);
    for v in x.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

pub fn project_lp_sphere(x: &[f64], p: f64) -> Result<Vec<f64>, Error> {
    let mut out = x.to_vec();
    project_lp_sphere_mut(&mut out, p)?;
    Ok(out)
}

/// Σ|x_k|^p over all entries.
pub fn lp_norm_pow(x: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        x.iter().map(|v| v * v).sum()
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum()
    }
}

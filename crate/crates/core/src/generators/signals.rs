use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{param, GeneratorError, GeometricGraph};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Mixture of a coordinate sinusoid and unit-variance uniform noise.
///
/// For every vertex `i`: `R_i ~ Bernoulli(p)`, `W_i ~ U[-sqrt 3, sqrt 3]`,
/// `S_i = sum_j sin(f * x_i^j)`, value `(1 - R_i) S_i + R_i W_i`.
/// Both draws are made for every vertex, so realizations at different `p`
/// sharing a stream differ only where the replacement indicator flips.
pub fn mix_signal<R: Rng + ?Sized>(
    gg: &GeometricGraph,
    p: f64,
    frequency: f64,
    rng: &mut R,
) -> Result<Vec<f64>, GeneratorError> {
    param((0.0..=1.0).contains(&p), || format!("mix probability {p} outside [0, 1]"))?;
    param(frequency.is_finite(), || "mix frequency must be finite".into())?;
    Ok(gg
        .coords
        .iter()
        .map(|point| {
            let replace = rng.random::<f64>() < p;
            let noise = SQRT_3 * (2.0 * rng.random::<f64>() - 1.0);
            if replace {
                noise
            } else {
                point.iter().map(|&x| (frequency * x).sin()).sum()
            }
        })
        .collect())
}

/// `sin(2 pi f i / n)` over the vertex index `i`; `f` is cycles per `n`.
pub fn sine_signal(n: usize, cycles: f64) -> Result<Vec<f64>, GeneratorError> {
    param(n >= 1, || "signal length must be at least 1".into())?;
    Ok((0..n).map(|i| (2.0 * PI * cycles * i as f64 / n as f64).sin()).collect())
}

/// The `n - 1` standard normal increments a Wiener path of length `n` uses.
pub fn wiener_increments<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (1..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Cumulative sum of standard normal increments, starting at 0.
pub fn wiener_signal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>, GeneratorError> {
    param(n >= 1, || "signal length must be at least 1".into())?;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(acc);
    for dz in wiener_increments(n, rng) {
        acc += dz;
        out.push(acc);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub r: f64,
    pub x0: f64,
    pub burn_in: usize,
}

impl LogisticParams {
    pub fn new(r: f64) -> Self {
        LogisticParams { r, x0: 0.4, burn_in: 1000 }
    }
}

/// Logistic map `x <- r x (1 - x)` after discarding `burn_in` iterates.
pub fn logistic_signal(n: usize, params: LogisticParams) -> Result<Vec<f64>, GeneratorError> {
    let LogisticParams { r, x0, burn_in } = params;
    param(n >= 1, || "signal length must be at least 1".into())?;
    param(r > 0.0 && r <= 4.0, || format!("logistic r={r} outside (0, 4]"))?;
    param(x0 > 0.0 && x0 < 1.0, || format!("logistic x0={x0} outside (0, 1)"))?;
    let mut x = x0;
    for _ in 0..burn_in {
        x = r * x * (1.0 - x);
    }
    Ok((0..n)
        .map(|_| {
            let out = x;
            x = r * x * (1.0 - x);
            out
        })
        .collect())
}

/// I.i.d. `U[0, 1)`.
pub fn uniform_signal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>, GeneratorError> {
    param(n >= 1, || "signal length must be at least 1".into())?;
    Ok((0..n).map(|_| rng.random::<f64>()).collect())
}

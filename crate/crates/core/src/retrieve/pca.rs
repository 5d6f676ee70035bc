//! PCA over the embedding cloud: top-3 eigenpairs of the sample covariance
//! via power iteration with Gram-Schmidt deflation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingIndex, RetrieveError};

/// Projection components for the 3-D visualization.
pub const PCA_COMPONENTS: usize = 3;

const POWER_SEED: u64 = 0x50CA;
const CONVERGENCE_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

/// Mean vector, three orthonormal components, and their explained variance
/// in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    components: [Vec<f64>; PCA_COMPONENTS],
    explained_variance: [f64; PCA_COMPONENTS],
}

impl PcaModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &[Vec<f64>; PCA_COMPONENTS] {
        &self.components
    }

    pub fn explained_variance(&self) -> &[f64; PCA_COMPONENTS] {
        &self.explained_variance
    }

    /// Projects one embedding: `components^T (embedding - mean)`.
    pub fn project(&self, embedding: &[f64]) -> Result<[f64; PCA_COMPONENTS], RetrieveError> {
        if embedding.len() != self.mean.len() {
            return Err(RetrieveError::DimensionMismatch(format!(
                "embedding width {} vs PCA width {}",
                embedding.len(),
                self.mean.len()
            )));
        }
        let mut out = [0.0; PCA_COMPONENTS];
        for (slot, component) in out.iter_mut().zip(&self.components) {
            *slot = component
                .iter()
                .zip(embedding)
                .zip(&self.mean)
                .map(|((c, e), m)| c * (e - m))
                .sum();
        }
        Ok(out)
    }
}

/// Fits the 3-component model over all index entries. Requires at least
/// four points and an embedding width of at least three.
pub fn fit_pca(index: &EmbeddingIndex) -> Result<PcaModel, RetrieveError> {
    let n = index.len();
    if n < 4 {
        return Err(RetrieveError::TooFewPoints { need: 4, got: n });
    }
    let d = index.dim();
    if d < PCA_COMPONENTS {
        return Err(RetrieveError::DimensionMismatch(format!(
            "embedding width {d} is below the {PCA_COMPONENTS} projection components"
        )));
    }

    let mut mean = vec![0.0; d];
    for (_, e) in index.entries() {
        for (m, v) in mean.iter_mut().zip(e) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    // sample covariance, 1/(n-1)
    let mut cov = vec![0.0; d * d];
    for (_, e) in index.entries() {
        let centered: Vec<f64> = e.iter().zip(&mean).map(|(v, m)| v - m).collect();
        for i in 0..d {
            let ci = centered[i];
            let row = &mut cov[i * d..(i + 1) * d];
            for (slot, cj) in row.iter_mut().zip(&centered) {
                *slot += ci * cj;
            }
        }
    }
    for v in &mut cov {
        *v /= (n - 1) as f64;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(PCA_COMPONENTS);
    let mut variances = [0.0; PCA_COMPONENTS];
    for slot in variances.iter_mut() {
        let component = dominant_eigenvector(&cov, d, &components, &mut rng);
        *slot = rayleigh(&cov, d, &component).max(0.0);
        components.push(component);
    }

    let mut fixed: [Vec<f64>; PCA_COMPONENTS] = components
        .try_into()
        .expect("exactly three components were computed");
    for component in &mut fixed {
        fix_sign(component);
    }
    Ok(PcaModel {
        mean,
        components: fixed,
        explained_variance: variances,
    })
}

fn matvec(matrix: &[f64], d: usize, v: &[f64], out: &mut [f64]) {
    for i in 0..d {
        out[i] = matrix[i * d..(i + 1) * d]
            .iter()
            .zip(v)
            .map(|(m, x)| m * x)
            .sum();
    }
}

fn rayleigh(matrix: &[f64], d: usize, v: &[f64]) -> f64 {
    let mut mv = vec![0.0; d];
    matvec(matrix, d, v, &mut mv);
    v.iter().zip(&mv).map(|(a, b)| a * b).sum()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Removes the projections onto `basis` from `v`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let proj: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        for (slot, b) in v.iter_mut().zip(u) {
            *slot -= proj * b;
        }
    }
}

/// Power iteration on the subspace orthogonal to `found`. Converges when
/// successive estimates differ by less than the tolerance (either sign) or
/// the iteration budget runs out. A vanishing image means the remaining
/// eigenvalues are zero; any orthogonal unit vector then completes the basis.
fn dominant_eigenvector(
    cov: &[f64],
    d: usize,
    found: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut v, found);
    let n = norm(&v);
    if n > 0.0 {
        for x in &mut v {
            *x /= n;
        }
    }
    let mut image = vec![0.0; d];
    for _ in 0..MAX_ITERATIONS {
        matvec(cov, d, &v, &mut image);
        orthogonalize(&mut image, found);
        let n = norm(&image);
        if n < 1e-14 {
            return orthonormal_fallback(d, found);
        }
        let next: Vec<f64> = image.iter().map(|x| x / n).collect();
        let diff_plus: f64 = next.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
        let diff_minus: f64 = next.iter().zip(&v).map(|(a, b)| (a + b) * (a + b)).sum();
        let converged = diff_plus.sqrt() < CONVERGENCE_TOL || diff_minus.sqrt() < CONVERGENCE_TOL;
        v = next;
        if converged {
            break;
        }
    }
    v
}

/// First canonical basis vector with a usable component orthogonal to the
/// found set, normalized.
fn orthonormal_fallback(d: usize, found: &[Vec<f64>]) -> Vec<f64> {
    for i in 0..d {
        let mut candidate = vec![0.0; d];
        candidate[i] = 1.0;
        orthogonalize(&mut candidate, found);
        let n = norm(&candidate);
        if n > 1e-6 {
            for x in &mut candidate {
                *x /= n;
            }
            return candidate;
        }
    }
    unreachable!("found set cannot span the whole space: it has at most 3 vectors")
}

/// Makes the largest-magnitude entry positive so exports are deterministic.
fn fix_sign(component: &mut [f64]) {
    let mut best = 0;
    for (i, v) in component.iter().enumerate() {
        if v.abs() > component[best].abs() {
            best = i;
        }
    }
    if component[best] < 0.0 {
        for v in component.iter_mut() {
            *v = -*v;
        }
    }
}

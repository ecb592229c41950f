//! Per-observable probability spaces.
//!
//! A density matrix does not define one distribution over all pure states.
//! Each context (orthonormal basis) gets its own distribution
//! `p_O(λ_O|P) = ⟨λ_O|ρ|λ_O⟩`, and the entropy of the preparation is the
//! lowest entropy over all contexts, attained at the eigenbasis.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::qcore::{
    bloch_vector, density_from_pure, eigen_context, mix, shannon_entropy, von_neumann_entropy,
    BlochVector, Context, DensityMatrix, PureState,
};

/// Probabilities of the basis vectors of one context.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextDistribution {
    pub context: Context,
    /// Aligned with `context.basis()`.
    pub probabilities: Vec<f64>,
}

/// Seeded source of Haar-random orthonormal bases.
///
/// Two samplers built from the same seed (and stream) produce the same
/// sequence of contexts.
#[derive(Debug, Clone)]
pub struct ContextSampler {
    seed: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl ContextSampler {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream for the same seed, e.g. one per table row.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            seed,
            counter: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of contexts drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Haar-random basis: Gram–Schmidt on i.i.d. complex Gaussian vectors.
    pub fn next_context(&mut self, dim: usize) -> Result<Context> {
        if dim == 0 {
            return Err(domain("dimension must be positive"));
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while basis.len() < dim {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut self.rng);
                    let im: f64 = StandardNormal.sample(&mut self.rng);
                    Complex64::new(re, im)
                })
                .collect();
            for u in &basis {
                let c: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
            let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            // Redraw on (measure-zero) near-dependence.
            if n > 1e-6 {
                basis.push(v.into_iter().map(|a| a / n).collect());
            }
        }
        self.counter += 1;
        let states = basis
            .into_iter()
            .map(PureState::normalized)
            .collect::<Result<Vec<_>>>()?;
        Context::new(states)
    }

    /// Haar-random pure state.
    pub fn next_pure_state(&mut self, dim: usize) -> Result<PureState> {
        Ok(self.next_context(dim)?.basis()[0].clone())
    }
}

/// `pᵢ = ⟨eᵢ|ρ|eᵢ⟩`, clamped to `[0, 1]` and renormalized when roundoff
/// pushes the sum more than `1e-12` away from 1.
pub fn context_distribution(rho: &DensityMatrix, context: &Context) -> Result<ContextDistribution> {
    if rho.dim() != context.dim() {
        return Err(domain(format!(
            "state dimension {} does not match context dimension {}",
            rho.dim(),
            context.dim()
        )));
    }
    let mut probabilities: Vec<f64> = context
        .basis()
        .iter()
        .map(|e| rho.matrix().expectation(e.amplitudes()).re.clamp(0.0, 1.0))
        .collect();
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 && total > 0.0 {
        for p in &mut probabilities {
            *p /= total;
        }
    }
    Ok(ContextDistribution {
        context: context.clone(),
        probabilities,
    })
}

/// Shannon entropy (bits) of `rho` in one context.
pub fn context_entropy(rho: &DensityMatrix, context: &Context) -> Result<f64> {
    Ok(shannon_entropy(
        &context_distribution(rho, context)?.probabilities,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinContextEntropy {
    /// Lowest entropy over the eigenbasis and the sampled contexts.
    pub bits: f64,
    pub argmin: Context,
    /// Lowest entropy over the sampled contexts alone.
    pub sampled_min: f64,
}

/// Lowest context entropy over the eigenbasis of `rho` plus `n_samples`
/// random contexts. The eigenbasis is always a candidate, so `bits` equals
/// the von Neumann entropy; a sampled context replaces it only if lower by
/// more than `1e-12`, which can only be roundoff.
pub fn min_context_entropy(
    rho: &DensityMatrix,
    sampler: &mut ContextSampler,
    n_samples: usize,
) -> Result<MinContextEntropy> {
    if n_samples == 0 {
        return Err(domain("need at least one sampled context"));
    }
    let eigen = eigen_context(rho).context;
    let mut bits = context_entropy(rho, &eigen)?;
    let mut argmin = eigen;
    let mut sampled_min = f64::INFINITY;
    for _ in 0..n_samples {
        let ctx = sampler.next_context(rho.dim())?;
        let h = context_entropy(rho, &ctx)?;
        sampled_min = sampled_min.min(h);
        if h < bits - 1e-12 {
            bits = h;
            argmin = ctx;
        }
    }
    Ok(MinContextEntropy {
        bits,
        argmin,
        sampled_min,
    })
}

/// One row of a mixture-drift table.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftRow {
    pub p1: f64,
    pub mixture: DensityMatrix,
    /// Bloch vector of the mixture (qubits only).
    pub bloch: Option<BlochVector>,
    /// Unit Bloch direction of the top eigenvector; absent for degenerate
    /// mixtures and for dimensions other than 2.
    pub eigen_axis: Option<BlochVector>,
    pub degenerate: bool,
    pub vn_entropy: f64,
    pub min_context_entropy: f64,
}

/// Tracks how the privileged context of `p₁ρ₁ + (1 − p₁)ρ₂` moves with `p₁`.
///
/// Row `i` samples its contexts from stream `i` of `seed`, so rows are
/// independent of each other and of evaluation order.
pub fn mixture_context_drift(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    weights: &[f64],
    seed: u64,
    n_samples: usize,
) -> Result<Vec<DriftRow>> {
    if rho1.dim() != rho2.dim() {
        return Err(domain(format!(
            "drift between states of dimensions {} and {}",
            rho1.dim(),
            rho2.dim()
        )));
    }
    weights
        .iter()
        .enumerate()
        .map(|(i, &p1)| {
            if !(0.0..=1.0).contains(&p1) {
                return Err(domain(format!("mixing weight {p1} outside [0, 1]")));
            }
            let mixture = mix(&[(p1, rho1.clone()), (1.0 - p1, rho2.clone())])?;
            let eig = eigen_context(&mixture);
            let qubit = mixture.dim() == 2;
            let bloch = if qubit {
                Some(bloch_vector(&mixture)?)
            } else {
                None
            };
            let eigen_axis = if qubit && !eig.degenerate {
                Some(bloch_vector(&density_from_pure(&eig.context.basis()[0]))?)
            } else {
                None
            };
            let mut sampler = ContextSampler::with_stream(seed, i as u64);
            let min = min_context_entropy(&mixture, &mut sampler, n_samples)?;
            Ok(DriftRow {
                p1,
                vn_entropy: von_neumann_entropy(&mixture)?,
                min_context_entropy: min.bits,
                mixture,
                bloch,
                eigen_axis,
                degenerate: eig.degenerate,
            })
        })
        .collect()
}

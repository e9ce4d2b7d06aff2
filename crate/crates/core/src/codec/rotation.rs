//! Seeded orthonormal mixing of latent coordinates about the cube center.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct Rotation {
    seed: u64,
    q: DMatrix<f64>,
}

impl Rotation {
    /// Haar-distributed orthonormal matrix: QR of a Gaussian matrix with the
    /// signs of R's diagonal folded into Q.
    pub fn new(seed: u64, dims: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::<f64>::from_fn(dims, dims, |_, _| StandardNormal.sample(&mut rng));
        let qr = a.qr();
        let r = qr.r();
        let mut q = qr.q();
        for j in 0..dims {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        Rotation { seed, q }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dims(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// max |QᵀQ − I| over all entries.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dims();
        let qtq = self.q.transpose() * &self.q;
        (qtq - DMatrix::<f64>::identity(n, n)).amax()
    }

    /// v' = Q (v − c) + c
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let centered = DVector::from_iterator(v.len(), v.iter().map(|x| x - 0.5));
        (&self.q * centered).iter().map(|x| x + 0.5).collect()
    }

    /// v = Qᵀ (v' − c) + c
    pub fn invert(&self, v: &[f64]) -> Vec<f64> {
        let centered = DVector::from_iterator(v.len(), v.iter().map(|x| x - 0.5));
        (self.q.tr_mul(&centered)).iter().map(|x| x + 0.5).collect()
    }
}

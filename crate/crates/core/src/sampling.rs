//! Seeded generators for property checks and the verification suites.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::minkowski::{random_lorentz_with, FourVector, LorentzMatrix, MAX_RANDOM_RAPIDITY};
use crate::sl2c::SL2CElement;
use crate::C64;

/// Deterministic sampler (ChaCha8, so streams are platform independent).
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn unit_vector(&mut self) -> Vector3<f64> {
        unit_vector(&mut self.rng)
    }

    pub fn lorentz(&mut self) -> LorentzMatrix {
        random_lorentz_with(&mut self.rng)
    }

    /// Unit future-timelike vector with rapidity below [`MAX_RANDOM_RAPIDITY`].
    pub fn unit_timelike(&mut self) -> FourVector {
        let rapidity = self.uniform(0.0, MAX_RANDOM_RAPIDITY);
        let dir = self.unit_vector();
        FourVector::unit_timelike(rapidity, dir)
    }

    /// Components drawn uniformly from `[-scale, scale]`.
    pub fn four_vector(&mut self, scale: f64) -> FourVector {
        FourVector::new(
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
        )
    }

    /// Unit SU(2) rotation times a canonical boost of bounded rapidity.
    pub fn sl2c(&mut self) -> SL2CElement {
        let rotation = SL2CElement::rotation(self.uniform(0.0, std::f64::consts::TAU), self.unit_vector());
        let boost = SL2CElement::boost(self.uniform(0.0, MAX_RANDOM_RAPIDITY), self.unit_vector());
        rotation.mul(&boost).expect("both factors are in the first representation")
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    /// Normalized complex vector of length `dim`.
    pub fn unit_complex_vector(&mut self, dim: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..dim).map(|_| self.complex()).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|c| c / norm).collect()
    }
}

pub(crate) fn unit_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::from_fn(|_, _| rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}


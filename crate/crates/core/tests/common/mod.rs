#![allow(dead_code)]

use deltatrain::{DeltaTrain, FreePropagator, KernelSpec, NoiseSequence};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng, scale: f64) -> Complex<f64> {
    Complex::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// Non-stationary complex kernel `(a + ib)e^{−c(t−t′)}(1 + e cos(f t′))`.
pub fn random_kernel(rng: &mut impl Rng) -> KernelSpec<f64> {
    let amp = complex(rng, 3.0);
    let decay = rng.random_range(0.0..2.0);
    let wobble = rng.random_range(-0.5..0.5);
    let freq = rng.random_range(0.0..4.0);
    KernelSpec::two_time(move |t: f64, tp: f64| {
        amp * ((-decay * (t - tp)).exp() * (1.0 + wobble * (freq * tp).cos()))
    })
}

pub fn random_propagator(rng: &mut impl Rng) -> FreePropagator<f64> {
    match rng.random_range(0..4) {
        0 => FreePropagator::unit(),
        1 => FreePropagator::first_order(rng.random_range(-1.0..1.0), rng.random_range(0.5..2.0))
            .unwrap(),
        2 => FreePropagator::harmonic(rng.random_range(0.3..3.0)).unwrap(),
        _ => FreePropagator::second_order(
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..1.0),
            1.0,
        )
        .unwrap(),
    }
}

pub struct Instance {
    pub train: DeltaTrain<f64>,
    pub kernel: KernelSpec<f64>,
    pub prop: FreePropagator<f64>,
    pub initials: Vec<Complex<f64>>,
    pub noise: NoiseSequence<f64>,
}

pub fn random_instance(rng: &mut impl Rng, n: usize) -> Instance {
    let duration = rng.random_range(0.5..2.0);
    let amplitudes = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let train = DeltaTrain::new(duration, amplitudes).unwrap();
    let prop = random_propagator(rng);
    let initials = (0..prop.order()).map(|_| complex(rng, 1.0)).collect();
    let noise = NoiseSequence::new((0..n).map(|_| complex(rng, 0.3)).collect());
    Instance {
        train,
        kernel: random_kernel(rng),
        prop,
        initials,
        noise,
    }
}

//! Random state generation: pure states from normalized complex Gaussian
//! amplitudes, mixed states as normalized G·G† for a complex Gaussian G.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::qstate::{validate_density, Complex64, ComplexMatrix, DensityMatrix, StateVector};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure_state(num_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let dim = 1usize << num_qubits;
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return StateVector::new(amps.into_iter().map(|a| a / norm).collect());
        }
    }
}

pub fn random_density(num_qubits: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << num_qubits;
    let g: Vec<Complex64> = (0..dim * dim).map(|_| gaussian(rng)).collect();
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k].conj();
            }
            m.set(i, j, acc);
        }
    }
    let trace = m.trace().re;
    let m = m.scaled(Complex64::new(1.0 / trace, 0.0));
    validate_density(&m, num_qubits).expect("normalized Gram matrix is a valid density matrix")
}

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans of one length. The inverse is unnormalized.
pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Plans {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }
}

/// In-place 2D transform of a row-major `size x size` array.
pub(crate) fn fft2_in_place(data: &mut [Complex64], size: usize, inverse: bool) {
    let plans = Plans::new(size);
    let plan = if inverse { &plans.inverse } else { &plans.forward };
    for row in data.chunks_exact_mut(size) {
        plan.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); size];
    for m in 0..size {
        for n in 0..size {
            column[n] = data[n * size + m];
        }
        plan.process(&mut column);
        for n in 0..size {
            data[n * size + m] = column[n];
        }
    }
    if inverse {
        let scale = 1.0 / (size * size) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

//! Axis-by-axis complex FFT over a row-major lattice.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Number of lattice lines gathered per batch when transforming a strided axis.
const LINE_BATCH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sign {
    /// `exp(-i x xi)` kernel.
    Forward,
    /// `exp(+i x xi)` kernel.
    Inverse,
}

pub(crate) struct LatticeFft<T: Real> {
    modes: Vec<usize>,
    strides: Vec<usize>,
    forward: Vec<Arc<dyn Fft<T>>>,
    inverse: Vec<Arc<dyn Fft<T>>>,
}

impl<T: Real> LatticeFft<T> {
    pub(crate) fn new(modes: &[usize], strides: &[usize]) -> Self {
        let mut planner = FftPlanner::<T>::new();
        let forward = modes.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = modes.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            modes: modes.to_vec(),
            strides: strides.to_vec(),
            forward,
            inverse,
        }
    }

    /// Unnormalized transform along every axis, in place.
    pub(crate) fn process(&self, data: &mut [Complex<T>], sign: Sign) {
        let plans = match sign {
            Sign::Forward => &self.forward,
            Sign::Inverse => &self.inverse,
        };
        for axis in 0..self.modes.len() {
            self.process_axis(data, axis, plans[axis].as_ref());
        }
    }

    fn process_axis(&self, data: &mut [Complex<T>], axis: usize, plan: &dyn Fft<T>) {
        let n = self.modes[axis];
        let stride = self.strides[axis];
        let scratch_len = plan.get_inplace_scratch_len();
        if stride == 1 {
            data.par_chunks_mut(n * LINE_BATCH).for_each(|chunk| {
                let mut scratch = vec![Complex::default(); scratch_len];
                plan.process_with_scratch(chunk, &mut scratch);
            });
            return;
        }
        data.par_chunks_mut(n * stride).for_each(|block| {
            let mut scratch = vec![Complex::default(); scratch_len];
            let mut lines = vec![Complex::default(); n * LINE_BATCH.min(stride)];
            let mut start = 0;
            while start < stride {
                let width = LINE_BATCH.min(stride - start);
                let buf = &mut lines[..n * width];
                for k in 0..n {
                    let row = &block[k * stride + start..k * stride + start + width];
                    for (j, v) in row.iter().enumerate() {
                        buf[j * n + k] = *v;
                    }
                }
                plan.process_with_scratch(buf, &mut scratch);
                for k in 0..n {
                    let row = &mut block[k * stride + start..k * stride + start + width];
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = buf[j * n + k];
                    }
                }
                start += width;
            }
        });
    }
}

//! Orthonormal multilevel Haar transform on power-of-two signals and square
//! power-of-two images (row-major).
//!
//! One analysis step maps a pair to `((x0 + x1)/sqrt2, (x0 - x1)/sqrt2)` with
//! approximations first and details after. Images use the standard separable
//! layout: rows, then columns, recursing on the top-left quadrant.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::LinearMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaarShape {
    Signal(usize),
    /// Side length of a square image.
    Image(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct HaarTransform {
    shape: HaarShape,
    levels: usize,
}

fn max_levels(n: usize) -> usize {
    n.trailing_zeros() as usize
}

/// 1-D transform of length `n` with `levels` scales (`0` means full depth).
pub fn haar_transform(n: usize, levels: usize) -> Result<HaarTransform> {
    HaarTransform::new(HaarShape::Signal(n), levels)
}

impl HaarTransform {
    pub fn new(shape: HaarShape, levels: usize) -> Result<Self> {
        let side = match shape {
            HaarShape::Signal(n) | HaarShape::Image(n) => n,
        };
        if side == 0 || !side.is_power_of_two() {
            return Err(Error::Construction(format!(
                "Haar transform needs a power-of-two size, got {side}"
            )));
        }
        let depth = max_levels(side);
        if levels > depth {
            return Err(Error::Construction(format!(
                "{levels} Haar levels requested but size {side} allows at most {depth}"
            )));
        }
        let levels = if levels == 0 { depth } else { levels };
        Ok(HaarTransform { shape, levels })
    }

    /// 2-D transform when `n_pixels` is a perfect square with power-of-two
    /// side, otherwise 1-D.
    pub fn for_pixels(n_pixels: usize, levels: usize) -> Result<Self> {
        let side = (n_pixels as f64).sqrt().round() as usize;
        if side * side == n_pixels && side.is_power_of_two() && side > 1 {
            let levels = levels.min(max_levels(side));
            HaarTransform::new(HaarShape::Image(side), levels)
        } else {
            HaarTransform::new(HaarShape::Signal(n_pixels), levels)
        }
    }

    pub fn shape(&self) -> HaarShape {
        self.shape
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    fn len(&self) -> usize {
        match self.shape {
            HaarShape::Signal(n) => n,
            HaarShape::Image(s) => s * s,
        }
    }
}

fn forward_step(buf: &mut [f64], scratch: &mut [f64]) {
    let half = buf.len() / 2;
    for i in 0..half {
        let (a, b) = (buf[2 * i], buf[2 * i + 1]);
        scratch[i] = (a + b) * FRAC_1_SQRT_2;
        scratch[half + i] = (a - b) * FRAC_1_SQRT_2;
    }
    buf.copy_from_slice(&scratch[..buf.len()]);
}

fn inverse_step(buf: &mut [f64], scratch: &mut [f64]) {
    let half = buf.len() / 2;
    for i in 0..half {
        let (s, d) = (buf[i], buf[half + i]);
        scratch[2 * i] = (s + d) * FRAC_1_SQRT_2;
        scratch[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    buf.copy_from_slice(&scratch[..buf.len()]);
}

fn image_pass(data: &mut [f64], side: usize, len: usize, inverse: bool) {
    let step = if inverse { inverse_step } else { forward_step };
    let mut line = vec![0.0; len];
    let mut scratch = vec![0.0; len];
    for r in 0..len {
        step(&mut data[r * side..r * side + len], &mut scratch);
    }
    for c in 0..len {
        for r in 0..len {
            line[r] = data[r * side + c];
        }
        step(&mut line, &mut scratch);
        for r in 0..len {
            data[r * side + c] = line[r];
        }
    }
}

impl LinearMap for HaarTransform {
    fn dim_in(&self) -> usize {
        self.len()
    }
    fn dim_out(&self) -> usize {
        self.len()
    }

    fn apply(&self, x: &Vector) -> Vector {
        let mut out = x.clone();
        let data = out.as_mut_slice();
        match self.shape {
            HaarShape::Signal(n) => {
                let mut scratch = vec![0.0; n];
                let mut len = n;
                for _ in 0..self.levels {
                    forward_step(&mut data[..len], &mut scratch);
                    len /= 2;
                }
            }
            HaarShape::Image(side) => {
                let mut len = side;
                for _ in 0..self.levels {
                    image_pass(data, side, len, false);
                    len /= 2;
                }
            }
        }
        out
    }

    fn adjoint(&self, y: &Vector) -> Vector {
        let mut out = y.clone();
        let data = out.as_mut_slice();
        match self.shape {
            HaarShape::Signal(n) => {
                let mut scratch = vec![0.0; n];
                let mut len = n >> (self.levels - 1).min(63);
                for _ in 0..self.levels {
                    inverse_step(&mut data[..len], &mut scratch);
                    len *= 2;
                }
            }
            HaarShape::Image(side) => {
                let mut len = side >> (self.levels - 1).min(63);
                for _ in 0..self.levels {
                    image_pass(data, side, len, true);
                    len *= 2;
                }
            }
        }
        out
    }

    fn exact_norm_sq(&self) -> Option<f64> {
        Some(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_vector;
    use crate::operators::adjoint_defect;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_point_transform() {
        let w = haar_transform(2, 1).unwrap();
        let c = w.apply(&Vector::from_vec(vec![1.0, -1.0]));
        assert!(c[0].abs() < 1e-15);
        assert!((c[1] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_signal_has_no_details() {
        let w = haar_transform(16, 0).unwrap();
        let c = w.apply(&Vector::from_element(16, 3.0));
        assert!((c[0] - 12.0).abs() < 1e-12);
        assert!(c.rows(1, 15).amax() < 1e-12);

        let w = HaarTransform::for_pixels(64, 2).unwrap();
        assert_eq!(w.shape(), HaarShape::Image(8));
        let c = w.apply(&Vector::from_element(64, 1.0));
        let nonzero = c.iter().filter(|v| v.abs() > 1e-12).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn round_trip_and_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let maps = [
            haar_transform(32, 0).unwrap(),
            haar_transform(32, 2).unwrap(),
            HaarTransform::for_pixels(256, 0).unwrap(),
            HaarTransform::for_pixels(256, 1).unwrap(),
            HaarTransform::for_pixels(128, 3).unwrap(),
        ];
        for w in maps {
            let x = gaussian_vector(w.dim_in(), &mut rng);
            let y = w.apply(&x);
            assert!((w.adjoint(&y) - &x).norm() < 1e-12 * x.norm());
            assert!((y.norm() - x.norm()).abs() < 1e-12 * x.norm());
            assert!(adjoint_defect(&w, 100, 1) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(haar_transform(12, 0).is_err());
        assert!(haar_transform(8, 4).is_err());
        assert!(haar_transform(0, 0).is_err());
    }
}

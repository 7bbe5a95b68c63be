//! Compensated summation with a fixed accumulation order.

use num_complex::Complex;

use crate::scalar::Real;

/// Neumaier (improved Kahan) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> NeumaierSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of real values in iteration order.
pub fn sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    values.into_iter().collect::<NeumaierSum<T>>().value()
}

/// Compensated sum of complex values, real and imaginary parts accumulated
/// separately.
pub fn sum_complex<T: Real, I: IntoIterator<Item = Complex<T>>>(values: I) -> Complex<T> {
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    Complex::new(re.value(), im.value())
}

/// `Σ conj(a_k) b_k` over equal-length slices.
pub fn dot_conj<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    sum_complex(a.iter().zip(b).map(|(x, y)| x.conj() * y))
}

/// `Σ |a_k|²`.
pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    sum(a.iter().map(|z| z.norm_sqr()))
}

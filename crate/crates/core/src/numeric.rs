//! Floating-point helpers shared by the evaluators: compensated summation,
//! least-squares line fits and fourth-order difference stencils.

use num_traits::Float;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug)]
pub struct NeumaierSum<T> {
    sum: T,
    carry: T,
}

impl<T: Float> Default for NeumaierSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Float> NeumaierSum<T> {
    pub fn new() -> Self {
        NeumaierSum {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Float> FromIterator<T> for NeumaierSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Float, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<NeumaierSum<T>>().value()
}

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits a line through `(x, y)` pairs; `None` when fewer than two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return None;
    }
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Fourth-order central first derivative.
pub fn central_diff4<T: Float, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    let c8 = T::from(8.0).unwrap();
    let c12 = T::from(12.0).unwrap();
    (f(x - h - h) - c8 * f(x - h) + c8 * f(x + h) - f(x + h + h)) / (c12 * h)
}

/// Fourth-order central second derivative.
pub fn second_diff4<T: Float, F: Fn(T) -> T>(f: F, x: T, h: T) -> T {
    let c16 = T::from(16.0).unwrap();
    let c30 = T::from(30.0).unwrap();
    let c12 = T::from(12.0).unwrap();
    (-f(x - h - h) + c16 * f(x - h) - c30 * f(x) + c16 * f(x + h) - f(x + h + h)) / (c12 * h * h)
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

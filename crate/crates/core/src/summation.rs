//! Compensated (Neumaier) summation and prefix sums.

/// Running Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    compensation: f64,
}

impl Compensated {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn sum(values: &[f64]) -> f64 {
    let mut acc = Compensated::default();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Prefix sums with `out[0] = 0` and `out[k] = values[0] + … + values[k-1]`.
///
/// For non-negative input the result is forced non-decreasing, so interval
/// sums taken from it grow monotonically with interval length.
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut acc = Compensated::default();
    let mut last = 0.0_f64;
    for &v in values {
        acc.add(v);
        let next = acc.value();
        let next = if v >= 0.0 { next.max(last) } else { next };
        out.push(next);
        last = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_low_order_bits() {
        let values = [1.0, 1e-16, 1e-16, 1e-16, 1e-16];
        assert_eq!(values.iter().sum::<f64>(), 1.0);
        assert_eq!(sum(&values), 1.0 + 4e-16);
    }

    #[test]
    fn prefix_layout() {
        assert_eq!(prefix_sums(&[0.25, 0.5, 0.25]), vec![0.0, 0.25, 0.75, 1.0]);
    }
}

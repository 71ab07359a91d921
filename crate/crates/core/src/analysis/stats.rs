use alloc::vec::Vec;

/// How standard errors of ensemble means are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMethod {
    /// Delete-one jackknife over replicates.
    #[default]
    Jackknife,
    /// Standard deviation of `batches` contiguous batch means.
    BatchMeans { batches: usize },
}

/// Streaming mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    /// `s/√n`, which is also the jackknife standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        libm::sqrt(self.variance() / self.count as f64)
    }
}

/// Mean and sample variance by Welford's recurrence, in slice order.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let mut w = Welford::default();
    xs.iter().for_each(|&x| w.push(x));
    (w.mean(), w.variance())
}

/// Jackknife standard error of `stat(means)`, where `means[j]` is the mean
/// of `columns[j]`. All columns must have the same length `n ≥ 2`.
pub fn jackknife_se<F: Fn(&[f64]) -> f64>(columns: &[&[f64]], stat: F) -> f64 {
    let n = columns[0].len();
    let sums: Vec<f64> = columns.iter().map(|c| mean_var(c).0 * n as f64).collect();
    let mut loo = Vec::with_capacity(columns.len());
    let thetas: Vec<f64> = (0..n)
        .map(|i| {
            loo.clear();
            loo.extend(
                columns
                    .iter()
                    .zip(&sums)
                    .map(|(c, s)| (s - c[i]) / (n - 1) as f64),
            );
            stat(&loo)
        })
        .collect();
    let (_, var) = mean_var(&thetas);
    // Σ(θ_i − θ̄)² = (n − 1)·var
    libm::sqrt((n - 1) as f64 * (n - 1) as f64 / n as f64 * var)
}

/// Mean and its standard error.
pub fn mean_se(xs: &[f64], method: ErrorMethod) -> (f64, f64) {
    let (mean, _) = mean_var(xs);
    let se = match method {
        ErrorMethod::Jackknife => jackknife_se(&[xs], |m| m[0]),
        ErrorMethod::BatchMeans { batches } => {
            let b = batches.clamp(2, xs.len());
            let means: Vec<f64> = (0..b)
                .map(|k| mean_var(&xs[k * xs.len() / b..(k + 1) * xs.len() / b]).0)
                .collect();
            let (_, var) = mean_var(&means);
            libm::sqrt(var / b as f64)
        }
    };
    (mean, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_of_mean_is_classical_se() {
        let xs = [1.0, 4.0, 2.5, -3.0, 0.5, 7.0];
        let (_, var) = mean_var(&xs);
        let classical = libm::sqrt(var / xs.len() as f64);
        let (_, se) = mean_se(&xs, ErrorMethod::Jackknife);
        assert!((se - classical).abs() < 1e-14);
    }

    #[test]
    fn constants_have_zero_error() {
        let xs = [0.1; 17];
        assert_eq!(mean_se(&xs, ErrorMethod::Jackknife), (0.1, 0.0));
        assert_eq!(mean_se(&xs, ErrorMethod::BatchMeans { batches: 4 }), (0.1, 0.0));
    }

    #[test]
    fn batch_means_close_to_jackknife_for_iid() {
        use rand::Rng;
        let mut rng = crate::rng::stream(3, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let (_, a) = mean_se(&xs, ErrorMethod::Jackknife);
        let (_, b) = mean_se(&xs, ErrorMethod::BatchMeans { batches: 50 });
        assert!((a - b).abs() < 0.35 * a, "{a} vs {b}");
    }
}

//! Small numerical helpers: compensated summation, sample statistics,
//! Pearson correlation, and pool-adjacent-violators smoothing.

/// Neumaier-compensated sum. For same-sign inputs the result is exact to
/// within one ulp of the true sum, which is what the conservation checks
/// rely on.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Total volume of the alive particles (compensated).
pub fn total_alive_volume(particles: &[crate::domain::Particle]) -> f64 {
    compensated_sum(particles.iter().filter(|p| p.alive).map(|p| p.volume))
}

/// Sample mean and standard deviation (n-1 denominator).
/// Returns std 0 for fewer than two samples.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Pearson correlation between two equal-length samples.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson: length mismatch");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

/// Pool-adjacent-violators fit of a nonincreasing sequence (least squares).
/// Used to smooth noisy sweep means before trend checks.
pub fn pava_nonincreasing(y: &[f64]) -> Vec<f64> {
    // fit nondecreasing on the negated data, standard PAVA
    let mut level: Vec<f64> = y.iter().map(|v| -v).collect();
    let mut weight: Vec<f64> = vec![1.0; y.len()];
    let mut len = 0usize;
    for i in 0..y.len() {
        level[len] = -y[i];
        weight[len] = 1.0;
        len += 1;
        while len > 1 && level[len - 2] > level[len - 1] {
            let w = weight[len - 2] + weight[len - 1];
            let l = (level[len - 2] * weight[len - 2] + level[len - 1] * weight[len - 1]) / w;
            level[len - 2] = l;
            weight[len - 2] = w;
            len -= 1;
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for k in 0..len {
        for _ in 0..weight[k] as usize {
            out.push(-level[k]);
        }
    }
    out
}

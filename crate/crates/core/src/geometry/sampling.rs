//! Deterministic low-discrepancy sequences.

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += f * (index % b) as f64;
        index /= b;
        f *= inv;
    }
    acc
}

/// Point `index` of the Halton sequence in `[0,1)^dim`.
///
/// Index 0 maps to the origin, so callers usually start at 1.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton: dimension {dim} unsupported");
    (0..dim).map(|k| radical_inverse(index, PRIMES[k])).collect()
}

/// Low-discrepancy unit directions in `R^dim`.
///
/// Uniform angles in 2D, area-uniform spherical coordinates in 3D and
/// normalized Halton cube points above.
pub fn unit_directions(count: usize, dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => (0..count)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                let phi = std::f64::consts::TAU * radical_inverse(k as u64 + 1, 2);
                let s = (1.0 - z * z).max(0.0).sqrt();
                vec![s * phi.cos(), s * phi.sin(), z]
            })
            .collect(),
        _ => {
            let mut out = Vec::with_capacity(count);
            let mut idx = 1u64;
            while out.len() < count {
                let p = halton(idx, dim);
                idx += 1;
                let v: Vec<f64> = p.iter().map(|c| 2.0 * c - 1.0).collect();
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                if norm > 1e-3 && norm <= 1.0 {
                    out.push(v.into_iter().map(|c| c / norm).collect());
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base2() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn directions_are_unit() {
        for dim in 2..=5 {
            for d in unit_directions(64, dim) {
                let n: f64 = d.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }
}

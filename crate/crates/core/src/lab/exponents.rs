//! The exponents that govern every bound in this crate.

/// `p = log_3(27/4)`: the critical exponent of the three-term disjoint-union
/// inequality. `3/p` is the counting exponent, `log_2 6` the energy exponent.
#[derive(Clone, Copy, Debug)]
pub struct Exponents {
    pub p3: f64,
    pub three_over_p: f64,
    pub p_energy: f64,
}

impl Exponents {
    pub fn standard() -> Self {
        let p3 = p_k(3);
        Exponents {
            p3,
            three_over_p: 3.0 / p3,
            p_energy: 6f64.ln() / 2f64.ln(),
        }
    }
}

impl Default for Exponents {
    fn default() -> Self {
        Exponents::standard()
    }
}

/// `p_k = log_k(k^k / (k-1)^(k-1))`, the critical exponent of the k-term
/// disjoint-union inequality. `p_k(3)` recovers `log_3(27/4)`.
///
/// Requires `k >= 2`.
pub fn p_k(k: usize) -> f64 {
    assert!(k >= 2, "p_k needs k >= 2");
    let k_f = k as f64;
    let j = k_f - 1.0;
    (k_f * k_f.ln() - j * j.ln()) / k_f.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_values() {
        let e = Exponents::standard();
        assert!((e.p3 - 1.7381404928570851).abs() < 1e-15);
        assert!((e.three_over_p - 1.725982457878719).abs() < 1e-15);
        assert!((e.p_energy - 2.584962500721156).abs() < 1e-15);
        assert!(e.p3 > 1.0 && e.p3 < 2.0);
    }

    #[test]
    fn p_k_matches_closed_forms() {
        assert!((p_k(3) - Exponents::standard().p3).abs() < 1e-15);
        assert!((p_k(2) - 2.0).abs() < 1e-15);
        assert!((p_k(4) - 1.6225562489182657).abs() < 1e-14);
        assert!((p_k(5) - 1.5545875354128556).abs() < 1e-14);
        assert!((p_k(6) - 1.508777991480364).abs() < 1e-14);
    }

    #[test]
    fn p_k_exceeds_trivial_exponent() {
        // k/p_k < k - 1 exactly when p_k > k/(k-1).
        for k in 3..=6 {
            assert!(p_k(k) > k as f64 / (k as f64 - 1.0), "k = {k}");
        }
    }
}

//! Confining potentials `Phi` and their derivatives.
//!
//! The integrators only ever see `value` and `derivative`; the variants exist so that the
//! usual test cases (harmonic well, double well, hard quartic) can be named in a config
//! file. `GaussianGrowth` grows too fast for the dissipativity bound and is kept as the
//! standard negative example. `Polynomial` covers everything else users may want.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    /// `Phi = 0`: no force at all.
    Free,
    /// `Phi(x) = x^2 / 2`: harmonic well with unit stiffness.
    Quadratic,
    /// `Phi(x) = (x^2 - 1)^2 / 4`: two wells at x = +-1, barrier 1/4 at the origin.
    DoubleWell,
    /// `Phi(x) = x^4 / 4`.
    Quartic,
    /// `Phi(x) = exp(x^2)`: grows faster than any polynomial bound allows.
    GaussianGrowth,
    /// `Phi(x) = sum_i coeffs[i] * x^i`, ascending powers.
    Polynomial(Vec<f64>),
}

impl Potential {
    /// Lookup used by the config layer. Coefficients are only meaningful (and then
    /// required) for `"polynomial"`.
    pub fn by_name(name: &str, coefficients: Option<&[f64]>) -> Option<Self> {
        match name {
            "free" => Some(Potential::Free),
            "quadratic" => Some(Potential::Quadratic),
            "double_well" => Some(Potential::DoubleWell),
            "quartic" => Some(Potential::Quartic),
            "gaussian_growth" => Some(Potential::GaussianGrowth),
            "polynomial" => coefficients.map(|c| Potential::Polynomial(c.to_vec())),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Quadratic => 0.5 * x * x,
            Potential::DoubleWell => {
                let w = x * x - 1.0;
                0.25 * w * w
            }
            Potential::Quartic => 0.25 * x * x * x * x,
            Potential::GaussianGrowth => (x * x).exp(),
            Potential::Polynomial(coeffs) => {
                // Horner, highest power first.
                coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Quadratic => x,
            Potential::DoubleWell => x * (x * x - 1.0),
            Potential::Quartic => x * x * x,
            Potential::GaussianGrowth => 2.0 * x * (x * x).exp(),
            Potential::Polynomial(coeffs) => {
                let mut acc = 0.0;
                for i in (1..coeffs.len()).rev() {
                    acc = acc * x + coeffs[i] * i as f64;
                }
                acc
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::Free => "free",
            Potential::Quadratic => "quadratic",
            Potential::DoubleWell => "double_well",
            Potential::Quartic => "quartic",
            Potential::GaussianGrowth => "gaussian_growth",
            Potential::Polynomial(_) => "polynomial",
        }
    }
}

impl std::fmt::Display for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

//! Pinned tolerances of the verification suites.
//!
//! Every value can be overridden from the corpus file (`[tolerances]`) or on
//! the command line (`--tol name=value`).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

macro_rules! tolerances {
    ($($(#[doc = $doc:literal])* $name:ident = $value:expr;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct Tolerances {
            $($(#[doc = $doc])* pub $name: f64,)*
        }

        impl Default for Tolerances {
            fn default() -> Self {
                Tolerances { $($name: $value,)* }
            }
        }

        impl Tolerances {
            pub const NAMES: &'static [&'static str] = &[$(stringify!($name)),*];

            pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(Error::Config(format!("tolerance {name} must be finite and non-negative, got {value}")));
                }
                match name {
                    $(stringify!($name) => self.$name = value,)*
                    _ => return Err(Error::Config(format!(
                        "unknown tolerance {name}; known: {}", Self::NAMES.join(", ")
                    ))),
                }
                Ok(())
            }
        }
    };
}

tolerances! {
    /// Q identity, relative to `max(1, |R| |E|², |E|³)`.
    q_identity = 1e-10;
    /// Okumura gap floor, relative to `|E|³`.
    okumura_gap = 1e-12;
    /// Okumura equality on constructed patterns, relative to `max(1, |E|³)`.
    okumura_equality = 1e-10;
    weyl = 1e-6;
    cotton = 1e-6;
    weyl_divergence = 1e-5;
    codazzi = 1e-6;
    /// Normalized by `max(1, largest term)`.
    elliptic = 1e-5;
    /// Normalized by `max(1, largest term)`.
    weitzenbock = 1e-5;
    /// Lower bound `-kato` on the normalized Kato gap.
    kato = 1e-7;
    conserved = 1e-9;
    closure = 1e-8;
    scalar_curvature = 1e-6;
    /// Floor `-pattern_lambda` on the `(n-1)`-fold eigenvalue.
    pattern_lambda = 1e-8;
    /// `|P|` relative to `∫|E|^{(n-2)/n} R dV` on Derdziński models.
    pinch_relative = 1e-6;
    /// `|P|` on products, relative to `max(1, ∫|E|^{(n-2)/n} R dV)`.
    pinch_product = 1e-12;
    /// Pointwise integrand on products.
    product_integrand = 1e-10;
    /// Smallest `max integrand / scale` that counts as a nontrivial cancellation.
    cancellation_fraction = 0.01;
    regularized = 1e-6;
    /// Quadrature order-doubling change relative to the scale.
    quadrature_doubling = 1e-8;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_by_name() {
        let mut t = Tolerances::default();
        t.set("weyl", 1e-4).unwrap();
        assert_eq!(t.weyl, 1e-4);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("weyl", f64::NAN).is_err());
    }

    #[test]
    fn partial_tables_keep_defaults() {
        let t: Tolerances = toml::from_str("cotton = 2e-6").unwrap();
        assert_eq!(t.cotton, 2e-6);
        assert_eq!(t.weyl, 1e-6);
        assert!(toml::from_str::<Tolerances>("unknown = 1.0").is_err());
    }
}

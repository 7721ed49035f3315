use serde::{Deserialize, Serialize};

/// Time-stepping scheme used inside each physics sub-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Velocities first, then positions from the updated velocities.
    SemiImplicitEuler,
    #[default]
    Rk4,
}

impl std::str::FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euler" | "semi_implicit_euler" | "semi-implicit-euler" => {
                Ok(Integrator::SemiImplicitEuler)
            }
            "rk4" => Ok(Integrator::Rk4),
            other => Err(format!("unknown integrator `{other}`")),
        }
    }
}

/// One classical fourth-order Runge-Kutta step of size `h`.
#[inline]
pub fn rk4_step<const N: usize>(
    y: &[f64; N],
    h: f64,
    f: impl Fn(&[f64; N]) -> [f64; N],
) -> [f64; N] {
    let axpy = |a: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, 0.5 * h));
    let k3 = f(&axpy(y, &k2, 0.5 * h));
    let k4 = f(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_exact_for_cubic_polynomials() {
        // y' = 3t² encoded with t as a state component.
        let f = |s: &[f64; 2]| [3.0 * s[1] * s[1], 1.0];
        let mut s = [0.0, 0.0];
        for _ in 0..4 {
            s = rk4_step(&s, 0.25, f);
        }
        assert!((s[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parses_names() {
        assert_eq!("rk4".parse::<Integrator>().unwrap(), Integrator::Rk4);
        assert_eq!(
            "euler".parse::<Integrator>().unwrap(),
            Integrator::SemiImplicitEuler
        );
        assert!("midpoint".parse::<Integrator>().is_err());
    }
}

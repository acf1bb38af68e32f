use serde::Serialize;

/// Exact unreduced fraction. Counting operations return these so callers can
/// compare results without floating-point round-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Self {
        assert!(den != 0, "zero denominator");
        Ratio { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Cross-multiplied equality, so `265/1000 == 53/200`.
    pub fn eq_exact(self, other: Ratio) -> bool {
        self.num * other.den == other.num * self.den
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_equality_ignores_scaling() {
        assert!(Ratio::new(265, 1000).eq_exact(Ratio::new(53, 200)));
        assert!(!Ratio::new(1, 4).eq_exact(Ratio::new(265, 1000)));
    }
}

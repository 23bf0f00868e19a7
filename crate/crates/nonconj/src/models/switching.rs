use crate::error::{Error, Result};

/// Smooth turn-on `q_scale * (1 + tanh((t - t0)/s)) / 2`.
pub fn switching_function(t: f64, q_scale: f64, t0: f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("switch width s must be > 0, got {s}")));
    }
    Ok(q_scale * 0.5 * (1.0 + ((t - t0) / s).tanh()))
}

/// Dimensionless coupling law multiplying a model's interaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// Unit-scale tanh switch minus its value at t = 0, so the coupling starts at exactly 0.
    Switch { t0: f64, s: f64, offset: f64 },
}

impl Profile {
    pub fn switch(t0: f64, s: f64) -> Result<Self> {
        let offset = switching_function(0.0, 1.0, t0, s)?;
        Ok(Profile::Switch { t0, s, offset })
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::Switch { t0, s, offset } => 0.5 * (1.0 + ((t - t0) / s).tanh()) - offset,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant(_) => 0.0,
            Profile::Switch { t0, s, .. } => {
                let c = ((t - t0) / s).cosh();
                0.5 / (s * c * c)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Constant(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_asymptote_and_one_width() {
        assert_eq!(switching_function(3.0, 2.0, 3.0, 0.5).unwrap(), 1.0);
        assert!((switching_function(1e3, 2.0, 3.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        let v = switching_function(3.5, 2.0, 3.0, 0.5).unwrap();
        assert!((v - (1.0 + 1f64.tanh())).abs() < 1e-15);
        assert!(switching_function(0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn increasing_and_bounded() {
        let mut prev = -1.0;
        for k in 0..200 {
            let t = -10.0 + 0.1 * k as f64;
            let v = switching_function(t, 1.0, 0.0, 1.0).unwrap();
            assert!(v > prev && v > 0.0 && v < 1.0);
            prev = v;
        }
    }

    #[test]
    fn shifted_profile_starts_at_zero() {
        let p = Profile::switch(5.0, 1.0).unwrap();
        assert_eq!(p.value(0.0), 0.0);
        assert!(p.value(40.0) > 0.9999);
        let h = 1e-6;
        let fd = (p.value(5.3 + h) - p.value(5.3 - h)) / (2.0 * h);
        assert!((fd - p.derivative(5.3)).abs() < 1e-8);
    }
}

//! Degree/radian helpers.
//!
//! Angles are carried in degrees throughout the crate because the spring
//! coefficient is specified per degree. Trigonometry goes through these
//! helpers so the conversion happens in one place.

#[inline]
pub fn to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

#[inline]
pub fn to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

#[inline]
pub fn sin_deg(deg: f64) -> f64 {
    to_rad(deg).sin()
}

#[inline]
pub fn cos_deg(deg: f64) -> f64 {
    to_rad(deg).cos()
}

#[inline]
pub fn tan_deg(deg: f64) -> f64 {
    to_rad(deg).tan()
}

#[inline]
pub fn asin_deg(x: f64) -> f64 {
    to_deg(x.asin())
}

/// Wraps an angle into `[-period/2, period/2)`.
pub fn wrap_symmetric(deg: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    (deg + half).rem_euclid(period) - half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_into_hex_lattice() {
        assert!((wrap_symmetric(45.0, 60.0) + 15.0).abs() < 1e-12);
        assert!((wrap_symmetric(-45.0, 60.0) - 15.0).abs() < 1e-12);
        assert!((wrap_symmetric(120.0, 60.0)).abs() < 1e-12);
        assert!((wrap_symmetric(30.0, 60.0) + 30.0).abs() < 1e-12);
    }
}

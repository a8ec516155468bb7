use std::f64::consts::PI;

use super::Cplx;
use crate::{Error, Result};

/// Argument of `z` in (−π, π]. The negative real axis maps to +π regardless
/// of the sign of the zero imaginary part.
pub fn principal_arg(z: Cplx) -> Result<f64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("principal_arg"));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let a = z.im.atan2(z.re);
    Ok(if a <= -PI { PI } else { a })
}

/// Reduce an angle to (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x - two_pi * (x / two_pi).round();
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

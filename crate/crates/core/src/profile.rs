//! One-dimensional transition profiles used for the tailoring functions and the
//! bump function near the degenerate z-locus.
//!
//! Every profile maps `t <= 0` to 0 and `t >= 1` to 1, and is C^2.

/// Quintic smoothstep `6t^5 - 15t^4 + 10t^3`. Maximum slope 15/8.
pub fn quintic(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        let t2 = t * t;
        let v = t2 * t * (10.0 + t * (-15.0 + 6.0 * t));
        let dv = 30.0 * t2 * (1.0 - t) * (1.0 - t);
        (v, dv)
    }
}

/// Ramp with a flat slope in the middle and cubic-smoothstep slope blends of
/// width `blend` at either end.
///
/// The slope is `1 / (1 - blend)` on the plateau, which is also the maximum
/// slope. Returns the value and derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlendedRamp {
    blend: f64,
    slope: f64,
}

impl BlendedRamp {
    pub fn new(blend: f64) -> Self {
        assert!(blend > 0.0 && blend <= 0.5, "blend width must lie in (0, 1/2]");
        BlendedRamp {
            blend,
            slope: 1.0 / (1.0 - blend),
        }
    }

    pub fn max_slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (w, m) = (self.blend, self.slope);
        if t <= 0.0 {
            (0.0, 0.0)
        } else if t >= 1.0 {
            (1.0, 0.0)
        } else if t < w {
            let x = t / w;
            // integral of the cubic smoothstep: x^3 - x^4/2
            (m * w * x * x * x * (1.0 - 0.5 * x), m * x * x * (3.0 - 2.0 * x))
        } else if t <= 1.0 - w {
            (m * (0.5 * w + (t - w)), m)
        } else {
            let x = (1.0 - t) / w;
            (1.0 - m * w * x * x * x * (1.0 - 0.5 * x), m * x * x * (3.0 - 2.0 * x))
        }
    }
}

impl Default for BlendedRamp {
    fn default() -> Self {
        BlendedRamp::new(0.1)
    }
}

//! Shared geometric primitives: small vectors, wrapped angles, headings.
//!
//! Angles are plain `f64` radians everywhere. Nothing stays wrapped by
//! construction; call [`wrap_angle`] at the point of use.

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Time in seconds. Sensor streams and queues stamp samples with this.
pub type Stamp = f64;

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
const PI: f64 = core::f64::consts::PI;

/// Maps an angle onto `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    debug_assert!(a.is_finite(), "wrap_angle needs a finite angle");
    let w = a - TWO_PI * ((a + PI) / TWO_PI).floor();
    // w sits in [-pi, pi); fold the closed end onto +pi.
    if w <= -PI {
        PI
    } else {
        w
    }
}

/// Signed shortest rotation carrying `b` onto `a`, in `(-pi, pi]`.
pub fn angular_difference(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// Planar heading of a vector. `None` for the zero vector, where no
/// heading exists; callers branch rather than receive an arbitrary 0.
pub fn heading_of(v: Vec2) -> Option<f64> {
    if v.x == 0.0 && v.y == 0.0 {
        None
    } else {
        Some(v.y.atan2(v.x))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector at the given heading.
    pub fn from_heading(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Horizontal norm, ignoring z.
    pub fn norm_xy(self) -> f64 {
        self.xy().norm()
    }

    pub fn scaled(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Angle between two nonzero vectors, in [0, pi].
    pub fn angle_to(self, o: Vec3) -> f64 {
        let denom = self.norm() * o.norm();
        debug_assert!(denom > 0.0, "angle_to needs nonzero vectors");
        let c = self.dot(o) / denom;
        c.clamp(-1.0, 1.0).acos()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scaled(s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scaled(-1.0)
    }
}

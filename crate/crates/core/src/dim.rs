//! Spatial dimension and the exponents of the energy-critical problem.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact rational exponent `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    fn reduced(num: u32, den: u32) -> Self {
        let g = gcd(num, den);
        Exponent {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Spatial dimension, restricted to 3, 4 or 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const THREE: Dimension = Dimension(3);
    pub const FOUR: Dimension = Dimension(4);
    pub const FIVE: Dimension = Dimension(5);
    pub const ALL: [Dimension; 3] = [Self::THREE, Self::FOUR, Self::FIVE];

    pub fn new(n: u32) -> Result<Self> {
        match n {
            3..=5 => Ok(Dimension(n)),
            _ => Err(Error::InvalidDimension(n)),
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Nonlinearity power `4/(n-2)`.
    pub fn critical_power(self) -> Exponent {
        Exponent::reduced(4, self.0 - 2)
    }

    /// Sobolev exponent `2* = 2n/(n-2)`.
    pub fn two_star(self) -> Exponent {
        Exponent::reduced(2 * self.0, self.0 - 2)
    }

    /// Space-time exponent of the S-norm, `2(n+2)/(n-2)`.
    pub fn s_exponent(self) -> Exponent {
        Exponent::reduced(2 * (self.0 + 2), self.0 - 2)
    }

    /// Surface area of the unit sphere in R^n.
    pub fn sphere_area(self) -> f64 {
        match self.0 {
            3 => 4.0 * PI,
            4 => 2.0 * PI * PI,
            5 => 8.0 * PI * PI / 3.0,
            _ => unreachable!(),
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

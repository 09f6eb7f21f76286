//! Radial cutoff weights with a C⁴ polynomial bridge on `[R, 2R]`.
//!
//! `MassCutoff` is `1` on `r ≤ R` and `0` beyond `2R`. `VirialWeight` is
//! `r²` on `r ≤ R` and constant beyond `2R`. Both bridges are the lowest
//! degree polynomials matching value and four derivatives at the joins;
//! for the virial weight the constant it settles to is whatever the
//! minimal-degree bridge for `φ'` integrates to.

use serde::{Deserialize, Serialize};

use crate::dim::Dimension;
use crate::error::{Error, Result};

/// Dense polynomial in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly(Vec<f64>);

impl Poly {
    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Antiderivative vanishing at 0, plus `c`.
    fn integral(&self, c: f64) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(c);
        for (k, a) in self.0.iter().enumerate() {
            out.push(a / (k + 1) as f64);
        }
        Poly(out)
    }

    fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect())
    }

    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, a| acc * t + a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CutoffKind {
    MassCutoff,
    VirialWeight,
}

/// `φ` and its first four radial derivatives at a point.
pub type Jet = [f64; 5];

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffWeight {
    kind: CutoffKind,
    radius: f64,
    // bridge in t = (r - R)/R and its derivatives 0..=4
    bridge: [Poly; 5],
}

fn derivatives(p: Poly) -> [Poly; 5] {
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let d4 = d3.derivative();
    [p, d1, d2, d3, d4]
}

impl CutoffWeight {
    pub fn new(kind: CutoffKind, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cutoff radius must be positive, got {radius}"
            )));
        }
        let bridge = match kind {
            // 1 - t^5 (126 - 420 t + 540 t^2 - 315 t^3 + 70 t^4)
            CutoffKind::MassCutoff => Poly(vec![1.0, 0.0, 0.0, 0.0, 0.0, -126.0, 420.0, -540.0, 315.0, -70.0]),
            // p' = (1 - t)^4 (2 + 10 t + 28 t^2 + 60 t^3), p(0) = 1
            CutoffKind::VirialWeight => {
                let one_minus = Poly(vec![1.0, -1.0]);
                let quartic = one_minus.mul(&one_minus).mul(&one_minus).mul(&one_minus);
                quartic.mul(&Poly(vec![2.0, 10.0, 28.0, 60.0])).integral(1.0)
            }
        };
        Ok(CutoffWeight {
            kind,
            radius,
            bridge: derivatives(bridge),
        })
    }

    pub fn mass(radius: f64) -> Result<Self> {
        Self::new(CutoffKind::MassCutoff, radius)
    }

    pub fn virial(radius: f64) -> Result<Self> {
        Self::new(CutoffKind::VirialWeight, radius)
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `[φ, φ', φ'', φ''', φ'''']` at `r ≥ 0`.
    pub fn jet(&self, r: f64) -> Jet {
        let big_r = self.radius;
        // Scale factor of the k-th derivative: R^{2-k} for the virial weight, R^{-k} for the mass cutoff.
        let base = match self.kind {
            CutoffKind::MassCutoff => 1.0,
            CutoffKind::VirialWeight => big_r * big_r,
        };
        if r <= big_r {
            return match self.kind {
                CutoffKind::MassCutoff => [1.0, 0.0, 0.0, 0.0, 0.0],
                CutoffKind::VirialWeight => [r * r, 2.0 * r, 2.0, 0.0, 0.0],
            };
        }
        let t = ((r - big_r) / big_r).min(1.0);
        let mut jet = [0.0; 5];
        let mut scale = base;
        for (k, slot) in jet.iter_mut().enumerate() {
            *slot = scale * self.bridge[k].eval(t);
            scale /= big_r;
        }
        if r >= 2.0 * big_r {
            jet[1..].iter_mut().for_each(|v| *v = 0.0);
        }
        jet
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r)[0]
    }

    pub fn first(&self, r: f64) -> f64 {
        self.jet(r)[1]
    }

    pub fn second(&self, r: f64) -> f64 {
        self.jet(r)[2]
    }

    /// Constant value taken beyond `2R`.
    pub fn plateau(&self) -> f64 {
        self.value(2.0 * self.radius)
    }

    /// Radial Laplacian `φ'' + (n−1)φ'/r`.
    pub fn laplacian(&self, r: f64, dim: Dimension) -> f64 {
        if r <= self.radius {
            return match self.kind {
                CutoffKind::MassCutoff => 0.0,
                CutoffKind::VirialWeight => 2.0 * dim.as_f64(),
            };
        }
        let j = self.jet(r);
        j[2] + (dim.as_f64() - 1.0) * j[1] / r
    }

    /// Radial bi-Laplacian
    /// `φ'''' + 2(n−1)φ'''/r + (n−1)(n−3)(φ''/r² − φ'/r³)`.
    pub fn bilaplacian(&self, r: f64, dim: Dimension) -> f64 {
        if r <= self.radius {
            return 0.0;
        }
        let j = self.jet(r);
        let n = dim.as_f64();
        j[4] + 2.0 * (n - 1.0) * j[3] / r + (n - 1.0) * (n - 3.0) * (j[2] / (r * r) - j[1] / (r * r * r))
    }
}

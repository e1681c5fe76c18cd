//! The logarithm manifold `E⁺ = {(r·exp p, p) : r > 0, p ∈ Im K}` with the
//! exponential `E(q) = (exp q, Im q)` and its inverse `L(q, p) = log|q| + p`,
//! and the n-th root manifold with `φₙ` and `Rₙ(q, s) = |q|^{1/n}·s/n`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::{HyperNum, ImaginaryUnit, SlicePoint};
use crate::error::{Error, Result};

/// Tolerance for accepting a point as lying on `E⁺` or `Q⁺(n)`.
pub const MANIFOLD_TOLERANCE: f64 = 1e-9;

/// A point `(q, p)` of the logarithm manifold; `p` is the argument of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPoint {
    q: HyperNum,
    p: HyperNum,
}

impl LogPoint {
    /// Validates `q = |q|·exp(p)` with `p` purely imaginary.
    pub fn new(q: HyperNum, p: HyperNum) -> Result<Self> {
        if q.algebra() != p.algebra() {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: p.dim(),
            });
        }
        let r = q.norm();
        if r == 0.0 {
            return Err(Error::Pole);
        }
        if p.re().abs() > MANIFOLD_TOLERANCE {
            return Err(Error::NotOnManifold(p.re().abs()));
        }
        let p = p.im();
        let residual = (p.exp() * r).max_abs_diff(&q) / r.max(1.0);
        if residual > MANIFOLD_TOLERANCE {
            return Err(Error::NotOnManifold(residual));
        }
        Ok(LogPoint { q, p })
    }

    pub fn q(&self) -> HyperNum {
        self.q
    }

    pub fn p(&self) -> HyperNum {
        self.p
    }

    /// `L(q, p) = log|q| + p`.
    pub fn logarithm(&self) -> HyperNum {
        HyperNum::real(self.q.algebra(), self.q.norm().ln()) + self.p
    }
}

/// `E(x + Iy) = (exp(x + Iy), Iy)`, defined on all of the algebra.
pub fn exponential(q: &HyperNum) -> LogPoint {
    LogPoint {
        q: q.exp(),
        p: q.im(),
    }
}

/// `L(q, p) = log|q| + p` after checking that `(q, p)` lies on `E⁺`.
pub fn logarithm(q: &HyperNum, p: &HyperNum) -> Result<HyperNum> {
    Ok(LogPoint::new(*q, *p)?.logarithm())
}

/// `(|Im q|, Im q/|Im q|)`, or `None` on the real axis.
fn split(q: &HyperNum) -> Option<(f64, ImaginaryUnit)> {
    let im = q.im();
    let y = im.norm();
    (y > 0.0).then(|| (y, ImaginaryUnit::from_imaginary(&im).expect("nonzero imaginary part")))
}

/// Principal argument `θ ∈ [0, π]` and unit of `q`. Negative reals need
/// `negative_unit`, since no continuous choice exists there.
fn principal_arg(q: &HyperNum, negative_unit: Option<ImaginaryUnit>) -> Result<(f64, ImaginaryUnit)> {
    if q.norm() == 0.0 {
        return Err(Error::Pole);
    }
    match split(q) {
        Some((y, unit)) => Ok((y.atan2(q.re()), unit)),
        None if q.re() > 0.0 => Ok((0.0, ImaginaryUnit::default_for(q.algebra()))),
        None => match negative_unit {
            Some(u) if u.algebra() == q.algebra() => Ok((PI, u)),
            Some(u) => Err(Error::DimensionMismatch {
                left: u.algebra().dim(),
                right: q.dim(),
            }),
            None => Err(Error::Branch),
        },
    }
}

/// `log|q| + I_q·θ` with `θ = atan2(|Im q|, Re q)`. On the negative real axis
/// the caller must supply the unit.
pub fn principal_log(q: &HyperNum, negative_unit: Option<ImaginaryUnit>) -> Result<HyperNum> {
    let (theta, unit) = principal_arg(q, negative_unit)?;
    Ok(HyperNum::real(q.algebra(), q.norm().ln()) + unit.value() * theta)
}

/// `|q|^{1/n}·exp(I_q·θ/n)`.
pub fn principal_nthroot(n: u32, q: &HyperNum, negative_unit: Option<ImaginaryUnit>) -> Result<HyperNum> {
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    let (theta, unit) = principal_arg(q, negative_unit)?;
    let t = theta / n as f64;
    let r = q.norm().powf(1.0 / n as f64);
    Ok((HyperNum::real(q.algebra(), t.cos()) + unit.value() * t.sin()) * r)
}

/// Logarithms of `q` over several windings: `log|q| + I_q(θ + 2kπ)` for
/// non-real `q`, and `log|q| + J·2kπ` or `log|q| + J(2k + 1)π` for every
/// listed unit `J` on the positive or negative real axis.
pub fn log_preimages(
    q: &HyperNum,
    units: &[ImaginaryUnit],
    windings: RangeInclusive<i32>,
) -> Result<Vec<HyperNum>> {
    let r = q.norm();
    if r == 0.0 {
        return Err(Error::Pole);
    }
    let base = HyperNum::real(q.algebra(), r.ln());
    let mut out = Vec::new();
    match split(q) {
        Some((y, unit)) => {
            let theta = y.atan2(q.re());
            for k in windings {
                out.push(base + unit.value() * (theta + 2.0 * PI * k as f64));
            }
        }
        None => {
            let offset = if q.re() < 0.0 { PI } else { 0.0 };
            for u in units {
                if u.algebra() != q.algebra() {
                    return Err(Error::DimensionMismatch {
                        left: u.algebra().dim(),
                        right: q.dim(),
                    });
                }
                for k in windings.clone() {
                    out.push(base + u.value() * (offset + 2.0 * PI * k as f64));
                }
            }
        }
    }
    Ok(out)
}

/// A point `(q, s)` of the n-th root manifold or its closure, `|s| = n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPoint {
    n: u32,
    q: HyperNum,
    s: HyperNum,
}

impl RootPoint {
    pub fn new(n: u32, q: HyperNum, s: HyperNum) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("n = {n} must be at least 2")));
        }
        if q.algebra() != s.algebra() {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: s.dim(),
            });
        }
        let residual = (s.norm() - n as f64).abs();
        if residual > MANIFOLD_TOLERANCE * n as f64 {
            return Err(Error::NotOnManifold(residual));
        }
        Ok(RootPoint { n, q, s })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> HyperNum {
        self.q
    }

    pub fn s(&self) -> HyperNum {
        self.s
    }

    /// `Rₙ(q, s) = |q|^{1/n}·s/n`.
    pub fn root(&self) -> HyperNum {
        let n = self.n as f64;
        (self.s / n) * self.q.norm().powf(1.0 / n)
    }
}

/// `φₙ(x + Iy) = (exp(x + Iy), n·exp(Iy/n))` on `ℝ⁺ × 𝕊(−πn, πn)`.
pub fn phi_n(n: u32, p: &SlicePoint) -> Result<RootPoint> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} must be at least 2")));
    }
    let nf = n as f64;
    if !(p.x > 0.0 && p.y.abs() < nf * PI) {
        return Err(Error::Domain { x: p.x, y: p.y });
    }
    let q = p.reconstruct().exp();
    let t = p.y / nf;
    let s = (HyperNum::real(p.algebra(), t.cos()) + p.unit.value() * t.sin()) * nf;
    Ok(RootPoint { n, q, s })
}

/// `Rₙ(q, s)` after checking `|s| = n`.
pub fn nth_root(n: u32, q: &HyperNum, s: &HyperNum) -> Result<HyperNum> {
    Ok(RootPoint::new(n, *q, *s)?.root())
}

impl Serialize for LogPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LogPoint", 2)?;
        st.serialize_field("q", self.q.coeffs())?;
        st.serialize_field("p", self.p.coeffs())?;
        st.end()
    }
}

impl Serialize for RootPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("RootPoint", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("q", self.q.coeffs())?;
        st.serialize_field("s", self.s.coeffs())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn q(w: f64, i: f64, j: f64, k: f64) -> HyperNum {
        HyperNum::quaternion(w, i, j, k)
    }

    fn unit(k: usize) -> ImaginaryUnit {
        ImaginaryUnit::basis(Algebra::Quaternion, k)
    }

    #[test]
    fn exponential_examples() {
        let e0 = exponential(&HyperNum::zero(Algebra::Quaternion));
        assert_eq!(e0.q(), HyperNum::one(Algebra::Quaternion));
        assert_eq!(e0.p(), HyperNum::zero(Algebra::Quaternion));
        let t = PI / 3.0;
        let e = exponential(&q(1.0, t, 0.0, 0.0));
        let expected = q(1f64.exp() * t.cos(), 1f64.exp() * t.sin(), 0.0, 0.0);
        assert!(e.q().max_abs_diff(&expected) < 1e-15);
        let m = exponential(&q(0.0, PI, 0.0, 0.0));
        assert!(m.q().max_abs_diff(&q(-1.0, 0.0, 0.0, 0.0)) < 1e-15);
        assert!(m.logarithm().max_abs_diff(&q(0.0, PI, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn logarithm_validates() {
        assert_eq!(
            logarithm(&HyperNum::one(Algebra::Quaternion), &HyperNum::zero(Algebra::Quaternion)).unwrap(),
            HyperNum::zero(Algebra::Quaternion)
        );
        assert!(matches!(
            logarithm(&q(1.0, 0.0, 0.0, 0.0), &q(0.0, 1.0, 0.0, 0.0)),
            Err(Error::NotOnManifold(_))
        ));
        assert_eq!(
            logarithm(&HyperNum::zero(Algebra::Quaternion), &HyperNum::zero(Algebra::Quaternion)),
            Err(Error::Pole)
        );
    }

    #[test]
    fn principal_branch() {
        assert_eq!(principal_log(&HyperNum::one(Algebra::Octonion), None).unwrap().norm(), 0.0);
        let l = principal_log(&q(0.0, 1.0, 0.0, 0.0), None).unwrap();
        assert!(l.max_abs_diff(&q(0.0, PI / 2.0, 0.0, 0.0)) < 1e-15);
        let w = q(1.0, 0.0, 1.0, 0.0).exp();
        assert!(principal_log(&w, None).unwrap().max_abs_diff(&q(1.0, 0.0, 1.0, 0.0)) < 1e-15);
        assert_eq!(principal_log(&q(-2.0, 0.0, 0.0, 0.0), None), Err(Error::Branch));
        let forced = principal_log(&q(-1.0, 0.0, 0.0, 0.0), Some(unit(3))).unwrap();
        assert!(forced.max_abs_diff(&q(0.0, 0.0, 0.0, PI)) < 1e-15);
    }

    #[test]
    fn roots() {
        let two = principal_nthroot(2, &HyperNum::real(Algebra::Quaternion, 4.0), None).unwrap();
        assert!((two.re() - 2.0).abs() < 1e-15);
        assert_eq!(
            principal_nthroot(2, &HyperNum::real(Algebra::Quaternion, -4.0), None),
            Err(Error::Branch)
        );
        let r = principal_nthroot(4, &q(0.0, 0.0, 1.0, 0.0), None).unwrap();
        let t = PI / 8.0;
        assert!(r.max_abs_diff(&q(t.cos(), 0.0, t.sin(), 0.0)) < 1e-15);
    }

    #[test]
    fn phi_and_r() {
        let p = phi_n(2, &SlicePoint::real(1.0, unit(1))).unwrap();
        assert!((p.q().re() - 1f64.exp()).abs() < 1e-15);
        assert_eq!(p.s(), HyperNum::real(Algebra::Quaternion, 2.0));
        let p = phi_n(2, &SlicePoint::new(1.0, PI, unit(1)).unwrap()).unwrap();
        assert!(p.q().max_abs_diff(&q(-1f64.exp(), 0.0, 0.0, 0.0)) < 1e-15);
        assert!(p.s().max_abs_diff(&q(0.0, 2.0, 0.0, 0.0)) < 1e-15);
        assert!(phi_n(2, &SlicePoint::new(-1.0, 0.0, unit(1)).unwrap()).is_err());
        assert!(phi_n(2, &SlicePoint::new(1.0, 2.0 * PI, unit(1)).unwrap()).is_err());

        let p = phi_n(3, &SlicePoint::new(8f64.ln(), PI, unit(2)).unwrap()).unwrap();
        let root = p.root();
        let t = PI / 3.0;
        assert!(root.max_abs_diff(&q(2.0 * t.cos(), 0.0, 2.0 * t.sin(), 0.0)) < 1e-14);
        assert!(root.powi(3).max_abs_diff(&q(-8.0, 0.0, 0.0, 0.0)) < 1e-13);

        for r in [0.0, 0.5, 8.0] {
            let a = HyperNum::real(Algebra::Quaternion, r);
            let minus = nth_root(3, &a, &HyperNum::real(Algebra::Quaternion, -3.0)).unwrap();
            assert_eq!(minus.re(), -r.powf(1.0 / 3.0));
        }
        assert!(matches!(
            nth_root(3, &q(1.0, 0.0, 0.0, 0.0), &q(2.0, 0.0, 0.0, 0.0)),
            Err(Error::NotOnManifold(_))
        ));
    }

    #[test]
    fn negative_reals_have_many_logs() {
        let x = HyperNum::real(Algebra::Octonion, -2.0);
        let units = [
            ImaginaryUnit::basis(Algebra::Octonion, 1),
            ImaginaryUnit::basis(Algebra::Octonion, 5),
        ];
        let logs = log_preimages(&x, &units, 0..=0).unwrap();
        assert_eq!(logs.len(), 2);
        assert!(logs[0].max_abs_diff(&logs[1]) > 1.0);
        for l in logs {
            assert!(l.exp().max_abs_diff(&x) < 1e-12);
        }
    }

    #[test]
    fn serializes_as_coefficients() {
        let e = serde_json::to_string(&exponential(&HyperNum::zero(Algebra::Quaternion))).unwrap();
        assert_eq!(e, r#"{"q":[1.0,0.0,0.0,0.0],"p":[0.0,0.0,0.0,0.0]}"#);
    }
}

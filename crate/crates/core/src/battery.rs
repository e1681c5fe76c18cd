//! Reproduction battery behind `hyperslice verify-paper`. Every check is
//! seeded and reports its worst residual, so two runs with the same seed
//! produce identical reports.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Algebra, Basis, HyperNum, ImaginaryUnit, SlicePoint};
use crate::differential::{block_report, CertifyConfig, Condition, DifferentialMatrix};
use crate::error::Result;
use crate::logroot::{exponential, log_preimages, nth_root, principal_log, principal_nthroot};
use crate::manifolds::{
    deformation_coefficients, embedded_catenoid, embedded_helicoid, param_sphere,
    sphere_transition_composed, ChartParams, ManifoldChart, Pole,
};
use crate::parallel::{max_of, Execution};
use crate::sampling::{random_hypernum, random_unit, rng};
use crate::stem::{representation_formula, StemFunction, StemPartials, SymmetricDomain};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    /// Worst residual (or the quantity named in `detail`).
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl BatteryReport {
    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = format!("{:<3} {:<28} {:>12} {:>10}  {}\n", "id", "check", "value", "tol", "result");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<3} {:<28} {:>12.3e} {:>10.1e}  {}\n",
                c.id,
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(if self.pass { "all checks passed\n" } else { "some checks FAILED\n" });
        out
    }
}

fn check(id: u32, name: &str, value: f64, tolerance: f64, detail: String) -> Check {
    Check {
        id,
        name: name.to_string(),
        value,
        tolerance,
        pass: value <= tolerance,
        detail,
    }
}

const DIMS: [Algebra; 2] = [Algebra::Quaternion, Algebra::Octonion];

/// Runs all checks.
pub fn verify_paper(seed: u64, exec: Execution) -> Result<BatteryReport> {
    let checks = vec![
        algebra_laws(seed, exec),
        representation(seed, exec)?,
        jacobian_oracle(seed, exec)?,
        closed_form_matrices(seed, exec)?,
        sphere(seed, exec)?,
        certificates(seed)?,
        psi_control(seed)?,
        deformation_family(exec)?,
        log_root(seed, exec)?,
        obstruction()?,
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(BatteryReport { seed, checks, pass })
}

fn algebra_laws(seed: u64, exec: Execution) -> Check {
    let n = 10_000;
    let mut worst = 0.0f64;
    for (k, a) in DIMS.iter().enumerate() {
        let res = exec.map_range(n, |i| {
            let mut r = rng(seed ^ ((k as u64) << 40) ^ i as u64);
            let p = random_hypernum(&mut r, *a);
            let q = random_hypernum(&mut r, *a);
            let scale = p.norm() * q.norm();
            let norm = ((p * q).norm() - scale).abs() / scale;
            let left = ((p * p) * q).max_abs_diff(&(p * (p * q))) / (p.norm_sqr() * q.norm());
            let right = ((q * p) * p).max_abs_diff(&(q * (p * p))) / (p.norm_sqr() * q.norm());
            let conj = (p * q).conj().max_abs_diff(&(q.conj() * p.conj())) / scale;
            norm.max(left).max(right).max(conj)
        });
        worst = worst.max(max_of(res));
    }
    check(
        1,
        "algebra laws",
        worst,
        1e-12,
        format!("{n} pairs per dimension; |pq|=|p||q|, alternativity, conj(pq)=conj(q)conj(p)"),
    )
}

fn random_polynomial<R: Rng>(r: &mut R, a: Algebra) -> Vec<HyperNum> {
    let degree = r.random_range(0..=5);
    (0..=degree).map(|_| random_hypernum(r, a)).collect()
}

fn distinct_units<R: Rng>(r: &mut R, a: Algebra) -> (ImaginaryUnit, ImaginaryUnit) {
    let m = random_unit(r, a);
    loop {
        let n = random_unit(r, a);
        if (m.value() - n.value()).norm() > 1e-3 {
            return (m, n);
        }
    }
}

/// `Σ qᵏ aₖ` evaluated directly in the algebra.
pub fn eval_polynomial(coeffs: &[HyperNum], q: &HyperNum) -> HyperNum {
    coeffs
        .iter()
        .enumerate()
        .fold(HyperNum::zero(q.algebra()), |acc, (k, c)| acc + q.powi(k as u32) * *c)
}

fn representation(seed: u64, exec: Execution) -> Result<Check> {
    let n = 1000;
    let mut worst = 0.0f64;
    for (k, a) in DIMS.iter().enumerate() {
        let res = exec.map_range(n, |i| -> Result<f64> {
            let mut r = rng(seed ^ 0x2000_0000 ^ ((k as u64) << 40) ^ i as u64);
            let coeffs = random_polynomial(&mut r, *a);
            let stem = StemFunction::polynomial(coeffs.clone())?;
            let (m, nn) = distinct_units(&mut r, *a);
            let l = random_unit(&mut r, *a);
            let x = r.random_range(-2.0..=2.0);
            let y = r.random_range(0.0..=2.0);
            let f_m = stem.eval_slice(&SlicePoint::new(x, y, m)?)?[0];
            let f_n = stem.eval_slice(&SlicePoint::new(x, y, nn)?)?[0];
            let predicted = representation_formula(&f_m, &f_n, &m, &nn, &l)?;
            let direct = eval_polynomial(&coeffs, &SlicePoint::new(x, y, l)?.reconstruct());
            Ok(predicted.max_abs_diff(&direct) / direct.norm().max(1.0))
        });
        worst = worst.max(max_of(res.into_iter().collect::<Result<Vec<_>>>()?));
    }
    Ok(check(
        2,
        "representation formula",
        worst,
        1e-10,
        format!("{n} random polynomial stems per dimension"),
    ))
}

fn catalog(a: Algebra) -> Result<Vec<ManifoldChart>> {
    let mut charts = vec![
        ManifoldChart::sphere(Pole::North, a),
        ManifoldChart::sphere(Pole::South, a),
        ManifoldChart::helicoid(a),
        ManifoldChart::catenoid(a),
        ManifoldChart::deformation(PI / 5.0, a)?,
        ManifoldChart::nroot(3, a)?,
        ManifoldChart::log(a),
        ManifoldChart::from_name("graph:(z^3 - 2*z, exp(z))", &ChartParams { algebra: a, ..Default::default() })?,
    ];
    if a == Algebra::Quaternion {
        charts.push(ManifoldChart::psi(a)?);
    }
    Ok(charts)
}

fn jacobian_oracle(seed: u64, exec: Execution) -> Result<Check> {
    let n = 1000;
    let mut worst = 0.0f64;
    let mut charts = 0;
    for a in DIMS {
        for (c, chart) in catalog(a)?.iter().enumerate() {
            charts += 1;
            let pts = chart.sample_points(seed ^ 0x3000 ^ c as u64, n);
            let res = exec.map(&pts, |p| -> Result<f64> {
                let basis = p.unit.complete_basis();
                let exact = chart.jacobian(p, &basis)?;
                let numeric = chart.jacobian_numeric(p, &basis, crate::differential::DEFAULT_STEP)?;
                Ok(exact.max_abs_diff(&numeric))
            });
            worst = worst.max(max_of(res.into_iter().collect::<Result<Vec<_>>>()?));
        }
    }
    Ok(check(
        3,
        "jacobian oracle",
        worst,
        1e-6,
        format!("{charts} chart/dimension pairs, {n} points each, h = 1e-5"),
    ))
}

/// Closed-form differentials in basis coordinates: first factor of the
/// helicoid and n-th root charts, catenoid, and the three second factors.
fn transcribed(name: &str, p: &SlicePoint, n: f64) -> DifferentialMatrix {
    let d = p.algebra().dim();
    let (x, y) = (p.x, p.y);
    let (sh, ch) = (x.sinh(), x.cosh());
    let first = |lead: f64, cross: f64, perp: f64| {
        // [[lead cos y, −cross sin y], [lead sin y, cross cos y]] ⊕ perp·I
        let mut m = nalgebra::DMatrix::zeros(d, d);
        m[(0, 0)] = lead * y.cos();
        m[(0, 1)] = -cross * y.sin();
        m[(1, 0)] = lead * y.sin();
        m[(1, 1)] = cross * y.cos();
        for l in 2..d {
            m[(l, l)] = perp;
        }
        m
    };
    let sinc = |a: f64| if y == 0.0 { a } else { a * y.sin() / y };
    let m = match name {
        "helicoid" => {
            let mut m = nalgebra::DMatrix::zeros(2 * d - 1, d);
            m.view_mut((0, 0), (d, d)).copy_from(&first(ch, sh, sinc(sh)));
            for l in 1..d {
                m[(d + l - 1, l)] = 1.0;
            }
            m
        }
        "catenoid" => {
            let mut m = nalgebra::DMatrix::zeros(d + 1, d);
            m.view_mut((0, 0), (d, d)).copy_from(&first(sh, ch, sinc(ch)));
            m[(d, 0)] = 1.0;
            m
        }
        _ => {
            let mut m = nalgebra::DMatrix::zeros(2 * d, d);
            m.view_mut((0, 0), (d, d)).copy_from(&first(ch, sh, sinc(sh)));
            m[(d, 1)] = -(y / n).sin();
            m[(d + 1, 1)] = (y / n).cos();
            let perp = if y == 0.0 { 1.0 } else { n * (y / n).sin() / y };
            for l in 2..d {
                m[(d + l, l)] = perp;
            }
            m
        }
    };
    DifferentialMatrix::from_matrix(m)
}

fn closed_form_matrices(seed: u64, exec: Execution) -> Result<Check> {
    let n_pts = 100;
    let mut worst = 0.0f64;
    for (k, a) in DIMS.iter().enumerate() {
        for (c, name) in ["helicoid", "catenoid", "nroot"].iter().enumerate() {
            for n in [2u32, 5] {
                if *name != "nroot" && n != 2 {
                    continue;
                }
                let chart = ManifoldChart::from_name(name, &ChartParams { algebra: *a, n, ..Default::default() })?;
                let mut pts = chart.sample_points(seed ^ 0x4000 ^ ((k * 8 + c) as u64), n_pts);
                for p in pts.iter_mut().step_by(5) {
                    p.y = 0.0;
                }
                let res = exec.map(&pts, |p| -> Result<f64> {
                    let basis = p.unit.complete_basis();
                    let j = chart.jacobian_in_basis(p, &basis)?;
                    Ok(j.max_abs_diff(&transcribed(name, p, n as f64)))
                });
                worst = worst.max(max_of(res.into_iter().collect::<Result<Vec<_>>>()?));
            }
        }
    }
    Ok(check(
        4,
        "closed-form matrices",
        worst,
        1e-12,
        format!("helicoid, catenoid, nroot (n = 2, 5); {n_pts} points each, every fifth on the real axis"),
    ))
}

fn sphere(seed: u64, exec: Execution) -> Result<Check> {
    let n = 500;
    let (mut gram, mut image, mut trans) = (0.0f64, 0.0f64, 0.0f64);
    for (k, a) in DIMS.iter().enumerate() {
        for pole in [Pole::North, Pole::South] {
            let chart = ManifoldChart::sphere(pole, *a);
            let pts = chart.sample_points(seed ^ 0x5000 ^ k as u64, n);
            let res = exec.map(&pts, |p| -> Result<(f64, f64)> {
                let j = chart.jacobian(p, &p.unit.complete_basis())?;
                let g = j.matrix().transpose() * j.matrix();
                let kf = 4.0 / (1.0 + p.x * p.x + p.y * p.y).powi(2);
                let dev = (g - nalgebra::DMatrix::identity(a.dim(), a.dim()) * kf).abs().max();
                let v = param_sphere(pole, p);
                let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok((dev, (norm - 1.0).abs()))
            });
            for r in res {
                let (g, i) = r?;
                gram = gram.max(g);
                image = image.max(i);
            }
        }
        let res = exec.map_range(n, |i| -> Result<f64> {
            let mut r = rng(seed ^ 0x5100 ^ ((k as u64) << 40) ^ i as u64);
            let q = random_hypernum(&mut r, *a) * r.random_range(0.1..=3.0);
            let inv = q.inv()?;
            Ok(sphere_transition_composed(&q)?.max_abs_diff(&inv) / inv.norm())
        });
        trans = trans.max(max_of(res.into_iter().collect::<Result<Vec<_>>>()?));
    }
    // Each quantity is compared with its own tolerance; `value` is the worst
    // ratio residual/tolerance.
    let ratio = (gram / 1e-10).max(image / 1e-13).max(trans / 1e-12);
    Ok(check(
        5,
        "sphere",
        ratio,
        1.0,
        format!("gram {gram:.3e} (tol 1e-10), |image|-1 {image:.3e} (tol 1e-13), transition {trans:.3e} (tol 1e-12)"),
    ))
}

/// `F₁ = e^{−|y|}(cos x, sin x)`, `F₂ = 0` on a band away from the real axis.
pub fn zero_f2_stem() -> StemFunction {
    StemFunction::real("zero-f2", 2, SymmetricDomain::band(1.0, 2.0), |x, y| {
        let e = (-y.abs()).exp();
        (vec![e * x.cos(), e * x.sin()], vec![0.0, 0.0])
    })
    .with_partials(|x, y| {
        let e = (-y.abs()).exp();
        let s = -y.signum();
        StemPartials::real(
            &[-e * x.sin(), e * x.cos()],
            &[s * e * x.cos(), s * e * x.sin()],
            &[0.0, 0.0],
            &[0.0, 0.0],
        )
    })
}

fn certificates(seed: u64) -> Result<Check> {
    let cfg = CertifyConfig {
        seed,
        ..Default::default()
    };
    let mut failures = Vec::new();
    let mut certified = 0;
    for a in DIMS {
        let mut charts = vec![
            ManifoldChart::helicoid(a),
            ManifoldChart::catenoid(a),
            ManifoldChart::nroot(2, a)?,
            ManifoldChart::nroot(3, a)?,
        ];
        for k in 0..=4 {
            charts.push(ManifoldChart::deformation(FRAC_PI_2 * k as f64 / 4.0, a)?);
        }
        for chart in charts {
            let cert = chart.certify(&cfg)?;
            certified += 1;
            if !cert.pass {
                failures.push(format!("{} ({:?})", chart.name(), cert.failing));
            }
        }
    }
    let zero = crate::differential::certify_theorem(&zero_f2_stem(), &SymmetricDomain::band(1.0, 2.0), &cfg)?;
    if zero.failing != [Condition::NonVanishingF2] {
        failures.push(format!("zero-f2 fails {:?}", zero.failing));
    }
    let psi = ManifoldChart::psi(Algebra::Quaternion)?.certify(&cfg)?;
    if psi.failing != [Condition::SpotPerpBlock] {
        failures.push(format!("psi fails {:?}", psi.failing));
    }
    Ok(check(
        6,
        "theorem certificates",
        failures.len() as f64,
        0.0,
        if failures.is_empty() {
            format!("{certified} certificates pass; zero-f2 fails (b); psi fails the perp spot check")
        } else {
            failures.join("; ")
        },
    ))
}

fn psi_control(seed: u64) -> Result<Check> {
    let chart = ManifoldChart::psi(Algebra::Quaternion)?;
    let i = ImaginaryUnit::basis(Algebra::Quaternion, 1);
    let mut r = rng(seed ^ 0x7000);
    let mut worst = 0.0f64;
    let mut perp_fail = 0;
    let n = 100;
    for _ in 0..n {
        let p = SlicePoint::new(r.random_range(-2.0..=2.0), r.random_range(0.05..=3.0), i)?;
        let basis = Basis::canonical(Algebra::Quaternion);
        let j = chart.jacobian(&p, &basis)?;
        let perp = j.matrix().columns(2, 2).into_owned();
        let b = block_report(&perp, 1e-9);
        worst = worst.max((b.column_norms[0] / b.column_norms[1] - 2f64.sqrt()).abs());
        if !b.passes() {
            perp_fail += 1;
        }
    }
    let pts = chart.sample_points(seed ^ 0x7100, n);
    let audit = chart.audit(&pts, 1e-9, Execution::Sequential)?;
    let ok = perp_fail == n && !audit.pass && audit.perp_block.fail > 0;
    Ok(check(
        7,
        "psi negative control",
        if ok { worst } else { f64::INFINITY },
        1e-9,
        format!(
            "perp norm ratio vs sqrt(2) at {n} points x+iy; audit verdict `{}`",
            audit.verdict
        ),
    ))
}

fn deformation_family(exec: Execution) -> Result<Check> {
    let (nx, ny, nt) = (50, 50, 20);
    let unit = ImaginaryUnit::from_imaginary(&HyperNum::quaternion(0.0, 1.0, 2.0, -2.0))?;
    let mut identity = 0.0f64;
    for k in 0..nt {
        let theta = FRAC_PI_2 * k as f64 / (nt - 1) as f64;
        let chart = ManifoldChart::deformation(theta, Algebra::Quaternion)?;
        let res = exec.map_range(nx * ny, |idx| -> Result<f64> {
            let x = -2.0 + 4.0 * (idx % nx) as f64 / (nx - 1) as f64;
            let y = 3.0 * (idx / nx) as f64 / (ny - 1) as f64;
            let p = SlicePoint::new(x, y, unit)?;
            let j = chart.jacobian(&p, &p.unit.complete_basis())?;
            let n0 = j.matrix().column(0).norm_squared();
            let n1 = j.matrix().column(1).norm_squared();
            let (a, b) = deformation_coefficients(x, theta);
            let (st, ct) = theta.sin_cos();
            let lhs = a * a + st * st;
            let rhs = b * b + ct * ct;
            let scale = lhs.max(1.0);
            Ok(((lhs - rhs).abs() / scale)
                .max((n0 - lhs).abs() / scale)
                .max((n1 - rhs).abs() / scale))
        });
        identity = identity.max(max_of(res.into_iter().collect::<Result<Vec<_>>>()?));
    }
    let mut endpoint = 0.0f64;
    for a in DIMS {
        let h = ManifoldChart::deformation(0.0, a)?;
        let c = ManifoldChart::deformation(FRAC_PI_2, a)?;
        for p in h.sample_points(17, 200) {
            let hv = h.components(&p)?;
            let cv = c.components(&p)?;
            let eh = embedded_helicoid(&p);
            let ec = embedded_catenoid(&p);
            for i in 0..2 {
                endpoint = endpoint.max(hv[i].max_abs_diff(&eh[i]) / eh[i].norm().max(1.0));
                endpoint = endpoint.max(cv[i].max_abs_diff(&ec[i]) / ec[i].norm().max(1.0));
            }
        }
    }
    let ratio = (identity / 1e-12).max(endpoint / 1e-14);
    Ok(check(
        8,
        "deformation family",
        ratio,
        1.0,
        format!("A²+sin²θ = B²+cos²θ on {nx}x{ny}x{nt} grid: {identity:.3e} (tol 1e-12); endpoints {endpoint:.3e} (tol 1e-14)"),
    ))
}

fn log_root(seed: u64, exec: Execution) -> Result<Check> {
    let n = 10_000;
    let mut trips = 0.0f64;
    let mut roots = 0.0f64;
    for (k, a) in DIMS.iter().enumerate() {
        let res = exec.map_range(n, |i| -> Result<(f64, f64)> {
            let mut r = rng(seed ^ 0x9000 ^ ((k as u64) << 40) ^ i as u64);
            let q = random_hypernum(&mut r, *a);
            let e = exponential(&q);
            let back = e.logarithm();
            let again = exponential(&back);
            let scale = q.norm().max(1.0);
            let l_e = back.max_abs_diff(&q) / scale;
            let e_l = again.q().max_abs_diff(&e.q()) / e.q().norm().max(1.0)
                + again.p().max_abs_diff(&e.p()) / scale;
            let ex = principal_log(&q, None)?.exp().max_abs_diff(&q) / q.norm().max(1.0);
            let mut root = 0.0f64;
            for m in 2..=7u32 {
                let w = principal_nthroot(m, &q, None)?;
                root = root.max(w.powi(m).max_abs_diff(&q) / q.norm().max(1.0));
            }
            Ok((l_e.max(e_l).max(ex), root))
        });
        for v in res {
            let (t, r) = v?;
            trips = trips.max(t);
            roots = roots.max(r);
        }
    }
    let mut closure_exact = true;
    for m in 2..=7u32 {
        for step in 0..=40 {
            let r = step as f64 * 0.25;
            for a in DIMS {
                let q = HyperNum::real(a, r);
                let nf = m as f64;
                let minus = nth_root(m, &q, &HyperNum::real(a, -nf))?;
                let plus = nth_root(m, &q, &HyperNum::real(a, nf))?;
                closure_exact &= minus == HyperNum::real(a, -r.powf(1.0 / nf));
                closure_exact &= plus == HyperNum::real(a, r.powf(1.0 / nf));
            }
        }
    }
    let ratio = if closure_exact { (trips / 1e-12).max(roots / 1e-11) } else { f64::INFINITY };
    Ok(check(
        9,
        "log and root round trips",
        ratio,
        1.0,
        format!("L∘E, E∘L, exp∘log: {trips:.3e} (tol 1e-12); n-th roots n=2..7: {roots:.3e} (tol 1e-11); closure values exact: {closure_exact}"),
    ))
}

fn obstruction() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut distinct = usize::MAX;
    for a in DIMS {
        let x = HyperNum::real(a, -2.0);
        let units = [
            ImaginaryUnit::basis(a, 1),
            ImaginaryUnit::basis(a, 2),
            ImaginaryUnit::from_imaginary(&(HyperNum::basis(a, 1) + HyperNum::basis(a, 3)))?,
        ];
        let logs = log_preimages(&x, &units, 0..=0)?;
        for l in &logs {
            worst = worst.max(l.exp().max_abs_diff(&x));
        }
        let mut count = 0;
        for (i, l) in logs.iter().enumerate() {
            if logs[..i].iter().all(|m| m.max_abs_diff(l) > 1e-6) {
                count += 1;
            }
        }
        distinct = distinct.min(count);
    }
    Ok(check(
        10,
        "obstruction witness",
        if distinct >= 2 { worst } else { f64::INFINITY },
        1e-12,
        format!("x = -2: {distinct} distinct logarithms log 2 + Jπ exponentiate back"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcription_matches_at_a_point() {
        let p = SlicePoint::new(1.0, FRAC_PI_2, ImaginaryUnit::basis(Algebra::Quaternion, 1)).unwrap();
        let t = transcribed("helicoid", &p, 2.0);
        let (s, c) = (1f64.sinh(), 1f64.cosh());
        assert!((t.entry(0, 0) - c * FRAC_PI_2.cos()).abs() < 1e-15);
        assert!((t.entry(0, 1) + s).abs() < 1e-15);
        assert!((t.entry(2, 2) - s / FRAC_PI_2).abs() < 1e-15);
        assert_eq!(t.ambient_dim(), 7);
        assert_eq!(transcribed("nroot", &SlicePoint::real(0.0, p.unit), 3.0).ambient_dim(), 8);
    }

    #[test]
    fn polynomial_direct_evaluation() {
        let a = Algebra::Octonion;
        let c = vec![HyperNum::basis(a, 3), HyperNum::basis(a, 5)];
        let q = HyperNum::basis(a, 1);
        // e3 + e1·e5
        let expected = HyperNum::basis(a, 3) + HyperNum::basis(a, 1) * HyperNum::basis(a, 5);
        assert_eq!(eval_polynomial(&c, &q), expected);
    }
}

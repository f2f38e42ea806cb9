//! Convenient Newton diagrams in dimension two and three: the Kouchnirenko number, lattice
//! counts under the scaled diagram, and the Durfee-type comparison between them.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{check_alpha, BoundReport};
use crate::error::{Error, Result};
use crate::linalg::solve_square;
use crate::rational::{int, Rational};

fn default_scale() -> i64 {
    1
}

/// Vertices of the diagram `Γ`, scaled by `scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonDiagram {
    pub n: usize,
    pub points: Vec<Vec<i64>>,
    #[serde(default = "default_scale")]
    pub scale: i64,
}

impl NewtonDiagram {
    pub fn new(n: usize, points: Vec<Vec<i64>>) -> Result<Self> {
        let d = Self { n, points, scale: 1 };
        d.validate()?;
        Ok(d)
    }

    /// `x_1^m + ... + x_n^m`.
    pub fn fermat(n: usize, m: i64) -> Result<Self> {
        let points = (0..n)
            .map(|i| (0..n).map(|j| if i == j { m } else { 0 }).collect())
            .collect();
        Self::new(n, points)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        d.validate()?;
        Ok(d)
    }

    pub fn scaled(&self, t: i64) -> Self {
        Self {
            scale: self.scale * t,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(2..=3).contains(&self.n) {
            errs.push(format!("dimension {} not supported (2 or 3)", self.n));
        }
        if self.scale < 1 {
            errs.push(format!("scale {} < 1", self.scale));
        }
        for p in &self.points {
            if p.len() != self.n {
                errs.push(format!("point {p:?} has {} coordinates", p.len()));
            } else if p.iter().any(|x| *x < 0) {
                errs.push(format!("point {p:?} has a negative coordinate"));
            } else if p.iter().all(|x| *x == 0) {
                errs.push("the origin cannot be a vertex".into());
            }
        }
        if errs.is_empty() {
            for axis in 0..self.n {
                if self.intercept(axis).is_none() {
                    errs.push(format!("not convenient: no vertex on axis {}", axis + 1));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(errs))
        }
    }

    fn intercept(&self, axis: usize) -> Option<i64> {
        self.points
            .iter()
            .filter(|p| p.iter().enumerate().all(|(j, x)| (j == axis) == (*x > 0)))
            .map(|p| p[axis])
            .min()
    }

    /// Normals `w > 0` of the compact facets `w · x = 1` of the unscaled diagram.
    pub fn facet_normals(&self) -> Vec<Vec<Rational>> {
        facet_normals(&self.points, self.n)
    }

    /// `ℓ_Γ(v)` for the scaled diagram: `1` on `Γ`, linear on each facet cone.
    pub fn weight(&self, v: &[i64]) -> Rational {
        let normals = self.facet_normals();
        min_weight(&normals, v) / int(self.scale)
    }

    /// Total `j`-volume of the sections by coordinate `j`-planes, including the scale.
    pub fn section_volume(&self, j: usize) -> Rational {
        if j == 0 {
            return Rational::one();
        }
        let mut total = Rational::zero();
        for coords in subsets(self.n, j) {
            let pts: Vec<Vec<i64>> = self
                .points
                .iter()
                .filter(|p| (0..self.n).all(|i| coords.contains(&i) || p[i] == 0))
                .map(|p| coords.iter().map(|&i| p[i]).collect())
                .collect();
            total += volume_under(&pts, j);
        }
        let s = int(self.scale);
        total * num_traits::pow(s, j)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn dot(w: &[Rational], v: &[i64]) -> Rational {
    w.iter().zip(v).map(|(a, b)| a * int(*b)).sum()
}

fn min_weight(normals: &[Vec<Rational>], v: &[i64]) -> Rational {
    normals
        .iter()
        .map(|w| dot(w, v))
        .min()
        .expect("convenient diagram has a facet")
}

fn facet_normals(points: &[Vec<i64>], n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for idx in subsets(points.len(), n) {
        let a: Vec<Vec<Rational>> = idx
            .iter()
            .map(|&i| points[i].iter().map(|x| int(*x)).collect())
            .collect();
        let Some(w) = solve_square(a, vec![Rational::one(); n]) else {
            continue;
        };
        if !w.iter().all(|x| x.is_positive()) {
            continue;
        }
        if points.iter().all(|p| dot(&w, p) >= Rational::one()) && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

fn det3(a: &[i64], b: &[i64], c: &[i64]) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn cross2(o: &[i64], a: &[i64], b: &[i64]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull of points in the plane, counter-clockwise; collinear points dropped.
fn hull2(mut pts: Vec<(Vec<i64>, usize)>) -> Vec<usize> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts.into_iter().map(|p| p.1).collect();
    }
    let mut h: Vec<(Vec<i64>, usize)> = Vec::new();
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &(Vec<i64>, usize)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while h.len() >= start + 2 && cross2(&h[h.len() - 2].0, &h[h.len() - 1].0, &p.0) <= 0 {
                h.pop();
            }
            h.push(p.clone());
        }
        h.pop();
    }
    h.into_iter().map(|p| p.1).collect()
}

/// Volume of `{x >= 0 : ℓ(x) <= 1}` in dimension `j`: the union of the cones over the
/// compact facets.
fn volume_under(points: &[Vec<i64>], j: usize) -> Rational {
    match j {
        1 => int(points.iter().map(|p| p[0]).min().expect("axis vertex")),
        2 | 3 => {
            let mut total = Rational::zero();
            for w in facet_normals(points, j) {
                let face: Vec<&Vec<i64>> =
                    points.iter().filter(|p| dot(&w, p) == Rational::one()).collect();
                total += if j == 2 {
                    let a = face.iter().min().unwrap();
                    let b = face.iter().max().unwrap();
                    Rational::new((a[0] * b[1] - a[1] * b[0]).abs().into(), 2.into())
                } else {
                    // Project along the coordinate of largest normal component.
                    let drop = (0..3).max_by(|x, y| w[*x].cmp(&w[*y])).unwrap();
                    let proj: Vec<(Vec<i64>, usize)> = face
                        .iter()
                        .enumerate()
                        .map(|(k, p)| ((0..3).filter(|i| *i != drop).map(|i| p[i]).collect(), k))
                        .collect();
                    let h = hull2(proj);
                    let six: i64 = (1..h.len().saturating_sub(1))
                        .map(|t| det3(face[h[0]], face[h[t]], face[h[t + 1]]).abs())
                        .sum();
                    Rational::new(six.into(), 6.into())
                };
            }
            total
        }
        _ => unreachable!("dimension checked by validate"),
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// `Σ_i (-1)^i (n-i)! Vol_{n-i}(Γ)`.
pub fn newton_mu(d: &NewtonDiagram) -> Result<i64> {
    d.validate()?;
    let mut mu = Rational::zero();
    for i in 0..=d.n {
        let term = int(factorial(d.n - i)) * d.section_volume(d.n - i);
        if i % 2 == 0 {
            mu += term;
        } else {
            mu -= term;
        }
    }
    if !mu.is_integer() {
        return Err(Error::NonIntegral(format!("Milnor number {mu}")));
    }
    Ok(mu.to_integer().to_i64().expect("fits i64"))
}

/// `#{v ∈ ℤ^n_{>0} : ℓ(v) <= 1 - α}` for the scaled diagram.
pub fn newton_window_count(d: &NewtonDiagram, alpha: &Rational) -> Result<i64> {
    d.validate()?;
    check_alpha(alpha)?;
    let normals = d.facet_normals();
    let bound = (Rational::one() - alpha) * int(d.scale);
    let caps: Vec<i64> = (0..d.n).map(|a| d.intercept(a).unwrap() * d.scale).collect();
    let mut count = 0;
    let mut v = vec![1i64; d.n];
    'outer: loop {
        if min_weight(&normals, &v) <= bound {
            count += 1;
        }
        for a in 0..d.n {
            v[a] += 1;
            if v[a] < caps[a] {
                continue 'outer;
            }
            v[a] = 1;
        }
        break;
    }
    Ok(count)
}

/// `newton_mu(tΓ)/n! > newton_window_count(tΓ, α)/(1-α)^n`.
pub fn durfee_newton_check(d: &NewtonDiagram, alpha: &Rational, t: i64) -> Result<BoundReport> {
    if t < 1 {
        return Err(Error::ValueOutOfRange(format!("scale {t} < 1")));
    }
    check_alpha(alpha)?;
    let td = d.scaled(t);
    let lhs = int(newton_mu(&td)?) / int(factorial(d.n));
    let c = Rational::one() - alpha;
    let rhs = int(newton_window_count(&td, alpha)?) / num_traits::pow(c, d.n);
    let holds = lhs > rhs;
    Ok(BoundReport { lhs, rhs, holds })
}

/// Smallest `t <= t_max` from which the comparison holds for every larger `t` in range.
pub fn durfee_newton_onset(d: &NewtonDiagram, alpha: &Rational, t_max: i64) -> Result<Option<i64>> {
    let mut onset = None;
    for t in 1..=t_max {
        let holds = durfee_newton_check(d, alpha, t)?.holds;
        match (holds, onset) {
            (true, None) => onset = Some(t),
            (false, Some(_)) => onset = None,
            _ => {}
        }
    }
    Ok(onset)
}

/// Smallest `C` with `μ/n! >= (count - C)/(1-α)^n` over the Fermat diagrams of degree
/// `2..=m_max`, with the degree attaining it.
pub fn empirical_durfee_constant(n: usize, alpha: &Rational, m_max: i64) -> Result<(Rational, i64)> {
    check_alpha(alpha)?;
    if m_max < 2 {
        return Err(Error::ValueOutOfRange(format!("m_max = {m_max} < 2")));
    }
    let c = num_traits::pow(Rational::one() - alpha, n);
    let mut best: Option<(Rational, i64)> = None;
    for m in 2..=m_max {
        let d = NewtonDiagram::fermat(n, m)?;
        let need = int(newton_window_count(&d, alpha)?)
            - &c * int(newton_mu(&d)?) / int(factorial(n));
        if best.as_ref().is_none_or(|(b, _)| need > *b) {
            best = Some((need, m));
        }
    }
    Ok(best.expect("m_max >= 2"))
}

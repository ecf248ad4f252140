//! Explicit polynomial equations of the integral-element variety for n = 4, 5, 6.
//!
//! Each equation is a polynomial in `c` whose coefficients are products of
//! `Δ_j`. All indices are cyclic and shifted so that shift 0 reproduces the
//! displayed form with labels starting at zero:
//!
//! * n = 4: `c_0 + c_2`, `c_1 + c_3`, `c_0 c_1 + Δ_1 Δ_3 − Δ_0 Δ_2`
//! * n = 5: `c_k c_{k+1} − c_{k+3} Δ_{k+1} − Δ_k Δ_{k+2}` for k = 0..5
//! * n = 6: `Δ_{k+4}(c_k c_{k+1} − Δ_k Δ_{k+2}) + Δ_{k+1}(c_{k+3} c_{k+4} − Δ_{k+3} Δ_{k+5})`
//!   and `Δ_{k+4}(c_k Δ_{k+3} − c_{k+4} Δ_{k+2}) + c_{k+2}(c_{k+3} c_{k+4} − Δ_{k+3} Δ_{k+5})`
//!   for k = 0..6, first family then second.
//!
//! Every `c_i` and `Δ_i` carries area units, so an equation homogeneous of
//! degree `k` is normalized by `A^k` with `A = max s_i²`.

use crate::error::{Error, Result};
use crate::geom::{cyc, OrbitPolygon};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Monomial {
    coef: f64,
    vars: [usize; 3],
    len: u8,
}

impl Monomial {
    fn new(coef: f64, vars: &[usize]) -> Self {
        let mut v = [0; 3];
        v[..vars.len()].copy_from_slice(vars);
        Self {
            coef,
            vars: v,
            len: vars.len() as u8,
        }
    }

    fn vars(&self) -> &[usize] {
        &self.vars[..self.len as usize]
    }

    fn eval(&self, c: &[f64]) -> f64 {
        self.vars().iter().fold(self.coef, |acc, &i| acc * c[i])
    }
}

/// A polynomial in the entries of `c`, homogeneous of `degree` once `Δ` is
/// counted with the same weight as `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietyEquation {
    terms: Vec<Monomial>,
    degree: i32,
}

impl VarietyEquation {
    fn new(degree: i32) -> Self {
        Self {
            terms: Vec::new(),
            degree,
        }
    }

    fn term(mut self, coef: f64, vars: &[usize]) -> Self {
        self.terms.push(Monomial::new(coef, vars));
        self
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn eval(&self, c: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(c)).sum()
    }

    /// Adds `weight · ∂/∂c_j` of this equation into `grad`.
    pub fn accumulate_gradient(&self, c: &[f64], weight: f64, grad: &mut [f64]) {
        for t in &self.terms {
            let vars = t.vars();
            for (k, &j) in vars.iter().enumerate() {
                let mut g = t.coef * weight;
                for (l, &i) in vars.iter().enumerate() {
                    if l != k {
                        g *= c[i];
                    }
                }
                grad[j] += g;
            }
        }
    }
}

/// The explicit equations for `poly`, or `WrongPeriod` when `n ∉ {4, 5, 6}`.
pub fn variety_system(poly: &OrbitPolygon) -> Result<Vec<VarietyEquation>> {
    match poly.n() {
        4 => Ok(system_n4(poly)),
        5 => Ok(system_n5(poly)),
        6 => Ok(system_n6(poly)),
        n => Err(Error::WrongPeriod {
            expected: if n < 4 { 4 } else { 6 },
            got: n,
        }),
    }
}

fn system_n4(p: &OrbitPolygon) -> Vec<VarietyEquation> {
    let dl = |i: isize| p.delta_at(i);
    vec![
        VarietyEquation::new(1).term(1.0, &[0]).term(1.0, &[2]),
        VarietyEquation::new(1).term(1.0, &[1]).term(1.0, &[3]),
        VarietyEquation::new(2)
            .term(1.0, &[0, 1])
            .term(dl(1) * dl(3) - dl(0) * dl(2), &[]),
    ]
}

fn system_n5(p: &OrbitPolygon) -> Vec<VarietyEquation> {
    let dl = |i: isize| p.delta_at(i);
    (0..5isize)
        .map(|k| {
            let ix = |j: isize| cyc(k + j, 5);
            VarietyEquation::new(2)
                .term(1.0, &[ix(0), ix(1)])
                .term(-dl(k + 1), &[ix(3)])
                .term(-dl(k) * dl(k + 2), &[])
        })
        .collect()
}

fn system_n6(p: &OrbitPolygon) -> Vec<VarietyEquation> {
    let dl = |i: isize| p.delta_at(i);
    let first = (0..6isize).map(|k| {
        let ix = |j: isize| cyc(k + j, 6);
        VarietyEquation::new(3)
            .term(dl(k + 4), &[ix(0), ix(1)])
            .term(dl(k + 1), &[ix(3), ix(4)])
            .term(
                -dl(k + 4) * dl(k) * dl(k + 2) - dl(k + 1) * dl(k + 3) * dl(k + 5),
                &[],
            )
    });
    let second = (0..6isize).map(|k| {
        let ix = |j: isize| cyc(k + j, 6);
        VarietyEquation::new(3)
            .term(dl(k + 4) * dl(k + 3), &[ix(0)])
            .term(-dl(k + 4) * dl(k + 2), &[ix(4)])
            .term(1.0, &[ix(2), ix(3), ix(4)])
            .term(-dl(k + 3) * dl(k + 5), &[ix(2)])
    });
    first.chain(second).collect()
}

fn residuals_for(poly: &OrbitPolygon, c: &[f64], n: usize) -> Result<Vec<f64>> {
    if poly.n() != n {
        return Err(Error::WrongPeriod {
            expected: n,
            got: poly.n(),
        });
    }
    if c.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: c.len(),
        });
    }
    Ok(variety_system(poly)?.iter().map(|e| e.eval(c)).collect())
}

/// `(c_0 + c_2, c_1 + c_3, c_0 c_1 + Δ_1 Δ_3 − Δ_0 Δ_2)`.
pub fn variety_equations_n4(poly: &OrbitPolygon, c: &[f64]) -> Result<Vec<f64>> {
    residuals_for(poly, c, 4)
}

/// The five cyclic shifts of `c_0 c_1 − c_3 Δ_1 − Δ_0 Δ_2`.
pub fn variety_equations_n5(poly: &OrbitPolygon, c: &[f64]) -> Result<Vec<f64>> {
    residuals_for(poly, c, 5)
}

/// Both hexagon equations and their six shifts each (12 residuals).
pub fn variety_equations_n6(poly: &OrbitPolygon, c: &[f64]) -> Result<Vec<f64>> {
    residuals_for(poly, c, 6)
}

/// Residuals divided by `A^degree`, `A = max s_i²`.
pub fn normalized_residuals(poly: &OrbitPolygon, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() != poly.n() {
        return Err(Error::LengthMismatch {
            expected: poly.n(),
            got: c.len(),
        });
    }
    let a = poly.area_scale();
    Ok(variety_system(poly)?
        .iter()
        .map(|e| e.eval(c) / a.powi(e.degree()))
        .collect())
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

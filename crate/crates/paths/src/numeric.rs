//! ε-truncated line integrals through one double point, by quadrature, and
//! their comparison with the symbolic calculus.
//!
//! Near the double point `xy = t` of edge `e₀` the form is
//! `ω_k = ρ dx/x + s_k(x) dx` on the `x` side, `ω_l = −ρ dy/y + s_l(y) dy` on
//! the `y` side and `H(ξ, u) dξ` with `H = −ρu + H₀(ξ)` on the edge. The path
//! runs `x = x₀·g(s)` into the double point and `y = y₁·h(σ)` out of it;
//! `a·b` is the product of the one-sided approach speeds, so the path lies
//! over `(a·b)·∂/∂t`.

use nearby_core::graph::build;
use nearby_core::{Alphabet, MarkedGraph, Scalar};
use nearby_dga::element::make_theta;
use nearby_dga::model::DLOG;
use nearby_dga::{DgaElement, EdgePoly, Model};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::integrate::Integrator;
use crate::period::{PathKey, PeriodValue};
use crate::word::{Event, PathWord, Position};
use crate::PathError;

pub const DEFAULT_GRID: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-13;
const LOG_LAMBDA: &str = "loglambda";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericScenario {
    /// Residue of the form at the double point on the `x` side.
    pub rho: i64,
    /// `H₀(ξ) = Σ h0[j]·ξʲ`, coefficients as `[numerator, denominator]`.
    pub h0: Vec<[i64; 2]>,
    /// Smooth parts `s_k(x) = Σ s_in[j]·xʲ` and `s_l(y) = Σ s_out[j]·yʲ`.
    pub s_in: Vec<f64>,
    pub s_out: Vec<f64>,
    pub x0: f64,
    pub y1: f64,
    /// Parameter time of the crossing.
    pub tau0: f64,
    /// `h'(0)` for the outgoing leg.
    pub speed_out: f64,
    /// Reparametrization strength; leaves the one-sided speeds unchanged.
    pub kappa: f64,
}

impl NumericScenario {
    /// The node scenario over `∂/∂t`.
    pub fn node() -> Self {
        NumericScenario {
            rho: 1,
            h0: vec![[1, 2], [-1, 1], [3, 4]],
            s_in: vec![0.3, -0.2],
            s_out: vec![0.1, 0.4],
            x0: 0.5,
            y1: 0.25,
            tau0: 0.5,
            speed_out: 2.0,
            kappa: 0.0,
        }
    }

    /// The same path with the outgoing speed scaled by `lambda`.
    pub fn over(&self, lambda: f64) -> Self {
        NumericScenario { speed_out: self.speed_out * lambda, ..self.clone() }
    }

    pub fn reparametrized(&self, kappa: f64) -> Self {
        NumericScenario { kappa, ..self.clone() }
    }

    /// `a·b`, the tangent vector the path lies over.
    pub fn derivative_product(&self) -> f64 {
        (self.x0 / self.tau0) * (self.y1 * self.speed_out / (1.0 - self.tau0))
    }

    fn x(&self, tau: f64) -> (f64, f64) {
        let s = (self.tau0 - tau) / self.tau0;
        let g = s + self.kappa * s * s * (1.0 - s);
        let dg = 1.0 + self.kappa * (2.0 * s - 3.0 * s * s);
        (self.x0 * g, -self.x0 * dg / self.tau0)
    }

    fn y(&self, tau: f64) -> (f64, f64) {
        let w = 1.0 - self.tau0;
        let s = (tau - self.tau0) / w;
        let c = self.speed_out;
        let h = c * s + (1.0 - c) * s * s + self.kappa * s * s * (1.0 - s);
        let dh = c + 2.0 * (1.0 - c) * s + self.kappa * (2.0 * s - 3.0 * s * s);
        (self.y1 * h, self.y1 * dh / w)
    }

    fn h0_scalar(&self) -> EdgePoly {
        let mut p = EdgePoly::zero();
        for (j, [n, d]) in self.h0.iter().enumerate() {
            p = &p + &EdgePoly::term(Scalar::frac(*n, *d), j as u32, 0);
        }
        p
    }
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn poly_integral(c: &[f64], from: f64, to: f64) -> f64 {
    let prim = |x: f64| c.iter().enumerate().map(|(j, a)| a * x.powi(j as i32 + 1) / (j as f64 + 1.0)).sum::<f64>();
    prim(to) - prim(from)
}

/// `∫ f` over `[a, b]` where `f` is singular at distance `gap` beyond `b`
/// (beyond `a` when `toward_b` is false); pieces halve toward that side.
fn integrate_toward<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, gap: f64, toward_b: bool) -> Result<f64, PathError> {
    let len = b - a;
    let mut cuts = vec![0.0];
    let mut d = len / 2.0;
    while d > gap {
        cuts.push(len - d);
        d /= 2.0;
    }
    cuts.push(len);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = if toward_b { (a + w[0], a + w[1]) } else { (b - w[1], b - w[0]) };
        let out = quadrature::integrate(f, lo, hi, QUAD_TOL);
        if !out.integral.is_finite() || out.error_estimate > 1e-9 {
            return Err(PathError::Quadrature(format!("[{lo}, {hi}]: error estimate {}", out.error_estimate)));
        }
        total += out.integral;
    }
    Ok(total)
}

/// The ε-truncated integral: both legs stop `ε` short of the double point and
/// the crossing uses `u = log(x(τ₀−ε)·y(τ₀+ε)) − log(a·b)`.
pub fn numeric_epsilon_integral(sc: &NumericScenario, eps: f64) -> Result<Complex64, PathError> {
    if !(eps > 0.0 && eps < sc.tau0.min(1.0 - sc.tau0)) {
        return Err(PathError::Quadrature(format!("ε = {eps} outside (0, min(τ₀, 1−τ₀))")));
    }
    let rho = sc.rho as f64;
    let leg_in = integrate_toward(
        |t| {
            let (x, dx) = sc.x(t);
            rho * dx / x + poly(&sc.s_in, x) * dx
        },
        0.0,
        sc.tau0 - eps,
        eps,
        true,
    )?;
    let leg_out = integrate_toward(
        |t| {
            let (y, dy) = sc.y(t);
            -rho * dy / y + poly(&sc.s_out, y) * dy
        },
        sc.tau0 + eps,
        1.0,
        eps,
        false,
    )?;
    let u = (sc.x(sc.tau0 - eps).0 * sc.y(sc.tau0 + eps).0).ln() - sc.derivative_product().ln();
    let h0: Vec<f64> = sc.h0.iter().map(|[n, d]| *n as f64 / *d as f64).collect();
    let cross = quadrature::integrate(|xi| -rho * u + poly(&h0, xi), 0.0, 1.0, QUAD_TOL);
    Ok(Complex64::new(leg_in + cross.integral + leg_out, 0.0))
}

/// Least-squares fit of `I(ε) ≈ I + A·ε log ε + B·ε (+ C·ε²)`, the `ε²`
/// column only with four or more points; returns `I`.
pub fn extrapolate(grid: &[f64], values: &[Complex64]) -> Complex64 {
    let n = grid.len();
    if n < 3 {
        return values.last().copied().unwrap_or_default();
    }
    let cols = if n >= 4 { 4 } else { 3 };
    let m = DMatrix::from_fn(n, cols, |i, j| match j {
        0 => 1.0,
        1 => grid[i] * grid[i].ln(),
        2 => grid[i],
        _ => grid[i] * grid[i],
    });
    let svd = m.svd(true, true);
    let fit = |part: &dyn Fn(&Complex64) -> f64| {
        let b = DVector::from_iterator(n, values.iter().map(part));
        svd.solve(&b, 1e-14).map(|x| x[0]).unwrap_or(f64::NAN)
    };
    Complex64::new(fit(&|z| z.re), fit(&|z| z.im))
}

/// The node graph `D₀ – D₁ – D₂` with the standard model, the closed form
/// `ρ(Θ₀ + Θ₁ + dp/p|D₀ + ν|D₁ − dp/p|D₂) + H₀ dξ|e₀` and its value as a
/// period expression with named chart legs.
pub struct NodeSymbolic {
    pub model: Model,
    pub phi: DgaElement,
    /// Value over `λ·∂/∂t`, with the scalar symbol `loglambda`.
    pub value: PeriodValue,
    /// The same value computed from `λ^N φ` along the path over `∂/∂t`.
    pub value_lambda_n: PeriodValue,
}

pub fn node_symbolic(sc: &NumericScenario) -> Result<NodeSymbolic, PathError> {
    let graph = MarkedGraph {
        vertices: vec![build::disk(0, 0), build::compact(1, 0), build::disk(2, 1)],
        edges: build::edges(&[(0, 1), (1, 2)]),
    };
    let model = Model::standard(graph)?;
    let rho = Scalar::from_int(sc.rho);
    let gen = |c: usize, n: &str, x: Scalar| DgaElement::generator(&model, c, n, x);
    let mut phi = make_theta(0).plus(&make_theta(1));
    phi = phi.plus(&gen(0, DLOG, Scalar::one())?);
    phi = phi.plus(&gen(1, "nu1", Scalar::one())?);
    phi = phi.plus(&gen(2, DLOG, Scalar::from_int(-1))?);
    phi = phi.scale(&rho);
    phi = phi.plus(&DgaElement::edge(1, 0, vec![EdgePoly::zero(), EdgePoly::zero(), sc.h0_scalar()]));
    if !model.d(&phi)?.is_zero() || !model.is_compatible(&phi)? {
        return Err(PathError::NotClosed);
    }
    let alpha = Alphabet::new([LOG_LAMBDA]).map_err(|e| PathError::Parse(e.to_string()))?;
    let log_lambda = alpha.symbol(LOG_LAMBDA)?;
    let cross = PathWord::new(vec![Event::Cross { edge: 0, dir: 1 }]);
    let start = Position { comp: 0, puncture: 0 };
    let t = nearby_dga::BarTensor::pure(&[&phi], Scalar::one());
    let legs = PeriodValue::symbol(PathKey::Named("leg_in".into()), vec!["phi".into()])
        .plus(&PeriodValue::symbol(PathKey::Named("leg_out".into()), vec!["phi".into()]));
    let value = Integrator::with_u(&model, -&log_lambda).integrate_unchecked(&t, &cross, start)?.plus(&legs);
    let moved = nearby_dga::BarTensor::pure(&[&phi.lambda_n(&log_lambda)], Scalar::one());
    let value_lambda_n = Integrator::new(&model).integrate_unchecked(&moved, &cross, start)?.plus(&legs);
    Ok(NodeSymbolic { model, phi, value, value_lambda_n })
}

/// Numeric value of the symbolic expression: chart legs from their closed
/// forms and `loglambda = log(a·b)`.
pub fn instantiate(sc: &NumericScenario, v: &PeriodValue) -> Complex64 {
    let rho = sc.rho as f64;
    let leg_in = -rho * sc.x0.ln() + poly_integral(&sc.s_in, sc.x0, 0.0);
    let leg_out = -rho * sc.y1.ln() + poly_integral(&sc.s_out, 0.0, sc.y1);
    let ll = sc.derivative_product().ln();
    v.eval(
        |n| if n == LOG_LAMBDA { Complex64::new(ll, 0.0) } else { Complex64::new(f64::NAN, 0.0) },
        |k, _| match k {
            PathKey::Named(n) if n == "leg_in" => Complex64::new(leg_in, 0.0),
            PathKey::Named(n) if n == "leg_out" => Complex64::new(leg_out, 0.0),
            _ => Complex64::new(f64::NAN, 0.0),
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct NumericReport {
    pub derivative_product: f64,
    pub grid: Vec<f64>,
    pub values: Vec<[f64; 2]>,
    pub extrapolated: [f64; 2],
    pub symbolic: String,
    pub symbolic_value: [f64; 2],
    pub lambda_n_agrees: bool,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates the grid in parallel, extrapolates and compares.
pub fn run_numeric(sc: &NumericScenario, grid: &[f64], tolerance: f64) -> Result<NumericReport, PathError> {
    let values: Vec<Complex64> =
        grid.par_iter().map(|&e| numeric_epsilon_integral(sc, e)).collect::<Result<_, _>>()?;
    let limit = extrapolate(grid, &values);
    let sym = node_symbolic(sc)?;
    let exact = instantiate(sc, &sym.value);
    let rel_error = (limit - exact).norm() / exact.norm().max(f64::MIN_POSITIVE);
    Ok(NumericReport {
        derivative_product: sc.derivative_product(),
        grid: grid.to_vec(),
        values: values.iter().map(|z| [z.re, z.im]).collect(),
        extrapolated: [limit.re, limit.im],
        symbolic: sym.value.to_string(),
        symbolic_value: [exact.re, exact.im],
        lambda_n_agrees: sym.value == sym.value_lambda_n,
        rel_error,
        tolerance,
        pass: rel_error <= tolerance,
    })
}

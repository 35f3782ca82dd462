//! Closed-form real roots of polynomials of degree at most three.

use crate::error::{RecalError, Result};

/// Imaginary parts below this (relative to the root magnitude) are treated
/// as rounding noise around a repeated real root.
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Leading coefficients below this fraction of the others are dropped.
const DEGREE_DROP: f64 = 1e-14;

/// `a*x^3 + b*x^2 + c*x + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicPoly {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CubicPoly {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Builds the monic cubic with the given roots.
    pub fn from_roots(r1: f64, r2: f64, r3: f64) -> Self {
        Self {
            a: 1.0,
            b: -(r1 + r2 + r3),
            c: r1 * r2 + r1 * r3 + r2 * r3,
            d: -r1 * r2 * r3,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        ((self.a * x + self.b) * x + self.c) * x + self.d
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a * x + 2.0 * self.b) * x + self.c
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }
}

/// Real roots of `poly`, ascending, repeated roots reported once.
///
/// Uses the trigonometric form when the discriminant admits three real
/// roots and Cardano's formula otherwise, then polishes each root with a
/// few Newton steps on the undepressed polynomial. A vanishing leading
/// coefficient drops to the quadratic or linear formula.
pub fn solve_cubic_real(poly: &CubicPoly) -> Result<Vec<f64>> {
    if poly.is_zero() || !poly.max_abs_coefficient().is_finite() {
        return Err(RecalError::DegeneratePolynomial);
    }
    let lower = poly.b.abs().max(poly.c.abs()).max(poly.d.abs());
    let mut roots = if poly.a.abs() < DEGREE_DROP * lower {
        solve_quadratic(poly.b, poly.c, poly.d)
    } else {
        solve_depressed(poly)
    };

    for r in roots.iter_mut() {
        *r = polish(poly, *r);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= IMAG_TOLERANCE * x.abs().max(y.abs()).max(1.0));
    Ok(roots)
}

fn solve_depressed(poly: &CubicPoly) -> Vec<f64> {
    let b = poly.b / poly.a;
    let c = poly.c / poly.a;
    let d = poly.d / poly.a;
    let shift = b / 3.0;

    // x = t - b/3 gives t^3 + p t + q = 0
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

    if p == 0.0 && q == 0.0 {
        return vec![-shift];
    }

    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    if disc > 0.0 {
        // one real root plus a conjugate pair
        let sq = disc.sqrt();
        let w = if half_q >= 0.0 {
            -half_q - sq
        } else {
            -half_q + sq
        };
        let u = w.cbrt();
        let v = if u == 0.0 { 0.0 } else { -third_p / u };
        let mut out = vec![u + v - shift];
        let re = -(u + v) / 2.0 - shift;
        let im = 3f64.sqrt() / 2.0 * (u - v).abs();
        if im <= IMAG_TOLERANCE * re.abs().max(1.0) {
            out.push(re);
        }
        out
    } else if p == 0.0 {
        vec![(-q).cbrt() - shift]
    } else {
        let m = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        (0..3)
            .map(|k| m * (theta - tau * k as f64).cos() - shift)
            .collect()
    }
}

fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < DEGREE_DROP * b.abs().max(c.abs()) {
        if b == 0.0 {
            return if c == 0.0 { vec![0.0] } else { Vec::new() };
        }
        return vec![-c / b];
    }
    if b == 0.0 && c == 0.0 {
        return vec![0.0];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        return if im <= IMAG_TOLERANCE * re.abs().max(1.0) {
            vec![re]
        } else {
            Vec::new()
        };
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn polish(poly: &CubicPoly, mut x: f64) -> f64 {
    let mut fx = poly.eval(x);
    for _ in 0..4 {
        let df = poly.derivative(x);
        if fx == 0.0 || df == 0.0 || !df.is_finite() {
            break;
        }
        let next = x - fx / df;
        let fnext = poly.eval(next);
        if !(fnext.abs() < fx.abs()) {
            break;
        }
        x = next;
        fx = fnext;
    }
    x
}

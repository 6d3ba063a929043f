//! Second-order forward-mode differentiation in three variables.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to the point coordinates `(x, y, z)`. Model functions are written
//! once against `Jet` arithmetic and every partial derivative up to order two
//! falls out exactly, without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Hessian storage order: xx, xy, xz, yy, yz, zz.
const HESS_INDEX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [f64; 6],
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Jet {
            value,
            grad: [0.0; 3],
            hess: [0.0; 6],
        }
    }

    /// The coordinate function `x_axis` evaluated at `value`.
    pub fn variable(axis: usize, value: f64) -> Self {
        let mut grad = [0.0; 3];
        grad[axis] = 1.0;
        Jet {
            value,
            grad,
            hess: [0.0; 6],
        }
    }

    /// The three coordinate jets at the point `x`.
    pub fn point(x: [f64; 3]) -> [Jet; 3] {
        [
            Jet::variable(0, x[0]),
            Jet::variable(1, x[1]),
            Jet::variable(2, x[2]),
        ]
    }

    pub fn hessian(&self, a: usize, b: usize) -> f64 {
        self.hess[HESS_INDEX[a][b]]
    }

    /// Partial derivative for a multi-index of total order at most two.
    ///
    /// Returns `None` for orders above two, which a `Jet` does not carry.
    pub fn partial(&self, alpha: [u8; 3]) -> Option<f64> {
        match alpha.iter().map(|&a| a as u32).sum::<u32>() {
            0 => Some(self.value),
            1 => {
                let axis = alpha.iter().position(|&a| a == 1)?;
                Some(self.grad[axis])
            }
            2 => {
                let mut axes = alpha
                    .iter()
                    .enumerate()
                    .flat_map(|(axis, &count)| std::iter::repeat_n(axis, count as usize));
                let a = axes.next()?;
                let b = axes.next()?;
                Some(self.hessian(a, b))
            }
            _ => None,
        }
    }

    /// Applies a scalar function given its value and first two derivatives at
    /// `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet {
        let g = &self.grad;
        let mut hess = [0.0; 6];
        for a in 0..3 {
            for b in a..3 {
                let idx = HESS_INDEX[a][b];
                hess[idx] = f1 * self.hess[idx] + f2 * g[a] * g[b];
            }
        }
        Jet {
            value: f0,
            grad: [f1 * g[0], f1 * g[1], f1 * g[2]],
            hess,
        }
    }

    /// Applies a function of two jets given its partial derivatives
    /// `[f, f_a, f_b, f_aa, f_ab, f_bb]` at `(a.value, b.value)`.
    pub fn chain2(a: &Jet, b: &Jet, d: [f64; 6]) -> Jet {
        let [f0, fa, fb, faa, fab, fbb] = d;
        let mut hess = [0.0; 6];
        for i in 0..3 {
            for k in i..3 {
                let idx = HESS_INDEX[i][k];
                hess[idx] = fa * a.hess[idx]
                    + fb * b.hess[idx]
                    + faa * a.grad[i] * a.grad[k]
                    + fab * (a.grad[i] * b.grad[k] + b.grad[i] * a.grad[k])
                    + fbb * b.grad[i] * b.grad[k];
            }
        }
        let grad = std::array::from_fn(|i| fa * a.grad[i] + fb * b.grad[i]);
        Jet {
            value: f0,
            grad,
            hess,
        }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            grad: self.grad.map(|g| c * g),
            hess: self.hess.map(|h| c * h),
        }
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    /// Real power `self^p` for positive base.
    pub fn powf(&self, p: f64) -> Jet {
        let v = self.value;
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        let f0 = v.powf(p);
        let f1 = p * v.powf(p - 1.0);
        let f2 = p * (p - 1.0) * v.powf(p - 2.0);
        self.chain(f0, f1, f2)
    }

    pub fn powi(&self, n: i32) -> Jet {
        let v = self.value;
        let f0 = v.powi(n);
        let f1 = if n == 0 { 0.0 } else { n as f64 * v.powi(n - 1) };
        let f2 = if n < 2 && n >= 0 {
            0.0
        } else {
            (n * (n - 1)) as f64 * v.powi(n - 2)
        };
        self.chain(f0, f1, f2)
    }

    pub fn recip(&self) -> Jet {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    /// `atan2(self, x)`, with `self` playing the role of `y`.
    pub fn atan2(&self, x: &Jet) -> Jet {
        let (yv, xv) = (self.value, x.value);
        let r2 = xv * xv + yv * yv;
        let r4 = r2 * r2;
        // f(y, x) partials, ordered as chain2(a = y, b = x)
        Jet::chain2(
            self,
            x,
            [
                yv.atan2(xv),
                xv / r2,
                -yv / r2,
                -2.0 * xv * yv / r4,
                (yv * yv - xv * xv) / r4,
                2.0 * xv * yv / r4,
            ],
        )
    }

    /// Euclidean norm of a jet vector.
    pub fn norm(v: &[Jet; 3]) -> Jet {
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }

    pub fn dot(v: &[Jet; 3], w: [f64; 3]) -> Jet {
        v[0] * w[0] + v[1] * w[1] + v[2] * w[2]
    }
}

impl From<f64> for Jet {
    fn from(value: f64) -> Self {
        Jet::constant(value)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            grad: std::array::from_fn(|i| self.grad[i] + rhs.grad[i]),
            hess: std::array::from_fn(|i| self.hess[i] + rhs.hess[i]),
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            grad: std::array::from_fn(|i| self.grad[i] - rhs.grad[i]),
            hess: std::array::from_fn(|i| self.hess[i] - rhs.hess[i]),
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (&self, &rhs);
        let mut hess = [0.0; 6];
        for i in 0..3 {
            for k in i..3 {
                let idx = HESS_INDEX[i][k];
                hess[idx] = a.value * b.hess[idx]
                    + b.value * a.hess[idx]
                    + a.grad[i] * b.grad[k]
                    + a.grad[k] * b.grad[i];
            }
        }
        Jet {
            value: a.value * b.value,
            grad: std::array::from_fn(|i| a.value * b.grad[i] + b.value * a.grad[i]),
            hess,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn([Jet; 3]) -> Jet, x: [f64; 3]) {
        let h = 1e-4;
        let jet = f(Jet::point(x));
        let val = |p: [f64; 3]| f(Jet::point(p)).value;
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (val(xp) - val(xm)) / (2.0 * h);
            assert!((fd - jet.grad[a]).abs() < 1e-6, "grad {a}: {fd} vs {}", jet.grad[a]);
            for b in 0..3 {
                let gp = f(Jet::point(xp)).grad[b];
                let gm = f(Jet::point(xm)).grad[b];
                let fd2 = (gp - gm) / (2.0 * h);
                assert!(
                    (fd2 - jet.hessian(a, b)).abs() < 1e-5,
                    "hess {a}{b}: {fd2} vs {}",
                    jet.hessian(a, b)
                );
            }
        }
    }

    #[test]
    fn polynomial_derivatives_are_exact() {
        let x = Jet::point([1.5, -2.0, 0.5]);
        let u = x[0] * x[1] * x[2];
        assert_eq!(u.value, -1.5);
        assert_eq!(u.grad, [-1.0, 0.75, -3.0]);
        assert_eq!(u.partial([1, 1, 0]), Some(0.5));
        assert_eq!(u.partial([0, 1, 1]), Some(1.5));
        assert_eq!(u.partial([2, 0, 0]), Some(0.0));
        assert_eq!(u.partial([1, 1, 1]), None);
    }

    #[test]
    fn transcendental_chain_matches_finite_differences() {
        let f = |x: [Jet; 3]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let phi = x[1].atan2(&x[0]);
            r.powf(2.0 / 3.0) * (phi * (2.0 / 3.0)).sin() * (x[2] * 0.3).exp()
        };
        fd_check(f, [0.4, 0.7, -0.2]);
        fd_check(f, [-0.3, -0.5, 0.9]);
        let g = |x: [Jet; 3]| (x[0] / (x[1] + 3.0)).cos() * x[2].powi(3);
        fd_check(g, [0.2, 0.1, 1.3]);
    }
}

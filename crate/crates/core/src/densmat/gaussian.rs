//! Two-variable complex Gaussians `exp(c + b.z - z.M.z / 2)`, `z = (x, x')`,
//! and their exact evolution under the free-particle kernel.

use num_complex::Complex;

use crate::scalar::Real;

/// `exp(ln_c + b.z - z.M.z / 2)` with symmetric `M = [[m11, m12], [m12, m22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm<F> {
    pub ln_c: Complex<F>,
    pub b: [Complex<F>; 2],
    pub m11: Complex<F>,
    pub m12: Complex<F>,
    pub m22: Complex<F>,
}

type C<F> = Complex<F>;

fn solve<F: Real>(g: [[C<F>; 2]; 2], v: [C<F>; 2]) -> [C<F>; 2] {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    [
        (g[1][1] * v[0] - g[0][1] * v[1]) / det,
        (g[0][0] * v[1] - g[1][0] * v[0]) / det,
    ]
}

impl<F: Real> GaussianTerm<F> {
    pub fn ln_value(&self, x: F, xp: F) -> C<F> {
        let half = F::lit(0.5);
        self.ln_c + self.b[0] * x + self.b[1] * xp
            - (self.m11 * (x * x) + self.m12 * (F::lit(2.0) * x * xp) + self.m22 * (xp * xp)) * half
    }

    pub fn value(&self, x: F, xp: F) -> C<F> {
        self.ln_value(x, xp).exp()
    }

    /// `rho -> K rho K^dagger` with `K(x, y) = sqrt(m / (2 pi i t)) exp(i m (x - y)^2 / (2t))`.
    ///
    /// With `tau = t/m`, `D = diag(1, -1)`, `G = 1 + i tau D M` and `H = G^T`:
    /// `M -> H^-1 M`, `b -> H^-1 b`, `c -> c - ln det G / 2 + i tau b.G^-1 D b / 2`.
    /// This form stays accurate as `t -> 0`. The principal log is continuous
    /// along the evolution while `Re M` is positive definite and real,
    /// since then `Re det G = 1 + tau^2 det M > 0`.
    pub fn evolve_free(&self, mass: F, t: F) -> Self {
        if t == F::zero() {
            return *self;
        }
        let one = C::new(F::one(), F::zero());
        let it = C::new(F::zero(), t / mass);
        // G = I + i tau D M
        let g = [
            [one + it * self.m11, it * self.m12],
            [-(it * self.m12), one - it * self.m22],
        ];
        let h = [[g[0][0], g[1][0]], [g[0][1], g[1][1]]];
        let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let d_b = [self.b[0], -self.b[1]];
        let g_inv_db = solve(g, d_b);
        let quad = self.b[0] * g_inv_db[0] + self.b[1] * g_inv_db[1];
        let half = F::lit(0.5);
        let ln_c = self.ln_c - det_g.ln() * half + it * quad * half;
        let b = solve(h, self.b);
        let col1 = solve(h, [self.m11, self.m12]);
        let col2 = solve(h, [self.m12, self.m22]);
        Self {
            ln_c,
            b,
            m11: col1[0],
            // symmetric up to rounding; average the two off-diagonal entries
            m12: (col1[1] + col2[0]) * half,
            m22: col2[1],
        }
    }

    /// Center and marginal standard deviations of the envelope `|value|`.
    pub fn envelope(&self) -> ([F; 2], [F; 2]) {
        let (r11, r12, r22) = (self.m11.re, self.m12.re, self.m22.re);
        let det = r11 * r22 - r12 * r12;
        let cov = [r22 / det, r11 / det];
        let (b0, b1) = (self.b[0].re, self.b[1].re);
        let center = [(r22 * b0 - r12 * b1) / det, (r11 * b1 - r12 * b0) / det];
        (center, [cov[0].sqrt(), cov[1].sqrt()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pure_packet_spreads_like_schrodinger() {
        // psi = exp(-x^2/(4 s^2)) => rho = psi(x) psi*(x'), M = diag(1/2s^2)
        let s2: f64 = 0.01;
        let term = GaussianTerm {
            ln_c: C::new(-0.5 * (2.0 * PI * s2).ln(), 0.0),
            b: [C::new(0.0, 0.0); 2],
            m11: C::new(0.5 / s2, 0.0),
            m12: C::new(0.0, 0.0),
            m22: C::new(0.5 / s2, 0.0),
        };
        let t = 0.3;
        let ev = term.evolve_free(1.0, t);
        let w2 = s2 + t * t / (4.0 * s2);
        for &x in &[0.0, 0.5, -1.3] {
            let p = ev.value(x, x);
            let exact = (-x * x / (2.0 * w2)).exp() / (2.0 * PI * w2).sqrt();
            assert!((p.re - exact).abs() < 1e-13 * exact.max(1e-300));
            assert!(p.im.abs() < 1e-13 * exact);
        }
    }

    #[test]
    fn evolution_composes() {
        let term = GaussianTerm {
            ln_c: C::new(-1.0, 0.0),
            b: [C::new(3.0, 0.0), C::new(-2.0, 0.0)],
            m11: C::new(51.0, 0.0),
            m12: C::new(-1.0, 0.0),
            m22: C::new(51.0, 0.0),
        };
        let a = term.evolve_free(1.0, 0.2).evolve_free(1.0, 0.3);
        let b = term.evolve_free(1.0, 0.5);
        for &(x, xp) in &[(0.1, 0.2), (-0.4, 0.3), (1.0, -1.0)] {
            let (va, vb) = (a.value(x, xp), b.value(x, xp));
            assert!((va - vb).norm() < 1e-12 * vb.norm());
        }
    }
}

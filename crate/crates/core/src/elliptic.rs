//! Weierstrass data for the family y^2 = 4x^3 + 2tx + u at arbitrary
//! precision: cubic roots, A/B periods and quasi-periods by quadrature,
//! and evaluators for wp, wp', zeta with lattice reduction.
//!
//! Invariants follow g2 = -2t, g3 = -u, so wp'(z)^2 = 4 wp^3 + 2t wp + u
//! and the discriminant is D = -8t^3 - 27u^2.

use crate::bigfloat::{abs_f64, big, big_zero, PREC};
use crate::error::{Result, WkbError};
use crate::stokes;
use num_complex::Complex64;
use rug::{Complex, Float};

fn cc(re: f64, im: f64) -> Complex {
    big(re, im)
}

/// Roots of 4x^3 + 2tx + u, seeded in f64 and Newton-polished at PREC.
pub fn cubic_roots(t: &Complex, u: &Complex, prec: u32) -> Result<[Complex; 3]> {
    let t64 = Complex64::new(t.real().to_f64(), t.imag().to_f64());
    let u64 = Complex64::new(u.real().to_f64(), u.imag().to_f64());
    let seeds = stokes::poly_roots(&[
        u64,
        2.0 * t64,
        Complex64::new(0.0, 0.0),
        Complex64::new(4.0, 0.0),
    ]);
    if seeds.len() != 3 {
        return Err(WkbError::InvalidInput("cubic root finding failed".into()));
    }
    let mut out = Vec::new();
    for s in seeds {
        let mut x = Complex::with_val(prec, (s.re, s.im));
        for _ in 0..12 {
            let f = x.clone() * &x * &x * 4f64 + t.clone() * &x * 2f64 + u;
            let fp = x.clone() * &x * 12f64 + t.clone() * 2f64;
            x -= f / fp;
        }
        out.push(x);
    }
    // deterministic ordering: ascending real part, then imaginary part
    out.sort_by(|a, b| {
        let (ar, ai) = (a.real().to_f64(), a.imag().to_f64());
        let (br, bi) = (b.real().to_f64(), b.imag().to_f64());
        ar.partial_cmp(&br)
            .unwrap()
            .then(ai.partial_cmp(&bi).unwrap())
    });
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// tanh-sinh nodes and weights on [-1, 1], ordered left to right.
fn tanh_sinh_nodes(prec: u32) -> Vec<(Float, Float)> {
    let h = 1.0 / 64.0;
    let jmax = 420i32;
    let half_pi = Float::with_val(prec, rug::float::Constant::Pi) / 2u32;
    let mut out = Vec::new();
    for j in -jmax..=jmax {
        let s = Float::with_val(prec, j as f64 * h);
        let sh = s.clone().sinh();
        let arg = half_pi.clone() * &sh;
        let x = arg.clone().tanh();
        let ch = arg.cosh();
        let w = half_pi.clone() * s.cosh() * Float::with_val(prec, h) / (ch.clone() * &ch);
        out.push((x, w));
    }
    out
}

/// Cycle data accumulated from one root pair: the integrals run over the
/// segment between e_i and e_j with the square-root branch of (e_k - x)
/// tracked continuously along the path.
struct CycleIntegrals {
    /// contour integral of dx/y
    omega: Complex,
    /// contour integral of x dx/y
    xperiod: Complex,
    /// contour integral of y dx
    ydx: Complex,
}

fn cycle_integrals(ei: &Complex, ej: &Complex, ek: &Complex, prec: u32) -> CycleIntegrals {
    let nodes = tanh_sinh_nodes(prec);
    let mid = (ei.clone() + ej) / 2f64;
    let half = (ej.clone() - ei) / 2f64;
    let delta = ej.clone() - ei;
    let half_pi = Float::with_val(prec, rug::float::Constant::Pi) / 2u32;
    let mut omega = Complex::with_val(prec, (0, 0));
    let mut xper = Complex::with_val(prec, (0, 0));
    let mut ydx = Complex::with_val(prec, (0, 0));
    let mut prev: Option<Complex> = None;
    for (xn, wn) in &nodes {
        // theta = (pi/2) xn, x = mid + half sin(theta)
        let theta = Complex::with_val(prec, (half_pi.clone() * xn, Float::with_val(prec, 0)));
        let st = theta.clone().sin();
        let ct = theta.cos();
        let x = mid.clone() + half.clone() * &st;
        let mut g = (ek.clone() - &x).sqrt();
        if let Some(p) = &prev {
            let d1 = abs_f64(&(g.clone() - p));
            let d2 = abs_f64(&(g.clone() + p));
            if d2 < d1 {
                g = -g;
            }
        }
        prev = Some(g.clone());
        // d theta = (pi/2) w dn; cycle = twice the segment
        let wt = Complex::with_val(
            prec,
            (half_pi.clone() * wn, Float::with_val(prec, 0)),
        );
        omega += wt.clone() / &g;
        xper += wt.clone() * &x / &g;
        ydx += wt * &ct * &ct * &g;
    }
    ydx *= delta.clone() * &delta;
    CycleIntegrals {
        omega,
        xperiod: xper,
        ydx,
    }
}

/// Periods, quasi-periods, and evaluators for the curve at fixed (t, u).
pub struct EllipticData {
    pub t: Complex,
    pub u: Complex,
    pub g2: Complex,
    pub g3: Complex,
    pub disc: Complex,
    pub roots: [Complex; 3],
    pub omega_a: Complex,
    pub omega_b: Complex,
    /// eta = -(contour integral of x dx/y); also the zeta quasi-period.
    pub eta_a: Complex,
    pub eta_b: Complex,
    /// contour integrals of y dx
    pub a_ydx: Complex,
    pub b_ydx: Complex,
    /// Laurent coefficients c_k of wp = 1/z^2 + sum_{k>=2} c_k z^{2k-2}
    wp_c: Vec<Complex>,
    /// shortest nonzero lattice vector length
    rmin: Float,
    pub prec: u32,
}

const WP_TERMS: usize = 96;

impl EllipticData {
    /// Construct from (t, u). The A-cycle surrounds the pair of roots with
    /// the two largest real parts and is oriented so Re((1/2pi i) A-period
    /// of y dx) >= 0; the B-cycle surrounds the lower pair, oriented so
    /// Im(omega_B/omega_A) > 0.
    pub fn new(t: &Complex, u: &Complex) -> Result<Self> {
        Self::new_with_prec(t, u, PREC)
    }

    pub fn new_with_prec(t: &Complex, u: &Complex, prec: u32) -> Result<Self> {
        let t = Complex::with_val(prec, t);
        let u = Complex::with_val(prec, &u.clone());
        let (t, u) = (&t, &u);
        let disc = -(t.clone() * t * t * 8f64) - u.clone() * u * 27f64;
        if abs_f64(&disc) < 1e-60 {
            return Err(WkbError::InvalidInput("degenerate curve: D = 0".into()));
        }
        let e = cubic_roots(t, u, prec)?;
        let mut a = cycle_integrals(&e[1], &e[2], &e[0], prec);
        let mut b = cycle_integrals(&e[0], &e[1], &e[2], prec);
        // orientation of A: nu = (1/2pi i) contour integral of y dx with
        // nonnegative real part (imaginary part as tie break)
        let pi2 = Float::with_val(prec, rug::float::Constant::Pi) * 2u32;
        let nu = a.ydx.clone() / Complex::with_val(prec, (0, pi2));
        let nure = nu.real().to_f64();
        if nure < 0.0 || (nure == 0.0 && nu.imag().to_f64() < 0.0) {
            a.omega = -a.omega;
            a.xperiod = -a.xperiod;
            a.ydx = -a.ydx;
        }
        // orientation of B: modular parameter in the upper half plane
        let tau = b.omega.clone() / &a.omega;
        if tau.imag().to_f64() <= 0.0 {
            b.omega = -b.omega;
            b.xperiod = -b.xperiod;
            b.ydx = -b.ydx;
        }
        let g2 = -(t.clone() * 2f64);
        let g3 = -u.clone();
        // wp Laurent coefficients: c2 = g2/20, c3 = g3/28,
        // c_k = 3/((2k+1)(k-3)) sum_{m=2}^{k-2} c_m c_{k-m}
        let mut wp_c = vec![Complex::with_val(prec, (0, 0)); WP_TERMS];
        if WP_TERMS > 2 {
            wp_c[2] = g2.clone() / 20f64;
        }
        if WP_TERMS > 3 {
            wp_c[3] = g3.clone() / 28f64;
        }
        for k in 4..WP_TERMS {
            let mut s = Complex::with_val(prec, (0, 0));
            for m in 2..=k - 2 {
                s += wp_c[m].clone() * &wp_c[k - m];
            }
            wp_c[k] = s * 3f64 / ((2 * k + 1) as f64 * (k - 3) as f64);
        }
        let mut rmin = Float::with_val(prec, f64::INFINITY);
        for (m, n) in [(1i32, 0i32), (0, 1), (1, 1), (1, -1)] {
            let v = a.omega.clone() * m + b.omega.clone() * n;
            let l = v.abs().into_real_imag().0;
            if l < rmin {
                rmin = l;
            }
        }
        Ok(Self {
            t: t.clone(),
            u: u.clone(),
            g2,
            g3,
            disc,
            roots: e,
            omega_a: a.omega,
            omega_b: b.omega,
            eta_a: -a.xperiod,
            eta_b: -b.xperiod,
            a_ydx: a.ydx,
            b_ydx: b.ydx,
            wp_c,
            rmin,
            prec,
        })
    }

    /// nu(u) = (1/2 pi i) contour integral of y dx over the A-cycle.
    pub fn nu(&self) -> Complex {
        let pi2 = Float::with_val(self.prec, rug::float::Constant::Pi) * 2u32;
        self.a_ydx.clone() / Complex::with_val(self.prec, (0, pi2))
    }

    pub fn half_periods(&self) -> [Complex; 3] {
        [
            self.omega_a.clone() / 2f64,
            self.omega_b.clone() / 2f64,
            (self.omega_a.clone() + &self.omega_b) / 2f64,
        ]
    }

    /// zeta value at the half period (m omega_A + n omega_B)/2.
    pub fn zeta_half_period(&self, m: i32, n: i32) -> Complex {
        (self.eta_a.clone() * m + self.eta_b.clone() * n) / 2f64
    }

    /// Reduce z modulo the lattice to coefficients in [-1/2, 1/2), returning
    /// the reduced point and the integer lattice shift (m, n).
    pub fn reduce(&self, z: &Complex) -> (Complex, i64, i64) {
        let (ar, ai) = (self.omega_a.real().to_f64(), self.omega_a.imag().to_f64());
        let (br, bi) = (self.omega_b.real().to_f64(), self.omega_b.imag().to_f64());
        let det = ar * bi - br * ai;
        let (zr, zi) = (z.real().to_f64(), z.imag().to_f64());
        let ca = (zr * bi - zi * br) / det;
        let cb = (zi * ar - zr * ai) / det;
        let m = ca.round() as i64;
        let n = cb.round() as i64;
        let zred = z.clone() - self.omega_a.clone() * m - self.omega_b.clone() * n;
        (zred, m, n)
    }

    /// Laurent series sums at small |z|: wp, wp', zeta.
    fn series(&self, z: &Complex) -> (Complex, Complex, Complex) {
        let z2 = z.clone() * z;
        let mut wp = Complex::with_val(self.prec, (0, 0));
        let mut wpp = Complex::with_val(self.prec, (0, 0));
        let mut zeta = Complex::with_val(self.prec, (0, 0));
        // Horner from the top in powers of z^2
        for k in (2..WP_TERMS).rev() {
            wp = (wp + &self.wp_c[k]) * &z2;
            wpp = (wpp + self.wp_c[k].clone() * (2 * k as i64 - 2)) * &z2;
            zeta = (zeta + self.wp_c[k].clone() / (2 * k as i64 - 1)) * &z2;
        }
        // wp = 1/z^2 + z^2 * sum c_k z^{2k-4}; computed sum carries z^2 once
        let inv = Complex::with_val(self.prec, 1) / z;
        let inv2 = inv.clone() * &inv;
        let wp_v = inv2.clone() + wp;
        let wpp_v = -(inv2.clone() * &inv * 2f64) + wpp / z;
        let zeta_v = inv - zeta * z;
        (wp_v, wpp_v, zeta_v)
    }

    /// wp, wp', zeta at z, via lattice reduction, argument halving, and the
    /// duplication formulas.
    pub fn wp_all(&self, z: &Complex) -> (Complex, Complex, Complex) {
        let (zr, m, n) = self.reduce(z);
        let thresh = self.rmin.clone() * 0.3f64;
        let mut k = 0u32;
        let mut zs = zr.clone();
        while zs.clone().abs().into_real_imag().0 > thresh && k < 8 {
            zs /= 2f64;
            k += 1;
        }
        let (mut p, mut pp, mut zv) = self.series(&zs);
        for _ in 0..k {
            // wp(2z) = (wp''/(2 wp'))^2 - 2 wp, with wp'' = 6 wp^2 - g2/2
            let p2 = p.clone() * &p * 6f64 - self.g2.clone() / 2f64;
            let p3 = p.clone() * &pp * 12f64;
            let r = p2.clone() / (pp.clone() * 2f64);
            let pnew = r.clone() * &r - p.clone() * 2f64;
            // wp'(2z) = r (wp''' wp' - wp''^2)/(2 wp'^2) - wp'
            let ppnew = r.clone() * (p3 * &pp - p2.clone() * &p2)
                / (pp.clone() * &pp * 2f64)
                - pp.clone();
            // zeta(2z) = 2 zeta(z) + wp''/(2 wp')
            zv = zv * 2f64 + r;
            p = pnew;
            pp = ppnew;
        }
        let zq = zv + self.eta_a.clone() * m + self.eta_b.clone() * n;
        (p, pp, zq)
    }

    pub fn wp(&self, z: &Complex) -> Complex {
        self.wp_all(z).0
    }

    pub fn wp_prime(&self, z: &Complex) -> Complex {
        self.wp_all(z).1
    }

    pub fn zeta(&self, z: &Complex) -> Complex {
        self.wp_all(z).2
    }

    /// Distance from the origin to the nearest nonzero lattice point.
    pub fn rmin(&self) -> &Float {
        &self.rmin
    }

    /// Laurent coefficients of wp at the origin: c[m] multiplies z^{2m-2}.
    pub fn wp_laurent(&self) -> &[Complex] {
        &self.wp_c
    }

    /// Taylor coefficients a_0..a_{nterms-1} of wp(z0 + w) from initial data
    /// (wp(z0), wp'(z0)), generated by the ODE wp'' = 6 wp^2 - g2/2.
    pub fn wp_taylor(&self, p0: &Complex, p1: &Complex, nterms: usize) -> Vec<Complex> {
        let mut a = vec![Complex::with_val(self.prec, (0, 0)); nterms.max(2)];
        a[0] = p0.clone();
        a[1] = p1.clone();
        for k in 0..nterms.saturating_sub(2) {
            // (k+2)(k+1) a_{k+2} = 6 (a*a)_k - (g2/2) delta_{k,0}
            let mut s = Complex::with_val(self.prec, (0, 0));
            for j in 0..=k {
                s += a[j].clone() * &a[k - j];
            }
            let mut rhs = s * 6f64;
            if k == 0 {
                rhs -= self.g2.clone() / 2f64;
            }
            a[k + 2] = rhs / ((k as f64 + 2.0) * (k as f64 + 1.0));
        }
        a.truncate(nterms);
        a
    }

    /// |eta_A omega_B - eta_B omega_A| - 2 pi, which should vanish
    /// (Legendre relation up to the sign of the symplectic pairing).
    pub fn legendre_defect(&self) -> f64 {
        let l = self.eta_a.clone() * &self.omega_b - self.eta_b.clone() * &self.omega_a;
        let pi2 = Float::with_val(self.prec, rug::float::Constant::Pi) * 2u32;
        (l.abs().into_real_imag().0 - pi2).to_f64().abs()
    }
}

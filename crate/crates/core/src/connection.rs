//! Connection matrices of exact WKB analysis: the Voros formula at a simple
//! turning point, the Koike formula at a simple pole, Voros periods and
//! normalization shifts, assembly of connection matrices along paths, and
//! the Stokes-automorphism (DDP) action on e^W.
//!
//! Matrices live over a symbolic exponential ring (Laurent monomials in
//! named symbols such as e^{V_gamma/2}, with exact rational-function
//! coefficients), so statements like "determinant = 1" are exact.

use crate::bigfloat::PREC;
use crate::error::{Result, WkbError};
use crate::exppoly::ExpPoly;
use crate::genus0::{weber_c_sequence, weber_residue_at_infinity};
use crate::mpoly::NVARS;
use crate::param::Param;
use crate::qq::Qi;
use crate::stokes::StokesGraph;
use num_complex::Complex64;
use rug::Complex;

/// The conventional symbol name for e^{V_gamma/2} on the Weber cycle.
pub const WEBER_HALF_PERIOD_SYMBOL: &str = "Eg";

// ---------------------------------------------------------------------------
// Connection matrices over the exponential ring
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionMatrix {
    pub e: [[ExpPoly; 2]; 2],
}

impl ConnectionMatrix {
    pub fn identity() -> Self {
        Self {
            e: [
                [ExpPoly::one(), ExpPoly::zero()],
                [ExpPoly::zero(), ExpPoly::one()],
            ],
        }
    }

    pub fn new(a: ExpPoly, b: ExpPoly, c: ExpPoly, d: ExpPoly) -> Self {
        Self { e: [[a, b], [c, d]] }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::identity();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0]
                    .mul(&rhs.e[0][j])
                    .add(&self.e[i][1].mul(&rhs.e[1][j]));
            }
        }
        out
    }

    pub fn det(&self) -> ExpPoly {
        self.e[0][0].mul(&self.e[1][1]).sub(&self.e[0][1].mul(&self.e[1][0]))
    }

    /// Numeric evaluation with the given symbol values; parameters are all
    /// substituted by the supplied assignment vector.
    pub fn eval_f64(
        &self,
        sym_vals: &dyn Fn(&str) -> Complex64,
        par_vals: &[Qi; NVARS],
    ) -> [[Complex64; 2]; 2] {
        let g = |i: usize, j: usize| self.e[i][j].eval_f64(sym_vals, par_vals);
        [[g(0, 0), g(0, 1)], [g(1, 0), g(1, 1)]]
    }
}

/// Voros connection matrix at a simple turning point. `orientation` is the
/// sign of int sqrt(Q) dx on the crossed Stokes curve:
/// + gives [[1,0],[i,1]], - gives [[1,i],[0,1]].
pub fn voros_local_matrix(orientation: i32) -> ConnectionMatrix {
    let i = ExpPoly::constant(Param::i());
    if orientation >= 0 {
        ConnectionMatrix::new(ExpPoly::one(), ExpPoly::zero(), i, ExpPoly::one())
    } else {
        ConnectionMatrix::new(ExpPoly::one(), i, ExpPoly::zero(), ExpPoly::one())
    }
}

// ---------------------------------------------------------------------------
// Koike formula at a simple pole
// ---------------------------------------------------------------------------

/// Numeric Koike multiplier 2i cos(pi sqrt(1 + 4 lambda)).
pub fn koike_multiplier(lambda: f64) -> Complex64 {
    let disc = Complex64::new(1.0 + 4.0 * lambda, 0.0).sqrt();
    Complex64::new(0.0, 2.0) * (std::f64::consts::PI * disc).cos()
}

/// Exact Koike multiplier when 1 + 4 lambda is the square of a rational
/// with denominator dividing 6 (so cos(pi sqrt(1+4 lambda)) is rational).
pub fn koike_multiplier_exact(lambda: &Qi) -> Option<Qi> {
    let disc = &Qi::from_int(1) + &(&Qi::from_int(4) * lambda);
    let s = disc.sqrt_exact()?;
    if !s.is_real() {
        return None;
    }
    // cos(pi r) for rational r: exact on the denominators 1, 2, 3, 6
    let r = s.re.clone();
    let den: i64 = r.denom().try_into().ok()?;
    let num: i64 = r.numer().try_into().ok()?;
    let cos_pi = |num: i64, den: i64| -> Option<Qi> {
        // reduce num/den mod 2 (period of cos(pi r) is 2)
        let m = num.rem_euclid(2 * den);
        match den {
            1 => Some(Qi::from_int(if m == 0 { 1 } else { -1 })),
            2 => Some(match m {
                1 | 3 => Qi::zero(),
                0 => Qi::from_int(1),
                _ => Qi::from_int(-1),
            }),
            3 => Some(match m {
                0 => Qi::from_int(1),
                1 | 5 => Qi::from_frac(1, 2),
                2 | 4 => Qi::from_frac(-1, 2),
                _ => Qi::from_int(-1), // m == 3
            }),
            6 => match m {
                3 | 9 => Some(Qi::zero()),
                0 => Some(Qi::from_int(1)),
                6 => Some(Qi::from_int(-1)),
                2 | 10 => Some(Qi::from_frac(1, 2)),
                4 | 8 => Some(Qi::from_frac(-1, 2)),
                _ => None, // +-sqrt(3)/2 is not rational
            },
            _ => None,
        }
    };
    let c = cos_pi(num, den)?;
    Some(&(&Qi::i() * &Qi::from_int(2)) * &c)
}

/// Koike connection matrix at a simple pole with exponent parameter lambda.
pub fn koike_local_matrix(lambda: &Qi, orientation: i32) -> Option<ConnectionMatrix> {
    let m = ExpPoly::constant(Param::from_qi(koike_multiplier_exact(lambda)?));
    Some(if orientation >= 0 {
        ConnectionMatrix::new(ExpPoly::one(), ExpPoly::zero(), m, ExpPoly::one())
    } else {
        ConnectionMatrix::new(ExpPoly::one(), m, ExpPoly::zero(), ExpPoly::one())
    })
}

// ---------------------------------------------------------------------------
// Voros periods
// ---------------------------------------------------------------------------

/// Term-wise period of P_odd along a cycle. For closed cycles the stored
/// coefficients multiply 2 pi i (they are residue sums); for relative
/// cycles they are plain series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct VorosPeriod {
    pub cycle: String,
    pub closed: bool,
    pub min_order: i64,
    /// coefficient of hbar^{min_order + j}
    pub coeffs: Vec<Param>,
}

impl VorosPeriod {
    pub fn reverse(&self) -> Self {
        Self {
            cycle: format!("-{}", self.cycle),
            closed: self.closed,
            min_order: self.min_order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.closed, rhs.closed);
        let lo = self.min_order.min(rhs.min_order);
        let hi = (self.min_order + self.coeffs.len() as i64)
            .max(rhs.min_order + rhs.coeffs.len() as i64);
        let mut coeffs = vec![Param::zero(); (hi - lo) as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = (self.min_order - lo) as usize + j;
            coeffs[k] = &coeffs[k] + c;
        }
        for (j, c) in rhs.coeffs.iter().enumerate() {
            let k = (rhs.min_order - lo) as usize + j;
            coeffs[k] = &coeffs[k] + c;
        }
        Self {
            cycle: format!("{}+{}", self.cycle, rhs.cycle),
            closed: self.closed,
            min_order: lo,
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The Weber closed cycle gamma encircling both turning points, oriented so
/// that V_gamma = -2 pi i nu / hbar; all higher-order terms vanish because
/// the residues of P_m at infinity are zero for m >= 0.
pub fn weber_voros_gamma(max_m: i64) -> VorosPeriod {
    let cseq = weber_c_sequence(max_m);
    let nu = Param::var("nu");
    let r = weber_residue_at_infinity(&cseq, -1);
    // orientation sign pinned by the exact leading value -nu
    let flip = r == nu;
    let mut coeffs = Vec::new();
    for m in -1..=max_m {
        if m >= 0 && m % 2 == 0 {
            // P_odd only carries odd powers of hbar beside hbar^{-1}
            coeffs.push(Param::zero());
            continue;
        }
        let res = weber_residue_at_infinity(&cseq, m);
        coeffs.push(if flip { -&res } else { res });
    }
    VorosPeriod {
        cycle: "gamma".into(),
        closed: true,
        min_order: -1,
        coeffs,
    }
}

/// The Weber relative cycle from infinity_- to infinity_+ whose term-wise
/// integrals are the Bernoulli numbers series W(hbar).
pub fn weber_voros_relative(max_m: i64) -> VorosPeriod {
    let cseq = weber_c_sequence(max_m);
    let mut coeffs = Vec::new();
    for m in 1..=max_m {
        if m % 2 == 0 {
            coeffs.push(Param::zero());
        } else {
            coeffs.push(crate::genus0::weber_infty_integral(&cseq, m));
        }
    }
    VorosPeriod {
        cycle: "infty-to-infty".into(),
        closed: false,
        min_order: 1,
        coeffs,
    }
}

// ---------------------------------------------------------------------------
// Normalization shifts and path assembly
// ---------------------------------------------------------------------------

/// Diagonal matrix diag(e^{V/2}, e^{-V/2}) relating WKB solutions normalized
/// at two turning points joined by the cycle with half-period symbol `sym`.
/// Passing the same turning point twice (power 0) gives the identity.
pub fn normalization_shift(sym: &str, power: i64) -> ConnectionMatrix {
    ConnectionMatrix::new(
        ExpPoly::symbol_pow(sym, power),
        ExpPoly::zero(),
        ExpPoly::zero(),
        ExpPoly::symbol_pow(sym, -power),
    )
}

/// One crossing of a Stokes curve along a path: the orientation sign of
/// int sqrt(Q), and the accumulated normalization shift (power of the
/// half-period symbol) between the base turning point and the one emitting
/// the crossed curve.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub orientation: i32,
    pub shift_symbol: Option<(String, i64)>,
}

impl Crossing {
    pub fn plain(orientation: i32) -> Self {
        Self {
            orientation,
            shift_symbol: None,
        }
    }

    pub fn shifted(orientation: i32, sym: &str, power: i64) -> Self {
        Self {
            orientation,
            shift_symbol: Some((sym.to_string(), power)),
        }
    }

    fn matrix(&self) -> ConnectionMatrix {
        let s = voros_local_matrix(self.orientation);
        match &self.shift_symbol {
            None => s,
            Some((sym, p)) => {
                let d = normalization_shift(sym, *p);
                let dinv = normalization_shift(sym, -*p);
                dinv.mul(&s).mul(&d)
            }
        }
    }
}

/// The path-lifting form of a single crossing: a plain crossing reproduces
/// the Voros matrix; a detour differing by a cycle contributes the shifted
/// off-diagonal entry i e^{-V}.
pub fn path_lift_matrix(orientation: i32, detour: Option<(&str, i64)>) -> ConnectionMatrix {
    Crossing {
        orientation,
        shift_symbol: detour.map(|(s, p)| (s.to_string(), p)),
    }
    .matrix()
}

/// Ordered product of local matrices (and normalization shifts) along a
/// path: (Psi^start) = (Psi^end) * M. Refuses to work on graphs with saddle
/// connections, where the Voros formula does not apply.
pub fn assemble_connection(
    path: &[Crossing],
    graph: Option<&StokesGraph>,
) -> Result<ConnectionMatrix> {
    if let Some(g) = graph {
        if !g.saddles.is_empty() {
            return Err(WkbError::InvalidInput(
                "stokes graph contains a saddle connection".into(),
            ));
        }
    }
    // (Psi^I) = (Psi^II) S_1, (Psi^II) = (Psi^III) S_2, ... so the total is
    // S_n ... S_2 S_1 applied on the right of the final region's basis.
    let mut total = ConnectionMatrix::identity();
    for c in path.iter().rev() {
        total = total.mul(&c.matrix());
    }
    Ok(total)
}

/// The Weber connection matrix from region I to III: two Voros crossings,
/// the second conjugated by the gamma-cycle normalization shift, giving
/// [[1, i(1 + e^{-V_gamma})], [0, 1]].
pub fn weber_connection_i_to_iii() -> ConnectionMatrix {
    let path = [
        Crossing::plain(-1),
        Crossing::shifted(-1, WEBER_HALF_PERIOD_SYMBOL, 1),
    ];
    assemble_connection(&path, None).expect("no graph supplied")
}

// ---------------------------------------------------------------------------
// DDP / Stokes automorphism on e^W
// ---------------------------------------------------------------------------

/// Direction of nu on the imaginary axis for the Weber DDP formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DdpDirection {
    NuPositiveImaginary,
    NuNegativeImaginary,
}

/// Multiplicative action of the Stokes automorphism on e^W as a symbolic
/// fraction in the symbol X = e^{2 pi i nu / hbar}:
/// (1 + X) for nu in i R_{>0}, (1 + X^{-1})^{-1} for nu in i R_{<0}.
pub struct DdpFactor {
    pub numer: ExpPoly,
    pub denom: ExpPoly,
}

pub const DDP_SYMBOL: &str = "Xnu";

pub fn ddp_action(direction: DdpDirection) -> DdpFactor {
    let x = ExpPoly::symbol(DDP_SYMBOL);
    let xinv = ExpPoly::symbol_pow(DDP_SYMBOL, -1);
    match direction {
        DdpDirection::NuPositiveImaginary => DdpFactor {
            numer: ExpPoly::one().add(&x),
            denom: ExpPoly::one(),
        },
        DdpDirection::NuNegativeImaginary => DdpFactor {
            numer: ExpPoly::one(),
            denom: ExpPoly::one().add(&xinv),
        },
    }
}

/// Lateral Borel sum of the Weber series W(hbar) computed from the exact
/// closed form of its Borel transform (series fallback near zeta = 0 to
/// avoid cancellation).
pub fn weber_w_lateral_sum(nu: Complex64, hbar: f64, theta: f64) -> Complex {
    let h = Complex::with_val(PREC, (hbar, 0.0));
    crate::borel::laplace_ray(
        |z| crate::borel::weber_borel_w_closed(nu, z),
        &h,
        theta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::abs_f64;

    fn no_params() -> [Qi; NVARS] {
        std::array::from_fn(|_| Qi::from_int(1))
    }

    #[test]
    fn voros_matrices_and_determinants() {
        let plus = voros_local_matrix(1);
        let minus = voros_local_matrix(-1);
        assert_eq!(plus.e[1][0], ExpPoly::constant(Param::i()));
        assert!(plus.e[0][1].is_zero());
        assert_eq!(minus.e[0][1], ExpPoly::constant(Param::i()));
        assert!(minus.e[1][0].is_zero());
        assert!(plus.det().is_one());
        assert!(minus.det().is_one());
    }

    #[test]
    fn koike_multiplier_values() {
        // lambda = -1/4 -> 2i, lambda = 0 -> -2i, lambda = 2 -> -2i
        let two_i = &Qi::i() * &Qi::from_int(2);
        assert_eq!(
            koike_multiplier_exact(&Qi::from_frac(-1, 4)).unwrap(),
            two_i
        );
        assert_eq!(
            koike_multiplier_exact(&Qi::from_int(0)).unwrap(),
            -&two_i
        );
        assert_eq!(koike_multiplier_exact(&Qi::from_int(2)).unwrap(), -&two_i);
        // numeric agreement at a generic lambda
        let m = koike_multiplier(0.37);
        let disc = (1.0f64 + 4.0 * 0.37).sqrt();
        let expect = Complex64::new(0.0, 2.0 * (std::f64::consts::PI * disc).cos());
        assert!((m - expect).norm() < 1e-14);
        // and the exact path agrees with the numeric one where both exist
        let e = koike_multiplier_exact(&Qi::from_frac(-1, 4)).unwrap();
        let (re, im) = e.to_f64_pair();
        assert!((Complex64::new(re, im) - koike_multiplier(-0.25)).norm() < 1e-14);
        let km = koike_local_matrix(&Qi::from_frac(-1, 4), -1).unwrap();
        assert!(km.det().is_one());
    }

    #[test]
    fn weber_gamma_period_is_minus_2_pi_i_nu_over_hbar() {
        let v = weber_voros_gamma(9);
        assert!(v.closed);
        assert_eq!(v.min_order, -1);
        // leading coefficient -nu (so V = 2 pi i * (-nu) / hbar)
        assert_eq!(v.coeffs[0], -&Param::var("nu"));
        for c in &v.coeffs[1..] {
            assert!(c.is_zero(), "higher-order residue should vanish: {c:?}");
        }
    }

    #[test]
    fn weber_relative_period_leading_term() {
        let v = weber_voros_relative(5);
        assert!(!v.closed);
        // hbar^1 coefficient -1/(24 nu)
        let expect = &Param::from_frac(-1, 24) * &Param::var("nu").inv();
        assert_eq!(v.coeffs[0], expect);
        assert!(v.coeffs[1].is_zero());
    }

    #[test]
    fn reversed_cycle_cancels() {
        let v = weber_voros_gamma(5);
        assert!(v.add(&v.reverse()).is_zero());
    }

    #[test]
    fn normalization_shift_composes_to_identity() {
        let d = normalization_shift("Eg", 1);
        let dinv = normalization_shift("Eg", -1);
        assert_eq!(d.mul(&dinv), ConnectionMatrix::identity());
        assert_eq!(normalization_shift("Eg", 0), ConnectionMatrix::identity());
        assert!(d.det().is_one());
    }

    #[test]
    fn weber_connection_region_i_to_iii() {
        let m = weber_connection_i_to_iii();
        // [[1, i (1 + e^{-V_gamma})], [0, 1]] with e^{-V_gamma} = Eg^{-2}
        let i = ExpPoly::constant(Param::i());
        let expect01 = i.mul(&ExpPoly::one().add(&ExpPoly::symbol_pow(
            WEBER_HALF_PERIOD_SYMBOL,
            -2,
        )));
        assert!(m.e[0][0].is_one());
        assert_eq!(m.e[0][1], expect01);
        assert!(m.e[1][0].is_zero());
        assert!(m.e[1][1].is_one());
        assert!(m.det().is_one());

        // it equals the explicit product of the two crossing matrices
        let s1 = voros_local_matrix(-1);
        let s2 = path_lift_matrix(-1, Some((WEBER_HALF_PERIOD_SYMBOL, 1)));
        assert_eq!(m, s2.mul(&s1));

        // single crossing I -> II and the empty path
        let s = assemble_connection(&[Crossing::plain(-1)], None).unwrap();
        assert_eq!(s, voros_local_matrix(-1));
        let e = assemble_connection(&[], None).unwrap();
        assert_eq!(e, ConnectionMatrix::identity());

        // numeric substitution: V_gamma = -2 pi i nu/hbar at nu = 1, hbar = 2
        let vgamma = -2.0 * std::f64::consts::PI * 1.0 / 2.0; // V/ i
        let eg = (Complex64::new(0.0, vgamma) / 2.0).exp(); // e^{V/2}
        let vals = m.eval_f64(
            &|s: &str| if s == WEBER_HALF_PERIOD_SYMBOL { eg } else { Complex64::new(1.0, 0.0) },
            &no_params(),
        );
        let expect = Complex64::new(0.0, 1.0)
            * (Complex64::new(1.0, 0.0) + (Complex64::new(0.0, -vgamma)).exp());
        assert!((vals[0][1] - expect).norm() < 1e-12);
    }

    #[test]
    fn assemble_refuses_saddle_graphs() {
        use crate::stokes::{trace_stokes_graph, QuadDiff, TraceOptions};
        let c = |re: f64| Complex64::new(re, 0.0);
        // Q = x^3 - x has saddle connections
        let g = trace_stokes_graph(
            &QuadDiff::new(vec![c(0.0), c(-1.0), c(0.0), c(1.0)], vec![c(1.0)]),
            &TraceOptions::default(),
        );
        let r = assemble_connection(&[Crossing::plain(1)], Some(&g));
        assert!(r.is_err());
    }

    #[test]
    fn ddp_symbolic_factors() {
        let up = ddp_action(DdpDirection::NuPositiveImaginary);
        assert_eq!(
            up.numer,
            ExpPoly::one().add(&ExpPoly::symbol(DDP_SYMBOL))
        );
        assert!(up.denom.is_one());
        let down = ddp_action(DdpDirection::NuNegativeImaginary);
        assert!(down.numer.is_one());
        assert_eq!(
            down.denom,
            ExpPoly::one().add(&ExpPoly::symbol_pow(DDP_SYMBOL, -1))
        );
    }

    #[test]
    fn ddp_lateral_jump_matches_formula() {
        // nu = 0.05i, hbar = 0.1: Borel singularities of W sit on the
        // positive real axis at 0.1 pi k; the two lateral sums differ by
        // -log(1 + e^{2 pi i nu/hbar}) with e^{2 pi i nu/hbar} = e^{-pi}.
        let nu = Complex64::new(0.0, 0.05);
        let hbar = 0.1;
        let upper = weber_w_lateral_sum(nu, hbar, 0.3);
        let lower = weber_w_lateral_sum(nu, hbar, -0.3);
        let jump = upper - lower;
        let x = (-std::f64::consts::PI).exp();
        let expect = -(1.0 + x).ln();
        let diff = abs_f64(&(jump - Complex::with_val(PREC, (expect, 0.0))));
        assert!(diff < 1e-6, "jump mismatch {diff}");
    }
}

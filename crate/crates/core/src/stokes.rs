//! Stokes geometry: turning points, trajectory tracing for the quadratic
//! differential Q_0 dx^2, saddle-connection detection, and region labels.
//!
//! Tracing integrates dx/ds = e^{i theta} / sqrt(Q_0(x)) with continuous
//! branch tracking, so the phase integral of sqrt(Q_0) dx moves along the
//! ray of angle theta and the computed polyline is a Stokes curve.

use num_complex::Complex64;
use serde::Serialize;

type C = Complex64;

/// Rational Q_0 with numeric coefficients, lowest degree first.
#[derive(Clone, Debug)]
pub struct QuadDiff {
    pub num: Vec<C>,
    pub den: Vec<C>,
}

fn poly_eval(p: &[C], x: C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn poly_diff(p: &[C]) -> Vec<C> {
    if p.len() <= 1 {
        return vec![];
    }
    p[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c * (k as f64 + 1.0))
        .collect()
}

/// Durand-Kerner root finder for a numeric polynomial (all roots at once).
pub fn poly_roots(p: &[C]) -> Vec<C> {
    let mut c = p.to_vec();
    while matches!(c.last(), Some(v) if v.norm() < 1e-300) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let monic: Vec<C> = c.iter().map(|v| v / lead).collect();
    // initial guesses on a circle of the Fujiwara-bound radius
    let radius = 2.0
        * monic[..n]
            .iter()
            .enumerate()
            .map(|(k, v)| v.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0f64, f64::max)
        + 1e-6;
    let mut roots: Vec<C> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            C::from_polar(radius * 0.7, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut delta_max = 0.0f64;
        for i in 0..n {
            let xi = roots[i];
            let mut denom = C::new(1.0, 0.0);
            for (j, &xj) in roots.iter().enumerate() {
                if j != i {
                    denom *= xi - xj;
                }
            }
            let val = poly_eval(&monic, xi);
            let step = val / denom;
            roots[i] = xi - step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max < 1e-13 * (1.0 + radius) {
            break;
        }
    }
    roots
}

/// Cluster numerically coincident roots into (location, multiplicity).
pub fn cluster_roots(roots: &[C], tol: f64) -> Vec<(C, usize)> {
    let mut out: Vec<(C, usize)> = Vec::new();
    for &r in roots {
        if let Some(entry) = out.iter_mut().find(|(c, _)| (*c - r).norm() < tol) {
            let (c, m) = *entry;
            let mm = m + 1;
            *entry = ((c * m as f64 + r) / mm as f64, mm);
        } else {
            out.push((r, 1));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum CriticalKind {
    Zero,
    Pole,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub re: f64,
    pub im: f64,
    pub kind: CriticalKind,
    /// order of the zero, or of the pole (positive number).
    pub order: usize,
}

impl CriticalPoint {
    pub fn pos(&self) -> C {
        C::new(self.re, self.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Terminus {
    /// index into the critical-point list
    TurningPoint(usize),
    Pole(usize),
    Escaped,
    MaxLength,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub start: usize,
    pub points: Vec<(f64, f64)>,
    pub terminus: Terminus,
    /// |Im e^{-i theta} integral sqrt(Q) dx| accumulated drift measure
    pub phase_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SaddleConnection {
    pub trajectory: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesGraph {
    pub critical_points: Vec<CriticalPoint>,
    pub trajectories: Vec<Trajectory>,
    pub saddles: Vec<SaddleConnection>,
    pub theta: f64,
}

#[derive(Clone, Debug)]
pub struct TraceOptions {
    pub theta: f64,
    pub seed_offset: f64,
    pub rel_step: f64,
    pub reach_tol: f64,
    pub bounding_radius: Option<f64>,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            theta: 0.0,
            seed_offset: 1e-4,
            rel_step: 4e-3,
            reach_tol: 2e-3,
            bounding_radius: None,
            max_steps: 200_000,
        }
    }
}

impl QuadDiff {
    pub fn new(num: Vec<C>, den: Vec<C>) -> Self {
        Self { num, den }
    }

    pub fn eval(&self, x: C) -> C {
        poly_eval(&self.num, x) / poly_eval(&self.den, x)
    }

    /// Zeros and poles of Q_0 with orders (finite plane only).
    pub fn critical_points(&self) -> Vec<CriticalPoint> {
        let scale = 1e-6;
        let mut out: Vec<CriticalPoint> = cluster_roots(&poly_roots(&self.num), scale)
            .into_iter()
            .map(|(p, m)| CriticalPoint {
                re: p.re,
                im: p.im,
                kind: CriticalKind::Zero,
                order: m,
            })
            .collect();
        for (p, m) in cluster_roots(&poly_roots(&self.den), scale) {
            out.push(CriticalPoint {
                re: p.re,
                im: p.im,
                kind: CriticalKind::Pole,
                order: m,
            });
        }
        out
    }

    /// Order of the differential Q_0 dx^2 at infinity in the chart w = 1/x:
    /// pulls back to (deg den - deg num - 4) as the order of vanishing
    /// (negative = pole order at infinity).
    pub fn order_at_infinity(&self) -> i64 {
        let dn = self.num.len() as i64 - 1;
        let dd = self.den.len() as i64 - 1;
        dd - dn - 4
    }

    /// sqrt(Q) with the branch chosen for continuity with `prev`.
    fn sqrt_cont(&self, x: C, prev: C) -> C {
        let s = self.eval(x).sqrt();
        if (s - prev).norm() <= (-s - prev).norm() {
            s
        } else {
            -s
        }
    }
}

/// Initial directions of Stokes curves at a critical point. A zero of order
/// r emits r + 2 curves; a simple pole emits exactly one.
pub fn emanating_directions(qd: &QuadDiff, cp: &CriticalPoint, theta: f64) -> Vec<f64> {
    let v = cp.pos();
    match cp.kind {
        CriticalKind::Zero => {
            let r = cp.order;
            // local coefficient c: Q ~ c (x - v)^r
            let mut d = qd.num.clone();
            for _ in 0..r {
                d = poly_diff(&d);
            }
            let mut fact = 1.0;
            for j in 2..=r {
                fact *= j as f64;
            }
            let c = poly_eval(&d, v) / fact / poly_eval(&qd.den, v);
            let argc = c.arg();
            (0..r + 2)
                .map(|k| {
                    2.0 * (theta - argc / 2.0 + 2.0 * std::f64::consts::PI * k as f64)
                        / (r as f64 + 2.0)
                })
                .collect()
        }
        CriticalKind::Pole => {
            if cp.order != 1 {
                return vec![];
            }
            // Q ~ c/(x - v): c = num(v) / (den/(x-v))(v) via derivative
            let c = poly_eval(&qd.num, v) / poly_eval(&poly_diff(&qd.den), v);
            vec![2.0 * (theta - c.arg() / 2.0)]
        }
    }
}

/// Trace the full Stokes graph for phase `theta`.
pub fn trace_stokes_graph(qd: &QuadDiff, opts: &TraceOptions) -> StokesGraph {
    let cps = qd.critical_points();
    let maxabs = cps.iter().map(|c| c.pos().norm()).fold(0.0f64, f64::max);
    let rmax = opts.bounding_radius.unwrap_or(4.0 * maxabs + 8.0);
    let scale = 1.0 + maxabs;

    let mut trajectories = Vec::new();
    for (i, cp) in cps.iter().enumerate() {
        for dir in emanating_directions(qd, cp, opts.theta) {
            trajectories.push(trace_one(qd, &cps, i, dir, rmax, scale, opts));
        }
    }
    // saddle connections: trajectory ends at a zero-type critical point
    let mut saddles = Vec::new();
    for (ti, t) in trajectories.iter().enumerate() {
        if let Terminus::TurningPoint(j) = t.terminus {
            saddles.push(SaddleConnection {
                trajectory: ti,
                from: t.start,
                to: j,
            });
        }
    }
    StokesGraph {
        critical_points: cps,
        trajectories,
        saddles,
        theta: opts.theta,
    }
}

fn trace_one(
    qd: &QuadDiff,
    cps: &[CriticalPoint],
    start: usize,
    dir: f64,
    rmax: f64,
    scale: f64,
    opts: &TraceOptions,
) -> Trajectory {
    let v = cps[start].pos();
    let eps = opts.seed_offset * scale;
    let mut x = v + C::from_polar(eps, dir);
    // branch seed: continuity with the local model along the ray
    let mut w = {
        let s = qd.eval(x).sqrt();
        // the true phase condition: w * dx/ds = e^{i theta} with dx along dir
        // => arg(w) = theta - dir (mod 2pi, up to sign choice of s)
        let want = opts.theta - dir;
        let d1 = ((s.arg() - want + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI)
            .abs();
        let d2 = (((-s).arg() - want + std::f64::consts::PI)
            .rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI)
            .abs();
        if d1 <= d2 { s } else { -s }
    };
    let phase = C::from_polar(1.0, opts.theta);
    let mut points = vec![(v.re, v.im), (x.re, x.im)];
    let mut drift: f64 = 0.0;
    let mut integral = C::new(0.0, 0.0);
    let mut terminus = Terminus::MaxLength;
    let mut travelled = 0.0f64;

    for _ in 0..opts.max_steps {
        // distance to nearest critical point (for step capping & termination)
        let mut dmin = f64::INFINITY;
        let mut nearest = usize::MAX;
        for (j, cp) in cps.iter().enumerate() {
            let d = (x - cp.pos()).norm();
            if d < dmin {
                dmin = d;
                nearest = j;
            }
        }
        if dmin < opts.reach_tol * scale && travelled > 10.0 * opts.reach_tol * scale {
            terminus = match cps[nearest].kind {
                CriticalKind::Zero => Terminus::TurningPoint(nearest),
                CriticalKind::Pole => Terminus::Pole(nearest),
            };
            points.push((cps[nearest].re, cps[nearest].im));
            break;
        }
        if x.norm() > rmax {
            terminus = Terminus::Escaped;
            break;
        }
        // step size: fraction of local scale, capped by critical distance
        let target = (opts.rel_step * (1.0 + x.norm())).min(0.4 * dmin);
        // RK4 on dx/ds = phase / w with branch continuity at substeps
        let f = |xx: C, ww: C| -> (C, C) {
            let wnew = qd.sqrt_cont(xx, ww);
            (phase / wnew, wnew)
        };
        let h = target * w.norm().max(1e-12); // so |dx| ~ target
        let (k1, w1) = f(x, w);
        let (k2, w2) = f(x + k1 * (h / 2.0), w1);
        let (k3, w3) = f(x + k2 * (h / 2.0), w2);
        let (k4, _w4) = f(x + k3 * h, w3);
        let dx = (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
        let xn = x + dx;
        let wn = qd.sqrt_cont(xn, w);
        integral += (w + wn) * 0.5 * dx;
        drift = drift.max(((integral / phase).im).abs());
        travelled += dx.norm();
        x = xn;
        w = wn;
        points.push((x.re, x.im));
    }
    Trajectory {
        start,
        points,
        terminus,
        phase_drift: drift,
    }
}

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

#[derive(Debug, PartialEq)]
pub enum RegionResult {
    Region(u64),
    OnStokesCurve,
}

/// Stable region label via crossing parities of a fixed ray against every
/// trajectory polyline. Points in the same Stokes region share a label.
pub fn region_of_point(graph: &StokesGraph, x: C, tol: f64) -> RegionResult {
    // on-curve check
    for t in &graph.trajectories {
        for seg in t.points.windows(2) {
            let a = C::new(seg[0].0, seg[0].1);
            let b = C::new(seg[1].0, seg[1].1);
            if dist_point_segment(x, a, b) < tol {
                return RegionResult::OnStokesCurve;
            }
        }
    }
    // ray in an arbitrary fixed direction unlikely to be parallel to edges
    let dirv = C::from_polar(1.0, 0.6180339887498949);
    let far = x + dirv * 1e6;
    let mut sig: u64 = 0;
    for (ti, t) in graph.trajectories.iter().enumerate() {
        let mut crossings = 0u64;
        for seg in t.points.windows(2) {
            let a = C::new(seg[0].0, seg[0].1);
            let b = C::new(seg[1].0, seg[1].1);
            if segments_intersect(x, far, a, b) {
                crossings += 1;
            }
        }
        if crossings % 2 == 1 {
            sig ^= 1u64 << (ti % 64);
        }
        sig = sig.rotate_left(1) ^ (crossings << (ti % 17));
    }
    RegionResult::Region(sig)
}

fn cross(o: C, a: C, b: C) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_intersect(p1: C, p2: C, q1: C, q2: C) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

fn dist_point_segment(p: C, a: C, b: C) -> f64 {
    let ab = b - a;
    let n2 = ab.norm_sqr();
    if n2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / n2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

impl StokesGraph {
    pub fn simple_saddles(&self) -> Vec<(usize, usize)> {
        self.saddles.iter().map(|s| (s.from, s.to)).collect()
    }

    pub fn n_zero(&self) -> usize {
        self.critical_points
            .iter()
            .filter(|c| c.kind == CriticalKind::Zero)
            .count()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            graph: &'a StokesGraph,
        }
        serde_json::to_string_pretty(&Doc {
            schema_version: 1,
            graph: self,
        })
        .expect("serializable")
    }

    /// Standalone SVG rendering of the graph.
    pub fn to_svg(&self) -> String {
        let mut lo = C::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut upd = |p: C| {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        };
        for c in &self.critical_points {
            upd(c.pos());
        }
        for t in &self.trajectories {
            for &(re, im) in &t.points {
                upd(C::new(re.clamp(-50.0, 50.0), im.clamp(-50.0, 50.0)));
            }
        }
        let pad = 0.08 * ((hi - lo).norm() + 1.0);
        lo -= C::new(pad, pad);
        hi += C::new(pad, pad);
        let w = 640.0;
        let sc = w / (hi.re - lo.re);
        let hpix = ((hi.im - lo.im) * sc).ceil();
        let map = |re: f64, im: f64| -> (f64, f64) {
            ((re - lo.re) * sc, hpix - (im - lo.im) * sc)
        };
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{hpix}\" viewBox=\"0 0 {w} {hpix}\">\n"
        );
        for t in &self.trajectories {
            let mut d = String::new();
            for (k, &(re, im)) in t.points.iter().enumerate() {
                let (px, py) = map(re.clamp(-50.0, 50.0), im.clamp(-50.0, 50.0));
                d.push_str(if k == 0 { "M" } else { "L" });
                d.push_str(&format!("{:.2} {:.2} ", px, py));
            }
            let color = if matches!(t.terminus, Terminus::TurningPoint(_)) {
                "#d33"
            } else {
                "#36c"
            };
            s.push_str(&format!(
                "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
            ));
        }
        for c in &self.critical_points {
            let (px, py) = map(c.re, c.im);
            match c.kind {
                CriticalKind::Zero => s.push_str(&format!(
                    "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#000\"/>\n"
                )),
                CriticalKind::Pole => s.push_str(&format!(
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"#f80\"/>\n",
                    px - 4.0,
                    py - 4.0
                )),
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

// ---------------------------------------------------------------------------
// Tests: the six textbook topologies and the Weber saddle criterion
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn trace(num: Vec<C>, den: Vec<C>) -> StokesGraph {
        trace_stokes_graph(&QuadDiff::new(num, den), &TraceOptions::default())
    }

    fn count_expectations(g: &StokesGraph) -> usize {
        g.critical_points
            .iter()
            .map(|cp| match cp.kind {
                CriticalKind::Zero => cp.order + 2,
                CriticalKind::Pole if cp.order == 1 => 1,
                _ => 0,
            })
            .sum()
    }

    #[test]
    fn airy_graph() {
        // Q = x: three curves escaping at angles 0, 2pi/3, 4pi/3.
        let g = trace(vec![c(0.0), c(1.0)], vec![c(1.0)]);
        assert_eq!(g.trajectories.len(), 3);
        assert!(g.saddles.is_empty());
        let mut angles: Vec<f64> = g
            .trajectories
            .iter()
            .map(|t| {
                assert_eq!(t.terminus, Terminus::Escaped);
                let (re, im) = *t.points.last().unwrap();
                C::new(re, im).arg().rem_euclid(2.0 * std::f64::consts::PI)
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let expect = [0.0, 2.0, 4.0].map(|k| k * std::f64::consts::PI / 3.0);
        for (a, e) in angles.iter().zip(expect) {
            assert!((a - e).abs() < 0.05, "angle {a} vs {e}");
        }
    }

    #[test]
    fn cubic_plus_graph() {
        // Q = x^3 + x: three simple zeros, nine curves, no saddle.
        let g = trace(vec![c(0.0), c(1.0), c(0.0), c(1.0)], vec![c(1.0)]);
        assert_eq!(g.n_zero(), 3);
        assert_eq!(g.trajectories.len(), 9);
        assert_eq!(g.trajectories.len(), count_expectations(&g));
        assert!(g.saddles.is_empty());
    }

    #[test]
    fn rational_two_double_poles_graph() {
        // Q = (x-1)(x-2) / (x^2 (x+1)^2): six curves, no saddle.
        let num = vec![c(2.0), c(-3.0), c(1.0)];
        // x^2 (x+1)^2 = x^4 + 2x^3 + x^2
        let den = vec![c(0.0), c(0.0), c(1.0), c(2.0), c(1.0)];
        let g = trace(num, den);
        assert_eq!(g.n_zero(), 2);
        assert_eq!(g.trajectories.len(), 6);
        assert!(g.saddles.is_empty());
        // every non-escaping curve ends at a double pole
        for t in &g.trajectories {
            assert!(!matches!(t.terminus, Terminus::TurningPoint(_)));
        }
    }

    #[test]
    fn simple_pole_graph() {
        // Q = (x+1)/x: one zero (3 curves) + one simple pole (1 curve).
        let g = trace(vec![c(1.0), c(1.0)], vec![c(0.0), c(1.0)]);
        assert_eq!(g.trajectories.len(), 4);
        assert_eq!(g.trajectories.len(), count_expectations(&g));
        assert!(g.saddles.is_empty());
    }

    #[test]
    fn cubic_minus_graph_has_saddles() {
        // Q = x^3 - x: nine curves with saddle connections on the real axis.
        let g = trace(vec![c(0.0), c(-1.0), c(0.0), c(1.0)], vec![c(1.0)]);
        assert_eq!(g.trajectories.len(), 9);
        assert!(!g.saddles.is_empty(), "expected saddle connections");
        // saddle symmetry: each reported pair appears with both orientations
        // or as distinct trajectories between the same pair of zeros
        for s in &g.saddles {
            assert!(g
                .saddles
                .iter()
                .any(|r| r.from == s.to && r.to == s.from || (r.from, r.to) == (s.from, s.to)));
        }
    }

    #[test]
    fn double_pole_loop_graph_has_saddle() {
        // Q = (x-2)/x^2: three curves; a loop from the zero back to itself.
        let g = trace(vec![c(-2.0), c(1.0)], vec![c(0.0), c(0.0), c(1.0)]);
        assert_eq!(g.trajectories.len(), 3);
        assert!(
            g.saddles.iter().any(|s| s.from == s.to),
            "expected a self-saddle, got {:?}",
            g.saddles
        );
    }

    #[test]
    fn weber_saddle_iff_nu_imaginary() {
        // Q = x^2/4 - nu. For real nu = 1: no saddle. For nu = i: the
        // summability condition fails and the turning points connect.
        let real = trace(vec![c(-1.0), c(0.0), c(0.25)], vec![c(1.0)]);
        assert_eq!(real.trajectories.len(), 6);
        assert!(real.saddles.is_empty());

        let imag = trace(
            vec![C::new(0.0, -1.0), c(0.0), c(0.25)],
            vec![c(1.0)],
        );
        assert!(
            !imag.saddles.is_empty(),
            "expected saddle for purely imaginary nu"
        );
    }

    #[test]
    fn phase_drift_stays_small() {
        let g = trace(vec![c(0.0), c(1.0)], vec![c(1.0)]);
        for t in &g.trajectories {
            assert!(t.phase_drift < 1e-6, "drift {}", t.phase_drift);
        }
    }

    #[test]
    fn regions_are_stable_and_curves_detected() {
        let g = trace(vec![c(0.0), c(1.0)], vec![c(1.0)]);
        let a = region_of_point(&g, C::new(1.0, 0.5), 1e-3);
        let b = region_of_point(&g, C::new(1.1, 0.6), 1e-3);
        assert_eq!(a, b);
        // the positive real axis is a Stokes curve for Airy
        assert_eq!(
            region_of_point(&g, C::new(2.0, 0.0), 1e-3),
            RegionResult::OnStokesCurve
        );
        // distinct sectors get distinct labels
        let cc = region_of_point(&g, C::new(-2.0, 0.4), 1e-3);
        assert_ne!(a, cc);
    }

    #[test]
    fn json_and_svg_emission() {
        let g = trace(vec![c(0.0), c(1.0)], vec![c(1.0)]);
        let j = g.to_json();
        assert!(j.contains("schema_version"));
        let svg = g.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("path"));
    }
}

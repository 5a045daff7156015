use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

// 15-point Kronrod nodes and weights with the embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Quadrature {
    pub values: Vec<f64>,
    /// Estimated absolute error (max over components).
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
enum Map {
    /// ω = u
    Identity,
    /// ω = p / u, u ∈ (0, 1]
    Tail(f64),
}

impl Map {
    fn apply(self, u: f64) -> (f64, f64) {
        match self {
            Map::Identity => (u, 1.0),
            Map::Tail(p) => (p / u, p.abs() / (u * u)),
        }
    }
}

struct Segment {
    map: Map,
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: Vec<f64>,
    err_max: f64,
    frozen: bool,
}

struct Rule<'f, F> {
    f: &'f mut F,
    dim: usize,
    fx: Vec<f64>,
    evaluations: usize,
}

impl<'f, F: FnMut(f64, &mut [f64])> Rule<'f, F> {
    fn eval(&mut self, map: Map, u: f64, out_k: &mut [f64], out_g: &mut [f64], wk: f64, wg: f64) {
        let (w, jac) = map.apply(u);
        for x in self.fx.iter_mut() {
            *x = 0.0;
        }
        (self.f)(w, &mut self.fx);
        self.evaluations += 1;
        for i in 0..self.dim {
            let y = self.fx[i] * jac;
            out_k[i] += wk * y;
            out_g[i] += wg * y;
        }
    }

    fn segment(&mut self, map: Map, a: f64, b: f64) -> Segment {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut k = vec![0.0; self.dim];
        let mut g = vec![0.0; self.dim];
        self.eval(map, c, &mut k, &mut g, WGK[7], WG[3]);
        for j in 0..7 {
            let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
            self.eval(map, c - h * XGK[j], &mut k, &mut g, WGK[j], wg);
            self.eval(map, c + h * XGK[j], &mut k, &mut g, WGK[j], wg);
        }
        let mut err = vec![0.0; self.dim];
        let mut err_max: f64 = 0.0;
        for i in 0..self.dim {
            k[i] *= h;
            g[i] *= h;
            err[i] = (k[i] - g[i]).abs();
            err_max = err_max.max(err[i]);
        }
        let frozen = h.abs() <= 64.0 * f64::EPSILON * c.abs().max(f64::MIN_POSITIVE);
        Segment { map, a, b, value: k, err, err_max, frozen }
    }
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand over the
/// union of the intervals between consecutive `points`. The first/last point
/// may be ±∞; infinite pieces are mapped to a finite range with ω = p/u.
pub fn integrate_1d_vec<F>(mut f: F, dim: usize, points: &[f64], opts: &QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64, &mut [f64]),
{
    if points.len() < 2 || points.iter().any(|p| p.is_nan()) {
        return Err(Error::InvalidParameter { name: "points", reason: "need at least two ordered points" });
    }
    let mut pieces: Vec<(Map, f64, f64)> = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !(lo < hi) {
            if lo == hi {
                continue;
            }
            return Err(Error::InvalidParameter { name: "points", reason: "breakpoints must be increasing" });
        }
        match (lo.is_infinite(), hi.is_infinite()) {
            (false, false) => pieces.push((Map::Identity, lo, hi)),
            (true, false) => {
                let p = if hi < 0.0 { hi } else { -1.0 };
                pieces.push((Map::Tail(p), 0.0, 1.0));
                if hi >= 0.0 {
                    pieces.push((Map::Identity, p, hi));
                }
            }
            (false, true) => {
                let p = if lo > 0.0 { lo } else { 1.0 };
                if lo <= 0.0 {
                    pieces.push((Map::Identity, lo, p));
                }
                pieces.push((Map::Tail(p), 0.0, 1.0));
            }
            (true, true) => {
                pieces.push((Map::Tail(-1.0), 0.0, 1.0));
                pieces.push((Map::Identity, -1.0, 1.0));
                pieces.push((Map::Tail(1.0), 0.0, 1.0));
            }
        }
    }

    let mut rule = Rule { f: &mut f, dim, fx: vec![0.0; dim], evaluations: 0 };
    let mut segs: Vec<Segment> = pieces.iter().map(|&(m, a, b)| rule.segment(m, a, b)).collect();

    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];
    for s in &segs {
        for i in 0..dim {
            total[i] += s.value[i];
            total_err[i] += s.err[i];
        }
    }
    loop {
        let scale = total.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let target = opts.abs_tol.max(opts.rel_tol * scale);
        let err = total_err.iter().fold(0.0f64, |m, x| m.max(*x));
        if err <= target {
            break;
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::NonConvergent { what: "adaptive quadrature" });
        }
        let pick = segs.iter().enumerate().filter(|(_, s)| !s.frozen).max_by(|a, b| a.1.err_max.total_cmp(&b.1.err_max)).map(|(i, _)| i);
        let Some(i) = pick else {
            return Err(Error::NonConvergent { what: "adaptive quadrature (intervals exhausted)" });
        };
        let old = segs.swap_remove(i);
        let mid = 0.5 * (old.a + old.b);
        let left = rule.segment(old.map, old.a, mid);
        let right = rule.segment(old.map, mid, old.b);
        for j in 0..dim {
            total[j] += left.value[j] + right.value[j] - old.value[j];
            total_err[j] += left.err[j] + right.err[j] - old.err[j];
        }
        segs.push(left);
        segs.push(right);
    }

    // re-sum to shed accumulated rounding from incremental updates
    let mut values = vec![0.0; dim];
    let mut errs = vec![0.0; dim];
    for s in &segs {
        for i in 0..dim {
            values[i] += s.value[i];
            errs[i] += s.err[i];
        }
    }
    let error = errs.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(Quadrature { values, error, evaluations: rule.evaluations })
}

/// Scalar adaptive quadrature on `(lo, hi)`; either end may be infinite.
pub fn integrate_1d<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let opts = QuadOptions { abs_tol: tol, rel_tol: 0.0, ..QuadOptions::default() };
    let q = integrate_1d_vec(|w, out: &mut [f64]| out[0] = f(w), 1, &[lo, hi], &opts)?;
    Ok(q.values[0])
}

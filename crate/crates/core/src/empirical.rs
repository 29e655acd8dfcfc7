//! Empirical distribution distances.
//!
//! Lattice statistics are compared with continuous limits after a
//! half-unit continuity correction: each integer value `v` is spread
//! uniformly over `[v − ½, v + ½]`. This is the exact law of `X + U` with
//! an independent `U ~ U(−½, ½)`, so no randomness is added. In the
//! evaluation coordinates the spread has width `h` (`1/σ` after
//! standardizing). `h = 0` gives the ordinary step function.

/// Atoms of a lattice sample in evaluation coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    /// Sorted, distinct positions with their counts.
    pub atoms: Vec<(f64, u64)>,
    /// Width of the continuity spread around each atom.
    pub h: f64,
    pub total: u64,
}

impl Lattice {
    /// Groups integer observations and maps them through `to_eval`, which
    /// must be increasing.
    pub fn from_integers(values: &[u64], to_eval: impl Fn(u64) -> f64, h: f64) -> Self {
        let mut v = values.to_vec();
        v.sort_unstable();
        let mut atoms: Vec<(f64, u64)> = Vec::new();
        let mut last = None;
        for x in v {
            if last == Some(x) {
                atoms.last_mut().expect("nonempty").1 += 1;
            } else {
                atoms.push((to_eval(x), 1));
                last = Some(x);
            }
        }
        Lattice {
            atoms,
            h,
            total: values.len() as u64,
        }
    }

    pub fn from_reals(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let mut atoms: Vec<(f64, u64)> = Vec::new();
        for x in v {
            match atoms.last_mut() {
                Some((a, c)) if *a == x => *c += 1,
                _ => atoms.push((x, 1)),
            }
        }
        Lattice {
            atoms,
            h: 0.0,
            total: values.len() as u64,
        }
    }

    pub fn raw(&self) -> Lattice {
        Lattice {
            h: 0.0,
            ..self.clone()
        }
    }
}

/// Spread weight of one observation at `s`: the df of `a + hU` at `s`.
#[inline]
pub fn spread(s: f64, a: f64, h: f64) -> f64 {
    if h == 0.0 {
        (a <= s) as u8 as f64
    } else {
        ((s - a) / h + 0.5).clamp(0.0, 1.0)
    }
}

/// `sup_x |Ĝ(x) − F(x)|` where `Ĝ` is the (smoothed) empirical df.
///
/// `mode` is where `F` changes from convex to concave; on each linear
/// piece of `Ĝ` on either side of it the difference has one interior
/// extremum, located by ternary search.
pub fn ks_sup(lat: &Lattice, cdf: &dyn Fn(f64) -> f64, mode: f64) -> f64 {
    if lat.total == 0 {
        return 1.0;
    }
    let r = lat.total as f64;
    if lat.h == 0.0 {
        let mut d: f64 = 0.0;
        let mut below = 0u64;
        for &(a, c) in &lat.atoms {
            let f = cdf(a);
            d = d.max((f - below as f64 / r).abs());
            below += c;
            d = d.max((below as f64 / r - f).abs());
        }
        return d;
    }
    // slope changes of the piecewise-linear df
    let half = lat.h / 2.0;
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2 * lat.atoms.len() + 1);
    for &(a, c) in &lat.atoms {
        let s = c as f64 / (r * lat.h);
        events.push((a - half, s));
        events.push((a + half, -s));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let first = events[0].0;
    let mut d = cdf(first);
    let (mut x0, mut g0, mut slope) = (first, 0.0, 0.0);
    for &(x1, ds) in &events {
        if x1 > x0 {
            let seg = |x: f64| g0 + slope * (x - x0) - cdf(x);
            d = d.max(seg(x1).abs());
            let mut scan = |lo: f64, hi: f64, sign: f64| {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..60 {
                    let m1 = a + (b - a) / 3.0;
                    let m2 = b - (b - a) / 3.0;
                    if sign * seg(m1) < sign * seg(m2) {
                        a = m1;
                    } else {
                        b = m2;
                    }
                }
                d = d.max(seg((a + b) / 2.0).abs());
            };
            if mode > x0 && mode < x1 {
                scan(x0, mode, 1.0);
                scan(mode, x1, -1.0);
                d = d.max(seg(mode).abs());
            } else if x1 <= mode {
                scan(x0, x1, 1.0);
            } else {
                scan(x0, x1, -1.0);
            }
            g0 += slope * (x1 - x0);
            x0 = x1;
        }
        slope += ds;
    }
    d.max((1.0 - cdf(x0)).abs())
}

/// `Ĝ(gx[i], gy[j])` for paired observations with spreads `hx`, `hy`.
pub fn joint_cdf_grid(
    xs: &[f64],
    hx: f64,
    ys: &[f64],
    hy: f64,
    gx: &[f64],
    gy: &[f64],
) -> Vec<Vec<f64>> {
    let mut acc = vec![vec![0.0; gy.len()]; gx.len()];
    let mut wy = vec![0.0; gy.len()];
    for (&x, &y) in xs.iter().zip(ys) {
        for (w, &g) in wy.iter_mut().zip(gy) {
            *w = spread(g, y, hy);
        }
        for (row, &g) in acc.iter_mut().zip(gx) {
            let wx = spread(g, x, hx);
            if wx > 0.0 {
                for (a, w) in row.iter_mut().zip(&wy) {
                    *a += wx * w;
                }
            }
        }
    }
    let r = xs.len().max(1) as f64;
    acc.iter_mut().flatten().for_each(|a| *a /= r);
    acc
}

/// Largest `|Ĝ − F|` over the grid points.
pub fn grid_sup(
    joint: &[Vec<f64>],
    gx: &[f64],
    gy: &[f64],
    reference: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    let mut d: f64 = 0.0;
    for (row, &x) in joint.iter().zip(gx) {
        for (&v, &y) in row.iter().zip(gy) {
            d = d.max((v - reference(x, y)).abs());
        }
    }
    d
}

/// Largest mass difference over rectangles `(a, b] × (c, d]` whose sides
/// are grid points or `±∞`.
///
/// `joint` holds the empirical df on the grid, `mx`/`my` the empirical
/// marginal dfs at the grid points.
pub fn rect_sup(
    joint: &[Vec<f64>],
    mx: &[f64],
    my: &[f64],
    gx: &[f64],
    gy: &[f64],
    reference: &dyn Fn(f64, f64) -> f64,
) -> f64 {
    // extend with −∞ (index 0) and +∞ (last)
    let ext = |g: &[f64]| {
        let mut v = vec![f64::NEG_INFINITY];
        v.extend_from_slice(g);
        v.push(f64::INFINITY);
        v
    };
    let (ex, ey) = (ext(gx), ext(gy));
    let emp = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 {
            0.0
        } else if i == ex.len() - 1 && j == ey.len() - 1 {
            1.0
        } else if i == ex.len() - 1 {
            my[j - 1]
        } else if j == ey.len() - 1 {
            mx[i - 1]
        } else {
            joint[i - 1][j - 1]
        }
    };
    let rf: Vec<Vec<f64>> = ex
        .iter()
        .map(|&x| ey.iter().map(|&y| reference(x, y)).collect())
        .collect();
    let ef: Vec<Vec<f64>> = (0..ex.len())
        .map(|i| (0..ey.len()).map(|j| emp(i, j)).collect())
        .collect();
    let mass = |f: &Vec<Vec<f64>>, a: usize, b: usize, c: usize, d: usize| {
        f[b][d] - f[a][d] - f[b][c] + f[a][c]
    };
    let mut best: f64 = 0.0;
    for a in 0..ex.len() {
        for b in a + 1..ex.len() {
            for c in 0..ey.len() {
                for d in c + 1..ey.len() {
                    best = best.max((mass(&ef, a, b, c, d) - mass(&rf, a, b, c, d)).abs());
                }
            }
        }
    }
    best
}

/// Smoothed empirical marginal df at the grid points.
pub fn marginal_cdf_grid(xs: &[f64], h: f64, g: &[f64]) -> Vec<f64> {
    let r = xs.len().max(1) as f64;
    g.iter()
        .map(|&s| xs.iter().map(|&x| spread(s, x, h)).sum::<f64>() / r)
        .collect()
}

/// Sample Pearson correlation; 0 when either coordinate is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

//! Grid flood fills of sublevel sets `{G < t}`.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::polycore::{CriticalPoint, Escaper, Polynomial};

use super::TreeError;

/// Connected component of `{G < level}` around a seed, sampled on a square
/// grid of `n x n` nodes centred at the seed.
#[derive(Clone, Debug)]
pub struct Flood {
    pub center: Complex64,
    pub half: f64,
    pub n: usize,
    pub level: f64,
    member: Vec<bool>,
    pub bbox: (usize, usize, usize, usize),
    pub touches_border: bool,
    pub count: usize,
}

impl Flood {
    fn step(&self) -> f64 {
        2.0 * self.half / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let s = self.step();
        self.center + Complex64::new(-self.half + s * i as f64, -self.half + s * j as f64)
    }

    /// Membership of the grid node nearest to `z`, or `None` outside the box.
    pub fn contains(&self, z: Complex64) -> Option<bool> {
        let s = self.step();
        let u = ((z.re - self.center.re + self.half) / s).round();
        let v = ((z.im - self.center.im + self.half) / s).round();
        if !(u >= 0.0 && v >= 0.0 && u < self.n as f64 && v < self.n as f64) {
            return None;
        }
        Some(self.member[v as usize * self.n + u as usize])
    }

    /// Largest distance from the seed to a member node.
    pub fn extent(&self) -> f64 {
        let (i0, i1, j0, j1) = self.bbox;
        [
            self.node(i0, j0),
            self.node(i1, j1),
            self.node(i0, j1),
            self.node(i1, j0),
        ]
        .iter()
        .map(|p| (p - self.center).norm())
        .fold(0.0, f64::max)
    }

    /// Lower-left and upper-right corners of the member bounding box.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        let (i0, i1, j0, j1) = self.bbox;
        (self.node(i0, j0), self.node(i1, j1))
    }

    pub fn cell_size(&self) -> f64 {
        self.step()
    }

    /// Member nodes with at least one non-member 4-neighbour.
    pub fn boundary_nodes(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = Vec::new();
        let (i0, i1, j0, j1) = self.bbox;
        for j in j0..=j1 {
            for i in i0..=i1 {
                if !self.member[j * n + i] {
                    continue;
                }
                let edge = i == 0
                    || j == 0
                    || i + 1 == n
                    || j + 1 == n
                    || !self.member[j * n + i - 1]
                    || !self.member[j * n + i + 1]
                    || !self.member[(j - 1) * n + i]
                    || !self.member[(j + 1) * n + i];
                if edge {
                    out.push(self.node(i, j));
                }
            }
        }
        out
    }
}

/// One breadth-first fill from the centre node (the seed itself).
pub fn flood_fill(esc: &Escaper, seed: Complex64, level: f64, half: f64, n: usize) -> Flood {
    let n = n | 1;
    let mut state = vec![0u8; n * n]; // 0 unknown, 1 member, 2 outside
    let mut fl = Flood {
        center: seed,
        half,
        n,
        level,
        member: Vec::new(),
        bbox: (n / 2, n / 2, n / 2, n / 2),
        touches_border: false,
        count: 0,
    };
    let mid = n / 2;
    let mut queue = VecDeque::new();
    state[mid * n + mid] = 1;
    queue.push_back((mid, mid));
    let (mut i0, mut i1, mut j0, mut j1) = (mid, mid, mid, mid);
    let mut count = 0;
    while let Some((i, j)) = queue.pop_front() {
        count += 1;
        i0 = i0.min(i);
        i1 = i1.max(i);
        j0 = j0.min(j);
        j1 = j1.max(j);
        if i == 0 || j == 0 || i + 1 == n || j + 1 == n {
            fl.touches_border = true;
        }
        let nbrs = [
            (i.wrapping_sub(1), j),
            (i + 1, j),
            (i, j.wrapping_sub(1)),
            (i, j + 1),
        ];
        for (a, b) in nbrs {
            if a >= n || b >= n {
                continue;
            }
            let idx = b * n + a;
            if state[idx] != 0 {
                continue;
            }
            if esc.below(fl.node(a, b), level) {
                state[idx] = 1;
                queue.push_back((a, b));
            } else {
                state[idx] = 2;
            }
        }
    }
    fl.member = state.into_iter().map(|s| s == 1).collect();
    fl.bbox = (i0, i1, j0, j1);
    fl.count = count;
    fl
}

/// Flood fill whose box adapts to the component: it grows while the fill
/// touches the border and shrinks while the fill spans under a quarter of
/// the grid.
pub fn adaptive_flood(
    esc: &Escaper,
    seed: Complex64,
    level: f64,
    hint: f64,
    n: usize,
) -> Result<Flood, TreeError> {
    let max_half = 4.0 * esc.radius() + 4.0 * seed.norm();
    let mut half = if hint.is_finite() && hint > 0.0 {
        hint.min(max_half)
    } else {
        esc.radius()
    };
    let mut last_shrunk = false;
    for _ in 0..200 {
        let fl = flood_fill(esc, seed, level, half, n);
        if fl.touches_border {
            if half >= max_half {
                return Ok(fl);
            }
            half = (half * 2.0).min(max_half);
            if last_shrunk {
                // Oscillation guard: settle for the doubled box.
                let fl = flood_fill(esc, seed, level, half, n);
                if !fl.touches_border {
                    return Ok(fl);
                }
            }
            last_shrunk = false;
            continue;
        }
        let (i0, i1, j0, j1) = fl.bbox;
        let span = (i1 - i0).max(j1 - j0);
        if span < fl.n / 4 {
            let ext = fl.extent();
            let target = if ext > 0.0 {
                ext * 1.25
            } else {
                half * 4.0 / fl.n as f64
            };
            if target < half * 0.9 && target > 1e-300 {
                half = target;
                last_shrunk = true;
                continue;
            }
        }
        return Ok(fl);
    }
    Err(TreeError::ResolutionExhausted(format!(
        "flood fill around {seed} at level {level:e} did not settle"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub base: usize,
    pub max: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            base: 1024,
            max: 8192,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelComponent {
    pub level: f64,
    pub id: usize,
    pub critical_points: Vec<CriticalPoint>,
    pub sample: Complex64,
    pub bbox: (Complex64, Complex64),
    /// Grid nodes per side used for the fill.
    pub resolution: usize,
    pub cells: usize,
}

/// Connected components of `{G < t}` on a global grid.
///
/// The box has radius `max(2R, 2 e^{t - log|a_d|/(d-1)})` so every component
/// lies inside. The grid doubles from `spec.base` while components of
/// different labels come within 2 nodes of each other or a critical point
/// is within 2 nodes of the level curve.
pub fn sublevel_components(
    poly: &Polynomial,
    t: f64,
    spec: GridSpec,
) -> Result<Vec<SublevelComponent>, TreeError> {
    if !(t > 0.0) {
        return Err(TreeError::InvalidArgument("level must be positive".into()));
    }
    let esc = Escaper::new(poly);
    let d = poly.degree() as f64;
    let corr = poly.leading().norm().ln() / (d - 1.0);
    let radius = (2.0 * esc.radius()).max(2.0 * (t - corr).exp());
    let crit = crate::polycore::critical_points(poly)?;
    let mut n = spec.base;
    loop {
        match label_grid(&esc, t, radius, n, &crit) {
            Ok(c) => return Ok(c),
            Err(()) if n * 2 <= spec.max => n *= 2,
            Err(()) => {
                return Err(TreeError::ResolutionExhausted(format!(
                    "components at level {t} not separated at {n} nodes"
                )))
            }
        }
    }
}

fn label_grid(
    esc: &Escaper,
    t: f64,
    radius: f64,
    n: usize,
    crit: &[CriticalPoint],
) -> Result<Vec<SublevelComponent>, ()> {
    let step = 2.0 * radius / (n - 1) as f64;
    let node = |i: usize, j: usize| Complex64::new(-radius + step * i as f64, -radius + step * j as f64);
    let inside: Vec<bool> = (0..n * n).map(|k| esc.below(node(k % n, k / n), t)).collect();
    let mut label = vec![usize::MAX; n * n];
    let mut comps: Vec<(usize, usize, usize, usize, usize, Complex64)> = Vec::new();
    for start in 0..n * n {
        if !inside[start] || label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut q = VecDeque::from([start]);
        label[start] = id;
        let (mut i0, mut i1, mut j0, mut j1) = (n, 0, n, 0);
        let mut count = 0;
        let mut sum = Complex64::new(0.0, 0.0);
        while let Some(k) = q.pop_front() {
            let (i, j) = (k % n, k / n);
            count += 1;
            sum += node(i, j);
            i0 = i0.min(i);
            i1 = i1.max(i);
            j0 = j0.min(j);
            j1 = j1.max(j);
            let nb = [
                (i > 0).then(|| k - 1),
                (i + 1 < n).then(|| k + 1),
                (j > 0).then(|| k - n),
                (j + 1 < n).then(|| k + n),
            ];
            for m in nb.into_iter().flatten() {
                if inside[m] && label[m] == usize::MAX {
                    label[m] = id;
                    q.push_back(m);
                }
            }
        }
        comps.push((i0, i1, j0, j1, count, sum / count as f64));
    }
    // Separation check: distinct labels within 2 nodes.
    for j in 0..n {
        for i in 0..n {
            let a = label[j * n + i];
            if a == usize::MAX {
                continue;
            }
            for dj in 0..=2usize {
                for di in -2i64..=2 {
                    if dj == 0 && di <= 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j + dj);
                    if ii < 0 || ii >= n as i64 || jj >= n {
                        continue;
                    }
                    let b = label[jj * n + ii as usize];
                    if b != usize::MAX && b != a {
                        return Err(());
                    }
                }
            }
        }
    }
    let to_index = |z: Complex64| -> Option<(usize, usize)> {
        let u = ((z.re + radius) / step).round();
        let v = ((z.im + radius) / step).round();
        (u >= 0.0 && v >= 0.0 && u < n as f64 && v < n as f64).then_some((u as usize, v as usize))
    };
    let mut out: Vec<SublevelComponent> = comps
        .iter()
        .enumerate()
        .map(|(id, &(i0, i1, j0, j1, count, centroid))| {
            let sample = to_index(centroid)
                .filter(|&(u, v)| label[v * n + u] == id)
                .map(|(u, v)| node(u, v))
                .unwrap_or_else(|| {
                    let k = label.iter().position(|&l| l == id).expect("nonempty");
                    node(k % n, k / n)
                });
            SublevelComponent {
                level: t,
                id,
                critical_points: Vec::new(),
                sample,
                bbox: (node(i0, j0), node(i1, j1)),
                resolution: n,
                cells: count,
            }
        })
        .collect();
    for c in crit {
        if esc.rate(c.location, 1e-13) >= t {
            continue;
        }
        let Some((u, v)) = to_index(c.location) else {
            return Err(());
        };
        // A critical point must sit clearly inside its component.
        for dv in -2i64..=2 {
            for du in -2i64..=2 {
                let (a, b) = (u as i64 + du, v as i64 + dv);
                if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                    continue;
                }
                if !inside[b as usize * n + a as usize] {
                    return Err(());
                }
            }
        }
        let id = label[v * n + u];
        out[id].critical_points.push(*c);
    }
    Ok(out)
}

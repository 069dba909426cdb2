//! Simultaneous root finding (Aberth iteration) with Newton polishing.

use num_complex::Complex64;

use super::polynomial::horner;
use super::PolyError;

const MAX_ITER: usize = 600;

/// All roots of the polynomial with lowest-first coefficients `coeffs`,
/// listed with multiplicity.
///
/// Exact zero low-order coefficients are split off as exact roots at 0.
/// Fails when the backward error of some root stays above `1e-8`.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let zero = Complex64::new(0.0, 0.0);
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last() == Some(&zero) {
        c.pop();
    }
    if c.is_empty() {
        return Err(PolyError::LeadingZero);
    }
    let zeros_at_origin = c.iter().take_while(|&&x| x == zero).count();
    let reduced = &c[zeros_at_origin..];
    let mut roots = vec![zero; zeros_at_origin];
    roots.extend(aberth(reduced)?);
    Ok(roots)
}

fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>, PolyError> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|&x| x / lead).collect();
    let dmonic: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &x)| x * i as f64)
        .collect();

    // Initial guesses on a circle sized by the Fujiwara bound, with an
    // irrational angular offset to avoid symmetric stalls.
    let radius = (0..n)
        .map(|i| monic[i].norm().powf(1.0 / (n - i) as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * 0.9, theta)
        })
        .collect();

    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let p = horner(&monic, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let dp = horner(&dmonic, z[i]);
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff != Complex64::new(0.0, 0.0) {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * s;
            let step = if denom.norm() > 0.0 && denom.norm().is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if !step.re.is_finite() || !step.im.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }

    let mut worst = 0.0_f64;
    for zi in z.iter_mut() {
        polish(&monic, &dmonic, zi);
        worst = worst.max(backward_error(&monic, *zi));
    }
    if !(worst <= 1e-8) {
        return Err(PolyError::RootsNotConverged { max_residual: worst });
    }
    Ok(z)
}

fn polish(p: &[Complex64], dp: &[Complex64], z: &mut Complex64) {
    for _ in 0..3 {
        let v = horner(p, *z);
        let dv = horner(dp, *z);
        if dv.norm() == 0.0 || !dv.norm().is_finite() {
            return;
        }
        let cand = *z - v / dv;
        if backward_error(p, cand) < backward_error(p, *z) {
            *z = cand;
        } else {
            return;
        }
    }
}

/// |p(z)| divided by the natural scale `sum |a_i| |z|^i`.
pub fn backward_error(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    let scale = p.iter().rev().fold(0.0_f64, |acc, c| acc * r + c.norm());
    if scale == 0.0 {
        return 0.0;
    }
    horner(p, z).norm() / scale
}

/// Groups roots by single linkage at distance `rel_tol * (1 + max|root|)`.
/// Returns centroids with cluster sizes, ordered by first appearance.
pub fn cluster_roots(roots: &[Complex64], rel_tol: f64) -> Vec<(Complex64, usize)> {
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale;
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        let mut j = i;
        while label[j] != r {
            let next = label[j];
            label[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut sums: Vec<(Complex64, usize)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let r = find(&mut label, i);
        match order.iter().position(|&x| x == r) {
            Some(k) => {
                sums[k].0 += z;
                sums[k].1 += 1;
            }
            None => {
                order.push(r);
                sums.push((z, 1));
            }
        }
    }
    sums.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

/// Roots with multiplicities.
///
/// Roots are first clustered at `rel_tol`. Clusters closer than `1e-3`
/// relative are then merged when the merged centroid passes a derivative
/// test: the j-th derivative has backward error at most `(1e-13)^((m-j)/m)`
/// there, the size expected from a perturbed `m`-fold root.
pub fn roots_with_multiplicity(
    coeffs: &[Complex64],
    rel_tol: f64,
) -> Result<Vec<(Complex64, usize)>, PolyError> {
    let roots = polynomial_roots(coeffs)?;
    let mut clusters = cluster_roots(&roots, rel_tol);
    let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let (zi, mi) = clusters[i];
                let (zj, mj) = clusters[j];
                if (zi - zj).norm() > 1e-3 * scale {
                    continue;
                }
                let m = mi + mj;
                let centre = (zi * mi as f64 + zj * mj as f64) / m as f64;
                if vanishes_to_order(coeffs, centre, m) {
                    clusters[i] = (centre, m);
                    clusters.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    Ok(clusters)
}

fn vanishes_to_order(coeffs: &[Complex64], z: Complex64, m: usize) -> bool {
    let mut p = coeffs.to_vec();
    for j in 0..m {
        if p.len() <= 1 {
            return false;
        }
        let tol = 1e-13_f64.powf((m - j) as f64 / m as f64);
        if backward_error(&p, z) > tol {
            return false;
        }
        p = p.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect();
    }
    true
}

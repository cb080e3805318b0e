//! Ground-truth generators that share no code path with the Triangle Algorithm:
//! Gaussian elimination, exact planar hull membership and distance, and
//! brute-force/face-enumeration distance to a small hull.

use crate::error::{Error, Result};
use crate::linalg::{dist, DenseMatrix};
use crate::scalar::Scalar;
use crate::system::LinearSystem;

/// Exact solution of a system and the least shift making it non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T> {
    pub x_star: Vec<T>,
    /// `max(0, -minᵢ xᵢ*)`
    pub t_star: T,
}

/// Gaussian elimination with partial pivoting on an augmented copy.
///
/// Pivots smaller than `1e-13·max|aᵢⱼ|` are reported as singular, as is any
/// solution whose residual exceeds `1e-10·ρ·n`.
pub fn solve_exact<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let tol = T::lit(1e-13) * a.max_abs();
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row = a.row(i);
            row.push(b[i]);
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap()).unwrap();
        if !(m[p][k].abs() > tol) {
            return Err(Error::SingularMatrix { column: k });
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != T::zero() {
                for j in k..=n {
                    let v = m[k][j];
                    m[i][j] -= f * v;
                }
            }
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s = (i + 1..n).fold(m[i][n], |acc, j| acc - m[i][j] * x[j]);
        x[i] = s / m[i][i];
    }

    let rho = (0..n).map(|j| crate::linalg::norm(a.column(j))).fold(crate::linalg::norm(b), T::max);
    let ax = a.mul_vec(&x);
    let res = dist(&ax, b);
    if !(res <= T::lit(1e-10) * rho * T::from_count(n)) {
        return Err(Error::SingularMatrix { column: n.saturating_sub(1) });
    }
    Ok(x)
}

pub fn t_star<T: Scalar>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, &v| m.max(-v))
}

pub fn solve_system<T: Scalar>(system: &LinearSystem<T>) -> Result<OracleResult<T>> {
    let x_star = solve_exact(system.matrix(), system.rhs())?;
    let t_star = t_star(&x_star);
    Ok(OracleResult { x_star, t_star })
}

#[inline]
fn cross<T: Scalar>(o: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn point_segment_distance<T: Scalar>(p: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len_sq = d[0] * d[0] + d[1] * d[1];
    let t = if len_sq > T::zero() {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len_sq).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
pub fn convex_hull_2d<T: Scalar>(points: &[[T; 2]]) -> Vec<[T; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[T; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[T; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Membership and exact distance of `p` with respect to the hull of planar points.
pub fn hull_membership_2d<T: Scalar>(points: &[[T; 2]], p: [T; 2]) -> (bool, T) {
    let hull = convex_hull_2d(points);
    match hull.len() {
        0 => (false, T::infinity()),
        1 => {
            let d = dist(&hull[0], &p);
            (d == T::zero(), d)
        }
        2 => {
            let d = point_segment_distance(p, hull[0], hull[1]);
            let scale = dist(&hull[0], &hull[1]);
            (d <= T::lit(1e-12) * scale, d)
        }
        k => {
            let inside = (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], p) >= T::zero());
            if inside {
                (true, T::zero())
            } else {
                let d =
                    (0..k).map(|i| point_segment_distance(p, hull[i], hull[(i + 1) % k])).fold(T::infinity(), T::min);
                (false, d)
            }
        }
    }
}

fn combination<T: Scalar>(points: &[Vec<T>], w: &[T]) -> Vec<T> {
    let mut x = vec![T::zero(); points[0].len()];
    for (v, &wi) in points.iter().zip(w) {
        crate::linalg::axpy(wi, v, &mut x);
    }
    x
}

/// Distance from `p` to `conv(points)` by scanning the simplex grid of step
/// `1/grid_k`, then polishing the best grid point with pairwise exact line searches.
///
/// The grid has `C(grid_k + n - 1, n - 1)` points; keep `n` small.
pub fn delta_brute<T: Scalar>(points: &[Vec<T>], p: &[T], grid_k: usize) -> T {
    let n = points.len();
    assert!(n > 0 && grid_k > 0);
    let k = T::from_count(grid_k);
    let mut counts = vec![0usize; n];
    let mut best = T::infinity();
    let mut best_w = vec![T::zero(); n];
    scan_grid(points, p, k, &mut counts, 0, grid_k, &mut best, &mut best_w);
    polish(points, p, best_w).min(best)
}

#[allow(clippy::too_many_arguments)]
fn scan_grid<T: Scalar>(
    points: &[Vec<T>],
    p: &[T],
    k: T,
    counts: &mut [usize],
    slot: usize,
    left: usize,
    best: &mut T,
    best_w: &mut Vec<T>,
) {
    if slot + 1 == counts.len() {
        counts[slot] = left;
        let w: Vec<T> = counts.iter().map(|&c| T::from_count(c) / k).collect();
        let d = dist(&combination(points, &w), p);
        if d < *best {
            *best = d;
            *best_w = w;
        }
        return;
    }
    for c in 0..=left {
        counts[slot] = c;
        scan_grid(points, p, k, counts, slot + 1, left - c, best, best_w);
    }
}

/// Pairwise weight transfers with exact line search until no pair improves.
fn polish<T: Scalar>(points: &[Vec<T>], p: &[T], mut w: Vec<T>) -> T {
    let n = points.len();
    let mut x = combination(points, &w);
    let tiny = T::lit(1e-300_f64.max(f64::MIN_POSITIVE));
    for _ in 0..500 {
        let mut moved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || w[i] <= T::zero() {
                    continue;
                }
                let d: Vec<T> = points[j].iter().zip(&points[i]).map(|(&a, &b)| a - b).collect();
                let dd = crate::linalg::norm_sq(&d);
                if dd <= tiny {
                    continue;
                }
                let r: Vec<T> = x.iter().zip(p).map(|(&a, &b)| a - b).collect();
                let theta = (-crate::linalg::dot(&r, &d) / dd).max(-w[j]).min(w[i]);
                if theta > T::lit(1e-15) {
                    w[i] -= theta;
                    w[j] += theta;
                    crate::linalg::axpy(theta, &d, &mut x);
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    dist(&x, p)
}

/// Exact distance from `p` to `conv(points)` by enumerating every subset and
/// projecting onto its affine hull; only subsets whose projection has
/// non-negative barycentric weights are feasible. Exponential in `n`.
pub fn delta_exact_small<T: Scalar>(points: &[Vec<T>], p: &[T]) -> T {
    let n = points.len();
    assert!(n > 0 && n <= 16, "face enumeration is limited to 16 points");
    let mut best = T::infinity();
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let base = &points[idx[0]];
        let dirs: Vec<Vec<T>> =
            idx[1..].iter().map(|&i| points[i].iter().zip(base).map(|(&a, &b)| a - b).collect()).collect();
        let r = dirs.len();
        let rel: Vec<T> = p.iter().zip(base).map(|(&a, &b)| a - b).collect();
        let mu = if r == 0 {
            Vec::new()
        } else {
            let g: Vec<Vec<T>> =
                (0..r).map(|a| (0..r).map(|b| crate::linalg::dot(&dirs[a], &dirs[b])).collect()).collect();
            let rhs: Vec<T> = dirs.iter().map(|d| crate::linalg::dot(d, &rel)).collect();
            let Ok(gm) = DenseMatrix::from_rows(&g) else { continue };
            match solve_exact(&gm, &rhs) {
                Ok(mu) => mu,
                Err(_) => continue,
            }
        };
        let lead = T::one() - mu.iter().copied().sum::<T>();
        let neg = T::lit(-1e-12);
        if lead < neg || mu.iter().any(|&m| m < neg) {
            continue;
        }
        let mut x = base.clone();
        for (d, &m) in dirs.iter().zip(&mu) {
            crate::linalg::axpy(m, d, &mut x);
        }
        best = best.min(dist(&x, p));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solves() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![3.0, -2.0], vec![2.0, 1.0]]).unwrap();
        let x = solve_exact(&a, &[-1.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);

        let s = LinearSystem::<f64>::from_rows(&[vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.0, -3.0]).unwrap();
        let o = solve_system(&s).unwrap();
        assert!((o.x_star[0] + 1.0).abs() < 1e-14 && (o.x_star[1] + 2.0).abs() < 1e-14);
        assert!((o.t_star - 2.0).abs() < 1e-14);

        let b = [3.5, -1.25, 7.0];
        assert_eq!(solve_exact(&DenseMatrix::identity(3), &b).unwrap(), b.to_vec());
    }

    #[test]
    fn exact_flags_singular() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(solve_exact(&a, &[1.0, 1.0]), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn membership_2d() {
        let tri = [[0.0, 0.0], [7.0, 0.0], [4.0, 3.0]];
        assert_eq!(hull_membership_2d(&tri, [4.1, 0.8]), (true, 0.0));

        let square = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let (inside, d) = hull_membership_2d(&square, [10.0, 10.0]);
        assert!(!inside);
        assert!((d - 9.0 * 2f64.sqrt()).abs() < 1e-12);

        let ex2 = [[2.0, 1.0], [-1.0, 1.0], [0.0, 3.0]];
        assert!(!hull_membership_2d(&ex2, [0.0, 0.0]).0);
    }

    #[test]
    fn membership_2d_degenerate_hulls() {
        let seg = [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]];
        assert!(hull_membership_2d(&seg, [0.25, 0.75]).0);
        let (inside, d) = hull_membership_2d(&seg, [0.0, 0.0]);
        assert!(!inside && (d - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(hull_membership_2d(&[[2.0, 2.0]], [2.0, 2.0]), (true, 0.0));
    }

    #[test]
    fn brute_distance_segment() {
        let pts = vec![vec![1.0, 0.0], vec![0.0, 3.0]];
        let d = delta_brute(&pts, &[0.0, 0.0], 10_000);
        assert!((d - 3.0 / 10f64.sqrt()).abs() < 1e-3);
        assert!((delta_exact_small(&pts, &[0.0, 0.0]) - 3.0 / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn brute_distance_vertex_and_interior() {
        let tri = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0]];
        assert!(delta_brute(&tri, &[4.0, 0.0], 20) < 1e-12);
        assert!(delta_brute(&tri, &[1.0, 1.3], 20) < 1e-9);
        assert_eq!(delta_exact_small(&tri, &[1.0, 1.3]), 0.0);
    }

    #[test]
    fn brute_grid_covers_every_composition() {
        // With four points at the simplex corners of R^4 and the target at a
        // grid node, the scan alone must hit distance zero.
        let pts: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let target = [0.2, 0.4, 0.1, 0.3];
        assert!(delta_brute(&pts, &target, 10) < 1e-12);
    }

    #[test]
    fn oracles_agree_in_plane() {
        let pts = [[0.0, 0.0], [3.0, 1.0], [1.0, 4.0], [-1.0, 2.0]];
        let vecs: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        for target in [[5.0, 5.0], [-3.0, -1.0], [1.0, 1.0], [0.0, 6.0]] {
            let (_, d2) = hull_membership_2d(&pts, target);
            assert!((delta_exact_small(&vecs, &target) - d2).abs() < 1e-12);
            assert!((delta_brute(&vecs, &target, 40) - d2).abs() < 1e-6);
        }
    }
}

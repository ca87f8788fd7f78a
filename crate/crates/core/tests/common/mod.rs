//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weldkit::imgeo::{BinaryImage, GrayImage};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut ChaCha8Rng, max_side: u32, density: f64) -> BinaryImage {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    let px = (0..w * h).map(|_| rng.gen_bool(density)).collect();
    BinaryImage::new(w, h, px).unwrap()
}

pub fn mask_from_rows(rows: &[&str]) -> BinaryImage {
    let w = rows[0].len() as u32;
    let px = rows
        .iter()
        .flat_map(|r| r.chars().map(|c| c == '#'))
        .collect();
    BinaryImage::new(w, rows.len() as u32, px).unwrap()
}

/// Breadth-first flood fill over the 8-neighborhood; components numbered by
/// their first pixel in raster order.
pub fn flood_fill_labels(mask: &BinaryImage) -> (Vec<u32>, u32) {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut labels = vec![0u32; (w * h) as usize];
    let mut next = 0;
    for start in 0..(w * h) {
        if !mask.pixels()[start as usize] || labels[start as usize] != 0 {
            continue;
        }
        next += 1;
        labels[start as usize] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let j = (ny * w + nx) as usize;
                    if mask.pixels()[j] && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j as i64);
                    }
                }
            }
        }
    }
    (labels, next)
}

/// True when both labelings induce the same partition of the pixels.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    let (mut ab, mut ba) = (HashMap::new(), HashMap::new());
    a.iter().zip(b).all(|(&x, &y)| {
        if (x == 0) != (y == 0) {
            return false;
        }
        *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x
    })
}

/// Region geometry recomputed from raw coordinates with explicit loops and
/// an eigenvector construction for the orientation.
#[derive(Debug, Clone, Copy)]
pub struct MomentOracle {
    pub n: f64,
    pub cx: f64,
    pub cy: f64,
    pub mu20: f64,
    pub mu02: f64,
    pub mu11: f64,
}

impl MomentOracle {
    pub fn from_pixels(pixels: &[(u32, u32)]) -> Self {
        let n = pixels.len() as f64;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for &(x, y) in pixels {
            sx += x as f64;
            sy += y as f64;
        }
        let (cx, cy) = (sx / n, sy / n);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for &(x, y) in pixels {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            a += dx * dx;
            b += dy * dy;
            c += dx * dy;
        }
        Self {
            n,
            cx,
            cy,
            mu20: a / n,
            mu02: b / n,
            mu11: c / n,
        }
    }

    /// Eigenvalues via the characteristic polynomial.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.mu20 + self.mu02;
        let det = self.mu20 * self.mu02 - self.mu11 * self.mu11;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        ((tr / 2.0 + disc).max(0.0), (tr / 2.0 - disc).max(0.0))
    }

    /// Angle of the major eigenvector in degrees, folded into (-90, 90];
    /// `None` when the two eigenvalues are too close to define an axis.
    pub fn orientation(&self) -> Option<f64> {
        let (l1, l2) = self.eigenvalues();
        if l1 - l2 <= 1e-9 * (l1 + l2).max(1e-300) {
            return None;
        }
        // pick the better-conditioned of the two eigenvector forms
        let (vx, vy) = if (l1 - self.mu20).abs() > (l1 - self.mu02).abs() {
            (self.mu11, l1 - self.mu20)
        } else {
            (l1 - self.mu02, self.mu11)
        };
        Some(fold_degrees(vy.atan2(vx).to_degrees()))
    }
}

/// Maps an axis angle to (-90, 90].
pub fn fold_degrees(mut t: f64) -> f64 {
    while t <= -90.0 {
        t += 180.0;
    }
    while t > 90.0 {
        t -= 180.0;
    }
    t
}

/// Smallest distance between two axis angles (period 180 degrees).
pub fn axis_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// OLS through the normal equations `(X'X) beta = X'y` with an intercept
/// column, solved by Gauss-Jordan elimination with partial pivoting.
/// Returns `[intercept, w1, .., wp]`.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len() + 1;
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &t) in x.iter().zip(y) {
        let z: Vec<f64> = std::iter::once(1.0).chain(row.iter().copied()).collect();
        for i in 0..p {
            for j in 0..p {
                a[i][j] += z[i] * z[j];
            }
            a[i][p] += z[i] * t;
        }
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot_row[col];
                for (x, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * pv;
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

/// Dark background at `bg` with a filled disc at `fg`.
pub fn disc_image(w: u32, h: u32, cx: f64, cy: f64, r: f64, bg: u8, fg: u8) -> GrayImage {
    let mut img = GrayImage::filled(w, h, bg).unwrap();
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            if dx * dx + dy * dy <= r * r {
                img.set(x, y, fg);
            }
        }
    }
    img
}

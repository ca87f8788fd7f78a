//! Per-region geometry from pixel moments.
//!
//! Coordinates are pixel centers, `x` along columns and `y` along rows. With
//! `n` pixels and central moments `mu20, mu02, mu11` normalized by `n`:
//!
//! * area = `n * p^2`, equivalent diameter = `sqrt(4 area / pi)`;
//! * orientation = `1/2 atan2(2 mu11, mu20 - mu02)` in degrees, mapped to
//!   (-90, 90]; regions with `mu11 = 0` and `mu20 = mu02` report 45;
//! * axis lengths = `4 sqrt(lambda) * p` for the eigenvalues of
//!   `[[mu20, mu11], [mu11, mu02]]`;
//! * perimeter = weighted count of border-pixel configurations.
//!
//! `p` is the physical length of one pixel side.

use std::f64::consts::{PI, SQRT_2};

use super::{ImageError, LabelImage};

/// Physical length of one pixel side (e.g. micrometers per pixel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSpec {
    units_per_pixel: f64,
}

impl ScaleSpec {
    pub fn new(units_per_pixel: f64) -> Result<Self, ImageError> {
        if units_per_pixel.is_finite() && units_per_pixel > 0.0 {
            Ok(Self { units_per_pixel })
        } else {
            Err(ImageError::InvalidArgument(format!(
                "scale must be a positive length per pixel, got {units_per_pixel}"
            )))
        }
    }

    pub fn units_per_pixel(&self) -> f64 {
        self.units_per_pixel
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionFeatures {
    pub region_id: u32,
    pub pixel_count: u64,
    pub area: f64,
    pub equivalent_diameter: f64,
    /// Degrees in (-90, 90].
    pub orientation: f64,
    pub major_axis_length: f64,
    pub minor_axis_length: f64,
    pub perimeter: f64,
    /// (x, y) in scaled units.
    pub centroid: (f64, f64),
}

/// Second-order central moments normalized by the pixel count, in pixel units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoments {
    pub mu20: f64,
    pub mu02: f64,
    pub mu11: f64,
}

impl CentralMoments {
    /// Eigenvalues of the moment matrix, largest first, clamped at zero.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.mu20 + self.mu02);
        let half_diff = 0.5 * (self.mu20 - self.mu02);
        let radius = half_diff.hypot(self.mu11);
        ((mean + radius).max(0.0), (mean - radius).max(0.0))
    }

    /// Major-axis angle from the x axis, degrees in (-90, 90].
    pub fn orientation_degrees(&self) -> f64 {
        let trace = self.mu20 + self.mu02;
        let tol = 1e-12 * trace;
        if self.mu11.abs() <= tol && (self.mu20 - self.mu02).abs() <= tol {
            return 45.0;
        }
        // +0.0 normalizes a negative zero so vertical regions land on +90
        let theta = 0.5
            * (2.0 * self.mu11 + 0.0)
                .atan2(self.mu20 - self.mu02)
                .to_degrees();
        if theta <= -90.0 {
            theta + 180.0
        } else {
            theta
        }
    }
}

/// Contribution of a border pixel given its configuration code
/// `1 + 2 * (4-neighbor border pixels) + 10 * (diagonal border pixels)`.
fn perimeter_weight(code: u32) -> f64 {
    match code {
        5 | 7 | 15 | 17 | 25 | 27 => 1.0,
        21 | 33 => SQRT_2,
        13 | 23 => (1.0 + SQRT_2) / 2.0,
        _ => 0.0,
    }
}

#[derive(Clone, Default)]
struct Accum {
    n: u64,
    sx: u64,
    sy: u64,
    mu20: f64,
    mu02: f64,
    mu11: f64,
    perimeter: f64,
}

pub fn region_features(
    labels: &LabelImage,
    scale: ScaleSpec,
) -> Result<Vec<RegionFeatures>, ImageError> {
    let k = labels.region_count as usize;
    if k == 0 {
        return Err(ImageError::NoRegions);
    }
    let (w, h) = (labels.width as usize, labels.height as usize);
    let lab = &labels.labels;
    let mut acc = vec![Accum::default(); k + 1];

    for y in 0..h {
        for x in 0..w {
            let l = lab[y * w + x] as usize;
            if l > 0 {
                let a = &mut acc[l];
                a.n += 1;
                a.sx += x as u64;
                a.sy += y as u64;
            }
        }
    }
    let centroids: Vec<(f64, f64)> = acc
        .iter()
        .map(|a| {
            if a.n == 0 {
                (0.0, 0.0)
            } else {
                (a.sx as f64 / a.n as f64, a.sy as f64 / a.n as f64)
            }
        })
        .collect();

    // a pixel is on the border when a 4-neighbor, or the image edge, is not
    // part of its own region
    let same = |x: i64, y: i64, l: u32| {
        x >= 0
            && y >= 0
            && (x as usize) < w
            && (y as usize) < h
            && lab[y as usize * w + x as usize] == l
    };
    let mut border = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let l = lab[y * w + x];
            if l == 0 {
                continue;
            }
            let (xi, yi) = (x as i64, y as i64);
            border[y * w + x] = !(same(xi - 1, yi, l)
                && same(xi + 1, yi, l)
                && same(xi, yi - 1, l)
                && same(xi, yi + 1, l));
        }
    }
    let border_same = |x: i64, y: i64, l: u32| same(x, y, l) && border[y as usize * w + x as usize];

    for y in 0..h {
        for x in 0..w {
            let l = lab[y * w + x];
            if l == 0 {
                continue;
            }
            let a = &mut acc[l as usize];
            let (cx, cy) = centroids[l as usize];
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            a.mu20 += dx * dx;
            a.mu02 += dy * dy;
            a.mu11 += dx * dy;

            if border[y * w + x] {
                let (xi, yi) = (x as i64, y as i64);
                let edge = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                    .iter()
                    .filter(|(ox, oy)| border_same(xi + ox, yi + oy, l))
                    .count() as u32;
                let diag = [(-1, -1), (1, -1), (-1, 1), (1, 1)]
                    .iter()
                    .filter(|(ox, oy)| border_same(xi + ox, yi + oy, l))
                    .count() as u32;
                a.perimeter += perimeter_weight(1 + 2 * edge + 10 * diag);
            }
        }
    }

    let p = scale.units_per_pixel();
    Ok((1..=k)
        .map(|l| {
            let a = &acc[l];
            let n = a.n as f64;
            let m = CentralMoments {
                mu20: a.mu20 / n,
                mu02: a.mu02 / n,
                mu11: a.mu11 / n,
            };
            let (l1, l2) = m.eigenvalues();
            let area = n * p * p;
            RegionFeatures {
                region_id: l as u32,
                pixel_count: a.n,
                area,
                equivalent_diameter: (4.0 * area / PI).sqrt(),
                orientation: m.orientation_degrees(),
                major_axis_length: 4.0 * l1.sqrt() * p,
                minor_axis_length: 4.0 * l2.sqrt() * p,
                perimeter: a.perimeter * p,
                centroid: (centroids[l].0 * p, centroids[l].1 * p),
            }
        })
        .collect())
}

pub const FEATURES_CSV_HEADER: &str =
    "region,area,equivalent_diameter,orientation,major_axis_length,minor_axis_length,perimeter";

/// Rendering of feature values in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Two decimals, as in a printed table.
    #[default]
    Fixed2,
    /// Shortest text that parses back to the identical `f64`.
    Full,
}

pub fn export_features_csv(features: &[RegionFeatures], precision: Precision) -> String {
    let fmt = |v: f64| match precision {
        Precision::Fixed2 => format!("{v:.2}"),
        Precision::Full => format!("{v}"),
    };
    let mut out = String::from(FEATURES_CSV_HEADER);
    out.push('\n');
    for f in features {
        let cols = [
            f.area,
            f.equivalent_diameter,
            f.orientation,
            f.major_axis_length,
            f.minor_axis_length,
            f.perimeter,
        ];
        out.push_str(&f.region_id.to_string());
        for v in cols {
            out.push(',');
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    out
}

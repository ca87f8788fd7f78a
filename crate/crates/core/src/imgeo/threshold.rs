use super::histogram::levels;
use super::{BinaryImage, GrayImage, ImageError};

/// `pixel >= t` becomes foreground.
pub fn threshold_manual(img: &GrayImage, t: u8) -> BinaryImage {
    let pixels = img.pixels().iter().map(|&v| v >= t).collect();
    BinaryImage::new(img.width(), img.height(), pixels).expect("same shape as source")
}

/// Between-class variance `w0 * w1 * (mu0 - mu1)^2` of the split at `t`
/// (class 0 = levels below `t`), in units of the pixel count squared.
pub fn between_class_variance(counts: &[u64; 256], t: usize) -> f64 {
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in counts.iter().enumerate() {
        if v < t {
            n0 += c;
            s0 += c * v as u64;
        } else {
            n1 += c;
            s1 += c * v as u64;
        }
    }
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let diff = s0 as f64 / n0 as f64 - s1 as f64 / n1 as f64;
    n0 as f64 * n1 as f64 * diff * diff
}

/// Otsu's threshold over the 256-level histogram, in the `>= t` convention
/// of [`threshold_manual`]. The smallest maximizer wins ties.
pub fn threshold_otsu(img: &GrayImage) -> Result<u8, ImageError> {
    let counts = levels(img);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ImageError::DegenerateImage);
    }
    let total: u64 = counts.iter().sum();
    let sum_all: f64 = counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let (mut best_t, mut best_var) = (0usize, f64::NEG_INFINITY);
    let (mut n0, mut s0) = (0u64, 0.0f64);
    for t in 1..256 {
        n0 += counts[t - 1];
        s0 += (t - 1) as f64 * counts[t - 1] as f64;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let diff = s0 / n0 as f64 - (sum_all - s0) / n1 as f64;
        let var = n0 as f64 * n1 as f64 * diff * diff;
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    Ok(best_t as u8)
}

use super::{GrayImage, ImageError};

pub const DEFAULT_BINS: usize = 100;
const RANGE_HIGH: f64 = 255.0;

/// Intensity counts over `bin_count` equal-width bins spanning [0, 255]. The
/// last bin is closed on the right so 255 lands in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn range(&self) -> (f64, f64) {
        (0.0, RANGE_HIGH)
    }

    /// Bin `i` covers `[edge(i), edge(i + 1))`.
    pub fn edge(&self, i: usize) -> f64 {
        (i as f64 * RANGE_HIGH) / self.counts.len() as f64
    }

    /// `bin_low,bin_high,count` rows followed by a `# total=... pixels=...`
    /// footer.
    pub fn to_csv(&self, pixel_count: u64) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edge(i), self.edge(i + 1), c));
        }
        out.push_str(&format!(
            "# total={} pixels={}\n",
            self.total(),
            pixel_count
        ));
        out
    }
}

/// Bin index of intensity `v`: `floor(v * bins / 255)`, clamped to the last
/// bin. Integer arithmetic keeps boundary values exact.
pub fn bin_index(v: u8, bins: usize) -> usize {
    ((v as usize * bins) / 255).min(bins - 1)
}

pub fn histogram(img: &GrayImage, bins: usize) -> Result<Histogram, ImageError> {
    if bins == 0 {
        return Err(ImageError::InvalidArgument(
            "histogram needs at least one bin".into(),
        ));
    }
    let mut counts = vec![0u64; bins];
    for &v in img.pixels() {
        counts[bin_index(v, bins)] += 1;
    }
    Ok(Histogram { counts })
}

/// Full 256-level intensity histogram.
pub fn levels(img: &GrayImage) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &v in img.pixels() {
        counts[v as usize] += 1;
    }
    counts
}

use super::ImageError;

fn check_dims(width: u32, height: u32, len: usize, channels: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::Dimensions(format!(
            "{width}x{height} has no pixels"
        )));
    }
    let expected = width as usize * height as usize * channels;
    if len != expected {
        return Err(ImageError::Dimensions(format!(
            "{width}x{height}x{channels} needs {expected} samples, got {len}"
        )));
    }
    Ok(())
}

/// 8-bit intensity raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len(), 1)?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }
}

/// 8-bit interleaved RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len(), 3)?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// ITU-R 601 luma: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let v = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
    v.round().clamp(0.0, 255.0) as u8
}

pub fn to_gray(rgb: &RgbImage) -> GrayImage {
    let pixels = rgb
        .pixels
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    GrayImage {
        width: rgb.width,
        height: rgb.height,
        pixels,
    }
}

/// Foreground mask. Foreground reads as 255 and background as 0 when
/// rendered back to intensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, pixels: Vec<bool>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len(), 1)?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn empty(width: u32, height: u32) -> Result<Self, ImageError> {
        Self::new(width, height, vec![false; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    /// Out-of-bounds coordinates read as background.
    pub fn get_padded(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i64
            && y < self.height as i64
            && self.get(x as u32, y as u32)
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|p| **p).count()
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| !p).collect(),
        }
    }

    /// 0 / 255 intensities.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self
                .pixels
                .iter()
                .map(|&p| if p { 255 } else { 0 })
                .collect(),
        }
    }
}

/// Per-pixel region labels, 0 for background and `1..=region_count` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    pub(crate) width: u32,
    pub(crate) height: u32,
    pub(crate) labels: Vec<u32>,
    pub(crate) region_count: u32,
}

impl LabelImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn region_count(&self) -> u32 {
        self.region_count
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_examples() {
        assert_eq!(luma(255, 255, 255), 255);
        assert_eq!(luma(0, 0, 0), 0);
        assert_eq!(luma(255, 0, 0), 76);
        assert_eq!(luma(0, 255, 0), 150);
        assert_eq!(luma(0, 0, 255), 29);
    }

    #[test]
    fn rgb_to_gray() {
        let rgb = RgbImage::new(2, 1, vec![255, 0, 0, 255, 255, 255]).unwrap();
        assert_eq!(to_gray(&rgb).pixels(), &[76, 255]);
    }

    #[test]
    fn dimension_checks() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(RgbImage::new(1, 1, vec![0; 4]).is_err());
    }
}

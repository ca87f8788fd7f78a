//! 3x3 binary erosion and dilation. Pixels outside the image are background.

use super::BinaryImage;

fn neighborhood(b: &BinaryImage, keep: fn(&[bool; 9]) -> bool) -> BinaryImage {
    let (w, h) = (b.width(), b.height());
    let mut out = Vec::with_capacity(w as usize * h as usize);
    let mut window = [false; 9];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            for (k, slot) in window.iter_mut().enumerate() {
                let (dx, dy) = (k as i64 % 3 - 1, k as i64 / 3 - 1);
                *slot = b.get_padded(x + dx, y + dy);
            }
            out.push(keep(&window));
        }
    }
    BinaryImage::new(w, h, out).expect("same shape")
}

/// Keeps a pixel iff all nine pixels of its 3x3 neighborhood are foreground.
pub fn erode(b: &BinaryImage) -> BinaryImage {
    neighborhood(b, |win| win.iter().all(|&p| p))
}

/// Sets a pixel iff any pixel of its 3x3 neighborhood is foreground.
pub fn dilate(b: &BinaryImage) -> BinaryImage {
    neighborhood(b, |win| win.iter().any(|&p| p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CleanMode {
    /// Dilate then erode: fills pinholes and hairline gaps.
    #[default]
    Closing,
    /// Erode then dilate: removes specks.
    Opening,
    None,
}

pub fn clean_mask(b: &BinaryImage, mode: CleanMode) -> BinaryImage {
    match mode {
        CleanMode::Closing => erode(&dilate(b)),
        CleanMode::Opening => dilate(&erode(b)),
        CleanMode::None => b.clone(),
    }
}

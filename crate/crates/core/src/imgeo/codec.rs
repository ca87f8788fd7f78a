//! Binary PGM (P5, maxval 255) and 8-bit non-interlaced PNG input; P5 output.

use std::io::Cursor;

use super::{to_gray, GrayImage, ImageError, RgbImage};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl DecodedImage {
    pub fn into_gray(self) -> GrayImage {
        match self {
            DecodedImage::Gray(g) => g,
            DecodedImage::Rgb(rgb) => to_gray(&rgb),
        }
    }
}

/// Sniffs the format from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<DecodedImage, ImageError> {
    if bytes.starts_with(b"P5") {
        decode_pgm(bytes).map(DecodedImage::Gray)
    } else if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else {
        Err(ImageError::Unsupported(
            "unrecognized image format (expected P5 PGM or PNG)".into(),
        ))
    }
}

/// Decodes either format, routing RGB through luma conversion.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    decode_image(bytes).map(DecodedImage::into_gray)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                ImageError::Truncated
            } else {
                ImageError::Decode(format!("bad PGM {what}"))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Decode(format!("PGM {what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if !bytes.starts_with(b"P5") {
        return Err(ImageError::Unsupported(
            "only binary P5 PGM is supported".into(),
        ));
    }
    let mut c = HeaderCursor { bytes, pos: 2 };
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(format!(
            "PGM maxval {maxval}; only 8-bit (255) is supported"
        )));
    }
    match bytes.get(c.pos) {
        Some(b) if b.is_ascii_whitespace() => c.pos += 1,
        Some(_) => {
            return Err(ImageError::Decode(
                "PGM header must end with one whitespace byte".into(),
            ))
        }
        None => return Err(ImageError::Truncated),
    }
    let n = width as usize * height as usize;
    let payload = bytes.get(c.pos..c.pos + n).ok_or(ImageError::Truncated)?;
    GrayImage::new(width, height, payload.to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

fn decode_png(bytes: &[u8]) -> Result<DecodedImage, ImageError> {
    let mut opts = png::DecodeOptions::default();
    opts.set_ignore_adler32(false);
    opts.set_ignore_crc(false);
    let mut decoder = png::Decoder::new_with_options(Cursor::new(bytes), opts);
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(png_error)?;

    let info = reader.info();
    if info.interlaced {
        return Err(ImageError::Unsupported("interlaced PNG".into()));
    }
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::Unsupported(format!(
            "PNG bit depth {:?}; only 8-bit is supported",
            info.bit_depth
        )));
    }
    let color = info.color_type;
    if !matches!(color, png::ColorType::Grayscale | png::ColorType::Rgb) {
        return Err(ImageError::Unsupported(format!(
            "PNG color type {color:?}; expected grayscale or RGB"
        )));
    }

    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::Decode("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(png_error)?;
    let (w, h) = (frame.width, frame.height);
    let row_bytes = w as usize * if color == png::ColorType::Rgb { 3 } else { 1 };
    let mut pixels = Vec::with_capacity(row_bytes * h as usize);
    for row in buf.chunks(frame.line_size).take(h as usize) {
        pixels.extend_from_slice(&row[..row_bytes]);
    }
    // reading to the end verifies the trailing chunk CRCs
    reader.finish().map_err(png_error)?;
    Ok(match color {
        png::ColorType::Rgb => DecodedImage::Rgb(RgbImage::new(w, h, pixels)?),
        _ => DecodedImage::Gray(GrayImage::new(w, h, pixels)?),
    })
}

fn png_error(e: png::DecodingError) -> ImageError {
    match e {
        png::DecodingError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => {
            ImageError::Truncated
        }
        other => ImageError::Decode(format!("PNG: {other}")),
    }
}

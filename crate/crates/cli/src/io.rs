//! Image file I/O: binary PGM (P5, maxval 255) and 8-bit gray/RGB PNG.

use std::fs;
use std::path::Path;

use image::{ColorType, ImageReader};
use lumen::Raster;

use crate::error::{CliError, Result};

/// A decoded image: one gray plane or three color planes.
#[derive(Debug, Clone, PartialEq)]
pub enum Image {
    Gray(Raster),
    Rgb([Raster; 3]),
}

impl Image {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Image::Gray(r) => r.dims(),
            Image::Rgb(c) => c[0].dims(),
        }
    }

    pub fn channels(&self) -> Vec<&Raster> {
        match self {
            Image::Gray(r) => vec![r],
            Image::Rgb(c) => c.iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Pgm,
    Png,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(Format::Pgm),
            "png" => Some(Format::Png),
            _ => None,
        }
    }
}

pub fn load_image(path: &Path) -> Result<Image> {
    match Format::from_path(path) {
        Some(Format::Pgm) => {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            decode_pgm(&bytes)
                .map(Image::Gray)
                .map_err(|(unsupported, reason)| {
                    if unsupported {
                        CliError::UnsupportedFormat {
                            path: path.into(),
                            reason,
                        }
                    } else {
                        CliError::CorruptFile {
                            path: path.into(),
                            reason,
                        }
                    }
                })
        }
        Some(Format::Png) => load_png(path),
        None => Err(CliError::UnsupportedFormat {
            path: path.into(),
            reason: "expected a .pgm or .png extension".into(),
        }),
    }
}

pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    let format = Format::from_path(path).ok_or_else(|| CliError::UnsupportedFormat {
        path: path.into(),
        reason: "expected a .pgm or .png extension".into(),
    })?;
    match (format, img) {
        (Format::Pgm, Image::Gray(r)) => {
            fs::write(path, encode_pgm(r)).map_err(|e| CliError::io(path, e))
        }
        (Format::Pgm, Image::Rgb(_)) => Err(CliError::UnsupportedFormat {
            path: path.into(),
            reason: "PGM cannot hold a color image".into(),
        }),
        (Format::Png, img) => save_png(img, path),
    }
}

pub fn encode_pgm(img: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Error flag is `true` for well-formed but unsupported files.
fn decode_pgm(bytes: &[u8]) -> std::result::Result<Raster, (bool, String)> {
    let corrupt = |s: &str| (false, s.to_string());
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err((true, "only binary PGM (P5) is supported".into()));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Skip whitespace and comments.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(corrupt("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(corrupt("expected a number in the header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| corrupt("header number out of range"))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(corrupt("missing whitespace after maxval"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err((true, format!("maxval {maxval} (only 255 is supported)")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    let data = bytes
        .get(pos..pos + n)
        .ok_or_else(|| corrupt("pixel data truncated"))?;
    Raster::new(width, height, data.to_vec()).map_err(|e| corrupt(&e.to_string()))
}

fn load_png(path: &Path) -> Result<Image> {
    let corrupt = |reason: String| CliError::CorruptFile {
        path: path.into(),
        reason,
    };
    let reader = ImageReader::open(path)
        .map_err(|e| CliError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| CliError::io(path, e))?;
    let decoded = reader.decode().map_err(|e| corrupt(e.to_string()))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded.color() {
        ColorType::L8 => {
            let r = Raster::new(w, h, decoded.into_luma8().into_raw())
                .map_err(|e| corrupt(e.to_string()))?;
            Ok(Image::Gray(r))
        }
        ColorType::Rgb8 => {
            let raw = decoded.into_rgb8().into_raw();
            let plane = |c: usize| {
                Raster::new(w, h, raw.iter().skip(c).step_by(3).copied().collect())
                    .map_err(|e| corrupt(e.to_string()))
            };
            Ok(Image::Rgb([plane(0)?, plane(1)?, plane(2)?]))
        }
        other => Err(CliError::UnsupportedFormat {
            path: path.into(),
            reason: format!("{other:?} (expected 8-bit gray or RGB)"),
        }),
    }
}

fn save_png(img: &Image, path: &Path) -> Result<()> {
    let (w, h) = img.dims();
    let (buf, color) = match img {
        Image::Gray(r) => (r.data().to_vec(), image::ExtendedColorType::L8),
        Image::Rgb([r, g, b]) => {
            let mut buf = Vec::with_capacity(w * h * 3);
            for i in 0..w * h {
                buf.extend_from_slice(&[r.data()[i], g.data()[i], b.data()[i]]);
            }
            (buf, image::ExtendedColorType::Rgb8)
        }
    };
    image::save_buffer_with_format(
        path,
        &buf,
        w as u32,
        h as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| match e {
        image::ImageError::IoError(io) => CliError::io(path, io),
        other => CliError::CorruptFile {
            path: path.into(),
            reason: other.to_string(),
        },
    })
}

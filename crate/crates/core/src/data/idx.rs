//! IDX container files (the MNIST distribution format).

use std::path::Path;

use super::LabeledSample;
use crate::error::{Error, Result};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn fail(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::IdxFormat {
            path: self.path.to_path_buf(),
            offset: offset as u64,
            message: message.into(),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        let end = self.offset + 4;
        let chunk = self
            .bytes
            .get(self.offset..end)
            .ok_or_else(|| self.fail(self.offset, "truncated header"))?;
        self.offset = end;
        Ok(u32::from_be_bytes(chunk.try_into().expect("four bytes")))
    }

    fn magic(&mut self, expected: u32) -> Result<()> {
        let at = self.offset;
        let magic = self.u32()?;
        if magic != expected {
            return Err(self.fail(
                at,
                format!("bad magic {magic:#010x}, expected {expected:#010x}"),
            ));
        }
        Ok(())
    }

    fn payload(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .offset
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(self.fail(
                self.bytes.len(),
                format!(
                    "truncated payload: need {len} bytes from offset {}",
                    self.offset
                ),
            ));
        };
        let out = &self.bytes[self.offset..end];
        self.offset = end;
        Ok(out)
    }
}

/// Parses an image file into row-major pixel vectors scaled to `[0, 1]`.
pub fn parse_images(bytes: &[u8], path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = Reader {
        bytes,
        offset: 0,
        path,
    };
    r.magic(IMAGE_MAGIC)?;
    let n = r.u32()? as usize;
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let d0 = rows * cols;
    let pixels = r.payload(n * d0)?;
    Ok(pixels
        .chunks_exact(d0.max(1))
        .take(n)
        .map(|img| img.iter().map(|&p| f64::from(p) / 255.0).collect())
        .collect())
}

pub fn parse_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>> {
    let mut r = Reader {
        bytes,
        offset: 0,
        path,
    };
    r.magic(LABEL_MAGIC)?;
    let n = r.u32()? as usize;
    Ok(r.payload(n)?.to_vec())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads paired image and label files.
pub fn load_idx(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    let (images, labels) = (images.as_ref(), labels.as_ref());
    let pixels = parse_images(&read(images)?, images)?;
    let classes = parse_labels(&read(labels)?, labels)?;
    if pixels.len() != classes.len() {
        return Err(Error::IdxFormat {
            path: labels.to_path_buf(),
            offset: 4,
            message: format!("{} labels for {} images", classes.len(), pixels.len()),
        });
    }
    Ok(pixels
        .into_iter()
        .zip(classes)
        .map(|(features, label)| LabeledSample {
            features,
            label: usize::from(label),
        })
        .collect())
}

#[cfg(test)]
pub(crate) fn encode_images(images: &[Vec<u8>], rows: u32, cols: u32) -> Vec<u8> {
    let mut out = IMAGE_MAGIC.to_be_bytes().to_vec();
    for v in [images.len() as u32, rows, cols] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        out.extend_from_slice(img);
    }
    out
}

#[cfg(test)]
pub(crate) fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = LABEL_MAGIC.to_be_bytes().to_vec();
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

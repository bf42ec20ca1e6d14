//! IDX image/label file parsing and writing.
//!
//! Byte layout per the dataset's published format: a big-endian u32 magic
//! (0x00000803 for images, 0x00000801 for labels), big-endian u32
//! dimension fields, then the raw payload bytes. Files may be gzip
//! compressed; the loader sniffs the 0x1f 0x8b stream prefix rather than
//! trusting extensions.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::bufread::GzDecoder;

use crate::io::IoError;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// A parsed IDX image file: `count` images of `rows x cols` gray bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    /// Pixel slice of image `i`, length `rows * cols`.
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

/// A parsed IDX label file: one byte in 0-9 per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxLabels {
    pub count: usize,
    pub labels: Vec<u8>,
}

/// Reads a whole file, transparently gunzipping when the stream starts
/// with the gzip magic.
fn read_maybe_gzipped(path: &Path) -> Result<Vec<u8>, IoError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut head = [0u8; 2];
    let mut prefix_len = 0;
    while prefix_len < 2 {
        let n = reader.read(&mut head[prefix_len..])?;
        if n == 0 {
            break;
        }
        prefix_len += n;
    }
    let mut bytes = Vec::new();
    if prefix_len == 2 && head == [0x1f, 0x8b] {
        let chained = head.as_slice().chain(reader);
        GzDecoder::new(BufReader::new(chained)).read_to_end(&mut bytes)?;
    } else {
        bytes.extend_from_slice(&head[..prefix_len]);
        reader.read_to_end(&mut bytes)?;
    }
    Ok(bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IoError> {
        if self.bytes.len() - self.offset < n {
            return Err(IoError::Truncated { offset: self.offset, needed: n });
        }
        let s = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u32_be(&mut self) -> Result<u32, IoError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Parses an IDX image file (plain or gzipped).
pub fn load_idx_images(path: impl AsRef<Path>) -> Result<IdxImages, IoError> {
    let bytes = read_maybe_gzipped(path.as_ref())?;
    let mut cur = Cursor { bytes: &bytes, offset: 0 };
    let magic = cur.u32_be()?;
    if magic != IMAGES_MAGIC {
        return Err(IoError::BadMagic { found: magic, expected: IMAGES_MAGIC });
    }
    let count = cur.u32_be()? as usize;
    let rows = cur.u32_be()? as usize;
    let cols = cur.u32_be()? as usize;
    let payload = count
        .checked_mul(rows)
        .and_then(|n| n.checked_mul(cols))
        .ok_or_else(|| IoError::DimensionMismatch("image dimensions overflow".into()))?;
    let pixels = cur.take(payload)?.to_vec();
    if cur.offset != bytes.len() {
        return Err(IoError::DimensionMismatch(format!(
            "{} trailing bytes after {count} x {rows} x {cols} pixels",
            bytes.len() - cur.offset
        )));
    }
    Ok(IdxImages { count, rows, cols, pixels })
}

/// Parses an IDX label file (plain or gzipped).
pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<IdxLabels, IoError> {
    let bytes = read_maybe_gzipped(path.as_ref())?;
    let mut cur = Cursor { bytes: &bytes, offset: 0 };
    let magic = cur.u32_be()?;
    if magic != LABELS_MAGIC {
        return Err(IoError::BadMagic { found: magic, expected: LABELS_MAGIC });
    }
    let count = cur.u32_be()? as usize;
    let labels = cur.take(count)?.to_vec();
    if cur.offset != bytes.len() {
        return Err(IoError::DimensionMismatch(format!(
            "{} trailing bytes after {count} labels",
            bytes.len() - cur.offset
        )));
    }
    for (index, &value) in labels.iter().enumerate() {
        if value > 9 {
            return Err(IoError::BadLabel { index, value });
        }
    }
    Ok(IdxLabels { count, labels })
}

/// Writes images in plain (uncompressed) IDX layout.
pub fn save_idx_images(images: &IdxImages, path: impl AsRef<Path>) -> Result<(), IoError> {
    if images.pixels.len() != images.count * images.rows * images.cols {
        return Err(IoError::DimensionMismatch(format!(
            "{} pixels for {} x {} x {}",
            images.pixels.len(),
            images.count,
            images.rows,
            images.cols
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&IMAGES_MAGIC.to_be_bytes())?;
    w.write_all(&(images.count as u32).to_be_bytes())?;
    w.write_all(&(images.rows as u32).to_be_bytes())?;
    w.write_all(&(images.cols as u32).to_be_bytes())?;
    w.write_all(&images.pixels)?;
    Ok(())
}

/// Writes labels in plain (uncompressed) IDX layout.
pub fn save_idx_labels(labels: &IdxLabels, path: impl AsRef<Path>) -> Result<(), IoError> {
    if labels.labels.len() != labels.count {
        return Err(IoError::DimensionMismatch(format!(
            "{} labels for count {}",
            labels.labels.len(),
            labels.count
        )));
    }
    if let Some((index, &value)) = labels.labels.iter().enumerate().find(|&(_, &v)| v > 9) {
        return Err(IoError::BadLabel { index, value });
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&LABELS_MAGIC.to_be_bytes())?;
    w.write_all(&(labels.count as u32).to_be_bytes())?;
    w.write_all(&labels.labels)?;
    Ok(())
}

/// Resolves an IDX file stem inside a directory, preferring the plain
/// file and falling back to its `.gz` sibling.
pub fn resolve_idx(dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf, IoError> {
    let plain = dir.as_ref().join(stem);
    if plain.is_file() {
        return Ok(plain);
    }
    let gz = dir.as_ref().join(format!("{stem}.gz"));
    if gz.is_file() {
        return Ok(gz);
    }
    Err(IoError::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("neither {stem} nor {stem}.gz in {}", dir.as_ref().display()),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    fn sample_images() -> IdxImages {
        IdxImages {
            count: 3,
            rows: 2,
            cols: 2,
            pixels: vec![0, 128, 255, 7, 1, 2, 3, 4, 9, 8, 7, 6],
        }
    }

    #[test]
    fn images_round_trip() {
        let dir = tmp();
        let path = dir.path().join("imgs-idx3-ubyte");
        let imgs = sample_images();
        save_idx_images(&imgs, &path).unwrap();
        let back = load_idx_images(&path).unwrap();
        assert_eq!(imgs, back);
        assert_eq!(back.image(1), &[1, 2, 3, 4]);
    }

    #[test]
    fn labels_round_trip() {
        let dir = tmp();
        let path = dir.path().join("labels-idx1-ubyte");
        let labels = IdxLabels { count: 5, labels: vec![0, 9, 3, 1, 7] };
        save_idx_labels(&labels, &path).unwrap();
        assert_eq!(load_idx_labels(&path).unwrap(), labels);
    }

    #[test]
    fn gzipped_files_load_identically() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        let dir = tmp();
        let plain = dir.path().join("imgs");
        let gz = dir.path().join("imgs.gz");
        let imgs = sample_images();
        save_idx_images(&imgs, &plain).unwrap();
        let mut enc = GzEncoder::new(File::create(&gz).unwrap(), Compression::default());
        enc.write_all(&std::fs::read(&plain).unwrap()).unwrap();
        enc.finish().unwrap();
        assert_eq!(load_idx_images(&gz).unwrap(), imgs);
    }

    #[test]
    fn label_magic_passed_as_images_is_rejected() {
        let dir = tmp();
        let path = dir.path().join("labels");
        let labels = IdxLabels { count: 2, labels: vec![1, 2] };
        save_idx_labels(&labels, &path).unwrap();
        assert!(matches!(
            load_idx_images(&path),
            Err(IoError::BadMagic { found: 0x0000_0801, expected: 0x0000_0803 })
        ));
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let dir = tmp();
        let path = dir.path().join("imgs");
        save_idx_images(&sample_images(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        match load_idx_images(&path) {
            Err(IoError::Truncated { offset: 16, needed: 12 }) => {}
            other => panic!("expected truncation at payload, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let dir = tmp();
        let path = dir.path().join("imgs");
        save_idx_images(&sample_images(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_idx_images(&path), Err(IoError::DimensionMismatch(_))));
    }

    #[test]
    fn out_of_range_label_is_rejected() {
        let dir = tmp();
        let path = dir.path().join("labels");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&0x0000_0801u32.to_be_bytes());
        bytes.extend_from_slice(&2u32.to_be_bytes());
        bytes.extend_from_slice(&[3, 12]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_idx_labels(&path),
            Err(IoError::BadLabel { index: 1, value: 12 })
        ));
    }

    #[test]
    fn resolve_prefers_plain_over_gz() {
        let dir = tmp();
        std::fs::write(dir.path().join("x"), b"plain").unwrap();
        std::fs::write(dir.path().join("x.gz"), b"gz").unwrap();
        assert_eq!(resolve_idx(dir.path(), "x").unwrap(), dir.path().join("x"));
        assert_eq!(resolve_idx(dir.path(), "y.gz is missing").is_err(), true);
        std::fs::write(dir.path().join("z.gz"), b"gz").unwrap();
        assert_eq!(resolve_idx(dir.path(), "z").unwrap(), dir.path().join("z.gz"));
    }

    #[test]
    fn canonical_training_set_parses() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist");
        let images_path = match resolve_idx(&dir, "train-images-idx3-ubyte") {
            Ok(p) => p,
            // Dataset not present in this checkout; nothing to verify.
            Err(_) => return,
        };
        let images = load_idx_images(images_path).unwrap();
        assert_eq!((images.count, images.rows, images.cols), (60000, 28, 28));
        let labels =
            load_idx_labels(resolve_idx(&dir, "train-labels-idx1-ubyte").unwrap()).unwrap();
        assert_eq!(labels.count, 60000);
    }

    proptest! {
        // Foundation of the no-panic guarantee: arbitrary bytes must
        // produce Ok or a typed error, never a panic.
        #[test]
        fn arbitrary_bytes_never_panic_images(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let dir = tmp();
            let path = dir.path().join("fuzz");
            std::fs::write(&path, &bytes).unwrap();
            let _ = load_idx_images(&path);
        }

        #[test]
        fn arbitrary_bytes_never_panic_labels(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let dir = tmp();
            let path = dir.path().join("fuzz");
            std::fs::write(&path, &bytes).unwrap();
            let _ = load_idx_labels(&path);
        }

        #[test]
        fn valid_headers_with_arbitrary_payloads_never_panic(
            count in 0u32..64,
            rows in 0u32..8,
            cols in 0u32..8,
            extra in proptest::collection::vec(any::<u8>(), 0..512),
        ) {
            let dir = tmp();
            let path = dir.path().join("fuzz");
            let mut bytes = Vec::new();
            bytes.extend_from_slice(&0x0000_0803u32.to_be_bytes());
            bytes.extend_from_slice(&count.to_be_bytes());
            bytes.extend_from_slice(&rows.to_be_bytes());
            bytes.extend_from_slice(&cols.to_be_bytes());
            bytes.extend_from_slice(&extra);
            std::fs::write(&path, &bytes).unwrap();
            if let Ok(imgs) = load_idx_images(&path) {
                prop_assert_eq!(imgs.pixels.len(), imgs.count * imgs.rows * imgs.cols);
            }
        }
    }
}

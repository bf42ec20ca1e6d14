//! Binary PGM (P5) writer for gray-scale grids such as receptive fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::io::IoError;

/// Writes `rows x cols` gray bytes as a binary PGM image.
pub fn write_pgm(
    path: impl AsRef<Path>,
    rows: usize,
    cols: usize,
    bytes: &[u8],
) -> Result<(), IoError> {
    if bytes.len() != rows * cols {
        return Err(IoError::DimensionMismatch(format!(
            "{} bytes for {rows} x {cols} image",
            bytes.len()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    w.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_header_and_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rf.pgm");
        write_pgm(&path, 2, 3, &[0, 50, 100, 150, 200, 250]).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 6..], &[0, 50, 100, 150, 200, 250]);
    }

    #[test]
    fn wrong_size_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(write_pgm(dir.path().join("x.pgm"), 2, 2, &[1, 2, 3]).is_err());
    }
}

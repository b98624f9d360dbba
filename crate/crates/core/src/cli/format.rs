//! On-disk formats: NTF1 tensors, label lists, trace CSV and PGM images.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::Labeling;
use crate::solver::SolveResult;
use crate::tensor::{DenseTensor, Matrix};

pub const MAGIC: &[u8; 4] = b"NTF1";

/// Writes `x` as `NTF1 | u32 ndims | u64 dims.. | f64 payload`, all little-endian.
pub fn write_tensor<W: Write>(mut w: W, x: &DenseTensor) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Format("refusing to write a non-finite tensor".into()));
    }
    w.write_all(MAGIC)?;
    w.write_all(&(x.order() as u32).to_le_bytes())?;
    for &d in x.shape() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for v in x.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R, what: &str) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Format(format!("truncated tensor file while reading {what}")))?;
    Ok(buf)
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<DenseTensor> {
    let magic: [u8; 4] = read_array(&mut r, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected NTF1")));
    }
    let ndims = u32::from_le_bytes(read_array(&mut r, "ndims")?) as usize;
    if ndims == 0 {
        return Err(Error::Format("tensor file declares zero dimensions".into()));
    }
    let mut shape = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        let d = u64::from_le_bytes(read_array(&mut r, "dims")?);
        shape.push(usize::try_from(d).map_err(|_| Error::Format(format!("extent {d} too large")))?);
    }
    let len = shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format(format!("shape {shape:?} overflows")))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != len * 8 {
        return Err(Error::Format(format!(
            "payload has {} bytes, header {shape:?} needs {}",
            bytes.len(),
            len * 8
        )));
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format(format!("non-finite value at payload offset {pos}")));
    }
    DenseTensor::new(shape, data).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_tensor(path: &Path, x: &DenseTensor) -> Result<()> {
    write_tensor(BufWriter::new(File::create(path)?), x)
}

pub fn load_tensor(path: &Path) -> Result<DenseTensor> {
    read_tensor(BufReader::new(File::open(path)?))
}

/// One integer per line; blank lines are skipped.
pub fn read_labels<R: Read>(r: R) -> Result<Labeling> {
    let mut ids = Vec::new();
    for (i, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let id: i64 = t
            .parse()
            .map_err(|_| Error::Format(format!("line {}: not an integer: {t:?}", i + 1)))?;
        ids.push(id);
    }
    if ids.is_empty() {
        return Err(Error::Format("labels file is empty".into()));
    }
    Ok(Labeling::from_ids(&ids))
}

pub fn write_labels<W: Write>(mut w: W, labels: &[usize]) -> Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_labels(path: &Path) -> Result<Labeling> {
    read_labels(File::open(path)?)
}

pub fn save_labels(path: &Path, labels: &[usize]) -> Result<()> {
    write_labels(BufWriter::new(File::create(path)?), labels)
}

#[derive(Serialize)]
struct TraceRow {
    sweep: usize,
    objective: f64,
    relative_fit: f64,
    elapsed_seconds: f64,
}

/// Columns `sweep, objective, relative_fit, elapsed_seconds`; sweep 0 is the
/// initial state.
pub fn write_trace_csv<W: Write>(w: W, result: &SolveResult) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (s, ((&objective, &relative_fit), &elapsed_seconds)) in result
        .objective_trace
        .iter()
        .zip(&result.fit_trace)
        .zip(&result.elapsed)
        .enumerate()
    {
        out.serialize(TraceRow {
            sweep: s,
            objective,
            relative_fit,
            elapsed_seconds,
        })?;
    }
    out.flush()?;
    Ok(())
}

/// Binary PGM (P5, maxval 255). `pixels` is row-major with `width` columns;
/// values are min-max scaled to 0..=255, a constant image maps to 0.
pub fn write_pgm<W: Write>(mut w: W, pixels: &[f64], width: usize, height: usize) -> Result<()> {
    if width * height != pixels.len() || pixels.is_empty() {
        return Err(Error::Shape(format!(
            "{} pixels do not fill a {width}x{height} image",
            pixels.len()
        )));
    }
    let lo = pixels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pixels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    write!(w, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = pixels
        .iter()
        .map(|&v| {
            if span > 0.0 {
                ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// Each column of `basis` as one `width x height` PGM, named
/// `basis_<column>.pgm` inside `dir`. Returns the written paths.
pub fn export_basis_images(
    dir: &Path,
    basis: &Matrix,
    width: usize,
    height: usize,
    limit: Option<usize>,
) -> Result<Vec<std::path::PathBuf>> {
    if width * height != basis.rows() {
        return Err(Error::Shape(format!(
            "basis vectors have {} entries, {width}x{height} needs {}",
            basis.rows(),
            width * height
        )));
    }
    std::fs::create_dir_all(dir)?;
    let count = limit.map_or(basis.cols(), |l| l.min(basis.cols()));
    let mut paths = Vec::with_capacity(count);
    for c in 0..count {
        let column: Vec<f64> = (0..basis.rows()).map(|r| basis.get(r, c)).collect();
        let path = dir.join(format!("basis_{c:03}.pgm"));
        write_pgm(BufWriter::new(File::create(&path)?), &column, width, height)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_header_layout() {
        let x = DenseTensor::new(vec![2, 1], vec![1.5, -0.0]).unwrap();
        let mut buf = Vec::new();
        write_tensor(&mut buf, &x).unwrap();
        assert_eq!(&buf[..4], b"NTF1");
        assert_eq!(&buf[4..8], &[2, 0, 0, 0]);
        assert_eq!(&buf[8..16], &2u64.to_le_bytes());
        assert_eq!(&buf[16..24], &1u64.to_le_bytes());
        assert_eq!(&buf[24..32], &1.5f64.to_le_bytes());
        assert_eq!(buf.len(), 40);
        let back = read_tensor(&buf[..]).unwrap();
        assert_eq!(back.data()[1].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn malformed_tensor_files() {
        let x = DenseTensor::filled(&[2, 2], 1.0);
        let mut buf = Vec::new();
        write_tensor(&mut buf, &x).unwrap();
        assert!(read_tensor(&buf[..buf.len() - 1]).is_err());
        let mut longer = buf.clone();
        longer.push(0);
        assert!(read_tensor(&longer[..]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_tensor(&bad[..]).is_err());
        let mut nan = buf.clone();
        let at = nan.len() - 8;
        nan[at..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(read_tensor(&nan[..]).is_err());
        assert!(read_tensor(&b"NTF1\0\0\0\0"[..]).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let mut buf = Vec::new();
        write_labels(&mut buf, &[2, 0, 1, 1]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "2\n0\n1\n1\n");
        assert_eq!(read_labels(&buf[..]).unwrap().labels(), &[2, 0, 1, 1]);
        assert!(read_labels(&b"1\nx\n"[..]).is_err());
    }

    #[test]
    fn pgm_scaling() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, &[1.0, 3.0, 2.0, 5.0, 1.0, 1.0], 3, 2).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[0, 128, 64, 255, 0, 0]);
        assert!(write_pgm(Vec::new(), &[1.0; 5], 3, 2).is_err());
    }
}

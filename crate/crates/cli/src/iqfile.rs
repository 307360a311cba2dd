//! Binary IQ container.
//!
//! Little-endian header: magic `MTSK`, version `u16`, sample rate `f64`,
//! sample count `u64`; then `sample_count` interleaved `f32` pairs (re, im).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use matisk::{IqSignal, Real};
use num_complex::Complex;

pub const MAGIC: [u8; 4] = *b"MTSK";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 22;

#[derive(Debug, thiserror::Error)]
pub enum IqFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic {0:?}, expected \"MTSK\"")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}, expected {VERSION}")]
    Version(u16),
    #[error("header announces {announced} samples, payload holds {found}")]
    Length { announced: u64, found: u64 },
    #[error("invalid header: {0}")]
    Header(String),
}

pub fn write_iq_to<W: Write>(mut w: W, signal: &IqSignal<f32>) -> Result<(), IqFileError> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&signal.sample_rate_hz.to_le_bytes())?;
    w.write_all(&(signal.len() as u64).to_le_bytes())?;
    for s in &signal.samples {
        w.write_all(&s.re.to_le_bytes())?;
        w.write_all(&s.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_iq_from<R: Read>(mut r: R) -> Result<IqSignal<f32>, IqFileError> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    let magic: [u8; 4] = header[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(IqFileError::BadMagic(magic));
    }
    let version = u16::from_le_bytes(header[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(IqFileError::Version(version));
    }
    let rate = f64::from_le_bytes(header[6..14].try_into().unwrap());
    let count = u64::from_le_bytes(header[14..22].try_into().unwrap());

    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() as u64 != count.saturating_mul(8) {
        return Err(IqFileError::Length {
            announced: count,
            found: payload.len() as u64 / 8,
        });
    }
    let samples = payload
        .chunks_exact(8)
        .map(|c| {
            Complex::new(
                f32::from_le_bytes(c[0..4].try_into().unwrap()),
                f32::from_le_bytes(c[4..8].try_into().unwrap()),
            )
        })
        .collect();
    IqSignal::new(samples, rate).map_err(|e| IqFileError::Header(e.to_string()))
}

pub fn write_iq(path: &Path, signal: &IqSignal<f32>) -> Result<(), IqFileError> {
    write_iq_to(BufWriter::new(File::create(path)?), signal)
}

pub fn read_iq(path: &Path) -> Result<IqSignal<f32>, IqFileError> {
    read_iq_from(BufReader::new(File::open(path)?))
}

/// Converts between sample precisions, keeping rate and start time.
pub fn convert<A: Real, B: Real>(signal: &IqSignal<A>) -> IqSignal<B> {
    IqSignal {
        samples: signal
            .samples
            .iter()
            .map(|z| Complex::new(B::of(z.re.as_f64()), B::of(z.im.as_f64())))
            .collect(),
        sample_rate_hz: signal.sample_rate_hz,
        t0_s: signal.t0_s,
    }
}

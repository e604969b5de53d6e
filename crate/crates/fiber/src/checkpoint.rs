//! Waveform dumps: 16-byte header (8-byte magic, little-endian u64 sample
//! count) followed by little-endian complex64 samples (f32 re, f32 im).

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{FiberError, Result};

pub const MAGIC: &[u8; 8] = b"PASWAVE1";

pub fn write_waveform<W: Write>(mut out: W, samples: &[Complex64]) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(samples.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        buf.extend_from_slice(&(s.re as f32).to_le_bytes());
        buf.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_waveform<R: Read>(mut input: R) -> Result<Vec<Complex64>> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(FiberError::BadCheckpoint("wrong magic".into()));
    }
    let len = u64::from_le_bytes(header[8..].try_into().expect("8 bytes")) as usize;
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    if data.len() != len * 8 {
        return Err(FiberError::BadCheckpoint(format!("expected {} payload bytes, found {}", len * 8, data.len())));
    }
    Ok(data
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes(c[..4].try_into().expect("4 bytes"));
            let im = f32::from_le_bytes(c[4..].try_into().expect("4 bytes"));
            Complex64::new(re as f64, im as f64)
        })
        .collect())
}

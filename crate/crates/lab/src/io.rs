//! Text formats for blocks exchanged with the command line.
//!
//! Bit blocks: one `0`/`1` string per line. Amplitude blocks: one block per
//! line, whitespace-separated integers. Symbols: CSV `re,im`, one symbol per
//! row, blocks back to back.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use pas_core::{AmplitudeBlock, BitBlock, EdiValue};
use pas_core::metrics::fmt_csv;

use crate::error::{LabError, Result};

fn lines<R: Read>(input: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

pub fn read_bit_blocks<R: Read>(input: R) -> Result<Vec<BitBlock>> {
    lines(input)?
        .iter()
        .enumerate()
        .map(|(i, l)| l.parse().map_err(|e| LabError::Config(format!("bit block {i}: {e}"))))
        .collect()
}

pub fn write_bit_blocks<W: Write>(out: W, blocks: &[BitBlock]) -> Result<()> {
    let mut out = BufWriter::new(out);
    for b in blocks {
        writeln!(out, "{b}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_amplitude_blocks<R: Read>(input: R) -> Result<Vec<AmplitudeBlock>> {
    lines(input)?
        .iter()
        .enumerate()
        .map(|(i, l)| l.parse().map_err(|e| LabError::Config(format!("amplitude block {i}: {e}"))))
        .collect()
}

pub fn write_amplitude_blocks<W: Write>(out: W, blocks: &[AmplitudeBlock]) -> Result<()> {
    let mut out = BufWriter::new(out);
    for b in blocks {
        writeln!(out, "{b}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_symbols<R: Read>(input: R) -> Result<Vec<Complex64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i == 0 && rec.get(0) == Some("re") {
            continue;
        }
        if rec.len() != 2 {
            return Err(LabError::Config(format!("symbol row {i}: expected `re,im`")));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| LabError::Config(format!("symbol row {i}: {e}")));
        out.push(Complex64::new(parse(&rec[0])?, parse(&rec[1])?));
    }
    Ok(out)
}

pub fn write_symbols<W: Write>(out: W, symbols: &[Complex64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im"])?;
    for s in symbols {
        w.write_record([s.re.to_string(), s.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `block_id,edi_linear,edi_db`.
pub fn write_edi_csv<W: Write>(out: W, values: &[EdiValue]) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "block_id,edi_linear,edi_db")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{},{}", fmt_csv(v.linear), fmt_csv(v.db()))?;
    }
    out.flush()?;
    Ok(())
}

/// Candidate chosen per block: `block_id,selected_i,selected_j,edi_db`.
pub fn write_selection_csv<W: Write>(out: W, rows: &[((usize, usize), EdiValue)]) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "block_id,selected_i,selected_j,edi_db")?;
    for (b, ((i, j), e)) in rows.iter().enumerate() {
        writeln!(out, "{b},{i},{j},{}", fmt_csv(e.db()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| LabError::Config(format!("cannot open {}: {e}", path.display())))
}

pub fn create(path: &Path) -> Result<std::fs::File> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_round_trip() {
        let bits = vec!["0101".parse::<BitBlock>().unwrap(), "11".parse().unwrap()];
        let mut buf = Vec::new();
        write_bit_blocks(&mut buf, &bits).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0101\n11\n");
        assert_eq!(read_bit_blocks(&buf[..]).unwrap(), bits);

        let amps = vec![AmplitudeBlock::new(vec![1, 3, 7]), AmplitudeBlock::new(vec![5])];
        let mut buf = Vec::new();
        write_amplitude_blocks(&mut buf, &amps).unwrap();
        assert_eq!(read_amplitude_blocks(&buf[..]).unwrap(), amps);

        let sym = vec![Complex64::new(0.1, -3.0), Complex64::new(1e-17, 2.5)];
        let mut buf = Vec::new();
        write_symbols(&mut buf, &sym).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("re,im\n"));
        assert_eq!(read_symbols(&buf[..]).unwrap(), sym);
        assert_eq!(read_symbols(&b"1,2\n3, 4\n"[..]).unwrap().len(), 2);
        assert!(read_symbols(&b"1,2,3\n"[..]).is_err());
        assert!(read_bit_blocks(&b"012\n"[..]).is_err());
    }
}

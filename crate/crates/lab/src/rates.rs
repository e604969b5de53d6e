//! Transmission-rate bookkeeping for PAS and uniform signaling.
//!
//! Per real dimension a PAS transmitter carries `R_s` shaped bits plus the
//! sign bits left over after parity, `1 - (1 - R_c) m`, with `m` label bits.
//! A uniform transmitter carries `m R_c`.

/// Total rate of PAS in bit/4D-symbol.
pub fn pas_total_rate(shaping_rate: f64, code_rate: f64, label_bits: usize) -> f64 {
    4.0 * (shaping_rate + 1.0 - (1.0 - code_rate) * label_bits as f64)
}

/// Total rate of uniform signaling in bit/4D-symbol.
pub fn uniform_total_rate(code_rate: f64, label_bits: usize) -> f64 {
    4.0 * label_bits as f64 * code_rate
}

/// Information rate in Gb/s, counting one 4D symbol per symbol period.
pub fn information_rate_gbps(total_rate_bit4d: f64, symbol_rate_gbd: f64) -> f64 {
    total_rate_bit4d * symbol_rate_gbd
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_table() {
        for (rs, r) in [(2.2, 9.6), (2.3, 10.0), (2.4, 10.4), (2.5, 10.8)] {
            assert!((pas_total_rate(rs, 0.8, 4) - r).abs() < 1e-12);
        }
        assert!((uniform_total_rate(0.6, 4) - 9.6).abs() < 1e-12);
        assert!((uniform_total_rate(2.0 / 3.0, 4) - 10.666_666_666_666_666).abs() < 1e-12);
        assert!((information_rate_gbps(9.6, 32.0) - 307.2).abs() < 1e-9);
    }
}

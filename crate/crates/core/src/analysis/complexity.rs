use crate::codec::{ComponentCode, CrcSpec};
use crate::{Error, Result};

/// XOR-count bounds of self-detection against CRC detection, and of CRC
/// detection against TPC decoding. Each pair is `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityReport {
    pub ns_mtx_bounds: (f64, f64),
    pub ns_lfsr_bounds: (f64, f64),
    pub nc: f64,
    pub cs_bounds: (f64, f64),
    pub n_hdd_bounds: (f64, f64),
    /// CRC relative to HIHO decoding.
    pub cch_bounds: (f64, f64),
    /// CRC relative to SISO decoding with `2^p` test patterns.
    pub ccs_bounds: (f64, f64),
}

/// Complexity with the payload `kappa = k^2 - l_crc` of the given CRC.
pub fn detection_complexity(code: &ComponentCode, crc: &CrcSpec, p: u32) -> Result<ComplexityReport> {
    let k = code.k();
    let kappa = (k * k)
        .checked_sub(crc.degree as usize)
        .ok_or_else(|| Error::param("CRC longer than the information block"))?;
    detection_complexity_with_payload(code, crc, p, kappa)
}

/// Complexity for an explicit payload size `kappa` protected by `crc`.
///
/// Self-detection checks between one and `k` rows (`x_hat` in `1..=k`).
pub fn detection_complexity_with_payload(
    code: &ComponentCode,
    crc: &CrcSpec,
    p: u32,
    kappa: usize,
) -> Result<ComplexityReport> {
    if kappa == 0 || p > 16 {
        return Err(Error::param("need kappa > 0 and p <= 16"));
    }
    let n = code.n() as f64;
    let k = code.k() as f64;
    let nu = code.nu() as f64;

    let per_row_lfsr = 0.5 * (2.0 * nu - 1.0) * k;
    let per_row_mtx: f64 = code
        .parity_check_row_weights()
        .iter()
        .map(|&w| w as f64 - 1.0)
        .sum();
    let nc = (2.0 * crc.nu_bar() as f64 - 1.0) * kappa as f64;

    let lambda = 1.0 / n;
    let log2 = n.log10().powi(2);
    let hdd_min = 45.0 * lambda * lambda * n * n * log2;
    let hdd_max = (45.0 * lambda + 4.0) * lambda * n * n * log2;
    let cch = (0.5 * nc / (n * hdd_max), 0.5 * nc / (n * hdd_min));
    let scale = f64::from(1u32 << p);

    Ok(ComplexityReport {
        ns_mtx_bounds: (per_row_mtx, k * per_row_mtx),
        ns_lfsr_bounds: (per_row_lfsr, k * per_row_lfsr),
        nc,
        cs_bounds: (per_row_lfsr / nc, k * per_row_lfsr / nc),
        n_hdd_bounds: (hdd_min, hdd_max),
        cch_bounds: cch,
        ccs_bounds: (cch.0 / scale, cch.1 / scale),
    })
}

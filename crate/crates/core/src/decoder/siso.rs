use crate::bits::SoftMatrix;
use crate::codec::{is_product_codeword, ComponentCode};
use crate::decoder::{chase2_component, finish, hard_slice, DecodeResult, OpCounters};
use crate::{Error, Result};

/// Per-half-iteration weights of the Chase-Pyndiah decoder. Entries past the
/// end of either list reuse the last value.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoSchedule {
    /// Weight of the extrinsic information added to the channel values.
    pub alpha: Vec<f64>,
    /// Reliability assigned to a bit when no competing codeword exists.
    pub beta: Vec<f64>,
}

impl Default for SisoSchedule {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0, 1.0],
            beta: vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0],
        }
    }
}

impl SisoSchedule {
    fn at(values: &[f64], half: usize) -> f64 {
        values[half.min(values.len() - 1)]
    }
}

/// Chase-Pyndiah iterative decoding with the default schedule.
pub fn siso_decode(code: &ComponentCode, soft: &SoftMatrix, max_iters: usize, p: usize) -> Result<DecodeResult> {
    siso_decode_with(code, soft, max_iters, p, &SisoSchedule::default())
}

/// Chase-Pyndiah iterative decoding.
///
/// Channel values are normalized to unit mean magnitude. In half-iteration
/// `h`, every row (even `h`) or column (odd `h`) is decoded by
/// [`chase2_component`] from `R + alpha[h] * W`, where `W` is the extrinsic
/// matrix of the previous half-iteration normalized to unit mean magnitude.
pub fn siso_decode_with(
    code: &ComponentCode,
    soft: &SoftMatrix,
    max_iters: usize,
    p: usize,
    schedule: &SisoSchedule,
) -> Result<DecodeResult> {
    if max_iters == 0 {
        return Err(Error::param("max_iters must be >= 1"));
    }
    if schedule.alpha.is_empty() || schedule.beta.is_empty() {
        return Err(Error::param("SISO schedule must not be empty"));
    }
    let n = code.n();
    if soft.size() != n {
        return Err(Error::param(format!("matrix is {}x{0}, code needs {n}x{n}", soft.size())));
    }

    let channel = normalized(soft.values());
    let mut extrinsic = vec![0.0f64; n * n];
    let mut next = vec![0.0f64; n * n];
    let mut decisions = hard_slice(soft);
    let mut ops = OpCounters::default();
    let mut halves = 0usize;
    let mut converged = false;
    let mut line = vec![0.0f64; n];

    loop {
        if is_product_codeword(code, &decisions) {
            converged = true;
            break;
        }
        if halves == 2 * max_iters {
            break;
        }
        let alpha = SisoSchedule::at(&schedule.alpha, halves);
        let beta = SisoSchedule::at(&schedule.beta, halves);
        let by_rows = halves % 2 == 0;
        for a in 0..n {
            for (b, slot) in line.iter_mut().enumerate() {
                let idx = index(n, by_rows, a, b);
                *slot = channel[idx] + alpha * extrinsic[idx];
            }
            let out = chase2_component(code, &line, p, beta)?;
            for b in 0..n {
                let idx = index(n, by_rows, a, b);
                next[idx] = out.extrinsic[b];
                let (r, c) = if by_rows { (a, b) } else { (b, a) };
                decisions.set(r, c, out.decision[b]);
            }
        }
        let scale = mean_abs(&next);
        if scale > 0.0 {
            next.iter_mut().for_each(|w| *w /= scale);
        }
        std::mem::swap(&mut extrinsic, &mut next);
        ops.hdd += (n as u64) << p;
        halves += 1;
    }
    Ok(finish(code, decisions, halves, converged, ops))
}

#[inline]
fn index(n: usize, by_rows: bool, a: usize, b: usize) -> usize {
    if by_rows {
        a * n + b
    } else {
        b * n + a
    }
}

fn mean_abs(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64
}

fn normalized(values: &[f64]) -> Vec<f64> {
    let scale = mean_abs(values);
    if scale > 0.0 {
        values.iter().map(|v| v / scale).collect()
    } else {
        values.to_vec()
    }
}

/// Soft image of a bit matrix with the given amplitude, for tests.
#[cfg(test)]
pub(crate) fn bpsk_matrix(bits: &crate::bits::BitMatrix, amplitude: f64) -> SoftMatrix {
    let v = bits.as_slice().iter().map(|&b| amplitude * (1.0 - 2.0 * b as f64)).collect();
    SoftMatrix::from_vec(bits.size(), v).unwrap()
}

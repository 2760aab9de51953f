use crate::bits::BitMatrix;
use crate::codec::{is_product_codeword, ComponentCode};
use crate::decoder::{finish, DecodeResult, OpCounters};
use crate::{Error, Result};

/// Hard-input hard-output iterative decoding: alternate row and column
/// half-iterations of single-error-correcting HDD until the matrix is a
/// product codeword or `max_iters` full iterations have run.
pub fn hiho_decode(code: &ComponentCode, hard: &BitMatrix, max_iters: usize) -> Result<DecodeResult> {
    if max_iters == 0 {
        return Err(Error::param("max_iters must be >= 1"));
    }
    let n = code.n();
    if hard.size() != n {
        return Err(Error::param(format!("matrix is {}x{0}, code needs {n}x{n}", hard.size())));
    }
    let mut m = hard.clone();
    let mut ops = OpCounters::default();
    let mut halves = 0usize;
    let mut converged = false;
    let mut column = vec![0u8; n];
    loop {
        if is_product_codeword(code, &m) {
            converged = true;
            break;
        }
        if halves == 2 * max_iters {
            break;
        }
        if halves % 2 == 0 {
            for r in 0..n {
                code.hdd_in_place(m.row_mut(r));
            }
        } else {
            for c in 0..n {
                for (r, slot) in column.iter_mut().enumerate() {
                    *slot = m.get(r, c);
                }
                code.hdd_in_place(&mut column);
                m.set_column(c, &column);
            }
        }
        ops.hdd += n as u64;
        halves += 1;
    }
    Ok(finish(code, m, halves, converged, ops))
}

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Subpacket error probability per transmission round over an SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerTable {
    /// Strictly ascending Eb/N0 points in dB.
    pub snr_grid_db: Vec<f64>,
    /// `per_round[i][g]`: PER of round `i + 1` at grid point `g`.
    pub per_round: Vec<Vec<f64>>,
    pub trials_per_point: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    snr_db: f64,
    round: usize,
    per: f64,
    trials: u64,
}

impl PerTable {
    pub fn new(snr_grid_db: Vec<f64>, per_round: Vec<Vec<f64>>, trials_per_point: Vec<u64>) -> Result<Self> {
        if snr_grid_db.is_empty() || per_round.is_empty() {
            return Err(Error::param("PER table needs at least one point and one round"));
        }
        if snr_grid_db.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("SNR grid must be strictly ascending"));
        }
        if trials_per_point.len() != snr_grid_db.len() {
            return Err(Error::param("one trial count per grid point expected"));
        }
        for row in &per_round {
            if row.len() != snr_grid_db.len() {
                return Err(Error::param("PER row length differs from the grid"));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::param("PER values must lie in [0, 1]"));
            }
        }
        Ok(Self {
            snr_grid_db,
            per_round,
            trials_per_point,
        })
    }

    pub fn rounds(&self) -> usize {
        self.per_round.len()
    }

    /// `(grid index, round index)` of cells where no error was observed.
    pub fn zero_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.per_round.iter().enumerate() {
            for (g, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    out.push((g, r));
                }
            }
        }
        out
    }

    /// CSV with header `snr_db,round,per,trials`, rounds numbered from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (g, &snr) in self.snr_grid_db.iter().enumerate() {
            for (r, row) in self.per_round.iter().enumerate() {
                w.serialize(Row {
                    snr_db: snr,
                    round: r + 1,
                    per: row[g],
                    trials: self.trials_per_point[g],
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows: Vec<Row> = Vec::new();
        for row in rdr.deserialize() {
            rows.push(row?);
        }
        let rounds = rows.iter().map(|r| r.round).max().unwrap_or(0);
        if rounds == 0 || rows.iter().any(|r| r.round == 0) {
            return Err(Error::param("PER CSV has no rounds or a round numbered 0"));
        }
        let mut grid: Vec<f64> = Vec::new();
        let mut trials = Vec::new();
        for r in &rows {
            if grid.last() != Some(&r.snr_db) {
                grid.push(r.snr_db);
                trials.push(r.trials);
            }
        }
        let mut per = vec![vec![f64::NAN; grid.len()]; rounds];
        for r in &rows {
            let g = grid.iter().position(|&s| s == r.snr_db).expect("grid built from rows");
            per[r.round - 1][g] = r.per;
        }
        if per.iter().flatten().any(|p| p.is_nan()) {
            return Err(Error::param("PER CSV misses some (snr, round) cells"));
        }
        Self::new(grid, per, trials)
    }
}

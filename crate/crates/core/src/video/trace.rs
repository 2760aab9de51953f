use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameType {
    I,
    P,
    B,
}

impl FrameType {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "I" | "i" => Some(Self::I),
            "P" | "p" => Some(Self::P),
            "B" | "b" => Some(Self::B),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: usize,
    pub kind: FrameType,
    pub size_bits: u64,
    pub psnr_db: Option<f64>,
    pub psnr_concealed_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VideoTrace {
    pub frames: Vec<Frame>,
    /// Playback rate in frames per second.
    pub fps: f64,
}

impl VideoTrace {
    pub fn new(frames: Vec<Frame>, fps: f64) -> Result<Self> {
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::param("fps must be positive"));
        }
        if frames.is_empty() {
            return Err(Error::param("trace has no frames"));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.index != i + 1 {
                return Err(Error::param(format!("frame indices must run 1, 2, ...; found {} at position {}", f.index, i + 1)));
            }
            if f.size_bits == 0 {
                return Err(Error::param(format!("frame {} has zero size", f.index)));
            }
        }
        Ok(Self { frames, fps })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.frames.iter().map(|f| f.size_bits).collect()
    }

    /// Mean source bit rate in bits per second.
    pub fn mean_bitrate(&self) -> f64 {
        let total: u64 = self.frames.iter().map(|f| f.size_bits).sum();
        total as f64 * self.fps / self.frames.len() as f64
    }

    /// Both PSNR columns are present for every frame.
    pub fn has_psnr(&self) -> bool {
        self.frames
            .iter()
            .all(|f| f.psnr_db.is_some() && f.psnr_concealed_db.is_some())
    }
}

pub fn load_trace(path: &Path, fps: f64) -> Result<VideoTrace> {
    let file = File::open(path)?;
    parse_trace(file, path, fps)
}

/// Parses `index,type,size_bits[,psnr_db,psnr_concealed_db]` with a header
/// row. `origin` only labels errors.
pub fn parse_trace<R: Read>(input: R, origin: &Path, fps: f64) -> Result<VideoTrace> {
    let fail = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let expected = ["index", "type", "size_bits", "psnr_db", "psnr_concealed_db"];
    if header.len() < 3 || header.len() > 5 || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(fail(1, format!("header must be a prefix of {}", expected.join(","))));
    }
    let mut frames: Vec<Frame> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| fail(line, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(fail(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let index: usize = rec[0].parse().map_err(|_| fail(line, format!("bad index {:?}", &rec[0])))?;
        let kind = FrameType::parse(&rec[1]).ok_or_else(|| fail(line, format!("unknown frame type {:?}", &rec[1])))?;
        let size: i64 = rec[2].parse().map_err(|_| fail(line, format!("bad size {:?}", &rec[2])))?;
        if size <= 0 {
            return Err(fail(line, format!("frame size must be positive, got {size}")));
        }
        let psnr = |col: usize| -> Result<Option<f64>> {
            match rec.get(col) {
                None | Some("") => Ok(None),
                Some(v) => v
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| fail(line, format!("bad PSNR {v:?}"))),
            }
        };
        if frames.iter().any(|f| f.index == index) {
            return Err(fail(line, format!("duplicate frame index {index}")));
        }
        frames.push(Frame {
            index,
            kind,
            size_bits: size as u64,
            psnr_db: psnr(3)?,
            psnr_concealed_db: psnr(4)?,
        });
    }
    let line_of = |pos: usize| pos + 2;
    for (pos, f) in frames.iter().enumerate() {
        if f.index != pos + 1 {
            return Err(fail(line_of(pos), format!("frame index {} out of order, expected {}", f.index, pos + 1)));
        }
    }
    VideoTrace::new(frames, fps)
}

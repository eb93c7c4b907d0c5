//! Bitwise majority alignment, block-wise reconstruction from segmented
//! traces, and the whole-sequence coded-BMA baseline.

use std::cmp::Ordering;

use rand::Rng;

use crate::code::max_run_length;
use crate::delimiter::{delimiter_layout, realign_segments, segment_trace};
use crate::error::CodeError;
use crate::model::{BitString, CodeParams, Trace};

/// Rows of one block, each implicitly padded with PAD up to `width`.
#[derive(Debug, Clone)]
pub struct BlockMatrix<'a> {
    width: usize,
    rows: Vec<&'a [u8]>,
}

impl<'a> BlockMatrix<'a> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    /// Adds a row; bits beyond `width` are dropped.
    pub fn push_row(&mut self, row: &'a [u8]) {
        self.rows.push(&row[..row.len().min(self.width)]);
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Symbol at `(row, col)`; `None` is PAD.
    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        self.rows[row].get(col).copied()
    }
}

/// Bitwise majority alignment.
///
/// Each row keeps a cursor. At every output position, rows whose cursor is on
/// a real symbol vote; the majority bit is emitted, and exactly the rows whose
/// current symbol equals it advance. A tie repeats the previous output bit
/// (0 at the first position); a position where every row abstains emits 0.
///
/// A split vote usually means some rows have run ahead past a deleted bit of
/// the current run, so continuing the run is the better guess.
pub fn bma(matrix: &BlockMatrix<'_>) -> BitString {
    let mut cursors = vec![0usize; matrix.rows.len()];
    let mut out = BitString::zeros(matrix.width);
    for i in 0..matrix.width {
        let mut votes = [0usize; 2];
        for (row, &q) in matrix.rows.iter().zip(&cursors) {
            if let Some(&b) = row.get(q) {
                votes[b as usize] += 1;
            }
        }
        let b = match votes[1].cmp(&votes[0]) {
            Ordering::Greater => 1,
            Ordering::Less => 0,
            Ordering::Equal if votes[0] > 0 && i > 0 => out.get(i - 1).unwrap_or(0),
            Ordering::Equal => 0,
        };
        out.set(i, b);
        for (row, q) in matrix.rows.iter().zip(cursors.iter_mut()) {
            if row.get(*q) == Some(&b) {
                *q += 1;
            }
        }
    }
    out
}

/// Reconstruction output with decoder-side diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub estimate: BitString,
    /// Traces whose segmentation failed, needed a boundary moved, or shows a
    /// block with more deletions than the delimiters can detect.
    pub segmentation_failures: usize,
    /// Blocks for which no trace supplied a row.
    pub empty_blocks: usize,
}

/// Segments every trace with the delimiters, realigns boundaries that
/// betray an overloaded block, runs BMA per block, and concatenates the
/// blocks.
///
/// A trace whose segmentation fails at block `m` contributes rows only to
/// blocks before `m`. A block without rows is filled with its delimiter bits
/// and zeros.
pub fn reconstruct_ours(traces: &[Trace], params: &CodeParams) -> Reconstruction {
    let layout = &params.layout;
    let mut segmentation_failures = 0;
    let segmentations: Vec<_> = traces
        .iter()
        .map(|y| {
            let mut seg = segment_trace(y, layout);
            let moved = realign_segments(y, layout, &mut seg);
            let overloaded = seg.segments.iter().any(|s| s.deletions > layout.detect_cap);
            if moved > 0 || overloaded || !seg.is_success() {
                segmentation_failures += 1;
            }
            seg
        })
        .collect();
    let mut fallback: Option<Vec<Option<u8>>> = None;
    let mut estimate = BitString::new();
    let mut empty_blocks = 0;

    for m in 0..layout.num_blocks {
        let width = layout.block_len(m);
        let mut matrix = BlockMatrix::new(width);
        for (y, seg) in traces.iter().zip(&segmentations) {
            if let Some(s) = seg.segments.get(m) {
                matrix.push_row(y.bits.slice(s.start, s.len));
            }
        }
        if matrix.num_rows() == 0 {
            empty_blocks += 1;
            let mask = fallback.get_or_insert_with(|| delimiter_layout(layout).mask(layout.n));
            let start = layout.block_start(m);
            for fixed in &mask[start..start + width] {
                estimate.push(fixed.unwrap_or(0));
            }
        } else {
            estimate.extend_from_slice(bma(&matrix).as_slice());
        }
    }

    Reconstruction {
        estimate,
        segmentation_failures,
        empty_blocks,
    }
}

/// Whole-sequence BMA over traces padded to length `n`.
pub fn reconstruct_coded_bma(traces: &[Trace], n: usize) -> BitString {
    let mut matrix = BlockMatrix::new(n);
    for y in traces {
        matrix.push_row(y.bits.as_slice());
    }
    bma(&matrix)
}

/// Uniform member of the length-`n` strings with runs at most `max_run`, by
/// rejection.
pub fn sample_rll_sequence<R: Rng + ?Sized>(
    n: usize,
    max_run: usize,
    rng: &mut R,
    retry_limit: u64,
) -> Result<BitString, CodeError> {
    let mut bits = vec![0u8; n];
    for _ in 0..retry_limit {
        bits.iter_mut().for_each(|b| *b = rng.gen::<bool>() as u8);
        if max_run_length(&bits) <= max_run {
            return Ok(BitString::from_bits(bits).expect("binary"));
        }
    }
    Err(CodeError::SamplerExhausted { attempts: retry_limit })
}

//! Deletion-detecting delimiter code.
//!
//! Every block except the last ends with `detect_cap` ones, and every block
//! except the first starts with `detect_cap + 1` zeros. When each block of a
//! codeword loses at most `detect_cap` bits, the receiver can read off the
//! exact per-block deletion counts, and hence the block boundaries, from the
//! bits that land on the last `detect_cap` positions of each nominal block.

use crate::model::{BitString, BlockLayout, Trace};

/// The fixed positions of the delimiter code, as `(0-based index, bit)` pairs
/// in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelimiterLayout {
    pub positions: Vec<(usize, u8)>,
}

impl DelimiterLayout {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Per-position mask: `Some(bit)` where fixed, `None` where free.
    pub fn mask(&self, n: usize) -> Vec<Option<u8>> {
        let mut mask = vec![None; n];
        for &(i, b) in &self.positions {
            mask[i] = Some(b);
        }
        mask
    }
}

pub fn delimiter_layout(layout: &BlockLayout) -> DelimiterLayout {
    let cap = layout.detect_cap;
    let mut positions = Vec::with_capacity(layout.fixed_count());
    for m in 0..layout.num_blocks {
        let start = layout.block_start(m);
        if m > 0 {
            positions.extend((start..start + cap + 1).map(|i| (i, 0)));
        }
        if m + 1 < layout.num_blocks {
            let end = start + layout.ell;
            positions.extend((end - cap..end).map(|i| (i, 1)));
        }
    }
    DelimiterLayout { positions }
}

/// Iterates the delimiter positions without allocating.
fn for_each_fixed(layout: &BlockLayout, mut f: impl FnMut(usize, u8)) {
    let cap = layout.detect_cap;
    for m in 0..layout.num_blocks {
        let start = layout.block_start(m);
        if m > 0 {
            (start..start + cap + 1).for_each(|i| f(i, 0));
        }
        if m + 1 < layout.num_blocks {
            let end = start + layout.ell;
            (end - cap..end).for_each(|i| f(i, 1));
        }
    }
}

/// Overwrites every delimiter position of `x` with its fixed bit.
pub fn stamp(x: &BitString, layout: &BlockLayout) -> BitString {
    assert_eq!(x.len(), layout.n, "codeword length mismatch");
    let mut out = x.clone();
    for_each_fixed(layout, |i, b| out.set(i, b));
    out
}

pub fn is_member_d(x: &BitString, layout: &BlockLayout) -> bool {
    if x.len() != layout.n {
        return false;
    }
    let bits = x.as_slice();
    let mut ok = true;
    for_each_fixed(layout, |i, b| ok &= bits[i] == b);
    ok
}

/// Positions not fixed by the delimiters, in increasing order.
pub fn free_positions(layout: &BlockLayout) -> Vec<usize> {
    let mask = delimiter_layout(layout).mask(layout.n);
    mask.iter()
        .enumerate()
        .filter_map(|(i, m)| m.is_none().then_some(i))
        .collect()
}

/// One block's share of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    /// 0-based offset into the trace.
    pub start: usize,
    pub len: usize,
    /// Detected number of deletions in this block.
    pub deletions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentStatus {
    Success,
    /// Segmentation broke down at this 0-based block; earlier segments are kept.
    FailedAtBlock(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    /// On success one segment per block; on failure the segments of the
    /// blocks before the failing one.
    pub segments: Vec<Segment>,
    pub status: SegmentStatus,
}

impl Segmentation {
    pub fn is_success(&self) -> bool {
        self.status == SegmentStatus::Success
    }

    /// Number of blocks with a usable segment.
    pub fn usable_blocks(&self) -> usize {
        self.segments.len()
    }

    pub fn deletion_counts(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.deletions).collect()
    }
}

/// Splits a trace into per-block segments using the delimiter bits.
///
/// For every block but the last, the residual trace is inspected at relative
/// positions `ell - cap .. ell` (0-based). The run of ones starting there, of
/// length `r` (at most `cap`), means `cap - r` deletions hit the block. The
/// run must either fill the window or be terminated by a bit present in the
/// trace; a run cut short by the end of the trace is a failure. The last block
/// takes whatever remains.
pub fn segment_trace(trace: &Trace, layout: &BlockLayout) -> Segmentation {
    segment_counting(trace.bits.as_slice(), layout, &mut 0)
}

/// As [`segment_trace`], additionally returning the number of trace bits read.
#[doc(hidden)]
pub fn segment_trace_probe(trace: &Trace, layout: &BlockLayout) -> (Segmentation, usize) {
    let mut reads = 0;
    let seg = segment_counting(trace.bits.as_slice(), layout, &mut reads);
    (seg, reads)
}

/// Checks the boundary at the start of segment `m` against the delimiter
/// structure on both of its sides.
///
/// With at most `cap` deletions per block, a segment declaring `d` deletions
/// begins with at least `cap + 1 - d` zeros, and when `d >= 1` the bit before
/// it is a surviving suffix one of the previous block. A previous block with
/// more than `cap` deletions is segmented too long and swallows leading zeros
/// of this block, which the second condition catches. A correct boundary is
/// rejected only when every suffix one of the previous block was deleted and
/// the data bit before them is 0.
pub fn boundary_consistent(bits: &[u8], layout: &BlockLayout, segments: &[Segment], m: usize) -> bool {
    if m == 0 {
        return true;
    }
    let seg = segments[m];
    let zeros = (layout.detect_cap + 1).saturating_sub(seg.deletions);
    if seg.len < zeros || bits[seg.start..seg.start + zeros].iter().any(|&b| b != 0) {
        return false;
    }
    seg.deletions == 0 || bits[seg.start - 1] == 1
}

/// Moves every boundary that fails [`boundary_consistent`] back over the
/// zeros before it, to just after the previous one bit, and recomputes the
/// affected lengths and deletion counts. Returns the number of boundaries
/// moved.
///
/// This recovers the true boundary after a block with more than `cap`
/// deletions, as long as the swallowed bits are all leading zeros of the next
/// block and a suffix one of the overloaded block survived.
pub fn realign_segments(trace: &Trace, layout: &BlockLayout, seg: &mut Segmentation) -> usize {
    let bits = trace.bits.as_slice();
    let segs = &mut seg.segments;
    let mut moved = 0;
    for m in 1..segs.len() {
        if boundary_consistent(bits, layout, segs, m) {
            continue;
        }
        let floor = segs[m - 1].start + 1;
        let mut start = segs[m].start;
        while start > floor && bits[start - 1] == 0 {
            start -= 1;
        }
        if start == segs[m].start {
            continue;
        }
        let end = segs[m].start + segs[m].len;
        segs[m - 1].len = start - segs[m - 1].start;
        segs[m - 1].deletions = layout.block_len(m - 1).saturating_sub(segs[m - 1].len);
        segs[m].start = start;
        segs[m].len = end - start;
        segs[m].deletions = layout.block_len(m).saturating_sub(segs[m].len);
        moved += 1;
    }
    moved
}

fn segment_counting(bits: &[u8], layout: &BlockLayout, reads: &mut usize) -> Segmentation {
    let ell = layout.ell;
    let cap = layout.detect_cap;
    let mut segments = Vec::with_capacity(layout.num_blocks);
    let mut start = 0;

    for m in 0..layout.num_blocks - 1 {
        let window = start + ell - cap;
        let mut run = 0;
        let mut terminated = false;
        while run < cap {
            match bits.get(window + run) {
                Some(&b) => {
                    *reads += 1;
                    if b == 1 {
                        run += 1;
                    } else {
                        terminated = true;
                        break;
                    }
                }
                None => break,
            }
        }
        if run < cap && !terminated {
            return Segmentation {
                segments,
                status: SegmentStatus::FailedAtBlock(m),
            };
        }
        let deletions = cap - run;
        let len = ell - deletions;
        segments.push(Segment { start, len, deletions });
        start += len;
    }

    let remainder = bits.len().saturating_sub(start);
    let last = layout.num_blocks - 1;
    if start > bits.len() || remainder > layout.last_block_len {
        return Segmentation {
            segments,
            status: SegmentStatus::FailedAtBlock(last),
        };
    }
    segments.push(Segment {
        start,
        len: remainder,
        deletions: layout.last_block_len - remainder,
    });
    Segmentation {
        segments,
        status: SegmentStatus::Success,
    }
}

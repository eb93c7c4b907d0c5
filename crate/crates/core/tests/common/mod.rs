//! Oracles shared by the integration tests. Each one restates a definition
//! directly, without reusing library internals.

#![allow(dead_code)]

use rand::Rng;
use tracecode::{stamp, BitString, BlockLayout, Trace};

/// Levenshtein distance straight from the recursive definition, memoized.
pub fn levenshtein_recursive(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut [Option<usize>], w: usize) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(v) = memo[i * w + j] {
            return v;
        }
        let v = (go(a, b, i - 1, j, memo, w) + 1)
            .min(go(a, b, i, j - 1, memo, w) + 1)
            .min(go(a, b, i - 1, j - 1, memo, w) + usize::from(a[i - 1] != b[j - 1]));
        memo[i * w + j] = Some(v);
        v
    }
    let w = b.len() + 1;
    let mut memo = vec![None; (a.len() + 1) * w];
    go(a, b, a.len(), b.len(), &mut memo, w)
}

/// Per-block deletion counts found by eliminating hypotheses: for each block
/// but the last, the unique `d` in `0..=cap` whose implied window holds ones at
/// relative positions `ell-cap .. ell-d` and, for `d >= 1`, a zero at `ell-d`.
/// `None` when some block has no unique consistent hypothesis or the
/// remainder does not fit the last block.
pub fn hypothesis_oracle(bits: &[u8], layout: &BlockLayout) -> Option<Vec<usize>> {
    let (ell, cap) = (layout.ell, layout.detect_cap);
    let mut start = 0;
    let mut counts = Vec::new();
    for _ in 0..layout.num_blocks - 1 {
        let consistent: Vec<usize> = (0..=cap)
            .filter(|&d| {
                let ones = (ell - cap..ell - d).all(|i| bits.get(start + i) == Some(&1));
                ones && (d == 0 || bits.get(start + ell - d) == Some(&0))
            })
            .collect();
        let [d] = consistent[..] else { return None };
        counts.push(d);
        start += ell - d;
    }
    let remainder = bits.len().checked_sub(start)?;
    counts.push(layout.last_block_len.checked_sub(remainder)?);
    Some(counts)
}

/// Every subset of `0..len` with at most `max` elements, as sorted index lists.
pub fn small_subsets(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let from = s.last().map_or(0, |&l: &usize| l + 1);
            for i in from..len {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// `x` with the given positions removed.
pub fn delete(x: &[u8], positions: &[usize]) -> Vec<u8> {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !positions.contains(i))
        .map(|(_, &b)| b)
        .collect()
}

/// A uniformly random member of the delimiter code.
pub fn random_member<R: Rng>(layout: &BlockLayout, rng: &mut R) -> BitString {
    stamp(&BitString::from_bools((0..layout.n).map(|_| rng.gen())), layout)
}

pub fn trace_of(bits: Vec<u8>, n: usize) -> Trace {
    Trace::new(BitString::from_bits(bits).expect("binary"), n)
}

/// Whether `y` embeds into `x` as a subsequence (greedy matching).
pub fn is_subsequence(y: &[u8], x: &[u8]) -> bool {
    let mut it = x.iter();
    y.iter().all(|b| it.any(|c| c == b))
}

//! Shared domain types: bit strings, traces, code parameters and the
//! bit-sequence text format.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Which parameter constraint was violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("codeword length n={0} is too small (need n >= 4)")]
    LengthTooSmall(usize),
    #[error("k={0} must be a finite real > 1")]
    InvalidK(f64),
    #[error("alpha={0} must lie in (0.5, 1]")]
    InvalidAlpha(f64),
    #[error("delta={0} must be >= 2")]
    InvalidDelta(usize),
    #[error("deletion probability p={0} must lie in (0, 0.5)")]
    ProbabilityOutOfRange(f64),
    #[error("block length ell={ell} must exceed delta^2={}", delta * delta)]
    BlockNotLongerThanDeltaSquared { ell: usize, delta: usize },
    #[error("block length ell={ell} exceeds n/2 (n={n})")]
    BlockTooLong { ell: usize, n: usize },
    #[error("block length ell={ell} must exceed twice the detection capability {detect_cap}")]
    DelimiterTooWide { ell: usize, detect_cap: usize },
    #[error("detection capability must be >= 1")]
    ZeroDetectCap,
    #[error("last block has {last_block_len} bits, fewer than its {needed} delimiter zeros")]
    LastBlockTooShort { last_block_len: usize, needed: usize },
}

/// A character outside `{0, 1, whitespace}` in bit-sequence text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid character {found:?} at position {position}")]
pub struct FormatError {
    /// 1-based character position within the parsed text.
    pub position: usize,
    pub found: char,
}

/// A format error located within a multi-line sequence file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct SequenceFileError {
    pub line: usize,
    #[source]
    pub source: FormatError,
}

/// A finite binary sequence. Every stored symbol is 0 or 1.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Builds a bit string from symbols, rejecting anything other than 0/1.
    pub fn from_bits(bits: Vec<u8>) -> Option<Self> {
        bits.iter().all(|&b| b <= 1).then_some(Self(bits))
    }

    /// Builds from any integers, mapping nonzero to 1.
    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.0.get(i).copied()
    }

    /// Sets bit `i`; any nonzero value stores 1.
    pub fn set(&mut self, i: usize, bit: u8) {
        self.0[i] = u8::from(bit != 0);
    }

    pub fn push(&mut self, bit: u8) {
        self.0.push(u8::from(bit != 0));
    }

    pub fn extend_from_slice(&mut self, bits: &[u8]) {
        self.0.extend(bits.iter().map(|&b| u8::from(b != 0)));
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Bits `[start, start + len)`, clamped to the string length.
    pub fn slice(&self, start: usize, len: usize) -> &[u8] {
        let start = start.min(self.0.len());
        let end = start.saturating_add(len).min(self.0.len());
        &self.0[start..end]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bitstring(self))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", format_bitstring(self))
    }
}

impl FromStr for BitString {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bitstring(s)
    }
}

impl From<BitString> for Vec<u8> {
    fn from(b: BitString) -> Self {
        b.0
    }
}

/// Output of one deletion channel: a subsequence of a length-`origin_len` input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub bits: BitString,
    pub origin_len: usize,
}

impl Trace {
    pub fn new(bits: BitString, origin_len: usize) -> Self {
        debug_assert!(bits.len() <= origin_len);
        Self { bits, origin_len }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn deletions(&self) -> usize {
        self.origin_len - self.bits.len()
    }
}

/// Block geometry of the delimiter code: `num_blocks` blocks of length `ell`
/// (the last one possibly shorter), each able to report up to `detect_cap`
/// deletions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockLayout {
    pub n: usize,
    pub ell: usize,
    pub detect_cap: usize,
    pub num_blocks: usize,
    pub last_block_len: usize,
}

impl BlockLayout {
    /// Requires `2 * detect_cap < ell <= n / 2` and a last block long enough to
    /// hold its `detect_cap + 1` leading zeros.
    pub fn new(n: usize, ell: usize, detect_cap: usize) -> Result<Self, ParamError> {
        if detect_cap == 0 {
            return Err(ParamError::ZeroDetectCap);
        }
        if 2 * detect_cap >= ell {
            return Err(ParamError::DelimiterTooWide { ell, detect_cap });
        }
        if 2 * ell > n {
            return Err(ParamError::BlockTooLong { ell, n });
        }
        let num_blocks = n.div_ceil(ell);
        let last_block_len = n - (num_blocks - 1) * ell;
        if last_block_len < detect_cap + 1 {
            return Err(ParamError::LastBlockTooShort {
                last_block_len,
                needed: detect_cap + 1,
            });
        }
        Ok(Self {
            n,
            ell,
            detect_cap,
            num_blocks,
            last_block_len,
        })
    }

    /// Nominal length of block `m` (0-based).
    pub fn block_len(&self, m: usize) -> usize {
        if m + 1 == self.num_blocks {
            self.last_block_len
        } else {
            self.ell
        }
    }

    /// Offset of block `m` (0-based) in the codeword.
    pub fn block_start(&self, m: usize) -> usize {
        m * self.ell
    }

    /// Number of positions fixed by the delimiters.
    pub fn fixed_count(&self) -> usize {
        (2 * self.detect_cap + 1) * (self.num_blocks - 1)
    }

    pub fn free_count(&self) -> usize {
        self.n - self.fixed_count()
    }
}

/// Parameters of the trace-reconstruction code for deletion probability
/// `p = k / n^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    pub n: usize,
    pub k: f64,
    pub alpha: f64,
    /// Code parameter; each block detects up to `delta - 1` deletions.
    pub delta: usize,
    pub p: f64,
    pub layout: BlockLayout,
}

impl CodeParams {
    pub fn ell(&self) -> usize {
        self.layout.ell
    }

    pub fn detect_cap(&self) -> usize {
        self.layout.detect_cap
    }

    pub fn num_blocks(&self) -> usize {
        self.layout.num_blocks
    }

    pub fn last_block_len(&self) -> usize {
        self.layout.last_block_len
    }

    /// Run-length bound `floor(sqrt(ell))`.
    pub fn max_run(&self) -> usize {
        isqrt(self.layout.ell)
    }
}

/// Derives the block layout for `p = k / n^alpha`, with `ell = floor(1/p)`.
pub fn derive_params(n: usize, k: f64, alpha: f64, delta: usize) -> Result<CodeParams, ParamError> {
    if n < 4 {
        return Err(ParamError::LengthTooSmall(n));
    }
    if !(k.is_finite() && k > 1.0) {
        return Err(ParamError::InvalidK(k));
    }
    if !(alpha > 0.5 && alpha <= 1.0) {
        return Err(ParamError::InvalidAlpha(alpha));
    }
    if delta < 2 {
        return Err(ParamError::InvalidDelta(delta));
    }
    let n_pow = (n as f64).powf(alpha);
    let p = k / n_pow;
    if !(p > 0.0 && p < 0.5) {
        return Err(ParamError::ProbabilityOutOfRange(p));
    }
    let ell = inverse_probability_floor(n, k, alpha);
    if ell <= delta * delta {
        return Err(ParamError::BlockNotLongerThanDeltaSquared { ell, delta });
    }
    let layout = BlockLayout::new(n, ell, delta - 1)?;
    Ok(CodeParams {
        n,
        k,
        alpha,
        delta,
        p,
        layout,
    })
}

/// `floor(n^alpha / k)`. Exact when `k` is an integer and `alpha = a/b` has a
/// small denominator and the powers fit in `u128`; otherwise floating point
/// with a nudge for values within 1e-9 of an integer.
fn inverse_probability_floor(n: usize, k: f64, alpha: f64) -> usize {
    let x = (n as f64).powf(alpha) / k;
    let mut candidate = x.floor();
    if x - candidate > 1.0 - 1e-9 {
        candidate += 1.0;
    }
    let candidate = candidate as usize;

    let Some((num, den)) = small_rational(alpha) else {
        return candidate;
    };
    if k.fract() != 0.0 || k > u32::MAX as f64 {
        return candidate;
    }
    let k = k as u128;
    let Some(rhs) = (n as u128).checked_pow(num) else {
        return candidate;
    };
    // (L k)^den <= n^num  <=>  L <= n^(num/den) / k
    let fits = |l: usize| -> Option<bool> {
        let lhs = (l as u128).checked_mul(k)?.checked_pow(den)?;
        Some(lhs <= rhs)
    };
    let mut ell = candidate;
    // The float estimate is within one of the exact answer; settle it exactly.
    loop {
        match fits(ell + 1) {
            Some(true) => ell += 1,
            Some(false) => break,
            None => return candidate,
        }
    }
    while ell > 0 {
        match fits(ell) {
            Some(true) => break,
            Some(false) => ell -= 1,
            None => return candidate,
        }
    }
    ell
}

fn small_rational(x: f64) -> Option<(u32, u32)> {
    (1..=16u32).find_map(|den| {
        let num = x * den as f64;
        let rounded = num.round();
        ((num - rounded).abs() < 1e-12 && rounded >= 0.0).then_some((rounded as u32, den))
    })
}

/// Integer square root.
pub fn isqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Checks the block-count sandwich
/// `k n^(1-a) - 1 <= ceil(n/ell) - 1 < 2k n^(1-a)` and
/// `k n^(1-a) <= ceil(n/ell) < (2k+1) n^(1-a)`.
pub fn claim1_bounds_hold(params: &CodeParams) -> bool {
    let scale = params.k * (params.n as f64).powf(1.0 - params.alpha);
    let blocks = params.layout.num_blocks as f64;
    // slack for the rounding in n^(1-alpha); blocks is an exact integer
    let eps = 1e-9 * scale.max(1.0);
    scale - 1.0 <= blocks - 1.0 + eps
        && blocks - 1.0 < 2.0 * scale
        && scale <= blocks + eps
        && blocks < (2.0 * params.k + 1.0) * (params.n as f64).powf(1.0 - params.alpha)
}

/// Parses '0'/'1' characters, skipping whitespace.
pub fn parse_bitstring(text: &str) -> Result<BitString, FormatError> {
    let mut bits = Vec::with_capacity(text.len());
    for (i, c) in text.chars().enumerate() {
        match c {
            '0' => bits.push(0),
            '1' => bits.push(1),
            c if c.is_whitespace() => {}
            found => return Err(FormatError { position: i + 1, found }),
        }
    }
    Ok(BitString(bits))
}

pub fn format_bitstring(bits: &BitString) -> String {
    bits.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Reads a sequence file: one sequence per line, `#` lines ignored. An empty
/// line is an empty sequence (a fully deleted trace).
pub fn read_sequences(text: &str) -> Result<Vec<BitString>, SequenceFileError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim_start().starts_with('#'))
        .map(|(i, line)| parse_bitstring(line).map_err(|source| SequenceFileError { line: i + 1, source }))
        .collect()
}

/// Writes sequences one per line with a trailing newline.
pub fn write_sequences<'a, I: IntoIterator<Item = &'a BitString>>(seqs: I) -> String {
    let mut out = String::new();
    for s in seqs {
        out.push_str(&format_bitstring(s));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn n994_k14_parameters() {
        let params = derive_params(994, 14.0, 1.0, 3).unwrap();
        assert_eq!(params.ell(), 71);
        assert_eq!(params.num_blocks(), 14);
        assert_eq!(params.last_block_len(), 71);
        assert_eq!(params.detect_cap(), 2);
        assert!((params.p - 14.0 / 994.0).abs() < 1e-15);
    }

    #[test]
    fn round_numbers() {
        let params = derive_params(1000, 10.0, 1.0, 3).unwrap();
        assert_eq!(params.ell(), 100);
        assert_eq!(params.num_blocks(), 10);
        assert!((params.p - 0.01).abs() < 1e-15);
    }

    #[test]
    fn fractional_alpha_uses_exact_floor() {
        // 1000^0.75 = 177.827..., / 10 = 17.78...; oracle: largest L with (10 L)^4 <= 1000^3
        let oracle = (1..1000u128)
            .take_while(|l| (10 * l).pow(4) <= 1000u128.pow(3))
            .last()
            .unwrap() as usize;
        assert_eq!(oracle, 17);
        let params = derive_params(1000, 10.0, 0.75, 3).unwrap();
        assert_eq!(params.ell(), oracle);
        assert_eq!(params.num_blocks(), 1000usize.div_ceil(17));
        assert_eq!(params.last_block_len(), 1000 - 58 * 17);
        assert!(claim1_bounds_hold(&params));
    }

    #[test]
    fn exact_floor_at_integer_boundary() {
        // 10000^0.5 / 4 = 25 exactly
        assert_eq!(inverse_probability_floor(10000, 4.0, 0.5), 25);
        // 4096^0.75 = 512; 512 / 8 = 64
        assert_eq!(inverse_probability_floor(4096, 8.0, 0.75), 64);
        assert_eq!(inverse_probability_floor(994, 14.0, 1.0), 71);
        assert_eq!(inverse_probability_floor(993, 14.0, 1.0), 70);
    }

    #[test]
    fn rejects_each_constraint() {
        assert_eq!(derive_params(3, 2.0, 1.0, 2), Err(ParamError::LengthTooSmall(3)));
        assert!(matches!(derive_params(100, 1.0, 1.0, 2), Err(ParamError::InvalidK(_))));
        assert!(matches!(
            derive_params(100, 2.0, 0.5, 2),
            Err(ParamError::InvalidAlpha(_))
        ));
        assert_eq!(derive_params(100, 2.0, 1.0, 1), Err(ParamError::InvalidDelta(1)));
        assert!(matches!(
            derive_params(100, 60.0, 1.0, 2),
            Err(ParamError::ProbabilityOutOfRange(_))
        ));
        assert_eq!(
            derive_params(100, 10.0, 1.0, 4),
            Err(ParamError::BlockNotLongerThanDeltaSquared { ell: 10, delta: 4 })
        );
        assert_eq!(
            derive_params(100, 1.5, 1.0, 2),
            Err(ParamError::BlockTooLong { ell: 66, n: 100 })
        );
        assert_eq!(
            BlockLayout::new(20, 4, 2),
            Err(ParamError::DelimiterTooWide { ell: 4, detect_cap: 2 })
        );
        assert_eq!(
            BlockLayout::new(21, 10, 2),
            Err(ParamError::LastBlockTooShort {
                last_block_len: 1,
                needed: 3
            })
        );
    }

    #[test]
    fn claim1_examples() {
        assert!(claim1_bounds_hold(&derive_params(1000, 10.0, 1.0, 3).unwrap()));
        assert!(claim1_bounds_hold(&derive_params(994, 14.0, 1.0, 3).unwrap()));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_bitstring("0101").unwrap().as_slice(), &[0, 1, 0, 1]);
        assert!(parse_bitstring("").unwrap().is_empty());
        assert_eq!(
            parse_bitstring("01x"),
            Err(FormatError {
                position: 3,
                found: 'x'
            })
        );
        assert_eq!(parse_bitstring(" 0 1\t1\n").unwrap().as_slice(), &[0, 1, 1]);
    }

    #[test]
    fn sequence_file_skips_comments() {
        let seqs = read_sequences("# header\n0101\n\n11\n").unwrap();
        assert_eq!(seqs.len(), 3);
        assert!(seqs[1].is_empty());
        let err = read_sequences("01\n# c\n0a").unwrap_err();
        assert_eq!(err.line, 3);
        assert_eq!(err.source.position, 2);
    }

    #[test]
    fn isqrt_matches_float() {
        for x in 0..10_000 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x);
        }
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(bits in proptest::collection::vec(0u8..2, 0..200)) {
            let b = BitString::from_bits(bits).unwrap();
            prop_assert_eq!(parse_bitstring(&format_bitstring(&b)).unwrap(), b);
        }

        #[test]
        fn derive_is_deterministic_and_consistent(
            n in 100usize..5000,
            k in 2u32..20,
            alpha in 0.55f64..=1.0,
            delta in 2usize..5,
        ) {
            if let Ok(a) = derive_params(n, k as f64, alpha, delta) {
                let b = derive_params(n, k as f64, alpha, delta).unwrap();
                prop_assert_eq!(a, b);
                let l = a.layout;
                prop_assert!(a.p > 0.0 && a.p < 0.5);
                prop_assert!(l.ell > delta * delta);
                prop_assert!(2 * l.detect_cap < l.ell && 2 * l.ell <= n);
                prop_assert!(l.last_block_len >= 1 && l.last_block_len <= l.ell);
                prop_assert_eq!((l.num_blocks - 1) * l.ell + l.last_block_len, n);
                prop_assert!(claim1_bounds_hold(&a));
            }
        }
    }
}

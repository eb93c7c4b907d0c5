//! The trace-reconstruction code: delimiter code intersected with a global
//! run-length limit of `floor(sqrt(ell))`.

use rand::Rng;

use crate::delimiter::{delimiter_layout, free_positions, is_member_d, stamp};
use crate::error::CodeError;
use crate::model::{BitString, CodeParams};

pub const DEFAULT_RETRY_LIMIT: u64 = 1_000_000;

/// Length of the longest run of equal symbols; 0 for an empty input.
pub fn max_run_length(bits: &[u8]) -> usize {
    longest_run(bits).map_or(0, |(_, len)| len)
}

/// `(start, len)` of the first longest run.
fn longest_run(bits: &[u8]) -> Option<(usize, usize)> {
    runs(bits).fold(None, |best, (start, len)| match best {
        Some((_, l)) if l >= len => best,
        _ => Some((start, len)),
    })
}

/// Maximal runs as `(start, len)`, left to right.
fn runs(bits: &[u8]) -> impl Iterator<Item = (usize, usize)> + '_ {
    bits.chunk_by(|a, b| a == b).scan(0, |start, run| {
        let item = (*start, run.len());
        *start += run.len();
        Some(item)
    })
}

pub fn is_member_c(x: &BitString, params: &CodeParams) -> bool {
    is_member_d(x, &params.layout) && max_run_length(x.as_slice()) <= params.max_run()
}

/// `(2 delta - 1)(ceil(n/ell) - 1)`: bits spent on delimiters.
pub fn redundancy_d(params: &CodeParams) -> usize {
    (2 * params.delta - 1) * (params.num_blocks() - 1)
}

/// Rate counting only the delimiter redundancy.
pub fn rate(params: &CodeParams) -> f64 {
    (params.n - redundancy_d(params)) as f64 / params.n as f64
}

/// Lower and upper redundancy bounds `(k n^(1-a) - 1)(2d - 1)` and
/// `2 k n^(1-a) (2d - 1)`.
pub fn redundancy_bounds(params: &CodeParams) -> (f64, f64) {
    let scale = params.k * (params.n as f64).powf(1.0 - params.alpha);
    let w = (2 * params.delta - 1) as f64;
    ((scale - 1.0) * w, 2.0 * scale * w)
}

/// Uniform sampler over the binary strings that match a mask of fixed bits
/// and have no run longer than `max_run`.
///
/// Backward tables count the completions of every suffix given the current
/// run, so each forward draw is exactly proportional to the number of valid
/// strings extending it. Each table layer is rescaled by its maximum to stay
/// in floating-point range; draws only compare entries of one layer.
#[derive(Debug, Clone)]
pub struct ConstrainedSampler {
    mask: Vec<Option<u8>>,
    max_run: usize,
    // layer i (0..=n), entry [bit * max_run + run - 1]: completions of
    // positions i.. given position i-1 holds `bit` ending a run of `run`
    tables: Vec<f64>,
    log2_size: f64,
}

impl ConstrainedSampler {
    pub fn new(mask: Vec<Option<u8>>, max_run: usize) -> Result<Self, CodeError> {
        assert!(max_run >= 1, "run bound must be positive");
        let n = mask.len();
        let width = 2 * max_run;
        let mut tables = vec![0.0; (n + 1) * width];
        tables[n * width..].fill(1.0);
        // true count of layer i = stored value * 2^log2_scale once layer i is done
        let mut log2_scale = 0.0;
        for i in (1..n).rev() {
            let (head, tail) = tables.split_at_mut((i + 1) * width);
            let next = &tail[..width];
            let layer = &mut head[i * width..];
            let mut max = 0.0_f64;
            for prev in 0..2u8 {
                for run in 1..=max_run {
                    let v = transitions(mask[i], prev, run, max_run)
                        .map(|(b, r)| next[b as usize * max_run + r - 1])
                        .sum::<f64>();
                    layer[prev as usize * max_run + run - 1] = v;
                    max = max.max(v);
                }
            }
            if max == 0.0 {
                return Err(CodeError::EmptyCodebook);
            }
            layer.iter_mut().for_each(|v| *v /= max);
            log2_scale += max.log2();
        }
        let log2_size = if n == 0 {
            0.0
        } else {
            let first: f64 = first_choices(mask[0])
                .map(|b| tables[width + b as usize * max_run])
                .sum();
            if first == 0.0 {
                return Err(CodeError::EmptyCodebook);
            }
            first.log2() + log2_scale
        };
        Ok(Self {
            mask,
            max_run,
            tables,
            log2_size,
        })
    }

    /// `log2` of the number of strings in the constrained set.
    pub fn log2_size(&self) -> f64 {
        self.log2_size
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let n = self.mask.len();
        let width = 2 * self.max_run;
        let mut out = BitString::zeros(n);
        let mut state: Option<(u8, usize)> = None;
        for i in 0..n {
            let next = &self.tables[(i + 1) * width..(i + 2) * width];
            let weight = |b: u8, r: usize| next[b as usize * self.max_run + r - 1];
            let mut options = [(0u8, 0usize, 0.0f64); 2];
            let mut count = 0;
            match state {
                None => {
                    for b in first_choices(self.mask[i]) {
                        options[count] = (b, 1, weight(b, 1));
                        count += 1;
                    }
                }
                Some((prev, run)) => {
                    for (b, r) in transitions(self.mask[i], prev, run, self.max_run) {
                        options[count] = (b, r, weight(b, r));
                        count += 1;
                    }
                }
            }
            let total: f64 = options[..count].iter().map(|o| o.2).sum();
            let mut u = rng.gen::<f64>() * total;
            let mut pick = *options[..count]
                .iter()
                .rev()
                .find(|o| o.2 > 0.0)
                .expect("sampler entered a dead state");
            for &o in &options[..count] {
                if o.2 > 0.0 && u < o.2 {
                    pick = o;
                    break;
                }
                u -= o.2;
            }
            out.set(i, pick.0);
            state = Some((pick.0, pick.1));
        }
        out
    }
}

fn first_choices(fixed: Option<u8>) -> impl Iterator<Item = u8> {
    let (lo, hi) = fixed.map_or((0, 1), |b| (b, b));
    lo..=hi
}

/// Admissible `(bit, run)` successors of a position holding `prev` with a
/// run of `run`.
fn transitions(fixed: Option<u8>, prev: u8, run: usize, max_run: usize) -> impl Iterator<Item = (u8, usize)> {
    first_choices(fixed).filter_map(move |b| {
        if b == prev {
            (run < max_run).then_some((b, run + 1))
        } else {
            Some((b, 1))
        }
    })
}

/// Exact uniform sampler over the code, built once per parameter set.
#[derive(Debug, Clone)]
pub struct CodewordSampler {
    inner: ConstrainedSampler,
}

impl CodewordSampler {
    pub fn new(params: &CodeParams) -> Result<Self, CodeError> {
        let mask = delimiter_layout(&params.layout).mask(params.n);
        Ok(Self {
            inner: ConstrainedSampler::new(mask, params.max_run())?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        self.inner.sample(rng)
    }

    /// `log2 |C|`.
    pub fn log2_size(&self) -> f64 {
        self.inner.log2_size()
    }
}

/// Draws a uniformly distributed codeword.
pub fn sample_codeword<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Result<BitString, CodeError> {
    Ok(CodewordSampler::new(params)?.sample(rng))
}

/// Draws a uniformly distributed codeword by drawing the free bits uniformly
/// and redrawing the whole string until the run bound holds.
pub fn sample_codeword_rejection<R: Rng + ?Sized>(
    params: &CodeParams,
    rng: &mut R,
    retry_limit: u64,
) -> Result<BitString, CodeError> {
    let max_run = params.max_run();
    let mut x = stamp(&BitString::zeros(params.n), &params.layout);
    let free = free_positions(&params.layout);
    for _ in 0..retry_limit {
        for &i in &free {
            x.set(i, rng.gen::<bool>() as u8);
        }
        if max_run_length(x.as_slice()) <= max_run {
            return Ok(x);
        }
    }
    Err(CodeError::SamplerExhausted { attempts: retry_limit })
}

/// Places `info` into the free positions in order and stamps the delimiters.
/// Fails when the result breaks the run bound.
pub fn encode_systematic(info: &BitString, params: &CodeParams) -> Result<BitString, CodeError> {
    let free = free_positions(&params.layout);
    if info.len() != free.len() {
        return Err(CodeError::LengthMismatch {
            expected: free.len(),
            found: info.len(),
        });
    }
    let mut x = stamp(&BitString::zeros(params.n), &params.layout);
    for (&i, b) in free.iter().zip(info.iter()) {
        x.set(i, b);
    }
    let max_run = params.max_run();
    let violation = runs(x.as_slice()).find(|&(_, len)| len > max_run);
    match violation {
        Some((position, run)) => Err(CodeError::RllViolation { position, run, max_run }),
        None => Ok(x),
    }
}

/// Inverse of [`encode_systematic`]: reads the free positions.
pub fn extract_info(x: &BitString, params: &CodeParams) -> Result<BitString, CodeError> {
    if x.len() != params.n {
        return Err(CodeError::LengthMismatch {
            expected: params.n,
            found: x.len(),
        });
    }
    let bits = x.as_slice();
    Ok(BitString::from_bools(
        free_positions(&params.layout).into_iter().map(|i| bits[i] == 1),
    ))
}

/// `log2 |L^n(max_run)|`, the information content of run-limited strings.
pub fn log2_rll_count(n: usize, max_run: usize) -> f64 {
    // rolling version of the sampler's backward pass
    let mut next = vec![1.0_f64; 2 * max_run];
    let mut layer = vec![0.0_f64; 2 * max_run];
    let mut log2_scale = 0.0;
    for _ in 1..n {
        let mut max = 0.0_f64;
        for prev in 0..2u8 {
            for run in 1..=max_run {
                let v: f64 = transitions(None, prev, run, max_run)
                    .map(|(b, r)| next[b as usize * max_run + r - 1])
                    .sum();
                layer[prev as usize * max_run + run - 1] = v;
                max = max.max(v);
            }
        }
        layer.iter_mut().for_each(|v| *v /= max);
        log2_scale += max.log2();
        std::mem::swap(&mut next, &mut layer);
    }
    if n == 0 {
        0.0
    } else {
        (next[0] + next[max_run]).log2() + log2_scale
    }
}

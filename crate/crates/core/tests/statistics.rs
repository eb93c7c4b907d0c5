mod common;

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use common::is_subsequence;
use tracecode::delimiter::delimiter_layout;
use tracecode::{
    derive_params, generate_traces, is_member_c, max_run_length, sample_rll_sequence, transmit, BitString,
    CodewordSampler, ConstrainedSampler,
};

/// Upper-tail probability of Pearson's statistic for observed counts against
/// expected counts.
fn chi_square_p(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn all_strings(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u32..1 << n).map(move |v| (0..n).map(|i| (v >> i & 1) as u8).collect())
}

fn uniformity_p(members: &[Vec<u8>], draws: &[Vec<u8>]) -> f64 {
    let index: HashMap<&[u8], usize> = members.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let mut observed = vec![0.0; members.len()];
    for d in draws {
        observed[*index.get(d.as_slice()).expect("draw outside the set")] += 1.0;
    }
    let expected = vec![draws.len() as f64 / members.len() as f64; members.len()];
    chi_square_p(&observed, &expected)
}

#[test]
fn codeword_sampler_is_uniform_on_a_small_code() {
    // n=10, ell=5: max run 2 and three fixed delimiter bits
    let params = derive_params(10, 2.0, 1.0, 2).unwrap();
    assert_eq!((params.ell(), params.max_run()), (5, 2));
    let members: Vec<Vec<u8>> = all_strings(10)
        .filter(|v| is_member_c(&BitString::from_bits(v.clone()).unwrap(), &params))
        .collect();
    let sampler = CodewordSampler::new(&params).unwrap();
    assert!((sampler.log2_size() - (members.len() as f64).log2()).abs() < 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws: Vec<Vec<u8>> = (0..100_000).map(|_| sampler.sample(&mut rng).into_vec()).collect();
    let p = uniformity_p(&members, &draws);
    assert!(p > 1e-3, "chi-square p = {p}");
}

#[test]
fn constrained_sampler_respects_mask_and_count() {
    let params = derive_params(30, 3.0, 1.0, 2).unwrap();
    let mask = delimiter_layout(&params.layout).mask(30);
    let s = ConstrainedSampler::new(mask.clone(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let x = s.sample(&mut rng);
        assert!(max_run_length(x.as_slice()) <= 3);
        assert!(mask.iter().zip(x.iter()).all(|(m, b)| m.is_none_or(|f| f == b)));
    }
}

#[test]
fn rll_sampler_is_uniform() {
    let members: Vec<Vec<u8>> = all_strings(12).filter(|v| max_run_length(v) <= 3).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let draws: Vec<Vec<u8>> = (0..100_000)
        .map(|_| sample_rll_sequence(12, 3, &mut rng, 1_000_000).unwrap().into_vec())
        .collect();
    let p = uniformity_p(&members, &draws);
    assert!(p > 1e-3, "chi-square p = {p}");
}

#[test]
fn deletion_counts_follow_the_binomial_law() {
    let (n, p) = (1000usize, 0.01);
    let x = BitString::zeros(n);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let runs = 10_000;
    let mut hist: HashMap<usize, f64> = HashMap::new();
    for _ in 0..runs {
        *hist.entry(transmit(&x, p, &mut rng).deletions()).or_default() += 1.0;
    }
    // pool the tails so every expected count is at least 5
    let law = Binomial::new(p, n as u64).unwrap();
    let (lo, hi) = (4usize, 17usize);
    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let below: f64 = (0..lo).map(|k| law.pmf(k as u64)).sum();
    observed.push((0..lo).map(|k| hist.get(&k).copied().unwrap_or(0.0)).sum());
    expected.push(below * runs as f64);
    for k in lo..hi {
        observed.push(hist.get(&k).copied().unwrap_or(0.0));
        expected.push(law.pmf(k as u64) * runs as f64);
    }
    let above = 1.0 - expected.iter().sum::<f64>() / runs as f64;
    observed.push(hist.iter().filter(|(&k, _)| k >= hi).map(|(_, &c)| c).sum());
    expected.push(above * runs as f64);
    assert!(expected.iter().all(|&e| e >= 5.0));
    let pv = chi_square_p(&observed, &expected);
    assert!(pv > 0.01, "chi-square p = {pv}");
}

#[test]
fn traces_are_independent_subsequences() {
    let (n, p, runs) = (500usize, 0.02, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = BitString::from_bools((0..n).map(|_| rand::Rng::gen::<bool>(&mut rng)));
    let mut pairs = Vec::with_capacity(runs);
    for seed in 0..runs as u64 {
        let traces = generate_traces(&x, p, 3, seed);
        for y in &traces {
            assert!(is_subsequence(y.bits.as_slice(), x.as_slice()));
        }
        pairs.push((traces[0].deletions() as f64, traces[1].deletions() as f64));
    }
    let mean = |f: fn(&(f64, f64)) -> f64| pairs.iter().map(f).sum::<f64>() / runs as f64;
    let (ma, mb) = (mean(|p| p.0), mean(|p| p.1));
    let cov = pairs.iter().map(|(a, b)| (a - ma) * (b - mb)).sum::<f64>() / runs as f64;
    let var = |m: f64, f: fn(&(f64, f64)) -> f64| pairs.iter().map(|p| (f(p) - m).powi(2)).sum::<f64>() / runs as f64;
    let corr = cov / (var(ma, |p| p.0) * var(mb, |p| p.1)).sqrt();
    assert!(corr.abs() < 4.0 / (runs as f64).sqrt(), "correlation {corr}");
}

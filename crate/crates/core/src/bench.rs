//! Timing harness for the scheme's operations.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::RngCore;

use crate::error::Result;
use crate::gauss::Sampler;
use crate::hashing::random_message;
use crate::pkeetfa::Scheme;

/// Smallest trial count accepted for a reported row.
pub const MIN_TRIALS: usize = 100;

/// Operation names in report order.
pub const OPERATIONS: [&str; 9] = [
    "Setup", "Encrypt", "Decrypt", "Td1", "Td2", "Td3", "Test1", "Test2", "Test3",
];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub op: String,
    pub trials: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub min_us: f64,
    /// `n/q/k/m` of the parameter set.
    pub fingerprint: String,
}

impl BenchRecord {
    fn from_samples(op: &str, fingerprint: &str, samples: &mut [Duration]) -> Self {
        samples.sort();
        let us: Vec<f64> = samples.iter().map(|d| d.as_secs_f64() * 1e6).collect();
        let len = us.len();
        let median = if len % 2 == 1 {
            us[len / 2]
        } else {
            (us[len / 2 - 1] + us[len / 2]) / 2.0
        };
        Self {
            op: op.to_string(),
            trials: len,
            mean_us: us.iter().sum::<f64>() / len as f64,
            median_us: median,
            min_us: us[0],
            fingerprint: fingerprint.to_string(),
        }
    }
}

fn time<T>(samples: &mut Vec<Duration>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f()?;
    samples.push(start.elapsed());
    Ok(out)
}

fn fingerprint(scheme: &Scheme) -> String {
    let p = scheme.params();
    format!("{}/{}/{}/{}", p.n, p.q, p.k, p.m)
}

fn records(scheme: &Scheme, mut samples: Vec<Vec<Duration>>) -> Vec<BenchRecord> {
    let fp = fingerprint(scheme);
    OPERATIONS
        .iter()
        .zip(samples.iter_mut())
        .map(|(op, s)| BenchRecord::from_samples(op, &fp, s))
        .collect()
}

/// Times every operation `trials` times (raised to [`MIN_TRIALS`]) with two
/// users holding encryptions of the same message.
pub fn run(scheme: &Scheme, trials: usize, sampler: &mut Sampler) -> Result<Vec<BenchRecord>> {
    let samples = collect(scheme, trials.max(MIN_TRIALS), sampler)?;
    Ok(records(scheme, samples))
}

/// Splits the trials over `jobs` threads, each with its own keys and a seed
/// drawn from the master seed (or from entropy).
pub fn run_jobs(scheme: &Scheme, trials: usize, jobs: usize, seed: Option<u64>) -> Result<Vec<BenchRecord>> {
    let trials = trials.max(MIN_TRIALS);
    let jobs = jobs.clamp(1, trials);
    let mut master = seed.map_or_else(Sampler::from_entropy, Sampler::from_seed);
    let work: Vec<(u64, usize)> = (0..jobs)
        .map(|j| (master.next_u64(), trials / jobs + usize::from(j < trials % jobs)))
        .collect();
    let parts = std::thread::scope(|s| {
        let handles: Vec<_> = work
            .iter()
            .map(|&(seed, share)| s.spawn(move || collect(scheme, share, &mut Sampler::from_seed(seed))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut merged = vec![Vec::with_capacity(trials); OPERATIONS.len()];
    for part in parts {
        for (all, mut some) in merged.iter_mut().zip(part) {
            all.append(&mut some);
        }
    }
    Ok(records(scheme, merged))
}

fn collect(scheme: &Scheme, trials: usize, sampler: &mut Sampler) -> Result<Vec<Vec<Duration>>> {
    let ring = scheme.ring();
    let mut samples: Vec<Vec<Duration>> = vec![Vec::with_capacity(trials); OPERATIONS.len()];

    for _ in 0..trials {
        time(&mut samples[0], || scheme.setup(sampler))?;
    }
    let (pk_i, sk_i) = scheme.setup(sampler)?;
    let (pk_j, sk_j) = scheme.setup(sampler)?;
    let message = random_message(ring, sampler);

    // Warm-up: fills the per-trapdoor caches before anything is timed.
    let ct_i = scheme.encrypt(&pk_i, &message, sampler)?;
    let ct_j = scheme.encrypt(&pk_j, &message, sampler)?;
    scheme.decrypt(&sk_i, &pk_i, &ct_i, sampler)?;
    scheme.decrypt(&sk_j, &pk_j, &ct_j, sampler)?;

    for _ in 0..trials {
        time(&mut samples[1], || scheme.encrypt(&pk_i, &message, sampler))?;
        time(&mut samples[2], || scheme.decrypt(&sk_i, &pk_i, &ct_i, sampler))?;
        time(&mut samples[3], || Ok(scheme.td1(&sk_i, &pk_i)))?;
        time(&mut samples[4], || scheme.td2(&sk_i, &pk_i, &ct_i, sampler))?;
        time(&mut samples[5], || {
            let ti = scheme.td3_i(&sk_i, &pk_i, &ct_i, sampler)?;
            Ok((ti, scheme.td3_j(&sk_j, &pk_j)))
        })?;
    }

    let t1 = (scheme.td1(&sk_i, &pk_i), scheme.td1(&sk_j, &pk_j));
    let t2 = (
        scheme.td2(&sk_i, &pk_i, &ct_i, sampler)?,
        scheme.td2(&sk_j, &pk_j, &ct_j, sampler)?,
    );
    let t3 = (scheme.td3_i(&sk_i, &pk_i, &ct_i, sampler)?, scheme.td3_j(&sk_j, &pk_j));
    for _ in 0..trials {
        time(&mut samples[6], || scheme.test1(&t1.0, &t1.1, &ct_i, &ct_j, sampler))?;
        time(&mut samples[7], || scheme.test2(&t2.0, &t2.1, &ct_i, &ct_j))?;
        time(&mut samples[8], || scheme.test3(&t3.0, &t3.1, &ct_i, &ct_j, sampler))?;
    }

    Ok(samples)
}

/// Writes `op,trials,mean_us,median_us,min_us` rows.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["op", "trials", "mean_us", "median_us", "min_us"])?;
    for r in records {
        w.write_record([
            r.op.clone(),
            r.trials.to_string(),
            format!("{:.3}", r.mean_us),
            format!("{:.3}", r.median_us),
            format!("{:.3}", r.min_us),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Looks up a row by operation name.
pub fn find<'a>(records: &'a [BenchRecord], op: &str) -> Option<&'a BenchRecord> {
    records.iter().find(|r| r.op == op)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics_of_fixed_samples() {
        let mut s: Vec<Duration> = [4, 1, 3, 2].iter().map(|&x| Duration::from_micros(x)).collect();
        let r = BenchRecord::from_samples("X", "f", &mut s);
        assert_eq!(r.trials, 4);
        assert!((r.mean_us - 2.5).abs() < 1e-9);
        assert!((r.median_us - 2.5).abs() < 1e-9);
        assert!((r.min_us - 1.0).abs() < 1e-9);
    }

    #[test]
    fn csv_layout() {
        let rec = BenchRecord {
            op: "Td1".into(),
            trials: 100,
            mean_us: 1.0,
            median_us: 1.0,
            min_us: 0.5,
            fingerprint: "8/17/5/7".into(),
        };
        let mut buf = Vec::new();
        write_csv(&[rec], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "op,trials,mean_us,median_us,min_us\nTd1,100,1.000,1.000,0.500\n"
        );
    }
}

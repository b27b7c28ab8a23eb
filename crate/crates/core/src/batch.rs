//! Verification campaigns over prime ranges: exact-oracle agreement scans,
//! the prime census behind the published counts, proved-lemma suites and
//! empirical density tables.
//!
//! Campaigns are deterministic: a fixed range, seed and option set produces
//! byte-identical output regardless of the worker count. Workers split the
//! primes into fixed chunks and results are merged in chunk order.
//!
//! The scan can append records to a CSV cache file (one row per prime,
//! header `schema=1`): re-runs reuse the expensive exact class numbers and
//! recompute the cheap residue symbols fresh. Rows of a stale schema and
//! partial trailing lines are discarded on load.

use crate::criteria::{self, Ord2Prediction};
use crate::error::{Error, Result};
use crate::formclass;
use crate::modular::{self, PrimeStream, Symbol};
use crate::realquad;
use crate::zsqrt2::{self, Zsqrt2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const CSV_SCHEMA_LINE: &str = "schema=1";
pub const CSV_HEADER: &str =
    "p,res32,u,v,inv,q2,h2p_pred,h2p_exactflag,h2p_actual,hK_pred,hK_exactflag,hK_conj";

/// One prime's full row: residue data, symbols, predictions and (when the
/// exact oracle ran) the true ord_2(h(-2p)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub p: u64,
    pub res32: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inv: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2: Option<i8>,
    pub h2p_pred: u32,
    pub h2p_exactflag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2p_actual: Option<u32>,
    #[serde(rename = "hK_pred")]
    pub hk_pred: u32,
    #[serde(rename = "hK_exactflag")]
    pub hk_exactflag: bool,
    #[serde(rename = "hK_conj", skip_serializing_if = "Option::is_none")]
    pub hk_conj: Option<u32>,
}

impl ScanRecord {
    /// A record is flagged when the exact oracle contradicts the predictor:
    /// an exact prediction must equal the oracle value and a lower bound
    /// must not exceed it.
    pub fn is_flagged(&self) -> bool {
        match self.h2p_actual {
            None => false,
            Some(actual) => {
                if self.h2p_exactflag {
                    self.h2p_pred != actual
                } else {
                    self.h2p_pred > actual
                }
            }
        }
    }

    pub fn to_csv_row(&self) -> String {
        fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.res32,
            opt(&self.u),
            opt(&self.v),
            opt(&self.inv),
            opt(&self.q2),
            self.h2p_pred,
            self.h2p_exactflag as u8,
            opt(&self.h2p_actual),
            self.hk_pred,
            self.hk_exactflag as u8,
            opt(&self.hk_conj),
        )
    }
}

/// Render records as the schema=1 CSV document.
pub fn records_to_csv(records: &[ScanRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_SCHEMA_LINE}");
    let _ = writeln!(out, "{CSV_HEADER}");
    for r in records {
        let _ = writeln!(out, "{}", r.to_csv_row());
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    /// Run the exact class-number oracle for every p <= this bound.
    pub exact_limit: Option<u64>,
    /// Also record the conjecture-refined quartic-field prediction.
    pub conjecture: bool,
    /// Worker threads; 0 and 1 both mean serial.
    pub jobs: usize,
    /// Keep only primes lying in at least one of these (modulus, class)
    /// pairs; empty means no filter.
    pub residue_filters: Vec<(u64, u64)>,
    /// CSV cache file to resume from and append to.
    pub cache: Option<PathBuf>,
}

/// Scan outcome: records in ascending prime order plus the flagged primes.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub records: Vec<ScanRecord>,
    pub flagged: Vec<u64>,
}

/// Scan the odd primes in `[from, to]` (inclusive).
pub fn scan(from: u64, to: u64, options: &ScanOptions) -> Result<ScanReport> {
    scan_with_h2p_predictor(from, to, options, &criteria::predict_ord2_h2p)
}

/// Scan with a replaceable ord_2(h(-2p)) predictor. The test suites inject
/// a deliberately corrupted predictor here to prove that disagreement with
/// the oracle is flagged; production code always uses the real one.
#[doc(hidden)]
pub fn scan_with_h2p_predictor<F>(
    from: u64,
    to: u64,
    options: &ScanOptions,
    predict: &F,
) -> Result<ScanReport>
where
    F: Fn(u64) -> Result<Ord2Prediction> + Sync,
{
    if let Some(limit) = options.exact_limit {
        if limit > to {
            return Err(Error::InvalidArgument {
                what: format!("exact limit {limit} exceeds the range bound {to}"),
            });
        }
    }
    for &(m, r) in &options.residue_filters {
        if m == 0 || r >= m {
            return Err(Error::InvalidArgument {
                what: format!("residue class {r} mod {m}"),
            });
        }
    }
    let primes: Vec<u64> = if from > to {
        Vec::new()
    } else {
        PrimeStream::new(from.max(3), to.saturating_add(1))
            .filter(|&p| {
                options.residue_filters.is_empty()
                    || options.residue_filters.iter().any(|&(m, r)| p % m == r)
            })
            .collect()
    };

    let cache = match &options.cache {
        Some(path) => Cache::load(path)?,
        None => Cache::empty(),
    };

    let records = if options.jobs > 1 && primes.len() > 1 {
        scan_parallel(&primes, options, predict, &cache)?
    } else {
        primes
            .iter()
            .map(|&p| compute_record(p, options, predict, &cache))
            .collect::<Result<Vec<_>>>()?
    };

    if let Some(path) = &options.cache {
        cache.append_new(path, &records)?;
    }

    let flagged = records.iter().filter(|r| r.is_flagged()).map(|r| r.p).collect();
    Ok(ScanReport { records, flagged })
}

fn scan_parallel<F>(
    primes: &[u64],
    options: &ScanOptions,
    predict: &F,
    cache: &Cache,
) -> Result<Vec<ScanRecord>>
where
    F: Fn(u64) -> Result<Ord2Prediction> + Sync,
{
    const CHUNK: usize = 256;
    let chunks: Vec<&[u64]> = primes.chunks(CHUNK).collect();
    let results: Mutex<Vec<Option<Result<Vec<ScanRecord>>>>> =
        Mutex::new((0..chunks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..options.jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= chunks.len() {
                    break;
                }
                let out: Result<Vec<ScanRecord>> = chunks[idx]
                    .iter()
                    .map(|&p| compute_record(p, options, predict, cache))
                    .collect();
                results.lock().unwrap()[idx] = Some(out);
            });
        }
    });

    let mut records = Vec::with_capacity(primes.len());
    for slot in results.into_inner().unwrap() {
        records.extend(slot.expect("every chunk is processed")?);
    }
    Ok(records)
}

fn compute_record<F>(
    p: u64,
    options: &ScanOptions,
    predict: &F,
    cache: &Cache,
) -> Result<ScanRecord>
where
    F: Fn(u64) -> Result<Ord2Prediction>,
{
    let (mut u, mut v, mut inv, mut q2) = (None, None, None, None);
    if p % 8 == 1 || p % 8 == 7 {
        let dec = zsqrt2::decompose(p)?;
        u = Some(dec.u);
        v = Some(dec.v);
        if p % 8 == 7 {
            inv = Some(zsqrt2::invariant(p)?.value());
        } else {
            q2 = Some(modular::quartic_symbol_2(p)?.value());
        }
    }
    let h2p_pred = predict(p)?;
    let hk = criteria::predict_ord2_hk(p, false)?;
    let hk_conj = if options.conjecture {
        Some(criteria::predict_ord2_hk(p, true)?.value)
    } else {
        None
    };
    let h2p_actual = match options.exact_limit {
        Some(limit) if p <= limit => match cache.lookup(p) {
            Some(ord2) => Some(ord2),
            None => Some(formclass::h2p(p)?.ord2),
        },
        _ => None,
    };
    Ok(ScanRecord {
        p,
        res32: (p % 32) as u8,
        u,
        v,
        inv,
        q2,
        h2p_pred: h2p_pred.value,
        h2p_exactflag: h2p_pred.exact,
        h2p_actual,
        hk_pred: hk.value,
        hk_exactflag: hk.exact,
        hk_conj,
    })
}

/// In-memory view of the CSV cache: p -> cached exact ord_2(h(-2p)).
struct Cache {
    actuals: HashMap<u64, u32>,
    valid_file: bool,
}

impl Cache {
    fn empty() -> Cache {
        Cache { actuals: HashMap::new(), valid_file: false }
    }

    fn lookup(&self, p: u64) -> Option<u32> {
        self.actuals.get(&p).copied()
    }

    fn load(path: &Path) -> Result<Cache> {
        let content = match fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut cache = Cache::empty();
        let mut lines = content.split('\n');
        if lines.next() != Some(CSV_SCHEMA_LINE) || lines.next() != Some(CSV_HEADER) {
            // Missing, stale or foreign header: ignore the content entirely.
            return Ok(cache);
        }
        cache.valid_file = true;
        let complete = content.ends_with('\n');
        let rows: Vec<&str> = lines.collect();
        let n = rows.len();
        for (i, row) in rows.into_iter().enumerate() {
            if row.is_empty() || (!complete && i == n - 1) {
                continue; // partial trailing line
            }
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != 12 {
                continue;
            }
            let (Ok(p), Ok(actual)) = (fields[0].parse::<u64>(), fields[8].parse::<u32>()) else {
                continue;
            };
            cache.actuals.insert(p, actual); // later rows win
        }
        Ok(cache)
    }

    /// Append the records that ran the oracle and were not already cached.
    /// Single-writer discipline: called once, after the merge.
    fn append_new(&self, path: &Path, records: &[ScanRecord]) -> Result<()> {
        let fresh: Vec<&ScanRecord> = records
            .iter()
            .filter(|r| r.h2p_actual.is_some() && !self.actuals.contains_key(&r.p))
            .collect();
        if fresh.is_empty() && self.valid_file {
            return Ok(());
        }
        let mut file = if self.valid_file {
            fs::OpenOptions::new().append(true).open(path)?
        } else {
            let mut f = fs::File::create(path)?;
            writeln!(f, "{CSV_SCHEMA_LINE}")?;
            writeln!(f, "{CSV_HEADER}")?;
            f
        };
        for r in fresh {
            writeln!(file, "{}", r.to_csv_row())?;
        }
        file.flush()?;
        Ok(())
    }
}

/// Counts and densities over all primes p < X.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub limit: u64,
    pub count_primes: u64,
    pub count_15mod16: u64,
    pub count_15mod32: u64,
    /// p = 15 mod 32 with invariant -1; equals the count of primes with
    /// ord_2(h_K) = 2 only under the conjectured equivalence.
    pub count_inv_minus: u64,
    pub count_inv_plus: u64,
    pub count_inv_minus_15mod16: u64,
    pub count_twisted_minus_15mod16: u64,
    pub count_quartic_minus_1mod16: u64,
    pub density_inv_minus_mod16: f64,
    pub density_twisted_mod16: f64,
    pub density_quartic_1mod16: f64,
}

/// Census of the symbol distributions over all primes p < X.
pub fn census(x: u64) -> Result<CensusReport> {
    if x < 100 {
        return Err(Error::InvalidArgument {
            what: format!("census limit {x} must be at least 100"),
        });
    }
    let mut r = CensusReport {
        limit: x,
        count_primes: 0,
        count_15mod16: 0,
        count_15mod32: 0,
        count_inv_minus: 0,
        count_inv_plus: 0,
        count_inv_minus_15mod16: 0,
        count_twisted_minus_15mod16: 0,
        count_quartic_minus_1mod16: 0,
        density_inv_minus_mod16: 0.0,
        density_twisted_mod16: 0.0,
        density_quartic_1mod16: 0.0,
    };
    for p in PrimeStream::new(2, x) {
        r.count_primes += 1;
        if p % 16 == 15 {
            r.count_15mod16 += 1;
            let inv = zsqrt2::invariant(p)?;
            let twisted = criteria::sign_sixteen(p) * inv;
            if inv == Symbol::Minus {
                r.count_inv_minus_15mod16 += 1;
            }
            if twisted == Symbol::Minus {
                r.count_twisted_minus_15mod16 += 1;
            }
            if p % 32 == 15 {
                r.count_15mod32 += 1;
                if inv == Symbol::Minus {
                    r.count_inv_minus += 1;
                } else {
                    r.count_inv_plus += 1;
                }
            }
        } else if p % 16 == 1 && modular::quartic_symbol_2(p)? == Symbol::Minus {
            r.count_quartic_minus_1mod16 += 1;
        }
    }
    r.density_inv_minus_mod16 = r.count_inv_minus_15mod16 as f64 / r.count_15mod16 as f64;
    r.density_twisted_mod16 = r.count_twisted_minus_15mod16 as f64 / r.count_15mod16 as f64;
    r.density_quartic_1mod16 = r.count_quartic_minus_1mod16 as f64 / r.count_primes as f64;
    Ok(r)
}

/// One checkpoint row of the density table; every ratio is over the primes
/// strictly below the checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: u64,
    pub n_primes: u64,
    pub n_15mod16: u64,
    pub n_15mod32: u64,
    pub n_31mod32: u64,
    /// invariant = -1 among p = 15 mod 16.
    pub ratio_inv_minus: f64,
    /// twisted invariant = -1 among p = 15 mod 16.
    pub ratio_twisted_minus: f64,
    /// p = 1 mod 16 with (2/p)_4 = -1 among all primes.
    pub ratio_quartic: f64,
    /// 8 || h(-2p) among p = 15 mod 32, by the residue criterion.
    pub ratio_8div_15mod32: f64,
    /// 8 || h(-2p) among p = 31 mod 32, by the residue criterion.
    pub ratio_8div_31mod32: f64,
}

/// Empirical densities at each checkpoint (ascending, each <= X).
pub fn density_table(x: u64, checkpoints: &[u64]) -> Result<Vec<DensityRow>> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidArgument {
            what: "at least one checkpoint is required".to_string(),
        });
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument {
            what: "checkpoints must be strictly ascending".to_string(),
        });
    }
    if *checkpoints.last().unwrap() > x {
        return Err(Error::InvalidArgument {
            what: format!("checkpoint beyond the limit {x}"),
        });
    }

    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut n_primes = 0u64;
    let mut n_15mod16 = 0u64;
    let mut n_15mod32 = 0u64;
    let mut n_31mod32 = 0u64;
    let mut inv_minus = 0u64;
    let mut twisted_minus = 0u64;
    let mut quartic_minus = 0u64;
    let mut eight_15 = 0u64; // twisted = -1 within p = 15 mod 32
    let mut eight_31 = 0u64;
    let mut cps = checkpoints.iter().copied().peekable();

    for p in PrimeStream::new(2, x.saturating_add(1)) {
        while let Some(&cp) = cps.peek() {
            if p < cp {
                break;
            }
            rows.push(DensityRow {
                x: cp,
                n_primes,
                n_15mod16,
                n_15mod32,
                n_31mod32,
                ratio_inv_minus: inv_minus as f64 / n_15mod16 as f64,
                ratio_twisted_minus: twisted_minus as f64 / n_15mod16 as f64,
                ratio_quartic: quartic_minus as f64 / n_primes as f64,
                ratio_8div_15mod32: eight_15 as f64 / n_15mod32 as f64,
                ratio_8div_31mod32: eight_31 as f64 / n_31mod32 as f64,
            });
            cps.next();
        }
        if cps.peek().is_none() {
            break;
        }
        n_primes += 1;
        if p % 16 == 15 {
            n_15mod16 += 1;
            let inv = zsqrt2::invariant(p)?;
            let twisted = criteria::sign_sixteen(p) * inv;
            if inv == Symbol::Minus {
                inv_minus += 1;
            }
            if twisted == Symbol::Minus {
                twisted_minus += 1;
            }
            if p % 32 == 15 {
                n_15mod32 += 1;
                if twisted == Symbol::Minus {
                    eight_15 += 1;
                }
            } else {
                n_31mod32 += 1;
                if twisted == Symbol::Minus {
                    eight_31 += 1;
                }
            }
        } else if p % 16 == 1 && modular::quartic_symbol_2(p)? == Symbol::Minus {
            quartic_minus += 1;
        }
    }
    // Checkpoints at or beyond the last prime seen.
    for cp in cps {
        rows.push(DensityRow {
            x: cp,
            n_primes,
            n_15mod16,
            n_15mod32,
            n_31mod32,
            ratio_inv_minus: inv_minus as f64 / n_15mod16 as f64,
            ratio_twisted_minus: twisted_minus as f64 / n_15mod16 as f64,
            ratio_quartic: quartic_minus as f64 / n_primes as f64,
            ratio_8div_15mod32: eight_15 as f64 / n_15mod32 as f64,
            ratio_8div_31mod32: eight_31 as f64 / n_31mod32 as f64,
        });
    }
    Ok(rows)
}

/// Outcome of the proved-lemma campaign; `failures` would hold witnesses of
/// implementation bugs and is expected to stay empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCampaignReport {
    pub local_square_checked: u64,
    pub invariance_checked: u64,
    pub spin_samples: u64,
    pub failures: Vec<String>,
}

impl LemmaCampaignReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run the proved statements below X: the local-square suite for every
/// p = 15 mod 16, decomposition-invariance for every p = 7 mod 8, and the
/// twisted-spin periodicity under (1+sqrt(2))^8 on seeded random elements.
pub fn lemma_campaign(x: u64, seed: u64) -> Result<LemmaCampaignReport> {
    if x < 100 {
        return Err(Error::InvalidArgument {
            what: format!("campaign limit {x} must be at least 100"),
        });
    }
    let mut report = LemmaCampaignReport {
        local_square_checked: 0,
        invariance_checked: 0,
        spin_samples: 0,
        failures: Vec::new(),
    };

    for p in PrimeStream::with_residue(0, x, 16, 15)? {
        report.local_square_checked += 1;
        let r = realquad::local_square_suite(p)?;
        if !r.all_hold() {
            report.failures.push(format!("local squares failed at p={p}: {r:?}"));
        }
    }

    for p in PrimeStream::with_residue(0, x, 8, 7)? {
        report.invariance_checked += 1;
        let reference = zsqrt2::invariant(p)?;
        for (u, v) in zsqrt2::alternate_decompositions(&zsqrt2::decompose(p)?) {
            let j = modular::jacobi(2 * u as i128, v as i128)?;
            if j != reference {
                report
                    .failures
                    .push(format!("invariant of p={p} changed under decomposition ({u},{v})"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        report.spin_samples += 1;
        let alpha = random_totally_positive(&mut rng);
        let lhs = zsqrt2::twisted_spin(&alpha.unit_shift(4))?;
        let rhs = zsqrt2::twisted_spin(&alpha)?;
        if lhs != rhs {
            report
                .failures
                .push(format!("twisted spin of {alpha} not invariant under (1+sqrt(2))^8"));
        }
    }
    Ok(report)
}

fn random_totally_positive(rng: &mut ChaCha8Rng) -> Zsqrt2 {
    let b: i64 = rng.gen_range(-1_000_000..=1_000_000);
    let a_min = (2 * b * b).isqrt() + 1;
    let a = a_min + rng.gen_range(0..1_000_000);
    let alpha = Zsqrt2::new(a, b);
    debug_assert!(alpha.is_totally_positive());
    alpha
}

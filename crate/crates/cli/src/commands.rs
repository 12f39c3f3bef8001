use std::collections::BTreeMap;
use std::io;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use residuum::corefst::{build_core_table, critical_precision, half, integer_increments};
use residuum::generators::{
    audit_value, exception_block, conjecture_note4, noncore_mod_p3, run_scan, Checkpoint,
    GeneratorClass, Note5Family, WieferichScanner,
};
use residuum::modring::{decode_base_p, decompose_unit, encode_base_p, encode_value, is_core};
use residuum::pairsums::{core_pairsum_count, fermat_pairsum_count};
use residuum::primes::odd_primes_between;
use residuum::waring::{coverage, sumset_levels, witness_with_bases};
use residuum::{Error, PrimePowerModulus, Residue, SubgroupDescriptor};
use serde_json::Value;

use crate::config::Settings;
use crate::fields;
use crate::report::{Echo, Emitter};

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Core table A_k(n), carries n' and increments d_k(n) for n = 1..p-1.
    Core(PK),
    /// Integer increments (n+1)^(p^i) - n^(p^i) mod p^k.
    Increments {
        #[command(flatten)]
        pk: PK,
        #[arg(short = 'i', default_value_t = 1)]
        i: u32,
    },
    /// Critical precision K_p for every odd prime in [from, to].
    Kp {
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Pairsum counts for the core and for the p-th powers.
    Pairsums(PK),
    /// Sums of p-th powers: F+t levels and coverage of the whole ring.
    Waring {
        #[command(flatten)]
        pk: PK,
        #[arg(long, default_value_t = 4)]
        max_t: usize,
    },
    /// Core membership and orders of the divisors of p^2 - 1 (or of another family).
    Divisors {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long, default_value_t = 3)]
        k_max: u32,
        #[arg(long, value_enum, default_value_t = Family::SquareMinusOne)]
        family: Family,
        /// Exponent m for the p^(2m) - 1 family.
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Streaming scans over a range of primes.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
    /// Core/extension split and shortest p-th power sum for one residue.
    Decompose {
        #[command(flatten)]
        pk: PK,
        /// Residue in base p, most significant digit first.
        residue: String,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PK {
    #[arg(short = 'p')]
    pub p: u64,
    #[arg(short = 'k')]
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// p^2 - 1
    SquareMinusOne,
    /// p^2 + 1
    SquarePlusOne,
    /// p^(2m) - 1
    EvenPowerMinusOne,
}

#[derive(Debug, Clone, Args)]
pub struct Range {
    #[arg(long, default_value_t = 3)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    /// Resume file; rewritten after every block.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum ScanKind {
    /// Primes with base^p = base mod p^2.
    Wieferich {
        #[command(flatten)]
        range: Range,
        #[arg(long, default_value_t = 2)]
        base: u64,
    },
    /// Primes with a divisor 1 < r < p^2 - 1 of p^2 - 1 and r^p = r mod p^2.
    Exceptions {
        #[command(flatten)]
        range: Range,
    },
    /// Primes where no divisor of p - 1 or p + 1 is a primitive root or a
    /// half-group generator without -1, mod p^k.
    Note4 {
        #[command(flatten)]
        range: Range,
        #[arg(short = 'k', default_value_t = 3)]
        k: u32,
    },
}

impl Command {
    pub fn echo(&self) -> Echo {
        let (command, args) = match self {
            Command::Core(pk) => ("core", pk.echo()),
            Command::Increments { pk, i } => ("increments", format!("{} -i {i}", pk.echo())),
            Command::Kp { from, to } => ("kp", format!("--from {from} --to {to}")),
            Command::Pairsums(pk) => ("pairsums", pk.echo()),
            Command::Waring { pk, max_t } => ("waring", format!("{} --max-t {max_t}", pk.echo())),
            Command::Divisors { p, k_max, family, m } => {
                let fam = family.to_possible_value().expect("not skipped");
                let mut a = format!("-p {p} --k-max {k_max} --family {}", fam.get_name());
                if *family == Family::EvenPowerMinusOne {
                    a.push_str(&format!(" --m {m}"));
                }
                ("divisors", a)
            }
            Command::Scan { kind } => match kind {
                ScanKind::Wieferich { range, base } => {
                    ("scan wieferich", format!("{} --base {base}", range.echo()))
                }
                ScanKind::Exceptions { range } => ("scan exceptions", range.echo()),
                ScanKind::Note4 { range, k } => ("scan note4", format!("{} -k {k}", range.echo())),
            },
            Command::Decompose { pk, residue } => ("decompose", format!("{} {residue}", pk.echo())),
        };
        Echo {
            command: command.into(),
            args,
        }
    }

    pub fn run(&self, settings: &Settings, out: &mut Emitter) -> Result<()> {
        let bound = settings.table_bound;
        match self {
            Command::Core(pk) => core(&pk.modulus(bound)?, out),
            Command::Increments { pk, i } => increments(&pk.modulus(bound)?, *i, out),
            Command::Kp { from, to } => kp(*from, *to, out),
            Command::Pairsums(pk) => pairsums(&pk.modulus(bound)?, out),
            Command::Waring { pk, max_t } => waring(&pk.modulus(bound)?, *max_t, out),
            Command::Divisors { p, k_max, family, m } => divisors(*p, *k_max, *family, *m, out),
            Command::Scan { kind } => scan(kind, out),
            Command::Decompose { pk, residue } => decompose(&pk.modulus(bound)?, residue, out),
        }
    }
}

impl PK {
    fn echo(&self) -> String {
        format!("-p {} -k {}", self.p, self.k)
    }

    fn modulus(&self, bound: u64) -> Result<PrimePowerModulus> {
        Ok(PrimePowerModulus::with_table_bound(self.p, self.k, bound)?)
    }
}

impl Range {
    fn echo(&self) -> String {
        let mut s = format!("--from {} --to {}", self.from, self.to);
        if let Some(c) = &self.checkpoint {
            s.push_str(&format!(" --checkpoint {}", c.display()));
        }
        s
    }
}

fn base_p(m: &PrimePowerModulus, v: u64) -> String {
    encode_value(&BigUint::from(v), m.p(), m.k())
}

fn core(m: &PrimePowerModulus, out: &mut Emitter) -> Result<()> {
    let t = build_core_table(m)?;
    for n in 1..t.p() {
        out.row(fields! {
            "n" => n,
            "core" => encode_base_p(&t.core_at(n)),
            "carry" => t.carries[n as usize - 1],
            "increment" => encode_base_p(t.increment(n)),
        })?;
    }
    out.summary(
        true,
        fields! {
            "p" => t.p(),
            "k" => t.k(),
            "zero_carries" => t.zero_carries(),
            "distinct_increments_first_half" => t.distinct_first_half(),
            "half" => half(t.p()),
        },
    )?;
    Ok(())
}

fn increments(m: &PrimePowerModulus, i: u32, out: &mut Emitter) -> Result<()> {
    let e = integer_increments(m, i)?;
    for (n, v) in (1u64..).zip(&e) {
        out.row(fields! {"n" => n, "increment" => encode_base_p(v)})?;
    }
    let h = half(m.p_for_tables()?) as usize;
    let distinct = e[..h.min(e.len())].iter().map(Residue::value).collect::<std::collections::HashSet<_>>();
    out.summary(
        true,
        fields! {"i" => i, "distinct_first_half" => distinct.len(), "half" => h},
    )?;
    Ok(())
}

fn kp(from: u64, to: u64, out: &mut Emitter) -> Result<()> {
    let primes = odd_primes_between(from, to);
    let results: Vec<_> = primes.par_iter().map(|&p| (p, critical_precision(p))).collect();
    let mut rows = 0;
    let mut skipped = Vec::new();
    for (p, r) in results {
        match r {
            Ok(cp) => {
                out.row(fields! {
                    "p" => p,
                    "kp" => cp.kp,
                    "profile" => cp.distinct_counts.iter().map(|(k, c)| (k.to_string(), *c)).collect::<BTreeMap<_, _>>(),
                })?;
                rows += 1;
            }
            Err(e @ Error::Oversize { .. }) => {
                out.warning(format!("p = {p} skipped: {e}"))?;
                skipped.push(p);
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.summary(true, fields! {"primes" => rows, "skipped" => skipped})?;
    Ok(())
}

fn pairsums(m: &PrimePowerModulus, out: &mut Emitter) -> Result<()> {
    let core = core_pairsum_count(m)?;
    let below = core.at_or_above_kp() == Some(false);
    let expected = if below { core.predicted } else { core.full_count };
    let core_ok = core.observed == core.predicted && core.coset_closed && core.observed == expected;
    out.row(fields! {
        "set" => "core",
        "observed" => core.observed,
        "predicted" => core.predicted,
        "full" => core.full_count,
        "kp" => core.kp,
        "note" => if below { Value::from("k < K_p") } else { Value::Null },
    })?;
    let mut ok = core_ok;
    let mut fields = fields! {"core_ok" => core_ok};
    if m.k() >= 2 {
        let f = fermat_pairsum_count(m)?;
        out.row(fields! {
            "set" => "fermat",
            "observed" => f.observed_total,
            "predicted" => f.predicted,
            "units" => f.observed_units,
            "nonunits" => f.observed_nonunits,
            "sampled" => f.sampled,
        })?;
        ok &= f.units_hold();
        fields.insert("fermat_units_ok".into(), f.units_hold().into());
        fields.insert("fermat_literal_ok".into(), serde_json::json!(f.literal_holds()));
    }
    out.summary(ok, fields)?;
    Ok(())
}

fn waring(m: &PrimePowerModulus, max_t: usize, out: &mut Emitter) -> Result<()> {
    let sums = sumset_levels(m, max_t.max(4))?;
    let report = coverage(m, &sums)?;
    for t in 1..=max_t.max(4) {
        out.row(fields! {"t" => t, "size" => sums.level(t).count()})?;
    }
    let witnesses: BTreeMap<String, String> = report
        .witnesses
        .values()
        .map(|w| {
            let parts: Vec<String> = w.summands.iter().map(|&f| base_p(m, f)).collect();
            (base_p(m, w.target), parts.join("+"))
        })
        .collect();
    out.summary(
        report.theorem_holds,
        fields! {
            "modulus" => sums.modulus(),
            "theorem_holds" => report.theorem_holds,
            "disjoint_3_4" => report.disjoint_3_4,
            "f3_in_f4" => report.conjecture_f3_in_f4,
            "zero_in_2" => report.zero_in_2,
            "multiples_in_3" => report.n0_covered_by_3,
            "unit_multiples_in_3" => report.lemma_scope_covered,
            "missing_multiples" => report.missing_multiples.iter().map(|&x| base_p(m, x)).collect::<Vec<_>>(),
            "witnesses" => witnesses,
        },
    )?;
    Ok(())
}

fn divisors(p: u64, k_max: u32, family: Family, m_exp: u32, out: &mut Emitter) -> Result<()> {
    let pb = BigUint::from(p);
    let value = match family {
        Family::SquareMinusOne => &pb * &pb - 1u32,
        Family::SquarePlusOne => Note5Family::SquarePlusOne.value(p)?,
        Family::EvenPowerMinusOne => Note5Family::EvenPowerMinusOne(m_exp).value(p)?,
    };
    let audits = audit_value(p, &value, k_max)?;
    let m3 = PrimePowerModulus::new(p, 3)?;
    for a in &audits {
        out.row(fields! {
            "r" => a.r.to_string(),
            "cofactor" => a.cofactor.to_string(),
            "r_mod_p3" => encode_base_p(&m3.residue(a.r.clone())),
            "order_g3" => a.order_in_g3.to_string(),
            "exceptional_p2" => a.core_mod_p2,
            "core_p3" => a.core_mod_p3,
            "trivial" => a.trivial,
        })?;
    }
    let ok = noncore_mod_p3(&audits);
    let exceptional: Vec<String> = audits
        .iter()
        .filter(|a| a.core_mod_p2 && !a.trivial && a.r != value)
        .map(|a| a.r.to_string())
        .collect();
    out.summary(
        ok,
        fields! {
            "value" => value.to_string(),
            "divisors" => audits.len(),
            "exceptional_p2" => exceptional,
            "all_noncore_p3" => ok,
        },
    )?;
    Ok(())
}

/// Carries output errors out of a library callback.
struct Sink<'a, 'b> {
    out: &'a mut Emitter<'b>,
    failed: Option<io::Error>,
}

impl Sink<'_, '_> {
    fn push(&mut self, fields: serde_json::Map<String, Value>) -> residuum::Result<()> {
        self.out.row(fields).map_err(|e| {
            let msg = e.to_string();
            self.failed = Some(e);
            Error::Checkpoint(format!("output: {msg}"))
        })?;
        // Rows must be on disk before the checkpoint moves past them.
        self.out.flush().map_err(|e| Error::Checkpoint(format!("output: {e}")))
    }

    fn finish<T>(self, r: residuum::Result<T>) -> Result<T> {
        match (self.failed, r) {
            (Some(e), _) => Err(e.into()),
            (None, r) => Ok(r?),
        }
    }
}

fn scan(kind: &ScanKind, out: &mut Emitter) -> Result<()> {
    let range = match kind {
        ScanKind::Wieferich { range, .. }
        | ScanKind::Exceptions { range }
        | ScanKind::Note4 { range, .. } => range,
    };
    let cp = range.checkpoint.as_ref().map(Checkpoint::new);
    let mut hits = 0u64;
    let mut sink = Sink { out, failed: None };
    let (result, mut extra, ok) = match kind {
        ScanKind::Wieferich { base, .. } => {
            let mut scanner = WieferichScanner::new(*base)?;
            let r = run_scan(range.from, range.to, cp.as_ref(), |ps| scanner.block(ps), |row| {
                hits += 1;
                sink.push(fields! {"p" => row.p, "base" => row.base, "residue" => row.residue})
            });
            let extra = fields! {"cross_checks" => scanner.cross_checks};
            (r, extra, true)
        }
        ScanKind::Exceptions { .. } => {
            let r = run_scan(range.from, range.to, cp.as_ref(), |ps| Ok(exception_block(ps)), |row| {
                hits += 1;
                sink.push(fields! {"p" => row.p, "r" => row.r, "all" => row.all})
            });
            (r, fields! {}, true)
        }
        ScanKind::Note4 { k, .. } => {
            let k = *k;
            let r = run_scan(
                range.from,
                range.to,
                cp.as_ref(),
                |ps| {
                    let reports = ps
                        .par_iter()
                        .map(|&p| conjecture_note4(p, k))
                        .collect::<residuum::Result<Vec<_>>>()?;
                    Ok(reports.into_iter().filter(|r| !r.satisfied).collect())
                },
                |rep| {
                    hits += 1;
                    let classes: Vec<String> = rep
                        .verdicts
                        .iter()
                        .map(|v| {
                            let tag = match v.class {
                                GeneratorClass::PrimitiveRoot => "primitive",
                                GeneratorClass::HalfGroupNoMinusOne => "half",
                                GeneratorClass::Other if v.index == 2u32.into() => "half_with_minus_one",
                                GeneratorClass::Other => "other",
                            };
                            format!("{}:{tag}/{}", v.g, v.index)
                        })
                        .collect();
                    sink.push(fields! {"p" => rep.p, "k" => rep.k, "divisors" => classes})
                },
            );
            (r, fields! {"k" => k}, false)
        }
    };
    let summary = sink.finish(result)?;
    let ok = ok || hits == 0;
    let mut fields = fields! {
        "rows" => hits,
        "primes" => summary.primes,
        "blocks" => summary.blocks,
        "started_at" => summary.started_at,
    };
    fields.append(&mut extra);
    out.summary(ok, fields)?;
    Ok(())
}

fn decompose(m: &PrimePowerModulus, text: &str, out: &mut Emitter) -> Result<()> {
    let x = decode_base_p(text, m)?;
    let value = x.to_u64().ok_or(Error::Oversize {
        size: m.modulus().clone(),
        bound: m.table_bound(),
    })?;
    let sums = sumset_levels(m, 4)?;
    let level = sums.min_level(value);
    let witness = match level {
        Some(t) => witness_with_bases(m, &sums, value, t)?,
        None => None,
    };
    let (core_part, ext_part, ok) = if x.is_unit() {
        let (a, b) = decompose_unit(&x)?;
        let ok = &a * &b == x && is_core(&a);
        (Value::from(encode_base_p(&a)), Value::from(encode_base_p(&b)), ok)
    } else {
        (Value::Null, Value::Null, true)
    };
    let fermat = SubgroupDescriptor::pth_powers(m)?.contains(&x);
    out.row(fields! {
        "residue" => encode_base_p(&x),
        "decimal" => value,
        "core" => is_core(&x),
        "pth_power" => fermat,
        "core_part" => core_part,
        "ext_part" => ext_part,
        "level" => level,
        "summands" => witness.as_ref().map(|w| w.summands.iter().map(|&f| base_p(m, f)).collect::<Vec<_>>()),
        "bases" => witness.as_ref().map(|w| w.bases.clone()),
    })?;
    out.summary(ok, fields! {})?;
    Ok(())
}

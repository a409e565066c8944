//! Command-line front end and the evaluation sweep driver.
//!
//! The `wavemark` binary is a thin wrapper around [`run`]; every command is
//! also callable as a library function writing to any [`Write`] sink.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 data error (I/O,
//! malformed image, capacity), 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::attacks::AttackSpec;
use crate::error::{Error, Result};
use crate::image_io::{load_pgm, save_pgm, Image};
use crate::keystream::{payload_bits, WatermarkKey};
use crate::metrics::{self, MetricsReport};
use crate::synth::{self, SyntheticKind};
use crate::watermark::{
    self, bits_to_string, capacity, declared_length, encode_message, EmbedParams, Message,
    DEFAULT_SCALE, HEADER_BITS,
};
use crate::wave_atom;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidKey(_)
        | Error::InvalidAttack(_)
        | Error::InvalidStrength(_)
        | Error::NegativeSigma(_)
        | Error::QualityOutOfRange(_)
        | Error::InvalidBound
        | Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

pub const DEFAULT_ALPHAS: [f64; 6] = [1.5, 2.0, 2.5, 3.0, 3.5, 5.0];

/// Default attack list: no attack, JPEG at 100/90/80/70, AWGN at sigma
/// 2/3.5/5/10.
pub fn default_attacks() -> Vec<AttackSpec> {
    let mut out = vec![AttackSpec::None];
    out.extend([100, 90, 80, 70].map(|quality| AttackSpec::Jpeg { quality }));
    out.extend([2.0, 3.5, 5.0, 10.0].map(|sigma| AttackSpec::Awgn {
        sigma,
        noise_seed: 0,
    }));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KeyMode {
    /// Same key for every image.
    Fixed,
    /// `key_i = base.derive(i)`.
    #[default]
    PerImage,
}

/// Where a corpus image comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum CorpusEntry {
    File(PathBuf),
    Synthetic {
        kind: SyntheticKind,
        side: usize,
        seed: u64,
    },
}

impl CorpusEntry {
    pub fn name(&self) -> String {
        match self {
            CorpusEntry::File(p) => p.display().to_string(),
            CorpusEntry::Synthetic { kind, .. } => format!("synth-{kind}"),
        }
    }

    pub fn load(&self) -> Result<Image> {
        match self {
            CorpusEntry::File(p) => load_pgm(p),
            CorpusEntry::Synthetic { kind, side, seed } => synth::generate(*kind, *side, *seed),
        }
    }
}

/// Full description of an evaluation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub corpus: Vec<CorpusEntry>,
    pub alphas: Vec<f64>,
    pub attacks: Vec<AttackSpec>,
    pub message_bits: usize,
    pub key: WatermarkKey,
    pub key_mode: KeyMode,
    pub noise_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            corpus: Vec::new(),
            alphas: DEFAULT_ALPHAS.to_vec(),
            attacks: default_attacks(),
            message_bits: 64,
            key: WatermarkKey(0x5EED),
            key_mode: KeyMode::PerImage,
            noise_seed: 1,
        }
    }
}

/// On-disk TOML form of [`SweepConfig`]. Every field is optional.
#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    corpus: Option<Vec<PathBuf>>,
    synthetic: Option<Vec<String>>,
    synthetic_size: Option<usize>,
    synthetic_seed: Option<u64>,
    alphas: Option<Vec<f64>>,
    attacks: Option<Vec<String>>,
    message_bits: Option<usize>,
    key: Option<String>,
    key_mode: Option<KeyMode>,
    noise_seed: Option<u64>,
}

impl SweepConfig {
    /// Standard five-image synthetic corpus at side `side`.
    pub fn synthetic_corpus(side: usize, seed: u64) -> Vec<CorpusEntry> {
        SyntheticKind::CORPUS
            .into_iter()
            .enumerate()
            .map(|(i, kind)| CorpusEntry::Synthetic {
                kind,
                side,
                seed: seed.wrapping_add(i as u64),
            })
            .collect()
    }

    /// Parses the TOML sweep description. Relative corpus paths resolve
    /// against `base_dir`.
    ///
    /// ```toml
    /// corpus = ["images/lena.pgm"]
    /// synthetic = ["gradient", "phantom"]   # or ["corpus"] for all five
    /// alphas = [1.5, 2.0, 5.0]
    /// attacks = ["none", "jpeg:70", "awgn:10"]
    /// message_bits = 64
    /// key = "0x5eed"
    /// key_mode = "per-image"                # or "fixed"
    /// noise_seed = 1
    /// ```
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let file: SweepFile =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        let mut cfg = SweepConfig::default();
        let side = file.synthetic_size.unwrap_or(512);
        let seed = file.synthetic_seed.unwrap_or(0);
        for p in file.corpus.unwrap_or_default() {
            let path = if p.is_absolute() { p } else { base_dir.join(p) };
            cfg.corpus.push(CorpusEntry::File(path));
        }
        for (i, name) in file.synthetic.unwrap_or_default().iter().enumerate() {
            if name == "corpus" {
                cfg.corpus.extend(Self::synthetic_corpus(side, seed));
            } else {
                cfg.corpus.push(CorpusEntry::Synthetic {
                    kind: name.parse()?,
                    side,
                    seed: seed.wrapping_add(i as u64),
                });
            }
        }
        if let Some(alphas) = file.alphas {
            cfg.alphas = alphas;
        }
        if let Some(attacks) = file.attacks {
            cfg.attacks = attacks
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<AttackSpec>>>()?;
        }
        if let Some(bits) = file.message_bits {
            cfg.message_bits = bits;
        }
        if let Some(key) = file.key {
            cfg.key = key.parse()?;
        }
        if let Some(mode) = file.key_mode {
            cfg.key_mode = mode;
        }
        if let Some(seed) = file.noise_seed {
            cfg.noise_seed = seed;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpus.is_empty() {
            return Err(Error::Config("empty corpus".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("no alphas".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidStrength(a));
        }
        if self.attacks.is_empty() {
            return Err(Error::Config("no attacks".into()));
        }
        if self.message_bits == 0 {
            return Err(Error::Config("message_bits must be at least 1".into()));
        }
        Ok(())
    }

    pub fn image_key(&self, index: usize) -> WatermarkKey {
        match self.key_mode {
            KeyMode::Fixed => self.key,
            KeyMode::PerImage => self.key.derive(index as u64),
        }
    }

    /// Attack for a cell, with its AWGN seed resolved.
    pub fn cell_attack(&self, image: usize, attack: usize) -> AttackSpec {
        let cell = (image * self.attacks.len() + attack) as u64;
        self.attacks[attack].with_noise_seed(WatermarkKey(self.noise_seed).derive(cell).0)
    }
}

/// One data row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub image: String,
    pub alpha: f64,
    pub attack: AttackSpec,
    pub key: WatermarkKey,
    pub bits: usize,
    pub outcome: std::result::Result<MetricsReport, String>,
}

/// Mean over the images of one `(alpha, attack)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAggregate {
    pub alpha: f64,
    pub attack: AttackSpec,
    pub bits: usize,
    pub images: usize,
    pub ber_percent: f64,
    pub mse: f64,
    pub psnr_db: f64,
    pub nc: f64,
    pub histogram_l1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
}

fn attack_cells(
    cfg: &SweepConfig,
    image_index: usize,
    name: &str,
    cover: &Result<Image>,
    alpha: f64,
) -> Vec<SweepRow> {
    let key = cfg.image_key(image_index);
    let bits = payload_bits(key, cfg.message_bits);
    let params = EmbedParams::with_alpha(alpha);
    let marked = cover.as_ref().map_err(|e| e.to_string()).and_then(|c| {
        watermark::embed(c, key, &params, &Message::from_bits(bits.clone()))
            .map_err(|e| e.to_string())
    });
    (0..cfg.attacks.len())
        .map(|a| {
            let attack = cfg.cell_attack(image_index, a);
            let outcome = marked.clone().and_then(|wm| {
                let cover = cover.as_ref().map_err(|e| e.to_string())?;
                let attacked = attack.apply(&wm).map_err(|e| e.to_string())?;
                let got = watermark::extract(&attacked, key, &params, bits.len())
                    .map_err(|e| e.to_string())?;
                MetricsReport::compute(cover, &wm, &bits, &got).map_err(|e| e.to_string())
            });
            SweepRow {
                image: name.to_string(),
                alpha,
                attack,
                key,
                bits: bits.len(),
                outcome,
            }
        })
        .collect()
}

/// Runs every (image, alpha, attack) cell. Cells run in parallel; rows come
/// back in (image, alpha, attack) order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let covers: Vec<(String, Result<Image>)> = cfg
        .corpus
        .par_iter()
        .map(|entry| (entry.name(), entry.load()))
        .collect();
    let jobs: Vec<(usize, f64)> = (0..covers.len())
        .flat_map(|i| cfg.alphas.iter().map(move |&a| (i, a)))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(i, alpha)| attack_cells(cfg, i, &covers[i].0, &covers[i].1, alpha))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let histograms: Vec<Option<[u64; 256]>> = covers
        .iter()
        .map(|(_, c)| c.as_ref().ok().map(metrics::histogram))
        .collect();
    let mut aggregates = Vec::new();
    for &alpha in &cfg.alphas {
        for a in 0..cfg.attacks.len() {
            let cells: Vec<(usize, &MetricsReport)> = rows
                .iter()
                .enumerate()
                .filter(|(idx, r)| r.alpha == alpha && idx % cfg.attacks.len() == a)
                .filter_map(|(idx, r)| {
                    let image = idx / (cfg.attacks.len() * cfg.alphas.len());
                    r.outcome.as_ref().ok().map(|m| (image, m))
                })
                .collect();
            if cells.is_empty() {
                continue;
            }
            let n = cells.len() as f64;
            let mean = |f: &dyn Fn(&MetricsReport) -> f64| {
                cells.iter().map(|(_, m)| f(m)).sum::<f64>() / n
            };
            let histogram_l1 = cells
                .iter()
                .filter_map(|(i, m)| {
                    histograms[*i].map(|h| metrics::histogram_distance(&h, &m.histogram) as f64)
                })
                .sum::<f64>()
                / n;
            aggregates.push(SweepAggregate {
                alpha,
                attack: cfg.attacks[a],
                bits: cfg.message_bits,
                images: cells.len(),
                ber_percent: mean(&|m| m.ber_percent),
                mse: mean(&|m| m.mse),
                psnr_db: mean(&|m| m.psnr_db),
                nc: mean(&|m| m.nc),
                histogram_l1,
            });
        }
    }
    Ok(SweepResult { rows, aggregates })
}

pub const CSV_HEADER: [&str; 13] = [
    "image",
    "alpha",
    "attack_kind",
    "attack_param",
    "noise_seed",
    "key",
    "bits",
    "ber_percent",
    "mse",
    "psnr_db",
    "nc",
    "histogram_l1",
    "error",
];

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        v.to_string()
    }
}

/// Serializes a sweep. Data rows first, then one `MEAN` row per
/// `(alpha, attack)`. `histogram_l1` is only filled on aggregate rows.
pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in &result.rows {
        let seed = row
            .attack
            .noise_seed()
            .map(|s| s.to_string())
            .unwrap_or_default();
        let mut rec = vec![
            row.image.clone(),
            fmt_f64(row.alpha),
            row.attack.kind().to_string(),
            row.attack.parameter(),
            seed,
            row.key.to_string(),
            row.bits.to_string(),
        ];
        match &row.outcome {
            Ok(m) => {
                rec.extend([m.ber_percent, m.mse, m.psnr_db, m.nc].map(fmt_f64));
                rec.extend([String::new(), String::new()]);
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 5));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    for agg in &result.aggregates {
        let mut rec = vec![
            "MEAN".to_string(),
            fmt_f64(agg.alpha),
            agg.attack.kind().to_string(),
            agg.attack.parameter(),
            String::new(),
            String::new(),
            agg.bits.to_string(),
        ];
        rec.extend(
            [agg.ber_percent, agg.mse, agg.psnr_db, agg.nc, agg.histogram_l1].map(fmt_f64),
        );
        rec.push(String::new());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(
    name = "wavemark",
    version,
    about = "Wave atom spread-spectrum watermarking for grayscale PGM images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a message into a PGM image.
    Embed(EmbedArgs),
    /// Blindly extract watermark bits from a PGM image.
    Extract(ExtractArgs),
    /// Apply a JPEG-style or AWGN attack.
    Attack(AttackArgs),
    /// Run an (image x alpha x attack) evaluation sweep to CSV.
    Evaluate(EvaluateArgs),
    /// Write the synthetic test corpus as PGM files.
    Synth(SynthArgs),
    /// Dump wave atom coefficients as scale,m1,m2,n1,n2,value rows.
    Dump(DumpArgs),
}

fn parse_key(s: &str) -> std::result::Result<WatermarkKey, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_key)]
    key: WatermarkKey,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Text payload (16-bit length header + UTF-8 bytes).
    #[arg(long, conflicts_with = "payload_bits")]
    message: Option<String>,
    /// Embed the key-derived pseudo-random payload of this many bits, as
    /// used by `evaluate`.
    #[arg(long)]
    payload_bits: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: u32,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_key)]
    key: WatermarkKey,
    /// Bits to extract; defaults to the image capacity and decodes the
    /// length header.
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: u32,
}

#[derive(Debug, Args)]
struct AttackArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// none, jpeg or awgn
    #[arg(long)]
    attack: String,
    /// Quality for jpeg, sigma for awgn.
    #[arg(long, allow_negative_numbers = true)]
    param: Option<f64>,
    #[arg(long, default_value_t = 0)]
    noise_seed: u64,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// TOML sweep description.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra corpus images.
    #[arg(long = "in")]
    inputs: Vec<PathBuf>,
    /// Add the built-in synthetic corpus.
    #[arg(long)]
    synthetic: bool,
    #[arg(long, default_value_t = 512)]
    synthetic_size: usize,
    #[arg(long, value_parser = parse_key)]
    key: Option<WatermarkKey>,
    #[arg(long)]
    noise_seed: Option<u64>,
    #[arg(long)]
    bits: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the rough texture image.
    #[arg(long)]
    with_texture: bool,
}

#[derive(Debug, Args)]
struct DumpArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// commands

/// Embeds `payload` and prints capacity and imperceptibility figures.
pub fn cmd_embed(
    input: &Path,
    output: &Path,
    key: WatermarkKey,
    params: &EmbedParams,
    payload: &Message,
    out: &mut dyn Write,
) -> Result<Image> {
    let cover = load_pgm(input)?;
    let cap = capacity(cover.side(), params.scale)?;
    let marked = watermark::embed(&cover, key, params, payload)?;
    save_pgm(&marked, output)?;
    let mse = metrics::mse(&cover, &marked)?;
    let report = format!(
        "capacity_bits: {cap}\nembedded_bits: {}\nalpha: {}\nmse: {}\npsnr_db: {}\n",
        payload.len(),
        params.alpha,
        fmt_f64(mse),
        fmt_f64(metrics::psnr_from_mse(mse)),
    );
    out.write_all(report.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(marked)
}

/// What [`cmd_extract`] recovered.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub bits: Vec<bool>,
    /// Present when the length header is consistent with the bit count.
    pub text: Option<Vec<u8>>,
}

/// Extracts `bit_count` bits (or the full capacity) and decodes the text
/// payload when its header fits.
pub fn cmd_extract(
    input: &Path,
    key: WatermarkKey,
    params: &EmbedParams,
    bit_count: Option<usize>,
    out: &mut dyn Write,
) -> Result<Extraction> {
    let img = load_pgm(input)?;
    let cap = capacity(img.side(), params.scale)?;
    let wanted = bit_count.unwrap_or(cap);
    let bits = watermark::extract(&img, key, params, wanted)?;
    let mut report = String::new();
    let mut text = None;
    match declared_length(&bits) {
        Ok(len) if HEADER_BITS + 8 * len <= bits.len() => {
            let used = HEADER_BITS + 8 * len;
            let payload = watermark::decode_message(&bits[..used])?;
            report.push_str(&format!("bits: {}\n", bits_to_string(&bits[..used])));
            report.push_str(&format!("text: {}\n", String::from_utf8_lossy(&payload)));
            text = Some(payload);
        }
        Ok(len) => {
            report.push_str(&format!("bits: {}\n", bits_to_string(&bits)));
            report.push_str(&format!(
                "header: undecodable (declares {len} bytes, only {} bits extracted)\n",
                bits.len()
            ));
        }
        Err(_) => {
            report.push_str(&format!("bits: {}\n", bits_to_string(&bits)));
            report.push_str("header: undecodable (fewer than 16 bits)\n");
        }
    }
    out.write_all(report.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(Extraction { bits, text })
}

/// Applies one attack and prints PSNR against the input.
pub fn cmd_attack(
    input: &Path,
    output: &Path,
    spec: AttackSpec,
    out: &mut dyn Write,
) -> Result<Image> {
    let img = load_pgm(input)?;
    let attacked = spec.apply(&img)?;
    save_pgm(&attacked, output)?;
    let psnr = metrics::psnr(&img, &attacked)?;
    writeln!(out, "attack: {spec}\npsnr_db: {}", fmt_f64(psnr))
        .map_err(|e| Error::io("<stdout>", e))?;
    Ok(attacked)
}

/// Runs a sweep and writes its CSV to `csv_path` (or `out`).
pub fn cmd_evaluate(
    cfg: &SweepConfig,
    csv_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<SweepResult> {
    let result = run_sweep(cfg)?;
    match csv_path {
        Some(path) => {
            let mut buf = Vec::new();
            write_csv(&result, &mut buf)?;
            fs::write(path, buf).map_err(|e| Error::io(path, e))?;
            let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
            writeln!(
                out,
                "rows: {}\naggregates: {}\nfailed_cells: {failed}\ncsv: {}",
                result.rows.len(),
                result.aggregates.len(),
                path.display()
            )
            .map_err(|e| Error::io("<stdout>", e))?;
        }
        None => write_csv(&result, &mut *out)?,
    }
    Ok(result)
}

fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut kinds = SyntheticKind::CORPUS.to_vec();
    if args.with_texture {
        kinds.push(SyntheticKind::Texture);
    }
    for (i, kind) in kinds.into_iter().enumerate() {
        let img = synth::generate(kind, args.size, args.seed.wrapping_add(i as u64))?;
        let path = args.out.join(format!("synth-{kind}.pgm"));
        save_pgm(&img, &path)?;
        writeln!(out, "{}", path.display()).map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

fn cmd_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<()> {
    let coeffs = wave_atom::forward(&load_pgm(&args.input)?)?;
    let text = coeffs.debug_dump();
    match &args.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Embed(a) => {
            let payload = match (&a.message, a.payload_bits) {
                (_, Some(n)) => Message::from_bits(payload_bits(a.key, n)),
                (Some(text), None) => encode_message(text.as_bytes())?,
                (None, None) => {
                    return Err(Error::Config("one of --message or --payload-bits is required".into()))
                }
            };
            let params = EmbedParams {
                alpha: a.alpha,
                scale: a.scale,
                ..EmbedParams::default()
            };
            cmd_embed(&a.input, &a.out, a.key, &params, &payload, out).map(drop)
        }
        Command::Extract(a) => {
            let params = EmbedParams {
                scale: a.scale,
                threshold: a.threshold,
                ..EmbedParams::default()
            };
            cmd_extract(&a.input, a.key, &params, a.bits, out).map(drop)
        }
        Command::Attack(a) => {
            let spec = AttackSpec::from_parts(&a.attack, a.param, a.noise_seed)?;
            cmd_attack(&a.input, &a.out, spec, out).map(drop)
        }
        Command::Evaluate(a) => {
            let mut cfg = match &a.config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                    let base = path.parent().unwrap_or(Path::new("."));
                    SweepConfig::from_toml(&text, base)?
                }
                None => SweepConfig::default(),
            };
            cfg.corpus
                .extend(a.inputs.iter().cloned().map(CorpusEntry::File));
            if a.synthetic {
                cfg.corpus
                    .extend(SweepConfig::synthetic_corpus(a.synthetic_size, 0));
            }
            if let Some(k) = a.key {
                cfg.key = k;
            }
            if let Some(s) = a.noise_seed {
                cfg.noise_seed = s;
            }
            if let Some(b) = a.bits {
                cfg.message_bits = b;
            }
            cmd_evaluate(&cfg, a.csv.as_deref(), out).map(drop)
        }
        Command::Synth(a) => cmd_synth(&a, out),
        Command::Dump(a) => cmd_dump(&a, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_matches_documented_sweep() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.alphas, vec![1.5, 2.0, 2.5, 3.0, 3.5, 5.0]);
        assert_eq!(cfg.attacks.len(), 9);
        assert_eq!(cfg.message_bits, 64);
        assert_eq!(cfg.key_mode, KeyMode::PerImage);
    }

    #[test]
    fn toml_config() {
        let text = r#"
            corpus = ["a.pgm", "/abs/b.pgm"]
            synthetic = ["corpus", "texture"]
            synthetic_size = 128
            alphas = [2.0]
            attacks = ["none", "jpeg:80", "awgn:5"]
            message_bits = 32
            key = "0x10"
            key_mode = "fixed"
            noise_seed = 9
        "#;
        let cfg = SweepConfig::from_toml(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.corpus.len(), 2 + 5 + 1);
        assert_eq!(cfg.corpus[0], CorpusEntry::File("/data/a.pgm".into()));
        assert_eq!(cfg.corpus[1], CorpusEntry::File("/abs/b.pgm".into()));
        assert_eq!(cfg.corpus[7].name(), "synth-texture");
        assert_eq!(cfg.alphas, vec![2.0]);
        assert_eq!(cfg.attacks[1], AttackSpec::Jpeg { quality: 80 });
        assert_eq!(cfg.message_bits, 32);
        assert_eq!(cfg.key, WatermarkKey(16));
        assert_eq!(cfg.image_key(3), WatermarkKey(16));
        assert_eq!(cfg.noise_seed, 9);
    }

    #[test]
    fn bad_configs() {
        let base = Path::new(".");
        assert!(matches!(
            SweepConfig::from_toml("colour = true", base),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            SweepConfig::from_toml("synthetic = [\"lena\"]", base),
            Err(Error::Config(_))
        ));
        assert!(SweepConfig::from_toml("attacks = [\"jpeg:0\"]", base).is_err());
        let cfg = SweepConfig::default();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let cfg = SweepConfig {
            corpus: SweepConfig::synthetic_corpus(128, 0),
            alphas: vec![-1.0],
            ..SweepConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidStrength(_))));
    }

    #[test]
    fn per_image_keys_differ() {
        let cfg = SweepConfig::default();
        assert_ne!(cfg.image_key(0), cfg.image_key(1));
        assert_eq!(cfg.image_key(2), cfg.key.derive(2));
    }

    #[test]
    fn failed_cells_become_error_rows() {
        let cfg = SweepConfig {
            corpus: vec![
                CorpusEntry::File("/nonexistent/x.pgm".into()),
                CorpusEntry::Synthetic {
                    kind: SyntheticKind::Gradient,
                    side: 128,
                    seed: 0,
                },
            ],
            alphas: vec![2.0],
            attacks: vec![AttackSpec::None],
            message_bits: 16,
            ..SweepConfig::default()
        };
        let res = run_sweep(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert!(res.rows[0].outcome.is_err());
        assert_eq!(res.rows[1].outcome.as_ref().unwrap().ber_percent, 0.0);
        assert_eq!(res.aggregates.len(), 1);
        assert_eq!(res.aggregates[0].images, 1);
        let mut buf = Vec::new();
        write_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].contains("/nonexistent/x.pgm"));
        assert!(lines[3].starts_with("MEAN,2,none,"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidKey("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::QualityOutOfRange(0)), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::CapacityExceeded {
                requested: 2,
                capacity: 1
            }),
            EXIT_DATA
        );
    }
}

//! Run configuration and output framing.
//!
//! A [`RunConfig`] fully determines a run. Every output file embeds a header
//! `{format_version, config, seed}`: as a top-level object wrapping JSON
//! payloads, as a `# ` comment line in CSV, and as an XML comment in SVG.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::brownian_map::{sidecar_path, write_row, zero_class_check, MapMetricSample, RowSidecar};
use crate::circle_tree::{build_circle_tree, TreeFile};
use crate::error::{Error, Result};
use crate::estimators::{
    box_count_points, box_count_segments, dyadic_scales, endpoint_set, ladder_set,
    lamination_segments, DimensionEstimate,
};
use crate::excursion::{sample_dyck_excursion, DiscreteExcursion, ExcursionFile};
use crate::lamination::{
    build_lamination_with, check_noncrossing, lamination_from_coding, svg_string, ChordRule,
    DiskModel, Lamination, Relation,
};
use crate::planar_maps::{
    ball_growth_profile, bottleneck_scan, growth_window, sample_2k_angulation,
    sample_quadrangulation, LabeledMap,
};
use crate::snake::{reroot, sample_labels, IncrementLaw};
use crate::verify::{map_invariants, run_suite};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Inclusive seed range `"a..b"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<String>,
    /// Inclusive dyadic level range `"a..b"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<PathBuf>,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            format_version: FORMAT_VERSION,
            command: command.to_string(),
            ..Default::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        if cfg.format_version != FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "format_version {} is not {FORMAT_VERSION}",
                cfg.format_version
            )));
        }
        Ok(cfg)
    }

    /// The header embedded in every output.
    pub fn header(&self, seed: Option<u64>) -> Header<'_> {
        Header {
            format_version: self.format_version,
            config: self,
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Header<'a> {
    pub format_version: u32,
    pub config: &'a RunConfig,
    pub seed: Option<u64>,
}

impl Header<'_> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("header serializes")
    }

    /// `{format_version, config, seed, data}` as pretty JSON.
    pub fn wrap_json<T: Serialize>(&self, data: &T) -> Result<String> {
        #[derive(Serialize)]
        struct Framed<'h, 'c, T> {
            #[serde(flatten)]
            header: &'h Header<'c>,
            data: &'h T,
        }
        Ok(serde_json::to_string_pretty(&Framed { header: self, data })? + "\n")
    }

    pub fn csv_comment(&self) -> String {
        format!("# {}\n", self.to_json())
    }

    /// Inserts the header as an XML comment after the opening `<svg ...>` tag.
    pub fn frame_svg(&self, svg: &str) -> String {
        let comment = format!("<!-- {} -->\n", self.to_json().replace("--", "- -"));
        let open = svg.find("<svg").unwrap_or(0);
        match svg[open..].find('>') {
            Some(i) => {
                let cut = open + i + 1;
                format!(
                    "{}\n{}{}",
                    &svg[..cut],
                    comment,
                    svg[cut..].trim_start_matches('\n')
                )
            }
            None => comment + svg,
        }
    }
}

/// Parses an inclusive range `"a..b"` (or a single value `"a"`).
pub fn parse_range(text: &str) -> Result<RangeInclusive<u64>> {
    let bad = || Error::InvalidArgument(format!("range {text:?} is not of the form a..b"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (text, text),
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// What a run produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub report: String,
    /// First witness of a failed validation.
    pub failure: Option<String>,
}

pub const COMMANDS: [&str; 9] = [
    "sample-excursion",
    "sample-map",
    "tree",
    "lamination",
    "render",
    "dim",
    "brownian-map",
    "bottleneck",
    "verify",
];

fn need<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))
}

fn excursion_for(cfg: &RunConfig) -> Result<DiscreteExcursion> {
    match &cfg.input {
        Some(path) => read_excursion(path),
        None => sample_dyck_excursion(need(&cfg.n, "n")?, need(&cfg.seed, "seed")?),
    }
}

/// Reads an excursion file, bare or wrapped in a run header.
pub fn read_excursion(path: &Path) -> Result<DiscreteExcursion> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(data) = value.get_mut("data") {
        value = data.take();
    }
    let file: ExcursionFile = serde_json::from_value(value)?;
    DiscreteExcursion::try_from(file)
}

fn parse_model(text: Option<&str>) -> Result<DiskModel> {
    match text.unwrap_or("klein") {
        "klein" => Ok(DiskModel::Klein),
        "poincare" => Ok(DiskModel::Poincare),
        other => Err(Error::InvalidArgument(format!("unknown model {other:?}"))),
    }
}

fn parse_rule(text: Option<&str>) -> Result<ChordRule> {
    match text.unwrap_or("consecutive") {
        "consecutive" => Ok(ChordRule::Consecutive),
        "all-pairs" => Ok(ChordRule::AllPairs),
        other => Err(Error::InvalidArgument(format!(
            "unknown chord rule {other:?}"
        ))),
    }
}

fn lamination_for(cfg: &RunConfig, e: &DiscreteExcursion) -> Result<Lamination> {
    let rule = parse_rule(cfg.rule.as_deref())?;
    let tree = build_circle_tree(e);
    let mut lam = match cfg.relation.as_deref().unwrap_or("contour") {
        "contour" => build_lamination_with(&tree, rule),
        "label" => {
            let z = sample_labels(&tree, IncrementLaw::Uniform3, e.seed())?;
            lamination_from_coding(z.values(), rule, Relation::Label)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown relation {other:?}"
            )))
        }
    };
    lam.seed = e.seed();
    Ok(lam)
}

fn noncrossing_failure(lam: &Lamination, rule: ChordRule) -> Option<String> {
    if rule == ChordRule::AllPairs {
        return None;
    }
    check_noncrossing(lam)
        .err()
        .map(|(a, b)| format!("chords {}-{} and {}-{} cross", a.a, a.b, b.a, b.b))
}

fn sample_map(n: usize, k: usize, seed: u64) -> Result<LabeledMap> {
    if k == 2 {
        sample_quadrangulation(n, seed)
    } else {
        sample_2k_angulation(n, k, seed)
    }
}

fn dim_csv(header: &Header<'_>, est: &DimensionEstimate) -> String {
    let mut out = header.csv_comment();
    out.push_str(&est.to_csv());
    out.push_str(&format!("slope,{:.6}\n", est.slope));
    out
}

/// Runs the pipeline described by `cfg`, writing its outputs.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.format_version != FORMAT_VERSION {
        return Err(Error::InvalidArgument(format!(
            "format_version {} is not supported",
            cfg.format_version
        )));
    }
    let mut outcome = Outcome::default();
    let emit = |path: PathBuf, text: String, outcome: &mut Outcome| -> Result<()> {
        write_text(&path, &text)?;
        outcome.files.push(path);
        Ok(())
    };
    match cfg.command.as_str() {
        "sample-excursion" => {
            let e = sample_dyck_excursion(need(&cfg.n, "n")?, need(&cfg.seed, "seed")?)?;
            let text = cfg
                .header(Some(e.seed()))
                .wrap_json(&ExcursionFile::from(&e))?;
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            outcome.report = format!("excursion n = {} seed = {}", e.n(), e.seed());
        }
        "tree" => {
            let e = excursion_for(cfg)?;
            let tree = build_circle_tree(&e);
            let text = cfg
                .header(Some(e.seed()))
                .wrap_json(&TreeFile::from(&tree))?;
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            outcome.report = format!("tree with {} vertices", tree.n_vertices());
        }
        "lamination" => {
            let e = excursion_for(cfg)?;
            let lam = lamination_for(cfg, &e)?;
            let text = cfg.header(Some(e.seed())).csv_comment() + &lam.to_csv();
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            outcome.failure = noncrossing_failure(&lam, parse_rule(cfg.rule.as_deref())?);
            outcome.report = format!("{} chords", lam.len());
        }
        "render" => {
            let e = excursion_for(cfg)?;
            let lam = lamination_for(cfg, &e)?;
            let model = parse_model(cfg.model.as_deref())?;
            let svg = svg_string(&lam, model, cfg.width.unwrap_or(800));
            let text = cfg.header(Some(e.seed())).frame_svg(&svg);
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            outcome.report = format!("{} chords rendered", lam.len());
        }
        "dim" => {
            let e = excursion_for(cfg)?;
            let levels = parse_range(cfg.scales.as_deref().unwrap_or("3..9"))?;
            let levels = u32::try_from(*levels.start()).unwrap_or(u32::MAX)
                ..=u32::try_from(*levels.end()).unwrap_or(u32::MAX);
            if *levels.end() > 30 {
                return Err(Error::InvalidArgument("scale levels must be <= 30".into()));
            }
            let scales = dyadic_scales(levels);
            let est = match cfg.target.as_deref().unwrap_or("lamination") {
                "lamination" => {
                    let lam = lamination_for(cfg, &e)?;
                    box_count_segments(&lamination_segments(&lam), &scales)?
                }
                "endpoints" => box_count_points(&endpoint_set(&build_circle_tree(&e)), &scales)?,
                "ladder" => {
                    let h = e.heights();
                    let top = (0..h.len())
                        .max_by_key(|&i| (h[i], std::cmp::Reverse(i)))
                        .unwrap();
                    box_count_points(&ladder_set(&e, top), &scales)?
                }
                other => return Err(Error::InvalidArgument(format!("unknown target {other:?}"))),
            };
            emit(
                need(&cfg.out, "out")?,
                dim_csv(&cfg.header(Some(e.seed())), &est),
                &mut outcome,
            )?;
            outcome.report = format!("slope {:.4} (stderr {:.4})", est.slope, est.stderr);
        }
        "sample-map" => {
            let (n, seed) = (need(&cfg.n, "n")?, need(&cfg.seed, "seed")?);
            let k = cfg.k.unwrap_or(2);
            let lm = sample_map(n, k, seed)?;
            let text = cfg.header(Some(seed)).wrap_json(&lm.map.to_file())?;
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            if let Some(stats) = &cfg.stats {
                let growth = ball_growth_profile(&lm.map, lm.map.root_vertex(), &growth_window(n))?;
                let text = format!(
                    "{}n,seed,exponent\n{n},{seed},{:.6}\n",
                    cfg.header(Some(seed)).csv_comment(),
                    growth.exponent
                );
                emit(stats.clone(), text, &mut outcome)?;
            }
            outcome.failure = map_invariants(&lm, n, k).err();
            outcome.report = format!(
                "{}-angulation: {} faces, {} vertices, {} edges",
                2 * k,
                lm.map.n_faces(),
                lm.map.n_vertices(),
                lm.map.n_edges()
            );
        }
        "brownian-map" => {
            let (n, seed) = (need(&cfg.n, "n")?, need(&cfg.seed, "seed")?);
            let e = sample_dyck_excursion(n, seed)?;
            let tree = build_circle_tree(&e);
            let z = sample_labels(&tree, IncrementLaw::Uniform3, seed)?;
            let r = reroot(&e, &z)?;
            let size = cfg.sample.unwrap_or((2 * n).min(1000));
            let sample = if size == 2 * n {
                MapMetricSample::full(r.z_bar)?
            } else {
                MapMetricSample::stratified(r.z_bar, size, seed)?
            };
            let source = cfg.source.unwrap_or(0);
            let row = sample.d_star_row(source)?;
            let out = need(&cfg.out, "out")?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            write_row(&out, &row)?;
            outcome.files.push(out.clone());
            let side = RowSidecar {
                source,
                sample_size: sample.len(),
                n,
                seed,
                dtype: "i64le".into(),
                times: sample.times().to_vec(),
            };
            emit(
                sidecar_path(&out),
                cfg.header(Some(seed)).wrap_json(&side)?,
                &mut outcome,
            )?;
            outcome.failure = zero_class_check(&sample).err().map(|w| format!("{w:?}"));
            outcome.report = format!(
                "D* row from sample index {source} over {} times",
                sample.len()
            );
        }
        "bottleneck" => {
            let n = need(&cfg.n, "n")?;
            let seeds = parse_range(cfg.seeds.as_deref().unwrap_or("0..99"))?;
            let delta = cfg.delta.unwrap_or(0.3);
            let lmax = cfg.lmax.unwrap_or(4);
            let k = cfg.k.unwrap_or(2);
            let mut text = cfg.header(None).csv_comment() + "n,seed,cycles_found\n";
            let mut hits = 0;
            let total = seeds.clone().count();
            for seed in seeds {
                let lm = sample_map(n, k, seed)?;
                let found = bottleneck_scan(&lm.map, delta, lmax)?.len();
                hits += usize::from(found > 0);
                text.push_str(&format!("{n},{seed},{found}\n"));
            }
            emit(need(&cfg.out, "out")?, text, &mut outcome)?;
            outcome.report = format!("maps with a bottleneck: {hits}/{total}");
        }
        "verify" => {
            let report = run_suite(
                need(&cfg.n, "n")?,
                parse_range(cfg.seeds.as_deref().unwrap_or("0..9"))?,
            )?;
            if let Some(out) = &cfg.out {
                emit(
                    out.clone(),
                    cfg.header(None).wrap_json(&report)?,
                    &mut outcome,
                )?;
            }
            outcome.failure = report
                .first_failure()
                .map(|r| format!("{}: {}", r.name, r.witness.clone().unwrap_or_default()));
            outcome.report = report.to_string();
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown command {other:?}; expected one of {}",
                COMMANDS.join(", ")
            )))
        }
    }
    Ok(outcome)
}

//! The end-to-end run: ingest, heat flow, vineyard, statistics and exports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analytics::{total_persistence, transposition_counts, vine_duration_stats};
use crate::complex::triangulate;
use crate::error::{Error, Result};
use crate::grid::{GridField, Topology};
use crate::heat::{center_difference, mean_absolute_change, run_heat, HeatConfig, HeatRun, HomotopyMode};
use crate::io;
use crate::matching::{bottleneck, vines_distance, wasserstein};
use crate::synth::{self, Pattern};
use crate::vineyard::{build_vineyard_on, EventLog, Vineyard};

/// Where an input field comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    File(PathBuf),
    /// `synth:<pattern>:<n>`, generated from the pipeline seed.
    Synth { pattern: Pattern, n: usize },
}

impl std::str::FromStr for FieldSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("synth:") {
            None => Ok(FieldSource::File(PathBuf::from(s))),
            Some(rest) => {
                let (pattern, n) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Input(format!("expected synth:<pattern>:<n>, got '{s}'")))?;
                let n = n
                    .parse()
                    .map_err(|_| Error::Input(format!("bad mesh side in '{s}'")))?;
                Ok(FieldSource::Synth {
                    pattern: pattern.parse()?,
                    n,
                })
            }
        }
    }
}

impl FieldSource {
    pub fn load(&self, seed: u64) -> Result<GridField> {
        match self {
            FieldSource::File(path) => io::ingest_field(path),
            FieldSource::Synth { pattern, n } => synth::generate(*pattern, *n, seed),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input_f: FieldSource,
    pub input_g: FieldSource,
    pub topology: Topology,
    pub mode: HomotopyMode,
    pub epsilon: f64,
    pub max_steps: usize,
    pub q_list: Vec<f64>,
    pub output_dir: PathBuf,
    /// Seed for synthetic inputs; `g` uses `seed + 1`.
    pub seed: u64,
    pub svg: bool,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        HeatConfig::new(self.epsilon, self.max_steps, self.topology)?;
        if self.q_list.is_empty() {
            return Err(Error::Input("at least one degree q is required".into()));
        }
        if let Some(q) = self.q_list.iter().find(|q| !(**q >= 1.0 && q.is_finite())) {
            return Err(Error::Input(format!("degree q must be finite and >= 1, got {q}")));
        }
        Ok(())
    }
}

pub struct PipelineOutput {
    pub run: HeatRun,
    pub vineyard: Vineyard,
    pub offset: f64,
}

/// Runs the pipeline and writes all artifacts to `cfg.output_dir`.
///
/// Artifacts are staged in a sibling temporary directory and moved into place
/// only once every file has been written, so a failed run leaves nothing behind.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let f = cfg.input_f.load(cfg.seed)?;
    let g = cfg.input_g.load(cfg.seed.wrapping_add(1))?;
    let (u0, offset) = center_difference(&f, &g)?;
    let heat = HeatConfig::new(cfg.epsilon, cfg.max_steps, cfg.topology)?;
    let run = run_heat(&u0, &heat)?;
    let complex = std::sync::Arc::new(triangulate(run.n(), run.topology())?);
    let vineyard = build_vineyard_on(&complex, &f, &run, cfg.mode, EventLog::CountsOnly)?;

    let out = &cfg.output_dir;
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".vineyard-staging")
        .tempdir_in(&parent)
        .map_err(|e| Error::io(&parent, e))?;
    let files = write_artifacts(staging.path(), cfg, &run, &vineyard, offset)?;

    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for name in files {
        let target = out.join(&name);
        fs::rename(staging.path().join(&name), &target).map_err(|e| Error::io(&target, e))?;
    }
    Ok(PipelineOutput {
        run,
        vineyard,
        offset,
    })
}

fn write(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(name.to_string());
    Ok(())
}

fn write_artifacts(
    dir: &Path,
    cfg: &PipelineConfig,
    run: &HeatRun,
    vineyard: &Vineyard,
    offset: f64,
) -> Result<Vec<String>> {
    let mut files = Vec::new();
    for (k, dgms) in vineyard.diagrams.iter().enumerate() {
        write(dir, &format!("diagrams_step_{k}.csv"), &io::diagrams_to_csv(dgms), &mut files)?;
    }
    write(
        dir,
        "vineyard.json",
        &io::vineyard_to_json(&vineyard.vines, &vineyard.endpoint_matching),
        &mut files,
    )?;
    write(dir, "stats.csv", &stats_csv(cfg, run, vineyard, offset)?, &mut files)?;
    write(dir, "matchings.csv", &matchings_csv(cfg, vineyard), &mut files)?;
    if cfg.svg {
        let last = vineyard.diagrams.len() - 1;
        write(dir, "diagrams_step_0.svg", &io::diagrams_svg(&vineyard.diagrams[0], "step 0"), &mut files)?;
        write(
            dir,
            "diagrams_final.svg",
            &io::diagrams_svg(&vineyard.diagrams[last], &format!("step {last}")),
            &mut files,
        )?;
        write(dir, "vineyard.svg", &io::vineyard_svg(&vineyard.vines, "vineyard"), &mut files)?;
    }
    Ok(files)
}

pub const STATS_HEADER: &str = "metric,dim,step,q,value";

fn stats_csv(cfg: &PipelineConfig, run: &HeatRun, vineyard: &Vineyard, offset: f64) -> Result<String> {
    let mut s = format!("{STATS_HEADER}\n");
    let mut row = |metric: &str, dim: Option<usize>, step: Option<usize>, q: Option<f64>, value: f64| {
        let opt = |x: Option<String>| x.unwrap_or_default();
        writeln!(
            s,
            "{metric},{},{},{},{value}",
            opt(dim.map(|d| d.to_string())),
            opt(step.map(|k| k.to_string())),
            opt(q.map(|q| q.to_string()))
        )
        .unwrap();
    };
    row("heat_steps", None, None, None, run.final_step() as f64);
    row("centering_offset", None, None, None, offset);
    for p in 0..2 {
        let count = vineyard.vines.iter().filter(|v| v.dim == p).count();
        row("vine_count", Some(p), None, None, count as f64);
        if let Some(st) = vine_duration_stats(vineyard, p) {
            row("vine_duration_mean", Some(p), None, None, st.mean);
            row("vine_duration_median", Some(p), None, None, st.median);
            row("vine_duration_mode", Some(p), None, None, st.mode as f64);
            row("vine_duration_sd_population", Some(p), None, None, st.sd);
            for (lo, hi, c) in st.histogram {
                row(&format!("vine_duration_bin_{lo}_{hi}"), Some(p), None, None, c as f64);
            }
        }
    }
    for (k, dgms) in vineyard.diagrams.iter().enumerate() {
        for d in dgms {
            for &q in &cfg.q_list {
                row("total_persistence", Some(d.dim), Some(k), Some(q), total_persistence(d, q));
            }
        }
    }
    for k in 1..=run.final_step() {
        row("mean_abs_change", None, Some(k), None, mean_absolute_change(run, k)?);
    }
    for (k, c) in transposition_counts(vineyard).per_step.iter().enumerate() {
        let step = Some(k + 1);
        row("transpositions_total", None, step, None, c.total as f64);
        row("transpositions_no_swap", None, step, None, c.no_swap as f64);
        row("transpositions_type1", None, step, None, c.type1 as f64);
        row("transpositions_type2", None, step, None, c.type2 as f64);
        row("transpositions_type3", None, step, None, c.type3 as f64);
        row("transpositions_vertex_vertex", None, step, None, c.vertex_vertex_total as f64);
    }
    Ok(s)
}

pub const MATCHINGS_HEADER: &str = "measure,dim,q,value";

fn matchings_csv(cfg: &PipelineConfig, vineyard: &Vineyard) -> String {
    let mut s = format!("{MATCHINGS_HEADER}\n");
    let first = &vineyard.diagrams[0];
    let last = &vineyard.diagrams[vineyard.diagrams.len() - 1];
    for p in 0..2 {
        let (a, b) = (&first[p], &last[p]);
        writeln!(s, "bottleneck,{p},,{}", bottleneck(a, b).cost).unwrap();
        for &q in &cfg.q_list {
            writeln!(s, "wasserstein,{p},{q},{}", wasserstein(a, b, q).cost).unwrap();
        }
        writeln!(s, "essential_count_first,{p},,{}", a.essential_births.len()).unwrap();
        writeln!(s, "essential_count_final,{p},,{}", b.essential_births.len()).unwrap();
        let vines: Vec<_> = vineyard.vines.iter().filter(|v| v.dim == p).cloned().collect();
        writeln!(s, "vine_distance,{p},,{}", vines_distance(&vines)).unwrap();
    }
    writeln!(s, "vine_distance,all,,{}", vines_distance(&vineyard.vines)).unwrap();
    s
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clutter_label::camera::save_frame;
use clutter_label::grasp::{read_candidates, write_candidates, Candidate};
use clutter_label::pipeline::{
    compute_pass_rates, corner_cases, dump_debug_ply, evaluate_candidates, export_dataset, gen_corner_corpus,
    generate_candidates, generate_scene, labels_to_ndjson, load_corpus, read_labels, render_frames, run_ablation,
    run_label_pipeline, ExportFrame, ExportInput, LabelRecord, Modality, PipelineConfig, Variant,
};
use clutter_label::scene::{load_scene, save_scene, AssetLibrary, SceneContext};
use clutter_label::{Error, Result};

#[derive(Parser)]
#[command(
    name = "clutter-label",
    version,
    about = "Grasp candidate sampling and labeling for cluttered scenes"
)]
struct Cli {
    /// Worker threads for candidate evaluation (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample and settle one scene.
    GenScene {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Asset manifest (default: built-in procedural assets).
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Render depth and instance-id frames of a scene.
    Render {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        seed: u64,
        /// Output directory (default: `frames/` next to the scene).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Generate grasp candidates for every object of a scene.
    Sample {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, value_parser = ["jaw", "suction"])]
        modality: String,
        /// Gripper name for jaws, cup name for suction.
        #[arg(long)]
        gripper: String,
        /// Candidate NDJSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Label candidates through the collision, seal and dynamics stages.
    Evaluate {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long, default_value = "default",
              value_parser = ["default", "dexnet8_seal", "single_object_dynamics", "simplified_gripper"])]
        variant: String,
        /// Scene file (default: resolved from the candidates' scene id).
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Label NDJSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        assets: Option<PathBuf>,
        /// Write samples.ply and seal_hits.ply into this directory.
        #[arg(long)]
        dump_ply: Option<PathBuf>,
    },
    /// Compare pass rates of several variants over a scene corpus.
    Ablate {
        #[arg(long)]
        corpus: PathBuf,
        /// Comma-separated variant names.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "default,dexnet8_seal,single_object_dynamics,simplified_gripper"
        )]
        variants: Vec<String>,
        /// JSON table path (default: `<corpus>/ablation.json`).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write the six suction corner-case fixtures.
    CornerCorpus {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate, render, label and export a dataset.
    Export {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        scenes: usize,
        /// Frames per scene (default: from the config).
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long, default_value = "fetch")]
        gripper: String,
        #[arg(long, default_value = "cup_15mm")]
        cup: String,
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Pass-rate report of a label file.
    Stats {
        #[arg(long)]
        labels: PathBuf,
    },
    /// Write every default setting as JSON.
    DefaultConfig {
        #[arg(long, default_value = "default-config.json")]
        out: PathBuf,
    },
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

/// `--assets`, else `assets.json` beside the scene, else the built-in pool.
fn load_assets(explicit: Option<&Path>, scene: Option<&Path>, cfg: &PipelineConfig) -> Result<AssetLibrary> {
    if let Some(p) = explicit {
        return AssetLibrary::load_manifest(p, &cfg.difficulty);
    }
    if let Some(beside) = scene.and_then(Path::parent).map(|d| d.join("assets.json")) {
        if beside.is_file() {
            return AssetLibrary::load_manifest(beside, &cfg.difficulty);
        }
    }
    Ok(AssetLibrary::procedural(&cfg.difficulty))
}

fn scene_context(scene_path: &Path, assets: Option<&Path>, cfg: &PipelineConfig) -> Result<SceneContext> {
    let scene = load_scene(scene_path)?;
    let lib = load_assets(assets, Some(scene_path), cfg)?;
    SceneContext::new(scene, &lib, &cfg.sampling)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(p, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("stdout: {e}"))),
    }
}

/// The scene shared by all candidates: its id as a path, then relative to
/// the candidate file, then `<id>.json` or `scene.json` beside it.
fn resolve_scene(candidates: &[Candidate], cand_path: &Path) -> Result<PathBuf> {
    let mut ids: Vec<&str> = candidates.iter().map(Candidate::scene_id).collect();
    ids.dedup();
    ids.sort_unstable();
    ids.dedup();
    let [id] = ids.as_slice() else {
        return Err(Error::IdMismatch(format!(
            "candidates reference {} scenes; pass --scene",
            ids.len()
        )));
    };
    let dir = cand_path.parent().unwrap_or(Path::new("."));
    let tries = [
        PathBuf::from(id),
        dir.join(id),
        dir.join(format!("{id}.json")),
        dir.join("scene.json"),
    ];
    tries
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| Error::IdMismatch(format!("cannot locate scene `{id}`; pass --scene")))
}

fn workers(w: Option<usize>) -> usize {
    w.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn report_json(records: &[LabelRecord]) -> Result<serde_json::Value> {
    let mut out = serde_json::Map::new();
    out.insert("all".into(), serde_json::to_value(compute_pass_rates(records)?)?);
    for m in ["jaw", "suction"] {
        let subset: Vec<LabelRecord> = records.iter().filter(|r| r.modality() == m).cloned().collect();
        if !subset.is_empty() {
            out.insert(m.into(), serde_json::to_value(compute_pass_rates(&subset)?)?);
        }
    }
    Ok(serde_json::Value::Object(out))
}

fn run(cli: Cli) -> Result<()> {
    let w = workers(cli.workers);
    match cli.cmd {
        Cmd::GenScene {
            config,
            seed,
            out,
            assets,
        } => {
            let cfg = load_config(config.as_deref())?;
            let lib = load_assets(assets.as_deref(), None, &cfg)?;
            let scene = generate_scene(&cfg, &lib, seed)?;
            let path = out.join(format!("scene_{seed}.json"));
            save_scene(&path, &scene)?;
            println!("{} ({} objects)", path.display(), scene.objects.len());
        }
        Cmd::Render {
            scene,
            frames,
            seed,
            out,
            config,
            assets,
        } => {
            let cfg = load_config(config.as_deref())?;
            let ctx = scene_context(&scene, assets.as_deref(), &cfg)?;
            let dir = out.unwrap_or_else(|| scene.parent().unwrap_or(Path::new(".")).join("frames"));
            let stem = scene
                .file_stem()
                .map_or_else(|| "scene".into(), |s| s.to_string_lossy().into_owned());
            for (k, f) in render_frames(&ctx, &cfg, frames, seed).iter().enumerate() {
                let files = save_frame(f, &dir, &format!("{stem}_f{k:03}"))?;
                println!("{} ({} hits)", files.sidecar.display(), f.hit_count());
            }
        }
        Cmd::Sample {
            scene,
            modality,
            gripper,
            out,
            config,
            assets,
        } => {
            let cfg = load_config(config.as_deref())?;
            let ctx = scene_context(&scene, assets.as_deref(), &cfg)?;
            let m: Modality = modality.parse()?;
            let cands = generate_candidates(&ctx, &scene.to_string_lossy(), m, &gripper, &cfg)?;
            match out {
                Some(p) => {
                    write_candidates(&p, &cands)?;
                    eprintln!("{} candidates -> {}", cands.len(), p.display());
                }
                None => {
                    let mut text = String::new();
                    for c in &cands {
                        text.push_str(&serde_json::to_string(c)?);
                        text.push('\n');
                    }
                    write_or_print(None, &text)?;
                }
            }
        }
        Cmd::Evaluate {
            candidates,
            variant,
            scene,
            out,
            config,
            assets,
            dump_ply,
        } => {
            let cfg = load_config(config.as_deref())?;
            let variant: Variant = variant.parse()?;
            let cands = read_candidates(&candidates)?;
            if cands.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "{} holds no candidates",
                    candidates.display()
                )));
            }
            let scene_path = match scene {
                Some(s) => s,
                None => resolve_scene(&cands, &candidates)?,
            };
            let ctx = scene_context(&scene_path, assets.as_deref(), &cfg)?;
            let records = evaluate_candidates(&ctx, &cands, &cfg, variant, w)?;
            write_or_print(out.as_deref(), &labels_to_ndjson(&records))?;
            if let Some(dir) = dump_ply {
                dump_debug_ply(&dir, &ctx, &records, &cfg)?;
            }
            eprintln!("{}", serde_json::to_string(&report_json(&records)?)?);
        }
        Cmd::Ablate {
            corpus,
            variants,
            json,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let variants: Vec<Variant> = variants.iter().map(|v| v.trim().parse()).collect::<Result<_>>()?;
            let entries = load_corpus(&corpus, &cfg)?;
            let table = run_ablation(&entries, &cfg, &variants, w)?;
            print!("{}", table.to_text());
            let path = json.unwrap_or_else(|| corpus.join("ablation.json"));
            write_or_print(Some(&path), &(serde_json::to_string_pretty(&table)? + "\n"))?;
        }
        Cmd::CornerCorpus { out } => {
            let dirs = gen_corner_corpus(&out)?;
            for (d, c) in dirs.iter().zip(corner_cases()?) {
                println!("{}  {}", d.display(), c.description);
            }
        }
        Cmd::Export {
            out,
            config,
            seed,
            scenes,
            frames,
            gripper,
            cup,
            assets,
        } => {
            let cfg = load_config(config.as_deref())?;
            let lib = load_assets(assets.as_deref(), None, &cfg)?;
            let k = frames.unwrap_or(cfg.render.frames_per_scene);
            let mut scene_list = Vec::new();
            let mut frame_list = Vec::new();
            let mut records = Vec::new();
            for i in 0..scenes {
                let s = seed + i as u64;
                let id = format!("scene_{s:06}");
                let scene = generate_scene(&cfg, &lib, s)?;
                let ctx = SceneContext::new(scene.clone(), &lib, &cfg.sampling)?;
                for (j, f) in render_frames(&ctx, &cfg, k, s).into_iter().enumerate() {
                    frame_list.push(ExportFrame {
                        scene_id: id.clone(),
                        index: j,
                        seed: clutter_label::pipeline::frame_seed(s, j),
                        frame: f,
                    });
                }
                records.extend(run_label_pipeline(
                    &ctx,
                    &id,
                    &cfg,
                    Modality::Jaw,
                    &gripper,
                    Variant::Default,
                    w,
                )?);
                records.extend(run_label_pipeline(
                    &ctx,
                    &id,
                    &cfg,
                    Modality::Suction,
                    &cup,
                    Variant::Default,
                    w,
                )?);
                scene_list.push((id, scene));
            }
            let input = ExportInput {
                config: &cfg,
                variant: Variant::Default,
                scenes: scene_list,
                frames: frame_list,
                records: &records,
                asset_ids: lib.ids().into_iter().map(String::from).collect(),
            };
            let m = export_dataset(&input, &out)?;
            println!(
                "{}: {} scenes, {} frames, {} records",
                out.display(),
                m.counts.scenes,
                m.counts.frames,
                m.counts.records
            );
        }
        Cmd::Stats { labels } => {
            let records = read_labels(&labels)?;
            println!("{}", serde_json::to_string_pretty(&report_json(&records)?)?);
        }
        Cmd::DefaultConfig { out } => {
            write_or_print(Some(&out), &PipelineConfig::default().to_json_pretty())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

//! Generate, render, label and export a two-scene dataset.

use clutter_label::pipeline::{
    export_dataset, frame_seed, generate_scene, render_frames, run_label_pipeline, ExportFrame, ExportInput, Modality,
    PipelineConfig, Variant,
};
use clutter_label::scene::{AssetLibrary, SceneContext};

fn main() -> clutter_label::Result<()> {
    let mut cfg = PipelineConfig::default();
    cfg.render.intrinsics.width = 320;
    cfg.render.intrinsics.height = 240;
    cfg.render.intrinsics.cx = 159.5;
    cfg.render.intrinsics.cy = 119.5;
    let assets = AssetLibrary::procedural(&cfg.difficulty);

    let (mut scenes, mut frames, mut records) = (Vec::new(), Vec::new(), Vec::new());
    for seed in [21, 22] {
        let id = format!("scene_{seed:06}");
        let scene = generate_scene(&cfg, &assets, seed)?;
        let ctx = SceneContext::new(scene.clone(), &assets, &cfg.sampling)?;
        for (k, frame) in render_frames(&ctx, &cfg, 2, seed).into_iter().enumerate() {
            frames.push(ExportFrame {
                scene_id: id.clone(),
                index: k,
                seed: frame_seed(seed, k),
                frame,
            });
        }
        records.extend(run_label_pipeline(
            &ctx,
            &id,
            &cfg,
            Modality::Suction,
            "cup_15mm",
            Variant::Default,
            1,
        )?);
        scenes.push((id, scene));
    }

    let out = std::env::temp_dir().join("clutter_label_export");
    let input = ExportInput {
        config: &cfg,
        variant: Variant::Default,
        scenes,
        frames,
        records: &records,
        asset_ids: assets.ids().into_iter().map(String::from).collect(),
    };
    let m = export_dataset(&input, &out)?;
    println!(
        "{}: {:?}, config hash {}",
        out.display(),
        m.counts,
        &m.config_hash[..12]
    );
    for gap in &m.fidelity_gaps {
        println!("  gap: {gap}");
    }
    Ok(())
}

//! End-to-end labeling of one generated scene for both tool types.
//!
//! Usage: `cargo run --release --example label_pipeline -- [seed] [workers]`

use clutter_label::pipeline::{
    compute_pass_rates, generate_scene, run_label_pipeline, Modality, PipelineConfig, Variant,
};
use clutter_label::scene::{AssetLibrary, SceneContext};

fn main() -> clutter_label::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(11);
    let workers: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let cfg = PipelineConfig::default();
    let assets = AssetLibrary::procedural(&cfg.difficulty);
    let ctx = SceneContext::new(generate_scene(&cfg, &assets, seed)?, &assets, &cfg.sampling)?;
    println!("scene {seed}: {} objects", ctx.len());

    for (modality, tool) in [(Modality::Suction, "cup_15mm"), (Modality::Jaw, "fetch")] {
        let records = run_label_pipeline(&ctx, "demo", &cfg, modality, tool, Variant::Default, workers)?;
        let r = compute_pass_rates(&records)?;
        let positives = records.iter().filter(|r| r.final_label).count();
        println!(
            "{:<8} {} candidates, collision {:.3}, seal {:?}, dynamics {:?}, {positives} positive",
            modality.name(),
            r.total,
            r.collision_pass_rate.unwrap_or(0.0),
            r.seal_pass_rate,
            r.dynamics_pass_rate
        );
    }
    Ok(())
}

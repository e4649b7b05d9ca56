//! Sample a drop plan, settle it and print the resulting pile.
//!
//! Usage: `cargo run --example scene_generation -- [seed]`

use clutter_label::pipeline::{generate_scene, PipelineConfig};
use clutter_label::scene::{AssetLibrary, SceneContext};

fn main() -> clutter_label::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg = PipelineConfig::default();
    let assets = AssetLibrary::procedural(&cfg.difficulty);
    let scene = generate_scene(&cfg, &assets, seed)?;
    let ctx = SceneContext::new(scene, &assets, &cfg.sampling)?;

    println!("seed {seed}: {} objects", ctx.len());
    for (o, d) in ctx.scene.objects.iter().zip(&ctx.difficulty) {
        let t = o.pose.translation;
        println!(
            "  #{:<2} {:<16} {:?}  z={:.3}  mass {:.3} kg  mu {:.2}",
            o.instance_id, o.asset_id, d, t.z, o.mass, o.friction
        );
    }
    for (top, base) in ctx.support.edges() {
        println!("  #{top} rests on #{base}");
    }
    Ok(())
}

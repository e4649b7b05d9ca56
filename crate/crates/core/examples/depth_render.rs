//! Render depth and instance-id frames of a settled scene and save them as
//! 16-bit PNGs plus a JSON sidecar.

use clutter_label::camera::save_frame;
use clutter_label::pipeline::{generate_scene, render_frames, PipelineConfig};
use clutter_label::scene::{AssetLibrary, SceneContext};

fn main() -> clutter_label::Result<()> {
    let cfg = PipelineConfig::default();
    let assets = AssetLibrary::procedural(&cfg.difficulty);
    let scene = generate_scene(&cfg, &assets, 3)?;
    let ctx = SceneContext::new(scene, &assets, &cfg.sampling)?;

    let out = std::env::temp_dir().join("clutter_label_frames");
    for (k, frame) in render_frames(&ctx, &cfg, 3, 3).iter().enumerate() {
        let files = save_frame(frame, &out, &format!("frame_{k}"))?;
        let eye = frame.camera_pose.translation;
        println!(
            "frame {k}: eye ({:.2}, {:.2}, {:.2}), {} object pixels",
            eye.x,
            eye.y,
            eye.z,
            frame.hit_count()
        );
        for (id, n) in frame.id_histogram() {
            println!("    id {id:>3}: {n} px");
        }
        println!("    -> {}", files.depth_png.display());
    }
    Ok(())
}

//! Write the suction corner-case corpus and compare every variant on it.

use clutter_label::pipeline::{corner_cases, gen_corner_corpus, load_corpus, run_ablation, PipelineConfig, Variant};

fn main() -> clutter_label::Result<()> {
    let dir = std::env::temp_dir().join("clutter_label_corners");
    gen_corner_corpus(&dir)?;
    for c in corner_cases()? {
        println!(
            "{:<16} {}  (baseline expects {})",
            c.name,
            c.description,
            if c.dexnet8_expected { "seal" } else { "no seal" }
        );
    }

    let cfg = PipelineConfig::default();
    let corpus = load_corpus(&dir, &cfg)?;
    let table = run_ablation(&corpus, &cfg, &Variant::ALL, 1)?;
    println!();
    print!("{}", table.to_text());
    Ok(())
}

//! Staged labeling, pass-rate reports, ablations, corner cases and dataset
//! export.

mod ablation;
mod config;
mod corner;
mod export;
mod ply;
mod record;
mod run;

pub use ablation::{load_corpus, run_ablation, AblationRow, AblationTable, CorpusEntry};
pub use config::{
    settings_diff, CandidateConfig, EvaluationSettings, PipelineConfig, RenderConfig, SealConfig, SealModelKind,
    Variant,
};
pub use corner::{corner_cases, corner_cup, gen_corner_corpus, CornerCase, CORNER_CUP, CORNER_FRICTION};
pub use export::{export_dataset, DatasetManifest, ExportFrame, ExportInput, FIDELITY_GAPS};
pub use ply::{dump_debug_ply, write_ply};
pub use record::{
    compute_pass_rates, labels_to_ndjson, read_labels, write_labels, FailureReason, LabelRecord, PassRateReport,
};
pub use run::{
    evaluate_candidates, frame_seed, generate_candidates, generate_scene, render_frames, run_label_pipeline, Evaluator,
    Modality,
};

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use clutter_label::geometry::{primitives, ray_triangle, sample_surface, AccelInstance, Pose, Ray, SceneAccel, Vec3};
use clutter_label::grasp::{darboux_frame, fps, write_candidates, Candidate, SuctionCupSpec};
use clutter_label::pipeline::{
    compute_pass_rates, corner_cases, corner_cup, evaluate_candidates, generate_candidates, LabelRecord, Modality,
    PipelineConfig, Variant,
};
use clutter_label::scene::save_scene;
use clutter_label::seal::{build_seal_model, evaluate_seal, evaluate_seal_dexnet8, SealFailure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: String, fail: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Criterion 1: Dense model rejects all six corner cases; the 8-vertex baseline
/// accepts exactly (a), (c), (d), (f). Under 10 s.
fn corner_cases_match() -> Outcome {
    let start = Instant::now();
    let cup = corner_cup();
    let model = build_seal_model(&cup);
    let mut mismatches = Vec::new();
    for case in corner_cases().map_err(|e| e.to_string())? {
        let ctx = clutter_label::scene::SceneContext::new(case.scene.clone(), &case.assets, &Default::default())
            .map_err(|e| e.to_string())?;
        let dense = evaluate_seal(ctx.accel.as_ref(), &case.candidate, &model);
        let single = ctx
            .singulated_accel(case.candidate.target_instance)
            .map_err(|e| e.to_string())?;
        let base = evaluate_seal_dexnet8(&single, &case.candidate, &cup);
        let want_base = ["a_grooves_holes", "c_rough", "d_adjacent", "f_overlap"].contains(&case.name.as_str());
        if dense.q_seal
            || dense.failure_reason == SealFailure::None
            || base != want_base
            || case.dexnet8_expected != want_base
        {
            mismatches.push(format!("{} (dense {}, baseline {})", case.name, dense.q_seal, base));
        }
    }
    let t = start.elapsed();
    check(
        mismatches.is_empty() && t < Duration::from_secs(10),
        format!("6/6 verdicts match in {}", secs(t)),
        || format!("mismatches {mismatches:?}, {}", secs(t)),
    )
}

/// Criterion 2: Baseline seal pass rate exceeds the dense model by at least 2 pp on a
/// 500-candidate random sweep over ten objects. Under 2 min.
fn seal_direction() -> Outcome {
    let start = Instant::now();
    let (cfg, _, ctx) = common::ten_object_scene();
    let cup = cfg.cup("cup_15mm").map_err(|e| e.to_string())?;
    let cands: Vec<Candidate> = common::random_suction_sweep(&ctx, &cup, 500, 99)
        .into_iter()
        .map(Candidate::Suction)
        .collect();
    let rate = |v: Variant| -> Result<f64, String> {
        let recs = evaluate_candidates(&ctx, &cands, &cfg, v, 1).map_err(|e| e.to_string())?;
        let r = compute_pass_rates(&recs).map_err(|e| e.to_string())?;
        Ok(r.seal_pass_rate.unwrap_or(0.0))
    };
    let dense = rate(Variant::Default)?;
    let base = rate(Variant::Dexnet8Seal)?;
    let t = start.elapsed();
    check(
        base - dense >= 0.02 && t < Duration::from_secs(120),
        format!(
            "seal rate 8-vertex {:.2}% vs 960-vertex {:.2}% in {}",
            base * 100.0,
            dense * 100.0,
            secs(t)
        ),
        || {
            format!(
                "8-vertex {:.2}% vs 960-vertex {:.2}%, {}",
                base * 100.0,
                dense * 100.0,
                secs(t)
            )
        },
    )
}

/// Criterion 3: Single-object dynamics passes at least as often as clutter-aware
/// dynamics for both tools, strictly more on pile-targeted candidates.
fn dynamics_direction() -> Outcome {
    let (_, ctx) = common::pile_fixture();
    let cfg = PipelineConfig::default();
    let piled: BTreeSet<u32> = (0..ctx.len() as u32)
        .filter(|&i| !ctx.support.stacked_on(i).is_empty())
        .collect();
    if piled.is_empty() {
        return Err("fixture has no stacked objects".into());
    }
    let mut lines = Vec::new();
    let mut ok = true;
    for (m, tool) in [(Modality::Suction, "cup_15mm"), (Modality::Jaw, "fetch")] {
        let cands = generate_candidates(&ctx, "pile", m, tool, &cfg).map_err(|e| e.to_string())?;
        let run = |v| evaluate_candidates(&ctx, &cands, &cfg, v, 1).map_err(|e| e.to_string());
        let (aware, single) = (run(Variant::Default)?, run(Variant::SingleObjectDynamics)?);
        let rate = |r: &[LabelRecord]| {
            compute_pass_rates(r)
                .map(|p| p.dynamics_pass_rate.unwrap_or(0.0))
                .unwrap_or(0.0)
        };
        let on_pile = |r: &[LabelRecord]| {
            r.iter()
                .filter(|x| piled.contains(&x.target_instance) && x.final_label)
                .count()
        };
        let (ra, rs) = (rate(&aware), rate(&single));
        let (pa, ps) = (on_pile(&aware), on_pile(&single));
        ok &= rs >= ra && ps > pa;
        lines.push(format!(
            "{}: dynamics {:.2}% single vs {:.2}% clutter-aware, pile-targeted positives {ps} vs {pa}",
            m.name(),
            rs * 100.0,
            ra * 100.0
        ));
    }
    check(ok, lines.join("; "), || lines.join("; "))
}

/// Criterion 4: Frames on a subdivision-4 icosphere: v1 within 5° of radial for at
/// least 99% of non-degenerate frames, orthonormal with det +1.
fn darboux_numerics() -> Outcome {
    let r = 0.1;
    let sphere = primitives::icosphere(r, 4);
    let samples = sample_surface(&sphere, 10_000, 4).map_err(|e| e.to_string())?;
    let (mut good, mut total, mut bad_basis) = (0usize, 0usize, 0usize);
    for s in &samples {
        let Ok(f) = darboux_frame(&samples, s, 0.1 * r) else {
            continue;
        };
        let m = f.rotation;
        if (m.transpose() * m - nalgebra::Matrix3::identity()).abs().max() > 1e-6
            || (m.determinant() - 1.0).abs() > 1e-6
        {
            bad_basis += 1;
        }
        if f.degenerate {
            continue;
        }
        total += 1;
        if f.v1().dot(&s.point.normalize()).clamp(-1.0, 1.0).acos() < 5f64.to_radians() {
            good += 1;
        }
    }
    let frac = good as f64 / total.max(1) as f64;
    check(
        frac >= 0.99 && bad_basis == 0 && total > 0,
        format!(
            "{good}/{total} frames within 5° ({:.2}%), all orthonormal",
            frac * 100.0
        ),
        || format!("{good}/{total} within 5°, {bad_basis} non-orthonormal"),
    )
}

/// Reference greedy FPS recomputing every distance from scratch each step.
fn fps_oracle(points: &[Vec3], k: usize, start: usize) -> Vec<usize> {
    let mut sel = vec![start];
    while sel.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..points.len() {
            if sel.contains(&i) {
                continue;
            }
            let d = sel
                .iter()
                .map(|&j| (points[i] - points[j]).norm())
                .fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, i));
            }
        }
        sel.push(best.unwrap().1);
    }
    sel
}

/// Criterion 5: FPS equals the brute-force oracle on 100 random sets of ≤ 256 points.
fn fps_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=256);
        let pts: Vec<Vec3> = (0..n)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let k = rng.random_range(1..=n);
        let start = rng.random_range(0..n);
        if fps(&pts, k, start).map_err(|e| e.to_string())? != fps_oracle(&pts, k, start) {
            failures += 1;
        }
    }
    check(failures == 0, "100/100 sets identical".into(), || {
        format!("{failures}/100 sets differ")
    })
}

/// Criterion 6: Analytic sphere and plane distances within 1e-6 m on 10³ rays each;
/// BVH equals brute force on 10³ rays over 20 instances.
fn raycast_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    let r = 0.1;
    let c = Vec3::new(0.2, -0.1, 0.3);
    let sphere = primitives::icosphere(r, 4);
    let sphere_accel = SceneAccel::build(&[AccelInstance {
        mesh: &sphere,
        pose: Pose::from_translation(c),
        scale: 1.0,
        instance_id: 0,
    }])
    .map_err(|e| e.to_string())?;
    let mut sphere_err: f64 = 0.0;
    for _ in 0..1000 {
        // Center-line rays through mesh vertices, which lie on the sphere.
        let u = sphere.vertices[rng.random_range(0..sphere.vertices.len())].normalize();
        let d = rng.random_range(0.15..2.0);
        let hit = sphere_accel.raycast(&Ray::new(c + u * d, -u, 10.0));
        sphere_err = sphere_err.max(hit.map_or(f64::INFINITY, |h| (h.distance - (d - r)).abs()));
    }

    let plate = primitives::cuboid(Vec3::new(1.0, 1.0, 0.05));
    let plate_accel = SceneAccel::build(&[AccelInstance {
        mesh: &plate,
        pose: Pose::identity(),
        scale: 1.0,
        instance_id: 0,
    }])
    .map_err(|e| e.to_string())?;
    let mut plane_err: f64 = 0.0;
    for _ in 0..1000 {
        let o = Vec3::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.1..2.0),
        );
        let dir = Vec3::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2), -1.0).normalize();
        let expect = (o.z - 0.05) / -dir.z;
        let hit = plate_accel.raycast(&Ray::new(o, dir, 10.0));
        plane_err = plane_err.max(hit.map_or(f64::INFINITY, |h| (h.distance - expect).abs()));
    }

    let meshes = [
        primitives::icosphere(0.04, 2),
        primitives::cuboid(Vec3::new(0.03, 0.05, 0.02)),
        primitives::cylinder(0.03, 0.08, 24),
        primitives::torus(0.04, 0.012, 24, 12),
    ];
    let poses: Vec<Pose> = (0..20)
        .map(|_| {
            let q = clutter_label::geometry::random_rotation(&mut rng);
            Pose::new(
                q,
                Vec3::new(
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-0.3..0.3),
                    rng.random_range(0.0..0.3),
                ),
            )
        })
        .collect();
    let instances: Vec<AccelInstance> = poses
        .iter()
        .enumerate()
        .map(|(i, p)| AccelInstance {
            mesh: &meshes[i % 4],
            pose: *p,
            scale: 1.0,
            instance_id: i as u32,
        })
        .collect();
    let accel = SceneAccel::build(&instances).map_err(|e| e.to_string())?;
    let world: Vec<Vec<[Vec3; 3]>> = instances
        .iter()
        .map(|i| {
            let m = i.mesh.transformed(&i.pose, i.scale);
            (0..m.triangle_count()).map(|t| m.corners(t)).collect()
        })
        .collect();
    let mut mismatches = 0;
    let mut hits = 0;
    for _ in 0..1000 {
        let o = Vec3::new(
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.3..0.7),
        );
        let target = Vec3::new(
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
            rng.random_range(0.0..0.3),
        );
        let ray = Ray::new(o, (target - o).normalize(), 2.0);
        let mut brute: Option<(f64, u32)> = None;
        for (id, tris) in world.iter().enumerate() {
            for t in tris {
                if let Some(d) = ray_triangle(&ray.origin, &ray.direction, ray.max_distance, t) {
                    if brute.is_none_or(|(bd, _)| d < bd) {
                        brute = Some((d, id as u32));
                    }
                }
            }
        }
        let got = accel.raycast(&ray).map(|h| (h.distance, h.instance_id));
        hits += got.is_some() as usize;
        let same = match (got, brute) {
            (None, None) => true,
            (Some((a, ia)), Some((b, ib))) => (a - b).abs() <= 1e-12 && (ia == ib || (a - b).abs() == 0.0),
            _ => false,
        };
        mismatches += !same as usize;
    }
    check(
        sphere_err <= 1e-6 && plane_err <= 1e-6 && mismatches == 0,
        format!(
            "sphere err {sphere_err:.1e} m, plane err {plane_err:.1e} m, BVH = brute force on 1000 rays ({hits} hits)"
        ),
        || format!("sphere err {sphere_err:.1e}, plane err {plane_err:.1e}, {mismatches} BVH mismatches"),
    )
}

/// Criterion 7: Pass rates reproduce known counts; short-circuit nulls stay out of
/// the denominators.
fn pass_rate_arithmetic() -> Outcome {
    use common::suction_record as rec;
    let mut recs = vec![
        rec(0, true, true, true),
        rec(1, true, true, true),
        rec(2, true, true, false),
        rec(3, true, false, false),
        rec(4, true, false, false),
        rec(5, true, false, false),
    ];
    recs.extend((6..10).map(|i| rec(i, false, false, false)));
    let r = compute_pass_rates(&recs).map_err(|e| e.to_string())?;
    let mut shuffled = recs.clone();
    shuffled.reverse();
    shuffled.swap(1, 7);
    let same = compute_pass_rates(&shuffled).map_err(|e| e.to_string())? == r;
    let none = compute_pass_rates(&(0..5).map(|i| rec(i, false, false, false)).collect::<Vec<_>>())
        .map_err(|e| e.to_string())?;
    let ok = r.collision_pass_rate == Some(0.6)
        && r.seal_pass_rate == Some(0.5)
        && r.dynamics_pass_rate == Some(2.0 / 3.0)
        && r.seal_evaluated == 6
        && r.dynamics_evaluated == 3
        && none.seal_pass_rate.is_none()
        && none.dynamics_pass_rate.is_none()
        && none.collision_pass_rate == Some(0.0)
        && same;
    check(
        ok,
        "10 records -> 0.6 / 0.5 / 0.667; all-collision-fail -> null seal and dynamics; order-independent".into(),
        || format!("got {r:?}, all-fail {none:?}, shuffle-stable {same}"),
    )
}

/// Criterion 8: `evaluate` output is byte-identical at 1 and 8 workers.
fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (cfg, assets, ctx) = common::ten_object_scene();
    let scene_path = dir.path().join("scene.json");
    save_scene(&scene_path, &ctx.scene).map_err(|e| e.to_string())?;
    assets
        .save_manifest(dir.path(), "assets.json")
        .map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("config.json"), cfg.to_json_pretty()).map_err(|e| e.to_string())?;
    let mut cands =
        generate_candidates(&ctx, "scene.json", Modality::Suction, "cup_15mm", &cfg).map_err(|e| e.to_string())?;
    let jaw = generate_candidates(&ctx, "scene.json", Modality::Jaw, "fetch", &cfg).map_err(|e| e.to_string())?;
    cands.extend(jaw.into_iter().step_by(7));
    let cand_path = dir.path().join("candidates.ndjson");
    write_candidates(&cand_path, &cands).map_err(|e| e.to_string())?;

    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_clutter-label"))
            .args(["evaluate", "--candidates"])
            .arg(&cand_path)
            .args(["--variant", "default", "--config"])
            .arg(dir.path().join("config.json"))
            .args(["--workers", workers])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let one = run("1")?;
    let eight = run("8")?;
    let again = run("8")?;
    let lines = one.iter().filter(|&&b| b == b'\n').count();
    check(
        one == eight && eight == again && lines == cands.len(),
        format!("{lines} records byte-identical at 1 and 8 workers"),
        || {
            format!(
                "outputs differ ({} / {} / {} bytes, {lines} lines)",
                one.len(),
                eight.len(),
                again.len()
            )
        },
    )
}

/// Criterion 9: 10⁴ dense seal evaluations on a ten-object scene in under 120 s on
/// one thread.
fn seal_throughput() -> Outcome {
    let (_, _, ctx) = common::ten_object_scene();
    let cup = SuctionCupSpec::cup_15mm();
    let model = build_seal_model(&cup);
    let cands = common::random_suction_sweep(&ctx, &cup, 10_000, 9);
    let start = Instant::now();
    let sealed = cands
        .iter()
        .filter(|c| evaluate_seal(ctx.accel.as_ref(), c, &model).q_seal)
        .count();
    let t = start.elapsed();
    let rays = cands.len() * model.vertex_count();
    check(
        t < Duration::from_secs(120),
        format!(
            "{} evaluations ({rays} rays, {sealed} sealed) in {}",
            cands.len(),
            secs(t)
        ),
        || format!("took {}", secs(t)),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("corner-case ablation", corner_cases_match),
        ("seal-model direction", seal_direction),
        ("dynamics direction", dynamics_direction),
        ("darboux-frame numerics", darboux_numerics),
        ("fps oracle equivalence", fps_equivalence),
        ("ray-cast accuracy", raycast_accuracy),
        ("pass-rate arithmetic", pass_rate_arithmetic),
        ("evaluate determinism", cli_determinism),
        ("seal throughput", seal_throughput),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        match f() {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastica2d"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs `cmd` on `config` with output into a fresh directory.
fn run_config(cmd: &str, config: &Path, extra: &[&str]) -> (Output, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    (run(&args), dir)
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn inline(cmd: &str, text: &str, extra: &[&str]) -> (Output, TempDir) {
    let cfg_dir = tempfile::tempdir().unwrap();
    let p = write_config(&cfg_dir, text);
    run_config(cmd, &p, extra)
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn report(dir: &TempDir) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap()
}

fn params(dir: &TempDir) -> Vec<(String, String)> {
    fs::read_to_string(dir.path().join("params.txt"))
        .unwrap()
        .lines()
        .filter_map(|l| {
            l.split_once(' ')
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect()
}

fn param(list: &[(String, String)], key: &str) -> f64 {
    list.iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("no {key}"))
        .1
        .parse()
        .unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_exit(&run(&["--help"]), 0);
    assert_exit(&run(&["solve"]), 1);
    assert_exit(&run(&["frobnicate"]), 1);
}

#[test]
fn config_problems_exit_with_one() {
    let (out, _d) = inline(
        "annulus",
        "[annulus]\nr1 = 1.0\nr2 = 2.0\nn = 1.0\nlambda = 1.0\nradius = 3.0\n",
        &[],
    );
    assert_exit(&out, 1);
    let (out, _d) = inline(
        "solve",
        "[annulus]\nr1 = 1.0\nr2 = 2.0\nn = 1.0\nlambda = 1.0\n",
        &[],
    );
    assert_exit(&out, 1);
    let (out, _d) = run_config("weierstrass", Path::new("/nonexistent/run.toml"), &[]);
    assert_exit(&out, 1);
    let (out, _d) = inline(
        "annulus",
        "[annulus]\nr1 = 1.0\nr2 = 2.0\nn = 1.2\nlambda = 1.0\n",
        &[],
    );
    assert_exit(&out, 1);
    let (out, _d) = inline(
        "solve",
        "[solve]\nmesh = { shape = \"disk\", radius = 1.0, resolution = 8 }\nlambda = 1.0\n\
         perturb = { amplitude = 0.1, kind = \"vertex\" }\n",
        &[],
    );
    assert_exit(&out, 1);
}

#[test]
fn numerical_errors_exit_with_two() {
    let (out, _d) = inline(
        "annulus",
        "[annulus]\nr1 = 1.0\nr2 = 1.0\nn = 1.0\nlambda = 1.0\n",
        &[],
    );
    assert_exit(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr)
        .to_lowercase()
        .contains("radi"));

    // zeros declared but no compensating k: sampling hits the poles
    let (out, _d) = inline(
        "weierstrass",
        "[weierstrass]\nlambda = 1.0\nh = [{ coeff = [1.0, 0.0], power = 2 }, { coeff = [-0.25, 0.0], power = 0 }]\n\
         zeros = [{ at = [0.5, 0.0] }, { at = [-0.5, 0.0] }]\nk = []\n\
         region = { shape = \"rectangle\", min = [-1.0, -1.0], max = [1.0, 1.0] }\ngrid = 20\n",
        &[],
    );
    assert_exit(&out, 2);
}

#[test]
fn quartic_compensator_has_four_poles() {
    let (out, dir) = run_config("weierstrass", &configs().join("quartic.toml"), &[]);
    assert_exit(&out, 0);
    let k = fs::read_to_string(dir.path().join("k.txt")).unwrap();
    assert!(k.lines().any(|l| l.trim() == "poles 4"), "{k}");
    let poles: Vec<&str> = k.lines().filter(|l| l.starts_with("pole ")).collect();
    assert_eq!(poles.len(), 4);
    for line in poles {
        let w: Vec<&str> = line.split_whitespace().collect();
        let re: f64 = w[w.len() - 2].parse().unwrap();
        let im: f64 = w[w.len() - 1].parse().unwrap();
        assert!((re - 0.1).abs() < 1e-12 && im.abs() < 1e-12, "{line}");
    }

    let mut rdr = csv::Reader::from_path(dir.path().join("samples.csv")).unwrap();
    let mut n = 0;
    for row in rdr.records() {
        let row = row.unwrap();
        let v: Vec<f64> = row.iter().map(|x| x.parse().unwrap()).collect();
        let (x, y) = (v[0], v[1]);
        // g = (1 + λ)/2 h² with h = z⁴ − 1 and λ = 1
        let (z2r, z2i) = (x * x - y * y, 2.0 * x * y);
        let (hr, hi) = (z2r * z2r - z2i * z2i - 1.0, 2.0 * z2r * z2i);
        let (gr, gi) = (hr * hr - hi * hi, 2.0 * hr * hi);
        let scale = 1.0 + gr.hypot(gi);
        assert!((v[6] - gr).abs() < 1e-9 * scale && (v[7] - gi).abs() < 1e-9 * scale);
        // |fz| = ½|h|² + μ
        assert!((v[4] - (0.5 * hr.hypot(hi).powi(2) + 0.5)).abs() < 1e-10 * (1.0 + v[4]));
        n += 1;
    }
    assert!(n > 100);
    assert!(dir.path().join("figure.svg").exists());
}

#[test]
fn outputs_are_deterministic() {
    let (a, da) = run_config("weierstrass", &configs().join("quartic.toml"), &[]);
    let (b, db) = run_config("weierstrass", &configs().join("quartic.toml"), &[]);
    assert_exit(&a, 0);
    assert_exit(&b, 0);
    for f in ["k.txt", "samples.csv", "figure.svg"] {
        assert_eq!(
            fs::read(da.path().join(f)).unwrap(),
            fs::read(db.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let (a, da) = run_config("solve", &configs().join("free.toml"), &[]);
    let (b, db) = run_config("solve", &configs().join("free.toml"), &[]);
    assert_exit(&a, 0);
    assert_exit(&b, 0);
    for f in ["state.txt", "report.json"] {
        assert_eq!(
            fs::read(da.path().join(f)).unwrap(),
            fs::read(db.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let (c, dc) = run_config("solve", &configs().join("free.toml"), &["--seed", "12"]);
    assert_exit(&c, 0);
    assert_ne!(
        fs::read(da.path().join("state.txt")).unwrap(),
        fs::read(dc.path().join("state.txt")).unwrap()
    );
}

#[test]
fn constant_h_gives_a_rigid_image() {
    let (out, dir) = inline(
        "weierstrass",
        "[weierstrass]\nlambda = 1.0\nh = [{ coeff = [1.0, 0.0], power = 0 }]\n\
         region = { shape = \"disk\", radius = 1.0 }\ngrid = 10\n",
        &[],
    );
    assert_exit(&out, 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("samples.csv")).unwrap();
    for row in rdr.records() {
        let v: Vec<f64> = row.unwrap().iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - v[0]).abs() < 1e-12 && (v[3] - v[1]).abs() < 1e-12);
        assert!((v[4] - 1.0).abs() < 1e-12 && v[5] < 1e-12);
    }
}

#[test]
fn identity_pins_leave_a_rectangle_unstressed() {
    let (out, dir) = inline(
        "solve",
        "[solve]\nmesh = { shape = \"rectangle\", width = 2.0, height = 1.0, nx = 8, ny = 4 }\n\
         lambda = 1.0\npins = [{ select = \"boundary\", target = \"identity\" }]\n",
        &[],
    );
    assert_exit(&out, 0);
    let r = report(&dir);
    assert_eq!(r["converged"], Value::Bool(true));
    assert!(r["final_energy"].as_f64().unwrap() < 1e-18);
    assert_eq!(r["stability_counts"]["unstable"], 0);
}

#[test]
fn free_boundary_relaxes_to_rigid_motion() {
    let (out, dir) = run_config("solve", &configs().join("free.toml"), &[]);
    assert_exit(&out, 0);
    let r = report(&dir);
    assert_eq!(r["rigid_motion"], Value::Bool(true));
    assert!(r["rigid_residual"].as_f64().unwrap() < 1e-6);
    let trace: Vec<f64> = r["energy_trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn disk_oracle_deviation_shrinks_under_refinement() {
    let cfg = configs().join("disk_oracle.toml");
    let (coarse, dc) = run_config("solve", &cfg, &[]);
    let (fine, df) = run_config("solve", &cfg, &["--refine", "2"]);
    assert_exit(&coarse, 0);
    assert_exit(&fine, 0);
    let (rc, rf) = (report(&dc), report(&df));
    assert_eq!(
        rf["mesh"]["triangles"].as_u64().unwrap(),
        16 * rc["mesh"]["triangles"].as_u64().unwrap()
    );
    let (ec, ef) = (
        rc["relative_interior_deviation"].as_f64().unwrap(),
        rf["relative_interior_deviation"].as_f64().unwrap(),
    );
    assert!(ec < 0.1, "{ec}");
    assert!(ef < ec, "{ef} vs {ec}");
    assert!(String::from_utf8_lossy(&fine.stdout).contains("max interior deviation"));
}

#[test]
fn annulus_and_strip_parameters() {
    let (out, dir) = run_config("annulus", &configs().join("annulus.toml"), &[]);
    assert_exit(&out, 0);
    let p = params(&dir);
    // annulus block comes first; take its values
    assert!((param(&p, "c") - 0.597614304667).abs() < 1e-9);
    assert!((param(&p, "alpha") + 0.190476190476).abs() < 1e-9);
    assert!(param(&p, "max_traction") < 1e-10);
    let strip: Vec<_> = p
        .iter()
        .skip_while(|(k, v)| !(k == "family" && v == "strip"))
        .cloned()
        .collect();
    assert!((param(&strip, "exp_x1") - 0.75).abs() < 1e-9);
    assert!((param(&strip, "exp_x2") - 1.25).abs() < 1e-9);
    assert!(param(&strip, "max_traction") < 1e-10);

    let mut rdr = csv::Reader::from_path(dir.path().join("traction.csv")).unwrap();
    let rows: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    assert!(rows.iter().all(|r| r[5].parse::<f64>().unwrap() < 1e-10));
    assert!(rows.iter().any(|r| r[0] == "strip"));
}

#[test]
fn higher_winding_pulls_the_inner_circle_in() {
    let text = |n: f64| format!("[annulus]\nr1 = 1.0\nr2 = 2.0\nn = {n:?}\nlambda = 1.0\n");
    let (o1, d1) = inline("annulus", &text(1.0), &[]);
    let (o3, d3) = inline("annulus", &text(3.0), &[]);
    assert_exit(&o1, 0);
    assert_exit(&o3, 0);
    let (p1, p3) = (params(&d1), params(&d3));
    assert_eq!(param(&p3, "winding"), 7.0);
    assert!(param(&p3, "inner_image_radius") < param(&p1, "inner_image_radius"));
    assert!(param(&p3, "max_traction") < 1e-10);
}

#[test]
fn lambda_override_changes_the_solution() {
    let text = "[annulus]\nr1 = 1.0\nr2 = 2.0\nn = 1.0\nlambda = 1.0\n";
    let (a, da) = inline("annulus", text, &[]);
    let (b, db) = inline("annulus", text, &["--lambda", "2"]);
    assert_exit(&a, 0);
    assert_exit(&b, 0);
    let (pa, pb) = (params(&da), params(&db));
    assert_eq!(param(&pb, "lambda"), 2.0);
    assert!((param(&pa, "c") - param(&pb, "c")).abs() > 1e-6);

    // the strip parameters of the bundled config admit no solution at λ = 2
    let (c, _dc) = run_config(
        "annulus",
        &configs().join("annulus.toml"),
        &["--lambda", "2"],
    );
    assert_exit(&c, 2);
}

fn meshgen(spec: &str, extra: &[&str]) -> (String, TempDir) {
    let (out, dir) = inline("meshgen", &format!("[meshgen]\n{spec}\n"), extra);
    assert_exit(&out, 0);
    (String::from_utf8(out.stdout).unwrap(), dir)
}

fn stat(stdout: &str, key: &str) -> i64 {
    let pos = stdout
        .find(key)
        .unwrap_or_else(|| panic!("no {key} in {stdout}"));
    stdout[pos + key.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn meshgen_counts() {
    let (s, dir) = meshgen(
        "shape = \"rectangle\"\nwidth = 1.0\nheight = 1.0\nnx = 2\nny = 2",
        &[],
    );
    assert_eq!(stat(&s, "vertices "), 9);
    assert_eq!(stat(&s, "triangles "), 8);
    assert_eq!(stat(&s, "boundary vertices "), 8);
    assert_eq!(stat(&s, "euler characteristic "), 1);
    assert!(dir.path().join("mesh.txt").exists());

    let (s, _) = meshgen(
        "shape = \"annulus\"\nr1 = 1.0\nr2 = 2.0\nresolution = 16",
        &[],
    );
    assert_eq!(stat(&s, "boundary loops "), 2);
    assert_eq!(stat(&s, "euler characteristic "), 0);

    let (s0, _) = meshgen("shape = \"disk\"\nradius = 1.0\nresolution = 16", &[]);
    let (s1, _) = meshgen(
        "shape = \"disk\"\nradius = 1.0\nresolution = 16",
        &["--refine", "1"],
    );
    assert_eq!(stat(&s1, "triangles "), 4 * stat(&s0, "triangles "));
    assert_eq!(stat(&s1, "boundary loops "), 1);
}

#[test]
fn generated_mesh_file_feeds_solve() {
    let (_, dir) = meshgen("shape = \"disk\"\nradius = 1.0\nresolution = 12", &[]);
    let mesh = dir.path().join("mesh.txt");
    let text = format!(
        "[solve]\nmesh = {:?}\nlambda = 1.0\npins = [{{ select = \"boundary\", target = {{ affine = {{ a = [1.1, 0.0] }} }} }}]\n",
        mesh.to_str().unwrap()
    );
    let (out, d) = inline("solve", &text, &[]);
    assert_exit(&out, 0);
    let r = report(&d);
    assert_eq!(r["converged"], Value::Bool(true));
    assert!(r["final_energy"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_passes_on_the_bundled_config() {
    let (out, dir) = run_config("verify", &configs().join("verify.toml"), &[]);
    assert_exit(&out, 0);
    let text = fs::read_to_string(dir.path().join("verify.txt")).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

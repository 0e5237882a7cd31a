use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bosupp_cli::config::ExperimentConfig;
use bosupp_cli::figures;

fn bosupp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosupp"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const NOISELESS: &str = "\
[experiment]
name = noiseless
[code]
code = cat(2, 2)
dim = 32
guard = 8
[noise]
cv = loss(mu=0)
dv = none
[protocol]
protocol = none
[sweep]
param = cv.mu
values = 0
[output]
path = out/noiseless.csv
";

#[test]
fn zero_noise_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", NOISELESS);
    let out = bosupp(&["run", &conf, "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("res/out/noiseless.csv")).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        bosupp_cli::output::CSV_HEADER
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    let f: f64 = rows[0][2].parse().unwrap();
    let p: f64 = rows[0][4].parse().unwrap();
    assert!((f - 1.0).abs() < 1e-12 && (p - 1.0).abs() < 1e-12, "{:?}", rows[0]);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("res/out/noiseless.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["fock_dim"], 32);
    assert_eq!(meta["code"], "cat(2,2)");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = NOISELESS
        .replace("values = 0", "values = 0, 0.02, 0.05")
        .replace("protocol = none", "protocol = cf(K=1)")
        .replace("[output]", "[average]\nmode = monte-carlo(N=200,seed=5)\n[output]");
    let conf = write(dir.path(), "a.conf", &text);
    let mut files = Vec::new();
    for run in ["r1", "r2"] {
        let out = bosupp(&["run", &conf, "--out", run, "--jobs", "2"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        files.push((
            fs::read(dir.path().join(run).join("out/noiseless.csv")).unwrap(),
            fs::read(dir.path().join(run).join("out/noiseless.meta.json")).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn filtration_flattens_in_ancilla_noise() {
    // Codes with rotation order above 2^K are blind to ancilla damping.
    let dir = tempfile::tempdir().unwrap();
    let text = NOISELESS
        .replace("cat(2, 2)", "cat(4, 2)")
        .replace("dim = 32", "dim = 40")
        .replace("cv = loss(mu=0)", "cv = loss(mu=0.05)")
        .replace("dv = none", "dv = qdamp(p=0,kind=composite)")
        .replace("protocol = none", "protocol = cf(K=1)")
        .replace("param = cv.mu\nvalues = 0", "param = dv.p\nvalues = 0, 0.1, 0.3");
    let conf = write(dir.path(), "a.conf", &text);
    let out = bosupp(&["run", &conf], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("out/noiseless.csv")).unwrap();
    let f: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(f.len(), 3);
    assert!(f.iter().all(|x| (x - f[0]).abs() < 1e-12), "{f:?}");
}

#[test]
fn bad_configs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "bad.conf", &NOISELESS.replace("values = 0", "values = 0.1, 0"));
    let out = bosupp(&["run", &conf], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 14"));

    let conf = write(dir.path(), "bad2.conf", &NOISELESS.replace("protocol = none", "protocol = cf(K=0)"));
    assert_eq!(bosupp(&["run", &conf], dir.path()).status.code(), Some(2));

    let missing = dir.path().join("missing.conf");
    assert_eq!(bosupp(&["run", missing.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(bosupp(&["figure", "fig99", "--out", "x"], dir.path()).status.code(), Some(2));
}

#[test]
fn truncation_failures_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    // cat(2, 3) carries about nine photons, far past a dimension of 12.
    let text = NOISELESS.replace("cat(2, 2)", "cat(2, 3)").replace("dim = 32", "dim = 12").replace("guard = 8", "guard = 2");
    let conf = write(dir.path(), "a.conf", &text);
    assert_eq!(bosupp(&["run", &conf], dir.path()).status.code(), Some(4));
}

#[test]
fn teleport_rows_match_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let conf = figures::configs("fig10c").unwrap().iter().find(|(n, _)| *n == "fig10c_teleport").unwrap().1;
    let path = write(dir.path(), "t.conf", conf);
    let out = bosupp(&["run", &path], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("fig10c_teleport.csv")).unwrap();
    for r in rdr.records() {
        let r = r.unwrap();
        let p: f64 = r[1].parse().unwrap();
        let f: f64 = r[2].parse().unwrap();
        assert!((f - (1.0 - p + 2.0 * p * p / 3.0)).abs() < 1e-12);
        assert!(r[3].is_empty());
    }
}

#[test]
fn bundled_figure_configs_validate() {
    for name in figures::names() {
        for (cname, text) in figures::configs(name).unwrap().iter() {
            let cfg = ExperimentConfig::parse(text).unwrap();
            assert_eq!(cfg.output.to_str().unwrap(), format!("{cname}.csv"));
        }
    }
    let fig8 = figures::configs("fig8").unwrap();
    assert_eq!(fig8.len(), 6);
    assert!(fig8.iter().any(|(_, t)| t.contains("qutrit(herald=0)")));
}

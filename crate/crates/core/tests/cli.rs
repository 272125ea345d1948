use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fatpix::formats::{read_pgm, read_pyramid, read_wfa};
use fatpix::zerotree::Band;

const RAMP: &str = "IFS1\nmaps 4\nmap @ 0 0.5 128\nmap @ 1 0.5 64\nmap @ 2 0.5 64\nmap @ 3 0.5 0\n";
const GASKET: &str = "IFS1\nmaps 4\nmap @ 0 1 0\nmap @ 1 1 0\nmap @ 2 1 0\nmap @ 3 0 0\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fatpix(args: &[&str]) -> Run {
    let Output {
        status,
        stdout,
        stderr,
    } = Command::new(env!("CARGO_BIN_EXE_fatpix"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {report}"))
}

#[test]
fn ramp_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = write(dir.path(), "ramp.ifs", RAMP);
    let wfa = dir.path().join("ramp.wfa");
    let r = fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(field(&r.stdout, "states"), "2");
    assert_eq!(
        read_wfa(&fs::read_to_string(&wfa).unwrap())
            .unwrap()
            .states(),
        2
    );

    let pgm = dir.path().join("ramp.pgm");
    let r = fatpix(&["render", "--wfa", s(&wfa), "--depth", "2", "-o", s(&pgm)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let img = read_pgm(&fs::read(&pgm).unwrap()).unwrap();
    assert_eq!(img.get(3, 0), 224.0);
    assert_eq!(img.get(0, 3), 32.0);

    let decoded = dir.path().join("decoded.pgm");
    let r = fatpix(&[
        "ifs-decode",
        "--ifs",
        s(&ifs),
        "--depth",
        "2",
        "-o",
        s(&decoded),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(fs::read(&decoded).unwrap(), fs::read(&pgm).unwrap());

    let r = fatpix(&[
        "ifs-decode",
        "--ifs",
        s(&ifs),
        "--depth",
        "1",
        "--iters",
        "1",
        "-o",
        s(&decoded),
        "--ascii",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(
        fs::read_to_string(&decoded).unwrap(),
        "P2\n2 2\n255\n128 64\n192 128\n"
    );
}

#[test]
fn paper_layout_has_ten_states() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = write(dir.path(), "ramp.ifs", RAMP);
    let wfa = dir.path().join("ramp.wfa");
    let r = fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa), "--paper-layout"]);
    assert_eq!(r.code, 0);
    let w = read_wfa(&fs::read_to_string(&wfa).unwrap()).unwrap();
    assert_eq!(w.states(), 10);
    let r = fatpix(&["verify", "--ifs", s(&ifs), "--wfa", s(&wfa), "--depth", "5"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
}

#[test]
fn gasket_render() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = write(dir.path(), "g.ifs", GASKET);
    let wfa = dir.path().join("g.wfa");
    assert_eq!(
        fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa)]).code,
        0
    );
    let out = dir.path().join("g.pgm");
    let r = fatpix(&["render", "--wfa", s(&wfa), "--depth", "5", "-o", s(&out)]);
    assert_eq!(field(&r.stdout, "nonzero"), "243");
    let r = fatpix(&["render", "--wfa", s(&wfa), "--depth", "0", "-o", s(&out)]);
    assert_eq!(field(&r.stdout, "side"), "1");
    assert_eq!(read_pgm(&fs::read(&out).unwrap()).unwrap().get(0, 0), 128.0);
}

#[test]
fn verify_reports_and_fails_on_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = write(dir.path(), "ramp.ifs", RAMP);
    let r = fatpix(&["verify", "--ifs", s(&ifs), "--depth", "6"]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "result"), "pass");
    assert_eq!(field(&r.stdout, "max_deviation"), "0e0");

    let wfa = dir.path().join("ramp.wfa");
    fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa)]);
    let text = fs::read_to_string(&wfa)
        .unwrap()
        .replace("3 0 0 0.5", "3 0 0 0.375");
    let bad = write(dir.path(), "bad.wfa", &text);
    let r = fatpix(&["verify", "--ifs", s(&ifs), "--wfa", s(&bad), "--depth", "4"]);
    assert_eq!(r.code, 1);
    assert_eq!(field(&r.stdout, "result"), "fail");
}

#[test]
fn zerotree_modes() {
    let dir = tempfile::tempdir().unwrap();
    let ramp = write(dir.path(), "ramp.ifs", RAMP);
    let r = fatpix(&[
        "zerotree",
        "--ifs",
        s(&ramp),
        "--depth",
        "6",
        "--tau",
        "1e-9",
        "--band",
        "HH",
    ]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(field(&r.stdout, "violations"), "0");

    // one HH detail at the finest level of an otherwise flat image
    let mut bytes = b"P5\n4 4\n255\n".to_vec();
    let mut px = [100u8; 16];
    px[0] = 101;
    px[1] = 99;
    px[4] = 99;
    px[5] = 101;
    bytes.extend_from_slice(&px);
    let image = dir.path().join("one.pgm");
    fs::write(&image, &bytes).unwrap();
    let report = dir.path().join("report.txt");
    let dump = dir.path().join("one.pyr");
    let r = fatpix(&[
        "zerotree",
        "--image",
        s(&image),
        "--tau",
        "0.5",
        "-o",
        s(&report),
        "--pyramid",
        s(&dump),
    ]);
    let pyramid = read_pyramid(&fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(pyramid.level(1).band(Band::Hh).get(0, 0), -2.0);
    assert_eq!(r.code, 1);
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(field(&text, "violations"), "1");
    assert!(
        text.contains("violation: level=2 row=0 col=0 band=HH"),
        "{text}"
    );

    let a = fatpix(&[
        "zerotree", "--random", "5", "--seed", "3", "--depth", "5", "--tau", "1e-9",
    ]);
    let b = fatpix(&[
        "zerotree", "--random", "5", "--seed", "3", "--depth", "5", "--tau", "1e-9",
    ]);
    assert_eq!(a.code, 0, "{}", a.stdout);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(field(&a.stdout, "systems"), "5");
}

#[test]
fn commute_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = write(dir.path(), "ramp.ifs", RAMP);
    let wfa = dir.path().join("ramp.wfa");
    fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa)]);
    let r = fatpix(&["commute", "--wfa", s(&wfa)]);
    assert_eq!(r.code, 0);
    assert_eq!(field(&r.stdout, "max_deviation"), "0e0");
    let ident = write(
        dir.path(),
        "id.wfa",
        "WFA1\nn 1\nout 1\ninit 1\nedges 4\n0 0 0 1\n1 0 0 1\n2 0 0 1\n3 0 0 1\n",
    );
    assert_eq!(
        fatpix(&["commute", "--wfa", s(&ident), "--band", "hh"]).code,
        0
    );
    let r = fatpix(&["commute", "--random", "20", "--seed", "9"]);
    assert_eq!(r.code, 0);
    assert!(field(&r.stdout, "max_deviation").parse::<f64>().unwrap() < 1e-13);
}

#[test]
fn encode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = b"P5\n8 8\n255\n".to_vec();
    bytes.extend((0..64u8).map(|i| i.wrapping_mul(37)));
    let image = dir.path().join("in.pgm");
    fs::write(&image, &bytes).unwrap();
    let wfa = dir.path().join("in.wfa");
    let r = fatpix(&["encode", "--image", s(&image), "-o", s(&wfa)]);
    assert_eq!(field(&r.stdout, "states"), "64");
    let out = dir.path().join("out.pgm");
    assert_eq!(
        fatpix(&["render", "--wfa", s(&wfa), "--depth", "3", "-o", s(&out)]).code,
        0
    );
    assert_eq!(fs::read(&out).unwrap(), bytes);
}

#[test]
fn diagnostics_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.ifs", "IFS1\nmaps 1\nmap 0 04 0.5 10\n");
    let r = fatpix(&["ifs2wfa", "--ifs", s(&bad), "-o", s(&dir.path().join("x"))]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.starts_with("error[format]:") && r.stderr.contains("`04`"),
        "{}",
        r.stderr
    );
    assert_eq!(r.stderr.lines().count(), 1);

    let invalid = write(dir.path(), "inv.ifs", "IFS1\nmaps 1\nmap 0 0 0.5 10\n");
    let r = fatpix(&[
        "ifs-decode",
        "--ifs",
        s(&invalid),
        "--depth",
        "2",
        "-o",
        s(&dir.path().join("x")),
    ]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.starts_with("error[invalid-ifs]: ") && r.stderr.contains("map 0"),
        "{}",
        r.stderr
    );

    let ifs = write(dir.path(), "ramp.ifs", RAMP);
    let wfa = dir.path().join("ramp.wfa");
    fatpix(&["ifs2wfa", "--ifs", s(&ifs), "-o", s(&wfa)]);
    let r = fatpix(&[
        "render",
        "--wfa",
        s(&wfa),
        "--depth",
        "16",
        "-o",
        s(&dir.path().join("x")),
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.starts_with("error[capacity]:"));

    let r = fatpix(&["zerotree", "--random", "3", "--depth", "4", "--tau", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[usage]:") && r.stderr.contains("--seed"));
    let r = fatpix(&[
        "zerotree",
        "--random",
        "3",
        "--seed",
        "1",
        "--depth",
        "4",
        "--tau",
        "1",
        "--max-alpha",
        "2",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[usage]:"));
    assert_eq!(r.stderr.lines().count(), 1);

    let r = fatpix(&[
        "render",
        "--wfa",
        s(&dir.path().join("missing.wfa")),
        "--depth",
        "1",
        "-o",
        "x",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.starts_with("error[io]:"));

    let r = fatpix(&["render", "--wfa", s(&ifs), "--depth", "1", "-o", "x"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad magic"), "{}", r.stderr);
}

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

const KOLKATA_PREFS: &str = "restaurant,gym,park,ice cream,movie,hospital,river,books";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prefclust"));
    for (key, _) in std::env::vars() {
        if key.starts_with("PREFCLUST_") {
            cmd.env_remove(key);
        }
    }
    cmd
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_error_line(o: &Output, code: i32) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    let line = err.lines().find(|l| l.starts_with("error: ")).unwrap_or_else(|| panic!("no error line in {err:?}"));
    assert!(!line.trim_end().is_empty());
}

#[test]
fn cluster_prints_one_row_per_class() {
    let o = run(bin().args(["cluster", "--input"]).arg(data("kolkata_tree.csv")));
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 8);
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header, ["step", "name", "class", "D", "T", "k"]);
    for line in &lines[1..] {
        let last = line.split_whitespace().last().unwrap();
        assert_eq!(last.split('.').nth(1).map(str::len), Some(6), "{line}");
    }
}

#[test]
fn csv_read_as_json_is_a_validation_error() {
    let o = run(bin().args(["cluster", "--format", "json", "--input"]).arg(data("kolkata_tree.csv")));
    assert_error_line(&o, 2);
    assert!(stderr(&o).contains("malformed"), "{}", stderr(&o));
}

#[test]
fn missing_input_is_an_io_error() {
    let o = run(bin().args(["cluster", "--input", "/nonexistent/tree.csv"]));
    assert_error_line(&o, 1);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = run(bin().args(["cluster", "--out", "/nonexistent/dir/r.json", "--input"]).arg(data("kolkata_tree.csv")));
    assert_error_line(&o, 1);
}

#[test]
fn html_output_is_a_page() {
    let dir = tempfile::tempdir().unwrap();
    let html = dir.path().join("map.html");
    let o = run(bin().args(["cluster", "--style", "terrain", "--input"]).arg(data("tokyo_tree.csv")).arg("--html").arg(&html));
    assert!(o.status.success(), "{}", stderr(&o));
    let page = std::fs::read_to_string(html).unwrap();
    assert!(page.to_ascii_lowercase().starts_with("<!doctype html>"));
    assert!(page.contains("stamen_terrain"));
}

#[test]
fn tile_template_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let html = dir.path().join("map.html");
    let o = run(bin()
        .env("PREFCLUST_TILES_OSM", "https://tiles.example.test/{z}/{x}/{y}.png")
        .args(["cluster", "--input"])
        .arg(data("kolkata_tree.csv"))
        .arg("--html")
        .arg(&html));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(std::fs::read_to_string(html).unwrap().contains("tiles.example.test"));
}

#[test]
fn json_tree_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.json");
    std::fs::write(
        &path,
        r#"[{"class":"a","nodes":[{"name":"x","lat":1,"lon":1}]},{"class":"b","nodes":[]},{"class":"c","nodes":[{"name":"y","lat":1.01,"lon":1}]}]"#,
    )
    .unwrap();
    let o = run(bin().args(["cluster", "--input"]).arg(&path));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 3);
    assert!(stderr(&o).contains("skipped empty classes: b"));
}

#[test]
fn fetch_kolkata_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.csv");
    let o = run(bin()
        .args(["fetch", "--place", "Kolkata", "--radius-km", "5", "--prefs", KOLKATA_PREFS, "--backend", "fixture"])
        .arg("--fixtures")
        .arg(fixtures())
        .arg("--out")
        .arg(&out));
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let classes: BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(classes.len(), 8);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 8);
    assert_eq!(csv, std::fs::read_to_string(data("kolkata_tree.csv")).unwrap());
}

#[test]
fn fetch_rejects_a_large_radius() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["fetch", "--place", "Kolkata", "--radius-km", "60", "--prefs", "gym", "--out"])
        .arg(dir.path().join("t.csv")));
    assert_error_line(&o, 2);
    assert!(stderr(&o).contains("radius_km"));
}

#[test]
fn fetch_unknown_place_is_a_provider_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["fetch", "--place", "Atlantis", "--radius-km", "5", "--prefs", "gym", "--fixtures"])
        .arg(fixtures())
        .arg("--out")
        .arg(dir.path().join("t.csv")));
    assert_error_line(&o, 3);
    assert!(stderr(&o).contains("not found"), "{}", stderr(&o));
}

#[test]
fn live_fetch_without_credentials_is_a_provider_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin()
        .env("PREFCLUST_PROVIDER_BASE_URL", "http://127.0.0.1:9")
        .args(["fetch", "--place", "22.57,88.36", "--radius-km", "5", "--prefs", "gym", "--backend", "live", "--out"])
        .arg(dir.path().join("t.csv")));
    assert_error_line(&o, 3);
    assert!(stderr(&o).contains("credentials"), "{}", stderr(&o));
}

fn free_addr() -> SocketAddr {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap()
}

fn http_get(addr: SocketAddr, path: &str) -> Option<String> {
    let mut s = TcpStream::connect_timeout(&addr, Duration::from_millis(200)).ok()?;
    write!(s, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").ok()?;
    let mut reply = String::new();
    s.read_to_string(&mut reply).ok()?;
    Some(reply)
}

struct Server(Child, SocketAddr);

impl Server {
    fn start(extra: &[&str]) -> Server {
        let addr = free_addr();
        let child = bin()
            .args(["serve", "--listen", &addr.to_string(), "--fixtures"])
            .arg(fixtures())
            .args(extra)
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .unwrap();
        let deadline = Instant::now() + Duration::from_secs(10);
        while http_get(addr, "/api/health").is_none() {
            assert!(Instant::now() < deadline, "server did not come up");
            std::thread::sleep(Duration::from_millis(50));
        }
        Server(child, addr)
    }

    fn interrupt(mut self) -> Output {
        let ok = Command::new("kill").args(["-INT", &self.0.id().to_string()]).status().unwrap();
        assert!(ok.success());
        let child = std::mem::replace(&mut self.0, Command::new("true").spawn().unwrap());
        child.wait_with_output().unwrap()
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_answers_health_and_stops_on_sigint() {
    let server = Server::start(&[]);
    let reply = http_get(server.1, "/api/health").unwrap();
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.contains("\"backend\":\"fixture\""));
    let out = server.interrupt();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let log = stderr(&out);
    assert!(log.lines().any(|l| l.contains("GET /api/health 200")), "{log}");
}

#[test]
fn serve_on_an_occupied_port_fails() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let o = run(bin().args(["serve", "--listen", &addr]));
    assert_error_line(&o, 1);
}

#[test]
fn listen_flag_beats_environment_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("prefclust.toml");
    std::fs::write(&cfg, "[server]\nlisten = \"127.0.0.1:1\"\n").unwrap();
    let addr = free_addr();
    let mut child = bin()
        .env("PREFCLUST_SERVER_LISTEN", "127.0.0.1:2")
        .args(["serve", "--config"])
        .arg(&cfg)
        .args(["--listen", &addr.to_string()])
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut up = false;
    while Instant::now() < deadline {
        if http_get(addr, "/api/health").is_some() {
            up = true;
            break;
        }
        std::thread::sleep(Duration::from_millis(50));
    }
    let _ = child.kill();
    let _ = child.wait();
    assert!(up);
}

#[test]
fn cluster_through_the_service_matches_in_process() {
    let server = Server::start(&[]);
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for remote in [false, true] {
        let sub = dir.path().join(if remote { "remote" } else { "local" });
        std::fs::create_dir(&sub).unwrap();
        let mut cmd = bin();
        cmd.args(["cluster", "--input"]).arg(data("tokyo_tree.csv"));
        for (flag, file) in [("--out", "r.json"), ("--geojson", "r.geojson"), ("--html", "r.html")] {
            cmd.arg(flag).arg(sub.join(file));
        }
        if remote {
            cmd.args(["--server", &format!("http://{}", server.1)]);
        }
        let o = run(&mut cmd);
        assert!(o.status.success(), "{}", stderr(&o));
        let files: Vec<Vec<u8>> =
            ["r.json", "r.geojson", "r.html"].iter().map(|f| std::fs::read(sub.join(f)).unwrap()).collect();
        outputs.push((o.stdout, files));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn cluster_against_a_missing_server_is_an_io_error() {
    let addr = free_addr();
    let o = run(bin()
        .args(["cluster", "--server", &format!("http://{addr}"), "--input"])
        .arg(data("kolkata_tree.csv")));
    assert_error_line(&o, 1);
}

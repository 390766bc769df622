use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_dataset(path: &Path, rows: &[(u32, f64)]) {
    let mut s = String::from("qubit_id,beta,b,gamma,eta\n");
    for &(q, v) in rows {
        s.push_str(&format!("{q},{v},{},{},{}\n", 0.5 * v, 1.0 + v, 2.0 - v));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    for (path, fmt, extra) in [
        (&a, "csv", "--sequential"),
        (&b, "json", "--sequential"),
        (&c, "json", "--samples=2001"),
    ] {
        let o = spinnet(&[
            "simulate",
            "--network",
            "max-lengths",
            "--coupling",
            "dipole",
            "--initial",
            "localized:3",
            "--format",
            fmt,
            extra,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("t_max=24.897088"));
    }
    let again = dir.path().join("a2.csv");
    spinnet(&[
        "simulate",
        "--network",
        "max-lengths",
        "--coupling",
        "dipole",
        "--initial",
        "localized:3",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&again).unwrap());
    assert_eq!(fs::read(&b).unwrap(), fs::read(&c).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "time,f_3,f_7,f_15,f_11,f_27,f_31,f_23,f_19"
    );
    assert_eq!(text.lines().count(), 2002);
}

#[test]
fn constant_superposition_is_static() {
    let o = spinnet(&[
        "simulate",
        "--network",
        "min-max",
        "--initial",
        "superposition",
        "--samples",
        "101",
    ]);
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        for f in line.split(',').skip(1) {
            let v: f64 = f.parse().unwrap();
            assert!((v - 0.125).abs() < 1e-9, "{line}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["simulate", "--network", "nope"][..],
        &["simulate", "--network", "chimera:0x2"],
        &[
            "simulate",
            "--network",
            "max-lengths",
            "--coupling",
            "quadrupole",
        ],
        &[
            "simulate",
            "--network",
            "max-lengths",
            "--initial",
            "everywhere",
        ],
        &["simulate", "--network", "max-lengths", "--j0", "2"],
        &["similarity", "--network", "max-lengths", "--at", "soon"],
        &["frobnicate"],
    ] {
        let o = spinnet(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn runtime_errors_exit_1_with_cause() {
    let o = spinnet(&[
        "peaks",
        "--network",
        "max-lengths",
        "--initial",
        "superposition",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no fidelity peak"));

    let o = spinnet(&[
        "simulate",
        "--network",
        "max-lengths",
        "--initial",
        "localized:4",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("dup.csv");
    fs::write(
        &data,
        "qubit_id,beta,b,gamma,eta\n0,1,1,1,1\n1,1,1,1,1\n0,2,2,2,2\n",
    )
    .unwrap();
    let o = spinnet(&["geary", "--data", data.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("dup.csv: line 4: duplicate qubit_id 0"),
        "{}",
        stderr(&o)
    );

    let flat = dir.path().join("flat.csv");
    write_dataset(&flat, &(0..32).map(|q| (q, 1.0)).collect::<Vec<_>>());
    let o = spinnet(&[
        "geary",
        "--data",
        flat.to_str().unwrap(),
        "--network",
        "chimera:2x2",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("beta,all,\"zero variance"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn similarity_overlaid_neighbours() {
    let o = spinnet(&[
        "similarity",
        "--network",
        "max-lengths",
        "--coupling",
        "constant",
        "--initial",
        "localized:3",
        "--at",
        "first-peak",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let sim = |a: &str, b: &str| -> String {
        out.lines()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|f| (f[0] == a && f[1] == b) || (f[0] == b && f[1] == a))
            .map(|f| f[3].to_string())
            .unwrap()
    };
    assert_eq!(sim("3", "7"), sim("3", "19"));
}

#[test]
fn network_json_round_trips_through_file_selector() {
    let o = spinnet(&["network", "--kind", "mid-lengths", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 8);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 10);
    let labels: Vec<u64> = (0..8)
        .map(|i| doc["labels"][i.to_string()].as_u64().unwrap())
        .collect();
    assert_eq!(labels, [1, 3, 4, 7, 8, 10, 12, 15]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mid.json");
    fs::write(&path, &o.stdout).unwrap();
    let sel = format!("file:{}", path.display());
    let from_file = spinnet(&[
        "simulate",
        "--network",
        &sel,
        "--initial",
        "localized:0",
        "--samples",
        "50",
    ]);
    let builtin = spinnet(&[
        "simulate",
        "--network",
        "mid-lengths",
        "--initial",
        "localized:1",
        "--samples",
        "50",
    ]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, builtin.stdout);

    let o = spinnet(&[
        "network",
        "--network",
        "max-lengths",
        "--format",
        "json",
        "--with-hamiltonian",
        "--coupling",
        "dipole",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["hamiltonian"]["n"], 8);
    assert_eq!(doc["hamiltonian"]["entries"].as_array().unwrap().len(), 64);
}

#[test]
fn geary_selection_and_null() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    write_dataset(
        &data,
        &(0..32).map(|q| (q, (q % 8) as f64)).collect::<Vec<_>>(),
    );
    let o = spinnet(&[
        "geary",
        "--data",
        data.to_str().unwrap(),
        "--network",
        "chimera:2x2",
        "--param",
        "gamma",
        "--subset",
        "external",
        "--shuffles",
        "50",
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert!(
        out.lines()
            .nth(1)
            .unwrap()
            .starts_with("gamma,external,0,32,16,true"),
        "{out}"
    );
    assert!(stderr(&o).contains("null gamma/external"));

    let o = spinnet(&["positions", "--data", data.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 10 * 4);
}

#[test]
fn reproduce_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("out");
    let o = spinnet(&[
        "reproduce",
        "--samples",
        "201",
        "--out",
        root.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let index = fs::read_to_string(root.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 13);
    for net in ["max-lengths", "min-max", "mid-lengths"] {
        assert!(root.join(net).join("network.json").exists());
        for c in ["constant", "dipole"] {
            for i in ["localized", "superposition"] {
                assert!(root.join(net).join(c).join(i).join("trace.csv").exists());
            }
            assert!(root
                .join(net)
                .join(c)
                .join("localized")
                .join("peaks.csv")
                .exists());
        }
    }
}

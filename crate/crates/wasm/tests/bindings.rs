use serde_json::Value;
use transmission_wasm::{curves_json, rate_study_json, simulate_json};

const CONFIG: &str = r#"{
    "geometry": {"case": "case1", "l1": 1, "l2": 1, "n1": 20, "n2": 20},
    "physics": {
        "beta": {"kind": "cubic"},
        "pi": {"kind": "allen_cahn"},
        "initial": {"kind": "mismatched", "u_level": 0.5, "v_level": -0.3, "amplitude": 0.2, "modes": 2}
    },
    "alpha": {"kind": "constant", "value": 5},
    "time": {"t_final": 2.0, "dt": 0.005}
}"#;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn simulation_is_subsampled_and_keeps_the_end() {
    let sim = parse(&simulate_json(CONFIG, "coupled").unwrap());
    let times = sim["times"].as_array().unwrap();
    assert!(times.len() <= 201);
    assert_eq!(times[0], 0.0);
    assert_eq!(times.last().unwrap().as_f64().unwrap(), 2.0);
    assert_eq!(sim["u"].as_array().unwrap().len(), times.len());
    assert_eq!(
        sim["u"][0].as_array().unwrap().len(),
        sim["x_u"].as_array().unwrap().len()
    );
    let jump = sim["jump"].as_array().unwrap();
    assert!(jump.last().unwrap().as_f64().unwrap() < jump[0].as_f64().unwrap());
}

#[test]
fn simulation_errors_are_messages() {
    assert!(simulate_json(CONFIG, "sideways").unwrap_err().contains("sideways"));
    let bad = CONFIG.replace("\"dt\": 0.005", "\"dt\": -1");
    assert!(simulate_json(&bad, "split").unwrap_err().contains("time.dt"));
    // merged runs need matched interface data
    assert!(simulate_json(CONFIG, "merged").is_err());
}

#[test]
fn blowup_schedule_reports_handoff() {
    let config = CONFIG.replace(
        r#""alpha": {"kind": "constant", "value": 5}"#,
        r#""alpha": {"kind": "blowup", "alpha0": 1, "t_star": 0.5, "p": 1}"#,
    );
    let sim = parse(&simulate_json(&config, "coupled").unwrap());
    assert!((sim["handoff_time"].as_f64().unwrap() - 0.499).abs() < 1e-12);
    assert!(sim["jump"].as_array().unwrap().last().unwrap().as_f64().unwrap() < 1e-12);
}

#[test]
fn rate_study_returns_a_fit() {
    let out = parse(
        &rate_study_json(r#"{"direction": "to_zero", "n": 10, "dt": 0.01, "alphas": [0.1, 0.01, 0.001]}"#).unwrap(),
    );
    assert_eq!(out["e_c"].as_array().unwrap().len(), 3);
    assert!(out["fit"]["slope"].as_f64().unwrap() > 0.0);
    assert!(rate_study_json(r#"{"direction": "to_zero", "n": 0, "dt": 0.01, "alphas": [0.1]}"#).is_err());
}

#[test]
fn curves_match_closed_forms() {
    let lambda = 0.5;
    let out = parse(&curves_json(r#"{"kind": "abs_subdiff"}"#, lambda, 2.0, 9).unwrap());
    let r: Vec<f64> = out["r"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (i, &x) in r.iter().enumerate() {
        // Huber function and soft thresholding
        let huber = if x.abs() <= lambda {
            x * x / (2.0 * lambda)
        } else {
            x.abs() - lambda / 2.0
        };
        let shrink = x.signum() * (x.abs() - lambda).max(0.0);
        assert!((out["moreau"][i].as_f64().unwrap() - huber).abs() < 1e-15);
        assert!((out["resolvent"][i].as_f64().unwrap() - shrink).abs() < 1e-15);
    }
    let boxed = parse(
        &curves_json(
            r#"{"kind": "indicator_interval", "lower": -1, "upper": 1}"#,
            1.0,
            2.0,
            5,
        )
        .unwrap(),
    );
    assert!(boxed["primitive"][0].is_null());
    assert_eq!(boxed["primitive"][2], 0.0);
    assert!(curves_json(r#"{"kind": "cubic"}"#, 0.0, 1.0, 5).is_err());
}

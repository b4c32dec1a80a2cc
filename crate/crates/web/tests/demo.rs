use ghz_tomo_web::{coincidences, curve_json, density_real, noisy_pair};

#[test]
fn curve_rows_follow_the_library() {
    let json: serde_json::Value = serde_json::from_str(&curve_json(1.0, 0.0, 8).unwrap()).unwrap();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert!((row["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
    assert!(curve_json(1.0, 0.0, 7).is_err());
}

#[test]
fn heatmap_is_ghz_corners() {
    let m = density_real(1.0, 0.0, 4).unwrap();
    assert_eq!(m.len(), 256);
    // hv vh = 0110, vh hv = 1001
    let (a, b) = (0b0110, 0b1001);
    for (i, j) in [(a, a), (a, b), (b, a), (b, b)] {
        assert!((m[16 * i + j] - 0.5).abs() < 1e-12);
    }
    assert!((m.iter().map(|x| x.abs()).sum::<f64>() - 2.0).abs() < 1e-12);
    assert!(density_real(1.0, 0.0, 10).is_err());
}

#[test]
fn analyzer_bases() {
    // plates at zero: H/V basis, perfect anticorrelation
    let p = coincidences([0.0; 4], 1.0, 0.0).unwrap();
    assert!((p[1] - 0.5).abs() < 1e-12 && (p[2] - 0.5).abs() < 1e-12);
    // half-wave plates at 22.5°: diagonal basis, ψ⁺ is correlated there
    let p = coincidences([0.0, 22.5, 0.0, 22.5], 1.0, 0.0).unwrap();
    assert!((p[0] + p[3] - 1.0).abs() < 1e-12);
    // white noise: every outcome equally likely
    let p = coincidences([10.0, 33.0, 71.0, 5.0], 0.25, 0.4).unwrap();
    assert!(p.iter().all(|x| (x - 0.25).abs() < 1e-12));
    assert!(noisy_pair(1.2, 0.0).is_err());
}

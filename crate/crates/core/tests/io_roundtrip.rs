use kdvlab::io::{parse_field_csv, write_trajectory};
use kdvlab::wellposed::{gaussian_data, LinearFlow};
use kdvlab::{FrequencyGrid, SymbolSpec};

#[test]
fn trajectory_files_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FrequencyGrid::with_spacing(6.0, 1.0 / 8.0).unwrap();
    let v0 = gaussian_data(grid, -1.0, 0.3).unwrap();
    let traj = LinearFlow::new(SymbolSpec::ost(), v0).sample(&[0.0, 0.1, 0.7]).unwrap();
    write_trajectory(dir.path(), &traj).unwrap();

    let index: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("index.json")).unwrap()).unwrap();
    let times: Vec<f64> = index["t_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(times, traj.times());
    let files = index["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for (name, (_, field)) in files.iter().zip(traj.samples()) {
        let text = std::fs::read_to_string(dir.path().join(name.as_str().unwrap())).unwrap();
        let back = parse_field_csv(grid, &text, true).unwrap();
        assert_eq!(back.coeffs(), field.coeffs());
    }
}

#[test]
fn truncated_csv_is_rejected() {
    let grid = FrequencyGrid::with_spacing(2.0, 0.5).unwrap();
    assert!(parse_field_csv(grid, "xi,re,im\n0,1,0\n", false).is_err());
}

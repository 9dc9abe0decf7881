use spd_core::jellium::{scf_solve, ScfSolution, SlabSpec};
use spd_core::units::UNITS;
use spd_core::{Error, MaterialParams};

fn thin() -> (SlabSpec, MaterialParams) {
    let mat = MaterialParams::aluminum();
    let spec = SlabSpec {
        thickness: UNITS.nm_to_bohr(1.0),
        basis_size: 30,
        grid_points: 161,
        ..SlabSpec::film(&mat)
    };
    (spec, mat)
}

#[test]
fn rerun_is_byte_identical() {
    let (spec, mat) = thin();
    let a = scf_solve(&spec, &mat).unwrap().to_json().unwrap();
    let b = scf_solve(&spec, &mat).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn file_round_trip() {
    let (spec, mat) = thin();
    let sol = scf_solve(&spec, &mat).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scf.json");
    sol.save(&path).unwrap();
    let back = ScfSolution::load(&path).unwrap();
    assert_eq!(
        back.to_json().unwrap(),
        std::fs::read_to_string(&path).unwrap()
    );
    assert_eq!(back.chemical_potential, sol.chemical_potential);
    assert_eq!(back.density, sol.density);
    assert_eq!(back.spec, sol.spec);
}

#[test]
fn missing_and_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        ScfSolution::load(&dir.path().join("none.json")),
        Err(Error::Io { .. })
    ));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format\": \"spd-scf\", \"version\": 99}").unwrap();
    assert!(matches!(ScfSolution::load(&bad), Err(Error::Format { .. })));
}

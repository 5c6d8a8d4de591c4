use nse_lab::spectral::{io, random_field, FieldFamily, GridSpec, Symmetry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(sym: Symmetry, seed: u64) -> nse_lab::spectral::SpectralField {
    let grid = GridSpec::new(3.0, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_field(
        grid,
        FieldFamily::PowerLaw {
            slope: 1.0,
            cutoff: 4.0,
        },
        sym,
        &mut rng,
    )
    .unwrap()
}

#[test]
fn json_roundtrip_is_bitwise() {
    for sym in [Symmetry::Real, Symmetry::Complex] {
        let u = field(sym, 1);
        let back = io::from_json(&io::to_json(&u).unwrap()).unwrap();
        assert_eq!(back, u);
        assert_eq!(back.grid().length().to_bits(), 3f64.to_bits());
    }
}

#[test]
fn sidecar_roundtrip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    for (sym, stem) in [(Symmetry::Real, "r"), (Symmetry::Complex, "c")] {
        let u = field(sym, 2);
        io::write_with_sidecar(&u, dir.path(), stem).unwrap();
        assert!(dir.path().join(format!("{stem}.bin")).exists());
        assert_eq!(
            io::read_snapshot(&dir.path().join(format!("{stem}.json"))).unwrap(),
            u
        );
    }
}

#[test]
fn inline_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let u = field(Symmetry::Real, 3);
    io::write_json(&u, &path).unwrap();
    assert_eq!(io::read_snapshot(&path).unwrap(), u);
}

#[test]
fn malformed_snapshots_are_rejected() {
    let u = field(Symmetry::Real, 4);
    let text = io::to_json(&u).unwrap();
    assert!(io::from_json("{}").is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["k_max"] = 2.into();
    assert!(io::from_json(&v.to_string()).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["kappa0"] = 5.0.into();
    assert!(io::from_json(&v.to_string()).is_err());
    let dir = tempfile::tempdir().unwrap();
    io::write_with_sidecar(&u, dir.path(), "s").unwrap();
    let bin = dir.path().join("s.bin");
    let bytes = std::fs::read(&bin).unwrap();
    std::fs::write(&bin, &bytes[..bytes.len() - 8]).unwrap();
    assert!(io::read_snapshot(&dir.path().join("s.json")).is_err());
}

use qca_core::channels::ChannelSpec;
use qca_core::classify::{self, ClassificationReport, ClassifyOptions};
use qca_core::entanglement::{audit_area_law, AuditRegions, Metric, ProductStateSampler};
use qca_core::tn::{self, TensorNetworkOperator};
use qca_core::{Lattice, RegionPolicy};

#[test]
fn spec_to_report_round_trip() {
    let lattice: Lattice = "1d,M=5,open".parse().unwrap();
    let spec = ChannelSpec::parse(r#"{"builtin": "brickwork", "layers": 1, "gate": "cz"}"#).unwrap();
    let channel = spec.build(&lattice).unwrap();
    let report = classify::taxonomy(&channel, ClassifyOptions { tol: 1e-8, policy: RegionPolicy::All }).unwrap();
    assert!(report.verdicts.is_qca && report.verdicts.is_lpqc);
    let text = serde_json::to_string(&report).unwrap();
    let back: ClassificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn tensor_network_survives_serialization() {
    let lattice: Lattice = "1d,M=5,periodic".parse().unwrap();
    let channel = ChannelSpec::parse("builtin:shift").unwrap().build(&lattice).unwrap();
    let pepu = tn::build_pepu_from_qca(&channel, 1, 4).unwrap();
    let text = serde_json::to_string(&pepu.tno).unwrap();
    let tno: TensorNetworkOperator = serde_json::from_str(&text).unwrap();
    let u = channel.unitary_operator(1e-10).unwrap().unwrap();
    let dense = tno.contract_to_dense().unwrap();
    let overlap = u.inner(&dense).unwrap();
    // equal up to a global phase
    let residual = dense.sub(&u.scale(overlap / overlap.norm())).unwrap().frobenius_norm() / u.frobenius_norm();
    assert!(residual < 1e-10, "{residual}");
}

#[test]
fn audit_csv_matches_records() {
    let lattice: Lattice = "1d,M=4,open".parse().unwrap();
    let spec = ChannelSpec::parse(r#"{"builtin": "brickwork", "seed": 8}"#).unwrap();
    let family = |m: usize| spec.build(&lattice.with_size(m)?);
    let sampler = ProductStateSampler { samples: 4, seed: 1 };
    let report = audit_area_law("brickwork", &family, &[4, 5], &sampler, Metric::MutualInformation, AuditRegions::Blocks).unwrap();
    let csv = report.to_csv();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "M,region_size,boundary,value");
    assert_eq!(rows.len(), report.per_region.len() + 1);
    for (row, rec) in rows[1..].iter().zip(&report.per_region) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), rec.size);
        assert_eq!(fields[1].parse::<usize>().unwrap(), rec.region.len());
        assert_eq!(fields[2].parse::<usize>().unwrap(), rec.boundary);
        assert_eq!(fields[3].parse::<f64>().unwrap(), rec.value);
    }
}

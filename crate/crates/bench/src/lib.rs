//! Fixtures shared by the benchmarks.

use kacstab::lattice::{ElasticSubgraph, Gcm, PairingVector, RootVector};
use kacstab::quiver::{build_string_rep, FramedRep, Segment};
use kacstab::stab::ExperimentConfig;

/// `B_n` with the spin weight and the offset `(1, 2, ..., n)`.
pub fn spin(n: usize) -> (Gcm, PairingVector, RootVector) {
    let mut w = vec![0; n];
    w[n - 1] = 1;
    (Gcm::type_b(n), PairingVector::new(w), RootVector::new((1..=n as i64).collect()).unwrap())
}

/// A two-string representation on `A_len` in a random basis, with the inner
/// vertices elastic.
pub fn string_rep(len: usize, seed: u64) -> (FramedRep, ElasticSubgraph) {
    let r = build_string_rep(len, &[Segment::x(0, len - 1), Segment::y(0, len - 1), Segment::x(0, 0)]).unwrap().random_basis_change(seed);
    let x0 = ElasticSubgraph::new(r.gcm(), &(1..len - 1).collect::<Vec<_>>()).unwrap();
    (r, x0)
}

pub fn adjoint_experiment(to: usize) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"diagram": {{"type": "A3"}}, "elastic": ["2"], "quantity": "weight",
            "w": [1, 0, 1], "v": [1, 1, 1], "m_grid": [{{"from": 0, "to": {to}}}]}}"#
    ))
    .unwrap()
}

//! A quick run of the library's invariants, reported check by check.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::builtin::{self, BrickGate, PairConvention};
use crate::channels::{physical, Channel};
use crate::classify::{self, ClassifyOptions};
use crate::entanglement as audit;
use crate::entanglement;
use crate::error::Result;
use crate::lattice::{Boundary, Lattice};
use crate::sampling::{self, RandomChannelKind};
use crate::tensor::{ancilla_labels, physical_labels, DenseOperator, SiteLabel};
use crate::tn;

/// A named unitary together with whether it is a QCA at the lattice range.
pub struct Fixture {
    pub name: String,
    pub channel: Channel,
    pub expect_qca: bool,
}

/// Unitaries on which the QCA, locality-preservation and simpleness
/// predicates are compared.
pub fn qca_fixtures(seed: u64) -> Result<Vec<Fixture>> {
    let open = |m| Lattice::chain(m, Boundary::Open);
    let fixture = |name: &str, channel: Channel, expect_qca| Fixture { name: name.to_string(), channel, expect_qca };
    Ok(vec![
        fixture("shift M=6 periodic", builtin::shift(&Lattice::chain(6, Boundary::Periodic)?)?, true),
        fixture("product M=4", builtin::product_unitary(&open(4)?, seed)?, true),
        fixture("brickwork 1 layer M=4", builtin::brickwork(&open(4)?, 1, BrickGate::Haar, seed)?, true),
        fixture("brickwork 2 cz layers M=5", builtin::brickwork(&open(5)?, 2, BrickGate::Cz, seed)?, true),
        fixture("brickwork 2 layers M=5", builtin::brickwork(&open(5)?, 2, BrickGate::Haar, seed)?, false),
        fixture(
            "brickwork 2 layers M=6 r=2",
            builtin::brickwork(&Lattice::new(1, 6, 2, Boundary::Open, 2)?, 2, BrickGate::Haar, seed)?,
            true,
        ),
        fixture("swap(0,3) M=4", builtin::swap(&open(4)?, 0, 3)?, false),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Wall time; left out of the JSON so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub version: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

type Outcome = Result<(bool, String)>;

fn ensure(ok: bool, detail: String) -> Outcome {
    Ok((ok, detail))
}

fn numerics(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let rank = rng.random_range(1..=8);
        let rho = sampling::random_density(rng, 8, rank);
        let labels = physical_labels(&[0, 1, 2]);
        let op = DenseOperator::new(labels.clone(), vec![2; 3], rho.clone())?;
        let stepwise = op.partial_trace(&[labels[2]])?.partial_trace(&[labels[0]])?;
        let direct = op.partial_trace(&[labels[0], labels[2]])?;
        worst = worst.max(stepwise.distance(&direct)?);
        let eig = op.eigh()?;
        worst = worst.max((eig.reconstruct() - &rho).norm());
        let trace: f64 = eig.values.iter().sum();
        worst = worst.max((trace - 1.0).abs());
        let s = entanglement::von_neumann_entropy(&op)?;
        if !(-1e-12..=3.0 + 1e-12).contains(&s) {
            return ensure(false, format!("entropy {s} outside [0, 3]"));
        }
    }
    ensure(worst <= 1e-8, format!("worst residual {worst:.2e}"))
}

fn example1_taxonomy() -> Outcome {
    let ch = builtin::example1(&Lattice::chain(4, Boundary::Open)?)?;
    let v = classify::evaluate(&ch, ClassifyOptions::default())?.verdicts;
    ensure(
        v.is_cpqc && !v.is_lpqc && !v.is_fqc && !v.is_unitary,
        format!("cpqc={} lpqc={} fqc={} unitary={}", v.is_cpqc, v.is_lpqc, v.is_fqc, v.is_unitary),
    )
}

fn example2_validity() -> Outcome {
    let lat = Lattice::chain(4, Boundary::Periodic)?;
    let r = builtin::example2(&lat)?.cjs()?.clone();
    let n = 1.0 / lat.hilbert_dim() as f64;
    let s = r.sub(&DenseOperator::identity_on(r.support(), 2)?.scale_real(n))?;
    let worst = r.support().iter().map(|l| s.partial_trace(&[*l]).map(|t| t.frobenius_norm())).try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))?;
    let min = r.eigvalsh()?.last().copied().unwrap_or(0.0);
    ensure(worst <= 1e-10 && min >= -1e-12, format!("single-site trace {worst:.2e}, min eigenvalue {min:.2e}"))
}

fn example3_pair_mi() -> Outcome {
    let lat = Lattice::chain(4, Boundary::Open)?;
    let ch = builtin::example3(&lat, PairConvention::Disjoint)?;
    let mut worst = 0.0f64;
    for (a, b) in builtin::half_shift_pairs(&lat) {
        let x = [SiteLabel::physical(a), SiteLabel::ancilla(a)];
        let y = [SiteLabel::physical(b), SiteLabel::ancilla(b)];
        worst = worst.max((entanglement::cjs_mutual_information(&ch, &x, &y)? - 1.0).abs());
    }
    ensure(worst <= 1e-9, format!("largest deviation from 1 bit {worst:.2e}"))
}

fn qca_equivalence(seed: u64) -> Outcome {
    let options = ClassifyOptions::default();
    let mut details = Vec::new();
    let mut ok = true;
    for f in qca_fixtures(seed)? {
        let qca = classify::is_qca(&f.channel, options)?;
        let lpqc = classify::is_lpqc(&f.channel, options)?.0;
        let simple = tn::is_simple(&f.channel, options)?.0;
        let agree = qca == lpqc && lpqc == simple && qca == f.expect_qca;
        ok &= agree;
        if !agree {
            details.push(format!("{}: qca={qca} lpqc={lpqc} simple={simple}", f.name));
        }
    }
    let detail = if ok { "all fixtures agree".to_string() } else { details.join("; ") };
    ensure(ok, detail)
}

fn pepu_shift(seed: u64) -> Outcome {
    let mut dims = Vec::new();
    let mut worst = 0.0f64;
    for m in 4..=6 {
        let pepu = tn::build_pepu_from_qca(&builtin::shift(&Lattice::chain(m, Boundary::Periodic)?)?, 1, seed)?;
        dims.push(pepu.bond_dimension);
        worst = worst.max(pepu.reconstruction_residual);
    }
    let same = dims.iter().all(|&d| d == dims[0] && d <= 4);
    ensure(same && worst <= 1e-8, format!("bond dimensions {dims:?}, reconstruction {worst:.2e}"))
}

fn inclusions(rng: &mut ChaCha8Rng) -> Outcome {
    let options = ClassifyOptions::default();
    let lat = Lattice::chain(4, Boundary::Open)?;
    for s in 0..2 {
        let ch = builtin::random_dilated(&lat, rng.random())?;
        let v = classify::evaluate(&ch, options)?.verdicts;
        if !(v.is_lpqc && v.is_cpqc) {
            return ensure(false, format!("dilated fixture {s} is not locality preserving"));
        }
    }
    let mut count = 0;
    for _ in 0..4 {
        for kind in RandomChannelKind::ALL {
            let ch = sampling::random_channel(rng, &lat, kind)?;
            let (fqc, _) = classify::is_fqc(&ch, options)?;
            let (lpqc, _) = classify::is_lpqc(&ch, options)?;
            if fqc != lpqc {
                return ensure(false, format!("{}: fqc={fqc} lpqc={lpqc}", ch.name()));
            }
            count += 1;
        }
    }
    let ex1 = builtin::example1(&lat)?;
    let witness = classify::is_cpqc(&ex1, options)?.0 && !classify::is_lpqc(&ex1, options)?.0;
    let parts = [Channel::identity(&lat)?, builtin::global_pauli_x(&lat)?];
    let components_local = parts.iter().map(|p| classify::is_lpqc(p, options).map(|r| r.0)).collect::<Result<Vec<_>>>()?;
    let mixture = Channel::convex_combine(&[0.5, 0.5], &parts)?;
    let non_convex = components_local.iter().all(|&b| b) && !classify::is_lpqc(&mixture, options)?.0;
    ensure(
        witness && non_convex,
        format!("{count} random channels agree, witness={witness}, non-convexity={non_convex}"),
    )
}

fn lpqc_area_law(rng: &mut ChaCha8Rng, seed: u64) -> Outcome {
    let lat = Lattice::chain(4, Boundary::Open)?;
    let fixtures = [
        builtin::brickwork(&lat, 1, BrickGate::Haar, seed)?,
        builtin::product_unitary(&lat, seed)?,
        builtin::random_dilated(&lat, seed)?,
        builtin::depolarizing(&lat, 0.3)?,
    ];
    let mut worst = f64::NEG_INFINITY;
    for ch in &fixtures {
        for region in classify::regions(&lat, Default::default())? {
            let (mi, bound) = entanglement::cjs_closure_mutual_information(ch, &region)?;
            worst = worst.max(mi - bound);
        }
    }
    let labels: Vec<SiteLabel> = physical_labels(&[0, 1, 2, 3]);
    let mut violations = 0;
    for _ in 0..20 {
        let rho = DenseOperator::new(labels.clone(), vec![2; 4], sampling::random_density(rng, 16, 16))?;
        if !entanglement::araki_lieb_bound_check(&rho, &labels[..1], &labels[1..2], &labels[2..])?.holds {
            violations += 1;
        }
    }
    ensure(
        worst <= 1e-9 && violations == 0,
        format!("largest excess over the Choi bound {worst:.2e}, {violations} Araki-Lieb violations"),
    )
}

fn qca_area_law(seed: u64) -> Outcome {
    let sampler = audit::ProductStateSampler { samples: 16, seed };
    let shift = |m| builtin::shift(&Lattice::chain(m, Boundary::Periodic)?);
    let report = audit::audit_area_law(
        "shift",
        &shift,
        &[4, 5],
        &sampler,
        audit::Metric::Entanglement,
        audit::AuditRegions::Blocks,
    )?;
    ensure(
        report.verdict == audit::Verdict::ConsistentWithAreaLaw && report.fitted_c <= 2.0 + 1e-9,
        format!("verdict {:?}, c = {:.4}", report.verdict, report.fitted_c),
    )
}

fn choi_roundtrip(rng: &mut ChaCha8Rng) -> Outcome {
    // E(ρ) through Kraus operators and through the Choi state agree.
    let lat = Lattice::chain(2, Boundary::Open)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let ch = sampling::random_channel(rng, &lat, RandomChannelKind::Global)?;
        let via_cjs = Channel::from_cjs(&lat, ch.cjs()?.clone())?;
        let rho = DenseOperator::new(physical(&lat), vec![2, 2], sampling::random_density(rng, 4, 2))?;
        worst = worst.max(ch.apply(&rho)?.distance(&via_cjs.apply(&rho)?)?);
        let marginal = ch.cjs()?.partial_trace(&physical(&lat))?;
        let id = DenseOperator::identity_on(&ancilla_labels(&[0, 1]), 2)?;
        worst = worst.max(marginal.distance(&id)?);
    }
    ensure(worst <= 1e-10, format!("worst residual {worst:.2e}"))
}

fn bound_values() -> Outcome {
    let one = tn::bond_dimension_bound(2, 1)?;
    let two = tn::bond_dimension_bound(2, 2)?;
    ensure(one == 256 && two == 65536, format!("bounds {one}, {two}"))
}

/// Runs every check; failures of individual checks (including errors) are
/// recorded rather than propagated.
pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let mut run = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error[{}]: {e}", e.code())),
        };
        checks.push(CheckResult { name: name.to_string(), passed, detail, seconds: start.elapsed().as_secs_f64() });
    };
    run("numerics", &mut || numerics(&mut rng));
    run("choi_roundtrip", &mut || choi_roundtrip(&mut rng));
    run("example1_taxonomy", &mut example1_taxonomy);
    run("example2_validity", &mut example2_validity);
    run("example3_pair_mi", &mut example3_pair_mi);
    run("qca_equivalence", &mut || qca_equivalence(seed));
    run("pepu_shift", &mut || pepu_shift(seed));
    run("bond_dimension_bound", &mut bound_values);
    run("class_inclusions", &mut || inclusions(&mut rng));
    run("lpqc_area_law", &mut || lpqc_area_law(&mut rng, seed));
    run("qca_area_law", &mut || qca_area_law(seed));
    let passed = checks.iter().all(|c| c.passed);
    SelftestReport { version: crate::VERSION.to_string(), seed, passed, checks }
}

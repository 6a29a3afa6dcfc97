//! Acceptance gate: one PASS/FAIL line per criterion.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use bcregions::bc_state::{bsc_mixture, DeterministicPair, Receiver, StateBC};
use bcregions::envelope::ConcaveEnvelope;
use bcregions::gaussian::dpc::dpc_gap;
use bcregions::gaussian::dominance::{dominance_harness, DominanceOptions};
use bcregions::gaussian::{GaussianBC, Scalar};
use bcregions::orderings::{example3_atlas, is_degraded, is_less_noisy, is_more_capable};
use bcregions::prob::{entropy, entropy_of, mutual_information, simplex_grid, ChannelMatrix, Pmf};
use bcregions::region::{RatePoint, Sweep};
use bcregions::regions::{
    bec_capacities, blackwell_state_region, capacities, finite_field_pair, finite_field_region, marton_rtd_sumrate,
    superposition_region, superposition_supports, tdcs_region, tdcs_supports, uv_outer_supports, MartonOptions,
};
use bcregions::search::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{excess, fan, has_vertex, random_channel_upto, random_pmf};

struct Gate {
    failed: usize,
}

impl Gate {
    fn report(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} [{id}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn four_bsc(gate: &mut Gate) {
    let start = Instant::now();
    let bc = bsc_mixture(&[0.28, 0.04, 0.02, 0.18], &[0.38, 0.62, 0.0, 0.0], &[0.0, 0.0, 0.38, 0.62]).unwrap();
    let grid = GridSpec::default_for(2);
    let (c1, c2) = capacities(&bc, grid).unwrap();
    let sum = [vec![1.0, 1.0]];
    let sup = superposition_supports(&bc, &sum, grid).unwrap()[0].value;
    let uv = uv_outer_supports(&bc, &sum, grid).unwrap()[0].value;
    let (marton, _) = marton_rtd_sumrate(&bc, MartonOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = (c1 - 0.5247).abs() <= 5e-4
        && (c2 - 0.5246).abs() <= 5e-4
        && (sup - c1.max(c2)).abs() <= 5e-4
        && marton >= 0.5250 - 1e-3
        && uv >= 0.5256 - 1e-3
        && uv - marton > 0.0
        && secs < 60.0;
    gate.report(
        1,
        "four-BSC numbers",
        pass,
        format!("C1={c1:.6} C2={c2:.6} superposition={sup:.6} marton={marton:.6} uv={uv:.6} uv-marton={:.2e} time={secs:.1}s", uv - marton),
    );
}

fn converse(gate: &mut Gate) {
    let det = DeterministicPair::blackwell();
    let grid = GridSpec::default_for(3);
    let dirs = Sweep::new(40, 1.0 / 32.0, 32.0).unwrap().directions(&[]);
    let inner = tdcs_supports(&det, 0.7, 0.3, &dirs, grid).unwrap();
    let outer = uv_outer_supports(&det.with_states(0.7, 0.3).unwrap(), &dirs, grid).unwrap();
    let worst = inner.iter().zip(&outer).map(|(a, b)| (a.value - b.value).abs()).fold(0.0, f64::max);

    let td = tdcs_region(&det, 0.5, 0.5, &dirs, grid).unwrap();
    let bw = blackwell_state_region(0.5, 0.5, &dirs, 200).unwrap();
    let triangle_dev = [&td, &bw]
        .iter()
        .flat_map(|r| r.vertices.iter())
        .filter(|v| v.r1 + v.r2 > 1e-9)
        .map(|v| (v.r1 + v.r2 - 1.0).abs())
        .fold(0.0, f64::max);
    let triangle = triangle_dev <= 1e-3
        && [&td, &bw].iter().all(|r| has_vertex(&r.vertices, 1.0, 0.0, 1e-3) && has_vertex(&r.vertices, 0.0, 1.0, 1e-3));

    let td = tdcs_region(&det, 1.0, 0.0, &dirs, grid).unwrap();
    let bw = blackwell_state_region(1.0, 0.0, &dirs, 200).unwrap();
    let corners = [&td, &bw]
        .iter()
        .all(|r| has_vertex(&r.vertices, 1.0, 0.0, 1e-3) && has_vertex(&r.vertices, 0.0, 1.0, 1e-3));
    gate.report(
        2,
        "Blackwell converse",
        worst <= 2e-3 && triangle && corners,
        format!("max |tdcs-uv|={worst:.2e} over {} directions, (0.5,0.5) vertex deviation={triangle_dev:.2e}, (1,0) corners present={corners}", dirs.len()),
    );
}

fn finite_field(gate: &mut Gate) {
    let dirs = Sweep::default().directions(&Sweep::breakpoints(0.7, 0.4));
    let closed = finite_field_region(2, 0.7, 0.4, &dirs).unwrap();
    let want = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.7, 0.6)];
    let exact = closed.vertices.len() == want.len() && want.iter().all(|&(a, b)| has_vertex(&closed.vertices, a, b, 1e-12));

    let pair = finite_field_pair(2, [[1, 0], [1, 1]]).unwrap();
    let generic = tdcs_region(&pair, 0.7, 0.4, &dirs, GridSpec::default_for(4)).unwrap();
    let want_points: Vec<RatePoint> = want.iter().map(|&(a, b)| RatePoint::new(a, b)).collect();
    let matched = want.iter().all(|&(a, b)| has_vertex(&generic.vertices, a, b, 2e-3));
    let spill = generic
        .vertices
        .iter()
        .map(|v| excess(v, &want_points, &fan(360)))
        .fold(0.0, f64::max);
    gate.report(
        3,
        "finite-field region",
        exact && matched && spill <= 2e-3,
        format!("closed form exact={exact}, generic vertices matched={matched}, generic overshoot={spill:.2e}"),
    );
}

fn atlas(gate: &mut Gate) {
    let r = example3_atlas(50, 0.02).unwrap();
    gate.report(4, "ordering atlas", r.mismatches == 0, format!("{} mismatches over {} compared verdicts", r.mismatches, r.compared));
}

fn chain(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut breaks, mut degraded, mut less_noisy) = (0, 0, 0);
    for i in 0..200 {
        let x = rng.random_range(2..=3);
        let w1 = random_channel_upto(&mut rng, x, 4);
        let w2 = if i % 2 == 0 {
            random_channel_upto(&mut rng, x, 4)
        } else {
            let cols = w1.cols();
            w1.compose(&random_channel_upto(&mut rng, cols, 4)).unwrap()
        };
        let d = is_degraded(&w1, &w2).unwrap().0;
        let l = is_less_noisy(&w1, &w2).unwrap().0;
        let m = is_more_capable(&w1, &w2).unwrap().0;
        degraded += d as usize;
        less_noisy += l as usize;
        if (d && !l) || (l && !m) {
            breaks += 1;
        }
    }
    let mut lifted_ok = 0;
    for _ in 0..50 {
        let x = rng.random_range(2..=3);
        let w1 = random_channel_upto(&mut rng, x, 4);
        let cols = w1.cols();
        let w2 = w1.compose(&random_channel_upto(&mut rng, cols, 4)).unwrap();
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let bc = StateBC::two_component(w1, w2, a.max(b), a.min(b)).unwrap();
        if is_degraded(&bc.lift(Receiver::One), &bc.lift(Receiver::Two)).unwrap().0 {
            lifted_ok += 1;
        }
    }
    gate.report(
        5,
        "ordering chain and transfer",
        breaks == 0 && lifted_ok == 50,
        format!("chain breaks={breaks} (degraded {degraded}, less noisy {less_noisy} of 200), lifted degraded {lifted_ok}/50"),
    );
}

fn bec(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let dirs = Sweep::default().directions(&[1.0]);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.random_range(2..=4);
        let eps: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let (p1, p2) = (random_pmf(&mut rng, k), random_pmf(&mut rng, k));
        let bc = StateBC::new(eps.iter().map(|&e| ChannelMatrix::bec(e)).collect(), p1.clone(), p2.clone()).unwrap();
        let (c1, c2) = bec_capacities(&eps, &p1, &p2).unwrap();
        let r = superposition_region(&bc, &dirs, GridSpec::default_for(2)).unwrap();
        let tri = [RatePoint::new(0.0, 0.0), RatePoint::new(c1, 0.0), RatePoint::new(0.0, c2)];
        let out = r.vertices.iter().map(|v| excess(v, &tri, &fan(360))).fold(0.0, f64::max);
        let corner = |a: f64, b: f64| r.vertices.iter().map(|v| (v.r1 - a).abs().max((v.r2 - b).abs())).fold(f64::INFINITY, f64::min);
        worst = worst.max(out).max(corner(c1, 0.0)).max(corner(0.0, c2));
    }
    gate.report(6, "k-BEC triangle", worst <= 1e-6, format!("max vertex deviation {worst:.2e} over 20 instances"));
}

fn dpc(gate: &mut Gate) {
    let scalar = |p1, p2| {
        GaussianBC::scalar(Scalar {
            g: 1.0,
            n1: 1.0,
            n2: 2.0,
            power: 10.0,
            p1,
            p2,
        })
        .unwrap()
    };
    let g = dpc_gap(&scalar(0.8, 0.3), 2.0).unwrap();
    let state_ok = g.gap >= 0.0 && (g.corner || g.gap > 1e-4);
    let fixed = scalar(1.0, 0.0);
    let lambdas: Vec<f64> = Sweep::default().lambdas().into_iter().filter(|l| *l > 1.0).collect();
    let worst = lambdas.iter().map(|&l| dpc_gap(&fixed, l).unwrap().gap).fold(0.0, f64::max);
    gate.report(
        7,
        "dirty-paper gap",
        state_ok && worst <= 1e-6,
        format!(
            "gap(λ=2)={:.3e} ({} optimum), fixed-channel max gap {worst:.1e} over {} weights",
            g.gap,
            if g.corner { "corner" } else { "interior" },
            lambdas.len()
        ),
    );
}

/// Envelope invariants on 1000 sampled functions and entropy bounds on 1000
/// random pmfs and channels.
fn properties(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut envelope_bad, mut concave_bad, mut entropy_bad) = (0, 0, 0);
    for i in 0..1000 {
        let points = if i % 2 == 0 { simplex_grid(2, 20) } else { simplex_grid(3, 6) };
        let dim = points[0].len();
        let values: Vec<f64> = points.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let env = ConcaveEnvelope::new(points.clone(), values.clone()).unwrap();
        let at = env.at_samples().unwrap();
        for (j, a) in at.iter().enumerate() {
            let r = env.materialize(a.clone());
            let total: f64 = r.mixture.iter().map(|(w, _)| w).sum();
            let recon: f64 = r.mixture.iter().map(|(w, p)| w * values[points.iter().position(|q| q == p).unwrap()]).sum();
            let bary_err = (0..dim)
                .map(|c| (r.mixture.iter().map(|(w, p)| w * p[c]).sum::<f64>() - points[j][c]).abs())
                .fold(0.0, f64::max);
            if r.value < values[j] - 1e-12 || (recon - r.value).abs() > 1e-9 || bary_err > 1e-9 || (total - 1.0).abs() > 1e-9 || r.mixture.len() > dim + 1 {
                envelope_bad += 1;
            }
        }
        if dim == 2 {
            for j in 1..points.len() - 1 {
                if at[j].value < 0.5 * (at[j - 1].value + at[j + 1].value) - 1e-9 {
                    envelope_bad += 1;
                }
            }
        }
        // concave: minimum of random affine functions
        let planes: Vec<Vec<f64>> = (0..4).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let g = |p: &Pmf| planes.iter().map(|a| (0..dim).map(|c| a[c] * p[c]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        let env = ConcaveEnvelope::sample(points.clone(), g).unwrap();
        for (p, a) in points.iter().zip(env.at_samples().unwrap()) {
            if (a.value - g(p)).abs() > 1e-9 {
                concave_bad += 1;
            }
        }

        let n = rng.random_range(2..=6);
        let px = random_pmf(&mut rng, n);
        let w = random_channel_upto(&mut rng, n, 6);
        let h = entropy(&px);
        let hy = entropy_of(&w.output(&px).unwrap());
        let mi = mutual_information(&px, &w).unwrap();
        if !(h >= 0.0 && h <= (n as f64).log2() + 1e-12 && mi >= -1e-12 && mi <= h.min(hy) + 1e-12) {
            entropy_bad += 1;
        }
    }
    let scalar = GaussianBC::scalar(Scalar {
        g: 1.0,
        n1: 1.0,
        n2: 2.0,
        power: 10.0,
        p1: 0.8,
        p2: 0.3,
    })
    .unwrap();
    let start = Instant::now();
    let sampled = dominance_harness(&scalar, &DominanceOptions::default()).unwrap();
    let closest = sampled
        .outcomes
        .iter()
        .map(|o| (o.estimate - o.gaussian) / o.sigma.max(1e-300))
        .fold(f64::NEG_INFINITY, f64::max);
    gate.report(
        8,
        "property suites",
        envelope_bad == 0 && concave_bad == 0 && entropy_bad == 0 && sampled.exceedances == 0,
        format!(
            "envelope violations={envelope_bad}, concave fixed-point violations={concave_bad}, entropy/MI violations={entropy_bad}, \
             Gaussian-input exceedances={}/{} (largest z={closest:.1}, {:.1}s)",
            sampled.exceedances,
            sampled.outcomes.len(),
            start.elapsed().as_secs_f64()
        ),
    );
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: 0 };
    four_bsc(&mut gate);
    converse(&mut gate);
    finite_field(&mut gate);
    atlas(&mut gate);
    chain(&mut gate);
    bec(&mut gate);
    dpc(&mut gate);
    properties(&mut gate);
    if gate.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", gate.failed);
        ExitCode::FAILURE
    }
}

//! Invariants of the full interferometer pipelines on the Gaussian backend.

use proptest::prelude::*;
use su11net_core::metrology::{error_sensitivity, qfi_closed_form, qfi_generator, signal_stats, ReportOptions};
use su11net_core::{qcrb, saturation_report, Backend, BosonicState, DistributorKind, Pipeline, ReportFlag, Scheme};

fn network(scheme: Scheme, encoding: Vec<f64>, r: f64) -> Pipeline {
    Pipeline::builder(scheme).modes(encoding.len()).squeezing(r).encoding(encoding).build().unwrap()
}

fn port1_signal(p: &Pipeline) -> f64 {
    signal_stats(p, 0, &Backend::Gaussian).unwrap().mean
}

fn ratio(p: &Pipeline, eta: f64, h: Option<f64>) -> f64 {
    let est = error_sensitivity(p, eta, h, &Backend::Gaussian).unwrap();
    let f = qfi_closed_form(p.scheme(), p.modes(), p.probe().squeeze.r(), None).unwrap();
    est.delta / qcrb(f).unwrap().value()
}

fn encoding() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.3f64..0.3, 2..=8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn port1_signal_depends_only_on_permutation_class(enc in encoding(), r in 0.0f64..1.5, phase in any::<bool>()) {
        let scheme = if phase { Scheme::NetworkPhase } else { Scheme::NetworkDisplacement };
        let a = port1_signal(&network(scheme, enc.clone(), r));
        let mut shuffled = enc.clone();
        shuffled.reverse();
        shuffled.rotate_left(enc.len() / 2);
        let b = port1_signal(&network(scheme, shuffled, r));
        prop_assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn displacement_output_amplitude(enc in encoding(), r in 0.0f64..2.0) {
        let m = enc.len() as f64;
        let avg = enc.iter().sum::<f64>() / m;
        let out = network(Scheme::NetworkDisplacement, enc, r).run(&Backend::Gaussian).unwrap();
        let xi = out.mean_amplitude(0).unwrap();
        prop_assert!((xi.re - m.sqrt() * avg * r.exp()).abs() < 1e-10);
        prop_assert!(xi.im.abs() < 1e-10);
    }

    #[test]
    fn displacement_saturates_exactly(m in 1usize..=16, r in 0.0f64..2.0, avg in 0.02f64..0.3) {
        let scheme = if m == 1 { Scheme::SingleDisplacement } else { Scheme::NetworkDisplacement };
        let p = Pipeline::builder(scheme).modes(m).squeezing(r).uniform(avg).build().unwrap();
        let rep = saturation_report(&p, &ReportOptions::default()).unwrap();
        prop_assert!((rep.saturation_ratio - 1.0).abs() < 1e-6, "ratio {}", rep.saturation_ratio);
    }

    #[test]
    fn sensitivity_respects_cramer_rao(enc in encoding(), r in 0.5f64..2.0, avg in 0.01f64..0.3, phase in any::<bool>()) {
        let scheme = if phase { Scheme::NetworkPhase } else { Scheme::NetworkDisplacement };
        let p = network(scheme, enc, r).with_average(avg);
        let est = error_sensitivity(&p, avg, None, &Backend::Gaussian).unwrap();
        let bound = qcrb(qfi_generator(&p).unwrap()).unwrap().value();
        prop_assert!(est.delta >= bound - 1e-9, "delta {} bound {bound}", est.delta);
    }

    #[test]
    fn distributor_choice_is_invisible(r in 0.0f64..1.5, k in 1u32..=3, phase in any::<bool>(), seed in 0.0f64..0.3) {
        let m = 1usize << k;
        let scheme = if phase { Scheme::NetworkPhase } else { Scheme::NetworkDisplacement };
        let enc: Vec<f64> = (0..m).map(|j| seed * (j as f64 + 1.0) / m as f64).collect();
        let build = |kind| Pipeline::builder(scheme).modes(m).squeezing(r).distributor(kind).encoding(enc.clone()).build().unwrap();
        let (a, b) = (build(DistributorKind::Dft), build(DistributorKind::Hadamard));
        prop_assert!((port1_signal(&a) - port1_signal(&b)).abs() < 1e-10);
        let (qa, qb) = (qfi_generator(&a).unwrap(), qfi_generator(&b).unwrap());
        prop_assert!((qa - qb).abs() < 1e-10 * qa.max(1.0));
    }
}

#[test]
fn phase_network_signal_is_quadratic_in_mean_phase() {
    for r in [0.5, 1.0, 1.5] {
        let a = 4.0 * f64::cosh(r).powi(2) * f64::sinh(r).powi(2);
        for phi in [1e-5, 1e-4, 1e-3] {
            let s = port1_signal(&network(Scheme::NetworkPhase, vec![phi; 3], r));
            assert!((s / (a * phi * phi) - 1.0).abs() < 1e-3, "r={r} phi={phi}");
        }
    }
}

#[test]
fn spread_term_sets_signal_at_zero_mean() {
    for r in [0.5, 1.0, 1.5] {
        let h = 1e-3;
        let s = port1_signal(&network(Scheme::NetworkPhase, vec![h, -h], r));
        assert!((s / (h * h * r.sinh().powi(2)) - 1.0).abs() < 2e-2, "r={r}");
    }
}

#[test]
fn homogeneous_phase_network_saturates_from_r_one() {
    for m in [1usize, 2, 4, 8] {
        for r in [1.0, 1.25, 1.5, 2.0] {
            let p = network(Scheme::NetworkPhase, vec![1e-4; m], r);
            assert!((ratio(&p, 1e-4, None) - 1.0).abs() < 5e-3, "M={m} r={r}");
        }
    }
}

#[test]
fn ratio_falls_toward_one_with_squeezing_for_spread_phases() {
    let enc = vec![1.5e-3, 0.5e-3, 1.2e-3, 0.8e-3];
    let avg = enc.iter().sum::<f64>() / enc.len() as f64;
    let ratios: Vec<f64> = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
        .iter()
        .map(|&r| ratio(&network(Scheme::NetworkPhase, enc.clone(), r), avg, None))
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1] < w[0], "{ratios:?}");
    }
    assert!(ratios.iter().all(|&x| x > 1.0));
    assert!(ratios[0] - 1.0 > 5.0 * (ratios[6] - 1.0), "{ratios:?}");
}

#[test]
fn report_flags_small_squeezing_and_spread() {
    let p = network(Scheme::NetworkPhase, vec![0.02, 0.0], 0.5);
    let rep = saturation_report(&p, &ReportOptions::default()).unwrap();
    assert!(rep.flags.contains(&ReportFlag::SmallSqueezing));
    assert!(rep.flags.contains(&ReportFlag::SpreadBias));
    let split = rep.phase_split.unwrap();
    assert!(split.i2 > 0.0 && split.i1 > 0.0);
}

#[test]
fn time_reversal_returns_vacuum() {
    for scheme in [Scheme::NetworkPhase, Scheme::NetworkDisplacement] {
        for m in [2usize, 3, 5] {
            for r in [0.3, 1.0, 2.0] {
                let out = network(scheme, vec![0.0; m], r).run(&Backend::Gaussian).unwrap();
                let (n, var) = out.total_photon_moments();
                assert!(n.abs() < 1e-10 && var.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn encoded_state_keeps_probe_energy() {
    for m in [2usize, 4] {
        let r: f64 = 1.2;
        let p = network(Scheme::NetworkPhase, vec![0.4, -0.1, 0.2, 0.0][..m].to_vec(), r);
        let (n, _) = p.encoded_state(&Backend::Gaussian).unwrap().total_photon_moments();
        assert!((n - r.sinh().powi(2)).abs() < 1e-10);
    }
}

use infolat_core::protocols::compare_effective;
use infolat_core::{run, Protocol, QuenchConfig};

fn full(tau: f64) -> QuenchConfig {
    QuenchConfig {
        l_q: Some(6),
        probe_len: Some(24),
        tau: Some(tau),
        t_stop: Some(20.0),
        dt: Some(0.5),
        ..QuenchConfig::new(Protocol::KitaevProbe)
    }
}

fn effective() -> QuenchConfig {
    QuenchConfig {
        probe_len: Some(24),
        t_stop: Some(20.0),
        dt: Some(0.5),
        ..QuenchConfig::new(Protocol::EffectiveModel)
    }
}

#[test]
fn effective_model_improves_with_chain_gap() {
    let eff = run(&effective()).unwrap();
    let coarse = compare_effective(&run(&full(20.0)).unwrap(), &eff).unwrap();
    let fine = compare_effective(&run(&full(200.0)).unwrap(), &eff).unwrap();
    assert!(fine.max() < coarse.max(), "{:.3e} vs {:.3e}", fine.max(), coarse.max());
    assert!(fine.edge < coarse.edge);
    // The top of Q only sees the right edge mode, which the effective site
    // reproduces exactly at the sweet spot.
    assert!(coarse.i_top < 1e-9 && fine.i_top < 1e-9);
    assert!(coarse.max() < 0.05, "{coarse:?}");
    assert!(fine.max() < 1e-3, "{fine:?}");
}

#[test]
fn models_agree_exactly_when_decoupled() {
    let cut = |c: QuenchConfig| QuenchConfig { tau_t: Some(0.0), ..c };
    let eff = run(&cut(effective())).unwrap();
    let cmp = compare_effective(&run(&cut(full(20.0))).unwrap(), &eff).unwrap();
    assert!(cmp.max() < 1e-10, "{cmp:?}");
}

#[test]
fn mismatched_probes_are_rejected() {
    let eff = run(&QuenchConfig {
        probe_len: Some(20),
        ..effective()
    })
    .unwrap();
    assert!(compare_effective(&run(&full(20.0)).unwrap(), &eff).is_err());
}

use oy_lattice::dynamics::{
    centered_w, drift, init_stationary, LatticeState, NoObserver, NoiseBlock, Stepper,
};
use oy_lattice::estimators::{ks_critical_1pct, ks_statistic, replica_rng, ReplicaPlan, Summary};
use oy_lattice::special::stationary_cdf;
use oy_lattice::ModelParams;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn initial_state_is_iid_stationary() {
    let p = ModelParams::new(16, 64, 1e-3, 0.0).unwrap();
    let mut rng = replica_rng(1, 0);
    let pooled: Vec<f64> = (0..300)
        .flat_map(|_| init_stationary(&p, &mut rng).u)
        .collect();
    let ks = ks_statistic(&pooled, |x| stationary_cdf(&p, x)).unwrap();
    assert!(ks < ks_critical_1pct(pooled.len()), "ks = {ks}");
}

#[test]
fn perturbation_only_moves_slots_to_the_right() {
    let p = ModelParams::new(16, 12, 1e-3, 0.0).unwrap();
    let mut rng = replica_rng(2, 0);
    let base = init_stationary(&p, &mut rng);
    let noises: Vec<NoiseBlock> = (0..500)
        .map(|_| {
            let mut b = NoiseBlock::zeros(12);
            b.refill(&mut rng);
            b
        })
        .collect();
    let evolve = |start: LatticeState| {
        let mut s = Stepper::new(p, start).unwrap();
        for b in &noises {
            s.step_with_noise(b, &mut NoObserver).unwrap();
        }
        s.into_state()
    };
    let k = 6;
    let mut bumped = base.clone();
    bumped.u[k - 1] += 0.3;
    let (a, b) = (evolve(base), evolve(bumped));
    assert_eq!(a.u[..k - 1], b.u[..k - 1]);
    assert!(a.u[k..].iter().zip(&b.u[k..]).any(|(x, y)| x != y));
}

#[test]
fn centered_w_stays_mean_zero() {
    let p = ModelParams::new(16, 16, 1e-3, 1.0 / 16.0).unwrap();
    let plan = ReplicaPlan::new(400, 9, p).unwrap();
    let w = plan
        .map(|_, rng| {
            let mut s = Stepper::new(p, init_stationary(&p, rng))?;
            s.run(p.steps(), rng, &mut NoObserver)?;
            Ok(s.state().u.iter().map(|&u| centered_w(u, &p)).sum::<f64>() / 16.0)
        })
        .unwrap();
    let s = Summary::from_samples(&w).unwrap();
    assert!(s.within(0.0, 3.0), "{s:?}");
}

proptest! {
    #[test]
    fn drift_telescopes(us in prop::collection::vec(-1.0f64..1.0, 1..40)) {
        let p = ModelParams::new(64, us.len(), 1e-3, 0.0).unwrap();
        let state = LatticeState::new(0.0, us.clone());
        let d = drift(&state, &p).unwrap();
        let total: f64 = d.iter().sum();
        let last = centered_w(*us.last().unwrap(), &p);
        prop_assert!((total + last).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_flat_state_moves_only_the_first_slot(seed in any::<u64>()) {
        // with W̄_0 = 0 only slot 1 sees a non-zero drift on a flat profile
        let p = ModelParams::new(256, 8, 1e-3, 0.0).unwrap();
        let level = replica_rng(seed, 0).random_range(-0.2..0.2);
        let mut s = Stepper::new(p, LatticeState::new(0.0, vec![level; 8])).unwrap();
        s.step_with_noise(&NoiseBlock::zeros(8), &mut NoObserver).unwrap();
        let expect = level - centered_w(level, &p) * p.dt;
        prop_assert!((s.state().u[0] - expect).abs() < 1e-15);
        prop_assert!(s.state().u[1..].iter().all(|&u| u == level));
    }
}

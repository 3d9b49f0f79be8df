use coopsearch_core::{LocalStore, MessagePackage, Scenario, Simulation, Strategy};

fn short(mut sc: Scenario, duration: u32) -> Scenario {
    sc.duration = duration;
    sc
}

#[test]
fn same_seed_same_logs() {
    let sc = short(Scenario::paper(), 25);
    let a = Simulation::new(&sc).unwrap().run();
    let b = Simulation::new(&sc).unwrap().run();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.decisions, b.decisions);
}

#[test]
fn maps_stay_in_range_while_flying() {
    let sc = short(Scenario::dynamic(), 40);
    let mut sim = Simulation::new(&sc).unwrap();
    for _ in 0..sc.duration {
        sim.step();
        for agent in sim.agents() {
            assert!(agent.map.p.iter().all(|p| (0.0..=1.0).contains(p)));
            assert!(agent.map.chi.iter().all(|c| (0.0..=1.0).contains(c)));
        }
    }
}

#[test]
fn uncertainty_never_grows() {
    let sc = short(Scenario::paper(), 60);
    let out = Simulation::new(&sc).unwrap().run();
    for w in out.metrics.windows(2) {
        for (a, b) in w[0].uavs.iter().zip(&w[1].uavs) {
            assert!(b.chi <= a.chi, "uav {} chi {} -> {} at t={}", a.id, a.chi, b.chi, w[1].t);
        }
    }
}

#[test]
fn stores_round_trip_through_the_wire() {
    let sc = short(Scenario::paper(), 30);
    let mut sim = Simulation::new(&sc).unwrap();
    for _ in 0..sc.duration {
        sim.step();
    }
    for agent in sim.agents() {
        let bytes = agent.store.encode();
        let pkg = MessagePackage::decode(&bytes).unwrap();
        assert_eq!(pkg, agent.store.package());
        let rebuilt = LocalStore::from_package(&pkg);
        assert_eq!(rebuilt.encode(), bytes);
    }
}

#[test]
fn unconstrained_links_everyone_every_epoch() {
    let mut sc = short(Scenario::paper(), 10);
    sc.strategy = Strategy::Unconstrained;
    let out = Simulation::new(&sc).unwrap().run();
    let n = out.metrics[0].uavs.len();
    assert!(out.metrics.iter().skip(1).all(|f| f.links == n * (n - 1) / 2));
}

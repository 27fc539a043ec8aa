use approx::assert_relative_eq;
use proptest::prelude::*;

use pushguide::config::{bundled, RunConfig};
use pushguide::light_atom::{pushing_force, pushing_potential};
use pushguide::numerics::adaptive_simpson;
use pushguide::transport::conditional;
use pushguide::units::angular;
use pushguide::{ModelOptions, Param, Scenario, Transport};

fn scenario(name: &str) -> Scenario {
    RunConfig::parse(bundled(name).unwrap()).unwrap().scenario
}

fn transport(sc: &Scenario) -> Transport {
    Transport::new(&sc.species, &sc.beam, &sc.geometry, &sc.options).unwrap()
}

fn rb_with(power_mw: f64, detuning_ghz: f64) -> Scenario {
    scenario("rb_paper")
        .with(Param::Power, power_mw * 1e-3)
        .unwrap()
        .with(Param::Detuning, angular(detuning_ghz * 1e9))
        .unwrap()
}

#[test]
fn energy_bookkeeping() {
    for name in ["cs_paper", "rb_paper"] {
        let sc = scenario(name);
        let t = transport(&sc);
        let m = sc.species.mass;
        let g = sc.geometry.gravity;
        let v0 = t.entrance_velocity();
        let bracket = sc.options.bracket;
        for i in 1..=100 {
            let z = sc.geometry.trap_separation * i as f64 / 100.0;
            let v = t.velocity(z);
            let kinetic = 0.5 * m * v * v - 0.5 * m * v0 * v0 - m * g * z;
            let drop = pushing_potential(&sc.beam, &sc.species, t.pumping(), bracket, 0.0)
                - pushing_potential(&sc.beam, &sc.species, t.pumping(), bracket, z);
            assert_relative_eq!(kinetic, drop, max_relative = 1e-10);
            // the potential is the antiderivative of the force
            let work = adaptive_simpson(|x| pushing_force(&sc.beam, &sc.species, t.pumping(), bracket, x).value, 0.0, z, 1e-13)
                .unwrap();
            assert_relative_eq!(work, drop, max_relative = 1e-10);
        }
    }
}

#[test]
fn temperature_ode_matches_closed_form() {
    for name in ["cs_paper", "rb_paper"] {
        let t = transport(&scenario(name));
        let ode = t.horizontal_temperature_ode(1000);
        assert_eq!(ode.len(), 1001);
        for (z, th) in ode {
            let closed = t.horizontal_temperature(z);
            assert!(((th - closed) / closed).abs() < 1e-6, "{name} z={z}: ode {th:e} closed {closed:e}");
        }
    }
}

#[test]
fn adiabatic_invariant_without_heating() {
    for name in ["cs_paper", "rb_paper"] {
        let mut sc = scenario(name);
        sc.options.heating = false;
        let t = transport(&sc);
        let w0 = sc.beam.waist_at(0.0);
        let inv0 = sc.options.initial_temperature * w0 * w0;
        for i in 0..=200 {
            let z = sc.geometry.trap_separation * i as f64 / 200.0;
            let w = sc.beam.waist_at(z);
            assert_relative_eq!(t.horizontal_temperature(z) * w * w, inv0, max_relative = 1e-12);
        }
    }
}

#[test]
fn cloud_radius_at_exit() {
    for name in ["cs_paper", "rb_paper"] {
        let sc = scenario(name);
        let t = transport(&sc);
        let z_out = t.exit().z_out.expect("bundled configs leave the guide");
        let r = t.report().unwrap();
        assert_relative_eq!(r.delta_r_out.unwrap() / sc.beam.waist_at(z_out), 1.0 / 8f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(t.cloud_radius(z_out), r.delta_r_out.unwrap(), max_relative = 1e-15);
        // the guided harmonic radius meets the exit radius from below
        let before = t.cloud_radius(z_out - 1e-9);
        assert_relative_eq!(before, t.cloud_radius(z_out), max_relative = 1e-5);
    }
}

#[test]
fn adiabaticity_small_while_guided() {
    for name in ["cs_paper", "rb_paper"] {
        let t = transport(&scenario(name));
        let a = t.adiabaticity_max();
        assert!(a > 0.0 && a < 1.0, "{name}: {a}");
    }
}

#[test]
fn conditional_fixed_points() {
    assert_eq!(conditional(0.0, 10.0), 1.0);
    assert_eq!(conditional(1.0, 10.0), 0.5);
}

#[test]
fn argmax_detuning_moves_out_with_power() {
    let argmax = |p: f64| {
        (0..200)
            .map(|i| -2.5 + 2.3 * i as f64 / 199.0)
            .filter_map(|d| rb_with(p, d).evaluate().ok().map(|r| (d, r.refined_score)))
            .fold((0.0, f64::NEG_INFINITY), |best, (d, s)| if s > best.1 { (d, s) } else { best })
            .0
    };
    let (low, high) = (argmax(10.0), argmax(21.0));
    assert!(high < low, "argmax at 10 mW {low} GHz, at 21 mW {high} GHz");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn velocity_monotone_and_heating_positive(p in 5.0f64..40.0, d in -3.0f64..-0.6, t0 in 5.0f64..80.0) {
        let mut sc = rb_with(p, d);
        sc.options = ModelOptions { initial_temperature: t0 * 1e-6, ..sc.options };
        let t = transport(&sc);
        let mut v_prev = t.velocity(0.0);
        let mut inv_prev = 0.0;
        for i in 1..=300 {
            let z = sc.geometry.trap_separation * i as f64 / 300.0;
            let v = t.velocity(z);
            prop_assert!(v > v_prev);
            v_prev = v;
            let w = sc.beam.waist_at(z);
            let inv = t.horizontal_temperature(z) * w * w;
            prop_assert!(inv > inv_prev);
            inv_prev = inv;
        }
    }

    #[test]
    fn travel_time_falls_with_power(p in 5.0f64..30.0, dp in 0.5f64..10.0, d in -3.0f64..-0.6) {
        let slow = rb_with(p, d).evaluate().unwrap();
        let fast = rb_with(p + dp, d).evaluate().unwrap();
        prop_assert!(fast.travel_time < slow.travel_time);
    }

    #[test]
    fn scores_are_bounded(p in 1.0f64..60.0, d in -4.0f64..-0.3) {
        if let Ok(r) = rb_with(p, d).evaluate() {
            prop_assert!((0.0..=1.0).contains(&r.refined_score));
            prop_assert!((0.0..=1.0).contains(&r.two_level_score));
            prop_assert!(r.delta_r_arrival >= 0.0 && r.v_arrival > 0.0);
        }
    }
}

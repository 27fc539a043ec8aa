use pushguide::light_atom::{pumping_for, pushing_force, scattering_rate};
use pushguide::monte_carlo::heating_calibration;
use pushguide::units::angular;
use pushguide::{run_ensemble, BeamParams, Geometry, McConfig, PumpingBracket, SpeciesParams};

#[test]
fn mean_velocity_grows_linearly_in_uniform_light() {
    let s = SpeciesParams::rubidium_87();
    // 3 mm waist focused mid-path: z_R ≈ 36 m, intensity flat to 1e-4
    let b = BeamParams::new(0.2, angular(-1e9), 3e-3, 0.2, None, s.wavelength).unwrap();
    let g = Geometry::with_gravity(0.4, 4e-3, 0.01, 0.0).unwrap();
    let p = pumping_for(&b, &s).unwrap();
    let mut c = McConfig::new(4000, 3, 0.0).with_even_grid(8, g.trap_separation);
    c.guide = false;
    c.initial_radius = Some(1e-4);
    let v0 = 2.0;
    let st = run_ensemble(&c, &b, &s, &p, &g, v0).unwrap();
    let accel = pushing_force(&b, &s, &p, PumpingBracket::Exact, 0.2).value / s.mass;
    for r in &st.records {
        let expected = v0 + accel * r.mean_time;
        assert!(
            (r.mean_vz - expected).abs() < 4.0 * r.stderr_vz + 1e-3 * expected,
            "z={} mean {} expected {} ± {}",
            r.z,
            r.mean_vz,
            expected,
            r.stderr_vz
        );
    }
}

#[test]
fn heating_rate_matches_recoil_rule() {
    let s = SpeciesParams::cesium_133();
    let rate = scattering_rate(0.01, &s);
    let fit = heating_calibration(&s, rate, std::f64::consts::TAU * 400.0, 10_000, 11, 10e-3, 40).unwrap();
    let rel = (fit.slope - fit.expected) / fit.expected;
    assert!(rel.abs() < 0.05, "slope {:e} vs {:e} ({rel:+.3})", fit.slope, fit.expected);
}

#[test]
fn ensemble_independent_of_thread_count() {
    let s = SpeciesParams::rubidium_87();
    let b = BeamParams::new(0.021, angular(-1e9), 300e-6, -0.13, Some(0.26), s.wavelength).unwrap();
    let g = Geometry::new(0.72, 4e-3, 0.01).unwrap();
    let p = pumping_for(&b, &s).unwrap();
    let c = McConfig::new(64, 42, 40e-6).with_even_grid(6, g.trap_separation);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_ensemble(&c, &b, &s, &p, &g, 9.0).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(format!("{one:?}"), format!("{four:?}"));
}

//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured numbers (run with `--nocapture` to see them on
//! success).

use rainsim::domain::{Domain, Particle};
use rainsim::dynamics::{em_step, MotionParams, TerminalSpeedParams};
use rainsim::field::{ou_step, OuMode, OuParams, OuState};
use rainsim::kernels::ball_average_error;
use rainsim::numeric::{pava_nonincreasing, total_alive_volume};
use rainsim::regression::{fit_loglog, fit_quadratic, fit_rational};
use rainsim::rng::RngStream;
use rainsim::sweep::{preset, run_sweep, SweepTable};
use rainsim::vec2::Vec2;
use rainsim::{run_replica_observed, SimConfig};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

// -- 1 ----------------------------------------------------------------------

#[test]
fn criterion_1_mass_conservation_across_mixed_settings() {
    // 100 random replicas at N = 200, mixing Brownian, settling, and
    // random-field transport; the total alive volume may never drift by
    // more than 1e-12 relative at any epoch.
    let sigmas = [0.2, 0.6, 1.0];
    let vortex = [(false, 0usize, 0.0f64), (true, 8, 150.0), (true, 20, 900.0)];
    let mut worst: f64 = 0.0;
    for rep in 0..100u64 {
        let (eps_rf, k, lambda) = vortex[(rep % 3) as usize];
        let cfg = SimConfig {
            n_particles: 200,
            max_epochs: 120,
            half_width: 1.0,
            sigma: sigmas[(rep % 5) as usize % 3],
            eps_bm: rep % 2 == 0 || !eps_rf,
            eps_rf,
            vortex_count: k,
            lambda,
            rain_radius: 0.05,
            init_radius_min_factor: 0.3,
            init_radius_max_factor: 0.8,
            v_max: if rep % 4 == 0 { 0.0 } else { 1.0 },
            ..SimConfig::default()
        };
        let mut initial = None;
        run_replica_observed(&cfg, 1000 + rep, rep, |_, particles| {
            let total = total_alive_volume(particles);
            let base = *initial.get_or_insert(total);
            let drift = ((total - base) / base).abs();
            if drift > worst {
                worst = drift;
            }
        })
        .unwrap();
    }
    let pass = worst <= 1e-12;
    report(
        "criterion 1 (mass conservation, 100 mixed replicas)",
        pass,
        &format!("max relative drift {worst:.3e}"),
    );
    assert!(pass, "volume drift {worst:.3e} exceeds 1e-12");
}

// -- 2 ----------------------------------------------------------------------

/// Epochs until two Brownian particles on the unit torus come within eps.
fn two_particle_hit_epochs(sigma: f64, replicas: u64, dt: f64, eps: f64, seed: u64) -> f64 {
    let domain = Domain::square(0.5); // unit torus
    let mp = MotionParams {
        eps_rf: false,
        eps_bm: true,
        sigma,
        dt,
        settling: TerminalSpeedParams::new(0.0, 1.0, 1.0),
        field_drag: 1.0,
    };
    let cap = 2_000_000u64;
    let mut total_epochs = 0.0f64;
    for r in 0..replicas {
        let mut rng = RngStream::new(seed, r).rng();
        let mut ps = vec![
            Particle::new(0, Vec2::ZERO, 1e-9),
            Particle::new(1, Vec2::ZERO, 1e-9),
        ];
        use rand::Rng;
        for p in ps.iter_mut() {
            p.pos = Vec2::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let mut hit = None;
        if domain.distance(ps[0].pos, ps[1].pos) <= eps {
            hit = Some(0u64);
        }
        let mut epoch = 0u64;
        while hit.is_none() && epoch < cap {
            epoch += 1;
            em_step(&mut ps, None, &mp, &domain, &mut rng).unwrap();
            if domain.distance(ps[0].pos, ps[1].pos) <= eps {
                hit = Some(epoch);
            }
        }
        total_epochs += hit.expect("hitting time cap is astronomically generous") as f64;
    }
    total_epochs / replicas as f64
}

#[test]
fn criterion_2_two_particle_brownian_scaling() {
    // mean contact times for sigma = 0.5 and 1.0 must scale like 1/sigma^2
    let dt = 5e-5;
    let eps = 0.05;
    let replicas = 2500;
    let slow = two_particle_hit_epochs(0.5, replicas, dt, eps, 7001);
    let fast = two_particle_hit_epochs(1.0, replicas, dt, eps, 7002);
    let ratio = slow / fast;
    let pass = (3.4..=4.6).contains(&ratio);
    report(
        "criterion 2 (two-particle Brownian hitting-time scaling)",
        pass,
        &format!(
            "E[tau(0.5)] = {:.4}, E[tau(1.0)] = {:.4}, ratio {ratio:.3} vs theory 4",
            slow * dt,
            fast * dt
        ),
    );
    assert!(pass, "ratio {ratio} outside [3.4, 4.6]");
}

// -- 3 ----------------------------------------------------------------------

fn uncensored_means(table: &SweepTable) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::new();
    let mut means = Vec::new();
    for row in &table.rows {
        if let Some(m) = row.mean_epoch {
            x.push(row.value);
            means.push(m);
        }
    }
    (x, means)
}

#[test]
fn criterion_3_brownian_sweep_desk_scale() {
    // N = 300, dt = 1e-4, cap 3000, 10 replicas per sigma in {0.1, ..., 1}:
    // means decrease in sigma (isotonic-smoothed) and the log-log slope of
    // mean time against sigma lies in [-2.2, -0.6]
    let spec = preset("brownian-sweep-desk").unwrap();
    assert_eq!(spec.base.n_particles, 300);
    assert_eq!(spec.base.dt, 1e-4);
    assert_eq!(spec.base.max_epochs, 3000);
    assert_eq!(spec.replicas_per_value, 10);
    let table = run_sweep(&spec, 42).unwrap();

    let (x, means) = uncensored_means(&table);
    let no_empty_rows = x.len() == spec.values.len();
    let smoothed = pava_nonincreasing(&means);
    let decreasing = smoothed.first().unwrap() > smoothed.last().unwrap()
        && smoothed.windows(2).all(|w| w[0] >= w[1]);

    let times: Vec<f64> = means.iter().map(|m| m * spec.base.dt).collect();
    let fit = fit_loglog(&x, &times).unwrap();
    let slope = fit.coefficients[1];
    let slope_ok = (-2.2..=-0.6).contains(&slope);

    let pass = no_empty_rows && decreasing && slope_ok;
    report(
        "criterion 3 (Brownian sweep, desk scale)",
        pass,
        &format!(
            "rows with means {}/{}, smoothed first/last {:.0}/{:.0}, log-log slope {slope:.3}",
            x.len(),
            spec.values.len(),
            smoothed.first().unwrap(),
            smoothed.last().unwrap()
        ),
    );
    assert!(no_empty_rows, "some sigma value censored all replicas");
    assert!(decreasing, "means not decreasing after smoothing: {smoothed:?}");
    assert!(slope_ok, "slope {slope} outside [-2.2, -0.6]");
}

/// Reference full-scale protocol (N = 1000). Takes minutes and, under this
/// reading of the initial radii, the measured sigma = 0.1 endpoint runs
/// slower than the published 4567 epochs; kept for the record rather than
/// as a gate.
#[test]
#[ignore = "full-scale reference run, several minutes"]
fn criterion_3_optional_full_scale_endpoints() {
    let mut spec = preset("brownian-sweep").unwrap();
    spec.values = vec![0.1, 1.0];
    spec.replicas_per_value = 10;
    spec.base.max_epochs = 9000;
    spec.base.rain_radius = 0.0025;
    spec.base.init_radius_min_factor = 0.3;
    spec.base.init_radius_max_factor = 0.65;
    let table = run_sweep(&spec, 42).unwrap();
    let slow = table.rows[0].mean_epoch.unwrap_or(f64::INFINITY);
    let fast = table.rows[1].mean_epoch.unwrap_or(f64::INFINITY);
    let slow_ok = (slow - 4567.0).abs() / 4567.0 <= 0.25;
    let fast_ok = (fast - 636.0).abs() / 636.0 <= 0.25;
    report(
        "criterion 3 optional (full-scale endpoints)",
        slow_ok && fast_ok,
        &format!("sigma 0.1 -> {slow:.0} (ref 4567), sigma 1.0 -> {fast:.0} (ref 636)"),
    );
    assert!(slow_ok && fast_ok, "endpoints {slow:.0}/{fast:.0} off reference");
}

// -- 4 ----------------------------------------------------------------------

#[test]
fn criterion_4_gillespie_oracle_equivalence() {
    // 10 frozen droplets, all pairs in range, unit efficiency: the
    // time-stepped Bernoulli scheme must match the event-driven expected
    // merge count at the horizon within 10% over 5000 replicas
    let cmp = rainsim::oracle_compare(10, 2.0, 5000, 20240817).unwrap();
    let pass = cmp.rel_diff <= 0.10;
    report(
        "criterion 4 (Gillespie vs time-stepped coalescence)",
        pass,
        &format!(
            "event-driven {:.4}, stepped {:.4}, rel diff {:.4} (dt {})",
            cmp.gillespie_mean_merges, cmp.stepped_mean_merges, cmp.rel_diff, cmp.dt
        ),
    );
    assert!(pass, "modes disagree by {:.3}", cmp.rel_diff);
}

// -- 5 ----------------------------------------------------------------------

#[test]
fn criterion_5_ou_stationary_variance() {
    // exact-mode long-run variance within 5% of lambda/2
    let mut detail = String::new();
    let mut pass = true;
    for (i, &lambda) in [4.0, 150.0, 1500.0].iter().enumerate() {
        let p = OuParams::new(lambda, 0.1 / lambda, OuMode::Exact);
        let mut state = OuState::zeros(1);
        let mut rng = RngStream::new(555, i as u64).rng();
        let mut sum_sq = 0.0;
        let steps = 1_000_000u32;
        for _ in 0..steps {
            let z: f64 = rand::Rng::sample(&mut rng, rand_distr::StandardNormal);
            ou_step(&mut state, &p, &[z]).unwrap();
            sum_sq += state.values[0] * state.values[0];
        }
        let var = sum_sq / f64::from(steps);
        let target = lambda / 2.0;
        let rel = (var - target).abs() / target;
        pass &= rel < 0.05;
        detail.push_str(&format!("lambda {lambda}: var {var:.4} vs {target} ({rel:.3}); "));
    }
    report("criterion 5 (OU stationarity, exact mode)", pass, detail.trim_end());
    assert!(pass, "{detail}");
}

// -- 6 ----------------------------------------------------------------------

#[test]
fn criterion_6_kernel_localization_rate() {
    // Gaussian-bump density: halving delta divides the ball-average gap
    // by roughly four (ratio within [0.15, 0.45])
    let x = Vec2::new(0.3, -0.2);
    let c = Vec2::new(0.1, -0.15);
    let s2 = 0.35f64 * 0.35;
    let rho = move |y: Vec2, _: f64| (-((y - c).norm_sq()) / (2.0 * s2)).exp();
    let phi = |y: Vec2, u: f64| u * u * (1.0 + 0.25 * y.x);
    let deltas = [0.2, 0.1, 0.05];
    let errs = ball_average_error(rho, phi, x, 2.0, 1.0, &deltas).unwrap();
    let r1 = errs[1] / errs[0];
    let r2 = errs[2] / errs[1];
    let pass = (0.15..=0.45).contains(&r1) && (0.15..=0.45).contains(&r2);
    report(
        "criterion 6 (contact-ball localization, second order)",
        pass,
        &format!(
            "errors {:.3e}/{:.3e}/{:.3e}, halving ratios {r1:.3}, {r2:.3}",
            errs[0], errs[1], errs[2]
        ),
    );
    assert!(pass, "ratios {r1}, {r2} outside [0.15, 0.45]");
}

// -- 7 ----------------------------------------------------------------------

#[test]
fn criterion_7_regression_engine() {
    // exact recovery to 1e-6 and the published 10-row table refits
    let mut pass = true;
    let mut detail = String::new();

    // quadratic interpolation
    let xq: Vec<f64> = (0..6).map(f64::from).collect();
    let yq: Vec<f64> = xq.iter().map(|&v| 2.0 + 3.0 * v - v * v).collect();
    let fq = fit_quadratic(&xq, &yq).unwrap();
    pass &= (fq.coefficients[0] - 2.0).abs() < 1e-6
        && (fq.coefficients[1] - 3.0).abs() < 1e-6
        && (fq.coefficients[2] + 1.0).abs() < 1e-6;

    // exact power law
    let xp = [0.5, 1.0, 2.0, 4.0, 8.0];
    let yp: Vec<f64> = xp.iter().map(|&v| 7.0 / (v * v)).collect();
    let fp = fit_loglog(&xp, &yp).unwrap();
    pass &= (fp.coefficients[1] + 2.0).abs() < 1e-6;

    // noiseless rational
    let xr: Vec<f64> = (0..20).map(|k| 100.0 + 50.0 * k as f64).collect();
    let yr: Vec<f64> = xr.iter().map(|&xi| 0.08 / (1.0 + 0.048 * xi)).collect();
    let fr = fit_rational(&xr, &yr, 0.02, 0.01).unwrap();
    pass &= (fr.coefficients[0] - 0.08).abs() < 1e-6 && (fr.coefficients[1] - 0.048).abs() < 1e-6;
    detail.push_str("exact recoveries ok; ");

    // published formation-epoch table (10 rows)
    let sigma = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1];
    let epochs = [636.0, 641.4, 691.5, 734.9, 808.0, 917.6, 1086.9, 1569.8, 2896.5, 4567.0];
    let inv_time: Vec<f64> = epochs.iter().map(|e| 1.0 / (e * 1e-4)).collect();
    let quad = fit_quadratic(&sigma, &inv_time).unwrap();
    let quad_ok = (quad.r_squared - 0.992).abs() <= 0.02;
    pass &= quad_ok;
    detail.push_str(&format!("quadratic inverse-time R^2 {:.4} (ref 0.992 +- 0.02); ", quad.r_squared));

    let time: Vec<f64> = epochs.iter().map(|e| e * 1e-4).collect();
    let ll = fit_loglog(&sigma, &time).unwrap();
    let ll_ok = (ll.r_squared - 0.979).abs() <= 0.03;
    pass &= ll_ok;
    detail.push_str(&format!("log-log R^2 {:.4} (ref 0.979 +- 0.03)", ll.r_squared));

    report("criterion 7 (regression engine)", pass, &detail);
    assert!(pass, "{detail}");
}

// -- 8 ----------------------------------------------------------------------

#[test]
fn criterion_8_turbulence_effect() {
    // vortex-count sweep at lambda = 1500: formation time nonincreasing in
    // the vortex count after isotonic smoothing, over >= 5 grid points
    let vspec = preset("vortex-sweep-desk").unwrap();
    assert!(vspec.values.len() >= 5);
    assert!(vspec.replicas_per_value >= 10);
    assert_eq!(vspec.base.lambda, 1500.0);
    let vtable = run_sweep(&vspec, 42).unwrap();
    let (vx, vmeans) = uncensored_means(&vtable);
    let vortex_rows_ok = vx.len() == vspec.values.len();
    let smoothed = pava_nonincreasing(&vmeans);
    let vortex_trend = smoothed.first().unwrap() > smoothed.last().unwrap()
        && smoothed.windows(2).all(|w| w[0] >= w[1]);

    // lambda sweep at 200 vortices: mean time fits a / (1 + b lambda)
    // with correlation >= 0.6
    let lspec = preset("lambda-sweep-desk").unwrap();
    assert_eq!(lspec.base.vortex_count, 200);
    let ltable = run_sweep(&lspec, 42).unwrap();
    let (lx, lmeans) = uncensored_means(&ltable);
    let times: Vec<f64> = lmeans.iter().map(|m| m * lspec.base.dt).collect();
    let fit = fit_rational(&lx, &times, 0.08, 0.048).unwrap();
    let corr = fit.correlation.unwrap();
    let lambda_ok = corr >= 0.6;

    let pass = vortex_rows_ok && vortex_trend && lambda_ok;
    report(
        "criterion 8 (turbulence trends)",
        pass,
        &format!(
            "vortex means {:?} -> smoothed {:.0}..{:.0}; rational fit a {:.4}, b {:.5}, corr {corr:.3}",
            vmeans.iter().map(|m| m.round()).collect::<Vec<_>>(),
            smoothed.first().unwrap(),
            smoothed.last().unwrap(),
            fit.coefficients[0],
            fit.coefficients[1]
        ),
    );
    assert!(vortex_rows_ok, "a vortex grid point censored all replicas");
    assert!(vortex_trend, "vortex sweep not decreasing: {smoothed:?}");
    assert!(lambda_ok, "rational-fit correlation {corr} below 0.6");
}

// -- volume ledger spot check across the acceptance configurations --------

#[test]
fn replica_ledger_consistency() {
    // initial and final volumes agree and the event log length matches the
    // population drop, on a desk-scale configuration
    let spec = preset("brownian-sweep-desk").unwrap();
    let cfg = spec.config_for(0.5).unwrap();
    let res = rainsim::run_replica(&cfg, 9, 0).unwrap();
    let drift = ((res.final_volume - res.initial_volume) / res.initial_volume).abs();
    assert!(drift <= 1e-12);
    assert_eq!(cfg.n_particles - res.final_alive, res.events.len());
}

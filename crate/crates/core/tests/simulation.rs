use rand::RngExt;
use rand_distr::StandardNormal;

use predrobust::dgp::{
    ContinuousDgpConfig, ContinuousVol, DgpConfig, DiscreteDgpConfig, DiscreteVol, GbmDiffusion,
};
use predrobust::inference::{ols_t_statistic, tau_sigma_hat_statistic};
use predrobust::montecarlo::{run_size, McConfig, McMethod};
use predrobust::sample::demean_full;
use predrobust::{build_sample, size_adjusted_cv, Alternative, BandwidthSpec, KernelSpec, RegressionSample, Seed};

fn parse_csv(text: &str) -> (Vec<f64>, Vec<f64>) {
    let mut y = Vec::new();
    let mut x = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        y.push(cols[1].parse().unwrap());
        x.push(cols[2].parse().unwrap());
    }
    (y, x)
}

#[test]
fn csv_round_trip_rebuilds_sample() {
    let configs = [
        DgpConfig::Discrete(DiscreteDgpConfig::new(120, 3.0, 5.0, DiscreteVol::Garch { alpha: 0.3, beta: 0.6 })),
        DgpConfig::Continuous(ContinuousDgpConfig::new(5, 3.0, 5.0, ContinuousVol::rs_default())),
    ];
    for cfg in configs {
        let data = cfg.simulate_seeded(Seed::new(21)).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,y,x,true_vol\n0,0,"));
        let (y, x) = parse_csv(&text);
        assert_eq!(build_sample(&y, &x).unwrap(), data.sample);
    }
}

#[test]
fn same_seed_same_data() {
    let cfg = DgpConfig::Continuous(ContinuousDgpConfig::new(
        5,
        0.0,
        0.0,
        ContinuousVol::gbm_default(GbmDiffusion::OmegaOverSqrtT),
    ));
    let a = cfg.simulate_seeded(Seed::new(3)).unwrap();
    let b = cfg.simulate_seeded(Seed::new(3)).unwrap();
    let c = cfg.simulate_seeded(Seed::new(4)).unwrap();
    assert_eq!(a.sample, b.sample);
    assert_eq!(a.true_vol, b.true_vol);
    assert_ne!(a.sample, c.sample);
}

#[test]
fn shock_correlation_matches_design() {
    // regress predictor innovations on return shocks under CNST, β̄ = κ̄ = 0
    let cfg = DgpConfig::Discrete(DiscreteDgpConfig::new(2000, 0.0, 0.0, DiscreteVol::Cnst));
    let data = cfg.simulate_seeded(Seed::new(5)).unwrap();
    let x = data.sample.x_lag();
    let eta: Vec<f64> = (1..x.len()).map(|i| x[i] - x[i - 1]).collect();
    let eps = &data.sample.y()[..eta.len()];
    let (mut se, mut sh, mut seh) = (0.0, 0.0, 0.0);
    for (e, h) in eps.iter().zip(&eta) {
        se += e * e;
        sh += h * h;
        seh += e * h;
    }
    let corr = seh / (se * sh).sqrt();
    assert!((corr + 0.98).abs() < 0.01, "{corr}");
}

fn ar_half_null_sample(rng: &mut impl rand::Rng, t: usize) -> RegressionSample {
    let mut x = 0.0;
    let mut y = Vec::with_capacity(t);
    let mut xl = Vec::with_capacity(t);
    for _ in 0..t {
        let e: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        xl.push(x);
        y.push(e);
        x = 0.5 * x + v;
    }
    RegressionSample::new(y, xl).unwrap()
}

#[test]
fn ols_t_is_calibrated_for_stationary_predictor() {
    let seed = Seed::new(77);
    let reps = 10_000;
    let crit = Alternative::TwoSided.critical_value(0.05);
    let rejections = (0..reps)
        .filter(|&r| {
            let s = ar_half_null_sample(&mut seed.substream(0, r), 600);
            ols_t_statistic(&s).unwrap().abs() > crit
        })
        .count();
    let pct = 100.0 * rejections as f64 / reps as f64;
    assert!((4.0..=6.0).contains(&pct), "{pct}");
}

#[test]
fn tau_diverges_under_alternative() {
    let seed = Seed::new(8);
    let mean_abs = |t: usize| {
        let cfg = DgpConfig::Discrete(DiscreteDgpConfig::new(t, 20.0, 0.0, DiscreteVol::Cnst));
        let reps = 2000;
        let mut acc = 0.0;
        for r in 0..reps {
            let d = cfg.simulate(&mut seed.substream(t as u64, r)).unwrap();
            let s = predrobust::recursive_demean_predictor(&d.sample).unwrap();
            let h = BandwidthSpec::default().resolve(s.len()).unwrap();
            acc += tau_sigma_hat_statistic(&s, KernelSpec::default(), h, Default::default())
                .unwrap()
                .abs();
        }
        acc / reps as f64
    };
    let (small, large) = (mean_abs(60), mean_abs(600));
    assert!(large > small, "{small} vs {large}");
}

#[test]
fn empirical_cv_of_normal_draws() {
    let mut rng = Seed::new(9).rng();
    let draws: Vec<f64> = (0..1_000_000).map(|_| rng.sample(StandardNormal)).collect();
    let cv = size_adjusted_cv(&draws, 0.05).unwrap();
    assert!((1.94..=1.98).contains(&cv), "{cv}");
    let median = size_adjusted_cv(&draws, 0.5).unwrap();
    assert!((median - 0.6745).abs() < 0.005, "{median}");
}

#[test]
fn oracle_size_with_one_hundred_reps() {
    let mut cfg = McConfig::new(DgpConfig::Discrete(DiscreteDgpConfig::new(240, 0.0, 0.0, DiscreteVol::Cnst)));
    cfg.reps = 100;
    cfg.methods = vec![McMethod::TauOracle];
    cfg.settings.alternative = Alternative::TwoSided;
    let cell = run_size(&cfg).unwrap().get("CNST", "tau_oracle", 0.0, 240, 0.05).cloned().unwrap();
    assert!((cell.reject_pct - 5.0).abs() <= 3.0 * 100.0 * (0.05f64 * 0.95 / 100.0).sqrt());
}

#[test]
fn full_demeaning_matches_intercept_regression() {
    let data = DgpConfig::Discrete(DiscreteDgpConfig::new(240, 5.0, 5.0, DiscreteVol::Cnst))
        .simulate_seeded(Seed::new(10))
        .unwrap();
    let s = &data.sample;
    let n = s.len() as f64;
    let (my, mx) = (s.y().iter().sum::<f64>() / n, s.x_lag().iter().sum::<f64>() / n);
    let sxy: f64 = s.y().iter().zip(s.x_lag()).map(|(y, x)| (y - my) * (x - mx)).sum();
    let sxx: f64 = s.x_lag().iter().map(|x| (x - mx) * (x - mx)).sum();
    let beta = predrobust::ols_fit(&demean_full(s)).unwrap();
    assert!((beta - sxy / sxx).abs() < 1e-12 * (1.0 + beta.abs()));
}

#[test]
fn null_csv_batch_is_calibrated() {
    // 601-row files under the null, read back and tested two-sided
    let cfg = DgpConfig::Discrete(DiscreteDgpConfig::new(600, 0.0, 0.0, DiscreteVol::Cnst));
    let seed = Seed::new(7);
    let settings = predrobust::TestSettings::default();
    let mut small = 0;
    for r in 0..1000 {
        let data = cfg.simulate(&mut seed.substream(0, r)).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let (y, x) = parse_csv(std::str::from_utf8(&buf).unwrap());
        assert_eq!(y.len(), 601);
        let s = predrobust::Demean::Recursive.apply(&build_sample(&y, &x).unwrap()).unwrap();
        let p = predrobust::tau_sigma_hat(&s, &settings).unwrap().p_value;
        if p <= 0.001 {
            small += 1;
        }
    }
    // Binomial(1000, 0.001): P(count > 5) is about 6e-4. One exceedance or
    // fewer happens only with probability 0.74 even for an exact pivot.
    println!("{small} of 1000 p-values at or below 0.001");
    assert!(small <= 5, "{small} of 1000 p-values at or below 0.001");
}

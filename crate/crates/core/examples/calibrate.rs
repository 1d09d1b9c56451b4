//! One-off calibration runs used to choose the frozen scenario parameters in
//! `configs/`. Run with
//! `cargo run --release -p tailcheck --example calibrate -- [reps] [perms] [sigma_y rho]`;
//! giving `sigma_y rho` checks a single grid point against both ROC tests.

use tailcheck::harness::{run_experiment, ExperimentConfig, ScenarioSpec, TestSpec};
use tailcheck::rng_stream;
use tailcheck::scenarios::{
    calibrate_roc_scenario, equal_median_scenario, generate_survival_dataset,
    SurvivalScenarioParams,
};
use tailcheck::survival::{weighted_logrank, WeightScheme};

fn main() -> tailcheck::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let reps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let perms: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(199);

    let point: Option<(f64, f64)> = match (args.get(3), args.get(4)) {
        (Some(s), Some(r)) => Some((s.parse().expect("sigma_y"), r.parse().expect("rho"))),
        _ => None,
    };
    let grid: Vec<(f64, f64)> = match point {
        Some(p) => vec![p],
        None => [0.5, 2.0, 3.0]
            .iter()
            .flat_map(|&s| [0.3, 0.5, 0.7, 0.9].map(|r| (s, r)))
            .collect(),
    };

    println!("ROC: reps={reps} permutations={perms}");
    println!(
        "{:>8} {:>6} {:>7} {:>7} {:>7}",
        "sigma_y", "rho", "power", "gamma", "beta"
    );
    for &(sigma_y, rho) in &grid {
        {
            let params = calibrate_roc_scenario(0.763, 0.759, sigma_y, rho)?;
            let config = ExperimentConfig {
                scenario: ScenarioSpec::Roc(params),
                test: TestSpec::Venkatraman {
                    n_permutations: perms,
                },
                alpha: 0.05,
                n_reps: reps,
                master_seed: 2021,
                keep_records: false,
            };
            let d = run_experiment(&config)?.decomposition;
            println!(
                "{:>8} {:>6} {:>7.3} {:>7.3} {:>7.3}",
                sigma_y, rho, d.power.rate, d.gamma.rate, d.beta.rate
            );
            if point.is_some() {
                let boot = ExperimentConfig {
                    test: TestSpec::BootstrapAuc { n_boot: 1000 },
                    ..config
                };
                let d = run_experiment(&boot)?.decomposition;
                println!(
                    "{:>8} {:>6} {:>7.3} {:>7.3} {:>7.3}  (bootstrap)",
                    sigma_y, rho, d.power.rate, d.gamma.rate, d.beta.rate
                );
            }
        }
    }

    let crossing = SurvivalScenarioParams::crossing_default();
    let data = generate_survival_dataset(&crossing, &rng_stream(2021, 0))?;
    println!("\ncrossing hazards, n = {}/{}:", crossing.n_a, crossing.n_b);
    for scheme in WeightScheme::STANDARD {
        let r = weighted_logrank(&data, scheme)?;
        println!("  {:<28} z = {:>8.3}", scheme.name(), r.z);
    }

    let config = ExperimentConfig {
        scenario: ScenarioSpec::Survival(equal_median_scenario()),
        test: TestSpec::MedianComparison {
            scheme: WeightScheme::GehanBreslow,
        },
        alpha: 0.05,
        n_reps: reps,
        master_seed: 2021,
        keep_records: false,
    };
    let r = run_experiment(&config)?;
    println!(
        "\nequal medians: Gehan rejection {:.3}, P(median_A > median_B) {:.3}",
        r.significant.rate,
        r.observed_directions.less as f64 / reps as f64
    );
    Ok(())
}

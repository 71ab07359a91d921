use fracanneal_core::analysis::mean_var;
use fracanneal_core::ensemble::WienerEnsemble;
use fracanneal_core::fbm::{HurstParam, TimeGrid};
use fracanneal_core::sde::{builtin_energy, driving_paths, euler_maruyama, AnnealingConfig, EnergyFunction};

fn config(temp: f64, hs: [f64; 2], eps: [f64; 2], x0: [f64; 2], grid: TimeGrid) -> AnnealingConfig {
    AnnealingConfig::new(
        temp,
        hs.iter().map(|&h| HurstParam::new(h).unwrap()).collect(),
        eps.to_vec(),
        x0.to_vec(),
        grid,
    )
    .unwrap()
}

#[test]
fn euler_mean_follows_discrete_ou_mean() {
    // g = ½ (x − m)ᵀQ(x − m) with Q = diag(2, 1): noise has mean zero for
    // any H, so E X_n = m + (I − QΔ)^n (x₀ − m) holds exactly
    let g = builtin_energy("quadratic", &[2.0, 0.0, 0.0, 1.0, 2.0, -1.0]).unwrap();
    let grid = TimeGrid::new(1.0, 64).unwrap();
    let steady = [2.0, -1.0];
    for (k, hs) in [[0.5, 0.5], [0.3, 0.7]].into_iter().enumerate() {
        let c = config(0.5, hs, [0.0, 0.0], [3.0, 2.0], grid);
        let ens = WienerEnsemble::new(grid, 2, 60 + k as u64, 4000).unwrap();
        let mut cols = [vec![], vec![]];
        for r in 0..ens.replicates {
            let p = euler_maruyama(&g, &c, &driving_paths(&c, &ens.path(r)).unwrap()).unwrap();
            for j in 0..2 {
                cols[j].push(p.row(64)[j]);
            }
        }
        for (j, q) in [2.0, 1.0].into_iter().enumerate() {
            let (m, v) = mean_var(&cols[j]);
            let se = (v / cols[j].len() as f64).sqrt();
            let exact = steady[j] + (1.0 - q * grid.dt()).powi(64) * (c.initial_state[j] - steady[j]);
            assert!((m - exact).abs() < 3.0 * se, "H={hs:?} dim {j}: {m} vs {exact}");
        }
    }
}

#[test]
fn energy_decreases_on_average_at_low_temperature() {
    let g = builtin_energy("quadratic", &[2.0, 0.5, 0.5, 1.0, 0.0, 0.0]).unwrap();
    let grid = TimeGrid::new(2.0, 128).unwrap();
    let c = config(0.01, [0.3, 0.7], [0.0, 0.0], [2.0, -2.0], grid);
    let ens = WienerEnsemble::new(grid, 2, 3, 200).unwrap();
    let mut end = vec![];
    for r in 0..ens.replicates {
        let p = euler_maruyama(&g, &c, &driving_paths(&c, &ens.path(r)).unwrap()).unwrap();
        end.push(g.value(p.row(128)));
    }
    let (m, v) = mean_var(&end);
    let start = g.value(&c.initial_state);
    assert!(m + 3.0 * (v / end.len() as f64).sqrt() < start);
}

#[test]
fn strong_error_shrinks_under_refinement() {
    // the same Wiener paths, bridge-refined; the terminal state converges
    let g = builtin_energy("double_well", &[1.0]).unwrap();
    let ens = WienerEnsemble::new(TimeGrid::new(1.0, 32).unwrap(), 2, 44, 100).unwrap();
    let levels = 5;
    let mut terminal = vec![vec![]; levels];
    for r in 0..ens.replicates {
        let mut w = ens.path(r);
        for t in terminal.iter_mut() {
            let c = config(0.2, [0.7, 0.7], [0.0, 0.0], [0.5, 0.2], *w.grid());
            let p = euler_maruyama(&g, &c, &driving_paths(&c, &w).unwrap()).unwrap();
            t.push(p.row(w.grid().n_steps()).to_vec());
            w = w.refine();
        }
    }
    let finest = &terminal[levels - 1];
    let errors: Vec<f64> = terminal[..levels - 1]
        .iter()
        .map(|lvl| {
            let s: f64 = lvl
                .iter()
                .zip(finest)
                .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
                .sum();
            (s / lvl.len() as f64).sqrt()
        })
        .collect();
    for pair in errors.windows(2) {
        assert!(pair[1] < pair[0], "{errors:?}");
    }
}

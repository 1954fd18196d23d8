//! Pilot runs behind `calibration/pilot.toml`.
//!
//! `cargo run --release -p scenerywalk-core --example pilot -- hk|floor|strategy`

use scenerywalk::calibration::fit_hk_constants;
use scenerywalk::montecarlo::{strategy_lower_bound, tail_prob_scan, StrategyConfig, TailModel};

fn main() {
    let what = std::env::args().nth(1).unwrap_or_else(|| "hk".into());
    match what.as_str() {
        "hk" => {
            let c = fit_hk_constants();
            println!("c1 = {:?}\nc2 = {:?}\nc3 = {:?}\nc4 = {:?}", c.c1, c.c2, c.c3, c.c4);
        }
        "floor" => {
            let grid = [100.0, 316.0, 1000.0, 3162.0, 10000.0];
            let s = tail_prob_scan(TailModel::Rwrs { rho: 1.2 }, 0.5, 1, &grid, 2000, 17, 17, 6.0)
                .expect("polynomial regime");
            for (t, e) in grid.iter().zip(&s.estimates) {
                let need = -e.ci_low.ln() / t.ln();
                println!("t = {t}: p = {} ci_low = {} (exponent needed {need:.3})", e.probability, e.ci_low);
            }
            println!("fit {:?}", s.fit);
        }
        "strategy" => {
            let cfg = StrategyConfig::default();
            let mut worst = Vec::new();
            for seed in 0..50 {
                let b = strategy_lower_bound(1.0, 1, 1.5, 1000.0, seed, &cfg, None).unwrap();
                println!("{seed}: {:.3} site {:?} z {:.1} L {:.1}", b.exponent, b.site.coords(), b.z, b.local_time_needed);
                worst.push(b.exponent - b.p_exponent);
            }
            worst.sort_by(|a, b| a.total_cmp(b));
            println!("excess over p: median {:.3}, 90% {:.3}, max {:.3}", worst[25], worst[44], worst[49]);
        }
        "time-change" => {
            for seed in 1..=8 {
                println!("{}", scenerywalk::verify::time_change(seed).unwrap().line());
            }
        }
        other => eprintln!("unknown pilot {other}"),
    }
}

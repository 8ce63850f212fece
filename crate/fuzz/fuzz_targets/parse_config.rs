#![no_main]

use libfuzzer_sys::fuzz_target;
use tunefree::harness::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ExperimentConfig::parse(text) {
        assert!(!cfg.algo.algos.is_empty());
        assert!(!cfg.experiment.t_grid.is_empty() && !cfg.experiment.seeds.is_empty());
    }
});

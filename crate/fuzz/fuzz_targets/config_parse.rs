#![no_main]

use invobs_cli::Config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = Config::parse(text) else {
        return;
    };
    // Resolution must reject or accept without panicking.
    let _ = config.gains();
    if let Ok(sim) = config.sim_config() {
        assert!(sim.validate().is_ok());
    }
    let _ = config.profile.build();
});

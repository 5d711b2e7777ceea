#![no_main]

use libfuzzer_sys::fuzz_target;
use ppife::study::StudyConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = StudyConfig::parse(text) {
        let again = StudyConfig::parse(&cfg.to_text()).expect("serialized config parses");
        assert_eq!(again.to_text(), cfg.to_text());
    }
});

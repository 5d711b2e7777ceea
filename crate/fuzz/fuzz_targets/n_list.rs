#![no_main]

use libfuzzer_sys::fuzz_target;
use ppife::study::parse_n_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = parse_n_list(text) {
        assert!(!list.is_empty());
        assert!(list.windows(2).all(|w| w[0].checked_mul(2) == Some(w[1])));
    }
});

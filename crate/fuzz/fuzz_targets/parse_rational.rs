#![no_main]

use cm_realize::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = s.parse::<Rational>() {
        // the display form parses back to the same value
        assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
    }
});

#![no_main]

use cm_realize::plumbing::{normalize, star_plumbing, SeifertForm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(y) = s.parse::<SeifertForm>() else { return };
    assert_eq!(y.to_string().parse::<SeifertForm>().unwrap(), y);
    if let Ok((n, _)) = normalize(y.e, &y.fibers) {
        assert!(n.is_normalized());
        let _ = star_plumbing(&n);
    }
});

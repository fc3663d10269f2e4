#![no_main]

use hg_core::growth::GrowthFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(phi) = serde_json::from_slice::<GrowthFunction>(data) else { return };
    if phi.validate().is_ok() {
        for t in [1e-6, 0.5, 1.0, 3.0, 1e6] {
            let _ = phi.eval(t);
        }
    }
});

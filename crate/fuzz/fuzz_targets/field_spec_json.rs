#![no_main]

use hg_core::fields::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<FieldSpec>(data) else { return };
    for n in 1..=4 {
        if let Ok(f) = spec.build(n) {
            let y: Vec<f64> = (0..n).map(|i| 0.3 - 0.1 * i as f64).collect();
            let _ = f.eval(&y);
            let _ = f.gradient(&y);
            let _ = f.singularities();
            let _ = f.support();
        }
    }
});

//! Named hyperparameter presets for the windowed optimizer: the documented
//! per-dataset defaults (learning rate, initial window, maximum window,
//! batch size).

/// One preset row: `(alpha0, omega_init, delta, batch_size)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub alpha0: f64,
    pub omega_init: u32,
    pub delta: u32,
    pub batch_size: usize,
}

const PRESETS: &[(&str, Preset)] = &[
    ("cifar10", Preset { alpha0: 1e-4, omega_init: 5, delta: 10, batch_size: 512 }),
    ("cifar100", Preset { alpha0: 1e-4, omega_init: 5, delta: 10, batch_size: 256 }),
    ("imagenet", Preset { alpha0: 1e-4, omega_init: 5, delta: 8, batch_size: 64 }),
    ("mnli", Preset { alpha0: 3e-6, omega_init: 5, delta: 8, batch_size: 8 }),
    ("qqp", Preset { alpha0: 3e-6, omega_init: 5, delta: 8, batch_size: 16 }),
    ("qnli", Preset { alpha0: 3e-6, omega_init: 5, delta: 10, batch_size: 16 }),
    ("sst2", Preset { alpha0: 3e-6, omega_init: 5, delta: 8, batch_size: 64 }),
    ("cola", Preset { alpha0: 2e-5, omega_init: 5, delta: 10, batch_size: 16 }),
    ("stsb", Preset { alpha0: 2e-6, omega_init: 5, delta: 10, batch_size: 16 }),
    ("mrpc", Preset { alpha0: 3e-6, omega_init: 5, delta: 10, batch_size: 8 }),
    ("rte", Preset { alpha0: 3e-6, omega_init: 5, delta: 10, batch_size: 16 }),
    ("cora", Preset { alpha0: 1e-4, omega_init: 5, delta: 10, batch_size: 64 }),
    ("pubmed", Preset { alpha0: 1e-4, omega_init: 5, delta: 10, batch_size: 64 }),
    ("urbansound8k", Preset { alpha0: 1e-3, omega_init: 5, delta: 8, batch_size: 16 }),
];

/// Look a preset up by name (case-insensitive; "core" is accepted as an
/// alias for "cora").
pub fn lookup(name: &str) -> Option<Preset> {
    let key = name.to_ascii_lowercase();
    let key = if key == "core" { "cora".to_string() } else { key };
    PRESETS
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, preset)| *preset)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every preset reproduces its documented (alpha, W, W_max) triple.
    #[test]
    fn documented_triples() {
        let expect = [
            ("cifar10", 1e-4, 5, 10),
            ("cifar100", 1e-4, 5, 10),
            ("imagenet", 1e-4, 5, 8),
            ("mnli", 3e-6, 5, 8),
            ("qqp", 3e-6, 5, 8),
            ("qnli", 3e-6, 5, 10),
            ("sst2", 3e-6, 5, 8),
            ("cola", 2e-5, 5, 10),
            ("stsb", 2e-6, 5, 10),
            ("mrpc", 3e-6, 5, 10),
            ("rte", 3e-6, 5, 10),
            ("cora", 1e-4, 5, 10),
            ("pubmed", 1e-4, 5, 10),
            ("urbansound8k", 1e-3, 5, 8),
        ];
        assert_eq!(expect.len(), names().len());
        for (name, alpha0, w, wmax) in expect {
            let p = lookup(name).unwrap_or_else(|| panic!("missing preset {name}"));
            assert_eq!(p.alpha0, alpha0, "{name} alpha");
            assert_eq!(p.omega_init, w, "{name} W");
            assert_eq!(p.delta, wmax, "{name} W_max");
        }
    }

    #[test]
    fn alias_and_case() {
        assert_eq!(lookup("core"), lookup("cora"));
        assert_eq!(lookup("CIFAR10"), lookup("cifar10"));
        assert_eq!(lookup("nope"), None);
    }
}

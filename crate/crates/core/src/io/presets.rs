//! Experiment presets, one per figure setup. The config files live in
//! `crates/core/presets/` and are embedded at build time.

use crate::error::{Error, Result};
use crate::harness::ExperimentConfig;
use crate::io::config::parse_config;

macro_rules! presets {
    ($($id:literal),* $(,)?) => {
        pub const PRESET_IDS: &[&str] = &[$($id),*];

        /// Raw config text of a preset.
        pub fn preset_text(id: &str) -> Option<&'static str> {
            match id {
                $($id => Some(include_str!(concat!("../../presets/", $id, ".toml"))),)*
                _ => None,
            }
        }
    };
}

presets!(
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c", "fig5a",
    "fig5b", "fig6", "fig7a", "fig7b", "fig8",
);

pub fn preset_ids() -> impl Iterator<Item = &'static str> {
    PRESET_IDS.iter().copied()
}

pub fn preset(id: &str) -> Result<ExperimentConfig> {
    let text = preset_text(id).ok_or_else(|| Error::UnknownPreset(id.to_string()))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::RewardDistribution;
    use crate::policies::Variant;

    #[test]
    fn every_preset_validates() {
        for id in preset_ids() {
            let cfg = preset(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(cfg.label, id);
            assert_eq!(cfg.runs, 100);
            assert!(cfg.validate().is_ok());
        }
        assert!(matches!(preset("fig9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn fig3c_uses_inverse_time_reweighted() {
        let cfg = preset("fig3c").unwrap();
        assert_eq!(cfg.policy.variant, Variant::Reweighted);
        assert_eq!(cfg.policy.schedule.exponent(), 1.0);
        assert_eq!(cfg.policy.schedule.epsilon(4), 0.25);
    }

    #[test]
    fn fig4a_matches_caption() {
        let cfg = preset("fig4a").unwrap();
        assert_eq!(
            cfg.arms,
            vec![
                RewardDistribution::point(-1.0).unwrap(),
                RewardDistribution::uniform(-0.25, 0.25).unwrap(),
                RewardDistribution::uniform(-1.0, 1.0).unwrap(),
            ]
        );
        assert_eq!(cfg.policy.variant, Variant::Optimistic);
        assert_eq!(cfg.policy.rho, 2.0);
        assert_eq!(cfg.policy.schedule.exponent(), 1.0);
        assert_eq!(preset("fig4c").unwrap().policy.rho, 0.02);
    }

    #[test]
    fn equal_mean_pairs_have_equal_means() {
        for (id, a, b) in [
            ("fig2b", 1, 2),
            ("fig2c", 1, 2),
            ("fig3a", 0, 1),
            ("fig3b", 0, 1),
            ("fig4b", 1, 2),
            ("fig8", 0, 1),
        ] {
            let cfg = preset(id).unwrap();
            assert_eq!(cfg.arms[a].mean(), cfg.arms[b].mean(), "{id}");
        }
        let fig5b = preset("fig5b").unwrap();
        assert!((fig5b.arms[2].mean() - 0.1).abs() < 1e-12);
    }
}

use std::sync::Arc;

use polyzeta_core::field::LevelInfo;
use polyzeta_core::polylog::PolylogSet;
use polyzeta_core::session::RunConfig;
use polyzeta_core::{FieldCtx, FqConfig, LocalSeries, PlaceCtx, SeriesJson};

#[test]
fn polylog_coefficients_round_trip_through_json() {
    for (p, upsilon, pi) in [(2, 1, vec![0, 1]), (3, 1, vec![0, 1]), (2, 1, vec![1, 1, 1]), (2, 2, vec![0, 1])] {
        let config = FqConfig::new(p, upsilon).unwrap();
        let place = Arc::new(PlaceCtx::new(config, pi, 48).unwrap());
        let set = PolylogSet::build(place, &[], 8, 2).unwrap();
        let levels: Vec<LevelInfo> = serde_json::from_str(&serde_json::to_string(&set.fields().levels()).unwrap()).unwrap();
        let rebuilt = FieldCtx::from_levels(config, &levels).unwrap();
        for n in 1..=2 {
            for c in set.carlitz(n).unwrap().coeffs() {
                let text = serde_json::to_string(&c.to_json()).unwrap();
                let parsed: SeriesJson = serde_json::from_str(&text).unwrap();
                let back = LocalSeries::from_json(&rebuilt, &parsed).unwrap();
                assert_eq!(back.to_json(), c.to_json());
                assert_eq!(back.precision(), c.precision());
            }
        }
    }
}

#[test]
fn malformed_series_json_is_rejected() {
    let ctx = FieldCtx::new(FqConfig::new(3, 1).unwrap());
    let bad = [
        r#"{"valuation": 0, "precision": 3, "digits": [[0], [1], [2]], "level": 0}"#,
        r#"{"valuation": 0, "precision": 3, "digits": [[1]], "level": 0}"#,
        r#"{"valuation": null, "precision": 3, "digits": [[1]], "level": 0}"#,
        r#"{"valuation": 0, "precision": 1, "digits": [[1]], "level": 4}"#,
    ];
    for text in bad {
        let json: SeriesJson = serde_json::from_str(text).unwrap();
        assert!(LocalSeries::from_json(&ctx, &json).is_err(), "{text}");
    }
    let ok: SeriesJson = serde_json::from_str(r#"{"valuation": -1, "precision": 2, "digits": [[2], [0], [1]], "level": 0}"#).unwrap();
    let s = LocalSeries::from_json(&ctx, &ok).unwrap();
    assert_eq!(s.val_lb(), -1);
    assert_eq!(s.digit_value(1), 1);
}

#[test]
fn run_config_round_trips() {
    let cfg = RunConfig { p: 3, pi: vec![2, 1, 1], branch: vec![1, 0], ..RunConfig::default() };
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
}
